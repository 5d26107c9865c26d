#!/usr/bin/env python3
"""Generate the bundled mini corpus and its synthetic embedding table.

Deterministic: fixed RNG seeds produce byte-identical data files. The
corpus plants a 4-theme x 3-subtheme hierarchy: every article mixes words
from its subtheme, its theme's shared pool, and a corpus-wide filler pool,
so the pipeline has real structure to recover. Six extra records fail the
ingestion filter on purpose (wrong language / missing body).

Run from the repository root:

    python tools/make_minicorpus.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from topictree.corpus import TokenPipelineConfig, build_vocabulary, ingest, tokenize
from topictree.stemming import porter_stem

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

DOCS_PER_SUB = 42
EMBED_DIM = 24

THEMES = {
    "stellar astronomy": {
        "shared": """star stellar nova flux orbit photon cosmic flare corona spectrum
                     redshift transit zenith magnitude parallax""",
        "subs": {
            "variable stars": """pulsar quasar cepheid binary period brightness dimming
                                 oscillation cycle amplitude lightcurve outburst""",
            "planet formation": """planet moon crater mantle magma dust disk accretion
                                   migration embryo pebble protoplanet""",
            "galactic surveys": """galaxy spiral cluster halo merger bulge void stream
                                   census catalog survey field""",
        },
    },
    "reef oceanography": {
        "shared": """ocean reef coral lagoon tide plankton seawater benthic salinity
                     shoal marine coastal habitat biomass depth""",
        "subs": {
            "coral health": """polyp algae bleach spawn larva symbiont calcification
                               skeleton colony mucus zooxanthellae recovery""",
            "deep vents": """abyss trench vent brine hadal sonar mooring seep
                             basalt chimney sulfide plume""",
            "current dynamics": """current gyre eddy upwelling buoy drifter swell surge
                                   thermocline circulation transport vorticity""",
        },
    },
    "systems neuroscience": {
        "shared": """brain neural cortex neuron circuit stimulus signal
                     recording electrode firing plasticity pathway nucleus latency""",
        "subs": {
            "memory circuits": """memory recall engram hippocampus consolidation trace
                                  cue retrieval forgetting encoding replay sleep""",
            "visual coding": """vision retina photoreceptor cone rod fovea saccade
                                contrast edge motion orientation luminance""",
            "synaptic signaling": """bouton axon dendrite glia myelin spike soma vesicle
                                     receptor neurotransmitter channel calcium""",
        },
    },
    "engineered materials": {
        "shared": """material specimen microstructure hardness tensile fracture
                     stiffness composite coating deformation strain stress""",
        "subs": {
            "polymer blends": """polymer chain monomer resin blend gel cure epoxy fiber
                                 strand crosslink elastomer""",
            "alloy processing": """alloy metal steel grain weld anneal quench forge ingot
                                   copper zinc titanium""",
            "semiconductor growth": """crystal wafer dopant silicon bandgap etch substrate
                                       mask epitaxy deposition cleanroom yield""",
        },
    },
}

FILLER = """method result analysis measurement dataset experiment observation model
            parameter estimate uncertainty baseline protocol instrument calibration
            replicate control hypothesis finding evidence literature approach
            framework technique procedure summary discussion appendix figure table"""

SOURCES = ("galepress", "bluewater-archive", "synapse-letters", "forgeworks-journal")

TITLE_PATTERNS = (
    "On the {a} and {b} of {c}",
    "A study of {a} with {b} and {c}",
    "{a} and {b}: notes on {c}",
    "Observations of {a} near {b} and {c}",
    "Toward a model of {a}, {b} and {c}",
)


def words(text: str) -> list[str]:
    return text.split()


def compose(rng: np.random.Generator, sub: list[str], shared: list[str],
            filler: list[str], n_tokens: int) -> str:
    pools = (sub, shared, filler)
    probs = (0.55, 0.30, 0.15)
    choice = rng.choice(3, size=n_tokens, p=probs)
    out = [pools[c][rng.integers(len(pools[c]))] for c in choice]
    return " ".join(out)


def make_records() -> list[dict]:
    rng = np.random.default_rng(20240817)
    filler = words(FILLER)
    records = []
    idx = 0
    for theme, spec in THEMES.items():
        shared = words(spec["shared"])
        for sub_name, sub_text in spec["subs"].items():
            sub = words(sub_text)
            for _ in range(DOCS_PER_SUB):
                idx += 1
                a, b, c = rng.choice(sub + shared, size=3, replace=False)
                title = TITLE_PATTERNS[rng.integers(len(TITLE_PATTERNS))].format(a=a, b=b, c=c)
                abstract = compose(rng, sub, shared, filler, int(rng.integers(20, 29)))
                body = compose(rng, sub, shared, filler, int(rng.integers(75, 106)))
                records.append({
                    "id": f"art-{idx:04d}",
                    "title": title,
                    "abstract": abstract.capitalize() + ".",
                    "body": body.capitalize() + ".",
                    "source": SOURCES[rng.integers(len(SOURCES))],
                    "language": "en",
                    "_theme": theme,
                    "_sub": sub_name,
                })
    # records the ingestion filter must drop
    records.append({"id": "art-x001", "title": "Étude des récifs", "abstract": "Une étude.",
                    "body": "Texte complet.", "source": SOURCES[1], "language": "fr"})
    records.append({"id": "art-x002", "title": "Missing body", "abstract": "Has an abstract.",
                    "body": "", "source": SOURCES[0], "language": "en"})
    records.append({"id": "art-x003", "title": "Missing abstract", "abstract": "",
                    "body": "Body but no abstract.", "source": SOURCES[2], "language": "en"})
    for i, lang in enumerate(("de", "es", "zh"), start=4):
        records.append({"id": f"art-x{i:03d}", "title": f"Sin resumen {i}",
                        "abstract": "Kurz.", "body": "Voll.", "source": SOURCES[3],
                        "language": lang})
    return records


def write_corpus(records: list[dict], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            public = {k: v for k, v in rec.items() if not k.startswith("_")}
            fh.write(json.dumps(public, ensure_ascii=False) + "\n")


def write_truth(records: list[dict], path: Path) -> None:
    truth = {r["id"]: [r["_theme"], r["_sub"]] for r in records if "_theme" in r}
    path.write_text(json.dumps(truth, indent=0, sort_keys=True) + "\n", "utf-8")


def write_embeddings(corpus_path: Path, out_path: Path) -> None:
    """Random but theme-structured vectors for every retained vocabulary token."""
    docs = ingest(corpus_path)
    cfg = TokenPipelineConfig.default()
    token_lists = [tokenize(d, cfg) for d in docs]
    vocab = build_vocabulary(token_lists, min_df=5, max_df_ratio=0.95)
    for tok in vocab.tokens:
        if tok.isalpha() and porter_stem(tok) != tok:
            raise SystemExit(f"vocabulary token {tok!r} is not a stemmer fixed point")

    groups: dict[str, str] = {}
    for theme, spec in THEMES.items():
        for w in words(spec["shared"]):
            groups[porter_stem(w)] = theme
        for sub_name, sub_text in spec["subs"].items():
            for w in words(sub_text):
                groups[porter_stem(w)] = f"{theme}/{sub_name}"
    rng = np.random.default_rng(99)
    centroids = {g: rng.normal(0, 1.0, EMBED_DIM) for g in sorted(set(groups.values()))}

    lines = [f"{vocab.size} {EMBED_DIM}"]
    for tok in vocab.tokens:
        center = centroids.get(groups.get(tok, ""), np.zeros(EMBED_DIM))
        vec = center + rng.normal(0, 0.35, EMBED_DIM)
        lines.append(tok + " " + " ".join(f"{x:.5f}" for x in vec))
    out_path.write_text("\n".join(lines) + "\n", "utf-8")
    print(f"embeddings: {vocab.size} tokens, dim {EMBED_DIM} -> {out_path}")


def main() -> None:
    DATA.mkdir(exist_ok=True)
    records = make_records()
    corpus_path = DATA / "minicorpus.jsonl"
    write_corpus(records, corpus_path)
    write_truth(records, DATA / "minicorpus_truth.json")
    n_good = sum(1 for r in records if "_theme" in r)
    print(f"corpus: {len(records)} records ({n_good} pass the filter) -> {corpus_path}")
    write_embeddings(corpus_path, DATA / "mini_embeddings.txt")


if __name__ == "__main__":
    main()
