"""Command-line pipeline driver: ingest, build, eval, export, serve.

build runs corpus -> model selection -> hierarchical factorization and
writes the tree export, run manifest, variance and lss CSVs and the
per-node word sets. eval fills per-node coherence and the pairwise
distance heatmap. serve exposes the finished export read-only over HTTP.

Exit codes: 0 ok, 2 input error, 3 schema error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys
import time
from pathlib import Path

from .corpus import (
    DEFAULT_DROP_LIST,
    DEFAULT_MAX_DF_RATIO,
    DEFAULT_MIN_DF,
    IngestFilter,
    TokenPipelineConfig,
    build_tfidf,
    build_vocabulary,
    ingest,
    load_stopwords,
    tokenize,
)
from .errors import InputError, NumericError, SchemaError
from .evaluate import (
    DEFAULT_COHERENCE_TOP,
    DEFAULT_WMD_TOP,
    TopicWordSet,
    coherence,
    embedding_coverage,
    heatmap_from_word_sets,
    load_embeddings,
    write_heatmap_csv,
)
from .hnmf import HnmfConfig, build_tree, path_key
from .modelsel import write_lss_csv, write_variance_csv
from .serialize import (
    build_export,
    build_manifest,
    build_wordsets,
    dumps_export,
    iter_nodes,
    load_export,
    load_manifest,
    load_wordsets,
    sha256_file,
    write_export,
)
from .server import heatmap_payload, make_server

log = logging.getLogger(__name__)


def _parse_range(text: str) -> list[int]:
    try:
        k1, k2 = (int(p) for p in text.split(":"))
    except ValueError:
        raise InputError(f"--range expects k1:k2, got {text!r}") from None
    return [k1, k2]


def _flags_from_args(args: argparse.Namespace) -> dict:
    drop_list = (
        [p.strip() for p in args.drop_list.split(",") if p.strip()]
        if args.drop_list is not None
        else list(DEFAULT_DROP_LIST)
    )
    return {
        "language": args.language,
        "stopwords": args.stopwords,
        "drop_list": drop_list,
        "normalizer": args.normalizer,
        "min_token_len": args.min_token_len,
        "include_title": not args.no_title,
        "min_df": args.min_df,
        "max_df_ratio": args.max_df_ratio,
        "alpha": args.alpha,
        "m": args.m,
        "q": args.q,
        "max_depth": args.max_depth,
        "seed_master": args.seed,
        "ranges": [_parse_range(r) for r in (args.range or [])],
        "auto_k_max": args.auto_k_max,
        "drop_ratio": args.drop_ratio,
        "nmf_max_iters": args.max_iters,
        "nmf_rel_tol": args.rel_tol,
        "keywords": args.keywords,
        "wmd_top": args.wmd_top,
    }


def _pipeline_config(flags: dict) -> TokenPipelineConfig:
    return TokenPipelineConfig(
        stopwords=load_stopwords(flags.get("stopwords")),
        drop_list=tuple(flags.get("drop_list", DEFAULT_DROP_LIST)),
        normalizer=flags.get("normalizer", "porter"),
        min_token_len=int(flags.get("min_token_len", 2)),
        lowercase=True,
        include_title=bool(flags.get("include_title", True)),
    )


def _pipeline_echo(flags: dict) -> dict:
    keys = ("language", "stopwords", "drop_list", "normalizer",
            "min_token_len", "include_title", "min_df", "max_df_ratio")
    return {k: flags[k] for k in keys}


def _vectorize(corpus_path: Path, flags: dict):
    filt = IngestFilter(language=flags.get("language", "en"))
    docs = ingest(corpus_path, filt)
    if not docs:
        raise InputError(f"{corpus_path}: no documents passed the ingestion filter")
    cfg = _pipeline_config(flags)
    tokens = [(d.id, tokenize(d, cfg)) for d in docs]
    vocab = build_vocabulary(
        (t for _, t in tokens),
        min_df=int(flags.get("min_df", DEFAULT_MIN_DF)),
        max_df_ratio=float(flags.get("max_df_ratio", DEFAULT_MAX_DF_RATIO)),
    )
    return docs, tokens, build_tfidf(tokens, vocab)


def cmd_ingest(args: argparse.Namespace) -> int:
    docs = ingest(args.corpus, IngestFilter(language=args.language))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for d in docs:
                fh.write(json.dumps({
                    "id": d.id, "title": d.title, "abstract": d.abstract,
                    "body": d.body, "source": d.source, "language": d.language,
                }, ensure_ascii=False) + "\n")
    print(f"{len(docs)} document(s) passed the filter from {args.corpus}")
    return 0


def cmd_build(args: argparse.Namespace) -> int:
    if args.manifest:
        manifest = load_manifest(args.manifest)
        flags = manifest["flags"]
        corpus_path = Path(args.corpus or manifest["input"]["corpus"])
        if corpus_path.exists() and sha256_file(corpus_path) != manifest["input"]["sha256"]:
            raise InputError(f"{corpus_path}: contents differ from the manifest's corpus")
    else:
        if not args.corpus:
            raise InputError("a corpus file (or --manifest) is required")
        flags = _flags_from_args(args)
        corpus_path = Path(args.corpus)
    if not corpus_path.exists():
        raise InputError(f"corpus file not found: {corpus_path}")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    docs, tokens, cm = _vectorize(corpus_path, flags)
    timings["vectorize_s"] = time.perf_counter() - t0
    log.info("corpus: %d docs, %d terms (%d excluded)", cm.n, cm.d, len(cm.excluded))

    hcfg = HnmfConfig(
        alpha=float(flags["alpha"]),
        m=int(flags["m"]),
        q=int(flags["q"]),
        max_depth=int(flags["max_depth"]),
        seed_master=int(flags["seed_master"]),
        ranges=tuple(tuple(r) for r in flags.get("ranges", [])),
        auto_k_max=int(flags.get("auto_k_max", 20)),
        drop_ratio=float(flags.get("drop_ratio", 0.9)),
        nmf_max_iters=int(flags.get("nmf_max_iters", 400)),
        nmf_rel_tol=float(flags.get("nmf_rel_tol", 1e-5)),
        keywords=int(flags.get("keywords", 10)),
    )
    t0 = time.perf_counter()
    tree = build_tree(cm, hcfg)
    timings["build_tree_s"] = time.perf_counter() - t0

    write_variance_csv(out_dir / "variance.csv", tree.variance_series)
    write_lss_csv(out_dir / "lss.csv", tree.lss_distributions[""])
    export = build_export(tree, cm, {d.id: d for d in docs},
                          pipeline_echo=_pipeline_echo(flags))
    write_export(export, out_dir / "tree.json")
    wordsets = build_wordsets(tree, top=int(flags.get("wmd_top", DEFAULT_WMD_TOP)))
    (out_dir / "wordsets.json").write_text(
        json.dumps(wordsets, sort_keys=True) + "\n", "utf-8")
    manifest = build_manifest(corpus_path, flags, tree, timings)
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", "utf-8")

    n_nodes = sum(1 for _ in iter_nodes(export))
    print(f"built topic tree: {len(export['nodes'])} layer-1 topics, "
          f"{n_nodes} nodes over {cm.n} documents -> {out_dir}")
    for w in tree.warnings:
        print(f"warning: {w}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    export = load_export(out_dir / "tree.json")
    wordsets = load_wordsets(out_dir / "wordsets.json")
    pipeline = dict(export["config"].get("pipeline", {}))

    docs = ingest(args.corpus, IngestFilter(language=pipeline.get("language", "en")))
    cfg = _pipeline_config(pipeline)
    token_sets = {d.id: frozenset(tokenize(d, cfg)) for d in docs}

    emb = load_embeddings(args.embeddings)

    coverage = {
        path: embedding_coverage([w for w, _ in pairs], emb)
        for path, pairs in wordsets["topics"].items()
    }
    worst = sorted(coverage.items(), key=lambda kv: kv[1])
    if worst and worst[0][1] < args.coverage_floor:
        offenders = ", ".join(f"{p} ({c:.0%})" for p, c in worst[:5] if c < args.coverage_floor)
        raise InputError(
            f"embedding coverage below {args.coverage_floor:.0%} for: {offenders}"
        )

    scored = 0
    for node in iter_nodes(export):
        words = [t for t, _ in node["keywords_top10"][: args.coherence_top]]
        if args.coherence_scope == "corpus":
            topic_docs = list(token_sets.values())
        else:
            topic_docs = [token_sets[a["id"]] for a in node["articles"]
                          if a["id"] in token_sets]
        try:
            node["coherence"] = coherence(topic_docs, words)
            scored += 1
        except NumericError as exc:
            log.warning("node %s left unscored: %s", node["path"], exc)
            node["coherence"] = None

    sets = [
        TopicWordSet(
            path=path,
            words=tuple(w for w, _ in pairs),
            weights=tuple(float(wt) for _, wt in pairs),
        )
        for path, pairs in sorted(
            wordsets["topics"].items(),
            key=lambda kv: (kv[0].count("-"), path_key(kv[0])),
        )
    ]
    hm = heatmap_from_word_sets(sets, emb, use_weights=args.use_weights)
    write_heatmap_csv(out_dir / "heatmap.csv", hm)
    write_export(export, out_dir / "tree.json")
    print(f"scored {scored} node(s); heatmap over {len(hm.paths)} topics -> {out_dir}")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    site = Path(args.site_dir)
    site.mkdir(parents=True, exist_ok=True)
    export = load_export(out_dir / "tree.json")
    (site / "tree.json").write_bytes(dumps_export(export))
    payload = heatmap_payload(out_dir)
    if payload is not None:
        (site / "heatmap.json").write_text(
            json.dumps(payload, sort_keys=True) + "\n", "utf-8")
    if args.ui:
        ui = Path(args.ui)
        if not ui.is_dir():
            raise InputError(f"UI asset directory not found: {ui}")
        for item in ui.iterdir():
            if item.is_file():
                shutil.copy2(item, site / item.name)
    print(f"static site assembled in {site}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    server = make_server(args.dir, args.port, ui_dir=args.ui)
    host, port = server.server_address[:2]
    print(f"serving {args.dir} on http://{host}:{port}/ (ctrl-c to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topictree",
        description="Organize a document corpus into a hierarchical topic tree.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ing = sub.add_parser("ingest", help="validate and filter a corpus file")
    p_ing.add_argument("corpus")
    p_ing.add_argument("--language", default="en")
    p_ing.add_argument("--out", help="write the filtered records here")
    p_ing.set_defaults(func=cmd_ingest)

    p_build = sub.add_parser("build", help="build the topic tree")
    p_build.add_argument("corpus", nargs="?")
    p_build.add_argument("--out-dir", required=True)
    p_build.add_argument("--manifest", help="replay a previous run's manifest")
    p_build.add_argument("--language", default="en")
    p_build.add_argument("--stopwords", help="stopword file (default: bundled English list)")
    p_build.add_argument("--drop-list", help="comma-separated irrelevant words/phrases")
    p_build.add_argument("--normalizer", default="porter", choices=["porter", "identity"])
    p_build.add_argument("--min-token-len", type=int, default=2)
    p_build.add_argument("--no-title", action="store_true",
                         help="exclude titles from the token stream")
    p_build.add_argument("--min-df", type=int, default=DEFAULT_MIN_DF)
    p_build.add_argument("--max-df-ratio", type=float, default=DEFAULT_MAX_DF_RATIO)
    p_build.add_argument("--alpha", type=float, default=0.05)
    p_build.add_argument("--m", type=int, default=1400)
    p_build.add_argument("--q", type=int, default=30)
    p_build.add_argument("--max-depth", type=int, default=5)
    p_build.add_argument("--seed", type=int, default=0)
    p_build.add_argument("--range", action="append", metavar="K1:K2",
                         help="fixed candidate range; repeat for deeper layers")
    p_build.add_argument("--auto-k-max", type=int, default=20)
    p_build.add_argument("--drop-ratio", type=float, default=0.9)
    p_build.add_argument("--max-iters", type=int, default=400)
    p_build.add_argument("--rel-tol", type=float, default=1e-5)
    p_build.add_argument("--keywords", type=int, default=10)
    p_build.add_argument("--wmd-top", type=int, default=DEFAULT_WMD_TOP)
    p_build.set_defaults(func=cmd_build)

    p_eval = sub.add_parser("eval", help="score a finished tree")
    p_eval.add_argument("--out-dir", required=True)
    p_eval.add_argument("--corpus", required=True)
    p_eval.add_argument("--embeddings", required=True)
    p_eval.add_argument("--coverage-floor", type=float, default=0.5)
    p_eval.add_argument("--coherence-top", type=int, default=DEFAULT_COHERENCE_TOP)
    p_eval.add_argument("--coherence-scope", choices=["topic", "corpus"], default="topic")
    p_eval.add_argument("--use-weights", action="store_true",
                        help="weight word mass by topic weights instead of uniformly")
    p_eval.set_defaults(func=cmd_eval)

    p_exp = sub.add_parser("export", help="assemble a static site directory")
    p_exp.add_argument("--out-dir", required=True)
    p_exp.add_argument("--site-dir", required=True)
    p_exp.add_argument("--ui", help="directory of built UI assets to copy")
    p_exp.set_defaults(func=cmd_export)

    p_srv = sub.add_parser("serve", help="serve an export read-only over HTTP")
    p_srv.add_argument("--dir", required=True)
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--ui", help="directory of built UI assets")
    p_srv.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
