"""Canonical JSON export of a topic tree, plus the run manifest.

The export is the single source of truth for the browsing UI and for
golden-file tests: identical runs must produce byte-identical files, so
dumps are sorted-key JSON with a trailing newline and no volatile fields.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterator, Mapping

from .corpus import CorpusMatrix, Document
from .errors import InputError, SchemaError
from .hnmf import TopicNode, TopicTree

SCHEMA_VERSION = 1

_NODE_KEYS = {
    "path", "keywords_top5", "keywords_top10", "doc_count", "coherence",
    "k_star", "flags", "articles", "children",
}


def _node_record(nd: TopicNode, docs_by_id: Mapping[str, Document],
                 order: Mapping[str, int]) -> dict:
    articles = []
    for doc_id in sorted(nd.doc_ids, key=lambda i: (order.get(i, -1), i)):
        doc = docs_by_id.get(doc_id)
        articles.append({
            "id": doc_id,
            "title": doc.title if doc else "",
            "source": doc.source if doc else "",
        })
    return {
        "path": nd.path,
        "keywords_top5": [[t, w] for t, w in nd.keywords[:5]],
        "keywords_top10": [[t, w] for t, w in nd.keywords[:10]],
        "doc_count": len(nd.doc_ids),
        "coherence": nd.coherence,
        "k_star": nd.k_star,
        "flags": sorted(nd.flags),
        "articles": articles,
        "children": [_node_record(c, docs_by_id, order) for c in nd.children],
    }


def build_export(
    tree: TopicTree,
    corpus: CorpusMatrix,
    docs_by_id: Mapping[str, Document] | None = None,
    pipeline_echo: Mapping | None = None,
) -> dict:
    docs_by_id = docs_by_id or {}
    cfg = tree.config
    return {
        "schema_version": SCHEMA_VERSION,
        "corpus": {
            "n": corpus.n,
            "d": corpus.d,
            "excluded": sorted(corpus.excluded),
        },
        "config": {
            "alpha": cfg.alpha,
            "m": cfg.m,
            "q": cfg.q,
            "max_depth": cfg.max_depth,
            "seed_master": cfg.seed_master,
            "ranges": [list(r) for r in cfg.ranges],
            "auto_k_max": cfg.auto_k_max,
            "drop_ratio": cfg.drop_ratio,
            "nmf_max_iters": cfg.nmf_max_iters,
            "nmf_rel_tol": cfg.nmf_rel_tol,
            "keywords": cfg.keywords,
            "pipeline": dict(pipeline_echo or {}),
        },
        "per_layer_k": {
            str(depth): dict(sorted(paths.items()))
            for depth, paths in tree.per_layer_k().items()
        },
        "warnings": list(tree.warnings),
        "nodes": [_node_record(r, docs_by_id, corpus.col_of) for r in tree.roots],
    }


def dumps_export(export: Mapping) -> bytes:
    return (json.dumps(export, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def write_export(export: Mapping, path: str | Path) -> None:
    Path(path).write_bytes(dumps_export(export))


def _check_node(node, where: str) -> None:
    if not isinstance(node, dict):
        raise SchemaError(f"{where}: node is not an object")
    missing = _NODE_KEYS - set(node)
    if missing:
        raise SchemaError(f"{where}: node missing keys {sorted(missing)}")
    if node["doc_count"] != len(node["articles"]):
        raise SchemaError(
            f"{where}: doc_count {node['doc_count']} != {len(node['articles'])} articles"
        )
    for kw_key in ("keywords_top5", "keywords_top10"):
        weights = [w for _, w in node[kw_key]]
        if any(a < b for a, b in zip(weights, weights[1:])):
            raise SchemaError(f"{where}: {kw_key} not descending")
    for child in node["children"]:
        _check_node(child, f"{where}/{child.get('path', '?')}")


def validate_export(obj) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError("export is not an object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    for key in ("corpus", "config", "nodes"):
        if key not in obj:
            raise SchemaError(f"export missing {key!r}")
    for node in obj["nodes"]:
        _check_node(node, node.get("path", "?"))
    return obj


def load_export(path: str | Path) -> dict:
    try:
        raw = Path(path).read_text("utf-8")
    except OSError as exc:
        raise InputError(f"cannot read tree export {path}: {exc}") from exc
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc.msg}") from exc
    return validate_export(obj)


def iter_nodes(export: Mapping) -> Iterator[dict]:
    stack = list(export["nodes"])
    while stack:
        node = stack.pop(0)
        yield node
        stack.extend(node["children"])


def memberships(export: Mapping) -> dict[str, list[str]]:
    """path -> ordered article ids, for round-trip checks."""
    return {nd["path"]: [a["id"] for a in nd["articles"]] for nd in iter_nodes(export)}


def keyword_map(export: Mapping) -> dict[str, list[tuple[str, float]]]:
    return {
        nd["path"]: [(t, float(w)) for t, w in nd["keywords_top10"]]
        for nd in iter_nodes(export)
    }


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(
    corpus_path: str | Path,
    flags: Mapping,
    tree: TopicTree,
    timings: Mapping[str, float],
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "input": {
            "corpus": str(corpus_path),
            "sha256": sha256_file(corpus_path),
        },
        "flags": dict(flags),
        "per_layer_k": {
            str(depth): dict(sorted(paths.items()))
            for depth, paths in tree.per_layer_k().items()
        },
        "warnings": list(tree.warnings),
        "timings": {k: round(v, 3) for k, v in timings.items()},
    }


def load_manifest(path: str | Path) -> dict:
    try:
        obj = json.loads(Path(path).read_text("utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc.msg}") from exc
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"{path}: unsupported manifest schema_version")
    if "flags" not in obj or "input" not in obj:
        raise SchemaError(f"{path}: manifest missing flags or input")
    return obj


def build_wordsets(tree: TopicTree, top: int = 100) -> dict:
    """Per-node top words used for transport-distance evaluation."""
    from .nmf import top_words  # local import to avoid cycle at module load

    topics = {}
    for nd in tree.nodes():
        pairs = top_words(nd.dictionary, tree.vocab, min(top, tree.vocab.size))
        topics[nd.path] = [[t, w] for t, w in pairs]
    return {"schema_version": SCHEMA_VERSION, "topics": topics}


def load_wordsets(path: str | Path) -> dict:
    try:
        obj = json.loads(Path(path).read_text("utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read word sets {path}: {exc} (run build first)") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc.msg}") from exc
    if obj.get("schema_version") != SCHEMA_VERSION or "topics" not in obj:
        raise SchemaError(f"{path}: unsupported word-set file")
    return obj
