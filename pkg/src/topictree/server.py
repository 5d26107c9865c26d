"""Read-only HTTP endpoint over a finished export directory.

Serves the tree export, single-node lookups with children stubs, the
heatmap, and optionally the static browsing UI. All responses are
precomputed at startup from the export files, so concurrent reads are
safe and repeated requests return identical bytes.
"""

from __future__ import annotations

import json
import logging
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import InputError
from .evaluate import read_heatmap_csv
from .serialize import dumps_export, iter_nodes, load_export

log = logging.getLogger(__name__)

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}

_JSON = "application/json; charset=utf-8"


def heatmap_payload(out_dir: Path) -> dict | None:
    csv_path = out_dir / "heatmap.csv"
    if not csv_path.exists():
        return None
    hm = read_heatmap_csv(csv_path)
    return {
        "paths": list(hm.paths),
        "distances": [[float(x) for x in row] for row in hm.distances],
        "similarities": [[float(x) for x in row] for row in hm.similarities()],
        "d_min": hm.d_min,
        "d_max": hm.d_max,
        "transform": hm.transform,
    }


class ExportState:
    """Immutable in-memory view of one export directory."""

    def __init__(self, out_dir: str | Path, ui_dir: str | Path | None = None):
        out_dir = Path(out_dir)
        tree_path = out_dir / "tree.json"
        if not tree_path.exists():
            raise InputError(f"no tree export at {tree_path}")
        export = load_export(tree_path)
        self.tree_bytes = dumps_export(export)
        self.node_bytes: dict[str, bytes] = {}
        for node in iter_nodes(export):
            record = dict(node)
            record["children"] = [
                {
                    "path": c["path"],
                    "doc_count": c["doc_count"],
                    "keywords_top5": c["keywords_top5"],
                    "has_children": bool(c["children"]),
                }
                for c in node["children"]
            ]
            self.node_bytes[node["path"]] = (
                json.dumps(record, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
            ).encode("utf-8")
        payload = heatmap_payload(out_dir)
        self.heatmap_bytes = (
            None
            if payload is None
            else (json.dumps(payload, sort_keys=True) + "\n").encode("utf-8")
        )
        self.ui_dir = Path(ui_dir).resolve() if ui_dir else None


class ExportHandler(BaseHTTPRequestHandler):
    state: ExportState  # bound by make_server

    def _send(self, code: int, body: bytes, ctype: str = _JSON) -> None:
        self.send_response(code)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _error(self, code: int, message: str) -> None:
        body = (json.dumps({"error": message, "path": self.path}) + "\n").encode("utf-8")
        self._send(code, body)

    def do_GET(self) -> None:  # noqa: N802 (http.server API)
        path = self.path.split("?", 1)[0]
        if path == "/api/tree":
            self._send(200, self.state.tree_bytes)
        elif path.startswith("/api/node/"):
            node_path = path[len("/api/node/"):]
            body = self.state.node_bytes.get(node_path)
            if body is None:
                self._error(404, f"unknown node {node_path!r}")
            else:
                self._send(200, body)
        elif path == "/api/heatmap":
            if self.state.heatmap_bytes is None:
                self._error(404, "no heatmap in this export (run eval)")
            else:
                self._send(200, self.state.heatmap_bytes)
        else:
            self._static(path)

    def _static(self, path: str) -> None:
        if self.state.ui_dir is None:
            self._error(404, "no UI assets configured")
            return
        rel = path.lstrip("/") or "index.html"
        target = (self.state.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.state.ui_dir)) or not target.is_file():
            self._error(404, "not found")
            return
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send(200, target.read_bytes(), ctype)

    def log_message(self, fmt: str, *args) -> None:
        log.debug("%s - %s", self.address_string(), fmt % args)


def make_server(
    out_dir: str | Path,
    port: int,
    ui_dir: str | Path | None = None,
    host: str = "127.0.0.1",
) -> ThreadingHTTPServer:
    state = ExportState(out_dir, ui_dir)
    handler = type("BoundHandler", (ExportHandler,), {"state": state})
    try:
        return ThreadingHTTPServer((host, port), handler)
    except OSError as exc:
        raise InputError(f"cannot bind {host}:{port}: {exc}") from exc
