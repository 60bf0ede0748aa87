"""Shared fixtures: fixture corpus paths and a local upstream HTTP server."""

from __future__ import annotations

import gzip
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from jsrehab import _brotli

FIXTURES = Path(__file__).parent / "fixtures"
KINDS = FIXTURES / "kinds"
CORPUS = FIXTURES / "corpus"

# kind fixture -> expected detected kind value; the unsupported two excluded
SUPPORTED_FIXTURES = {
    "accordion_bs4.html": "accordion",
    "accordion_bs5.html": "accordion",
    "affix_bs3.html": "affix",
    "alert_bs4.html": "alert",
    "alert_bs5.html": "alert",
    "carousel_bs4.html": "carousel",
    "carousel_bs5.html": "carousel",
    "collapse_bs4.html": "collapse",
    "collapse_bs5.html": "collapse",
    "dropdown_bs4.html": "dropdown",
    "dropdown_bs5.html": "dropdown",
    "listing1.html": "dropdown",
    "modal_bs4.html": "modal",
    "modal_bs5.html": "modal",
    "offcanvas_bs5.html": "offcanvas",
    "popover_bs4.html": "popover",
    "popover_bs5.html": "popover",
    "tabs_bs4.html": "navs-tabs",
    "tabs_bs5.html": "navs-tabs",
    "toast_bs4.html": "toast",
    "toast_bs5.html": "toast",
    "tooltip_bs4.html": "tooltip",
    "tooltip_bs5.html": "tooltip",
}
UNSUPPORTED_FIXTURES = {
    "scrollspy_bs5.html": ("scrollspy", "no access to viewport in CSS"),
    "typeahead_bs2.html": ("typeahead", "cannot replicate autocompletion"),
}


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def kind_paths() -> dict[str, Path]:
    return {p.name: p for p in sorted(KINDS.glob("*.html"))}


@pytest.fixture(scope="session")
def corpus_paths() -> list[Path]:
    return sorted(CORPUS.glob("*.html"))


@pytest.fixture(scope="session")
def realistic_page() -> bytes:
    return (FIXTURES / "realistic.html").read_bytes()


def all_fixture_paths() -> list[Path]:
    """Every page that participates in whole-corpus properties."""
    paths = [p for p in sorted(KINDS.glob("*.html")) if p.name != "broken_check.html"]
    paths.extend(sorted(CORPUS.glob("*.html")))
    paths.append(FIXTURES / "realistic.html")
    return paths


class _UpstreamHandler(BaseHTTPRequestHandler):
    routes: dict[str, tuple[int, str, str, bytes]] = {}

    def log_message(self, *args) -> None:
        pass

    def do_GET(self) -> None:
        entry = self.routes.get(self.path)
        if entry is None:
            body = b"not found"
            self.send_response(404)
            self.send_header("Content-Type", "text/plain")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return
        status, content_type, encoding, body = entry
        payload = body
        if encoding == "gzip":
            payload = gzip.compress(body)
        elif encoding == "br":
            payload = _brotli.compress(body, 5)
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        if encoding != "identity":
            self.send_header("Content-Encoding", encoding)
        self.send_header("Content-Length", str(len(payload)))
        self.send_header("ETag", '"fixture-etag"')
        self.send_header("Last-Modified", "Mon, 01 Jan 2024 00:00:00 GMT")
        self.end_headers()
        self.wfile.write(payload)


class LocalUpstream:
    """In-process HTTP origin with per-path bodies and encodings."""

    def __init__(self) -> None:
        handler = type("Handler", (_UpstreamHandler,), {"routes": {}})
        self.handler = handler
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    def add(self, path: str, body: bytes, content_type: str = "text/html; charset=utf-8",
            encoding: str = "identity", status: int = 200) -> str:
        self.handler.routes[path] = (status, content_type, encoding, body)
        return self.url(path)

    def url(self, path: str) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}{path}"

    def close(self) -> None:
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def upstream():
    server = LocalUpstream()
    yield server
    server.close()
