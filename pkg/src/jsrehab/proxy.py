"""HTTP rewriting proxy.

Fetches upstream, transforms HTML response bodies on the fly, re-encodes with
the same compression algorithm the site used (gzip or brotli), and appends one
JSONL statistics record per HTML response. Non-HTML bodies pass through
bit-identical. Responses are fully buffered before rewriting: the transform
needs whole-tree traversals, so streaming rewrite is out of scope.

Two modes: a classic forward proxy (absolute-URI requests, opaque CONNECT
tunneling for TLS) and a reverse mode that maps ``/fetch?url=...`` (or every
path, when an upstream base is configured) onto upstream requests.

Experiment knobs: URL-substring script blocking (matching requests answered
with an empty 200 instead of the script), cache disabling (``Cache-Control:
no-store`` plus validator stripping), and an HTML ``Refresh: <n>`` header for
forced periodic reloads.
"""

from __future__ import annotations

import gzip
import json
import select as socket_select
import socket
import threading
import time
from dataclasses import dataclass, field, replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlsplit

import requests

from . import _brotli
from .rewrite import RewriteConfig, rewrite_document

FIREFOX_USER_AGENT = ("Mozilla/5.0 (X11; Linux x86_64; rv:93.0) "
                      "Gecko/20100101 Firefox/93.0")

VIA_HEADER = "jsrehab"

# end-to-end headers only; hop-by-hop never crosses the proxy
_HOP_BY_HOP = frozenset({
    "connection", "keep-alive", "proxy-authenticate", "proxy-authorization",
    "te", "trailer", "transfer-encoding", "upgrade",
    "content-length", "content-encoding",
})
_VALIDATOR_HEADERS = frozenset({"etag", "last-modified"})
_CACHING_HEADERS = frozenset({"etag", "last-modified", "expires", "age", "cache-control"})


@dataclass
class ProxyConfig:
    listen: tuple[str, int] = ("127.0.0.1", 8080)
    mode: str = "reverse"                     # "reverse" | "forward"
    upstream: Optional[str] = None            # reverse mode: base URL for path mapping
    user_agent: str = FIREFOX_USER_AGENT
    rewrite: RewriteConfig = field(default_factory=lambda: RewriteConfig(
        compression_for_stats="auto"))
    block_scripts: list[str] = field(default_factory=list)
    inject_refresh_seconds: Optional[int] = None
    disable_caching: bool = False
    stats_sink: Optional[str] = None
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.mode not in ("reverse", "forward"):
            raise ValueError(f"mode must be reverse|forward, got {self.mode!r}")
        if self.inject_refresh_seconds is not None and not self.disable_caching:
            raise ValueError("refresh injection requires caching to be disabled, "
                             "otherwise reloads are served from cache")


@dataclass
class ProxyResponse:
    status: int
    headers: list[tuple[str, str]]
    body: bytes
    url: str = ""

    def header(self, name: str) -> Optional[str]:
        lowered = name.lower()
        for header_name, value in self.headers:
            if header_name.lower() == lowered:
                return value
        return None


class StatsSink:
    """Append-only JSONL sink; per-line flush under a lock so concurrent
    requests never interleave partial lines."""

    def __init__(self, path: Optional[str]) -> None:
        self.path = path
        self._lock = threading.Lock()
        self.records: list[dict] = []

    def append(self, record: dict) -> None:
        line = json.dumps(record, separators=(",", ":"))
        with self._lock:
            self.records.append(record)
            if self.path:
                with open(self.path, "a", encoding="utf-8") as handle:
                    handle.write(line + "\n")
                    handle.flush()


def make_record(url: str, status: int, content_type: str, compression: str,
                orig_c: int, xform_c: int, duration_ms: float,
                kinds: dict[str, int], bs_major: Optional[int],
                warnings: int, error: Optional[str] = None) -> dict:
    record = {
        "url": url,
        "ts": time.time(),
        "status": status,
        "content_type": content_type,
        "compression": compression,
        "orig_c": orig_c,
        "xform_c": xform_c,
        "duration_ms": duration_ms,
        "kinds": kinds,
        "bs_major": bs_major,
        "warnings": warnings,
    }
    if error:
        record["error"] = error
    return record


def _is_html(content_type: str) -> bool:
    return "text/html" in content_type or "application/xhtml" in content_type


def _decode_body(body: bytes, encoding: str) -> bytes:
    if encoding in ("", "identity"):
        return body
    if encoding in ("gzip", "x-gzip"):
        return gzip.decompress(body)
    if encoding == "br":
        return _brotli.decompress(body)
    raise ValueError(f"unsupported content-encoding {encoding!r}")


def _encode_body(body: bytes, encoding: str, config: RewriteConfig) -> bytes:
    if encoding in ("", "identity"):
        return body
    if encoding in ("gzip", "x-gzip"):
        return gzip.compress(body, compresslevel=config.gzip_level, mtime=0)
    if encoding == "br":
        return _brotli.compress(body, config.brotli_quality)
    raise ValueError(f"unsupported content-encoding {encoding!r}")


def transform_response(response: ProxyResponse, config: ProxyConfig,
                       sink: Optional[StatsSink] = None) -> ProxyResponse:
    """Rewrite an HTML response body, preserving its compression algorithm.

    Decode failures and unknown encodings pass the body through unmodified
    and leave a diagnostic record.
    """
    content_type = response.header("Content-Type") or ""
    content_encoding = (response.header("Content-Encoding") or "identity").strip().lower()
    headers = [(n, v) for n, v in response.headers if n.lower() not in _HOP_BY_HOP]

    is_html = _is_html(content_type)
    body = response.body
    rewritten = False

    if is_html:
        try:
            decoded = _decode_body(body, content_encoding)
        except (ValueError, OSError, _brotli.BrotliUnavailable) as exc:
            if sink is not None:
                sink.append(make_record(
                    response.url, response.status, content_type,
                    content_encoding, len(body), len(body), 0.0, {}, None, 0,
                    error=f"undecodable body: {exc}"))
            decoded = None
        if decoded is not None:
            rewrite_config = config.rewrite
            if rewrite_config.compression_for_stats == "auto":
                algorithm = "brotli" if content_encoding == "br" else "gzip"
                rewrite_config = replace(rewrite_config, compression_for_stats=algorithm)
            charset = None
            if "charset=" in content_type:
                charset = content_type.split("charset=", 1)[1].split(";")[0].strip()
            result = rewrite_document(decoded, rewrite_config, encoding=charset)
            body = _encode_body(result.html, content_encoding, rewrite_config)
            rewritten = True
            if content_encoding in ("", "identity"):
                orig_c = result.stats.original_compressed
                xform_c = result.stats.transformed_compressed
                compression = "identity"
            else:
                orig_c = len(response.body)
                xform_c = len(body)
                compression = "brotli" if content_encoding == "br" else "gzip"
            if sink is not None:
                sink.append(make_record(
                    response.url, response.status, content_type, compression,
                    orig_c, xform_c, result.stats.duration_ms,
                    result.stats.instances_by_kind, result.stats.bootstrap_major,
                    len(result.warnings)))

    if rewritten:
        headers = [(n, v) for n, v in headers if n.lower() not in _VALIDATOR_HEADERS]
    if config.disable_caching:
        headers = [(n, v) for n, v in headers if n.lower() not in _CACHING_HEADERS]
        headers.append(("Cache-Control", "no-store"))
    if config.inject_refresh_seconds is not None and is_html:
        headers.append(("Refresh", str(config.inject_refresh_seconds)))
    if content_encoding not in ("", "identity"):
        headers.append(("Content-Encoding", content_encoding))
    headers.append(("Content-Length", str(len(body))))
    headers.append(("Via", VIA_HEADER))
    return ProxyResponse(response.status, headers, body, url=response.url)


def fetch_upstream(url: str, config: ProxyConfig,
                   request_headers: Optional[dict[str, str]] = None) -> ProxyResponse:
    """GET an upstream URL keeping the body compressed as transferred."""
    headers = {
        "User-Agent": config.user_agent,
        "Accept-Encoding": "gzip, br",
        "Accept": "*/*",
    }
    if request_headers:
        for name, value in request_headers.items():
            if name.lower() in ("user-agent", "accept-encoding",
                                "host", "connection", "proxy-connection"):
                continue
            headers[name] = value
    resp = requests.get(url, headers=headers, timeout=config.timeout,
                        stream=True, allow_redirects=True)
    raw = resp.raw.read(decode_content=False)
    out_headers = [(name, value) for name, value in resp.headers.items()]
    return ProxyResponse(resp.status_code, out_headers, raw, url=str(resp.url))


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "jsrehab-proxy"
    config: ProxyConfig
    sink: StatsSink

    def log_message(self, format: str, *args) -> None:  # quiet by default
        pass

    # -- request routing -----------------------------------------------------

    def _resolve_url(self) -> Optional[str]:
        if self.config.mode == "forward":
            if self.path.startswith("http://") or self.path.startswith("https://"):
                return self.path
            return None
        split = urlsplit(self.path)
        if split.path == "/fetch":
            params = parse_qs(split.query)
            urls = params.get("url")
            return urls[0] if urls else None
        if self.config.upstream:
            return self.config.upstream.rstrip("/") + self.path
        return None

    def do_GET(self) -> None:
        self._handle()

    def do_HEAD(self) -> None:
        self._handle(head=True)

    def do_CONNECT(self) -> None:
        # opaque TLS tunnel: no interception, no certificate minting
        host, _, port = self.path.partition(":")
        try:
            upstream = socket.create_connection((host, int(port or 443)),
                                                timeout=self.config.timeout)
        except OSError as exc:
            self.send_error(502, f"tunnel failed: {exc}")
            return
        self.send_response(200, "Connection Established")
        self.end_headers()
        _pump_sockets(self.connection, upstream)

    def _handle(self, head: bool = False) -> None:
        url = self._resolve_url()
        if url is None:
            self._respond(ProxyResponse(
                404, [("Content-Type", "text/plain; charset=utf-8")],
                b"jsrehab proxy: no upstream for this request\n"), head)
            return
        if any(pattern in url for pattern in self.config.block_scripts):
            blocked = ProxyResponse(
                200, [("Content-Type", "application/javascript")], b"", url=url)
            self._respond(transform_response(blocked, self.config, None), head)
            return
        try:
            upstream = fetch_upstream(url, self.config, dict(self.headers.items()))
        except requests.RequestException as exc:
            self._respond(ProxyResponse(
                502, [("Content-Type", "text/plain; charset=utf-8")],
                f"upstream fetch failed: {exc}\n".encode(), url=url), head)
            return
        self._respond(transform_response(upstream, self.config, self.sink), head)

    def _respond(self, response: ProxyResponse, head: bool = False) -> None:
        try:
            self.send_response(response.status)
            sent = set()
            for name, value in response.headers:
                self.send_header(name, value)
                sent.add(name.lower())
            if "content-length" not in sent:
                self.send_header("Content-Length", str(len(response.body)))
            self.end_headers()
            if not head:
                self.wfile.write(response.body)
        except (BrokenPipeError, ConnectionResetError):
            pass


def _pump_sockets(client: socket.socket, upstream: socket.socket) -> None:
    sockets = [client, upstream]
    try:
        while True:
            readable, _, errored = socket_select.select(sockets, [], sockets, 60)
            if errored or not readable:
                break
            for sock in readable:
                data = sock.recv(65536)
                if not data:
                    return
                (upstream if sock is client else client).sendall(data)
    except OSError:
        pass
    finally:
        for sock in (client, upstream):
            try:
                sock.close()
            except OSError:
                pass


class ProxyServer:
    """Owns the HTTP server; usable programmatically and from the CLI."""

    def __init__(self, config: ProxyConfig) -> None:
        self.config = config
        self.sink = StatsSink(config.stats_sink)
        handler = type("BoundHandler", (_Handler,),
                       {"config": config, "sink": self.sink})
        self.httpd = ThreadingHTTPServer(config.listen, handler)
        self.httpd.daemon_threads = True

    @property
    def address(self) -> tuple[str, int]:
        host, port = self.httpd.server_address[:2]
        return (str(host), int(port))

    def serve_forever(self) -> None:
        self.httpd.serve_forever()

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        thread.start()
        return thread

    def shutdown(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()


def serve(config: ProxyConfig) -> None:
    """Run the proxy until interrupted (bind errors are fatal)."""
    server = ProxyServer(config)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
