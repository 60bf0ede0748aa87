"""Crawl-and-measure mechanics over a ranked domain list.

Reads ``rank,domain`` lines, fetches each landing page (https first, http
fallback), samples up to three same-origin internal links with a seeded RNG,
rewrites every HTML page fetched, and appends one JSONL record per page.
Failures never abort a run; they become records with status 0 and an error
note. The summary reports min/q1/median/q3/max per metric using
linear-interpolation quantiles.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional
from urllib.parse import urljoin, urlsplit

import requests

from .detect import ComponentKind
from .dom import Document, parse_html
from .proxy import FIREFOX_USER_AGENT, make_record
from .rewrite import RewriteConfig, rewrite_document

logger = logging.getLogger(__name__)


@dataclass
class FetchSettings:
    user_agent: str = FIREFOX_USER_AGENT
    timeout: float = 30.0
    max_body_bytes: int = 8 * 1024 * 1024
    max_redirects: int = 5
    parallelism: int = 4
    internal_urls: int = 3
    seed: int = 0
    rewrite: RewriteConfig = field(default_factory=RewriteConfig)


def load_ranked_list(data: bytes) -> list[tuple[int, str]]:
    """Parse ``rank,domain`` CSV bytes; malformed lines are skipped loudly."""
    out: list[tuple[int, str]] = []
    text = data.decode("utf-8", errors="replace")
    for line_number, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) < 2:
            logger.warning("ranked list line %d malformed: %r", line_number, row)
            continue
        try:
            rank = int(row[0].strip())
        except ValueError:
            logger.warning("ranked list line %d has non-integer rank: %r",
                           line_number, row[0])
            continue
        domain = row[1].strip()
        if not domain:
            logger.warning("ranked list line %d has empty domain", line_number)
            continue
        out.append((rank, domain))
    out.sort(key=lambda pair: pair[0])
    return out


def pick_internal_urls(landing: Document, base_url: str, n: int = 3,
                       seed: int = 0) -> list[str]:
    """Uniform sample (without replacement) of same-origin, different-path
    anchor targets on the landing page."""
    base = urlsplit(base_url)
    base_origin = (base.scheme, base.hostname, base.port)
    candidates: list[str] = []
    seen: set[str] = set()
    for el in landing.iter_elements():
        if el.tag != "a":
            continue
        href = el.attrs.get("href", "").strip()
        if not href or href.startswith("#") or href.startswith("javascript:"):
            continue
        resolved = urljoin(base_url, href)
        split = urlsplit(resolved)
        if split.scheme not in ("http", "https"):
            continue
        if (split.scheme, split.hostname, split.port) != base_origin:
            continue
        if split.path == base.path:
            continue
        normalized = resolved.split("#", 1)[0]
        if normalized not in seen:
            seen.add(normalized)
            candidates.append(normalized)
    rng = random.Random(seed)
    count = min(n, len(candidates))
    return rng.sample(candidates, count)


@dataclass
class FetchedPage:
    url: str
    status: int
    content_type: str
    body: bytes
    error: Optional[str] = None


def _fetch(url: str, settings: FetchSettings) -> FetchedPage:
    try:
        with requests.get(url,
                          headers={"User-Agent": settings.user_agent},
                          timeout=settings.timeout, stream=True,
                          allow_redirects=True) as resp:
            chunks: list[bytes] = []
            size = 0
            for chunk in resp.iter_content(chunk_size=65536):
                chunks.append(chunk)
                size += len(chunk)
                if size > settings.max_body_bytes:
                    break
            return FetchedPage(str(resp.url), resp.status_code,
                               resp.headers.get("Content-Type", ""),
                               b"".join(chunks)[: settings.max_body_bytes])
    except requests.RequestException as exc:
        return FetchedPage(url, 0, "", b"", error=str(exc))


def _record_for_page(page: FetchedPage, settings: FetchSettings) -> dict:
    if page.error is not None:
        return make_record(page.url, 0, "", settings.rewrite.compression_for_stats,
                           0, 0, 0.0, {}, None, 0, error=page.error)
    if "text/html" not in page.content_type and "application/xhtml" not in page.content_type:
        return make_record(page.url, page.status, page.content_type,
                           settings.rewrite.compression_for_stats, 0, 0, 0.0,
                           {}, None, 0, error="not html")
    result = rewrite_document(page.body, settings.rewrite)
    return make_record(page.url, page.status, page.content_type,
                       result.stats.compression,
                       result.stats.original_compressed,
                       result.stats.transformed_compressed,
                       result.stats.duration_ms,
                       result.stats.instances_by_kind,
                       result.stats.bootstrap_major,
                       len(result.warnings))


def _run_domain(rank: int, domain: str, settings: FetchSettings) -> list[dict]:
    records: list[dict] = []
    landing: Optional[FetchedPage] = None
    for scheme in ("https", "http"):
        candidate = _fetch(f"{scheme}://{domain}/", settings)
        if candidate.error is None:
            landing = candidate
            break
        landing = candidate
    assert landing is not None
    records.append(_record_for_page(landing, settings))
    if landing.error is not None or not landing.body:
        return records
    doc = parse_html(landing.body)
    internal = pick_internal_urls(doc, landing.url, n=settings.internal_urls,
                                  seed=settings.seed ^ rank)
    for url in internal:
        records.append(_record_for_page(_fetch(url, settings), settings))
    return records


def run(entries: list[tuple[int, str]], settings: Optional[FetchSettings] = None,
        sink_path: Optional[str] = None) -> list[dict]:
    """Fetch and rewrite up to four pages per domain; per-page errors never
    abort the run. Records come back in input order regardless of worker
    scheduling."""
    if settings is None:
        settings = FetchSettings()
    results: list[list[dict]] = []
    with ThreadPoolExecutor(max_workers=max(1, settings.parallelism)) as pool:
        futures = [pool.submit(_run_domain, rank, domain, settings)
                   for rank, domain in entries]
        for future in futures:
            results.append(future.result())
    records = [record for domain_records in results for record in domain_records]
    if sink_path:
        with open(sink_path, "a", encoding="utf-8") as handle:
            for record in records:
                handle.write(json.dumps(record, separators=(",", ":")) + "\n")
    return records


# -- statistics ----------------------------------------------------------------

def quantile(values: Iterable[float], q: float) -> float:
    """Linear-interpolation quantile: index h = (n-1)q between order
    statistics."""
    data = sorted(values)
    if not data:
        raise ValueError("quantile of empty data")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    h = (len(data) - 1) * q
    low = int(h)
    high = min(low + 1, len(data) - 1)
    fraction = h - low
    return data[low] + (data[high] - data[low]) * fraction


def five_number_summary(values: list[float]) -> dict[str, float]:
    return {
        "min": quantile(values, 0.0),
        "q1": quantile(values, 0.25),
        "median": quantile(values, 0.5),
        "q3": quantile(values, 0.75),
        "max": quantile(values, 1.0),
        "count": len(values),
    }


def record_overhead(record: dict) -> Optional[float]:
    orig = record.get("orig_c", 0)
    xform = record.get("xform_c", 0)
    if record.get("status") != 200 or orig <= 0:
        return None
    return (xform - orig) / orig


def summarize(records: list[dict]) -> dict:
    """Quantile report over overhead and duration, plus kind histogram and
    framework-usage fraction; permutation-invariant over the records."""
    overheads = [o for o in (record_overhead(r) for r in records) if o is not None]
    durations = [r["duration_ms"] for r in records
                 if r.get("status") == 200 and "duration_ms" in r]
    html_pages = [r for r in records if r.get("status") == 200
                  and r.get("error") is None]

    kind_pages = {kind.value: 0 for kind in ComponentKind}
    using_bootstrap = 0
    for record in html_pages:
        kinds = record.get("kinds") or {}
        for kind, count in kinds.items():
            if count > 0 and kind in kind_pages:
                kind_pages[kind] += 1
        if kinds or record.get("bs_major") is not None:
            using_bootstrap += 1

    report: dict = {
        "count": len(records),
        "html_pages": len(html_pages),
        "metrics": {},
        "kind_histogram": {
            kind: {
                "pages": pages,
                "fraction": pages / len(html_pages) if html_pages else 0.0,
            }
            for kind, pages in kind_pages.items()
        },
        "bootstrap_usage_fraction":
            (using_bootstrap / len(html_pages)) if html_pages else 0.0,
    }
    if overheads:
        report["metrics"]["overhead"] = five_number_summary(overheads)
    if durations:
        report["metrics"]["duration_ms"] = five_number_summary(durations)
    return report


def report_csv(report: dict) -> str:
    """``metric,min,q1,median,q3,max,count`` rows for box-plot tooling."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["metric", "min", "q1", "median", "q3", "max", "count"])
    for metric, summary in report.get("metrics", {}).items():
        writer.writerow([
            metric,
            summary["min"], summary["q1"], summary["median"],
            summary["q3"], summary["max"], summary["count"],
        ])
    return out.getvalue()


def load_records(data: bytes) -> list[dict]:
    records = []
    for line in data.decode("utf-8", errors="replace").splitlines():
        line = line.strip()
        if line:
            records.append(json.loads(line))
    return records
