"""Whole-document rewrite pipeline with measurement.

parse -> detect -> scan -> plan -> apply -> inject styles -> serialize, with
wall-clock duration, node count, per-kind instance counts, and raw/compressed
sizes recorded per page. Warnings never abort a page: crawled corpora are full
of broken markup and the proxy must always answer.
"""

from __future__ import annotations

import gzip
import math
import time
from dataclasses import dataclass, field
from typing import Optional

from . import _brotli
from .components import PlanEntry, RewritePlan, apply_instance, plan
from .cssgen import CssRule, base_stylesheet, inject_styles
from .detect import BootstrapProfile, detect_bootstrap, scan_components
from .dom import Document, count_nodes, parse_html, serialize

HIGHLIGHT_RULE_SELECTOR = "[data-jsrehab]"
HIGHLIGHT_RULE_DECLARATIONS = (("outline", "2px dashed #e91e63"),
                               ("outline-offset", "2px"))


@dataclass
class RewriteConfig:
    tabs_mechanism: str = "radio"            # "radio" | "target"
    highlight: bool = False
    stylesheet_hints: list[str] = field(default_factory=list)
    compression_for_stats: str = "gzip"      # "gzip" | "brotli" | "auto"
    preserve_unknown: bool = True
    gzip_level: int = 6
    brotli_quality: int = 5

    def __post_init__(self) -> None:
        if self.tabs_mechanism not in ("radio", "target"):
            raise ValueError(f"tabs_mechanism must be radio|target, got {self.tabs_mechanism!r}")
        if self.compression_for_stats not in ("gzip", "brotli", "auto"):
            raise ValueError(
                f"compression_for_stats must be gzip|brotli|auto, got {self.compression_for_stats!r}")


@dataclass
class RewriteStats:
    duration_ms: float = 0.0
    node_count: int = 0
    instances_by_kind: dict[str, int] = field(default_factory=dict)
    original_size: int = 0
    transformed_size: int = 0
    original_compressed: int = 0
    transformed_compressed: int = 0
    compression: str = "gzip"
    bootstrap_detected: bool = False
    bootstrap_major: Optional[int] = None


@dataclass
class RewriteResult:
    html: bytes
    stats: RewriteStats
    warnings: list[tuple[str, str, str]] = field(default_factory=list)


def _compress_for_stats(data: bytes, config: RewriteConfig) -> tuple[int, str]:
    algorithm = config.compression_for_stats
    if algorithm == "auto":
        algorithm = "gzip"
    if algorithm == "brotli" and _brotli.available():
        return len(_brotli.compress(data, config.brotli_quality)), "brotli"
    # mtime pinned so equal inputs compress to equal bytes
    return len(gzip.compress(data, compresslevel=config.gzip_level, mtime=0)), "gzip"


def rewrite_tree(doc: Document, config: RewriteConfig,
                 script_bodies: Optional[dict[str, str]] = None,
                 ) -> tuple[BootstrapProfile, RewritePlan, list[CssRule]]:
    """Rewrite a parsed document in place; returns what was done.

    Exposed separately from :func:`rewrite_document` so the interactivity
    checker can inspect the plan against the mutated tree.
    """
    profile = detect_bootstrap(doc, script_bodies)
    instances = scan_components(doc, profile)
    rewrite_plan = plan(doc, instances, config)

    rules: list[CssRule] = []
    for entry in rewrite_plan.entries:
        entry_rules, warnings = apply_instance(entry, doc, rewrite_plan.allocator,
                                               profile.attr_prefix)
        rules.extend(entry_rules)
        rewrite_plan.warnings.extend(warnings)

    if rules:
        all_rules = [*base_stylesheet(), *rules]
        if config.highlight:
            all_rules.append(CssRule(HIGHLIGHT_RULE_SELECTOR,
                                     HIGHLIGHT_RULE_DECLARATIONS,
                                     origin="highlight"))
        inject_styles(doc, all_rules)
    return profile, rewrite_plan, rules


def rewrite_document(data: bytes, config: Optional[RewriteConfig] = None,
                     encoding: Optional[str] = None,
                     script_bodies: Optional[dict[str, str]] = None) -> RewriteResult:
    """Transform arbitrary HTML bytes; total (anomalies become warnings).

    With zero detected instances the output is just the parse/serialize
    normalization of the input and no stylesheet is injected.
    """
    if config is None:
        config = RewriteConfig()
    start = time.perf_counter()
    doc = parse_html(data, encoding=encoding)
    profile, rewrite_plan, _rules = rewrite_tree(doc, config, script_bodies)
    html = serialize(doc)
    duration_ms = (time.perf_counter() - start) * 1000.0

    by_kind: dict[str, int] = {}
    for entry in rewrite_plan.entries:
        kind = entry.instance.kind.value
        by_kind[kind] = by_kind.get(kind, 0) + 1

    original_compressed, algorithm = _compress_for_stats(data, config)
    transformed_compressed, _ = _compress_for_stats(html, config)
    stats = RewriteStats(
        duration_ms=duration_ms,
        node_count=count_nodes(doc),
        instances_by_kind=by_kind,
        original_size=len(data),
        transformed_size=len(html),
        original_compressed=original_compressed,
        transformed_compressed=transformed_compressed,
        compression=algorithm,
        bootstrap_detected=profile.detected,
        bootstrap_major=profile.major,
    )
    return RewriteResult(html=html, stats=stats,
                         warnings=[w.as_tuple() for w in rewrite_plan.warnings])


def overhead(result: RewriteResult) -> float:
    """Compressed-size overhead fraction, (transformed - original) / original.

    An empty original with empty transformed is 0; an empty original with
    non-empty transformed is +inf rather than a division error.
    """
    original = result.stats.original_compressed
    transformed = result.stats.transformed_compressed
    if original == 0:
        return 0.0 if transformed == 0 else math.inf
    return (transformed - original) / original
