"""jsrehab: replace Bootstrap's JS-driven UI components with HTML+CSS alternatives.

The package parses a page, detects Bootstrap usage and component instances,
rewrites each supported component into a script-free equivalent driven by
hidden checkbox/radio inputs, ``:target`` navigation, or hover/focus rules,
and injects the single stylesheet that wires the states together. An HTTP
rewriting proxy and a corpus runner reproduce the measurement pipeline.
"""

__version__ = "0.1.0"

SUPPORTED_BOOTSTRAP_MAJORS = (2, 3, 4, 5)

from .rewrite import RewriteConfig, RewriteResult, overhead, rewrite_document  # noqa: E402,F401
