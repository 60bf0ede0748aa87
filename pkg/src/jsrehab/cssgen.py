"""Generated-stylesheet assembly.

All state rules land in one ``<style data-jsrehab="styles">`` element in the
head: a single aggregated sheet compresses far better than scattered inline
styles, and the compressed-size overhead is the headline cost metric. Rules
print minified (``sel{prop:val;prop:val}``) and parse back losslessly.
"""

from __future__ import annotations

from typing import Iterable, Optional, Union

from .dom import Document, Element, Node, Text, append_child, select
from .dom.selector import (
    ALLOWED_PSEUDO_CLASSES,
    Selector,
    SelectorUnsupported,
    parse_selector,
)

STYLE_MARKER = "styles"

VISUALLY_HIDDEN_CLASS = "jsrehab-visually-hidden"
BACKDROP_CLASS = "jsrehab-backdrop"

# Shared focus-ring declarations mirrored from a hidden input onto its label.
FOCUS_RING_DECLARATIONS = (
    ("outline", "2px solid #0d6efd"),
    ("outline-offset", "2px"),
)


class CssRule:
    """One minified rule: parsed selector plus ordered declarations."""

    __slots__ = ("selector", "declarations", "origin")

    def __init__(self, selector: Union[Selector, str],
                 declarations: Iterable[tuple[str, str]],
                 origin: str = "base") -> None:
        if isinstance(selector, str):
            selector = parse_selector(selector)
        self.selector = selector
        self.declarations = list(declarations)
        self.origin = origin

    def print(self) -> str:
        body = ";".join(f"{prop}:{value}" for prop, value in self.declarations)
        return f"{self.selector.print()}{{{body}}}"

    def __repr__(self) -> str:  # pragma: no cover
        return f"CssRule({self.print()!r})"


def print_stylesheet(rules: Iterable[CssRule]) -> str:
    return "".join(rule.print() for rule in rules)


def parse_stylesheet(text: str, origin: str = "parsed") -> list[CssRule]:
    """Inverse of :func:`print_stylesheet` for the rules this module emits."""
    rules: list[CssRule] = []
    pos = 0
    length = len(text)
    while pos < length:
        while pos < length and text[pos] in " \t\r\n":
            pos += 1
        if pos >= length:
            break
        open_brace = text.find("{", pos)
        if open_brace == -1:
            raise ValueError(f"expected '{{' after position {pos}")
        close_brace = text.find("}", open_brace)
        if close_brace == -1:
            raise ValueError("unterminated rule body")
        selector = parse_selector(text[pos:open_brace].strip())
        declarations: list[tuple[str, str]] = []
        for chunk in text[open_brace + 1:close_brace].split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            prop, sep, value = chunk.partition(":")
            if not sep:
                raise ValueError(f"malformed declaration {chunk!r}")
            declarations.append((prop.strip(), value.strip()))
        rules.append(CssRule(selector, declarations, origin=origin))
        pos = close_brace + 1
    return rules


def base_stylesheet() -> list[CssRule]:
    """The one-time utility rules every rewritten page shares.

    The hidden-input class must stay focusable: it positions the control out
    of the layout instead of using ``display:none``, which would remove it
    from the tab order and kill keyboard operability.
    """
    return [
        CssRule(
            f".{VISUALLY_HIDDEN_CLASS}",
            [
                ("position", "absolute"),
                ("width", "1px"),
                ("height", "1px"),
                ("margin", "-1px"),
                ("padding", "0"),
                ("border", "0"),
                ("clip-path", "inset(50%)"),
                ("overflow", "hidden"),
                ("white-space", "nowrap"),
            ],
        ),
        CssRule(
            f".{BACKDROP_CLASS}",
            [
                ("position", "fixed"),
                ("top", "0"),
                ("left", "0"),
                ("width", "100vw"),
                ("height", "100vh"),
                ("cursor", "pointer"),
            ],
        ),
        CssRule(
            "label[data-jsrehab]",
            [("cursor", "pointer")],
        ),
    ]


def dedupe_rules(rules: Iterable[CssRule]) -> list[CssRule]:
    """Drop byte-identical rules, keeping first occurrence (plan order)."""
    seen: set[str] = set()
    out: list[CssRule] = []
    for rule in rules:
        printed = rule.print()
        if printed not in seen:
            seen.add(printed)
            out.append(rule)
    return out


def _find_head(doc: Document) -> Element:
    for el in doc.iter_elements():
        if el.tag == "head":
            return el
    # fragment trees may lack a head; grow one under html (or the root)
    html: Optional[Element] = next(
        (el for el in doc.iter_elements() if el.tag == "html"), None)
    head = Element("head")
    if html is not None:
        html.children.insert(0, head)
        head.parent = html
    else:
        doc.children.insert(0, head)
        head.parent = doc
    return head


def inject_styles(doc: Document, rules: Iterable[CssRule]) -> Element:
    """Write the aggregated stylesheet into the document head.

    Replaces any previously injected sheet instead of appending a second
    one, so re-running the pipeline cannot stack styles.
    """
    css_text = print_stylesheet(dedupe_rules(rules))
    for el in doc.iter_elements():
        if el.tag == "style" and el.attrs.get("data-jsrehab") == STYLE_MARKER:
            el.children.clear()
            text = Text(css_text)
            el.children.append(text)
            text.parent = el
            return el
    head = _find_head(doc)
    style = Element("style", {"data-jsrehab": STYLE_MARKER})
    append_child(style, head)
    text = Text(css_text)
    append_child(text, style)
    return style
