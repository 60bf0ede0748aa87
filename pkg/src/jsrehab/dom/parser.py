"""Forgiving HTML parsing on top of the stdlib tokenizer.

``html.parser.HTMLParser`` does the lexing (tags, attributes, entities,
comments, script/style raw-text modes); this module adds the tree
construction: implied end tags, stray end-tag dropping, and synthesis of the
``html``/``head``/``body`` skeleton for document parses. The builder never
raises on malformed input — every byte sequence yields a valid tree.

The normalization is deliberately idempotent: serializing a parsed tree and
parsing the output again reproduces the same tree, which the rewrite
pipeline's byte-stability guarantees rely on.
"""

from __future__ import annotations

from html.parser import HTMLParser
from typing import Optional, Union

from .tree import (
    Comment,
    Doctype,
    Document,
    Element,
    Node,
    Text,
    VOID_ELEMENTS,
)

# Start tags that implicitly close an open <p>.
_CLOSES_P = frozenset({
    "address", "article", "aside", "blockquote", "details", "div", "dl",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
    "h4", "h5", "h6", "header", "hgroup", "hr", "main", "menu", "nav", "ol",
    "p", "pre", "section", "table", "ul",
})

_TABLE_SECTION_CLOSES = frozenset({"caption", "colgroup", "thead", "tbody", "tfoot", "tr", "td", "th"})

# new tag -> set of tags it implicitly closes while they sit on top of the stack
_IMPLIED_END: dict[str, frozenset[str]] = {
    "li": frozenset({"li"}),
    "dt": frozenset({"dt", "dd"}),
    "dd": frozenset({"dt", "dd"}),
    "option": frozenset({"option"}),
    "optgroup": frozenset({"option", "optgroup"}),
    "tr": frozenset({"tr", "td", "th", "caption"}),
    "td": frozenset({"td", "th", "caption"}),
    "th": frozenset({"td", "th", "caption"}),
    "thead": _TABLE_SECTION_CLOSES,
    "tbody": _TABLE_SECTION_CLOSES,
    "tfoot": _TABLE_SECTION_CLOSES,
    "caption": _TABLE_SECTION_CLOSES,
    "colgroup": _TABLE_SECTION_CLOSES,
}

# Elements whose natural place is <head>; encountered outside <body> they are
# routed there so the skeleton normalization stays stable across reparses.
_HEAD_CONTENT = frozenset({"title", "base", "link", "meta", "style", "script", "noscript"})


class _TreeBuilder(HTMLParser):
    def __init__(self, fragment: bool = False) -> None:
        super().__init__(convert_charrefs=True)
        self.fragment = fragment
        self.document = Document()
        self.stack: list[Node] = [self.document]
        self.html: Optional[Element] = None
        self.head: Optional[Element] = None
        self.body: Optional[Element] = None
        # initial -> before_head -> in_head -> after_head -> in_body
        self.mode = "initial"

    # -- low-level insertion ------------------------------------------------

    def _append(self, node: Node, parent: Optional[Node] = None) -> None:
        target = parent if parent is not None else self.stack[-1]
        target.children.append(node)
        node.parent = target

    def _append_text(self, data: str, parent: Optional[Node] = None) -> None:
        target = parent if parent is not None else self.stack[-1]
        children = target.children
        # merge adjacent text nodes: the tokenizer may split runs arbitrarily
        if children and children[-1].kind == "text":
            children[-1].data += data  # type: ignore[attr-defined]
        else:
            node = Text(data)
            children.append(node)
            node.parent = target

    # -- document skeleton --------------------------------------------------

    def _ensure_html(self) -> None:
        if self.html is None:
            self.html = Element("html")
            self._append(self.html, self.document)
            self.stack.append(self.html)
            self.mode = "before_head"

    def _ensure_head(self) -> None:
        self._ensure_html()
        if self.head is None:
            self.head = Element("head")
            self._append(self.head, self.html)
            if self.mode == "before_head":
                self.stack.append(self.head)
                self.mode = "in_head"

    def _close_head(self) -> None:
        if self.mode == "before_head":
            self._ensure_head()
        if self.mode == "in_head":
            while self.stack[-1] is not self.html:
                self.stack.pop()
            self.mode = "after_head"

    def _force_body(self) -> None:
        self._ensure_html()
        if self.head is None:
            self.head = Element("head")
            self._append(self.head, self.html)
        self._close_head()
        if self.body is None:
            self.body = Element("body")
            self._append(self.body, self.html)
            self.stack.append(self.body)
        self.mode = "in_body"

    # -- token handlers -----------------------------------------------------

    def handle_starttag(self, tag: str, attrs: list[tuple[str, Optional[str]]]) -> None:
        folded: dict[str, str] = {}
        for name, value in attrs:
            folded[name] = value if value is not None else ""

        if self.fragment:
            self._insert_element(tag, folded)
            return

        if tag == "html":
            if self.mode == "initial":
                self.html = Element("html", folded)
                self._append(self.html, self.document)
                self.stack.append(self.html)
                self.mode = "before_head"
            return
        if tag == "head":
            self._ensure_html()
            if self.mode == "before_head":
                self.head = Element("head", folded)
                self._append(self.head, self.html)
                self.stack.append(self.head)
                self.mode = "in_head"
            return
        if tag == "body":
            self._ensure_html()
            if self.head is None:
                self.head = Element("head")
                self._append(self.head, self.html)
            self._close_head()
            if self.mode == "after_head":
                self.body = Element("body", folded)
                self._append(self.body, self.html)
                self.stack.append(self.body)
                self.mode = "in_body"
            return

        if self.mode != "in_body" and tag in _HEAD_CONTENT:
            self._ensure_head()
            if self.mode == "in_head":
                self._insert_element(tag, folded)
            else:  # after_head: reopen <head> for late metadata
                el = Element(tag, folded)
                self._append(el, self.head)
                if tag not in VOID_ELEMENTS:
                    self.stack.append(el)
            return

        if self.mode != "in_body":
            self._force_body()
        self._insert_element(tag, folded)

    def _insert_element(self, tag: str, attrs: dict[str, str]) -> None:
        closers = _IMPLIED_END.get(tag)
        closes_p = tag in _CLOSES_P
        if closers or closes_p:
            while True:
                top = self.stack[-1]
                if top.kind != "element" or top is self.body or top is self.head:
                    break
                top_tag = top.tag  # type: ignore[attr-defined]
                if (closers and top_tag in closers) or (closes_p and top_tag == "p"):
                    self.stack.pop()
                else:
                    break
        el = Element(tag, attrs)
        self._append(el)
        if tag not in VOID_ELEMENTS:
            self.stack.append(el)

    def handle_endtag(self, tag: str) -> None:
        if not self.fragment:
            if tag == "head":
                self._close_head()
                return
            if tag in ("body", "html"):
                # later content still belongs to <body>; stray end tags dropped
                return
        # pop up to and including the matching element; drop if absent
        for i in range(len(self.stack) - 1, -1, -1):
            node = self.stack[i]
            if node is self.body or node is self.head or node is self.html or node.kind != "element":
                return
            if node.tag == tag:  # type: ignore[attr-defined]
                del self.stack[i:]
                return

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, Optional[str]]]) -> None:
        self.handle_starttag(tag, attrs)
        if tag not in VOID_ELEMENTS:
            self.handle_endtag(tag)

    def handle_data(self, data: str) -> None:
        if not data:
            return
        top = self.stack[-1]
        if self.fragment or self.mode == "in_body":
            self._append_text(data)
            return
        if top is not self.document and top is not self.html and top is not self.head:
            # inside <title>/<style>/<script> in the head
            self._append_text(data)
            return
        if not data.strip():
            # whitespace may stay wherever it appeared; this keeps bytes stable
            self._append_text(data)
            return
        self._force_body()
        self._append_text(data)

    def handle_comment(self, data: str) -> None:
        self._append(Comment(data))

    def handle_decl(self, decl: str) -> None:
        if self.fragment or (self.mode == "initial" and self.html is None):
            self._append(Doctype(decl), self.document)

    def unknown_decl(self, data: str) -> None:
        # CDATA sections and other bogus declarations degrade to comments,
        # which is what forgiving parsers do with markup they cannot place.
        self._append(Comment(f"[{data}]"))

    def handle_pi(self, data: str) -> None:
        self._append(Comment(f"?{data}"))

    def finish(self) -> Document:
        self.close()
        if not self.fragment:
            self._ensure_html()
            if self.head is None:
                self.head = Element("head")
                self._append(self.head, self.html)
            if self.body is None:
                self.body = Element("body")
                self._append(self.body, self.html)
        return self.document


_BOMS = (
    (b"\xef\xbb\xbf", "utf-8"),
    (b"\xff\xfe", "utf-16-le"),
    (b"\xfe\xff", "utf-16-be"),
)


def decode_html_bytes(data: bytes, encoding: Optional[str] = None) -> str:
    """Decode page bytes: explicit hint, then BOM, then lossy UTF-8."""
    if encoding:
        try:
            return data.decode(encoding, errors="replace")
        except LookupError:
            pass
    for bom, bom_encoding in _BOMS:
        if data.startswith(bom):
            return data[len(bom):].decode(bom_encoding, errors="replace")
    return data.decode("utf-8", errors="replace")


def parse_html(
    data: Union[bytes, str],
    encoding: Optional[str] = None,
    fragment: bool = False,
) -> Document:
    """Parse HTML into a :class:`Document`; total over arbitrary input.

    Document parses synthesize the ``html``/``head``/``body`` skeleton;
    fragment parses keep nodes directly under the document root.
    """
    text = data if isinstance(data, str) else decode_html_bytes(data, encoding)
    builder = _TreeBuilder(fragment=fragment)
    builder.feed(text)
    return builder.finish()
