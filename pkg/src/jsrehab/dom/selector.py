"""CSS selector subset: parsing, printing, matching.

The grammar is intentionally closed: type and ``*`` selectors, ``.class``,
``#id``, ``[attr]``, ``[attr=value]``, the state pseudo-classes
``:checked :hover :focus :focus-visible :focus-within :target``, structural
``:nth-child(n)`` and ``:not(...)``, the four combinators (descendant, ``>``,
``~``, ``+``), comma-separated lists, and an optional ``::before``/``::after``
suffix. Anything else raises :class:`SelectorUnsupported` — silently ignoring
unknown syntax would make the exhaustive state simulation unsound.

Dynamic pseudo-classes consult a :class:`MatchContext`; the default context
evaluates the static document state (``:checked`` via the attribute, the
others match nothing).
"""

from __future__ import annotations

import re
from typing import Iterable, Optional, Union

from .tree import Element, Node

ALLOWED_PSEUDO_CLASSES = frozenset({
    "checked", "hover", "focus", "focus-visible", "focus-within", "target",
    "nth-child", "not",
})
ALLOWED_PSEUDO_ELEMENTS = frozenset({"before", "after"})


class SelectorUnsupported(ValueError):
    """Selector uses syntax outside the supported subset."""


_IDENT_RE = re.compile(r"[-A-Za-z_][-A-Za-z0-9_]*")
_PLAIN_VALUE_RE = re.compile(r"^[-A-Za-z0-9_]+$")


class Simple:
    """One simple selector: tag/universal/id/class/attr/pseudo."""

    __slots__ = ("kind", "name", "value", "arg")

    def __init__(self, kind: str, name: Optional[str] = None,
                 value: Optional[str] = None, arg=None) -> None:
        self.kind = kind
        self.name = name
        self.value = value
        self.arg = arg  # int for :nth-child, Compound for :not

    def print(self) -> str:
        if self.kind == "tag":
            return self.name  # type: ignore[return-value]
        if self.kind == "universal":
            return "*"
        if self.kind == "id":
            return f"#{self.name}"
        if self.kind == "class":
            return f".{self.name}"
        if self.kind == "attr":
            if self.value is None:
                return f"[{self.name}]"
            if _PLAIN_VALUE_RE.match(self.value):
                return f"[{self.name}={self.value}]"
            escaped = self.value.replace("\\", "\\\\").replace('"', '\\"')
            return f'[{self.name}="{escaped}"]'
        # pseudo-class
        if self.name == "nth-child":
            return f":nth-child({self.arg})"
        if self.name == "not":
            return f":not({self.arg.print()})"
        return f":{self.name}"

    def __repr__(self) -> str:  # pragma: no cover
        return f"Simple({self.print()!r})"


class Compound:
    """A run of simple selectors with an optional pseudo-element suffix."""

    __slots__ = ("simples", "pseudo_element")

    def __init__(self, simples: list[Simple], pseudo_element: Optional[str] = None) -> None:
        self.simples = simples
        self.pseudo_element = pseudo_element

    def print(self) -> str:
        body = "".join(s.print() for s in self.simples)
        if self.pseudo_element:
            body += f"::{self.pseudo_element}"
        return body


class Complex:
    """Compounds joined by combinators; ``parts[0]`` has combinator None."""

    __slots__ = ("parts",)

    def __init__(self, parts: list[tuple[Optional[str], Compound]]) -> None:
        self.parts = parts

    def print(self) -> str:
        out: list[str] = []
        for combinator, compound in self.parts:
            if combinator is None:
                out.append(compound.print())
            elif combinator == " ":
                out.append(f" {compound.print()}")
            else:
                out.append(f" {combinator} {compound.print()}")
        return "".join(out)

    def specificity(self) -> tuple[int, int, int]:
        a = b = c = 0
        for _, compound in self.parts:
            for simple in compound.simples:
                a2, b2, c2 = _simple_specificity(simple)
                a, b, c = a + a2, b + b2, c + c2
            if compound.pseudo_element:
                c += 1
        return (a, b, c)


class Selector:
    """Parsed selector list (one or more complex selectors)."""

    __slots__ = ("alternatives",)

    def __init__(self, alternatives: list[Complex]) -> None:
        self.alternatives = alternatives

    def print(self) -> str:
        return ",".join(alt.print() for alt in self.alternatives)

    def specificity(self) -> tuple[int, int, int]:
        return max(alt.specificity() for alt in self.alternatives)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Selector({self.print()!r})"


def _simple_specificity(simple: Simple) -> tuple[int, int, int]:
    if simple.kind == "id":
        return (1, 0, 0)
    if simple.kind in ("class", "attr"):
        return (0, 1, 0)
    if simple.kind == "pseudo":
        if simple.name == "not":
            a = b = c = 0
            for s in simple.arg.simples:
                a2, b2, c2 = _simple_specificity(s)
                a, b, c = a + a2, b + b2, c + c2
            return (a, b, c)
        return (0, 1, 0)
    if simple.kind == "tag":
        return (0, 0, 1)
    return (0, 0, 0)  # universal


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class _Scanner:
    __slots__ = ("text", "pos", "length")

    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0
        self.length = len(text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < self.length else ""

    def skip_ws(self) -> bool:
        start = self.pos
        while self.pos < self.length and self.text[self.pos] in " \t\n\r\f":
            self.pos += 1
        return self.pos > start

    def ident(self) -> str:
        match = _IDENT_RE.match(self.text, self.pos)
        if not match:
            raise SelectorUnsupported(
                f"expected identifier at position {self.pos} in {self.text!r}")
        self.pos = match.end()
        return match.group()


def _parse_attr(scanner: _Scanner) -> Simple:
    scanner.pos += 1  # [
    scanner.skip_ws()
    name = scanner.ident().lower()
    scanner.skip_ws()
    ch = scanner.peek()
    if ch == "]":
        scanner.pos += 1
        return Simple("attr", name=name)
    if ch and ch in "~|^$*":
        raise SelectorUnsupported(f"attribute operator {ch}= not in supported subset")
    if ch != "=":
        raise SelectorUnsupported(f"malformed attribute selector near position {scanner.pos}")
    scanner.pos += 1
    scanner.skip_ws()
    ch = scanner.peek()
    if ch in "\"'":
        quote = ch
        scanner.pos += 1
        out: list[str] = []
        while True:
            if scanner.pos >= scanner.length:
                raise SelectorUnsupported("unterminated string in attribute selector")
            c = scanner.text[scanner.pos]
            scanner.pos += 1
            if c == quote:
                break
            if c == "\\" and scanner.pos < scanner.length:
                out.append(scanner.text[scanner.pos])
                scanner.pos += 1
            else:
                out.append(c)
        value = "".join(out)
    else:
        start = scanner.pos
        while scanner.pos < scanner.length and scanner.text[scanner.pos] not in " \t\n\r\f]":
            scanner.pos += 1
        value = scanner.text[start:scanner.pos]
    scanner.skip_ws()
    if scanner.peek() != "]":
        raise SelectorUnsupported("expected ] in attribute selector")
    scanner.pos += 1
    return Simple("attr", name=name, value=value)


def _parse_pseudo(scanner: _Scanner) -> tuple[Optional[Simple], Optional[str]]:
    """Parse after ':'. Returns (simple, pseudo_element); exactly one is set."""
    scanner.pos += 1  # :
    if scanner.peek() == ":":
        scanner.pos += 1
        name = scanner.ident().lower()
        if name not in ALLOWED_PSEUDO_ELEMENTS:
            raise SelectorUnsupported(f"pseudo-element ::{name} not supported")
        return None, name
    name = scanner.ident().lower()
    if name not in ALLOWED_PSEUDO_CLASSES:
        raise SelectorUnsupported(f"pseudo-class :{name} not supported")
    if name == "nth-child":
        if scanner.peek() != "(":
            raise SelectorUnsupported(":nth-child requires an argument")
        scanner.pos += 1
        scanner.skip_ws()
        start = scanner.pos
        while scanner.pos < scanner.length and scanner.text[scanner.pos].isdigit():
            scanner.pos += 1
        if scanner.pos == start:
            raise SelectorUnsupported(":nth-child supports plain integers only")
        value = int(scanner.text[start:scanner.pos])
        scanner.skip_ws()
        if scanner.peek() != ")":
            raise SelectorUnsupported(":nth-child supports plain integers only")
        scanner.pos += 1
        return Simple("pseudo", name="nth-child", arg=value), None
    if name == "not":
        if scanner.peek() != "(":
            raise SelectorUnsupported(":not requires an argument")
        scanner.pos += 1
        scanner.skip_ws()
        inner = _parse_compound(scanner)
        if inner is None or inner.pseudo_element:
            raise SelectorUnsupported(":not argument must be a compound selector")
        scanner.skip_ws()
        if scanner.peek() != ")":
            raise SelectorUnsupported("expected ) closing :not()")
        scanner.pos += 1
        return Simple("pseudo", name="not", arg=inner), None
    return Simple("pseudo", name=name), None


def _parse_compound(scanner: _Scanner) -> Optional[Compound]:
    simples: list[Simple] = []
    pseudo_element: Optional[str] = None
    while scanner.pos < scanner.length:
        ch = scanner.peek()
        if pseudo_element is not None and ch not in " \t\n\r\f,)":
            raise SelectorUnsupported("pseudo-element must be last in a compound")
        if ch == "*":
            scanner.pos += 1
            simples.append(Simple("universal"))
        elif ch == "#":
            scanner.pos += 1
            simples.append(Simple("id", name=scanner.ident()))
        elif ch == ".":
            scanner.pos += 1
            simples.append(Simple("class", name=scanner.ident()))
        elif ch == "[":
            simples.append(_parse_attr(scanner))
        elif ch == ":":
            simple, pe = _parse_pseudo(scanner)
            if pe is not None:
                pseudo_element = pe
            else:
                simples.append(simple)  # type: ignore[arg-type]
        elif _IDENT_RE.match(scanner.text, scanner.pos):
            simples.append(Simple("tag", name=scanner.ident().lower()))
        else:
            break
    if not simples and pseudo_element is None:
        return None
    if not simples:
        simples = [Simple("universal")]
    return Compound(simples, pseudo_element)


def _parse_complex(scanner: _Scanner) -> Complex:
    scanner.skip_ws()
    first = _parse_compound(scanner)
    if first is None:
        raise SelectorUnsupported(f"empty selector in {scanner.text!r}")
    parts: list[tuple[Optional[str], Compound]] = [(None, first)]
    while True:
        had_ws = scanner.skip_ws()
        ch = scanner.peek()
        if ch and ch in ">~+":
            scanner.pos += 1
            scanner.skip_ws()
            combinator = ch
        elif had_ws and ch and ch not in ",)":
            combinator = " "
        else:
            break
        compound = _parse_compound(scanner)
        if compound is None:
            raise SelectorUnsupported(f"dangling combinator in {scanner.text!r}")
        parts.append((combinator, compound))
    return Complex(parts)


def parse_selector(text: str) -> Selector:
    scanner = _Scanner(text)
    alternatives = [_parse_complex(scanner)]
    scanner.skip_ws()
    while scanner.peek() == ",":
        scanner.pos += 1
        alternatives.append(_parse_complex(scanner))
        scanner.skip_ws()
    if scanner.pos != scanner.length:
        raise SelectorUnsupported(
            f"unexpected {scanner.text[scanner.pos]!r} at position {scanner.pos} in {text!r}")
    return Selector(alternatives)


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------

class MatchContext:
    """Dynamic state consulted by the state pseudo-classes.

    The base context models the static document: ``:checked`` reads the
    ``checked`` attribute; hover/focus/target have no static analogue and
    match nothing.
    """

    def is_checked(self, el: Element) -> bool:
        return el.tag == "input" and "checked" in el.attrs

    def is_hovered(self, el: Element) -> bool:
        return False

    def is_focused(self, el: Element) -> bool:
        return False

    def is_focus_within(self, el: Element) -> bool:
        return False

    def is_target(self, el: Element) -> bool:
        return False


_STATIC_CONTEXT = MatchContext()


def _element_children(parent: Node) -> list[Element]:
    return [c for c in parent.children if c.kind == "element"]  # type: ignore[misc]


def _match_simple(el: Element, simple: Simple, ctx: MatchContext) -> bool:
    kind = simple.kind
    if kind == "tag":
        return el.tag == simple.name
    if kind == "universal":
        return True
    if kind == "id":
        return el.attrs.get("id") == simple.name
    if kind == "class":
        return simple.name in el.attrs.get("class", "").split()
    if kind == "attr":
        value = el.attrs.get(simple.name)  # type: ignore[arg-type]
        if value is None:
            return False
        return simple.value is None or value == simple.value
    # pseudo-class
    name = simple.name
    if name == "checked":
        return ctx.is_checked(el)
    if name == "hover":
        return ctx.is_hovered(el)
    if name == "focus":
        return ctx.is_focused(el)
    if name == "focus-visible":
        return ctx.is_focused(el)
    if name == "focus-within":
        return ctx.is_focus_within(el)
    if name == "target":
        return ctx.is_target(el)
    if name == "nth-child":
        parent = el.parent
        if parent is None:
            return False
        position = 0
        for child in parent.children:
            if child.kind == "element":
                position += 1
                if child is el:
                    return position == simple.arg
        return False
    if name == "not":
        return not _match_compound(el, simple.arg, ctx)
    return False


def _match_compound(el: Element, compound: Compound, ctx: MatchContext) -> bool:
    for simple in compound.simples:
        if not _match_simple(el, simple, ctx):
            return False
    return True


def _previous_element(node: Node) -> Optional[Element]:
    parent = node.parent
    if parent is None:
        return None
    prev: Optional[Element] = None
    for child in parent.children:
        if child is node:
            return prev
        if child.kind == "element":
            prev = child  # type: ignore[assignment]
    return None


def _match_complex(el: Element, complex_sel: Complex, ctx: MatchContext) -> bool:
    parts = complex_sel.parts
    if not _match_compound(el, parts[-1][1], ctx):
        return False
    return _match_chain(el, parts, len(parts) - 1, ctx)


def _match_chain(current: Element, parts, idx: int, ctx: MatchContext) -> bool:
    if idx == 0:
        return True
    combinator = parts[idx][0]
    target_compound = parts[idx - 1][1]
    if combinator == ">":
        parent = current.parent
        if parent is None or parent.kind != "element":
            return False
        return _match_compound(parent, target_compound, ctx) and _match_chain(parent, parts, idx - 1, ctx)
    if combinator == " ":
        ancestor = current.parent
        while ancestor is not None and ancestor.kind == "element":
            if _match_compound(ancestor, target_compound, ctx) and _match_chain(ancestor, parts, idx - 1, ctx):
                return True
            ancestor = ancestor.parent
        return False
    if combinator == "+":
        prev = _previous_element(current)
        if prev is None:
            return False
        return _match_compound(prev, target_compound, ctx) and _match_chain(prev, parts, idx - 1, ctx)
    # general sibling ~
    prev = _previous_element(current)
    while prev is not None:
        if _match_compound(prev, target_compound, ctx) and _match_chain(prev, parts, idx - 1, ctx):
            return True
        prev = _previous_element(prev)
    return False


def matches(el: Element, selector: Union[Selector, str],
            ctx: Optional[MatchContext] = None) -> bool:
    """Does ``el`` match the selector (any alternative) under ``ctx``?"""
    if isinstance(selector, str):
        selector = parse_selector(selector)
    context = ctx if ctx is not None else _STATIC_CONTEXT
    return any(_match_complex(el, alt, context) for alt in selector.alternatives)


def select(tree: Node, selector: Union[Selector, str],
           scope: Optional[Node] = None,
           ctx: Optional[MatchContext] = None) -> list[Element]:
    """All elements matching ``selector``, in document order, duplicate-free."""
    if isinstance(selector, str):
        selector = parse_selector(selector)
    context = ctx if ctx is not None else _STATIC_CONTEXT
    root = scope if scope is not None else tree
    out: list[Element] = []
    for el in root.iter_elements():
        if any(_match_complex(el, alt, context) for alt in selector.alternatives):
            out.append(el)
    return out
