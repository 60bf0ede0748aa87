"""In-memory HTML document tree.

Nodes are plain Python objects linked both ways (parent/children); a "handle"
is simply the node object. Mutation helpers keep both link directions
consistent and raise :class:`InvalidHandle` when fed detached or foreign
nodes, so a stale reference can never corrupt the tree silently.
"""

from __future__ import annotations

from typing import Iterator, Optional


class InvalidHandle(Exception):
    """A mutation primitive was given a detached, foreign, or unusable node."""


VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

# Children of these elements serialize verbatim: entity-escaping their text
# would corrupt the script/style source.
RAW_TEXT_ELEMENTS = frozenset({"script", "style"})


class Node:
    """Base class of all tree nodes."""

    __slots__ = ("parent", "children")

    kind = "node"

    def __init__(self) -> None:
        self.parent: Optional[Node] = None
        self.children: list[Node] = []

    def iter(self) -> Iterator[Node]:
        """Depth-first, document-order walk including this node."""
        stack: list[Node] = [self]
        while stack:
            node = stack.pop()
            yield node
            if node.children:
                stack.extend(reversed(node.children))

    def iter_elements(self) -> Iterator[Element]:
        for node in self.iter():
            if node.kind == "element":
                yield node  # type: ignore[misc]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<{type(self).__name__}>"


class Document(Node):
    __slots__ = ()
    kind = "document"


class Doctype(Node):
    """Doctype declaration; ``text`` holds the raw content after ``<!``."""

    __slots__ = ("text",)
    kind = "doctype"

    def __init__(self, text: str) -> None:
        super().__init__()
        self.text = text


class Element(Node):
    __slots__ = ("tag", "attrs")
    kind = "element"

    def __init__(self, tag: str, attrs: Optional[dict[str, str]] = None) -> None:
        super().__init__()
        self.tag = tag.lower()
        self.attrs: dict[str, str] = attrs if attrs is not None else {}

    def get(self, name: str, default: Optional[str] = None) -> Optional[str]:
        return self.attrs.get(name.lower(), default)

    def has_class(self, cls: str) -> bool:
        return cls in self.attrs.get("class", "").split()

    def classes(self) -> list[str]:
        return self.attrs.get("class", "").split()

    def add_class(self, cls: str) -> None:
        if not self.has_class(cls):
            existing = self.attrs.get("class", "")
            self.attrs["class"] = f"{existing} {cls}".strip()

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        ident = "#" + self.attrs["id"] if "id" in self.attrs else ""
        return f"<Element {self.tag}{ident}>"


class Text(Node):
    __slots__ = ("data",)
    kind = "text"

    def __init__(self, data: str) -> None:
        super().__init__()
        self.data = data


class Comment(Node):
    __slots__ = ("data",)
    kind = "comment"

    def __init__(self, data: str) -> None:
        super().__init__()
        self.data = data


# ---------------------------------------------------------------------------
# Mutation primitives.
# ---------------------------------------------------------------------------

def _attached_index(node: Node) -> int:
    parent = node.parent
    if parent is None:
        raise InvalidHandle(f"node {node!r} is detached")
    try:
        return parent.children.index(node)
    except ValueError:
        raise InvalidHandle(f"node {node!r} has inconsistent parent link") from None


def _check_no_cycle(node: Node, new_parent: Node) -> None:
    current: Optional[Node] = new_parent
    while current is not None:
        if current is node:
            raise InvalidHandle("insertion would create a cycle")
        current = current.parent


def detach(node: Node) -> Node:
    """Remove ``node`` from its parent (no-op if already detached)."""
    if node.parent is not None:
        idx = _attached_index(node)
        del node.parent.children[idx]
        node.parent = None
    return node


def insert_before(node: Node, ref: Node) -> None:
    """Insert ``node`` as the immediately preceding sibling of ``ref``."""
    idx = _attached_index(ref)
    _check_no_cycle(node, ref.parent)  # type: ignore[arg-type]
    detach(node)
    ref.parent.children.insert(idx, node)  # type: ignore[union-attr]
    node.parent = ref.parent


def insert_after(node: Node, ref: Node) -> None:
    """Insert ``node`` as the immediately following sibling of ``ref``."""
    idx = _attached_index(ref)
    _check_no_cycle(node, ref.parent)  # type: ignore[arg-type]
    detach(node)
    ref.parent.children.insert(idx + 1, node)  # type: ignore[union-attr]
    node.parent = ref.parent


def insert_first_child(node: Node, parent: Node) -> None:
    _check_no_cycle(node, parent)
    detach(node)
    parent.children.insert(0, node)
    node.parent = parent


def append_child(node: Node, parent: Node) -> None:
    _check_no_cycle(node, parent)
    detach(node)
    parent.children.append(node)
    node.parent = parent


def remove(node: Node) -> Node:
    """Detach ``node`` and return it (the caller owns the removed subtree)."""
    if node.parent is None:
        raise InvalidHandle("cannot remove a detached node")
    return detach(node)


def rename(node: Element, tag: str) -> Element:
    """Change an element's tag name in place, keeping attributes and children."""
    if node.kind != "element":
        raise InvalidHandle("only elements can be renamed")
    node.tag = tag.lower()
    return node


def set_attr(node: Element, name: str, value: str) -> None:
    node.attrs[name.lower()] = value


def remove_attr(node: Element, name: str) -> None:
    node.attrs.pop(name.lower(), None)


def wrap(node: Node, wrapper: Element) -> Element:
    """Replace ``node`` with ``wrapper`` and reparent ``node`` inside it."""
    if node.parent is None:
        raise InvalidHandle("cannot wrap a detached node")
    idx = _attached_index(node)
    parent = node.parent
    _check_no_cycle(wrapper, parent)
    detach(wrapper)
    parent.children[idx] = wrapper
    wrapper.parent = parent
    node.parent = None
    append_child(node, wrapper)
    return wrapper


# ---------------------------------------------------------------------------
# Read-only helpers shared by the detection and rewrite layers.
# ---------------------------------------------------------------------------

def element_children(node: Node) -> list[Element]:
    return [c for c in node.children if c.kind == "element"]  # type: ignore[misc]


def ancestors(node: Node) -> Iterator[Node]:
    current = node.parent
    while current is not None:
        yield current
        current = current.parent


def child_index(node: Node) -> int:
    """Index of ``node`` among its parent's element children (0-based)."""
    if node.parent is None:
        raise InvalidHandle("detached node has no sibling position")
    i = 0
    for child in node.parent.children:
        if child is node:
            return i
        if child.kind == "element":
            i += 1
    raise InvalidHandle("node missing from parent's child list")


def previous_element_sibling(node: Node) -> Optional[Element]:
    if node.parent is None:
        return None
    prev: Optional[Element] = None
    for child in node.parent.children:
        if child is node:
            return prev
        if child.kind == "element":
            prev = child  # type: ignore[assignment]
    return None


def following_element_siblings(node: Node) -> list[Element]:
    if node.parent is None:
        return []
    seen = False
    out: list[Element] = []
    for child in node.parent.children:
        if child is node:
            seen = True
        elif seen and child.kind == "element":
            out.append(child)  # type: ignore[arg-type]
    return out


def text_content(node: Node) -> str:
    parts: list[str] = []
    for n in node.iter():
        if n.kind == "text":
            parts.append(n.data)  # type: ignore[attr-defined]
    return "".join(parts)


def id_map(root: Node) -> dict[str, Element]:
    """First element per id, in document order (duplicate ids keep the first)."""
    out: dict[str, Element] = {}
    for el in root.iter_elements():
        el_id = el.attrs.get("id")
        if el_id and el_id not in out:
            out[el_id] = el
    return out


def node_path(node: Node) -> str:
    """CSS-flavored location string for diagnostics, e.g. ``html>body>div:nth-child(2)``."""
    parts: list[str] = []
    current: Optional[Node] = node
    while current is not None and current.kind != "document":
        if current.kind == "element":
            tag = current.tag  # type: ignore[attr-defined]
            if current.parent is not None and current.parent.kind != "document":
                parts.append(f"{tag}:nth-child({child_index(current) + 1})")
            else:
                parts.append(tag)
        current = current.parent
    return ">".join(reversed(parts)) or "(detached)"


def count_nodes(root: Node) -> int:
    return sum(1 for _ in root.iter())
