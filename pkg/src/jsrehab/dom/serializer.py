"""HTML serialization.

Emits UTF-8 with the minimal escape set: ``& < >`` in text, ``& "`` in
attribute values. Void elements get no end tag, raw-text elements (script,
style) emit their text verbatim, and attribute order is preserved exactly as
stored so rewritten pages diff cleanly against their originals.
"""

from __future__ import annotations

from .tree import Node, RAW_TEXT_ELEMENTS, VOID_ELEMENTS

_TEXT_ESCAPES = {"&": "&amp;", "<": "&lt;", ">": "&gt;"}


def escape_text(data: str) -> str:
    if "&" in data:
        data = data.replace("&", "&amp;")
    if "<" in data:
        data = data.replace("<", "&lt;")
    if ">" in data:
        data = data.replace(">", "&gt;")
    return data


def escape_attr(value: str) -> str:
    if "&" in value:
        value = value.replace("&", "&amp;")
    if '"' in value:
        value = value.replace('"', "&quot;")
    return value


def _open_tag(tag: str, attrs: dict[str, str]) -> str:
    if not attrs:
        return f"<{tag}>"
    parts = [f"<{tag}"]
    for name, value in attrs.items():
        if value == "":
            parts.append(f" {name}")
        else:
            parts.append(f' {name}="{escape_attr(value)}"')
    parts.append(">")
    return "".join(parts)


def serialize_str(root: Node) -> str:
    """Serialize a node (usually a Document) to an HTML string."""
    out: list[str] = []
    append = out.append
    # (node, is_close_marker); iterative to survive pathologically deep trees
    stack: list[tuple[Node, bool]] = [(root, False)]
    while stack:
        node, closing = stack.pop()
        if closing:
            append(f"</{node.tag}>")  # type: ignore[attr-defined]
            continue
        kind = node.kind
        if kind == "element":
            tag = node.tag  # type: ignore[attr-defined]
            append(_open_tag(tag, node.attrs))  # type: ignore[attr-defined]
            if tag in VOID_ELEMENTS:
                continue
            stack.append((node, True))
            if node.children:
                if tag in RAW_TEXT_ELEMENTS:
                    for child in node.children:
                        if child.kind == "text":
                            append(child.data)  # type: ignore[attr-defined]
                else:
                    stack.extend((child, False) for child in reversed(node.children))
        elif kind == "text":
            append(escape_text(node.data))  # type: ignore[attr-defined]
        elif kind == "comment":
            append(f"<!--{node.data}-->")  # type: ignore[attr-defined]
        elif kind == "doctype":
            append(f"<!{node.text}>")  # type: ignore[attr-defined]
        else:  # document
            stack.extend((child, False) for child in reversed(node.children))
    return "".join(out)


def serialize(root: Node) -> bytes:
    return serialize_str(root).encode("utf-8")
