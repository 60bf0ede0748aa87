"""HTML document tree: parsing, querying, mutation, serialization."""

from .tree import (
    Comment,
    Doctype,
    Document,
    Element,
    InvalidHandle,
    Node,
    RAW_TEXT_ELEMENTS,
    Text,
    VOID_ELEMENTS,
    ancestors,
    append_child,
    child_index,
    count_nodes,
    detach,
    element_children,
    following_element_siblings,
    id_map,
    insert_after,
    insert_before,
    insert_first_child,
    node_path,
    previous_element_sibling,
    remove,
    remove_attr,
    rename,
    set_attr,
    text_content,
    wrap,
)
from .parser import decode_html_bytes, parse_html
from .serializer import serialize, serialize_str
from .selector import (
    MatchContext,
    Selector,
    SelectorUnsupported,
    matches,
    parse_selector,
    select,
)

__all__ = [
    "Comment", "Doctype", "Document", "Element", "InvalidHandle", "Node",
    "RAW_TEXT_ELEMENTS", "Text", "VOID_ELEMENTS",
    "ancestors", "append_child", "child_index", "count_nodes", "detach",
    "element_children", "following_element_siblings", "id_map",
    "insert_after", "insert_before", "insert_first_child", "node_path",
    "previous_element_sibling", "remove", "remove_attr", "rename",
    "set_attr", "text_content", "wrap",
    "decode_html_bytes", "parse_html", "serialize", "serialize_str",
    "MatchContext", "Selector", "SelectorUnsupported", "matches",
    "parse_selector", "select",
]
