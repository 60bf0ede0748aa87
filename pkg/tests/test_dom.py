"""Tree parsing, serialization, and mutation invariants."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jsrehab.dom import (
    Document,
    Element,
    InvalidHandle,
    Text,
    count_nodes,
    element_children,
    insert_before,
    insert_first_child,
    node_path,
    parse_html,
    remove,
    remove_attr,
    rename,
    serialize,
    serialize_str,
    set_attr,
    text_content,
    wrap,
)
from conftest import all_fixture_paths


def body_of(doc: Document) -> Element:
    return next(el for el in doc.iter_elements() if el.tag == "body")


class TestParse:
    def test_empty_document_synthesizes_skeleton(self):
        assert serialize(parse_html(b"")) == b"<html><head></head><body></body></html>"

    def test_unclosed_paragraphs_autoclose(self):
        doc = parse_html(b"<p>a<p>b")
        paragraphs = [el for el in doc.iter_elements() if el.tag == "p"]
        assert len(paragraphs) == 2
        assert [text_content(p) for p in paragraphs] == ["a", "b"]
        assert paragraphs[0].parent is paragraphs[1].parent

    def test_stray_end_tags_dropped(self):
        doc = parse_html(b"<div>a</span></div>")
        assert serialize_str(doc).count("</span>") == 0

    def test_head_content_routed_to_head(self):
        doc = parse_html(b"<title>t</title><p>body text")
        head = next(el for el in doc.iter_elements() if el.tag == "head")
        assert [c.tag for c in element_children(head)] == ["title"]
        assert text_content(body_of(doc)) == "body text"

    def test_entities_decoded_on_parse(self):
        doc = parse_html(b"<p>a &amp; b &lt;tag&gt; &#65;</p>")
        assert text_content(body_of(doc)) == "a & b <tag> A"

    def test_attribute_entities_and_duplicates(self):
        doc = parse_html(b'<div title="a&quot;b" class=x class=y>')
        div = next(el for el in doc.iter_elements() if el.tag == "div")
        assert div.attrs["title"] == 'a"b'
        # last occurrence wins after lowercase folding
        assert div.attrs["class"] == "y"

    def test_script_content_kept_raw(self):
        doc = parse_html(b"<script>if (a < b && c) {}</script>")
        script = next(el for el in doc.iter_elements() if el.tag == "script")
        assert text_content(script) == "if (a < b && c) {}"

    def test_arbitrary_bytes_never_fail(self):
        junk = bytes(range(256)) * 3
        doc = parse_html(junk)
        assert doc.kind == "document"

    def test_encoding_hint(self):
        latin = "café".encode("latin-1")
        doc = parse_html(latin, encoding="latin-1")
        assert "café" in text_content(body_of(doc))

    def test_fragment_parse_skips_skeleton(self):
        doc = parse_html(b"<li>x</li>", fragment=True)
        assert [c.tag for c in element_children(doc)] == ["li"]


class TestSerialize:
    def test_minimal_escapes(self):
        doc = parse_html(b"", fragment=True)
        p = Element("p", {"class": "x"})
        text = Text("hi")
        p.children.append(text)
        text.parent = p
        doc.children.append(p)
        p.parent = doc
        assert serialize_str(doc) == '<p class="x">hi</p>'

    def test_void_elements_have_no_end_tag(self):
        out = serialize_str(parse_html(b"<input type=text><br>"))
        assert "</input>" not in out and "</br>" not in out

    def test_bare_attribute_for_empty_value(self):
        out = serialize_str(parse_html(b"<input checked>"))
        assert "<input checked>" in out

    def test_attribute_order_preserved(self):
        out = serialize_str(parse_html(b'<div b="2" a="1" c="3">'))
        assert out.index('b="2"') < out.index('a="1"') < out.index('c="3"')

    def test_text_escaping_round_trips(self):
        doc = parse_html(b"<p>1 &lt; 2 &amp; 3 &gt; 2</p>")
        once = serialize(doc)
        assert serialize(parse_html(once)) == once


class TestRoundTrip:
    @pytest.mark.parametrize("path", all_fixture_paths(), ids=lambda p: p.name)
    def test_fixture_serialize_is_fixed_point(self, path):
        first = serialize(parse_html(path.read_bytes()))
        second = serialize(parse_html(first))
        assert second == first

    @pytest.mark.parametrize("path", all_fixture_paths()[:6], ids=lambda p: p.name)
    def test_structural_equality_after_reparse(self, path):
        doc1 = parse_html(path.read_bytes())
        doc2 = parse_html(serialize(doc1))
        assert _structure(doc1) == _structure(doc2)

    @given(st.text(alphabet=st.characters(codec="utf-8"), max_size=400))
    @settings(max_examples=150, deadline=None)
    def test_any_text_input_round_trips(self, source: str):
        once = serialize(parse_html(source.encode("utf-8")))
        assert serialize(parse_html(once)) == once


def _structure(node):
    if node.kind == "element":
        return (node.tag, tuple(sorted(node.attrs.items())),
                tuple(_structure(c) for c in node.children))
    if node.kind in ("text", "comment"):
        return (node.kind, node.data)
    if node.kind == "doctype":
        return ("doctype", node.text)
    return ("document", tuple(_structure(c) for c in node.children))


class TestMutations:
    def _fixture(self):
        return parse_html(b"<div id=a><span id=b>x</span><span id=c>y</span></div>")

    def _el(self, doc, el_id):
        return next(el for el in doc.iter_elements() if el.attrs.get("id") == el_id)

    def test_insert_before(self):
        doc = self._fixture()
        new = Element("em")
        insert_before(new, self._el(doc, "c"))
        parent = self._el(doc, "a")
        assert [c.tag for c in element_children(parent)] == ["span", "em", "span"]

    def test_insert_first_child(self):
        doc = self._fixture()
        new = Element("em")
        insert_first_child(new, self._el(doc, "a"))
        assert element_children(self._el(doc, "a"))[0] is new

    def test_remove_returns_subtree(self):
        doc = self._fixture()
        b = self._el(doc, "b")
        removed = remove(b)
        assert removed is b and removed.parent is None
        assert text_content(removed) == "x"
        assert [c.attrs["id"] for c in element_children(self._el(doc, "a"))] == ["c"]

    def test_remove_detached_raises(self):
        orphan = Element("div")
        with pytest.raises(InvalidHandle):
            remove(orphan)

    def test_rename_preserves_attrs_and_children(self):
        doc = parse_html(b'<button class="btn" id="t">Go</button>')
        button = self._el(doc, "t")
        rename(button, "label")
        assert button.tag == "label"
        assert button.attrs["class"] == "btn"
        assert text_content(button) == "Go"

    def test_wrap(self):
        doc = self._fixture()
        b = self._el(doc, "b")
        wrapper = wrap(b, Element("label"))
        assert b.parent is wrapper
        assert wrapper.parent is self._el(doc, "a")
        assert serialize_str(wrapper) == '<label><span id="b">x</span></label>'

    def test_wrap_cycle_rejected(self):
        doc = self._fixture()
        a = self._el(doc, "a")
        b = self._el(doc, "b")
        with pytest.raises(InvalidHandle):
            insert_before(a, b)  # a is an ancestor of b

    def test_set_and_remove_attr_fold_case(self):
        doc = self._fixture()
        a = self._el(doc, "a")
        set_attr(a, "Data-X", "1")
        assert a.attrs["data-x"] == "1"
        remove_attr(a, "DATA-X")
        assert "data-x" not in a.attrs

    def test_insert_before_detached_ref_raises(self):
        doc = self._fixture()
        stale = remove(self._el(doc, "b"))
        with pytest.raises(InvalidHandle):
            insert_before(Element("em"), stale)


def _check_links(node, seen):
    assert id(node) not in seen, "node appears twice (cycle or shared child)"
    seen.add(id(node))
    for child in node.children:
        assert child.parent is node
        _check_links(child, seen)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 1000)), max_size=40))
def test_random_mutation_sequences_keep_links_consistent(ops):
    doc = parse_html(b"<div><p>a</p><p>b</p><span>c</span><ul><li>1</li><li>2</li></ul></div>")
    rng = random.Random(1234)
    for op, pick in ops:
        elements = [el for el in doc.iter_elements() if el.tag not in ("html", "head", "body")]
        if not elements:
            break
        el = elements[pick % len(elements)]
        if op == 0:
            insert_before(Element("i"), el)
        elif op == 1:
            insert_first_child(Element("b"), el)
        elif op == 2 and len(elements) > 1:
            remove(el)
        elif op == 3:
            rename(el, rng.choice(["em", "strong", "span"]))
        elif op == 4:
            wrap(el, Element("label"))
    _check_links(doc, set())
    # and the result still serializes to a stable fixed point
    once = serialize(doc)
    assert serialize(parse_html(once)) == once


def test_node_path_is_css_like():
    doc = parse_html(b"<div><span></span><span id=x></span></div>")
    target = next(el for el in doc.iter_elements() if el.attrs.get("id") == "x")
    assert node_path(target).endswith("span:nth-child(2)")


def test_count_nodes_counts_everything():
    doc = parse_html(b"<p>a</p><!--c-->")
    # document, html, head, body, p, text, comment
    assert count_nodes(doc) == 7
