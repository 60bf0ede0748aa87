"""Selector grammar, printing fixed point, and matching against a brute-force
oracle that implements the combinator semantics by explicit enumeration."""

from __future__ import annotations

import pytest

from jsrehab.dom import (
    Element,
    SelectorUnsupported,
    parse_html,
    parse_selector,
    select,
)
from jsrehab.dom.selector import MatchContext, _match_compound


PRINT_FIXED_POINT_CASES = [
    "div",
    "*",
    ".menu",
    "#main",
    "[data-bs-toggle]",
    "[data-bs-toggle=dropdown]",
    '[title="a b"]',
    "input:checked",
    "#a ~ .menu",
    "#a:checked ~ .menu > li",
    "ul li a",
    "input:checked + label",
    "div > p:nth-child(2)",
    ".a,.b,#c",
    "#x:not(:target)",
    "#pane:target",
    "a:hover",
    "a:focus",
    "div:focus-within",
    "input:focus-visible ~ label[for=x]",
    "[data-tip]:hover::after",
]


@pytest.mark.parametrize("source", PRINT_FIXED_POINT_CASES)
def test_parse_print_fixed_point(source):
    printed = parse_selector(source).print()
    assert parse_selector(printed).print() == printed


UNSUPPORTED_CASES = [
    "div:first-child",
    "a:visited",
    "p::first-line",
    "[href^=http]",
    "[href$=pdf]",
    "[class~=btn]",
    "div:nth-child(2n+1)",
    "div:nth-child(odd)",
    ":has(a)",
    "div >",
    "",
]


@pytest.mark.parametrize("source", UNSUPPORTED_CASES)
def test_unsupported_grammar_is_an_error_not_ignored(source):
    with pytest.raises(SelectorUnsupported):
        parse_selector(source)


SPECIFICITY_CASES = [
    ("div", (0, 0, 1)),
    ("*", (0, 0, 0)),
    (".a.b", (0, 2, 0)),
    ("#x", (1, 0, 0)),
    ("#x .a div", (1, 1, 1)),
    ("input:checked", (0, 1, 1)),
    ("#a:not(.b)", (1, 1, 0)),
    ("[data-x]:hover::after", (0, 2, 1)),
]


@pytest.mark.parametrize("source,expected", SPECIFICITY_CASES)
def test_specificity_triples(source, expected):
    assert parse_selector(source).specificity() == expected


DOC = parse_html(b"""
<div id="a" class="top">
  <ul class="menu">
    <li class="item first"><a href="#x">one</a></li>
    <li class="item"><a href="#y">two</a></li>
    <li class="item last"><span>three</span></li>
  </ul>
</div>
<div id="b">
  <input type="checkbox" id="chk" checked>
  <label for="chk">toggle</label>
  <p class="menu">not a list</p>
</div>
<section>
  <p>alpha</p>
  <p class="mid">beta</p>
  <p>gamma</p>
</section>
""")


# -- independent oracle: direct recursive definition over explicit node lists --

def _oracle_elements(root):
    return list(root.iter_elements())


def _oracle_match_complex(el, complex_sel, ctx):
    parts = complex_sel.parts
    return _oracle_match_at(el, parts, len(parts) - 1, ctx)


def _oracle_match_at(el, parts, idx, ctx):
    if not _match_compound(el, parts[idx][1], ctx):
        return False
    if idx == 0:
        return True
    combinator = parts[idx][0]
    if combinator == " ":
        candidates = [a for a in _ancestor_list(el)]
    elif combinator == ">":
        candidates = [el.parent] if el.parent is not None and el.parent.kind == "element" else []
    elif combinator == "+":
        prev = _all_previous_siblings(el)
        candidates = prev[-1:]
    else:  # "~"
        candidates = _all_previous_siblings(el)
    return any(_oracle_match_at(c, parts, idx - 1, ctx) for c in candidates)


def _ancestor_list(el):
    out = []
    node = el.parent
    while node is not None and node.kind == "element":
        out.append(node)
        node = node.parent
    return out


def _all_previous_siblings(el):
    if el.parent is None:
        return []
    out = []
    for child in el.parent.children:
        if child is el:
            break
        if child.kind == "element":
            out.append(child)
    return out


def oracle_select(tree, selector_text):
    selector = parse_selector(selector_text)
    ctx = MatchContext()
    out = []
    for el in _oracle_elements(tree):
        if any(_oracle_match_complex(el, alt, ctx) for alt in selector.alternatives):
            out.append(el)
    return out


ORACLE_SELECTORS = [
    "li",
    ".item",
    ".menu",
    "#a",
    "#a .item",
    "#a > ul",
    "ul > li > a",
    ".first ~ .item",
    ".first + li",
    "li:nth-child(2)",
    "p:nth-child(2)",
    "input:checked",
    "input:checked ~ label",
    "input:checked + label",
    ".menu li a",
    "div .menu",
    "section > p",
    ".mid ~ p",
    "#a ~ #b",
    "#a ~ section",
    "li a,section p",
    "*",
    ".nope",
    "#a ~ .menu",
]


@pytest.mark.parametrize("selector", ORACLE_SELECTORS)
def test_select_matches_brute_force_oracle(selector):
    fast = select(DOC, selector)
    slow = oracle_select(DOC, selector)
    assert [id(n) for n in fast] == [id(n) for n in slow], selector


def test_select_returns_document_order_and_no_duplicates():
    result = select(DOC, "li a,.item a,a")
    assert len(result) == len({id(n) for n in result})
    positions = {id(el): i for i, el in enumerate(DOC.iter_elements())}
    assert [positions[id(n)] for n in result] == sorted(positions[id(n)] for n in result)


def test_dynamic_pseudo_classes_match_nothing_statically():
    assert select(DOC, "a:hover") == []
    assert select(DOC, "a:focus") == []
    assert select(DOC, "#x:target") == []
    # :checked reflects the parsed attribute
    assert [el.attrs["id"] for el in select(DOC, "input:checked")] == ["chk"]


def test_listing_style_attribute_selector():
    doc = parse_html(
        b'<button data-bs-toggle="dropdown">m</button><div class="dropdown-menu"></div>')
    assert len(select(doc, "[data-bs-toggle=dropdown]")) == 1
    assert select(doc, ".nope") == []


def test_select_with_scope():
    scope = select(DOC, "#a")[0]
    assert all(el.tag == "li" for el in select(DOC, "li", scope=scope))
    assert select(DOC, "#b input", scope=scope) == []
