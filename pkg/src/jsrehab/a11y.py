"""Static accessibility lints over rewritten documents.

The generated controls must stay operable without a pointing device: hidden
inputs keep keyboard focus (never display:none), every label points at
exactly one real control, and no ARIA state attribute is emitted that nothing
could ever update.
"""

from __future__ import annotations

from .components import ID_PREFIX, MARKER_ATTR
from .cssgen import CssRule, VISUALLY_HIDDEN_CLASS
from .dom import Document, Element, node_path, text_content
from .statesim import evaluate, initial_state, is_visible


def _generated_inputs(doc: Document) -> list[Element]:
    return [el for el in doc.iter_elements()
            if el.tag == "input" and el.has_class(VISUALLY_HIDDEN_CLASS)]


def _generated_labels(doc: Document) -> list[Element]:
    return [el for el in doc.iter_elements()
            if el.tag == "label" and (MARKER_ATTR in el.attrs
                                      or el.has_class("jsrehab-backdrop"))]


def _accessible_text(el: Element) -> bool:
    if text_content(el).strip():
        return True
    if el.attrs.get("aria-label", "").strip() or el.attrs.get("title", "").strip():
        return True
    return any(d.tag == "img" and d.attrs.get("alt", "").strip()
               for d in el.iter_elements())


def lint_accessibility(doc: Document, rules: list[CssRule]) -> list[str]:
    """All violations found; an empty list means the page passes."""
    violations: list[str] = []

    inputs = _generated_inputs(doc)
    labels = _generated_labels(doc)
    elements_by_id: dict[str, list[Element]] = {}
    for el in doc.iter_elements():
        el_id = el.attrs.get("id")
        if el_id:
            elements_by_id.setdefault(el_id, []).append(el)

    # a control inside a closed section is legitimately unreachable until the
    # section opens; what must never happen is the input itself being styled
    # out of the tab order
    vmap = evaluate(doc, rules, initial_state(doc))
    for control in inputs:
        display, visibility = vmap.get(id(control), ("", ""))
        if display == "none" or visibility == "hidden":
            violations.append(
                f"generated input #{control.attrs.get('id')} is not focusable "
                f"(display={display!r}, visibility={visibility!r}) "
                f"at {node_path(control)}")
        for aria in ("aria-checked", "aria-expanded"):
            if aria in control.attrs:
                violations.append(
                    f"generated input #{control.attrs.get('id')} carries {aria}")

    for rule in rules:
        printed = rule.print()
        if f".{VISUALLY_HIDDEN_CLASS}" in printed and "display:none" in printed:
            violations.append(
                f"rule {printed!r} applies display:none to the hidden-input class")

    for label in labels:
        for_id = label.attrs.get("for", "")
        if not for_id:
            violations.append(f"generated label without for= at {node_path(label)}")
            continue
        bound = elements_by_id.get(for_id, [])
        if len(bound) != 1:
            violations.append(
                f"label for={for_id!r} resolves to {len(bound)} elements")
        elif not (bound[0].tag == "input"
                  and bound[0].attrs.get("type") in ("checkbox", "radio")):
            violations.append(
                f"label for={for_id!r} does not point at a checkbox/radio input")
        for aria in ("aria-checked", "aria-expanded"):
            if aria in label.attrs:
                violations.append(f"generated label for={for_id!r} carries {aria}")
        if not _accessible_text(label):
            violations.append(f"generated label for={for_id!r} has no accessible text")

    return violations
