"""Simulated user-interaction states and restricted-CSS evaluation.

This stands in for a browser when proving that rewritten components actually
respond to interaction: a :class:`StateAssignment` describes which hidden
controls are checked, what is hovered/focused, and the URL fragment;
:func:`evaluate` applies the generated rules under that state and reports
each element's computed ``display``/``visibility``.

Only the rules this package emits are evaluated — the goal is to verify our
own mechanics, not to reimplement the full cascade against page stylesheets.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .cssgen import CssRule
from .dom import Document, Element, Node, ancestors
from .dom.selector import Complex, MatchContext, _match_complex


class UnknownControl(KeyError):
    """toggle() was asked about an id that names no checkbox/radio input."""


@dataclass(frozen=True)
class StateAssignment:
    """One simulated interaction state.

    ``hovered`` must be closed under ancestors (hovering an element hovers
    everything containing it); build it with :func:`hover_set`.
    """

    checked: frozenset[str] = frozenset()
    hovered: frozenset[int] = frozenset()      # id() of hovered nodes
    focused: Optional[Element] = None
    fragment: Optional[str] = None


def _controls(doc: Document) -> dict[str, Element]:
    out: dict[str, Element] = {}
    for el in doc.iter_elements():
        if el.tag == "input" and el.attrs.get("type") in ("checkbox", "radio"):
            el_id = el.attrs.get("id")
            if el_id and el_id not in out:
                out[el_id] = el
    return out


def initial_state(doc: Document) -> StateAssignment:
    """State before any interaction: controls with a ``checked`` attribute."""
    checked = frozenset(
        el_id for el_id, el in _controls(doc).items() if "checked" in el.attrs)
    return StateAssignment(checked=checked)


def hover_set(el: Element) -> frozenset[int]:
    ids = {id(el)}
    for anc in ancestors(el):
        ids.add(id(anc))
    return frozenset(ids)


def toggle(doc: Document, state: StateAssignment, control_id: str) -> StateAssignment:
    """Flip a checkbox, or select a radio (clearing its name group).

    Radios never uncheck on re-activation, matching native widget semantics.
    """
    controls = _controls(doc)
    control = controls.get(control_id)
    if control is None:
        raise UnknownControl(control_id)
    checked = set(state.checked)
    if control.attrs.get("type") == "checkbox":
        if control_id in checked:
            checked.remove(control_id)
        else:
            checked.add(control_id)
    else:
        group = control.attrs.get("name", "")
        for other_id, other in controls.items():
            if other.attrs.get("type") == "radio" and other.attrs.get("name", "") == group:
                checked.discard(other_id)
        checked.add(control_id)
    return replace(state, checked=frozenset(checked))


class _StateContext(MatchContext):
    __slots__ = ("state",)

    def __init__(self, state: StateAssignment) -> None:
        self.state = state

    def is_checked(self, el: Element) -> bool:
        el_id = el.attrs.get("id")
        if el_id:
            return el_id in self.state.checked
        return el.tag == "input" and "checked" in el.attrs

    def is_hovered(self, el: Element) -> bool:
        return id(el) in self.state.hovered

    def is_focused(self, el: Element) -> bool:
        return self.state.focused is el

    def is_focus_within(self, el: Element) -> bool:
        focused = self.state.focused
        if focused is None:
            return False
        if focused is el:
            return True
        return any(anc is el for anc in ancestors(focused))

    def is_target(self, el: Element) -> bool:
        return self.state.fragment is not None and el.attrs.get("id") == self.state.fragment


_DEFAULT = ("", "")  # (display, visibility): visible unless a rule says otherwise


def evaluate(doc: Document, rules: Iterable[CssRule],
             state: StateAssignment) -> dict[int, tuple[str, str]]:
    """Computed ``(display, visibility)`` per element id() under ``state``.

    Cascade: higher specificity wins; equal specificity resolves by rule
    order (later wins). Pseudo-element rules style generated content, not the
    element itself, so they are skipped here.
    """
    ctx = _StateContext(state)
    # (specificity, order, prop, value) per matched element
    applied: dict[int, dict[str, tuple[tuple[int, int, int], int]]] = {}
    values: dict[int, dict[str, str]] = {}
    elements = list(doc.iter_elements())
    for order, rule in enumerate(rules):
        for alt in rule.selector.alternatives:
            if alt.parts[-1][1].pseudo_element:
                continue
            spec = alt.specificity()
            relevant = [(p, v) for p, v in rule.declarations
                        if p in ("display", "visibility")]
            if not relevant:
                continue
            for el in elements:
                if not _match_complex(el, alt, ctx):
                    continue
                slot = applied.setdefault(id(el), {})
                vals = values.setdefault(id(el), {})
                for prop, value in relevant:
                    current = slot.get(prop)
                    if current is None or (spec, order) >= current:
                        slot[prop] = (spec, order)
                        vals[prop] = value
    out: dict[int, tuple[str, str]] = {}
    for el in elements:
        vals = values.get(id(el), {})
        out[id(el)] = (vals.get("display", ""), vals.get("visibility", ""))
    return out


def is_visible(doc: Document, visibility_map: dict[int, tuple[str, str]],
               el: Element) -> bool:
    """Effective visibility: any ``display:none`` ancestor hides; the nearest
    explicit ``visibility`` wins (it inherits)."""
    chain = [el, *[a for a in ancestors(el) if a.kind == "element"]]
    for node in chain:
        display, _ = visibility_map.get(id(node), _DEFAULT)
        if display == "none":
            return False
    for node in chain:
        _, visibility = visibility_map.get(id(node), _DEFAULT)
        if visibility == "hidden":
            return False
        if visibility == "visible":
            return True
    return True


def matches_under_state(el: Element, complex_sel: Complex,
                        state: StateAssignment) -> bool:
    """Selector check under a simulated state (used for ::after rules)."""
    return _match_complex(el, complex_sel, _StateContext(state))
