"""Turn detected component instances into concrete mutations and CSS rules.

Each supported component kind maps to one state mechanism:

========== ==============================================
Accordion  radio group
Affix      position:sticky
Alert      checkbox
Carousel   radio group
Collapse   checkbox
Dropdown   checkbox
Modal      checkbox
Navs/tabs  radio group (URL-fragment :target selectable)
Offcanvas  checkbox
Popover    checkbox
Scrollspy  unsupported
Toast      checkbox
Tooltip    :hover / :focus
Typeahead  unsupported
========== ==============================================

The hidden input must reach its target with a pure-CSS path: ``~`` only
selects *following siblings*, so the input goes before the target (or before
the target's nearest ancestor whose parent tolerates an input child, bridging
the rest of the way with descendant selectors). When no such placement exists
the instance degrades to a warning and the document is left untouched for it.

Converted triggers become ``<label>`` elements via tag rename, keeping their
classes so the page's own styling continues to apply. Keyboard activation
happens on the hidden input itself; a focus ring is mirrored onto the label.
No script element and no ``on*`` attribute is ever generated, and no ARIA
state attribute is emitted on generated controls — the native elements carry
their own semantics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .cssgen import (
    BACKDROP_CLASS,
    CssRule,
    FOCUS_RING_DECLARATIONS,
    VISUALLY_HIDDEN_CLASS,
)
from .detect import ComponentInstance, ComponentKind
from .dom import (
    Comment,
    Document,
    Element,
    Node,
    Text,
    ancestors,
    append_child,
    child_index,
    insert_before,
    node_path,
    remove,
    rename,
    text_content,
    wrap,
)

MARKER_ATTR = "data-jsrehab"
TOOLTIP_ATTR = "data-jsrehab-tooltip"
ID_PREFIX = "jsrehab-"

UNSUPPORTED_SCROLLSPY = "no access to viewport in CSS"
UNSUPPORTED_TYPEAHEAD = "cannot replicate autocompletion"


# -- state mechanisms ---------------------------------------------------------

@dataclass(frozen=True)
class CheckboxToggle:
    pass


@dataclass(frozen=True)
class RadioGroup:
    group_name: str


@dataclass(frozen=True)
class UrlFragmentTarget:
    pass


@dataclass(frozen=True)
class HoverFocus:
    pass


@dataclass(frozen=True)
class StickyPosition:
    pass


@dataclass(frozen=True)
class Unsupported:
    reason: str


StateMechanism = Union[CheckboxToggle, RadioGroup, UrlFragmentTarget,
                       HoverFocus, StickyPosition, Unsupported]

_CHECKBOX_KINDS = frozenset({
    ComponentKind.ALERT, ComponentKind.COLLAPSE, ComponentKind.DROPDOWN,
    ComponentKind.MODAL, ComponentKind.OFFCANVAS, ComponentKind.POPOVER,
    ComponentKind.TOAST,
})
_RADIO_KINDS = frozenset({
    ComponentKind.ACCORDION, ComponentKind.CAROUSEL, ComponentKind.NAVS_TABS,
})

KIND_MECHANISMS: dict[ComponentKind, str] = {
    ComponentKind.ACCORDION: "radio",
    ComponentKind.AFFIX: "sticky",
    ComponentKind.ALERT: "checkbox",
    ComponentKind.CAROUSEL: "radio",
    ComponentKind.COLLAPSE: "checkbox",
    ComponentKind.DROPDOWN: "checkbox",
    ComponentKind.MODAL: "checkbox",
    ComponentKind.NAVS_TABS: "radio",
    ComponentKind.OFFCANVAS: "checkbox",
    ComponentKind.POPOVER: "checkbox",
    ComponentKind.SCROLLSPY: "unsupported",
    ComponentKind.TOAST: "checkbox",
    ComponentKind.TOOLTIP: "hover-focus",
    ComponentKind.TYPEAHEAD: "unsupported",
}


@dataclass
class RewriteWarning:
    kind: str
    reason: str
    path: str

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.kind, self.reason, self.path)


@dataclass
class PlanEntry:
    instance: ComponentInstance
    mechanism: StateMechanism
    control_ids: list[str] = field(default_factory=list)
    checked: bool = False


class IdAllocator:
    """Fresh ``jsrehab-<n>`` ids; collisions with pre-existing ids skip to the
    next counter value so generated rules can never capture foreign elements."""

    def __init__(self, doc: Document) -> None:
        self.taken = {el.attrs["id"] for el in doc.iter_elements() if "id" in el.attrs}
        self.counter = 0

    def allocate(self) -> str:
        while True:
            candidate = f"{ID_PREFIX}{self.counter}"
            self.counter += 1
            if candidate not in self.taken:
                self.taken.add(candidate)
                return candidate


@dataclass
class RewritePlan:
    entries: list[PlanEntry] = field(default_factory=list)
    warnings: list[RewriteWarning] = field(default_factory=list)
    allocator: Optional[IdAllocator] = None


def plan(doc: Document, instances: list[ComponentInstance], config) -> RewritePlan:
    """Assign a mechanism and fresh control ids to each supported instance.

    ``config`` is a RewriteConfig; only ``tabs_mechanism`` is consulted here.
    """
    tabs_mechanism = getattr(config, "tabs_mechanism", "radio")
    allocator = IdAllocator(doc)
    out = RewritePlan(allocator=allocator)
    for inst in instances:
        kind = inst.kind
        if kind == ComponentKind.SCROLLSPY:
            out.warnings.append(RewriteWarning(kind.value, UNSUPPORTED_SCROLLSPY,
                                               _instance_path(inst)))
            continue
        if kind == ComponentKind.TYPEAHEAD:
            out.warnings.append(RewriteWarning(kind.value, UNSUPPORTED_TYPEAHEAD,
                                               _instance_path(inst)))
            continue
        if inst.warning:
            out.warnings.append(RewriteWarning(kind.value, inst.warning,
                                               _instance_path(inst)))
            continue
        if not inst.targets:
            out.warnings.append(RewriteWarning(kind.value, "no resolvable target",
                                               _instance_path(inst)))
            continue

        if kind in _CHECKBOX_KINDS:
            entry = PlanEntry(inst, CheckboxToggle(), [allocator.allocate()],
                              checked=inst.initially_active)
        elif kind == ComponentKind.NAVS_TABS and tabs_mechanism == "target":
            entry = PlanEntry(inst, UrlFragmentTarget())
        elif kind in _RADIO_KINDS:
            ids = [allocator.allocate() for _ in inst.targets]
            entry = PlanEntry(inst, RadioGroup(f"{ids[0]}-group"), ids)
        elif kind == ComponentKind.TOOLTIP:
            entry = PlanEntry(inst, HoverFocus())
        else:  # ComponentKind.AFFIX
            entry = PlanEntry(inst, StickyPosition())
        out.entries.append(entry)
    return out


def _instance_path(inst: ComponentInstance) -> str:
    node = inst.triggers[0] if inst.triggers else (inst.targets[0] if inst.targets else None)
    return node_path(node) if node is not None else "(unknown)"


# -- placement ----------------------------------------------------------------

class TargetUnreachable(Exception):
    """No ancestor placement gives the hidden input a sibling-combinator path."""


# Parents where a stray <input> either violates the content model badly enough
# that browsers relocate it (table internals) or cannot host flow content.
_BAD_INPUT_PARENTS = frozenset({
    "html", "head", "table", "thead", "tbody", "tfoot", "tr", "colgroup",
    "select", "optgroup", "option", "style", "script", "ul", "ol", "dl",
})


def _in_head(node: Node) -> bool:
    return any(a.kind == "element" and a.tag == "head" for a in ancestors(node))


def _placement_anchor(target: Element) -> Element:
    """Target itself, or its nearest ancestor before which an input may sit."""
    if _in_head(target):
        raise TargetUnreachable(f"target {node_path(target)} sits inside <head>")
    node: Node = target
    while True:
        parent = node.parent
        if parent is None or parent.kind == "document":
            raise TargetUnreachable(f"no insertion point reaches {node_path(target)}")
        if parent.kind == "element" and parent.tag not in _BAD_INPUT_PARENTS:
            return node  # type: ignore[return-value]
        node = parent


_CLEAN_IDENT = re.compile(r"^[-A-Za-z_][-A-Za-z0-9_]*$")
_PLAIN_ATTR_VALUE = re.compile(r"^[-A-Za-z0-9_]+$")


def _id_selector(el_id: str) -> str:
    if _CLEAN_IDENT.match(el_id):
        return f"#{el_id}"
    escaped = el_id.replace("\\", "\\\\").replace('"', '\\"')
    return f'[id="{escaped}"]'


def _ensure_id(el: Element, allocator: IdAllocator) -> str:
    existing = el.attrs.get("id")
    if existing:
        return existing
    new_id = allocator.allocate()
    el.attrs["id"] = new_id
    return new_id


def _selector_for(el: Element, allocator: IdAllocator,
                  prefer_class: Optional[str] = None) -> str:
    """Selector uniquely naming ``el``: its id, a sibling-unique class, or a
    freshly assigned id."""
    if el.attrs.get("id"):
        return _id_selector(el.attrs["id"])
    if prefer_class and el.has_class(prefer_class) and el.parent is not None:
        rivals = [c for c in el.parent.children
                  if c.kind == "element" and c is not el
                  and c.has_class(prefer_class)]  # type: ignore[attr-defined]
        if not rivals:
            return f".{prefer_class}"
    return _id_selector(_ensure_id(el, allocator))


def _insertion_ref(anchor: Element, triggers: list[Element]) -> Element:
    """Insert before the earliest same-parent trigger so the converted label
    follows the input and can carry the mirrored focus ring."""
    ref = anchor
    parent = anchor.parent
    if parent is None:
        return ref
    positions = {id(c): i for i, c in enumerate(parent.children)}
    best = positions[id(anchor)]
    for trigger in triggers:
        if trigger.parent is parent:
            pos = positions.get(id(trigger))
            if pos is not None and pos < best:
                best = pos
                ref = trigger
    return ref


def _sibling_reachable(control: Element, anchor: Element) -> bool:
    """True when ``anchor`` follows ``control`` under the same parent."""
    parent = control.parent
    if parent is None or anchor.parent is not parent:
        return False
    seen_control = False
    for child in parent.children:
        if child is control:
            seen_control = True
        elif child is anchor:
            return seen_control
    return False


# -- shared mutation helpers ----------------------------------------------------

_BEHAVIOR_ATTR_NAMES = (
    "toggle", "target", "dismiss", "ride", "slide", "slide-to",
    "parent", "spy", "provide", "interval", "auto-close",
)


def _drop_behavior_attrs(el: Element, prefix: str) -> None:
    for name in _BEHAVIOR_ATTR_NAMES:
        el.attrs.pop(f"{prefix}{name}", None)
        el.attrs.pop(f"data-{name}", None)
        el.attrs.pop(f"data-bs-{name}", None)
    el.attrs.pop("aria-expanded", None)
    el.attrs.pop("aria-checked", None)


def _is_focusable(el: Element) -> bool:
    if "tabindex" in el.attrs:
        return True
    if el.tag == "a":
        return "href" in el.attrs
    return el.tag in ("button", "input", "select", "textarea")


def _has_accessible_text(el: Element) -> bool:
    if text_content(el).strip():
        return True
    if el.attrs.get("aria-label", "").strip() or el.attrs.get("title", "").strip():
        return True
    for desc in el.iter_elements():
        if desc.tag == "img" and desc.attrs.get("alt", "").strip():
            return True
    return False


_DEFAULT_LABEL_TEXT = {
    ComponentKind.ALERT: "Close",
    ComponentKind.TOAST: "Close",
    ComponentKind.MODAL: "Toggle dialog",
    ComponentKind.DROPDOWN: "Toggle menu",
    ComponentKind.COLLAPSE: "Toggle section",
    ComponentKind.OFFCANVAS: "Toggle panel",
    ComponentKind.POPOVER: "Toggle popover",
    ComponentKind.ACCORDION: "Show section",
    ComponentKind.NAVS_TABS: "Show tab",
    ComponentKind.CAROUSEL: "Show slide",
}


def _to_label(trigger: Element, input_id: str, kind: ComponentKind, prefix: str) -> Element:
    rename(trigger, "label")
    _drop_behavior_attrs(trigger, prefix)
    trigger.attrs.pop("href", None)
    trigger.attrs.pop("type", None)
    trigger.attrs["for"] = input_id
    trigger.attrs[MARKER_ATTR] = kind.value
    if not _has_accessible_text(trigger):
        trigger.attrs["aria-label"] = _DEFAULT_LABEL_TEXT.get(kind, "Toggle")
    return trigger


def _make_input(input_type: str, input_id: str, checked: bool,
                name: Optional[str] = None) -> Element:
    attrs: dict[str, str] = {"type": input_type, "id": input_id,
                             "class": VISUALLY_HIDDEN_CLASS}
    if name:
        attrs["name"] = name
    if checked:
        attrs["checked"] = ""
    return Element("input", attrs)


def _mark(el: Element, kind: ComponentKind) -> None:
    if el.tag in ("body", "html", "head"):
        return
    el.attrs[MARKER_ATTR] = kind.value


def _attr_sel(name: str, value: str) -> str:
    if _PLAIN_ATTR_VALUE.match(value):
        return f"[{name}={value}]"
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'[{name}="{escaped}"]'


def _focus_ring_rule(input_id: str, origin: str) -> CssRule:
    for_sel = _attr_sel("for", input_id)
    sel = (f"#{input_id}:focus-visible ~ label{for_sel},"
           f"#{input_id}:focus-visible ~ * label{for_sel}")
    return CssRule(sel, FOCUS_RING_DECLARATIONS, origin=origin)


def _reach(input_id: str, anchor_sel: str, inner_sel: Optional[str],
           direct_child: bool = False, checked: bool = True) -> str:
    """Selector walking from the hidden input to the target: general sibling
    to the anchor, then (optionally) down into it."""
    state = ":checked" if checked else ""
    head = f"#{input_id}{state} ~ {anchor_sel}"
    if inner_sel is None:
        return head
    joiner = " > " if direct_child else " "
    return f"{head}{joiner}{inner_sel}"


# -- per-kind application -------------------------------------------------------

def apply_instance(entry: PlanEntry, doc: Document, allocator: IdAllocator,
                   prefix: str) -> tuple[list[CssRule], list[RewriteWarning]]:
    """Apply one plan entry to the document.

    Never raises: unreachable targets demote the entry to a warning and the
    document stays untouched for that instance.
    """
    kind = entry.instance.kind
    try:
        if isinstance(entry.mechanism, CheckboxToggle):
            if kind == ComponentKind.POPOVER:
                return _apply_popover(entry, allocator, prefix)
            return _apply_checkbox(entry, allocator, prefix)
        if isinstance(entry.mechanism, RadioGroup):
            if kind == ComponentKind.CAROUSEL:
                return _apply_carousel(entry, allocator, prefix)
            return _apply_radio_panes(entry, allocator, prefix)
        if isinstance(entry.mechanism, UrlFragmentTarget):
            return _apply_fragment_tabs(entry, allocator, prefix)
        if isinstance(entry.mechanism, HoverFocus):
            return _apply_tooltip(entry, prefix)
        if isinstance(entry.mechanism, StickyPosition):
            return _apply_affix(entry, allocator, prefix)
    except TargetUnreachable as exc:
        return [], [RewriteWarning(kind.value, str(exc), _instance_path(entry.instance))]
    return [], [RewriteWarning(kind.value, "unhandled mechanism",
                               _instance_path(entry.instance))]


def _apply_checkbox(entry: PlanEntry,
                    allocator: IdAllocator,
                    prefix: str) -> tuple[list[CssRule], list[RewriteWarning]]:
    inst = entry.instance
    kind = inst.kind
    input_id = entry.control_ids[0]

    prefer = {
        ComponentKind.DROPDOWN: "dropdown-menu",
        ComponentKind.MODAL: "modal",
        ComponentKind.OFFCANVAS: "offcanvas",
        ComponentKind.ALERT: "alert",
        ComponentKind.TOAST: "toast",
        ComponentKind.COLLAPSE: "collapse",
    }.get(kind)

    first_anchor = _placement_anchor(inst.targets[0])
    checkbox = _make_input("checkbox", input_id, entry.checked)
    insert_before(checkbox, _insertion_ref(first_anchor, inst.triggers))

    warnings: list[RewriteWarning] = []
    reachable: list[tuple[Element, Element]] = []  # (target, anchor)
    for target in inst.targets:
        anchor = _placement_anchor(target)
        if _sibling_reachable(checkbox, anchor):
            reachable.append((target, anchor))
        else:
            warnings.append(RewriteWarning(
                kind.value, "target not sibling-reachable from the shared control",
                node_path(target)))
    if not reachable:
        # roll the insertion back; nothing can be wired up
        remove(checkbox)
        return [], warnings or [RewriteWarning(kind.value, "no reachable target",
                                               _instance_path(inst))]

    for trigger in inst.triggers:
        _to_label(trigger, input_id, kind, prefix)

    origin = input_id
    rules: list[CssRule] = []
    for target, anchor in reachable:
        _mark(target, kind)
        anchor_sel = _selector_for(anchor, allocator, prefer_class=prefer)
        inner_sel = None if anchor is target else _selector_for(target, allocator,
                                                                prefer_class=prefer)
        if kind in (ComponentKind.ALERT, ComponentKind.TOAST):
            # visible until dismissed: checking the box hides the element
            rules.append(CssRule(_reach(input_id, anchor_sel, inner_sel),
                                 [("display", "none")], origin=origin))
        elif kind == ComponentKind.OFFCANVAS:
            rules.append(CssRule(_reach(input_id, anchor_sel, inner_sel, checked=False),
                                 [("visibility", "hidden")], origin=origin))
            rules.append(CssRule(_reach(input_id, anchor_sel, inner_sel),
                                 [("visibility", "visible"), ("transform", "none")],
                                 origin=origin))
        else:  # dropdown, collapse, modal
            rules.append(CssRule(_reach(input_id, anchor_sel, inner_sel, checked=False),
                                 [("display", "none")], origin=origin))
            rules.append(CssRule(_reach(input_id, anchor_sel, inner_sel),
                                 [("display", "block")], origin=origin))
        if kind == ComponentKind.MODAL:
            backdrop = Element("label", {
                "for": input_id,
                "class": BACKDROP_CLASS,
                "aria-label": "Close dialog",
            })
            target.children.insert(0, backdrop)
            backdrop.parent = target

    rules.append(_focus_ring_rule(input_id, origin))
    return rules, warnings


def _apply_popover(entry: PlanEntry, allocator: IdAllocator,
                   prefix: str) -> tuple[list[CssRule], list[RewriteWarning]]:
    inst = entry.instance
    input_id = entry.control_ids[0]
    trigger = inst.triggers[0]
    if trigger.parent is None or _in_head(trigger):
        raise TargetUnreachable("popover trigger has no usable position")

    title = trigger.attrs.get(f"{prefix}title") or trigger.attrs.get("title", "")
    content = (trigger.attrs.get(f"{prefix}content")
               or trigger.attrs.get("data-content", ""))
    placement = (trigger.attrs.get(f"{prefix}placement")
                 or trigger.attrs.get("data-placement", "top"))

    wrapper = Element("span", {"class": "jsrehab-popover-wrap", MARKER_ATTR: "popover"})
    wrap(trigger, wrapper)
    trigger.attrs.pop("title", None)
    trigger.attrs.pop(f"{prefix}title", None)
    trigger.attrs.pop(f"{prefix}content", None)
    trigger.attrs.pop("data-content", None)
    _to_label(trigger, input_id, ComponentKind.POPOVER, prefix)

    body = Element("span", {"class": "jsrehab-popover-body"})
    if title:
        heading = Element("strong")
        append_child(Text(title), heading)
        append_child(heading, body)
    if content:
        append_child(Text(content), body)
    checkbox = _make_input("checkbox", input_id, entry.checked)
    insert_before(checkbox, trigger)
    append_child(body, wrapper)

    origin = input_id
    side_prop, side_value = ("top", "100%") if placement == "bottom" else ("bottom", "100%")
    rules = [
        CssRule(".jsrehab-popover-wrap",
                [("position", "relative"), ("display", "inline-block")],
                origin=origin),
        CssRule(".jsrehab-popover-body",
                [("position", "absolute"), ("left", "0"),
                 ("background", "#fff"), ("color", "#212529"),
                 ("border", "1px solid rgba(0,0,0,.2)"),
                 ("border-radius", "4px"), ("padding", "6px 10px"),
                 ("min-width", "10rem"), ("z-index", "1070")],
                origin=origin),
        CssRule(_reach(input_id, ".jsrehab-popover-body", None, checked=False),
                [("display", "none"), (side_prop, side_value)], origin=origin),
        CssRule(_reach(input_id, ".jsrehab-popover-body", None),
                [("display", "block")], origin=origin),
        _focus_ring_rule(input_id, origin),
    ]
    return rules, []


def _apply_radio_panes(entry: PlanEntry, allocator: IdAllocator,
                       prefix: str) -> tuple[list[CssRule], list[RewriteWarning]]:
    """Tabs and accordions: one radio per pane, converted triggers select them."""
    inst = entry.instance
    kind = inst.kind
    mechanism = entry.mechanism
    panes = inst.targets

    if kind == ComponentKind.NAVS_TABS:
        container = panes[0].parent
        if container is None or container.kind != "element":
            raise TargetUnreachable("tab panes have no common container")
    else:
        container = _group_container(inst, panes)

    anchor = _placement_anchor(container)  # type: ignore[arg-type]
    anchor_sel = _selector_for(anchor, allocator)
    container_sel = None if anchor is container \
        else _selector_for(container, allocator)  # type: ignore[arg-type]

    pane_sels = [_selector_for(pane, allocator) for pane in panes]
    radios = [
        _make_input("radio", control_id, index == inst.active_index,
                    name=mechanism.group_name)
        for index, control_id in enumerate(entry.control_ids)
    ]
    ref = _insertion_ref(anchor, inst.triggers)
    for radio in radios:
        insert_before(radio, ref)

    for trigger, pane_index in zip(inst.triggers, _trigger_pane_indices(inst)):
        _to_label(trigger, entry.control_ids[pane_index], kind, prefix)
    for pane in panes:
        _mark(pane, kind)
    _mark(container, kind)  # type: ignore[arg-type]

    origin = entry.control_ids[0]
    rules = [CssRule(",".join(pane_sels), [("display", "none")], origin=origin)]
    for control_id, pane, pane_sel in zip(entry.control_ids, panes, pane_sels):
        if anchor is container:
            reach_sel = _reach(control_id, anchor_sel, pane_sel,
                               direct_child=pane.parent is container)
        else:
            joiner = " > " if pane.parent is container else " "
            reach_sel = _reach(control_id, anchor_sel,
                               f"{container_sel}{joiner}{pane_sel}".replace("  ", " "))
        rules.append(CssRule(reach_sel, [("display", "block")], origin=origin))
        rules.append(_focus_ring_rule(control_id, origin))
    return rules, []


def _group_container(inst: ComponentInstance, panes: list[Element]) -> Element:
    # prefer the ancestor whose id is the group key (the data-parent target)
    chain0 = [panes[0], *[a for a in ancestors(panes[0]) if a.kind == "element"]]
    for anc in chain0:
        if anc.attrs.get("id") == inst.group_key:  # type: ignore[union-attr]
            return anc  # type: ignore[return-value]
    # otherwise the nearest common ancestor of all panes
    other_chains = []
    for pane in panes[1:]:
        other_chains.append({id(n) for n in
                             [pane, *[a for a in ancestors(pane) if a.kind == "element"]]})
    for candidate in chain0:
        if all(id(candidate) in chain for chain in other_chains):
            return candidate  # type: ignore[return-value]
    raise TargetUnreachable("accordion panes share no common container")


def _trigger_pane_indices(inst: ComponentInstance) -> list[int]:
    # trigger i drives pane i; surplus triggers fall back to the last pane
    last = len(inst.targets) - 1
    return [min(i, last) for i in range(len(inst.triggers))]


def _apply_carousel(entry: PlanEntry, allocator: IdAllocator,
                    prefix: str) -> tuple[list[CssRule], list[RewriteWarning]]:
    inst = entry.instance
    slides = inst.targets
    inner = slides[0].parent
    if inner is None or inner.kind != "element":
        raise TargetUnreachable("carousel slides have no container")
    anchor = _placement_anchor(inner)  # type: ignore[arg-type]
    if anchor is not inner:
        raise TargetUnreachable("carousel slide container is not directly reachable")

    carousel: Element = inner  # type: ignore[assignment]
    for anc in ancestors(inner):
        if anc.kind == "element" and anc.has_class("carousel"):  # type: ignore[attr-defined]
            carousel = anc  # type: ignore[assignment]
            break

    inner_sel = _selector_for(inner, allocator)  # type: ignore[arg-type]
    carousel_sel = _selector_for(carousel, allocator)

    mechanism = entry.mechanism
    radios = [
        _make_input("radio", control_id, index == inst.active_index,
                    name=mechanism.group_name)
        for index, control_id in enumerate(entry.control_ids)
    ]
    for radio in radios:
        insert_before(radio, inner)

    slide_class = "carousel-item" if slides[0].has_class("carousel-item") else "item"
    slide_positions = [child_index(slide) + 1 for slide in slides]
    count = len(slides)

    # indicator buttons select their slide directly; each prev/next control
    # becomes one label per state so the wiring wraps around at the ends
    state_labels: list[tuple[int, str, str]] = []  # (state, for_id, css_class)
    for trigger in inst.triggers:
        slide_to = (trigger.attrs.get(f"{prefix}slide-to")
                    or trigger.attrs.get("data-slide-to"))
        direction = (trigger.attrs.get(f"{prefix}slide")
                     or trigger.attrs.get("data-slide"))
        if slide_to is not None and slide_to.isdigit() and int(slide_to) < count:
            _to_label(trigger, entry.control_ids[int(slide_to)],
                      ComponentKind.CAROUSEL, prefix)
        elif direction in ("prev", "next"):
            offset = -1 if direction == "prev" else 1
            css_class = f"jsrehab-carousel-{direction}"
            for index in range(count):
                clone = _clone_element(trigger)
                clone.add_class(css_class)
                _to_label(clone, entry.control_ids[(index + offset) % count],
                          ComponentKind.CAROUSEL, prefix)
                insert_before(clone, trigger)
                state_labels.append((index, clone.attrs["for"], css_class))
            remove(trigger)
        else:
            _to_label(trigger, entry.control_ids[0], ComponentKind.CAROUSEL, prefix)
    _mark(carousel, ComponentKind.CAROUSEL)

    origin = entry.control_ids[0]
    rules = [CssRule(f"{inner_sel} > .{slide_class}", [("display", "none")],
                     origin=origin)]
    for control_id, position in zip(entry.control_ids, slide_positions):
        rules.append(CssRule(
            _reach(control_id, inner_sel, f".{slide_class}:nth-child({position})",
                   direct_child=True),
            [("display", "block")], origin=origin))
        rules.append(_focus_ring_rule(control_id, origin))
    if state_labels:
        rules.append(CssRule(
            f"{carousel_sel} .jsrehab-carousel-prev,{carousel_sel} .jsrehab-carousel-next",
            [("display", "none")], origin=origin))
        for state, for_id, css_class in state_labels:
            control_id = entry.control_ids[state]
            for_sel = _attr_sel("for", for_id)
            sel = (f"#{control_id}:checked ~ label{for_sel}.{css_class},"
                   f"#{control_id}:checked ~ * label{for_sel}.{css_class}")
            rules.append(CssRule(sel, [("display", "block")], origin=origin))
    return rules, []


def _clone_element(el: Element) -> Element:
    clone = Element(el.tag, dict(el.attrs))
    for child in el.children:
        copied = _clone_node(child)
        clone.children.append(copied)
        copied.parent = clone
    return clone


def _clone_node(node: Node) -> Node:
    if node.kind == "element":
        return _clone_element(node)  # type: ignore[arg-type]
    if node.kind == "comment":
        return Comment(node.data)  # type: ignore[attr-defined]
    return Text(node.data if node.kind == "text" else "")  # type: ignore[attr-defined]


def _apply_fragment_tabs(entry: PlanEntry, allocator: IdAllocator,
                         prefix: str) -> tuple[list[CssRule], list[RewriteWarning]]:
    """Tabs driven by the URL fragment: panes respond to ``:target``."""
    inst = entry.instance
    panes = inst.targets
    pane_ids = [_ensure_id(pane, allocator) for pane in panes]

    for trigger, pane_index in zip(inst.triggers, _trigger_pane_indices(inst)):
        _drop_behavior_attrs(trigger, prefix)
        if trigger.tag != "a":
            rename(trigger, "a")
            trigger.attrs.pop("type", None)
        trigger.attrs["href"] = f"#{pane_ids[pane_index]}"
        trigger.attrs[MARKER_ATTR] = inst.kind.value
    for pane in panes:
        _mark(pane, inst.kind)

    origin = f"target-{pane_ids[0]}"
    rules: list[CssRule] = []
    for index, pane_id in enumerate(pane_ids):
        pane_sel = _id_selector(pane_id)
        if index != inst.active_index:
            # the default pane stays visible while nothing is targeted
            rules.append(CssRule(f"{pane_sel}:not(:target)",
                                 [("display", "none")], origin=origin))
        rules.append(CssRule(f"{pane_sel}:target", [("display", "block")],
                             origin=origin))
    return rules, []


def _apply_tooltip(entry: PlanEntry,
                   prefix: str) -> tuple[list[CssRule], list[RewriteWarning]]:
    inst = entry.instance
    trigger = inst.triggers[0]
    title = (trigger.attrs.get(f"{prefix}title")
             or trigger.attrs.get("data-original-title")
             or trigger.attrs.get("title", ""))
    _drop_behavior_attrs(trigger, prefix)
    for name in ("title", f"{prefix}title", "data-original-title"):
        trigger.attrs.pop(name, None)
    trigger.attrs[TOOLTIP_ATTR] = title
    trigger.attrs[MARKER_ATTR] = inst.kind.value
    if not _is_focusable(trigger):
        trigger.attrs["tabindex"] = "0"

    origin = f"tooltip-{node_path(trigger)}"
    return [
        CssRule(f"[{TOOLTIP_ATTR}]", [("position", "relative")], origin=origin),
        CssRule(
            f"[{TOOLTIP_ATTR}]:hover::after,[{TOOLTIP_ATTR}]:focus::after",
            [
                ("content", f"attr({TOOLTIP_ATTR})"),
                ("position", "absolute"),
                ("bottom", "100%"),
                ("left", "50%"),
                ("transform", "translateX(-50%)"),
                ("background", "rgba(0,0,0,.9)"),
                ("color", "#fff"),
                ("padding", "4px 8px"),
                ("border-radius", "4px"),
                ("white-space", "nowrap"),
                ("z-index", "1080"),
            ],
            origin=origin),
    ], []


def _apply_affix(entry: PlanEntry, allocator: IdAllocator,
                 prefix: str) -> tuple[list[CssRule], list[RewriteWarning]]:
    inst = entry.instance
    el = inst.targets[0]
    offset = el.attrs.get("data-offset-top", "0")
    try:
        offset_px = int(float(offset))
    except ValueError:
        offset_px = 0
    _drop_behavior_attrs(el, prefix)
    el.attrs.pop("data-offset-top", None)
    el.attrs.pop("data-offset-bottom", None)
    _mark(el, inst.kind)
    el_sel = _selector_for(el, allocator)
    return [CssRule(el_sel, [("position", "sticky"), ("top", f"{offset_px}px")],
                    origin=f"affix-{el_sel}")], []
