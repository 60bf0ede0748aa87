"""Interactivity verification: prove rewritten components actually respond.

Runs the rewrite, then drives the state simulator through the interaction
space of every planned instance: checkbox toggling must flip target
visibility, radio groups must show exactly one pane in every reachable state
(checked exhaustively), tooltips must answer to both hover and focus, and the
whole result must pass the accessibility lints.
"""

from __future__ import annotations

from typing import Optional

from .a11y import lint_accessibility
from .components import (
    CheckboxToggle,
    HoverFocus,
    PlanEntry,
    RadioGroup,
    StickyPosition,
    UrlFragmentTarget,
)
from .cssgen import CssRule, base_stylesheet
from .detect import ComponentKind
from .dom import Document, Element, ancestors, node_path, parse_html
from .rewrite import RewriteConfig, rewrite_tree
from .statesim import (
    StateAssignment,
    evaluate,
    hover_set,
    initial_state,
    is_visible,
    matches_under_state,
    toggle,
)


def tooltip_content_visible(trigger: Element, rules: list[CssRule],
                            state: StateAssignment) -> bool:
    """Does any generated-content rule fire on ``trigger`` under ``state``?"""
    for rule in rules:
        has_content = any(prop == "content" for prop, _ in rule.declarations)
        if not has_content:
            continue
        for alt in rule.selector.alternatives:
            if alt.parts[-1][1].pseudo_element is None:
                continue
            if matches_under_state(trigger, alt, state):
                return True
    return False


def _warned_paths(warnings) -> set[str]:
    return {w.path for w in warnings}


def _popover_bodies(trigger: Element) -> list[Element]:
    wrapper = trigger.parent
    if wrapper is None or wrapper.kind != "element":
        return []
    return [c for c in wrapper.children
            if c.kind == "element" and c.has_class("jsrehab-popover-body")]  # type: ignore[attr-defined]


def verify_document(doc: Document, config: Optional[RewriteConfig] = None) -> list[str]:
    """Rewrite ``doc`` in place and return interactivity/lint failures."""
    if config is None:
        config = RewriteConfig()
    profile, plan, rules = rewrite_tree(doc, config)
    all_rules = [*base_stylesheet(), *rules]
    failures: list[str] = []
    skip_paths = _warned_paths(plan.warnings)

    # element -> the control that reveals it, so nested components can be
    # tested the way a user reaches them (open the navbar, then the dropdown)
    containment: dict[int, str] = {}
    for entry in plan.entries:
        if isinstance(entry.mechanism, CheckboxToggle):
            for target in entry.instance.targets:
                containment[id(target)] = entry.control_ids[0]
        elif isinstance(entry.mechanism, RadioGroup):
            for control_id, pane in zip(entry.control_ids, entry.instance.targets):
                containment[id(pane)] = control_id

    for entry in plan.entries:
        failures.extend(_verify_entry(doc, entry, all_rules, skip_paths, containment))

    failures.extend(lint_accessibility(doc, all_rules))
    return failures


def _opened_context(doc: Document, el: Element, containment: dict[int, str],
                    exclude: frozenset[str]) -> StateAssignment:
    """Initial state with every component enclosing ``el`` switched open."""
    state = initial_state(doc)
    for anc in ancestors(el):
        control = containment.get(id(anc))
        if control and control not in exclude and control not in state.checked:
            state = toggle(doc, state, control)
    return state


def _verify_entry(doc: Document, entry: PlanEntry, rules: list[CssRule],
                  skip_paths: set[str], containment: dict[int, str]) -> list[str]:
    inst = entry.instance
    kind = inst.kind
    failures: list[str] = []

    if isinstance(entry.mechanism, CheckboxToggle):
        control = entry.control_ids[0]
        own = frozenset(entry.control_ids)
        if kind == ComponentKind.POPOVER:
            # the toggled element is the generated body, not the trigger
            targets = _popover_bodies(inst.triggers[0])
        else:
            targets = inst.targets
        flipped_any = False
        for target in targets:
            if node_path(target) in skip_paths:
                continue
            base = _opened_context(doc, target, containment, own)
            toggled = toggle(doc, base, control)
            before = is_visible(doc, evaluate(doc, rules, base), target)
            after = is_visible(doc, evaluate(doc, rules, toggled), target)
            if before != after:
                flipped_any = True
            else:
                failures.append(
                    f"{kind.value}: toggling #{control} leaves {node_path(target)} "
                    f"visibility unchanged ({before})")
        if targets and not flipped_any and not failures:
            failures.append(f"{kind.value}: control #{control} drives no target")

    elif isinstance(entry.mechanism, RadioGroup):
        panes = inst.targets
        own = frozenset(entry.control_ids)
        base = _opened_context(doc, panes[0], containment, own)
        for index, control in enumerate(entry.control_ids):
            state = toggle(doc, base, control)
            vmap = evaluate(doc, rules, state)
            visible = [p for p in panes if is_visible(doc, vmap, p)]
            if len(visible) != 1:
                failures.append(
                    f"{kind.value}: state #{control} shows {len(visible)} panes, "
                    f"expected exactly 1")
            elif visible[0] is not panes[index]:
                failures.append(
                    f"{kind.value}: state #{control} shows the wrong pane")
        # before any interaction exactly one pane is open as well
        vmap0 = evaluate(doc, rules, base)
        visible0 = [p for p in panes if is_visible(doc, vmap0, p)]
        if len(visible0) != 1:
            failures.append(
                f"{kind.value}: initial state shows {len(visible0)} panes, "
                f"expected exactly 1")

    elif isinstance(entry.mechanism, HoverFocus):
        trigger = inst.triggers[0]
        idle = initial_state(doc)
        hovered = StateAssignment(checked=idle.checked, hovered=hover_set(trigger))
        focused = StateAssignment(checked=idle.checked, focused=trigger)
        if tooltip_content_visible(trigger, rules, idle):
            failures.append(f"{kind.value}: content visible with no interaction")
        if not tooltip_content_visible(trigger, rules, hovered):
            failures.append(f"{kind.value}: content not shown on hover")
        if not tooltip_content_visible(trigger, rules, focused):
            failures.append(f"{kind.value}: content not shown on focus")

    elif isinstance(entry.mechanism, UrlFragmentTarget):
        panes = inst.targets
        base = initial_state(doc)
        for index, pane in enumerate(panes):
            pane_id = pane.attrs.get("id", "")
            state = StateAssignment(checked=base.checked, fragment=pane_id)
            vmap = evaluate(doc, rules, state)
            if not is_visible(doc, vmap, pane):
                failures.append(f"{kind.value}: pane #{pane_id} not shown when targeted")
            for other_index, other in enumerate(panes):
                if other is pane or other_index == inst.active_index:
                    continue
                if is_visible(doc, vmap, other):
                    failures.append(
                        f"{kind.value}: pane #{other.attrs.get('id')} visible while "
                        f"#{pane_id} is targeted")

    elif isinstance(entry.mechanism, StickyPosition):
        found = any(
            ("position", "sticky") in rule.declarations for rule in rules)
        if not found:
            failures.append(f"{kind.value}: no sticky-position rule emitted")

    return failures


def check_bytes(data: bytes, config: Optional[RewriteConfig] = None) -> list[str]:
    """Parse, rewrite, and verify raw HTML; the CLI `check` entry point."""
    doc = parse_html(data)
    return verify_document(doc, config)
