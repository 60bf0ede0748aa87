"""Bootstrap detection: framework version and component instances.

Version detection cannot read the runtime global a browser would expose, so
the evidence chain is static: script URL patterns, then banner comments in
script source, then markup heuristics. Every method that fires is logged as
evidence; the highest-priority one fixes the version.

Component scanning is a single tree walk keyed on the framework's declarative
data attributes (``data-toggle``/``data-bs-toggle`` and friends) plus the
container classes the framework requires. Subtrees already carrying the
``data-jsrehab`` marker are skipped so rewritten pages rescan to nothing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .dom import Document, Element, Node, element_children, id_map


class ComponentKind(Enum):
    ACCORDION = "accordion"
    AFFIX = "affix"
    ALERT = "alert"
    CAROUSEL = "carousel"
    COLLAPSE = "collapse"
    DROPDOWN = "dropdown"
    MODAL = "modal"
    NAVS_TABS = "navs-tabs"
    OFFCANVAS = "offcanvas"
    POPOVER = "popover"
    SCROLLSPY = "scrollspy"
    TOAST = "toast"
    TOOLTIP = "tooltip"
    TYPEAHEAD = "typeahead"


@dataclass
class Evidence:
    method: str  # ScriptUrl | BannerComment | MarkupHeuristic
    detail: str


@dataclass
class BootstrapProfile:
    detected: bool = False
    major: Optional[int] = None
    full_version: Optional[str] = None
    attr_prefix: str = "data-"
    evidence: list[Evidence] = field(default_factory=list)


@dataclass
class ComponentInstance:
    kind: ComponentKind
    triggers: list[Element] = field(default_factory=list)
    targets: list[Element] = field(default_factory=list)
    group_key: Optional[str] = None
    mechanism: object = None  # assigned by the planner
    initially_active: bool = False
    active_index: int = 0     # which pane/slide starts visible in grouped kinds
    warning: Optional[str] = None


# -- version detection -------------------------------------------------------

_URL_VERSION_PATTERNS = [
    re.compile(r"bootstrap@(\d+)\.(\d+)\.(\d+)"),
    re.compile(r"/(\d+)\.(\d+)\.(\d+)[^/]*/(?:js/)?bootstrap[^/]*\.js"),
    re.compile(r"bootstrap(?:\.bundle)?(?:\.min)?[.-](\d+)\.(\d+)\.(\d+)"),
    re.compile(r"bootstrap[^?]*\.js\?v=?(\d+)\.(\d+)\.(\d+)"),
]
_URL_NAME_PATTERN = re.compile(r"bootstrap[.-]", re.IGNORECASE)
_BANNER_PATTERN = re.compile(r"Bootstrap\s+v(\d+)\.(\d+)\.(\d+)")

_V4_CONTAINER_CLASSES = frozenset({
    "navbar", "carousel", "modal", "dropdown", "collapse", "alert",
    "accordion", "toast", "tooltip", "popover", "nav",
})
_TOGGLE_ATTRS_V4 = ("data-toggle", "data-dismiss", "data-ride", "data-spy", "data-slide")
_TOGGLE_ATTRS_V5 = ("data-bs-toggle", "data-bs-dismiss", "data-bs-ride", "data-bs-spy", "data-bs-slide")


def _script_url_evidence(doc: Document) -> tuple[list[Evidence], Optional[tuple[int, str]]]:
    evidence: list[Evidence] = []
    version: Optional[tuple[int, str]] = None
    for el in doc.iter_elements():
        if el.tag != "script":
            continue
        src = el.attrs.get("src", "")
        if not src or not _URL_NAME_PATTERN.search(src):
            continue
        matched = None
        for pattern in _URL_VERSION_PATTERNS:
            m = pattern.search(src)
            if m:
                matched = m
                break
        if matched:
            full = ".".join(matched.groups())
            evidence.append(Evidence("ScriptUrl", f"{src} -> v{full}"))
            if version is None:
                version = (int(matched.group(1)), full)
        else:
            evidence.append(Evidence("ScriptUrl", f"{src} (no version segment)"))
    return evidence, version


def _banner_evidence(doc: Document,
                     script_bodies: Optional[dict[str, str]]) -> tuple[list[Evidence], Optional[tuple[int, str]]]:
    evidence: list[Evidence] = []
    version: Optional[tuple[int, str]] = None
    sources: list[tuple[str, str]] = []
    if script_bodies:
        sources.extend(script_bodies.items())
    for el in doc.iter_elements():
        if el.tag == "script" and "src" not in el.attrs:
            text = "".join(c.data for c in el.children if c.kind == "text")
            if text:
                sources.append(("inline script", text))
    for label, body in sources:
        m = _BANNER_PATTERN.search(body)
        if m:
            full = ".".join(m.groups())
            evidence.append(Evidence("BannerComment", f"{label}: Bootstrap v{full}"))
            if version is None:
                version = (int(m.group(1)), full)
    return evidence, version


def _markup_evidence(doc: Document) -> tuple[list[Evidence], Optional[int], Optional[str]]:
    """Returns (evidence, major, attr_prefix) from markup alone."""
    saw_v5 = None
    saw_v4 = None
    for el in doc.iter_elements():
        if saw_v5 is None:
            for attr in _TOGGLE_ATTRS_V5:
                if attr in el.attrs:
                    saw_v5 = f"{attr}={el.attrs[attr]!r} on <{el.tag}>"
                    break
        if saw_v4 is None:
            for attr in _TOGGLE_ATTRS_V4:
                if attr in el.attrs and (
                        _V4_CONTAINER_CLASSES & set(el.classes())
                        or _has_container_context(el)):
                    saw_v4 = f"{attr}={el.attrs[attr]!r} with framework container class"
                    break
        if saw_v5 and saw_v4:
            break
    evidence: list[Evidence] = []
    if saw_v5:
        evidence.append(Evidence("MarkupHeuristic", saw_v5))
    if saw_v4:
        evidence.append(Evidence("MarkupHeuristic", saw_v4))
    if saw_v5:
        # v5 markers win when dialects coexist: mid-migration pages target
        # the newer runtime
        return evidence, 5, "data-bs-"
    if saw_v4:
        return evidence, None, "data-"  # some major <= 4; exact number unknowable
    return evidence, None, None


def _has_container_context(el: Element) -> bool:
    node: Optional[Node] = el
    while node is not None and node.kind == "element":
        if _V4_CONTAINER_CLASSES & set(node.classes()):  # type: ignore[attr-defined]
            return True
        node = node.parent
    return False


def detect_bootstrap(doc: Document,
                     script_bodies: Optional[dict[str, str]] = None) -> BootstrapProfile:
    profile = BootstrapProfile()

    url_evidence, url_version = _script_url_evidence(doc)
    banner_evidence, banner_version = _banner_evidence(doc, script_bodies)
    markup_evidence, markup_major, markup_prefix = _markup_evidence(doc)

    profile.evidence = [*url_evidence, *banner_evidence, *markup_evidence]
    profile.detected = bool(profile.evidence)

    if url_version is not None:
        profile.major, profile.full_version = url_version
    elif banner_version is not None:
        profile.major, profile.full_version = banner_version
    elif markup_major is not None:
        profile.major = markup_major

    if profile.major is not None:
        profile.attr_prefix = "data-bs-" if profile.major == 5 else "data-"
    elif markup_prefix is not None:
        profile.attr_prefix = markup_prefix
    else:
        # no version anywhere: infer the dialect from any data-bs-* attribute
        profile.attr_prefix = "data-bs-" if _any_bs_attr(doc) else "data-"
    return profile


def _any_bs_attr(doc: Document) -> bool:
    for el in doc.iter_elements():
        for name in el.attrs:
            if name.startswith("data-bs-"):
                return True
    return False


# -- component scanning ------------------------------------------------------

def _closest(el: Element, *classes: str) -> Optional[Element]:
    node: Optional[Node] = el
    while node is not None and node.kind == "element":
        if any(node.has_class(c) for c in classes):  # type: ignore[attr-defined]
            return node  # type: ignore[return-value]
        node = node.parent
    return None


def _following_sibling_with_class(el: Element, cls: str) -> Optional[Element]:
    if el.parent is None:
        return None
    seen = False
    for sibling in el.parent.children:
        if sibling is el:
            seen = True
        elif seen and sibling.kind == "element" and sibling.has_class(cls):  # type: ignore[attr-defined]
            return sibling  # type: ignore[return-value]
    return None


def _descendant_with_class(root: Element, cls: str) -> Optional[Element]:
    for el in root.iter_elements():
        if el is not root and el.has_class(cls):
            return el
    return None


def _is_active(el: Element) -> bool:
    classes = set(el.classes())
    return bool(classes & {"show", "in", "active"})


class _Scanner:
    def __init__(self, doc: Document, profile: BootstrapProfile) -> None:
        self.doc = doc
        self.prefix = profile.attr_prefix
        self.ids = id_map(doc)
        self.instances: list[ComponentInstance] = []
        # group accumulators
        self.accordions: dict[str, ComponentInstance] = {}
        self.tab_groups: dict[int, ComponentInstance] = {}
        self.tab_keys: dict[int, str] = {}
        self.group_counter = 0

    def attr(self, el: Element, name: str) -> Optional[str]:
        value = el.attrs.get(f"{self.prefix}{name}")
        if value is None and self.prefix == "data-bs-":
            # tolerate the older dialect on v5 pages; real sites mix them
            value = el.attrs.get(f"data-{name}")
        return value

    def resolve_target_ref(self, el: Element) -> list[Element]:
        """Resolve ``{prefix}target`` (or an anchor's ``href``) to elements."""
        ref = self.attr(el, "target") or ""
        if not ref:
            href = el.attrs.get("href", "")
            if href.startswith("#") and len(href) > 1:
                ref = href
        ref = ref.strip()
        if not ref:
            return []
        if ref.startswith("#") and " " not in ref:
            target = self.ids.get(ref[1:])
            return [target] if target is not None else []
        if ref.startswith("."):
            cls = ref[1:]
            return [e for e in self.doc.iter_elements() if e.has_class(cls)]
        return []

    def scan(self) -> list[ComponentInstance]:
        # the walk visits elements in document order, so the instance list is
        # already ordered by each instance's first trigger
        self._walk(self.doc)
        return self.instances

    def _walk(self, node: Node) -> None:
        if node.kind == "element":
            if "data-jsrehab" in node.attrs:  # type: ignore[attr-defined]
                return
            self._visit(node)  # type: ignore[arg-type]
        for child in node.children:
            self._walk(child)

    def _add(self, inst: ComponentInstance) -> None:
        self.instances.append(inst)

    def _visit(self, el: Element) -> None:
        toggle = self.attr(el, "toggle")
        dismiss = self.attr(el, "dismiss")
        classes = set(el.classes())

        if toggle == "dropdown":
            self._dropdown(el)
        elif toggle == "collapse":
            self._collapse(el)
        elif toggle == "modal":
            self._simple_target(el, ComponentKind.MODAL, "modal")
        elif toggle in ("tab", "pill", "list"):
            self._tab(el)
        elif toggle == "offcanvas":
            self._simple_target(el, ComponentKind.OFFCANVAS, "offcanvas")
        elif toggle == "popover":
            self._add(ComponentInstance(ComponentKind.POPOVER, triggers=[el], targets=[el]))
        elif toggle == "tooltip":
            self._add(ComponentInstance(ComponentKind.TOOLTIP, triggers=[el], targets=[el]))

        if "alert" in classes:
            self._dismissible(el, ComponentKind.ALERT, "alert")
        if "toast" in classes:
            self._dismissible(el, ComponentKind.TOAST, "toast")
        if "carousel" in classes:
            self._carousel(el)

        spy = self.attr(el, "spy") or el.attrs.get("data-spy")
        if spy == "affix":
            self._add(ComponentInstance(ComponentKind.AFFIX, triggers=[el], targets=[el]))
        elif spy == "scroll":
            self._add(ComponentInstance(
                ComponentKind.SCROLLSPY, triggers=[el], targets=[el]))

        if el.attrs.get("data-provide") == "typeahead":
            self._add(ComponentInstance(ComponentKind.TYPEAHEAD, triggers=[el], targets=[el]))

    # -- per-kind rules ------------------------------------------------------

    def _dropdown(self, el: Element) -> None:
        menu = _following_sibling_with_class(el, "dropdown-menu")
        if menu is None:
            container = _closest(el, "dropdown", "dropup", "dropend", "dropstart", "btn-group")
            if container is not None:
                menu = _descendant_with_class(container, "dropdown-menu")
        if menu is None:
            self._add(ComponentInstance(
                ComponentKind.DROPDOWN, triggers=[el],
                warning="dropdown trigger without a resolvable .dropdown-menu"))
            return
        self._add(ComponentInstance(
            ComponentKind.DROPDOWN, triggers=[el], targets=[menu],
            initially_active=menu.has_class("show")))

    def _collapse(self, el: Element) -> None:
        targets = self.resolve_target_ref(el)
        parent_ref = (el.attrs.get(f"{self.prefix}parent")
                      or el.attrs.get("data-parent") or "")
        accordion = _closest(el, "accordion")
        if parent_ref.startswith("#"):
            group_el = self.ids.get(parent_ref[1:])
        elif accordion is not None:
            group_el = accordion
        else:
            group_el = None

        if group_el is not None:
            key = group_el.attrs.get("id") or self._fresh_key("accordion")
            inst = self.accordions.get(key)
            if inst is None:
                inst = ComponentInstance(ComponentKind.ACCORDION, group_key=key)
                self.accordions[key] = inst
                self._add(inst)
            inst.triggers.append(el)
            for target in targets:
                if target not in inst.targets:
                    if _is_active(target):
                        inst.active_index = len(inst.targets)
                        inst.initially_active = True
                    inst.targets.append(target)
            if not inst.targets:
                inst.warning = "accordion sections without resolvable panes"
            else:
                inst.warning = None
            return

        if not targets:
            self._add(ComponentInstance(
                ComponentKind.COLLAPSE, triggers=[el],
                warning="collapse trigger without a resolvable target"))
            return
        self._add(ComponentInstance(
            ComponentKind.COLLAPSE, triggers=[el], targets=targets,
            initially_active=any(_is_active(t) for t in targets)))

    def _simple_target(self, el: Element, kind: ComponentKind, container_class: str) -> None:
        targets = [t for t in self.resolve_target_ref(el)
                   if t.has_class(container_class)]
        if not targets:
            self._add(ComponentInstance(
                kind, triggers=[el],
                warning=f"{kind.value} trigger without a resolvable .{container_class} target"))
            return
        self._add(ComponentInstance(
            kind, triggers=[el], targets=targets,
            initially_active=any(_is_active(t) for t in targets)))

    def _tab(self, el: Element) -> None:
        panes = self.resolve_target_ref(el)
        container = _closest(el, "nav", "nav-tabs", "nav-pills", "list-group")
        if container is None and el.parent is not None and el.parent.kind == "element":
            container = el.parent  # type: ignore[assignment]
        key = id(container) if container is not None else id(el)
        inst = self.tab_groups.get(key)
        if inst is None:
            group_name = (container.attrs.get("id") if container is not None else None) \
                or self._fresh_key("tabs")
            inst = ComponentInstance(ComponentKind.NAVS_TABS, group_key=group_name)
            self.tab_groups[key] = inst
            self._add(inst)
        inst.triggers.append(el)
        for pane in panes:
            if pane not in inst.targets:
                if _is_active(pane) or _is_active(el):
                    inst.active_index = len(inst.targets)
                inst.targets.append(pane)
        if not inst.targets:
            inst.warning = "tab triggers without resolvable panes"
        else:
            inst.warning = None

    def _dismissible(self, el: Element, kind: ComponentKind, value: str) -> None:
        button = None
        for desc in el.iter_elements():
            if desc is not el and self.attr(desc, "dismiss") == value:
                button = desc
                break
        if button is None:
            return  # not a JS-driven occurrence: nothing to rehabilitate
        self._add(ComponentInstance(
            kind, triggers=[button], targets=[el],
            initially_active=False))

    def _carousel(self, el: Element) -> None:
        inner = _descendant_with_class(el, "carousel-inner")
        slides = [c for c in element_children(inner)] if inner is not None else []
        slides = [s for s in slides if s.has_class("carousel-item") or s.has_class("item")]
        if not slides:
            self._add(ComponentInstance(
                ComponentKind.CAROUSEL, triggers=[el],
                warning="carousel without .carousel-item slides"))
            return
        triggers: list[Element] = []
        for desc in el.iter_elements():
            if desc is el:
                continue
            if self.attr(desc, "slide") is not None or self.attr(desc, "slide-to") is not None:
                triggers.append(desc)
        active = next((i for i, s in enumerate(slides) if _is_active(s)), 0)
        key = el.attrs.get("id") or self._fresh_key("carousel")
        self._add(ComponentInstance(
            ComponentKind.CAROUSEL, triggers=triggers, targets=slides,
            group_key=key, active_index=active, initially_active=True))

    def _fresh_key(self, base: str) -> str:
        self.group_counter += 1
        return f"jsrehab-{base}-{self.group_counter}"


def scan_components(doc: Document, profile: BootstrapProfile) -> list[ComponentInstance]:
    """Enumerate component occurrences; deterministic and in document order
    of each instance's first trigger."""
    return _Scanner(doc, profile).scan()


def component_stats(pages: Iterable[list[ComponentInstance]]) -> dict[str, dict]:
    """Pages containing each kind at least once, with fractions."""
    counts = {kind: 0 for kind in ComponentKind}
    total = 0
    for instances in pages:
        total += 1
        present = {inst.kind for inst in instances}
        for kind in present:
            counts[kind] += 1
    return {
        kind.value: {
            "pages": counts[kind],
            "fraction": (counts[kind] / total) if total else 0.0,
        }
        for kind in ComponentKind
    }
