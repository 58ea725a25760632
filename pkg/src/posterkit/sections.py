"""Grouping a poster's elements into named sections.

Posters are dense stacks of related elements (a section title, its body
text, its figures). High-level edit operations target sections by name,
so section inference has to be deterministic: the ``native`` policy
mirrors the deck's own group elements, the ``spatial`` policy clusters
loose elements by proximity (single linkage, threshold = 2% of the
canvas diagonal, ties broken by lowest element id).
"""

from __future__ import annotations

import math

from .model import (
    DeckDocument,
    Element,
    Geometry,
    Section,
    SectionMap,
    Slide,
    id_sort_key,
    union_geometry,
)

LINK_THRESHOLD_FRACTION = 0.02


def _is_decorative(el: Element, slide: Slide) -> bool:
    """Background plates and zero-area lines are not section members."""
    if el.kind != "shape" or el.text is not None:
        return False
    area = el.geometry.width * el.geometry.height
    canvas_area = slide.width * slide.height
    return area == 0 or area >= canvas_area * 0.5


def _gap_distance(a: Geometry, b: Geometry) -> float:
    dx = max(0, max(a.x, b.x) - min(a.x2, b.x2))
    dy = max(0, max(a.y, b.y) - min(a.y2, b.y2))
    return math.hypot(dx, dy)


def _section_name(member_ids: list[str], slide: Slide, ordinal: int) -> str:
    """Text of the top-most textbox carrying the cluster's largest font."""
    best: tuple[tuple, str] | None = None  # ((y, id-key), text)
    largest = -1
    for eid in member_ids:
        el = slide.elements[eid]
        if el.text is None:
            continue
        for run in el.text.iter_runs():
            size = run.style.size_half_points or 0
            largest = max(largest, size)
    for eid in sorted(member_ids, key=id_sort_key):
        el = slide.elements[eid]
        if el.kind != "textbox" or el.text is None:
            continue
        text = el.text.plain_text.strip()
        if not text:
            continue
        size = max((r.style.size_half_points or 0 for r in el.text.iter_runs()), default=0)
        if size != largest:
            continue
        key = (el.geometry.y, *id_sort_key(eid))
        if best is None or key < best[0]:
            best = (key, text)
    if best is not None:
        return best[1].splitlines()[0]
    return f"untitled-{ordinal}"


def _native_sections(slide: Slide) -> list[Section]:
    sections = []
    ordinal = 0
    for eid in slide.paint_order():
        el = slide.elements[eid]
        if not el.is_group:
            continue
        members = [eid] + slide.descendants(eid)
        name = el.name or _section_name(members, slide, ordinal)
        sections.append(Section(
            name=name,
            member_ids=sorted(members, key=id_sort_key),
            bounding_box=union_geometry([slide.elements[m].geometry for m in members]),
        ))
        ordinal += 1
    return sections


def _spatial_sections(slide: Slide) -> list[Section]:
    candidates = [
        eid for eid in slide.top_level_ids()
        if not _is_decorative(slide.elements[eid], slide)
    ]
    if not candidates:
        return []
    threshold = LINK_THRESHOLD_FRACTION * math.hypot(slide.width, slide.height)

    parent = {eid: eid for eid in candidates}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def link(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            # Deterministic union: lower id becomes the root.
            lo, hi = sorted((ra, rb), key=id_sort_key)
            parent[hi] = lo

    for i, a in enumerate(candidates):
        for b in candidates[i + 1:]:
            if _gap_distance(slide.elements[a].geometry, slide.elements[b].geometry) <= threshold:
                link(a, b)

    clusters: dict[str, list[str]] = {}
    for eid in candidates:
        clusters.setdefault(find(eid), []).append(eid)

    sections = []
    ordered_roots = sorted(clusters, key=id_sort_key)
    for ordinal, root in enumerate(ordered_roots):
        members = clusters[root]
        expanded: list[str] = []
        for m in members:
            expanded.append(m)
            expanded.extend(slide.descendants(m))
        members = sorted(set(expanded), key=id_sort_key)
        sections.append(Section(
            name=_section_name(members, slide, ordinal),
            member_ids=members,
            bounding_box=union_geometry([slide.elements[m].geometry for m in members]),
        ))
    return sections


def infer_sections(doc: DeckDocument, policy: str = "native", slide: int = 0) -> SectionMap:
    """Build the section map for one slide.

    policy="native" mirrors the deck's group elements; policy="spatial"
    clusters top-level elements by bounding-box proximity. An empty deck
    yields an empty map either way.
    """
    if policy not in ("native", "spatial"):
        raise ValueError(f"unknown section policy {policy!r}")
    if slide >= len(doc.slides):
        return SectionMap()
    s = doc.slides[slide]
    if not s.elements:
        return SectionMap()
    if policy == "native":
        return SectionMap(_native_sections(s))
    return SectionMap(_spatial_sections(s))


def resolve_section_members(doc: DeckDocument, name: str, slide: int = 0) -> list[str]:
    """Section name -> member ids; native groups first, spatial fallback."""
    for policy in ("native", "spatial"):
        section = infer_sections(doc, policy, slide).by_name(name)
        if section is not None:
            return list(section.member_ids)
    return []
