"""Element-level diff between two decks.

Diffs drive the review stage (which only wants to look at what changed)
and the locality checks on edit operations. Paths are dotted attribute
paths into the canonical element dict, e.g. ``geometry.x`` or
``text.paragraphs[0].runs[1].style.bold``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import DeckDocument, id_sort_key
from .canonical import element_to_dict


@dataclass
class ElementDiffSet:
    added: list[str] = field(default_factory=list)
    removed: list[str] = field(default_factory=list)
    modified: dict[str, list[str]] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.modified)

    def touched_ids(self) -> set[str]:
        return set(self.added) | set(self.removed) | set(self.modified)

    def to_dict(self) -> dict:
        return {
            "added": list(self.added),
            "removed": list(self.removed),
            "modified": {k: list(v) for k, v in self.modified.items()},
        }


def _value_paths(prefix: str, a, b, out: list[str]) -> None:
    if a == b:
        return
    if isinstance(a, dict) and isinstance(b, dict) and set(a) == set(b):
        for key in sorted(a):
            sub = f"{prefix}.{key}" if prefix else key
            _value_paths(sub, a[key], b[key], out)
        return
    if isinstance(a, list) and isinstance(b, list) and len(a) == len(b):
        for i, (av, bv) in enumerate(zip(a, b)):
            _value_paths(f"{prefix}[{i}]", av, bv, out)
        return
    out.append(prefix)


def element_change_paths(before_dict: dict, after_dict: dict) -> list[str]:
    """Every attribute path whose value differs between the two elements."""
    paths: list[str] = []
    _value_paths("", before_dict, after_dict, paths)
    return paths


def diff(before: DeckDocument, after: DeckDocument, slide: int = 0) -> ElementDiffSet:
    """Compare one slide of two decks (slide 0 holds the poster)."""
    b = before.slides[slide] if slide < len(before.slides) else None
    a = after.slides[slide] if slide < len(after.slides) else None
    b_ids = set(b.elements) if b else set()
    a_ids = set(a.elements) if a else set()

    result = ElementDiffSet(
        added=sorted(a_ids - b_ids, key=id_sort_key),
        removed=sorted(b_ids - a_ids, key=id_sort_key),
    )
    for eid in sorted(b_ids & a_ids, key=id_sort_key):
        paths = element_change_paths(
            element_to_dict(b.elements[eid]),
            element_to_dict(a.elements[eid]),
        )
        if paths:
            result.modified[eid] = paths
    return result
