"""Typed in-memory representation of a poster deck.

A deck is an ordered list of slides; each slide holds an ID-indexed map of
elements plus a z-sorted root order. All geometry is integer EMU
(914,400 EMU per inch); font sizes are stored as integer half-points to
avoid float drift. Decks are values: every mutation path works on a copy.
"""

from __future__ import annotations

import copy
import hashlib
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

EMU_PER_INCH = 914400

ELEMENT_KINDS = ("textbox", "image", "shape", "group")
ALIGNMENTS = ("left", "center", "right", "justify")

_COLOR_RE = re.compile(r"^[0-9A-F]{6}$")
_ID_NUM_RE = re.compile(r"(\d+)$")


class DeckInvariantError(ValueError):
    """A deck violates one of its structural invariants."""


def is_valid_color(value: str) -> bool:
    return bool(_COLOR_RE.match(value))


def normalize_color(value: str) -> str:
    """Accept 'rrggbb' / '#RRGGBB' style input, return canonical 'RRGGBB'."""
    v = value.strip().lstrip("#").upper()
    if not is_valid_color(v):
        raise ValueError(f"not an RGB hex color: {value!r}")
    return v


def id_sort_key(element_id: str) -> tuple:
    """Natural sort key so 'e9' orders before 'e10'."""
    m = _ID_NUM_RE.search(element_id)
    if m:
        return (element_id[: m.start()], int(m.group(1)))
    return (element_id, -1)


@dataclass
class Geometry:
    """Axis-aligned placement in EMU plus rotation in degrees."""

    x: int
    y: int
    width: int
    height: int
    rotation: float = 0.0

    def __post_init__(self) -> None:
        if self.width < 0 or self.height < 0:
            raise DeckInvariantError(
                f"negative extent: width={self.width} height={self.height}"
            )

    @property
    def x2(self) -> int:
        return self.x + self.width

    @property
    def y2(self) -> int:
        return self.y + self.height

    def translated(self, dx: int, dy: int) -> "Geometry":
        return Geometry(self.x + dx, self.y + dy, self.width, self.height, self.rotation)

    def union(self, other: "Geometry") -> "Geometry":
        x = min(self.x, other.x)
        y = min(self.y, other.y)
        return Geometry(
            x,
            y,
            max(self.x2, other.x2) - x,
            max(self.y2, other.y2) - y,
        )

    def intersects(self, other: "Geometry") -> bool:
        return (
            self.x < other.x2
            and other.x < self.x2
            and self.y < other.y2
            and other.y < self.y2
        )


def union_geometry(geoms: list[Geometry]) -> Geometry:
    if not geoms:
        raise ValueError("union of zero geometries")
    out = geoms[0]
    for g in geoms[1:]:
        out = out.union(g)
    return Geometry(out.x, out.y, out.width, out.height)


@dataclass
class TextStyle:
    """Run-level style. Unset fields mean 'inherit from layout/master'."""

    font_family: Optional[str] = None
    size_half_points: Optional[int] = None
    bold: Optional[bool] = None
    italic: Optional[bool] = None
    underline: Optional[bool] = None
    color: Optional[str] = None

    def __post_init__(self) -> None:
        if self.color is not None and not is_valid_color(self.color):
            raise DeckInvariantError(f"bad color {self.color!r} (want RRGGBB)")
        if self.size_half_points is not None and self.size_half_points <= 0:
            raise DeckInvariantError("size_half_points must be positive")

    @property
    def size_points(self) -> Optional[float]:
        if self.size_half_points is None:
            return None
        return self.size_half_points / 2.0

    def is_unset(self) -> bool:
        return all(
            getattr(self, f) is None
            for f in ("font_family", "size_half_points", "bold", "italic", "underline", "color")
        )


def style_from_points(size_points: Optional[float] = None, **kwargs) -> TextStyle:
    """Build a TextStyle taking the size in points (half-point resolution)."""
    hp = None
    if size_points is not None:
        hp = int(round(size_points * 2))
    return TextStyle(size_half_points=hp, **kwargs)


@dataclass
class TextRun:
    text: str
    style: TextStyle = field(default_factory=TextStyle)


@dataclass
class Paragraph:
    runs: list[TextRun] = field(default_factory=list)
    alignment: Optional[str] = None
    bullet: Optional[str] = None

    def __post_init__(self) -> None:
        if self.alignment is not None and self.alignment not in ALIGNMENTS:
            raise DeckInvariantError(f"bad alignment {self.alignment!r}")

    @property
    def plain_text(self) -> str:
        return "".join(r.text for r in self.runs)


@dataclass
class TextContent:
    paragraphs: list[Paragraph] = field(default_factory=list)

    @property
    def plain_text(self) -> str:
        return "\n".join(p.plain_text for p in self.paragraphs)

    def iter_runs(self) -> Iterator[TextRun]:
        for p in self.paragraphs:
            yield from p.runs


@dataclass
class ImageRef:
    """Reference to a deck asset plus the image's natural width:height ratio."""

    asset_key: str
    natural_aspect: float = 1.0

    def __post_init__(self) -> None:
        if self.natural_aspect <= 0:
            raise DeckInvariantError("natural_aspect must be positive")


@dataclass
class ShapeStyle:
    fill_color: Optional[str] = None
    border_color: Optional[str] = None
    border_width: Optional[int] = None  # EMU
    preset: Optional[str] = None

    def __post_init__(self) -> None:
        for c in (self.fill_color, self.border_color):
            if c is not None and not is_valid_color(c):
                raise DeckInvariantError(f"bad color {c!r} (want RRGGBB)")
        if self.border_width is not None and self.border_width < 0:
            raise DeckInvariantError("border_width must be >= 0")


@dataclass
class Element:
    """One addressable item on a slide.

    ``opaque_payload`` keeps the element's source XML fragment so content the
    model does not understand survives an edit/save cycle verbatim.
    """

    id: str
    kind: str
    geometry: Geometry
    z_index: int = 0
    name: Optional[str] = None
    text: Optional[TextContent] = None
    image: Optional[ImageRef] = None
    shape: Optional[ShapeStyle] = None
    children: Optional[list[str]] = None
    opaque_payload: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in ELEMENT_KINDS:
            raise DeckInvariantError(f"unknown element kind {self.kind!r}")

    @property
    def is_group(self) -> bool:
        return self.kind == "group"


@dataclass
class Asset:
    """Binary media carried by the deck. Equality is by content digest."""

    media_type: str
    data: Optional[bytes] = None
    digest: Optional[str] = None
    size: int = 0
    natural_size: Optional[tuple[int, int]] = None

    def __post_init__(self) -> None:
        if self.data is not None:
            self.digest = "sha256:" + hashlib.sha256(self.data).hexdigest()
            self.size = len(self.data)
        if self.digest is None:
            raise DeckInvariantError("asset needs data or a digest")


@dataclass
class Slide:
    width: int
    height: int
    elements: dict[str, Element] = field(default_factory=dict)
    root_order: list[str] = field(default_factory=list)

    def parent_of(self, element_id: str) -> Optional[str]:
        for el in self.elements.values():
            if el.children and element_id in el.children:
                return el.id
        return None

    def sibling_order(self, element_id: str) -> list[str]:
        """The z-ordered list the element lives in (root order or a group)."""
        parent = self.parent_of(element_id)
        if parent is None:
            return self.root_order
        children = self.elements[parent].children
        assert children is not None
        return children

    def paint_order(self) -> list[str]:
        """Depth-first document order: the order elements are painted."""
        out: list[str] = []

        def walk(ids: list[str]) -> None:
            for eid in ids:
                out.append(eid)
                el = self.elements.get(eid)
                if el is not None and el.children:
                    walk(el.children)

        walk(self.root_order)
        return out

    def renumber_z(self) -> None:
        """Reassign gap-free z_index values following paint order."""
        for z, eid in enumerate(self.paint_order()):
            self.elements[eid].z_index = z

    def descendants(self, element_id: str) -> list[str]:
        el = self.elements[element_id]
        out: list[str] = []
        if el.children:
            for c in el.children:
                out.append(c)
                out.extend(self.descendants(c))
        return out

    def top_level_ids(self) -> list[str]:
        return list(self.root_order)


@dataclass
class DeckDocument:
    """The whole poster: slides, media assets, and provenance."""

    slides: list[Slide] = field(default_factory=list)
    assets: dict[str, Asset] = field(default_factory=dict)
    source_digest: Optional[str] = None
    next_id: int = 1

    def new_id(self) -> str:
        eid = f"e{self.next_id}"
        self.next_id += 1
        return eid

    def slide(self, index: int = 0) -> Slide:
        return self.slides[index]

    def element(self, element_id: str, slide: int = 0) -> Optional[Element]:
        if slide >= len(self.slides):
            return None
        return self.slides[slide].elements.get(element_id)

    def copy(self) -> "DeckDocument":
        return copy.deepcopy(self)


def validate_deck(doc: DeckDocument) -> None:
    """Raise DeckInvariantError on the first violated structural invariant."""
    for si, slide in enumerate(doc.slides):
        where = f"slides[{si}]"
        if slide.width <= 0 or slide.height <= 0:
            raise DeckInvariantError(f"{where}: non-positive canvas size")
        seen_parent: dict[str, str] = {}
        for eid, el in slide.elements.items():
            ewhere = f"{where}.elements[{eid}]"
            if el.id != eid:
                raise DeckInvariantError(f"{ewhere}: key/id mismatch ({el.id!r})")
            if el.kind == "textbox" and el.text is None:
                raise DeckInvariantError(f"{ewhere}: textbox without text")
            if el.kind == "image" and el.image is None:
                raise DeckInvariantError(f"{ewhere}: image without image_ref")
            if el.kind == "group":
                if not el.children:
                    raise DeckInvariantError(f"{ewhere}: group with no children")
            elif el.children:
                raise DeckInvariantError(f"{ewhere}: children on non-group")
            if el.image is not None and el.image.asset_key not in doc.assets:
                raise DeckInvariantError(
                    f"{ewhere}: unknown asset key {el.image.asset_key!r}"
                )
            if el.children:
                for ci, cid in enumerate(el.children):
                    cwhere = f"{ewhere}.children[{ci}]"
                    if cid not in slide.elements:
                        raise DeckInvariantError(f"{cwhere}: dangling id {cid!r}")
                    if cid in seen_parent:
                        raise DeckInvariantError(
                            f"{cwhere}: {cid!r} has two parents "
                            f"({seen_parent[cid]!r} and {eid!r})"
                        )
                    seen_parent[cid] = eid
        for ri, rid in enumerate(slide.root_order):
            if rid not in slide.elements:
                raise DeckInvariantError(f"{where}.root_order[{ri}]: dangling id {rid!r}")
            if rid in seen_parent:
                raise DeckInvariantError(
                    f"{where}.root_order[{ri}]: {rid!r} is both root and child of "
                    f"{seen_parent[rid]!r}"
                )
        reachable = set(slide.paint_order())
        if len(reachable) != len(slide.elements):
            missing = sorted(set(slide.elements) - reachable, key=id_sort_key)
            extra = [e for e in slide.paint_order() if slide.paint_order().count(e) > 1]
            if extra:
                raise DeckInvariantError(f"{where}: element painted twice: {extra[0]!r}")
            raise DeckInvariantError(f"{where}: unreachable elements {missing}")
        z_seen: dict[int, str] = {}
        for eid in reachable:
            z = slide.elements[eid].z_index
            if z in z_seen:
                raise DeckInvariantError(
                    f"{where}: duplicate z_index {z} on {z_seen[z]!r} and {eid!r}"
                )
            z_seen[z] = eid


@dataclass
class Section:
    name: str
    member_ids: list[str]
    bounding_box: Geometry


@dataclass
class SectionMap:
    sections: list[Section] = field(default_factory=list)

    def by_name(self, name: str) -> Optional[Section]:
        for s in self.sections:
            if s.name == name:
                return s
        return None
