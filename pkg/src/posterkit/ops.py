"""The multi-level edit operation registry.

Exactly fourteen operations form the whole mutation surface of a deck:
ten low-level single-element operations and four high-level group/batch
operations. Every call is validated against the current deck before it
is applied; application is atomic (a failing call leaves the deck
untouched) and local (only declared targets change).
"""

from __future__ import annotations

import base64
import binascii
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Optional

from PIL import Image

from .diffing import diff
from .model import (
    ALIGNMENTS,
    Asset,
    DeckDocument,
    Element,
    Geometry,
    ImageRef,
    Paragraph,
    ShapeStyle,
    Slide,
    TextContent,
    TextRun,
    TextStyle,
    id_sort_key,
    is_valid_color,
    normalize_color,
    union_geometry,
    validate_deck,
)
from .sections import resolve_section_members

BRUSH_ATTRIBUTES = ("font_family", "size", "bold", "italic", "underline", "color",
                    "alignment")
ALIGN_MODES = ("align-left", "align-right", "align-top", "align-bottom", "align-center",
               "distribute-horizontal", "distribute-vertical")
Z_TARGETS = ("front", "back")


@dataclass
class ApiParam:
    name: str
    type: str
    required: bool = True
    default: object = None
    doc: str = ""


@dataclass
class ApiSpec:
    name: str
    level: str  # "low" | "high"
    params: list[ApiParam]
    description: str
    failure_modes: list[str] = field(default_factory=list)


@dataclass
class ApiCall:
    op: str
    args: dict
    call_id: int = 0

    def to_dict(self) -> dict:
        return {"op": self.op, "args": self.args}


@dataclass
class ValidationFailure:
    code: str
    message: str


@dataclass
class ValidationResult:
    ok: bool
    failure: Optional[ValidationFailure] = None

    @classmethod
    def fail(cls, code: str, message: str) -> "ValidationResult":
        return cls(False, ValidationFailure(code, message))


OK = ValidationResult(True)


@dataclass
class AppliedEffect:
    """What one applied call did to the deck."""

    created: list[str] = field(default_factory=list)
    deleted: list[str] = field(default_factory=list)
    modified: dict[str, list[str]] = field(default_factory=dict)
    declared: list[str] = field(default_factory=list)

    def touched_ids(self) -> set[str]:
        return set(self.created) | set(self.deleted) | set(self.modified)

    def to_dict(self) -> dict:
        return {
            "created": list(self.created),
            "deleted": list(self.deleted),
            "modified": {k: list(v) for k, v in self.modified.items()},
            "declared": list(self.declared),
        }


class ApplyError(RuntimeError):
    """Runtime failure while applying a call; the deck is unchanged."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


class WireFormatError(ValueError):
    """A call or sequence does not match the JSON wire format."""


# --- wire format ------------------------------------------------------------

def parse_call(obj, call_id: int = 0) -> ApiCall:
    if not isinstance(obj, dict):
        raise WireFormatError(f"call {call_id}: expected object, got {type(obj).__name__}")
    if "op" not in obj or not isinstance(obj["op"], str):
        raise WireFormatError(f"call {call_id}: missing string field 'op'")
    args = obj.get("args", {})
    if not isinstance(args, dict):
        raise WireFormatError(f"call {call_id}: 'args' must be an object")
    extra = set(obj) - {"op", "args"}
    if extra:
        raise WireFormatError(f"call {call_id}: unknown fields {sorted(extra)}")
    return ApiCall(op=obj["op"], args=args, call_id=call_id)


def parse_sequence(source) -> list[ApiCall]:
    """Wire format: a JSON array of {"op": ..., "args": {...}} objects."""
    if isinstance(source, (str, bytes)):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise WireFormatError(f"sequence is not valid JSON: {exc}") from exc
    else:
        data = source
    if not isinstance(data, list):
        raise WireFormatError("sequence must be a JSON array of calls")
    return [parse_call(item, i) for i, item in enumerate(data)]


def sequence_to_json(calls: list[ApiCall]) -> str:
    return json.dumps([c.to_dict() for c in calls], sort_keys=True)


# --- registry ---------------------------------------------------------------

def _geometry_param(doc: str = "target box {x, y, width, height[, rotation]} in EMU") -> ApiParam:
    return ApiParam("geometry", "geometry", doc=doc)


REGISTRY: dict[str, ApiSpec] = {}


def _register(spec: ApiSpec) -> None:
    REGISTRY[spec.name] = spec


_register(ApiSpec(
    "move_element", "low",
    [ApiParam("id", "element_id"), ApiParam("dx", "emu"), ApiParam("dy", "emu")],
    "Translate one element (a group moves with its members) by (dx, dy) EMU.",
    ["unknown-id"],
))
_register(ApiSpec(
    "resize_element", "low",
    [ApiParam("id", "element_id"),
     ApiParam("width", "emu", required=False),
     ApiParam("height", "emu", required=False),
     ApiParam("keep_aspect", "bool", required=False, default=False)],
    "Set a new width and/or height in EMU; keep_aspect derives the missing "
    "dimension from the current aspect ratio.",
    ["unknown-id", "invalid-geometry"],
))
_register(ApiSpec(
    "set_text", "low",
    [ApiParam("id", "element_id"), ApiParam("paragraphs", "paragraphs")],
    "Replace the element's text content. Paragraphs are strings or "
    "{runs|text, alignment, bullet} objects.",
    ["unknown-id", "type-mismatch"],
))
_register(ApiSpec(
    "set_text_style", "low",
    [ApiParam("id", "element_id"), ApiParam("style", "style_patch"),
     ApiParam("scope", "scope", required=False, default="all")],
    "Patch run styles (font_family, size, bold, italic, underline, color) "
    "and/or paragraph alignment; scope is 'all', 'paragraph:K' or 'run:K.J'.",
    ["unknown-id", "type-mismatch", "missing-arg"],
))
_register(ApiSpec(
    "set_shape_style", "low",
    [ApiParam("id", "element_id"),
     ApiParam("fill_color", "color", required=False),
     ApiParam("border_color", "color", required=False),
     ApiParam("border_width", "emu_nonneg", required=False)],
    "Patch a shape's fill color, border color and/or border width.",
    ["unknown-id", "missing-arg", "type-mismatch"],
))
_register(ApiSpec(
    "insert_textbox", "low",
    [_geometry_param(), ApiParam("paragraphs", "paragraphs"),
     ApiParam("style", "style_patch", required=False)],
    "Insert a new textbox; optional style applies to every run. Returns the "
    "new element id.",
    ["invalid-geometry"],
))
_register(ApiSpec(
    "insert_image", "low",
    [_geometry_param(),
     ApiParam("asset", "asset_key", required=False,
              doc="key of an existing deck asset"),
     ApiParam("data_base64", "base64", required=False,
              doc="raw image bytes, base64-encoded"),
     ApiParam("media_type", "string", required=False, default="image/png"),
     ApiParam("fit", "fit_mode", required=False, default="contain")],
    "Insert an image from an existing asset or external bytes; 'contain' "
    "letterboxes to the natural aspect ratio, 'stretch' fills the box.",
    ["unknown-id", "missing-arg", "type-mismatch", "runtime: unreadable image"],
))
_register(ApiSpec(
    "insert_shape", "low",
    [ApiParam("preset", "preset"), _geometry_param(),
     ApiParam("style", "shape_style_patch", required=False)],
    "Insert a preset shape (rect, ellipse, rightArrow, ...) with optional "
    "fill/border style.",
    ["invalid-geometry", "type-mismatch"],
))
_register(ApiSpec(
    "delete_element", "low",
    [ApiParam("id", "element_id"),
     ApiParam("cascade", "bool", required=False, default=False)],
    "Delete one element. Deleting a group promotes its members unless "
    "cascade is true.",
    ["unknown-id"],
))
_register(ApiSpec(
    "set_z_order", "low",
    [ApiParam("id", "element_id"), ApiParam("target", "z_target")],
    "Move an element within its sibling paint order: 'front', 'back', "
    "{'above': id} or {'below': id}.",
    ["unknown-id", "type-mismatch"],
))
_register(ApiSpec(
    "move_group", "high",
    [ApiParam("members", "id_list", required=False),
     ApiParam("section", "string", required=False),
     ApiParam("dx", "emu"), ApiParam("dy", "emu")],
    "Translate a set of elements (explicit ids or a section name) rigidly; "
    "pairwise offsets are preserved exactly.",
    ["unknown-id", "empty-target-set", "missing-arg"],
))
_register(ApiSpec(
    "batch_delete_elements", "high",
    [ApiParam("members", "id_list", required=False),
     ApiParam("predicate", "predicate", required=False,
              doc="{kind?: element kind, region?: geometry} matcher")],
    "Delete every matched element in one step; z order is reindexed "
    "gap-free afterwards.",
    ["unknown-id", "empty-target-set", "missing-arg"],
))
_register(ApiSpec(
    "text_format_brush", "high",
    [ApiParam("source_id", "element_id"), ApiParam("target_ids", "id_list"),
     ApiParam("attributes", "attr_mask",
              doc=f"subset of {list(BRUSH_ATTRIBUTES)}")],
    "Copy the masked text attributes of the source element onto every run "
    "of every target element.",
    ["unknown-id", "empty-target-set", "type-mismatch"],
))
_register(ApiSpec(
    "align_or_distribute", "high",
    [ApiParam("members", "id_list"),
     ApiParam("mode", "align_mode", doc=f"one of {list(ALIGN_MODES)}"),
     ApiParam("within", "within_mode", required=False, default="bounding-box")],
    "Align members to an edge/center or equalize their gaps, relative to "
    "the selection's bounding box or the canvas.",
    ["unknown-id", "empty-target-set", "type-mismatch"],
))

assert len(REGISTRY) == 14, "registry must hold exactly 14 operations"
LOW_LEVEL_OPS = tuple(n for n, s in REGISTRY.items() if s.level == "low")
HIGH_LEVEL_OPS = tuple(n for n, s in REGISTRY.items() if s.level == "high")
assert len(LOW_LEVEL_OPS) == 10 and len(HIGH_LEVEL_OPS) == 4


def registry_markdown() -> str:
    """Render the operation reference handed to planning models."""
    lines = ["# Edit operation reference", ""]
    for level, title in (("low", "Low-level operations"), ("high", "High-level operations")):
        lines.append(f"## {title}")
        lines.append("")
        for spec in REGISTRY.values():
            if spec.level != level:
                continue
            params = ", ".join(
                p.name + ("" if p.required else "?") for p in spec.params)
            lines.append(f"### {spec.name}({params})")
            lines.append(spec.description)
            for p in spec.params:
                req = "required" if p.required else f"optional, default {p.default!r}"
                doc = f" — {p.doc}" if p.doc else ""
                lines.append(f"- `{p.name}` ({p.type}, {req}){doc}")
            if spec.failure_modes:
                lines.append(f"Failure modes: {', '.join(spec.failure_modes)}.")
            lines.append("")
    lines.append(
        'Wire format: one call is {"op": "<name>", "args": {...}}; a plan is a '
        "JSON array of calls executed in order."
    )
    return "\n".join(lines)


# --- argument coercion helpers ---------------------------------------------

def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _parse_geometry_arg(value, allow_zero: bool = True) -> Geometry | ValidationFailure:
    if not isinstance(value, dict):
        return ValidationFailure("type-mismatch", "geometry must be an object")
    required = {"x", "y", "width", "height"}
    extra = set(value) - required - {"rotation"}
    if extra:
        return ValidationFailure("type-mismatch", f"geometry has unknown fields {sorted(extra)}")
    missing = required - set(value)
    if missing:
        return ValidationFailure("missing-arg", f"geometry missing {sorted(missing)}")
    for key in required:
        if not _is_int(value[key]):
            return ValidationFailure("type-mismatch", f"geometry.{key} must be integer EMU")
    rot = value.get("rotation", 0)
    if not isinstance(rot, (int, float)) or isinstance(rot, bool):
        return ValidationFailure("type-mismatch", "geometry.rotation must be a number")
    if value["width"] < 0 or value["height"] < 0:
        return ValidationFailure("invalid-geometry", "width/height must be >= 0")
    if not allow_zero and (value["width"] == 0 or value["height"] == 0):
        return ValidationFailure("invalid-geometry", "width/height must be > 0")
    return Geometry(value["x"], value["y"], value["width"], value["height"], float(rot))


def _parse_style_patch(value) -> dict | ValidationFailure:
    if not isinstance(value, dict):
        return ValidationFailure("type-mismatch", "style must be an object")
    allowed = set(BRUSH_ATTRIBUTES)
    extra = set(value) - allowed
    if extra:
        return ValidationFailure("type-mismatch", f"style has unknown fields {sorted(extra)}")
    if not value:
        return ValidationFailure("missing-arg", "style patch is empty")
    patch = {}
    for key, v in value.items():
        if key == "size":
            if not isinstance(v, (int, float)) or isinstance(v, bool) or v <= 0:
                return ValidationFailure("type-mismatch", "style.size must be positive points")
            patch["size_half_points"] = int(round(v * 2))
        elif key in ("bold", "italic", "underline"):
            if not isinstance(v, bool):
                return ValidationFailure("type-mismatch", f"style.{key} must be boolean")
            patch[key] = v
        elif key == "color":
            if not isinstance(v, str):
                return ValidationFailure("type-mismatch", "style.color must be RRGGBB hex")
            try:
                patch["color"] = normalize_color(v)
            except ValueError:
                return ValidationFailure("type-mismatch", f"style.color {v!r} is not RRGGBB hex")
        elif key == "font_family":
            if not isinstance(v, str) or not v:
                return ValidationFailure("type-mismatch", "style.font_family must be a string")
            patch[key] = v
        elif key == "alignment":
            if v not in ALIGNMENTS:
                return ValidationFailure(
                    "type-mismatch", f"style.alignment must be one of {list(ALIGNMENTS)}")
            patch[key] = v
    return patch


def _parse_paragraphs_arg(value) -> TextContent | ValidationFailure:
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list):
        return ValidationFailure("type-mismatch", "paragraphs must be a list")
    paragraphs = []
    for i, item in enumerate(value):
        if isinstance(item, str):
            paragraphs.append(Paragraph(runs=_split_runs(item, TextStyle())))
            continue
        if not isinstance(item, dict):
            return ValidationFailure("type-mismatch", f"paragraphs[{i}] must be string or object")
        alignment = item.get("alignment")
        if alignment is not None and alignment not in ALIGNMENTS:
            return ValidationFailure(
                "type-mismatch", f"paragraphs[{i}].alignment must be one of {list(ALIGNMENTS)}")
        bullet = item.get("bullet")
        if bullet is not None and not isinstance(bullet, str):
            return ValidationFailure("type-mismatch", f"paragraphs[{i}].bullet must be a string")
        runs: list[TextRun] = []
        if "runs" in item:
            if not isinstance(item["runs"], list):
                return ValidationFailure("type-mismatch", f"paragraphs[{i}].runs must be a list")
            for j, r in enumerate(item["runs"]):
                if isinstance(r, str):
                    runs.extend(_split_runs(r, TextStyle()))
                    continue
                if not isinstance(r, dict) or "text" not in r:
                    return ValidationFailure(
                        "type-mismatch", f"paragraphs[{i}].runs[{j}] needs a 'text' field")
                style = TextStyle()
                if r.get("style") is not None:
                    patch = _parse_style_patch(r["style"])
                    if isinstance(patch, ValidationFailure):
                        return patch
                    style = _patched_style(TextStyle(), {k: v for k, v in patch.items()
                                                         if k != "alignment"})
                runs.extend(_split_runs(str(r["text"]), style))
        elif "text" in item:
            runs = _split_runs(str(item["text"]), TextStyle())
        else:
            return ValidationFailure(
                "type-mismatch", f"paragraphs[{i}] needs 'runs' or 'text'")
        paragraphs.append(Paragraph(runs=runs, alignment=alignment, bullet=bullet))
    return TextContent(paragraphs)


def _split_runs(text: str, style: TextStyle) -> list[TextRun]:
    """Embedded newlines become dedicated line-break runs; empty text maps to
    a run-less paragraph so the pptx writer's output parses back identically."""
    out: list[TextRun] = []
    pieces = text.split("\n")
    for i, piece in enumerate(pieces):
        if i > 0:
            out.append(TextRun("\n"))
        if piece:
            out.append(TextRun(piece, _copy_style(style)))
    return out


def _copy_style(style: TextStyle) -> TextStyle:
    return TextStyle(
        font_family=style.font_family,
        size_half_points=style.size_half_points,
        bold=style.bold,
        italic=style.italic,
        underline=style.underline,
        color=style.color,
    )


def _patched_style(style: TextStyle, patch: dict) -> TextStyle:
    out = _copy_style(style)
    for key, value in patch.items():
        setattr(out, key, value)
    return out


def _parse_scope(value) -> tuple | ValidationFailure:
    if not isinstance(value, str):
        return ValidationFailure("type-mismatch", "scope must be a string")
    if value == "all":
        return ("all",)
    if value.startswith("paragraph:"):
        try:
            return ("paragraph", int(value.split(":", 1)[1]))
        except ValueError:
            pass
    if value.startswith("run:"):
        rest = value.split(":", 1)[1]
        parts = rest.split(".")
        if len(parts) == 2:
            try:
                return ("run", int(parts[0]), int(parts[1]))
            except ValueError:
                pass
    return ValidationFailure(
        "type-mismatch",
        f"scope {value!r} must be 'all', 'paragraph:K' or 'run:K.J'")


# --- shared lookups ---------------------------------------------------------

def _slide(doc: DeckDocument) -> Slide:
    return doc.slides[0]


def _find(doc: DeckDocument, element_id) -> Element | ValidationFailure:
    if not isinstance(element_id, str):
        return ValidationFailure("type-mismatch", "element id must be a string")
    el = _slide(doc).elements.get(element_id)
    if el is None:
        return ValidationFailure("unknown-id", f"no element {element_id!r} on slide 0")
    return el


def _resolve_member_set(doc: DeckDocument, args: dict) -> list[str] | ValidationFailure:
    members = args.get("members")
    section = args.get("section")
    if (members is None) == (section is None):
        return ValidationFailure(
            "missing-arg", "exactly one of 'members' or 'section' is required")
    if members is not None:
        if not isinstance(members, list) or not all(isinstance(m, str) for m in members):
            return ValidationFailure("type-mismatch", "members must be a list of ids")
        if not members:
            return ValidationFailure("empty-target-set", "members list is empty")
        for m in members:
            if m not in _slide(doc).elements:
                return ValidationFailure("unknown-id", f"no element {m!r} on slide 0")
        return list(dict.fromkeys(members))
    if not isinstance(section, str) or not section:
        return ValidationFailure("type-mismatch", "section must be a non-empty string")
    resolved = resolve_section_members(doc, section)
    if not resolved:
        return ValidationFailure(
            "empty-target-set", f"section {section!r} resolved to no elements")
    return resolved


def _rigid_units(slide: Slide, ids: list[str]) -> list[str]:
    """Drop ids whose ancestor is already in the set (they move with it)."""
    id_set = set(ids)
    out = []
    for eid in ids:
        parent = slide.parent_of(eid)
        covered = False
        while parent is not None:
            if parent in id_set:
                covered = True
                break
            parent = slide.parent_of(parent)
        if not covered:
            out.append(eid)
    return out


def _move_subtree(slide: Slide, eid: str, dx: int, dy: int) -> list[str]:
    moved = [eid]
    el = slide.elements[eid]
    el.geometry = el.geometry.translated(dx, dy)
    for cid in slide.descendants(eid):
        child = slide.elements[cid]
        child.geometry = child.geometry.translated(dx, dy)
        moved.append(cid)
    return moved


def _ancestors(slide: Slide, eid: str) -> list[str]:
    out = []
    parent = slide.parent_of(eid)
    while parent is not None:
        out.append(parent)
        parent = slide.parent_of(parent)
    return out


def _refresh_group_bounds(slide: Slide) -> list[str]:
    """Recompute every group's box as the union of its members; returns ids
    whose geometry changed."""
    changed = []

    def bounds(eid: str) -> Geometry:
        el = slide.elements[eid]
        if not el.is_group:
            return el.geometry
        boxes = [bounds(cid) for cid in el.children or []]
        u = union_geometry(boxes)
        new = Geometry(u.x, u.y, u.width, u.height, el.geometry.rotation)
        if (new.x, new.y, new.width, new.height) != (
                el.geometry.x, el.geometry.y, el.geometry.width, el.geometry.height):
            el.geometry = new
            changed.append(eid)
        return el.geometry

    for eid in slide.top_level_ids():
        bounds(eid)
    return changed


# --- per-op validate + apply -------------------------------------------------
# Handlers mutate a working copy and return (created, deleted, declared).

def _v_move_element(doc, args):
    el = _find(doc, args["id"])
    if isinstance(el, ValidationFailure):
        return el
    for key in ("dx", "dy"):
        if not _is_int(args[key]):
            return ValidationFailure("type-mismatch", f"{key} must be integer EMU")
    return None


def _a_move_element(doc, args):
    slide = _slide(doc)
    moved = _move_subtree(slide, args["id"], args["dx"], args["dy"])
    declared = moved + _ancestors(slide, args["id"])
    declared += _refresh_group_bounds(slide)
    return [], [], declared


def _v_resize_element(doc, args):
    el = _find(doc, args["id"])
    if isinstance(el, ValidationFailure):
        return el
    width, height = args.get("width"), args.get("height")
    if width is None and height is None:
        return ValidationFailure("missing-arg", "resize needs width and/or height")
    for key, v in (("width", width), ("height", height)):
        if v is not None:
            if not _is_int(v):
                return ValidationFailure("type-mismatch", f"{key} must be integer EMU")
            if v < 0:
                return ValidationFailure("invalid-geometry", f"{key} must be >= 0")
    if args.get("keep_aspect") is not None and not isinstance(args["keep_aspect"], bool):
        return ValidationFailure("type-mismatch", "keep_aspect must be boolean")
    if args.get("keep_aspect"):
        if (el.geometry.width == 0 or el.geometry.height == 0):
            return ValidationFailure(
                "invalid-geometry", "keep_aspect needs a non-degenerate current size")
    return None


def _a_resize_element(doc, args):
    slide = _slide(doc)
    el = slide.elements[args["id"]]
    g = el.geometry
    width, height = args.get("width"), args.get("height")
    if args.get("keep_aspect"):
        if width is not None:
            height = int(round(width * g.height / g.width))
        else:
            width = int(round(height * g.width / g.height))
    width = g.width if width is None else width
    height = g.height if height is None else height
    declared = [el.id]
    if el.is_group and g.width and g.height:
        sx, sy = width / g.width, height / g.height
        for cid in slide.descendants(el.id):
            c = slide.elements[cid]
            cg = c.geometry
            c.geometry = Geometry(
                g.x + int(round((cg.x - g.x) * sx)),
                g.y + int(round((cg.y - g.y) * sy)),
                int(round(cg.width * sx)),
                int(round(cg.height * sy)),
                cg.rotation,
            )
            declared.append(cid)
    el.geometry = Geometry(g.x, g.y, width, height, g.rotation)
    declared += _ancestors(slide, el.id)
    declared += _refresh_group_bounds(slide)
    return [], [], declared


def _v_set_text(doc, args):
    el = _find(doc, args["id"])
    if isinstance(el, ValidationFailure):
        return el
    if el.kind not in ("textbox", "shape"):
        return ValidationFailure(
            "type-mismatch", f"{el.id!r} is a {el.kind}; text needs a textbox or shape")
    parsed = _parse_paragraphs_arg(args["paragraphs"])
    if isinstance(parsed, ValidationFailure):
        return parsed
    return None


def _a_set_text(doc, args):
    el = _slide(doc).elements[args["id"]]
    el.text = _parse_paragraphs_arg(args["paragraphs"])
    return [], [], [el.id]


def _v_set_text_style(doc, args):
    el = _find(doc, args["id"])
    if isinstance(el, ValidationFailure):
        return el
    if el.text is None:
        return ValidationFailure("type-mismatch", f"{el.id!r} has no text to style")
    patch = _parse_style_patch(args["style"])
    if isinstance(patch, ValidationFailure):
        return patch
    scope = _parse_scope(args.get("scope", "all"))
    if isinstance(scope, ValidationFailure):
        return scope
    n = len(el.text.paragraphs)
    if scope[0] == "paragraph" and not (0 <= scope[1] < n):
        return ValidationFailure(
            "type-mismatch", f"scope paragraph {scope[1]} out of range ({n} paragraphs)")
    if scope[0] == "run":
        if not (0 <= scope[1] < n):
            return ValidationFailure(
                "type-mismatch", f"scope paragraph {scope[1]} out of range ({n} paragraphs)")
        m = len(el.text.paragraphs[scope[1]].runs)
        if not (0 <= scope[2] < m):
            return ValidationFailure(
                "type-mismatch", f"scope run {scope[2]} out of range ({m} runs)")
    return None


def _a_set_text_style(doc, args):
    el = _slide(doc).elements[args["id"]]
    patch = _parse_style_patch(args["style"])
    scope = _parse_scope(args.get("scope", "all"))
    alignment = patch.pop("alignment", None)
    if scope[0] == "all":
        targets = [(p, r) for p in el.text.paragraphs for r in p.runs]
        para_targets = el.text.paragraphs
    elif scope[0] == "paragraph":
        p = el.text.paragraphs[scope[1]]
        targets = [(p, r) for r in p.runs]
        para_targets = [p]
    else:
        p = el.text.paragraphs[scope[1]]
        targets = [(p, p.runs[scope[2]])]
        para_targets = [p]
    for _, run in targets:
        if run.text == "\n":
            continue
        run.style = _patched_style(run.style, patch)
    if alignment is not None:
        for p in para_targets:
            p.alignment = alignment
    return [], [], [el.id]


def _v_set_shape_style(doc, args):
    el = _find(doc, args["id"])
    if isinstance(el, ValidationFailure):
        return el
    if el.kind not in ("shape", "textbox"):
        return ValidationFailure(
            "type-mismatch", f"{el.id!r} is a {el.kind}; shape style needs a shape or textbox")
    keys = [k for k in ("fill_color", "border_color", "border_width") if args.get(k) is not None]
    if not keys:
        return ValidationFailure(
            "missing-arg", "set_shape_style needs fill_color, border_color or border_width")
    for key in ("fill_color", "border_color"):
        v = args.get(key)
        if v is not None:
            if not isinstance(v, str):
                return ValidationFailure("type-mismatch", f"{key} must be RRGGBB hex")
            try:
                normalize_color(v)
            except ValueError:
                return ValidationFailure("type-mismatch", f"{key} {v!r} is not RRGGBB hex")
    bw = args.get("border_width")
    if bw is not None and (not _is_int(bw) or bw < 0):
        return ValidationFailure("type-mismatch", "border_width must be a non-negative integer")
    return None


def _a_set_shape_style(doc, args):
    el = _slide(doc).elements[args["id"]]
    if el.shape is None:
        el.shape = ShapeStyle()
    if args.get("fill_color") is not None:
        el.shape.fill_color = normalize_color(args["fill_color"])
    if args.get("border_color") is not None:
        el.shape.border_color = normalize_color(args["border_color"])
    if args.get("border_width") is not None:
        el.shape.border_width = args["border_width"]
    return [], [], [el.id]


def _v_insert_textbox(doc, args):
    g = _parse_geometry_arg(args["geometry"])
    if isinstance(g, ValidationFailure):
        return g
    parsed = _parse_paragraphs_arg(args["paragraphs"])
    if isinstance(parsed, ValidationFailure):
        return parsed
    if args.get("style") is not None:
        patch = _parse_style_patch(args["style"])
        if isinstance(patch, ValidationFailure):
            return patch
    return None


def _a_insert_textbox(doc, args):
    slide = _slide(doc)
    text = _parse_paragraphs_arg(args["paragraphs"])
    if args.get("style") is not None:
        patch = _parse_style_patch(args["style"])
        alignment = patch.pop("alignment", None)
        for p in text.paragraphs:
            if alignment is not None and p.alignment is None:
                p.alignment = alignment
            for run in p.runs:
                if run.text != "\n":
                    run.style = _patched_style(run.style, patch)
    eid = doc.new_id()
    slide.elements[eid] = Element(
        id=eid, kind="textbox", geometry=_parse_geometry_arg(args["geometry"]),
        text=text, z_index=0)
    slide.root_order.append(eid)
    slide.renumber_z()
    return [eid], [], [eid]


def _v_insert_image(doc, args):
    g = _parse_geometry_arg(args["geometry"], allow_zero=False)
    if isinstance(g, ValidationFailure):
        return g
    asset = args.get("asset")
    data = args.get("data_base64")
    if (asset is None) == (data is None):
        return ValidationFailure(
            "missing-arg", "exactly one of 'asset' or 'data_base64' is required")
    if asset is not None:
        if not isinstance(asset, str):
            return ValidationFailure("type-mismatch", "asset must be a string key")
        if asset not in doc.assets:
            return ValidationFailure("unknown-id", f"no asset {asset!r} in deck")
    else:
        if not isinstance(data, str):
            return ValidationFailure("type-mismatch", "data_base64 must be a string")
        try:
            base64.b64decode(data, validate=True)
        except (binascii.Error, ValueError):
            return ValidationFailure("type-mismatch", "data_base64 is not valid base64")
    fit = args.get("fit", "contain")
    if fit not in ("contain", "stretch"):
        return ValidationFailure("type-mismatch", "fit must be 'contain' or 'stretch'")
    return None


def _a_insert_image(doc, args):
    slide = _slide(doc)
    box = _parse_geometry_arg(args["geometry"], allow_zero=False)
    if args.get("asset") is not None:
        key = args["asset"]
        asset = doc.assets[key]
        if asset.natural_size:
            aspect = asset.natural_size[0] / asset.natural_size[1]
        else:
            aspect = box.width / box.height
    else:
        raw = base64.b64decode(args["data_base64"])
        try:
            with Image.open(io.BytesIO(raw)) as im:
                size = im.size
        except Exception as exc:
            raise ApplyError("unreadable-image", f"image bytes unreadable: {exc}") from exc
        media_type = args.get("media_type") or "image/png"
        asset = Asset(media_type=media_type, data=raw, natural_size=size)
        ext = media_type.split("/")[-1].replace("+xml", "")
        key = f"new/{asset.digest[7:19]}.{ext}"
        doc.assets[key] = asset
        aspect = size[0] / size[1]
    if args.get("fit", "contain") == "contain":
        if box.width / box.height > aspect:
            h = box.height
            w = int(round(h * aspect))
        else:
            w = box.width
            h = int(round(w / aspect))
        geom = Geometry(box.x + (box.width - w) // 2, box.y + (box.height - h) // 2,
                        w, h, box.rotation)
    else:
        geom = box
    eid = doc.new_id()
    slide.elements[eid] = Element(
        id=eid, kind="image", geometry=geom,
        image=ImageRef(asset_key=key, natural_aspect=aspect))
    slide.root_order.append(eid)
    slide.renumber_z()
    return [eid], [], [eid]


def _v_insert_shape(doc, args):
    preset = args["preset"]
    if not isinstance(preset, str) or not preset.replace("_", "").isalnum():
        return ValidationFailure("type-mismatch", "preset must be an OOXML preset name")
    g = _parse_geometry_arg(args["geometry"])
    if isinstance(g, ValidationFailure):
        return g
    style = args.get("style")
    if style is not None:
        if not isinstance(style, dict):
            return ValidationFailure("type-mismatch", "style must be an object")
        extra = set(style) - {"fill_color", "border_color", "border_width"}
        if extra:
            return ValidationFailure("type-mismatch", f"style has unknown fields {sorted(extra)}")
        for key in ("fill_color", "border_color"):
            if style.get(key) is not None and (
                    not isinstance(style[key], str) or not is_valid_color(
                        style[key].lstrip("#").upper())):
                return ValidationFailure("type-mismatch", f"style.{key} must be RRGGBB hex")
        bw = style.get("border_width")
        if bw is not None and (not _is_int(bw) or bw < 0):
            return ValidationFailure(
                "type-mismatch", "style.border_width must be a non-negative integer")
    return None


def _a_insert_shape(doc, args):
    slide = _slide(doc)
    style = args.get("style") or {}
    eid = doc.new_id()
    slide.elements[eid] = Element(
        id=eid, kind="shape", geometry=_parse_geometry_arg(args["geometry"]),
        shape=ShapeStyle(
            fill_color=normalize_color(style["fill_color"]) if style.get("fill_color") else None,
            border_color=normalize_color(style["border_color"]) if style.get("border_color") else None,
            border_width=style.get("border_width"),
            preset=args["preset"],
        ))
    slide.root_order.append(eid)
    slide.renumber_z()
    return [eid], [], [eid]


def _v_delete_element(doc, args):
    el = _find(doc, args["id"])
    if isinstance(el, ValidationFailure):
        return el
    if args.get("cascade") is not None and not isinstance(args["cascade"], bool):
        return ValidationFailure("type-mismatch", "cascade must be boolean")
    return None


def _delete_ids(slide: Slide, ids: set[str]) -> tuple[list[str], list[str]]:
    """Remove exactly `ids`; non-deleted children of deleted groups are
    promoted in place. Returns (deleted, declared)."""
    before_order = slide.paint_order()
    before_z = {eid: slide.elements[eid].z_index for eid in before_order}

    def rebuild(order: list[str]) -> list[str]:
        out = []
        for eid in order:
            el = slide.elements[eid]
            if eid in ids:
                if el.children:
                    out.extend(rebuild(el.children))
                continue
            if el.children:
                el.children = rebuild(el.children)
            out.append(eid)
        return out

    slide.root_order = rebuild(slide.root_order)
    for eid in ids:
        slide.elements.pop(eid, None)
    # Groups whose members were all deleted collapse too (possibly cascading).
    emptied: set[str] = set()
    while True:
        empty_groups = [eid for eid, el in slide.elements.items()
                        if el.is_group and not el.children]
        if not empty_groups:
            break
        for eid in empty_groups:
            parent_list = slide.sibling_order(eid)
            parent_list.remove(eid)
            slide.elements.pop(eid)
            emptied.add(eid)
    slide.renumber_z()
    bounds_changed = _refresh_group_bounds(slide)
    deleted = sorted(ids | emptied, key=id_sort_key)
    declared = list(deleted) + bounds_changed
    for eid, el in slide.elements.items():
        if before_z.get(eid) != el.z_index:
            declared.append(eid)
    return deleted, declared


def _a_delete_element(doc, args):
    slide = _slide(doc)
    target = args["id"]
    ids = {target}
    if args.get("cascade") and slide.elements[target].is_group:
        ids |= set(slide.descendants(target))
    deleted, declared = _delete_ids(slide, ids)
    return [], deleted, declared


def _v_set_z_order(doc, args):
    el = _find(doc, args["id"])
    if isinstance(el, ValidationFailure):
        return el
    target = args["target"]
    if isinstance(target, str):
        if target not in Z_TARGETS:
            return ValidationFailure(
                "type-mismatch", "target must be 'front', 'back', {'above': id} or {'below': id}")
        return None
    if isinstance(target, dict) and len(target) == 1:
        key = next(iter(target))
        if key in ("above", "below"):
            ref = _find(doc, target[key])
            if isinstance(ref, ValidationFailure):
                return ref
            slide = _slide(doc)
            if slide.parent_of(ref.id) != slide.parent_of(el.id):
                return ValidationFailure(
                    "type-mismatch",
                    f"{el.id!r} and {ref.id!r} are not siblings in the paint order")
            if ref.id == el.id:
                return ValidationFailure("type-mismatch", "cannot order relative to itself")
            return None
    return ValidationFailure(
        "type-mismatch", "target must be 'front', 'back', {'above': id} or {'below': id}")


def _a_set_z_order(doc, args):
    slide = _slide(doc)
    eid = args["id"]
    target = args["target"]
    order = slide.sibling_order(eid)
    before_z = {e: slide.elements[e].z_index for e in slide.paint_order()}
    order.remove(eid)
    if target == "front":
        order.append(eid)
    elif target == "back":
        order.insert(0, eid)
    else:
        key = next(iter(target))
        ref_idx = order.index(target[key])
        order.insert(ref_idx + 1 if key == "above" else ref_idx, eid)
    slide.renumber_z()
    declared = [eid]
    for e, el in slide.elements.items():
        if before_z.get(e) != el.z_index:
            declared.append(e)
    return [], [], declared


def _v_move_group(doc, args):
    members = _resolve_member_set(doc, args)
    if isinstance(members, ValidationFailure):
        return members
    for key in ("dx", "dy"):
        if not _is_int(args[key]):
            return ValidationFailure("type-mismatch", f"{key} must be integer EMU")
    return None


def _a_move_group(doc, args):
    slide = _slide(doc)
    members = _resolve_member_set(doc, args)
    declared = []
    for eid in _rigid_units(slide, members):
        declared += _move_subtree(slide, eid, args["dx"], args["dy"])
        declared += _ancestors(slide, eid)
    declared += _refresh_group_bounds(slide)
    return [], [], declared


def _v_batch_delete(doc, args):
    members = args.get("members")
    predicate = args.get("predicate")
    if (members is None) == (predicate is None):
        return ValidationFailure(
            "missing-arg", "exactly one of 'members' or 'predicate' is required")
    if members is not None:
        if not isinstance(members, list) or not all(isinstance(m, str) for m in members):
            return ValidationFailure("type-mismatch", "members must be a list of ids")
        if not members:
            return ValidationFailure("empty-target-set", "members list is empty")
        for m in members:
            if m not in _slide(doc).elements:
                return ValidationFailure("unknown-id", f"no element {m!r} on slide 0")
        return None
    if not isinstance(predicate, dict):
        return ValidationFailure("type-mismatch", "predicate must be an object")
    extra = set(predicate) - {"kind", "region"}
    if extra:
        return ValidationFailure("type-mismatch", f"predicate has unknown fields {sorted(extra)}")
    if not predicate:
        return ValidationFailure("missing-arg", "predicate needs 'kind' and/or 'region'")
    kind = predicate.get("kind")
    if kind is not None and kind not in ("textbox", "image", "shape", "group"):
        return ValidationFailure("type-mismatch", f"predicate.kind {kind!r} unknown")
    if predicate.get("region") is not None:
        g = _parse_geometry_arg(predicate["region"])
        if isinstance(g, ValidationFailure):
            return g
    if not _match_predicate(doc, predicate):
        return ValidationFailure("empty-target-set", "predicate matched no elements")
    return None


def _match_predicate(doc: DeckDocument, predicate: dict) -> list[str]:
    slide = _slide(doc)
    kind = predicate.get("kind")
    region = None
    if predicate.get("region") is not None:
        region = _parse_geometry_arg(predicate["region"])
    out = []
    for eid in slide.paint_order():
        el = slide.elements[eid]
        if kind is not None and el.kind != kind:
            continue
        if region is not None and not el.geometry.intersects(region):
            continue
        out.append(eid)
    return out


def _a_batch_delete(doc, args):
    slide = _slide(doc)
    if args.get("members") is not None:
        matched = set(args["members"])
    else:
        matched = set(_match_predicate(doc, args["predicate"]))
    deleted, declared = _delete_ids(slide, matched)
    return [], deleted, declared


def _v_text_format_brush(doc, args):
    src = _find(doc, args["source_id"])
    if isinstance(src, ValidationFailure):
        return src
    if src.text is None or not src.text.paragraphs:
        return ValidationFailure("type-mismatch", f"source {src.id!r} has no text")
    targets = args["target_ids"]
    if not isinstance(targets, list) or not all(isinstance(t, str) for t in targets):
        return ValidationFailure("type-mismatch", "target_ids must be a list of ids")
    if not targets:
        return ValidationFailure("empty-target-set", "target_ids is empty")
    for t in targets:
        el = _find(doc, t)
        if isinstance(el, ValidationFailure):
            return el
        if el.text is None:
            return ValidationFailure("type-mismatch", f"target {t!r} has no text")
    mask = args["attributes"]
    if not isinstance(mask, list) or not all(isinstance(a, str) for a in mask):
        return ValidationFailure("type-mismatch", "attributes must be a list of names")
    if not mask:
        return ValidationFailure("empty-target-set", "empty mask: no attributes to copy")
    unknown = [a for a in mask if a not in BRUSH_ATTRIBUTES]
    if unknown:
        return ValidationFailure(
            "type-mismatch", f"unknown attributes {unknown}; allowed: {list(BRUSH_ATTRIBUTES)}")
    return None


def _a_text_format_brush(doc, args):
    slide = _slide(doc)
    src = slide.elements[args["source_id"]]
    first_para = src.text.paragraphs[0]
    src_style = TextStyle()
    for run in src.text.iter_runs():
        if run.text != "\n":
            src_style = run.style
            break
    mask = args["attributes"]
    patch = {}
    for attr in mask:
        if attr == "size":
            patch["size_half_points"] = src_style.size_half_points
        elif attr != "alignment":
            patch[attr] = getattr(src_style, attr)
    declared = []
    for t in dict.fromkeys(args["target_ids"]):
        el = slide.elements[t]
        for p in el.text.paragraphs:
            if "alignment" in mask:
                p.alignment = first_para.alignment
            for run in p.runs:
                if run.text != "\n":
                    run.style = _patched_style(run.style, patch)
        declared.append(t)
    return [], [], declared


def _v_align_or_distribute(doc, args):
    members = args["members"]
    if not isinstance(members, list) or not all(isinstance(m, str) for m in members):
        return ValidationFailure("type-mismatch", "members must be a list of ids")
    if not members:
        return ValidationFailure("empty-target-set", "members list is empty")
    for m in members:
        if m not in _slide(doc).elements:
            return ValidationFailure("unknown-id", f"no element {m!r} on slide 0")
    if args["mode"] not in ALIGN_MODES:
        return ValidationFailure("type-mismatch", f"mode must be one of {list(ALIGN_MODES)}")
    within = args.get("within", "bounding-box")
    if within not in ("bounding-box", "canvas"):
        return ValidationFailure("type-mismatch", "within must be 'bounding-box' or 'canvas'")
    return None


def _spread(free: int, slots: int) -> list[int]:
    """Split `free` into `slots` integers differing by at most 1."""
    if slots <= 0:
        return []
    base, rem = divmod(free, slots)
    return [base + (1 if i < rem else 0) for i in range(slots)]


def _a_align_or_distribute(doc, args):
    slide = _slide(doc)
    members = [m for m in dict.fromkeys(args["members"])]
    units = _rigid_units(slide, members)
    mode = args["mode"]
    within = args.get("within", "bounding-box")
    boxes = {m: slide.elements[m].geometry for m in units}
    if within == "canvas":
        ref = Geometry(0, 0, slide.width, slide.height)
    else:
        ref = union_geometry(list(boxes.values()))
    declared: list[str] = []

    def shift(eid: str, dx: int, dy: int) -> None:
        if dx or dy:
            declared.extend(_move_subtree(slide, eid, dx, dy))
            declared.extend(_ancestors(slide, eid))

    if mode == "align-left":
        for m in units:
            shift(m, ref.x - boxes[m].x, 0)
    elif mode == "align-right":
        for m in units:
            shift(m, ref.x2 - boxes[m].x2, 0)
    elif mode == "align-top":
        for m in units:
            shift(m, 0, ref.y - boxes[m].y)
    elif mode == "align-bottom":
        for m in units:
            shift(m, 0, ref.y2 - boxes[m].y2)
    elif mode == "align-center":
        cx = ref.x + ref.width // 2
        for m in units:
            shift(m, cx - (boxes[m].x + boxes[m].width // 2), 0)
    else:
        horizontal = mode == "distribute-horizontal"

        def pos(g: Geometry) -> int:
            return g.x if horizontal else g.y

        def length(g: Geometry) -> int:
            return g.width if horizontal else g.height

        ordered = sorted(units, key=lambda m: (pos(boxes[m]), id_sort_key(m)))
        total = sum(length(boxes[m]) for m in ordered)
        if within == "canvas":
            span = ref.width if horizontal else ref.height
            gaps = _spread(span - total, len(ordered) + 1)
            cursor = (ref.x if horizontal else ref.y) + gaps[0]
            for i, m in enumerate(ordered):
                delta = cursor - pos(boxes[m])
                shift(m, delta if horizontal else 0, 0 if horizontal else delta)
                cursor += length(boxes[m]) + gaps[i + 1]
        else:
            if len(ordered) >= 3:
                first, last = ordered[0], ordered[-1]
                span = (pos(boxes[last]) + length(boxes[last])) - pos(boxes[first])
                inner = [m for m in ordered]
                gaps = _spread(span - total, len(ordered) - 1)
                cursor = pos(boxes[first])
                for i, m in enumerate(inner):
                    delta = cursor - pos(boxes[m])
                    shift(m, delta if horizontal else 0, 0 if horizontal else delta)
                    cursor += length(boxes[m]) + (gaps[i] if i < len(gaps) else 0)
    declared += _refresh_group_bounds(slide)
    return [], [], declared


_VALIDATORS: dict[str, Callable] = {
    "move_element": _v_move_element,
    "resize_element": _v_resize_element,
    "set_text": _v_set_text,
    "set_text_style": _v_set_text_style,
    "set_shape_style": _v_set_shape_style,
    "insert_textbox": _v_insert_textbox,
    "insert_image": _v_insert_image,
    "insert_shape": _v_insert_shape,
    "delete_element": _v_delete_element,
    "set_z_order": _v_set_z_order,
    "move_group": _v_move_group,
    "batch_delete_elements": _v_batch_delete,
    "text_format_brush": _v_text_format_brush,
    "align_or_distribute": _v_align_or_distribute,
}

_APPLIERS: dict[str, Callable] = {
    "move_element": _a_move_element,
    "resize_element": _a_resize_element,
    "set_text": _a_set_text,
    "set_text_style": _a_set_text_style,
    "set_shape_style": _a_set_shape_style,
    "insert_textbox": _a_insert_textbox,
    "insert_image": _a_insert_image,
    "insert_shape": _a_insert_shape,
    "delete_element": _a_delete_element,
    "set_z_order": _a_set_z_order,
    "move_group": _a_move_group,
    "batch_delete_elements": _a_batch_delete,
    "text_format_brush": _a_text_format_brush,
    "align_or_distribute": _a_align_or_distribute,
}


def validate_call(doc: DeckDocument, call: ApiCall) -> ValidationResult:
    """Check a call against the current deck without mutating anything."""
    spec = REGISTRY.get(call.op)
    if spec is None:
        return ValidationResult.fail("unknown-op", f"unknown operation {call.op!r}")
    if not isinstance(call.args, dict):
        return ValidationResult.fail("type-mismatch", "args must be an object")
    known = {p.name for p in spec.params}
    extra = set(call.args) - known
    if extra:
        return ValidationResult.fail(
            "type-mismatch", f"{call.op}: unknown arguments {sorted(extra)}")
    for p in spec.params:
        if p.required and call.args.get(p.name) is None:
            return ValidationResult.fail(
                "missing-arg", f"{call.op}: required argument {p.name!r} missing")
    if not doc.slides:
        return ValidationResult.fail("invalid-geometry", "deck has no slides")
    failure = _VALIDATORS[call.op](doc, call.args)
    if failure is not None:
        return ValidationResult(False, failure)
    return OK


def apply_call(doc: DeckDocument, call: ApiCall) -> tuple[DeckDocument, AppliedEffect]:
    """Apply one validated call, returning a new deck and its effect.

    Atomic: on any failure the original deck is returned unmodified inside
    the raised error's context; the input deck is never mutated.
    """
    result = validate_call(doc, call)
    if not result.ok:
        raise ApplyError(result.failure.code, result.failure.message)
    working = doc.copy()
    try:
        created, deleted, declared = _APPLIERS[call.op](working, call.args)
        validate_deck(working)
    except ApplyError:
        raise
    except Exception as exc:
        raise ApplyError("internal", f"{call.op} failed: {exc}") from exc
    d = diff(doc, working)
    effect = AppliedEffect(
        created=sorted(set(created), key=id_sort_key),
        deleted=sorted(set(deleted), key=id_sort_key),
        modified=d.modified,
        declared=sorted(set(declared) | set(created) | set(deleted), key=id_sort_key),
    )
    return working, effect
