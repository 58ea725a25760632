"""Lossless, deterministic JSON serialization of a deck.

The canonical form is the contract everything else leans on: digests,
diffs, golden tests, and the element JSON handed to planning agents.
Two structurally equal decks always serialize to byte-identical JSON
(sorted keys, compact separators, full field shape with explicit nulls).
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Optional

from .model import (
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
    validate_deck,
)

SCHEMA_VERSION = 1


class CanonicalJsonError(ValueError):
    """Input JSON does not match the canonical deck schema."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _style_dict(s: TextStyle) -> dict:
    return {
        "font_family": s.font_family,
        "size_half_points": s.size_half_points,
        "bold": s.bold,
        "italic": s.italic,
        "underline": s.underline,
        "color": s.color,
    }


def _geometry_dict(g: Geometry) -> dict:
    return {
        "x": g.x,
        "y": g.y,
        "width": g.width,
        "height": g.height,
        "rotation": float(g.rotation),
    }


def element_to_dict(el: Element) -> dict:
    text = None
    if el.text is not None:
        text = {
            "paragraphs": [
                {
                    "runs": [{"text": r.text, "style": _style_dict(r.style)} for r in p.runs],
                    "alignment": p.alignment,
                    "bullet": p.bullet,
                }
                for p in el.text.paragraphs
            ]
        }
    image = None
    if el.image is not None:
        image = {
            "asset_key": el.image.asset_key,
            "natural_aspect": float(el.image.natural_aspect),
        }
    shape = None
    if el.shape is not None:
        shape = {
            "fill_color": el.shape.fill_color,
            "border_color": el.shape.border_color,
            "border_width": el.shape.border_width,
            "preset": el.shape.preset,
        }
    return {
        "id": el.id,
        "kind": el.kind,
        "name": el.name,
        "geometry": _geometry_dict(el.geometry),
        "z_index": el.z_index,
        "text": text,
        "image": image,
        "shape": shape,
        "children": list(el.children) if el.children is not None else None,
        "opaque_payload": el.opaque_payload,
    }


def deck_to_dict(doc: DeckDocument) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "slides": [
            {
                "width": s.width,
                "height": s.height,
                "elements": {eid: element_to_dict(el) for eid, el in s.elements.items()},
                "root_order": list(s.root_order),
            }
            for s in doc.slides
        ],
        "assets": {
            key: {
                "media_type": a.media_type,
                "digest": a.digest,
                "size": a.size,
                "natural_size": list(a.natural_size) if a.natural_size else None,
            }
            for key, a in doc.assets.items()
        },
        "source_digest": doc.source_digest,
        "next_id": doc.next_id,
    }


def to_canonical_json(doc: DeckDocument) -> str:
    validate_deck(doc)
    return json.dumps(deck_to_dict(doc), sort_keys=True, separators=(",", ":"))


def deck_digest(doc: DeckDocument) -> str:
    return "sha256:" + hashlib.sha256(to_canonical_json(doc).encode("utf-8")).hexdigest()


# --- parsing -----------------------------------------------------------

def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise CanonicalJsonError(path, message)


def _take(obj: dict, path: str, allowed: dict[str, bool]) -> None:
    """Reject unknown keys and check required ones. allowed: name -> required."""
    _expect(isinstance(obj, dict), path, f"expected object, got {type(obj).__name__}")
    for key in obj:
        if key not in allowed:
            raise CanonicalJsonError(f"{path}.{key}", "unknown field")
    for key, required in allowed.items():
        if required and key not in obj:
            raise CanonicalJsonError(f"{path}.{key}", "missing field")


def _opt_str(v: Any, path: str) -> Optional[str]:
    if v is None:
        return None
    _expect(isinstance(v, str), path, "expected string or null")
    return v


def _req_int(v: Any, path: str) -> int:
    _expect(isinstance(v, int) and not isinstance(v, bool), path, "expected integer")
    return v


def _style_from_dict(d: Any, path: str) -> TextStyle:
    _take(d, path, {
        "font_family": False, "size_half_points": False, "bold": False,
        "italic": False, "underline": False, "color": False,
    })
    size = d.get("size_half_points")
    if size is not None:
        size = _req_int(size, f"{path}.size_half_points")
    for flag in ("bold", "italic", "underline"):
        v = d.get(flag)
        _expect(v is None or isinstance(v, bool), f"{path}.{flag}", "expected boolean or null")
    try:
        return TextStyle(
            font_family=_opt_str(d.get("font_family"), f"{path}.font_family"),
            size_half_points=size,
            bold=d.get("bold"),
            italic=d.get("italic"),
            underline=d.get("underline"),
            color=_opt_str(d.get("color"), f"{path}.color"),
        )
    except ValueError as exc:
        raise CanonicalJsonError(path, str(exc)) from exc


def _geometry_from_dict(d: Any, path: str) -> Geometry:
    _take(d, path, {"x": True, "y": True, "width": True, "height": True, "rotation": True})
    rot = d["rotation"]
    _expect(isinstance(rot, (int, float)) and not isinstance(rot, bool),
            f"{path}.rotation", "expected number")
    try:
        return Geometry(
            x=_req_int(d["x"], f"{path}.x"),
            y=_req_int(d["y"], f"{path}.y"),
            width=_req_int(d["width"], f"{path}.width"),
            height=_req_int(d["height"], f"{path}.height"),
            rotation=float(rot),
        )
    except ValueError as exc:
        raise CanonicalJsonError(path, str(exc)) from exc


def element_from_dict(d: Any, path: str) -> Element:
    _take(d, path, {
        "id": True, "kind": True, "name": True, "geometry": True, "z_index": True,
        "text": True, "image": True, "shape": True, "children": True,
        "opaque_payload": True,
    })
    kind = d["kind"]
    _expect(isinstance(kind, str), f"{path}.kind", "expected string")
    text = None
    if d["text"] is not None:
        tpath = f"{path}.text"
        _take(d["text"], tpath, {"paragraphs": True})
        paragraphs = d["text"]["paragraphs"]
        _expect(isinstance(paragraphs, list), f"{tpath}.paragraphs", "expected array")
        plist = []
        for pi, pd in enumerate(paragraphs):
            ppath = f"{tpath}.paragraphs[{pi}]"
            _take(pd, ppath, {"runs": True, "alignment": True, "bullet": True})
            _expect(isinstance(pd["runs"], list), f"{ppath}.runs", "expected array")
            runs = []
            for ri, rd in enumerate(pd["runs"]):
                rpath = f"{ppath}.runs[{ri}]"
                _take(rd, rpath, {"text": True, "style": True})
                _expect(isinstance(rd["text"], str), f"{rpath}.text", "expected string")
                runs.append(TextRun(rd["text"], _style_from_dict(rd["style"], f"{rpath}.style")))
            try:
                plist.append(Paragraph(
                    runs=runs,
                    alignment=_opt_str(pd["alignment"], f"{ppath}.alignment"),
                    bullet=_opt_str(pd["bullet"], f"{ppath}.bullet"),
                ))
            except ValueError as exc:
                raise CanonicalJsonError(ppath, str(exc)) from exc
        text = TextContent(plist)
    image = None
    if d["image"] is not None:
        ipath = f"{path}.image"
        _take(d["image"], ipath, {"asset_key": True, "natural_aspect": True})
        aspect = d["image"]["natural_aspect"]
        _expect(isinstance(aspect, (int, float)) and not isinstance(aspect, bool),
                f"{ipath}.natural_aspect", "expected number")
        try:
            image = ImageRef(asset_key=d["image"]["asset_key"], natural_aspect=float(aspect))
        except ValueError as exc:
            raise CanonicalJsonError(ipath, str(exc)) from exc
    shape = None
    if d["shape"] is not None:
        spath = f"{path}.shape"
        _take(d["shape"], spath, {
            "fill_color": True, "border_color": True, "border_width": True, "preset": True,
        })
        bw = d["shape"]["border_width"]
        if bw is not None:
            bw = _req_int(bw, f"{spath}.border_width")
        try:
            shape = ShapeStyle(
                fill_color=_opt_str(d["shape"]["fill_color"], f"{spath}.fill_color"),
                border_color=_opt_str(d["shape"]["border_color"], f"{spath}.border_color"),
                border_width=bw,
                preset=_opt_str(d["shape"]["preset"], f"{spath}.preset"),
            )
        except ValueError as exc:
            raise CanonicalJsonError(spath, str(exc)) from exc
    children = None
    if d["children"] is not None:
        _expect(isinstance(d["children"], list), f"{path}.children", "expected array or null")
        children = []
        for ci, cid in enumerate(d["children"]):
            _expect(isinstance(cid, str), f"{path}.children[{ci}]", "expected string id")
            children.append(cid)
    try:
        return Element(
            id=d["id"],
            kind=kind,
            name=_opt_str(d["name"], f"{path}.name"),
            geometry=_geometry_from_dict(d["geometry"], f"{path}.geometry"),
            z_index=_req_int(d["z_index"], f"{path}.z_index"),
            text=text,
            image=image,
            shape=shape,
            children=children,
            opaque_payload=_opt_str(d["opaque_payload"], f"{path}.opaque_payload"),
        )
    except ValueError as exc:
        raise CanonicalJsonError(path, str(exc)) from exc


def deck_from_dict(data: Any, path: str = "$") -> DeckDocument:
    _take(data, path, {
        "schema_version": True, "slides": True, "assets": True,
        "source_digest": True, "next_id": True,
    })
    _expect(data["schema_version"] == SCHEMA_VERSION, f"{path}.schema_version",
            f"unsupported schema version {data['schema_version']!r}")
    _expect(isinstance(data["slides"], list), f"{path}.slides", "expected array")
    slides = []
    for si, sd in enumerate(data["slides"]):
        spath = f"{path}.slides[{si}]"
        _take(sd, spath, {"width": True, "height": True, "elements": True, "root_order": True})
        _expect(isinstance(sd["elements"], dict), f"{spath}.elements", "expected object")
        elements = {}
        for eid, ed in sd["elements"].items():
            el = element_from_dict(ed, f"{spath}.elements[{eid}]")
            if el.id != eid:
                raise CanonicalJsonError(f"{spath}.elements[{eid}].id",
                                         f"key/id mismatch ({el.id!r})")
            elements[eid] = el
        _expect(isinstance(sd["root_order"], list), f"{spath}.root_order", "expected array")
        slides.append(Slide(
            width=_req_int(sd["width"], f"{spath}.width"),
            height=_req_int(sd["height"], f"{spath}.height"),
            elements=elements,
            root_order=list(sd["root_order"]),
        ))
    _expect(isinstance(data["assets"], dict), f"{path}.assets", "expected object")
    assets = {}
    for key, ad in data["assets"].items():
        apath = f"{path}.assets[{key}]"
        _take(ad, apath, {"media_type": True, "digest": True, "size": True, "natural_size": True})
        nat = ad["natural_size"]
        if nat is not None:
            _expect(isinstance(nat, list) and len(nat) == 2, f"{apath}.natural_size",
                    "expected [width, height] or null")
            nat = (int(nat[0]), int(nat[1]))
        assets[key] = Asset(
            media_type=ad["media_type"],
            data=None,
            digest=ad["digest"],
            size=_req_int(ad["size"], f"{apath}.size"),
            natural_size=nat,
        )
    doc = DeckDocument(
        slides=slides,
        assets=assets,
        source_digest=_opt_str(data["source_digest"], f"{path}.source_digest"),
        next_id=_req_int(data["next_id"], f"{path}.next_id"),
    )
    _validate_with_paths(doc, path)
    return doc


def _validate_with_paths(doc: DeckDocument, root: str) -> None:
    """Re-run deck invariants, mapping violations onto JSON paths."""
    for si, slide in enumerate(doc.slides):
        spath = f"{root}.slides[{si}]"
        for eid, el in slide.elements.items():
            if el.children:
                for ci, cid in enumerate(el.children):
                    if cid not in slide.elements:
                        raise CanonicalJsonError(
                            f"{spath}.elements[{eid}].children[{ci}]",
                            f"dangling id {cid!r}")
        for ri, rid in enumerate(slide.root_order):
            if rid not in slide.elements:
                raise CanonicalJsonError(f"{spath}.root_order[{ri}]", f"dangling id {rid!r}")
        z_seen: dict[int, str] = {}
        for eid in sorted(slide.elements):
            z = slide.elements[eid].z_index
            if z in z_seen:
                raise CanonicalJsonError(
                    f"{spath}.elements[{eid}].z_index",
                    f"duplicate z_index {z} (also on {z_seen[z]!r})")
            z_seen[z] = eid
    try:
        validate_deck(doc)
    except ValueError as exc:
        raise CanonicalJsonError(root, str(exc)) from exc


def from_canonical_json(text: str) -> DeckDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CanonicalJsonError("$", f"not valid JSON: {exc}") from exc
    return deck_from_dict(data)


def planner_view_json(doc: DeckDocument, slide: int = 0, indent: int = 2) -> str:
    """Compact element JSON for model prompts: opaque payloads elided."""
    s = doc.slides[slide]
    view = {
        "canvas": {"width": s.width, "height": s.height},
        "elements": [],
        "assets": sorted(doc.assets),
    }
    for eid in s.paint_order():
        d = element_to_dict(s.elements[eid])
        d["opaque_payload"] = None if d["opaque_payload"] is None else "<opaque>"
        view["elements"].append(d)
    return json.dumps(view, sort_keys=True, indent=indent)
