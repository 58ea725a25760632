"""Parse a pptx container into a DeckDocument.

Every shape in a slide's shape tree maps to exactly one element. Shapes
we do not model (tables, charts, connectors with effects, ...) become
``shape`` elements whose source XML rides along in ``opaque_payload``;
recognized shapes also keep their source fragment so unknown attributes
survive a save. Grouped shapes are flattened to absolute geometry using
the group's child-offset transform (rounding half-to-even); the group
itself stays addressable as an element with parent links.
"""

from __future__ import annotations

import hashlib
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Optional

from PIL import Image

from ..model import (
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
    union_geometry,
)
from .container import PptxContainer, PptxFormatError
from .names import MEDIA_TYPES_BY_EXT, qn, serialize_fragment

_ALIGN_FROM_ALGN = {"l": "left", "ctr": "center", "r": "right", "just": "justify"}


@dataclass
class _Xform:
    """Maps group-child coordinates to absolute EMU."""

    ox: float = 0.0
    oy: float = 0.0
    cx: float = 0.0
    cy: float = 0.0
    sx: float = 1.0
    sy: float = 1.0

    def point(self, x: float, y: float) -> tuple[int, int]:
        return (
            int(round(self.ox + (x - self.cx) * self.sx)),
            int(round(self.oy + (y - self.cy) * self.sy)),
        )

    def extent(self, w: float, h: float) -> tuple[int, int]:
        return int(round(w * self.sx)), int(round(h * self.sy))


def _media_type_for(path: str) -> str:
    ext = path.rsplit(".", 1)[-1].lower()
    return MEDIA_TYPES_BY_EXT.get(ext, "application/octet-stream")


def _natural_size(data: bytes) -> Optional[tuple[int, int]]:
    try:
        with Image.open(io.BytesIO(data)) as im:
            return im.size
    except Exception:
        return None


def _parse_xfrm(xfrm: Optional[ET.Element], xf: _Xform) -> tuple[Geometry, Optional[ET.Element]]:
    if xfrm is None:
        return Geometry(0, 0, 0, 0), None
    off = xfrm.find(qn("a:off"))
    ext = xfrm.find(qn("a:ext"))
    x = int(off.get("x", "0")) if off is not None else 0
    y = int(off.get("y", "0")) if off is not None else 0
    w = int(ext.get("cx", "0")) if ext is not None else 0
    h = int(ext.get("cy", "0")) if ext is not None else 0
    rot = int(xfrm.get("rot", "0")) / 60000.0
    ax, ay = xf.point(x, y)
    aw, ah = xf.extent(w, h)
    return Geometry(ax, ay, max(0, aw), max(0, ah), rot), xfrm


def _parse_run_style(rpr: Optional[ET.Element]) -> TextStyle:
    if rpr is None:
        return TextStyle()
    size = rpr.get("sz")
    bold = rpr.get("b")
    italic = rpr.get("i")
    underline = rpr.get("u")
    color = None
    fill = rpr.find(f"{qn('a:solidFill')}/{qn('a:srgbClr')}")
    if fill is not None:
        color = (fill.get("val") or "").upper() or None
    latin = rpr.find(qn("a:latin"))
    return TextStyle(
        font_family=latin.get("typeface") if latin is not None else None,
        size_half_points=int(round(int(size) / 50)) if size else None,
        bold=None if bold is None else bold in ("1", "true"),
        italic=None if italic is None else italic in ("1", "true"),
        underline=None if underline is None else underline != "none",
        color=color if color and len(color) == 6 else None,
    )


def parse_tx_body(tx_body: ET.Element) -> TextContent:
    paragraphs = []
    for p in tx_body.findall(qn("a:p")):
        ppr = p.find(qn("a:pPr"))
        alignment = None
        bullet = None
        if ppr is not None:
            alignment = _ALIGN_FROM_ALGN.get(ppr.get("algn", ""))
            bu_char = ppr.find(qn("a:buChar"))
            if bu_char is not None:
                bullet = bu_char.get("char")
            elif ppr.find(qn("a:buAutoNum")) is not None:
                bullet = "auto"
        runs = []
        for node in p:
            if node.tag == qn("a:r"):
                t = node.find(qn("a:t"))
                runs.append(TextRun(
                    text=t.text or "" if t is not None else "",
                    style=_parse_run_style(node.find(qn("a:rPr"))),
                ))
            elif node.tag == qn("a:br"):
                runs.append(TextRun(text="\n"))
        paragraphs.append(Paragraph(runs=runs, alignment=alignment, bullet=bullet))
    return TextContent(paragraphs)


def _parse_shape_style(sp_pr: Optional[ET.Element]) -> ShapeStyle:
    fill_color = None
    border_color = None
    border_width = None
    preset = None
    if sp_pr is not None:
        prst = sp_pr.find(qn("a:prstGeom"))
        if prst is not None:
            preset = prst.get("prst")
        fill = sp_pr.find(f"{qn('a:solidFill')}/{qn('a:srgbClr')}")
        if fill is not None:
            val = (fill.get("val") or "").upper()
            fill_color = val if len(val) == 6 else None
        ln = sp_pr.find(qn("a:ln"))
        if ln is not None:
            if ln.get("w"):
                border_width = int(ln.get("w"))
            ln_fill = ln.find(f"{qn('a:solidFill')}/{qn('a:srgbClr')}")
            if ln_fill is not None:
                val = (ln_fill.get("val") or "").upper()
                border_color = val if len(val) == 6 else None
    return ShapeStyle(
        fill_color=fill_color,
        border_color=border_color,
        border_width=border_width,
        preset=preset,
    )


def _cnvpr_of(node: ET.Element) -> Optional[ET.Element]:
    for nv_tag in ("p:nvSpPr", "p:nvPicPr", "p:nvGrpSpPr", "p:nvGraphicFramePr", "p:nvCxnSpPr"):
        nv = node.find(qn(nv_tag))
        if nv is not None:
            return nv.find(qn("p:cNvPr"))
    return None


_GROUP_CHILD_TAGS = (
    "p:sp", "p:pic", "p:grpSp", "p:graphicFrame", "p:cxnSp", "p:contentPart",
)


def _strip_residue(node: ET.Element, parsed_style: Optional[ShapeStyle]) -> str:
    """Serialize the fragment minus everything owned by the element model.

    The writer re-injects model state (geometry, text paragraphs, parsed
    fills/borders, image relationship ids, group members) on save; stripping
    the same pieces here makes residue -> write -> load -> strip a fixed
    point, so untouched content never churns.
    """
    if node.tag == qn("p:graphicFrame"):
        xfrm = node.find(qn("p:xfrm"))
        if xfrm is not None:
            node.remove(xfrm)
        return serialize_fragment(node)
    if node.tag == qn("p:grpSp"):
        grp_pr = node.find(qn("p:grpSpPr"))
        if grp_pr is not None:
            xfrm = grp_pr.find(qn("a:xfrm"))
            if xfrm is not None:
                grp_pr.remove(xfrm)
        for child in list(node):
            if child.tag in tuple(qn(t) for t in _GROUP_CHILD_TAGS):
                node.remove(child)
        return serialize_fragment(node)
    sp_pr = node.find(qn("p:spPr"))
    if sp_pr is not None:
        xfrm = sp_pr.find(qn("a:xfrm"))
        if xfrm is not None:
            sp_pr.remove(xfrm)
        if parsed_style is not None:
            if parsed_style.fill_color is not None:
                fill = sp_pr.find(qn("a:solidFill"))
                if fill is not None:
                    sp_pr.remove(fill)
            ln = sp_pr.find(qn("a:ln"))
            if ln is not None:
                if parsed_style.border_width is not None and "w" in ln.attrib:
                    del ln.attrib["w"]
                if parsed_style.border_color is not None:
                    ln_fill = ln.find(qn("a:solidFill"))
                    if ln_fill is not None:
                        ln.remove(ln_fill)
    body = node.find(qn("p:txBody"))
    if body is not None:
        for p in body.findall(qn("a:p")):
            body.remove(p)
    blip = node.find(f"{qn('p:blipFill')}/{qn('a:blip')}")
    if blip is not None and qn("r:embed") in blip.attrib:
        del blip.attrib[qn("r:embed")]
    return serialize_fragment(node)


_FILL_TAGS = ("a:noFill", "a:solidFill", "a:gradFill", "a:blipFill", "a:pattFill",
              "a:grpFill")


def _is_textbox(sp: ET.Element, text: Optional[TextContent]) -> bool:
    """Textbox iff marked as one (txBox / placeholder) or it's bare text.

    'Bare text' means a shape tree <sp> carrying text but no explicit fill
    and no explicit geometry; anything with its own visual body stays a
    shape (possibly with text), so the classification is stable across a
    save/reload cycle.
    """
    nv = sp.find(qn("p:nvSpPr"))
    if nv is not None:
        cnv = nv.find(qn("p:cNvSpPr"))
        if cnv is not None and cnv.get("txBox") in ("1", "true"):
            return True
        nvpr = nv.find(qn("p:nvPr"))
        if nvpr is not None and nvpr.find(qn("p:ph")) is not None and text is not None:
            return True
    if text is None or not any(r.text.strip() for r in text.iter_runs()):
        return False
    sp_pr = sp.find(qn("p:spPr"))
    if sp_pr is None:
        return True
    has_fill = any(sp_pr.find(qn(t)) is not None for t in _FILL_TAGS)
    has_geom = (sp_pr.find(qn("a:prstGeom")) is not None
                or sp_pr.find(qn("a:custGeom")) is not None)
    return not has_fill and not has_geom


class _SlideParser:
    def __init__(self, container: PptxContainer, slide_path: str, deck: DeckDocument):
        self.container = container
        self.slide_path = slide_path
        self.deck = deck
        self.rels = container.relationships(slide_path)
        self.elements: dict[str, Element] = {}
        self.used_ids: set[int] = set()

    def _element_id(self, cnvpr: Optional[ET.Element]) -> str:
        raw = None
        if cnvpr is not None:
            try:
                raw = int(cnvpr.get("id", ""))
            except ValueError:
                raw = None
        if raw is None or raw in self.used_ids or raw <= 0:
            raw = max(self.used_ids, default=0) + 1
        self.used_ids.add(raw)
        return f"e{raw}"

    def _register_image(self, blip: ET.Element) -> Optional[str]:
        rid = blip.get(qn("r:embed"))
        if rid is None or rid not in self.rels:
            return None
        rel = self.rels[rid]
        if rel.external:
            return None
        part = self.container.resolve_target(self.slide_path, rel.target)
        if part not in self.container.parts:
            raise PptxFormatError(f"image relationship target missing: {part!r}")
        data = self.container.parts[part]
        if not data:
            raise PptxFormatError(f"image part is empty: {part!r}")
        if part not in self.deck.assets:
            self.deck.assets[part] = Asset(
                media_type=_media_type_for(part),
                data=data,
                natural_size=_natural_size(data),
            )
        return part

    def parse_node(self, node: ET.Element, xf: _Xform, order: list[str]) -> None:
        tag = node.tag
        if tag == qn("p:sp"):
            self._parse_sp(node, xf, order)
        elif tag == qn("p:pic"):
            self._parse_pic(node, xf, order)
        elif tag == qn("p:grpSp"):
            self._parse_grp(node, xf, order)
        elif tag in (qn("p:nvGrpSpPr"), qn("p:grpSpPr")):
            return
        else:
            self._parse_opaque(node, xf, order)

    def _add(self, el: Element, order: list[str]) -> None:
        self.elements[el.id] = el
        order.append(el.id)

    def _parse_sp(self, sp: ET.Element, xf: _Xform, order: list[str]) -> None:
        cnvpr = _cnvpr_of(sp)
        eid = self._element_id(cnvpr)
        sp_pr = sp.find(qn("p:spPr"))
        geometry, _ = _parse_xfrm(sp_pr.find(qn("a:xfrm")) if sp_pr is not None else None, xf)
        tx_body = sp.find(qn("p:txBody"))
        text = parse_tx_body(tx_body) if tx_body is not None else None
        style = _parse_shape_style(sp_pr)
        if _is_textbox(sp, text):
            kind = "textbox"
            shape = None
            if text is None:
                text = TextContent([Paragraph()])
        else:
            kind = "shape"
            shape = style
        self._add(Element(
            id=eid,
            kind=kind,
            name=cnvpr.get("name") if cnvpr is not None else None,
            geometry=geometry,
            text=text,
            shape=shape,
            opaque_payload=_strip_residue(sp, shape),
        ), order)

    def _parse_pic(self, pic: ET.Element, xf: _Xform, order: list[str]) -> None:
        cnvpr = _cnvpr_of(pic)
        eid = self._element_id(cnvpr)
        sp_pr = pic.find(qn("p:spPr"))
        geometry, _ = _parse_xfrm(sp_pr.find(qn("a:xfrm")) if sp_pr is not None else None, xf)
        blip = pic.find(f"{qn('p:blipFill')}/{qn('a:blip')}")
        asset_key = self._register_image(blip) if blip is not None else None
        if asset_key is None:
            # A picture without resolvable media: keep it opaque.
            self._add(Element(
                id=eid,
                kind="shape",
                name=cnvpr.get("name") if cnvpr is not None else None,
                geometry=geometry,
                shape=ShapeStyle(),
                opaque_payload=_strip_residue(pic, None),
            ), order)
            return
        nat = self.deck.assets[asset_key].natural_size
        aspect = (nat[0] / nat[1]) if nat and nat[1] else 1.0
        self._add(Element(
            id=eid,
            kind="image",
            name=cnvpr.get("name") if cnvpr is not None else None,
            geometry=geometry,
            image=ImageRef(asset_key=asset_key, natural_aspect=aspect),
            opaque_payload=_strip_residue(pic, None),
        ), order)

    def _parse_grp(self, grp: ET.Element, xf: _Xform, order: list[str]) -> None:
        cnvpr = _cnvpr_of(grp)
        eid = self._element_id(cnvpr)
        grp_pr = grp.find(qn("p:grpSpPr"))
        xfrm = grp_pr.find(qn("a:xfrm")) if grp_pr is not None else None
        geometry, _ = _parse_xfrm(xfrm, xf)
        child_xf = _Xform()
        if xfrm is not None:
            ch_off = xfrm.find(qn("a:chOff"))
            ch_ext = xfrm.find(qn("a:chExt"))
            cox = int(ch_off.get("x", "0")) if ch_off is not None else 0
            coy = int(ch_off.get("y", "0")) if ch_off is not None else 0
            cew = int(ch_ext.get("cx", "0")) if ch_ext is not None else geometry.width
            ceh = int(ch_ext.get("cy", "0")) if ch_ext is not None else geometry.height
            child_xf = _Xform(
                ox=float(geometry.x),
                oy=float(geometry.y),
                cx=float(cox),
                cy=float(coy),
                sx=(geometry.width / cew) if cew else 1.0,
                sy=(geometry.height / ceh) if ceh else 1.0,
            )
        child_order: list[str] = []
        for child in grp:
            self.parse_node(child, child_xf, child_order)
        if not child_order:
            # Empty group: not representable (groups need children) -> opaque shape.
            self._add(Element(
                id=eid,
                kind="shape",
                name=cnvpr.get("name") if cnvpr is not None else None,
                geometry=geometry,
                shape=ShapeStyle(),
                opaque_payload=_strip_residue(grp, None),
            ), order)
            return
        # The group's semantic bounds are its members' union; the declared
        # extent is only the child-space transform and may not be tight.
        child_bounds = union_geometry(
            [self.elements[cid].geometry for cid in child_order])
        geometry = Geometry(child_bounds.x, child_bounds.y, child_bounds.width,
                            child_bounds.height, geometry.rotation)
        self._add(Element(
            id=eid,
            kind="group",
            name=cnvpr.get("name") if cnvpr is not None else None,
            geometry=geometry,
            children=child_order,
            opaque_payload=_strip_residue(grp, None),
        ), order)

    def _parse_opaque(self, node: ET.Element, xf: _Xform, order: list[str]) -> None:
        cnvpr = _cnvpr_of(node)
        eid = self._element_id(cnvpr)
        patchable = node.tag in (qn("p:graphicFrame"), qn("p:cxnSp"))
        geometry = Geometry(0, 0, 0, 0)
        if patchable:
            xfrm = node.find(qn("p:xfrm"))  # graphicFrame carries p:xfrm directly
            if xfrm is None:
                sp_pr = node.find(qn("p:spPr"))
                if sp_pr is not None:
                    xfrm = sp_pr.find(qn("a:xfrm"))
            geometry, _ = _parse_xfrm(xfrm, xf)
        payload = _strip_residue(node, None) if patchable else serialize_fragment(node)
        self._add(Element(
            id=eid,
            kind="shape",
            name=cnvpr.get("name") if cnvpr is not None else None,
            geometry=geometry,
            shape=ShapeStyle(),
            opaque_payload=payload,
        ), order)

    def parse(self, width: int, height: int) -> Slide:
        root = self.container.xml(self.slide_path)
        sp_tree = root.find(f"{qn('p:cSld')}/{qn('p:spTree')}")
        if sp_tree is None:
            raise PptxFormatError(f"{self.slide_path!r}: no shape tree")
        order: list[str] = []
        for node in sp_tree:
            self.parse_node(node, _Xform(), order)
        slide = Slide(width=width, height=height, elements=self.elements, root_order=order)
        slide.renumber_z()
        return slide


def load_pptx(data: bytes) -> DeckDocument:
    """Parse pptx bytes into the canonical deck model."""
    container = PptxContainer.from_bytes(data)
    width, height = container.slide_size()
    deck = DeckDocument(
        source_digest="sha256:" + hashlib.sha256(data).hexdigest(),
    )
    for slide_path in container.slide_parts():
        parser = _SlideParser(container, slide_path, deck)
        deck.slides.append(parser.parse(width, height))
    if not deck.slides:
        deck.slides.append(Slide(width=width or 9144000, height=height or 6858000))
    max_id = 0
    for slide in deck.slides:
        for eid in slide.elements:
            digits = "".join(ch for ch in eid if ch.isdigit())
            if digits:
                max_id = max(max_id, int(digits))
    deck.next_id = max_id + 1
    return deck
