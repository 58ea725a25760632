"""Serialize a DeckDocument back into a pptx container.

Two modes. With the original container available, untouched slides (and
every non-slide part) are copied byte-identical; only slides whose model
state actually changed are re-serialized, starting from the element's
preserved source fragment so unmodeled XML survives. Without an
original, a minimal but valid container (master, layout, theme) is
built from templates.
"""

from __future__ import annotations

import logging
import posixpath
import re
import xml.etree.ElementTree as ET
from xml.sax.saxutils import quoteattr

from ..model import DeckDocument, Element, Slide, union_geometry, validate_deck
from ..canonical import deck_to_dict
from .container import PptxContainer, Relationship
from .names import (
    CT_PRESENTATION,
    CT_RELATIONSHIPS,
    CT_SLIDE,
    CT_SLIDE_LAYOUT,
    CT_SLIDE_MASTER,
    CT_THEME,
    EXT_BY_MEDIA_TYPE,
    MEDIA_TYPES_BY_EXT,
    NS,
    REL_IMAGE,
    REL_SLIDE,
    REL_SLIDE_LAYOUT,
    REL_SLIDE_MASTER,
    REL_THEME,
    XML_DECL,
    parse_fragment,
    qn,
    serialize_part,
)
from .read import load_pptx

log = logging.getLogger(__name__)

_ALGN_FROM_ALIGN = {"left": "l", "center": "ctr", "right": "r", "justify": "just"}

_SHAPE_FILL_TAGS = [
    qn("a:noFill"), qn("a:solidFill"), qn("a:gradFill"),
    qn("a:blipFill"), qn("a:pattFill"), qn("a:grpFill"),
]
_GEOM_TAGS = [qn("a:prstGeom"), qn("a:custGeom")]


class MissingAssetError(ValueError):
    """An element references an asset whose bytes are unavailable."""

    def __init__(self, asset_key: str):
        self.asset_key = asset_key
        super().__init__(f"asset {asset_key!r} referenced but has no bytes")


def _int_id(element_id: str) -> int:
    digits = "".join(ch for ch in element_id if ch.isdigit())
    return int(digits) if digits else 1


# --- text serialization -------------------------------------------------

def _run_pr_xml(style) -> ET.Element | None:
    attrs = {}
    if style.size_half_points is not None:
        attrs["sz"] = str(style.size_half_points * 50)
    if style.bold is not None:
        attrs["b"] = "1" if style.bold else "0"
    if style.italic is not None:
        attrs["i"] = "1" if style.italic else "0"
    if style.underline is not None:
        attrs["u"] = "sng" if style.underline else "none"
    needs_children = style.color is not None or style.font_family is not None
    if not attrs and not needs_children:
        return None
    rpr = ET.Element(qn("a:rPr"), {"lang": "en-US", **attrs})
    if style.color is not None:
        fill = ET.SubElement(rpr, qn("a:solidFill"))
        ET.SubElement(fill, qn("a:srgbClr"), {"val": style.color})
    if style.font_family is not None:
        ET.SubElement(rpr, qn("a:latin"), {"typeface": style.font_family})
    return rpr


def _paragraph_xml(paragraph) -> ET.Element:
    p = ET.Element(qn("a:p"))
    if paragraph.alignment is not None or paragraph.bullet is not None:
        ppr = ET.SubElement(p, qn("a:pPr"))
        if paragraph.alignment is not None:
            ppr.set("algn", _ALGN_FROM_ALIGN[paragraph.alignment])
        if paragraph.bullet == "auto":
            ET.SubElement(ppr, qn("a:buAutoNum"), {"type": "arabicPeriod"})
        elif paragraph.bullet is not None:
            ET.SubElement(ppr, qn("a:buChar"), {"char": paragraph.bullet})
    for run in paragraph.runs:
        pieces = run.text.split("\n")
        for i, piece in enumerate(pieces):
            if i > 0:
                ET.SubElement(p, qn("a:br"))
            if piece == "":
                continue
            r = ET.SubElement(p, qn("a:r"))
            rpr = _run_pr_xml(run.style)
            if rpr is not None:
                r.append(rpr)
            t = ET.SubElement(r, qn("a:t"))
            t.text = piece
    return p


def _write_tx_body(node: ET.Element, el: Element, body_tag: str) -> None:
    """Write the model's paragraphs into the node's text body."""
    if el.text is None:
        return
    body = node.find(qn(body_tag))
    if body is None:
        body = ET.SubElement(node, qn(body_tag))
        ET.SubElement(body, qn("a:bodyPr"))
        ET.SubElement(body, qn("a:lstStyle"))
    for p in body.findall(qn("a:p")):
        body.remove(p)
    for paragraph in el.text.paragraphs:
        body.append(_paragraph_xml(paragraph))
    if not el.text.paragraphs:
        body.append(ET.Element(qn("a:p")))


# --- geometry / style patching ------------------------------------------

def _ensure_child(parent: ET.Element, tag: str, index: int | None = None) -> ET.Element:
    found = parent.find(qn(tag))
    if found is not None:
        return found
    child = ET.Element(qn(tag))
    if index is None:
        parent.append(child)
    else:
        parent.insert(index, child)
    return child


def _write_xfrm(xfrm: ET.Element, geometry, with_child_space: bool) -> None:
    off = _ensure_child(xfrm, "a:off", 0)
    off.set("x", str(geometry.x))
    off.set("y", str(geometry.y))
    ext = _ensure_child(xfrm, "a:ext", 1)
    ext.set("cx", str(geometry.width))
    ext.set("cy", str(geometry.height))
    if with_child_space:
        ch_off = _ensure_child(xfrm, "a:chOff", 2)
        ch_off.set("x", str(geometry.x))
        ch_off.set("y", str(geometry.y))
        ch_ext = _ensure_child(xfrm, "a:chExt", 3)
        ch_ext.set("cx", str(geometry.width))
        ch_ext.set("cy", str(geometry.height))
    rot = int(round(geometry.rotation * 60000))
    if rot:
        xfrm.set("rot", str(rot))
    elif "rot" in xfrm.attrib:
        del xfrm.attrib["rot"]


def _patch_cnvpr(node: ET.Element, el: Element) -> None:
    for nv_tag in ("p:nvSpPr", "p:nvPicPr", "p:nvGrpSpPr", "p:nvGraphicFramePr",
                   "p:nvCxnSpPr"):
        nv = node.find(qn(nv_tag))
        if nv is None:
            continue
        cnvpr = nv.find(qn("p:cNvPr"))
        if cnvpr is None:
            continue
        cnvpr.set("id", str(_int_id(el.id)))
        if el.name is not None:
            cnvpr.set("name", el.name)
        elif "name" not in cnvpr.attrib:
            cnvpr.set("name", el.id)
        return


def _patch_sp_pr(sp_pr: ET.Element, el: Element) -> None:
    xfrm = _ensure_child(sp_pr, "a:xfrm", 0)
    _write_xfrm(xfrm, el.geometry, with_child_space=False)
    if el.shape is None:
        return
    children = list(sp_pr)

    def index_after(tags: list[str], fallback: int) -> int:
        for i in range(len(children) - 1, -1, -1):
            if children[i].tag in tags:
                return i + 1
        return fallback

    if el.shape.preset is not None:
        geom = None
        for tag in _GEOM_TAGS:
            found = sp_pr.find(tag)
            if found is not None:
                geom = found
                break
        if geom is not None and geom.tag != qn("a:prstGeom"):
            sp_pr.remove(geom)
            geom = None
        if geom is None:
            geom = ET.Element(qn("a:prstGeom"))
            ET.SubElement(geom, qn("a:avLst"))
            sp_pr.insert(index_after([qn("a:xfrm")], 1), geom)
            children = list(sp_pr)
        geom.set("prst", el.shape.preset)
    if el.shape.fill_color is not None:
        for tag in _SHAPE_FILL_TAGS:
            found = sp_pr.find(tag)
            if found is not None:
                sp_pr.remove(found)
        fill = ET.Element(qn("a:solidFill"))
        ET.SubElement(fill, qn("a:srgbClr"), {"val": el.shape.fill_color})
        children = list(sp_pr)
        sp_pr.insert(index_after(_GEOM_TAGS + [qn("a:xfrm")], len(children)), fill)
    if el.shape.border_color is not None or el.shape.border_width is not None:
        ln = sp_pr.find(qn("a:ln"))
        if ln is None:
            ln = ET.SubElement(sp_pr, qn("a:ln"))
        if el.shape.border_width is not None:
            ln.set("w", str(el.shape.border_width))
        if el.shape.border_color is not None:
            for tag in _SHAPE_FILL_TAGS:
                found = ln.find(tag)
                if found is not None:
                    ln.remove(found)
            fill = ET.Element(qn("a:solidFill"))
            ET.SubElement(fill, qn("a:srgbClr"), {"val": el.shape.border_color})
            ln.insert(0, fill)


# --- element templates ----------------------------------------------------

def _template_sp(el: Element, textbox: bool) -> ET.Element:
    sp = ET.Element(qn("p:sp"))
    nv = ET.SubElement(sp, qn("p:nvSpPr"))
    ET.SubElement(nv, qn("p:cNvPr"), {"id": str(_int_id(el.id)), "name": el.name or el.id})
    cnv = ET.SubElement(nv, qn("p:cNvSpPr"))
    if textbox:
        cnv.set("txBox", "1")
    ET.SubElement(nv, qn("p:nvPr"))
    sp_pr = ET.SubElement(sp, qn("p:spPr"))
    geom = ET.SubElement(sp_pr, qn("a:prstGeom"), {"prst": "rect"})
    ET.SubElement(geom, qn("a:avLst"))
    if textbox:
        ET.SubElement(sp_pr, qn("a:noFill"))
    body = ET.SubElement(sp, qn("p:txBody"))
    ET.SubElement(body, qn("a:bodyPr"), {"wrap": "square"})
    ET.SubElement(body, qn("a:lstStyle"))
    return sp


def _template_pic(el: Element) -> ET.Element:
    pic = ET.Element(qn("p:pic"))
    nv = ET.SubElement(pic, qn("p:nvPicPr"))
    ET.SubElement(nv, qn("p:cNvPr"), {"id": str(_int_id(el.id)), "name": el.name or el.id})
    ET.SubElement(nv, qn("p:cNvPicPr"))
    ET.SubElement(nv, qn("p:nvPr"))
    blip_fill = ET.SubElement(pic, qn("p:blipFill"))
    ET.SubElement(blip_fill, qn("a:blip"))
    stretch = ET.SubElement(blip_fill, qn("a:stretch"))
    ET.SubElement(stretch, qn("a:fillRect"))
    sp_pr = ET.SubElement(pic, qn("p:spPr"))
    geom = ET.SubElement(sp_pr, qn("a:prstGeom"), {"prst": "rect"})
    ET.SubElement(geom, qn("a:avLst"))
    return pic


def _template_grp(el: Element) -> ET.Element:
    grp = ET.Element(qn("p:grpSp"))
    nv = ET.SubElement(grp, qn("p:nvGrpSpPr"))
    ET.SubElement(nv, qn("p:cNvPr"), {"id": str(_int_id(el.id)), "name": el.name or el.id})
    ET.SubElement(nv, qn("p:cNvGrpSpPr"))
    ET.SubElement(nv, qn("p:nvPr"))
    ET.SubElement(grp, qn("p:grpSpPr"))
    return grp


_SHAPE_CONTAINER_TAGS = {qn("p:sp"), qn("p:pic"), qn("p:grpSp"),
                         qn("p:graphicFrame"), qn("p:cxnSp")}


_PATCHABLE_TAGS = {qn("p:sp"), qn("p:pic"), qn("p:grpSp"), qn("p:graphicFrame"),
                   qn("p:cxnSp")}


def element_xml(el: Element, slide: Slide, rid_for_asset: dict[str, str]) -> ET.Element:
    """Serialize one element, starting from its source fragment if present."""
    node = parse_fragment(el.opaque_payload) if el.opaque_payload else None
    if node is not None and node.tag not in _PATCHABLE_TAGS:
        # Exotic slide content (AlternateContent, content parts): verbatim.
        return node
    if el.kind == "group":
        if node is None or node.tag != qn("p:grpSp"):
            node = _template_grp(el)
        _patch_cnvpr(node, el)
        grp_pr = _ensure_child(node, "p:grpSpPr", 1)
        members = [slide.elements[cid] for cid in (el.children or [])]
        bounds = el.geometry
        if members:
            u = union_geometry([m.geometry for m in members])
            bounds = type(el.geometry)(u.x, u.y, u.width, u.height, el.geometry.rotation)
        xfrm = _ensure_child(grp_pr, "a:xfrm", 0)
        _write_xfrm(xfrm, bounds, with_child_space=True)
        for child in list(node):
            if child.tag in _SHAPE_CONTAINER_TAGS:
                node.remove(child)
        for member in members:
            node.append(element_xml(member, slide, rid_for_asset))
        return node
    if el.kind == "image" and node is not None and node.tag != qn("p:pic"):
        node = None
    if node is None:
        if el.kind == "image":
            node = _template_pic(el)
        else:
            node = _template_sp(el, textbox=el.kind == "textbox")
    _patch_cnvpr(node, el)
    if node.tag == qn("p:graphicFrame"):
        xfrm = node.find(qn("p:xfrm"))
        if xfrm is None:
            xfrm = ET.Element(qn("p:xfrm"))
            node.insert(1, xfrm)
        _write_xfrm(xfrm, el.geometry, with_child_space=False)
        return node
    if node.tag == qn("p:grpSp"):
        # Shape-kind element wrapping an empty group fragment: geometry only.
        grp_pr = _ensure_child(node, "p:grpSpPr", 1)
        xfrm = _ensure_child(grp_pr, "a:xfrm", 0)
        _write_xfrm(xfrm, el.geometry, with_child_space=True)
        return node
    sp_pr = node.find(qn("p:spPr"))
    if sp_pr is None:
        sp_pr = ET.SubElement(node, qn("p:spPr"))
    _patch_sp_pr(sp_pr, el)
    if node.tag == qn("p:pic") and el.image is not None:
        blip_fill = _ensure_child(node, "p:blipFill", 1)
        blip = _ensure_child(blip_fill, "a:blip", 0)
        rid = rid_for_asset.get(el.image.asset_key)
        if rid is not None:
            blip.set(qn("r:embed"), rid)
    if node.tag == qn("p:sp"):
        _write_tx_body(node, el, "p:txBody")
    return node


# --- slide part -----------------------------------------------------------

def _template_slide_root() -> ET.Element:
    sld = ET.Element(qn("p:sld"))
    c_sld = ET.SubElement(sld, qn("p:cSld"))
    tree = ET.SubElement(c_sld, qn("p:spTree"))
    nv = ET.SubElement(tree, qn("p:nvGrpSpPr"))
    ET.SubElement(nv, qn("p:cNvPr"), {"id": "1", "name": ""})
    ET.SubElement(nv, qn("p:cNvGrpSpPr"))
    ET.SubElement(nv, qn("p:nvPr"))
    grp_pr = ET.SubElement(tree, qn("p:grpSpPr"))
    xfrm = ET.SubElement(grp_pr, qn("a:xfrm"))
    ET.SubElement(xfrm, qn("a:off"), {"x": "0", "y": "0"})
    ET.SubElement(xfrm, qn("a:ext"), {"cx": "0", "cy": "0"})
    ET.SubElement(xfrm, qn("a:chOff"), {"x": "0", "y": "0"})
    ET.SubElement(xfrm, qn("a:chExt"), {"cx": "0", "cy": "0"})
    clr = ET.SubElement(sld, qn("p:clrMapOvr"))
    ET.SubElement(clr, qn("a:masterClrMapping"))
    return sld


def build_slide_part(slide: Slide, base_xml: bytes | None,
                     rid_for_asset: dict[str, str]) -> bytes:
    root = ET.fromstring(base_xml) if base_xml else _template_slide_root()
    sp_tree = root.find(f"{qn('p:cSld')}/{qn('p:spTree')}")
    if sp_tree is None:
        root = _template_slide_root()
        sp_tree = root.find(f"{qn('p:cSld')}/{qn('p:spTree')}")
    keep = [child for child in sp_tree
            if child.tag in (qn("p:nvGrpSpPr"), qn("p:grpSpPr"))]
    for child in list(sp_tree):
        sp_tree.remove(child)
    for child in keep:
        sp_tree.append(child)
    for eid in slide.root_order:
        sp_tree.append(element_xml(slide.elements[eid], slide, rid_for_asset))
    return serialize_part(root)


# --- rels / content types as strings --------------------------------------

def rels_part(rels: list[Relationship]) -> bytes:
    lines = [XML_DECL.decode("utf-8").rstrip("\r\n")]
    lines.append(f'<Relationships xmlns="{NS["rel"]}">')
    for rel in rels:
        extra = ' TargetMode="External"' if rel.external else ""
        lines.append(
            f'<Relationship Id={quoteattr(rel.rel_id)} Type={quoteattr(rel.rel_type)} '
            f'Target={quoteattr(rel.target)}{extra}/>'
        )
    lines.append("</Relationships>")
    return "".join(lines).encode("utf-8")


def content_types_part(defaults: dict[str, str], overrides: dict[str, str]) -> bytes:
    lines = [XML_DECL.decode("utf-8").rstrip("\r\n")]
    lines.append(f'<Types xmlns="{NS["ct"]}">')
    for ext in sorted(defaults):
        lines.append(f'<Default Extension={quoteattr(ext)} '
                     f'ContentType={quoteattr(defaults[ext])}/>')
    for part in sorted(overrides):
        lines.append(f'<Override PartName={quoteattr(part)} '
                     f'ContentType={quoteattr(overrides[part])}/>')
    lines.append("</Types>")
    return "".join(lines).encode("utf-8")


# --- minimal master / layout / theme --------------------------------------

_THEME_XML = (
    XML_DECL.decode() +
    '<a:theme xmlns:a="{a}" name="Office">'
    '<a:themeElements>'
    '<a:clrScheme name="Office">'
    '<a:dk1><a:srgbClr val="000000"/></a:dk1><a:lt1><a:srgbClr val="FFFFFF"/></a:lt1>'
    '<a:dk2><a:srgbClr val="44546A"/></a:dk2><a:lt2><a:srgbClr val="E7E6E6"/></a:lt2>'
    '<a:accent1><a:srgbClr val="4472C4"/></a:accent1>'
    '<a:accent2><a:srgbClr val="ED7D31"/></a:accent2>'
    '<a:accent3><a:srgbClr val="A5A5A5"/></a:accent3>'
    '<a:accent4><a:srgbClr val="FFC000"/></a:accent4>'
    '<a:accent5><a:srgbClr val="5B9BD5"/></a:accent5>'
    '<a:accent6><a:srgbClr val="70AD47"/></a:accent6>'
    '<a:hlink><a:srgbClr val="0563C1"/></a:hlink>'
    '<a:folHlink><a:srgbClr val="954F72"/></a:folHlink>'
    '</a:clrScheme>'
    '<a:fontScheme name="Office">'
    '<a:majorFont><a:latin typeface="Calibri Light"/><a:ea typeface=""/><a:cs typeface=""/></a:majorFont>'
    '<a:minorFont><a:latin typeface="Calibri"/><a:ea typeface=""/><a:cs typeface=""/></a:minorFont>'
    '</a:fontScheme>'
    '<a:fmtScheme name="Office">'
    '<a:fillStyleLst><a:solidFill><a:schemeClr val="phClr"/></a:solidFill>'
    '<a:solidFill><a:schemeClr val="phClr"/></a:solidFill>'
    '<a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:fillStyleLst>'
    '<a:lnStyleLst><a:ln w="6350"><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln>'
    '<a:ln w="12700"><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln>'
    '<a:ln w="19050"><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln></a:lnStyleLst>'
    '<a:effectStyleLst><a:effectStyle><a:effectLst/></a:effectStyle>'
    '<a:effectStyle><a:effectLst/></a:effectStyle>'
    '<a:effectStyle><a:effectLst/></a:effectStyle></a:effectStyleLst>'
    '<a:bgFillStyleLst><a:solidFill><a:schemeClr val="phClr"/></a:solidFill>'
    '<a:solidFill><a:schemeClr val="phClr"/></a:solidFill>'
    '<a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:bgFillStyleLst>'
    '</a:fmtScheme>'
    '</a:themeElements>'
    '</a:theme>'
).format(a=NS["a"]).encode("utf-8")

_MASTER_XML = (
    XML_DECL.decode() +
    '<p:sldMaster xmlns:a="{a}" xmlns:p="{p}" xmlns:r="{r}">'
    '<p:cSld><p:spTree>'
    '<p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr>'
    '<p:grpSpPr/>'
    '</p:spTree></p:cSld>'
    '<p:clrMap bg1="lt1" tx1="dk1" bg2="lt2" tx2="dk2" accent1="accent1" '
    'accent2="accent2" accent3="accent3" accent4="accent4" accent5="accent5" '
    'accent6="accent6" hlink="hlink" folHlink="folHlink"/>'
    '<p:sldLayoutIdLst><p:sldLayoutId id="2147483649" r:id="rId1"/></p:sldLayoutIdLst>'
    '</p:sldMaster>'
).format(a=NS["a"], p=NS["p"], r=NS["r"]).encode("utf-8")

_LAYOUT_XML = (
    XML_DECL.decode() +
    '<p:sldLayout xmlns:a="{a}" xmlns:p="{p}" type="blank">'
    '<p:cSld><p:spTree>'
    '<p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr>'
    '<p:grpSpPr/>'
    '</p:spTree></p:cSld>'
    '<p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr>'
    '</p:sldLayout>'
).format(a=NS["a"], p=NS["p"]).encode("utf-8")


def _presentation_xml(doc: DeckDocument, slide_count: int) -> bytes:
    width = doc.slides[0].width if doc.slides else 9144000
    height = doc.slides[0].height if doc.slides else 6858000
    slide_ids = "".join(
        f'<p:sldId id="{256 + i}" r:id="rId{2 + i}"/>' for i in range(slide_count)
    )
    xml = (
        XML_DECL.decode() +
        f'<p:presentation xmlns:a="{NS["a"]}" xmlns:p="{NS["p"]}" xmlns:r="{NS["r"]}">'
        f'<p:sldMasterIdLst><p:sldMasterId id="2147483648" r:id="rId1"/></p:sldMasterIdLst>'
        f'<p:sldIdLst>{slide_ids}</p:sldIdLst>'
        f'<p:sldSz cx="{width}" cy="{height}"/>'
        f'<p:notesSz cx="6858000" cy="9144000"/>'
        f'</p:presentation>'
    )
    return xml.encode("utf-8")


# --- asset bookkeeping -----------------------------------------------------

def _referenced_asset_keys(doc: DeckDocument) -> set[str]:
    keys = set()
    for slide in doc.slides:
        for el in slide.elements.values():
            if el.image is not None:
                keys.add(el.image.asset_key)
    return keys


def _asset_bytes(doc: DeckDocument, key: str, original: PptxContainer | None) -> bytes:
    asset = doc.assets.get(key)
    if asset is not None and asset.data is not None:
        return asset.data
    if original is not None and key in original.parts:
        return original.parts[key]
    raise MissingAssetError(key)


def _allocate_media_paths(doc: DeckDocument, referenced: set[str],
                          existing_parts: set[str]) -> dict[str, str]:
    """Map every referenced asset key to a media part path."""
    mapping: dict[str, str] = {}
    used = set(existing_parts)
    next_n = 1
    for part in existing_parts:
        m = re.match(r"ppt/media/image(\d+)\.", part)
        if m:
            next_n = max(next_n, int(m.group(1)) + 1)
    for key in sorted(referenced):
        if key in existing_parts or key.startswith("ppt/media/"):
            mapping[key] = key
            used.add(key)
            continue
        asset = doc.assets.get(key)
        ext = EXT_BY_MEDIA_TYPE.get(asset.media_type if asset else "", "png")
        path = f"ppt/media/image{next_n}.{ext}"
        while path in used:
            next_n += 1
            path = f"ppt/media/image{next_n}.{ext}"
        mapping[key] = path
        used.add(path)
        next_n += 1
    return mapping


def _slide_dicts_equal(doc_dict: dict, orig_dict: dict, index: int) -> bool:
    if index >= len(orig_dict["slides"]) or index >= len(doc_dict["slides"]):
        return False
    if doc_dict["slides"][index] != orig_dict["slides"][index]:
        return False
    # Referenced assets must also be unchanged (digest + media type).
    for el in doc_dict["slides"][index]["elements"].values():
        if el["image"] is not None:
            key = el["image"]["asset_key"]
            if doc_dict["assets"].get(key) != orig_dict["assets"].get(key):
                return False
    return True


# --- entry points -----------------------------------------------------------

def _save_fresh(doc: DeckDocument) -> bytes:
    container = PptxContainer()
    referenced = _referenced_asset_keys(doc)
    for key in doc.assets:
        if key not in referenced:
            log.warning("dropping unreferenced asset %r on save", key)
    media_path = _allocate_media_paths(doc, referenced, set())
    defaults = {"rels": CT_RELATIONSHIPS, "xml": "application/xml"}
    overrides = {
        "/ppt/presentation.xml": CT_PRESENTATION,
        "/ppt/slideMasters/slideMaster1.xml": CT_SLIDE_MASTER,
        "/ppt/slideLayouts/slideLayout1.xml": CT_SLIDE_LAYOUT,
        "/ppt/theme/theme1.xml": CT_THEME,
    }

    def put(path: str, data: bytes) -> None:
        container.parts[path] = data
        container.part_order.append(path)

    pres_rels = [Relationship("rId1", REL_SLIDE_MASTER, "slideMasters/slideMaster1.xml")]
    for i, slide in enumerate(doc.slides):
        slide_name = f"slide{i + 1}.xml"
        pres_rels.append(Relationship(f"rId{2 + i}", REL_SLIDE, f"slides/{slide_name}"))
        overrides[f"/ppt/slides/{slide_name}"] = CT_SLIDE
        slide_rels = [Relationship("rId1", REL_SLIDE_LAYOUT,
                                   "../slideLayouts/slideLayout1.xml")]
        rid_for_asset: dict[str, str] = {}
        rid_n = 2
        slide_keys = sorted({el.image.asset_key for el in slide.elements.values()
                             if el.image is not None})
        for key in slide_keys:
            part = media_path[key]
            rid = f"rId{rid_n}"
            rid_n += 1
            rid_for_asset[key] = rid
            slide_rels.append(Relationship(
                rid, REL_IMAGE, posixpath.relpath(part, "ppt/slides")))
        put(f"ppt/slides/{slide_name}", build_slide_part(slide, None, rid_for_asset))
        put(f"ppt/slides/_rels/{slide_name}.rels", rels_part(slide_rels))
    for key in sorted(referenced):
        part = media_path[key]
        put(part, _asset_bytes(doc, key, None))
        ext = part.rsplit(".", 1)[-1].lower()
        defaults.setdefault(ext, MEDIA_TYPES_BY_EXT.get(ext, "application/octet-stream"))
    put("ppt/presentation.xml", _presentation_xml(doc, len(doc.slides)))
    put("ppt/_rels/presentation.xml.rels", rels_part(pres_rels))
    put("ppt/slideMasters/slideMaster1.xml", _MASTER_XML)
    put("ppt/slideMasters/_rels/slideMaster1.xml.rels", rels_part([
        Relationship("rId1", REL_SLIDE_LAYOUT, "../slideLayouts/slideLayout1.xml"),
        Relationship("rId2", REL_THEME, "../theme/theme1.xml"),
    ]))
    put("ppt/slideLayouts/slideLayout1.xml", _LAYOUT_XML)
    put("ppt/slideLayouts/_rels/slideLayout1.xml.rels", rels_part([
        Relationship("rId1", REL_SLIDE_MASTER, "../slideMasters/slideMaster1.xml"),
    ]))
    put("ppt/theme/theme1.xml", _THEME_XML)
    root_rels = rels_part([Relationship(
        "rId1",
        "http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument",
        "ppt/presentation.xml",
    )])
    container.parts["_rels/.rels"] = root_rels
    container.part_order.insert(0, "_rels/.rels")
    container.parts["[Content_Types].xml"] = content_types_part(defaults, overrides)
    container.part_order.insert(0, "[Content_Types].xml")
    return container.to_bytes()


def _save_with_original(doc: DeckDocument, original: PptxContainer,
                        original_bytes: bytes) -> bytes:
    orig_deck = load_pptx(original_bytes)
    if len(orig_deck.slides) != len(doc.slides):
        log.warning("slide count differs from original; writing a fresh container")
        return _save_fresh(doc)
    doc_dict = deck_to_dict(doc)
    orig_dict = deck_to_dict(orig_deck)

    out = PptxContainer(parts=dict(original.parts), part_order=list(original.part_order))
    referenced = _referenced_asset_keys(doc)
    media_path = _allocate_media_paths(doc, referenced, set(original.parts))
    new_media = {k: v for k, v in media_path.items() if v not in original.parts}
    for key in doc.assets:
        if key not in referenced and key not in original.parts:
            log.warning("dropping unreferenced asset %r on save", key)

    slide_paths = original.slide_parts()
    pres_part = original.presentation_part()
    changed_any = False
    for i, slide_path in enumerate(slide_paths):
        if i >= len(doc.slides):
            break
        if _slide_dicts_equal(doc_dict, orig_dict, i):
            continue
        changed_any = True
        slide = doc.slides[i]
        rels = original.relationships(slide_path)
        target_to_rid = {
            original.resolve_target(slide_path, rel.target): rel.rel_id
            for rel in rels.values() if not rel.external
        }
        rid_numbers = [int(m.group(1)) for rid in rels
                       if (m := re.match(r"rId(\d+)$", rid))]
        next_rid = max(rid_numbers, default=0) + 1
        rid_for_asset: dict[str, str] = {}
        new_rels = list(rels.values())
        slide_keys = sorted({el.image.asset_key for el in slide.elements.values()
                             if el.image is not None})
        for key in slide_keys:
            part = media_path[key]
            if part in target_to_rid:
                rid_for_asset[key] = target_to_rid[part]
            else:
                rid = f"rId{next_rid}"
                next_rid += 1
                rid_for_asset[key] = rid
                new_rels.append(Relationship(
                    rid, REL_IMAGE, posixpath.relpath(part, posixpath.dirname(slide_path))))
        out.parts[slide_path] = build_slide_part(
            slide, original.parts[slide_path], rid_for_asset)
        rels_file = original.rels_path(slide_path)
        if len(new_rels) != len(rels) or rels_file not in out.parts:
            if rels_file not in out.part_order:
                out.part_order.append(rels_file)
            out.parts[rels_file] = rels_part(new_rels)

    if changed_any:
        for key, part in sorted(new_media.items()):
            out.parts[part] = _asset_bytes(doc, key, original)
            out.part_order.append(part)
        if new_media:
            ct_root = original.xml("[Content_Types].xml")
            have_exts = {d.get("Extension", "").lower()
                         for d in ct_root.findall(f"{{{NS['ct']}}}Default")}
            missing = {}
            for part in new_media.values():
                ext = part.rsplit(".", 1)[-1].lower()
                if ext not in have_exts:
                    missing[ext] = MEDIA_TYPES_BY_EXT.get(ext, "application/octet-stream")
            if missing:
                out.parts["[Content_Types].xml"] = _append_ct_defaults(
                    original.parts["[Content_Types].xml"], missing)

    if doc.slides:
        ow, oh = original.slide_size()
        if (doc.slides[0].width, doc.slides[0].height) != (ow, oh):
            root = original.xml(pres_part)
            sz = root.find(qn("p:sldSz"))
            if sz is not None:
                sz.set("cx", str(doc.slides[0].width))
                sz.set("cy", str(doc.slides[0].height))
                out.parts[pres_part] = serialize_part(root)
    return out.to_bytes()


def _append_ct_defaults(ct_bytes: bytes, missing: dict[str, str]) -> bytes:
    text = ct_bytes.decode("utf-8")
    inserts = "".join(
        f'<Default Extension={quoteattr(ext)} ContentType={quoteattr(mt)}/>'
        for ext, mt in sorted(missing.items())
    )
    idx = text.rindex("</Types>")
    return (text[:idx] + inserts + text[idx:]).encode("utf-8")


def save_pptx(doc: DeckDocument, original: bytes | PptxContainer | None = None) -> bytes:
    """Write the deck as pptx bytes.

    With ``original`` (the container the deck was loaded from), parts not
    touched by the edit are emitted byte-identical.
    """
    validate_deck(doc)
    if original is None:
        return _save_fresh(doc)
    if isinstance(original, PptxContainer):
        original_bytes = original.to_bytes()
        return _save_with_original(doc, original, original_bytes)
    return _save_with_original(doc, PptxContainer.from_bytes(original), original)
