"""Deterministic sample posters and paper bundles.

The pptx bytes here are assembled from hand-written XML templates, not
through the writer module, so load/save round-trip tests exercise the
real parser against independently constructed input. Inventory counts
for each poster are recorded alongside (``SAMPLE_INVENTORY``) at fixture
creation time and asserted in tests.
"""

from __future__ import annotations

import io
import json
import zipfile
from pathlib import Path

from PIL import Image

EMU = 914400
POSTER_W = 48 * EMU
POSTER_H = 36 * EMU

_CT_BASE = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types"><Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/><Default Extension="xml" ContentType="application/xml"/>{png_default}<Override PartName="/ppt/presentation.xml" ContentType="application/vnd.openxmlformats-officedocument.presentationml.presentation.main+xml"/><Override PartName="/ppt/slides/slide1.xml" ContentType="application/vnd.openxmlformats-officedocument.presentationml.slide+xml"/><Override PartName="/ppt/slideMasters/slideMaster1.xml" ContentType="application/vnd.openxmlformats-officedocument.presentationml.slideMaster+xml"/><Override PartName="/ppt/slideLayouts/slideLayout1.xml" ContentType="application/vnd.openxmlformats-officedocument.presentationml.slideLayout+xml"/><Override PartName="/ppt/theme/theme1.xml" ContentType="application/vnd.openxmlformats-officedocument.theme+xml"/><Override PartName="/docProps/core.xml" ContentType="application/vnd.openxmlformats-package.core-properties+xml"/><Override PartName="/docProps/app.xml" ContentType="application/vnd.openxmlformats-officedocument.extended-properties+xml"/></Types>"""

_ROOT_RELS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships"><Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="ppt/presentation.xml"/><Relationship Id="rId2" Type="http://schemas.openxmlformats.org/package/2006/relationships/metadata/core-properties" Target="docProps/core.xml"/><Relationship Id="rId3" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/extended-properties" Target="docProps/app.xml"/></Relationships>"""

_CORE_PROPS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<cp:coreProperties xmlns:cp="http://schemas.openxmlformats.org/package/2006/metadata/core-properties" xmlns:dc="http://purl.org/dc/elements/1.1/"><dc:title>{title}</dc:title><dc:creator>posterkit samples</dc:creator></cp:coreProperties>"""

_APP_PROPS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<Properties xmlns="http://schemas.openxmlformats.org/officeDocument/2006/extended-properties"><Application>posterkit-samples</Application></Properties>"""

_PRESENTATION = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<p:presentation xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" xmlns:p="http://schemas.openxmlformats.org/presentationml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships"><p:sldMasterIdLst><p:sldMasterId id="2147483648" r:id="rId1"/></p:sldMasterIdLst><p:sldIdLst><p:sldId id="256" r:id="rId2"/></p:sldIdLst><p:sldSz cx="{w}" cy="{h}"/><p:notesSz cx="6858000" cy="9144000"/></p:presentation>"""

_PRESENTATION_RELS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships"><Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/slideMaster" Target="slideMasters/slideMaster1.xml"/><Relationship Id="rId2" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/slide" Target="slides/slide1.xml"/></Relationships>"""

_MASTER = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<p:sldMaster xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" xmlns:p="http://schemas.openxmlformats.org/presentationml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships"><p:cSld><p:spTree><p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr/></p:spTree></p:cSld><p:clrMap bg1="lt1" tx1="dk1" bg2="lt2" tx2="dk2" accent1="accent1" accent2="accent2" accent3="accent3" accent4="accent4" accent5="accent5" accent6="accent6" hlink="hlink" folHlink="folHlink"/><p:sldLayoutIdLst><p:sldLayoutId id="2147483649" r:id="rId1"/></p:sldLayoutIdLst></p:sldMaster>"""

_MASTER_RELS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships"><Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/slideLayout" Target="../slideLayouts/slideLayout1.xml"/><Relationship Id="rId2" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/theme" Target="../theme/theme1.xml"/></Relationships>"""

_LAYOUT = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<p:sldLayout xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" xmlns:p="http://schemas.openxmlformats.org/presentationml/2006/main" type="blank"><p:cSld><p:spTree><p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr/></p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:sldLayout>"""

_LAYOUT_RELS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships"><Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/slideMaster" Target="../slideMasters/slideMaster1.xml"/></Relationships>"""

_THEME = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<a:theme xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" name="Sample"><a:themeElements><a:clrScheme name="Sample"><a:dk1><a:srgbClr val="000000"/></a:dk1><a:lt1><a:srgbClr val="FFFFFF"/></a:lt1><a:dk2><a:srgbClr val="1F3864"/></a:dk2><a:lt2><a:srgbClr val="EEECE1"/></a:lt2><a:accent1><a:srgbClr val="4472C4"/></a:accent1><a:accent2><a:srgbClr val="ED7D31"/></a:accent2><a:accent3><a:srgbClr val="A5A5A5"/></a:accent3><a:accent4><a:srgbClr val="FFC000"/></a:accent4><a:accent5><a:srgbClr val="5B9BD5"/></a:accent5><a:accent6><a:srgbClr val="70AD47"/></a:accent6><a:hlink><a:srgbClr val="0563C1"/></a:hlink><a:folHlink><a:srgbClr val="954F72"/></a:folHlink></a:clrScheme><a:fontScheme name="Sample"><a:majorFont><a:latin typeface="Arial"/><a:ea typeface=""/><a:cs typeface=""/></a:majorFont><a:minorFont><a:latin typeface="Arial"/><a:ea typeface=""/><a:cs typeface=""/></a:minorFont></a:fontScheme><a:fmtScheme name="Sample"><a:fillStyleLst><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:fillStyleLst><a:lnStyleLst><a:ln w="6350"><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln><a:ln w="12700"><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln><a:ln w="19050"><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:ln></a:lnStyleLst><a:effectStyleLst><a:effectStyle><a:effectLst/></a:effectStyle><a:effectStyle><a:effectLst/></a:effectStyle><a:effectStyle><a:effectLst/></a:effectStyle></a:effectStyleLst><a:bgFillStyleLst><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill><a:solidFill><a:schemeClr val="phClr"/></a:solidFill></a:bgFillStyleLst></a:fmtScheme></a:themeElements></a:theme>"""

_SLIDE_SHELL = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<p:sld xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" xmlns:p="http://schemas.openxmlformats.org/presentationml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships"><p:cSld><p:spTree><p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr><a:xfrm><a:off x="0" y="0"/><a:ext cx="0" cy="0"/><a:chOff x="0" y="0"/><a:chExt cx="0" cy="0"/></a:xfrm></p:grpSpPr>{shapes}</p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:sld>"""

_SLIDE_RELS_SHELL = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships"><Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/slideLayout" Target="../slideLayouts/slideLayout1.xml"/>{extra}</Relationships>"""


def textbox_xml(eid: int, name: str, x: int, y: int, w: int, h: int,
                paragraphs: str) -> str:
    return (
        f'<p:sp><p:nvSpPr><p:cNvPr id="{eid}" name="{name}"/>'
        f'<p:cNvSpPr txBox="1"/><p:nvPr/></p:nvSpPr>'
        f'<p:spPr><a:xfrm><a:off x="{x}" y="{y}"/><a:ext cx="{w}" cy="{h}"/></a:xfrm>'
        f'<a:prstGeom prst="rect"><a:avLst/></a:prstGeom><a:noFill/></p:spPr>'
        f'<p:txBody><a:bodyPr wrap="square"/><a:lstStyle/>{paragraphs}</p:txBody></p:sp>'
    )


def para_xml(text: str, size_pt: int | None = None, bold: bool = False,
             color: str | None = None, align: str | None = None,
             bullet: str | None = None, font: str | None = None) -> str:
    ppr = ""
    if align or bullet:
        algn = f' algn="{align}"' if align else ""
        bu = f'<a:buChar char="{bullet}"/>' if bullet else ""
        ppr = f"<a:pPr{algn}>{bu}</a:pPr>" if bu else f"<a:pPr{algn}/>"
    attrs = ' lang="en-US"'
    if size_pt is not None:
        attrs += f' sz="{size_pt * 100}"'
    if bold:
        attrs += ' b="1"'
    children = ""
    if color:
        children += f'<a:solidFill><a:srgbClr val="{color}"/></a:solidFill>'
    if font:
        children += f'<a:latin typeface="{font}"/>'
    rpr = f"<a:rPr{attrs}>{children}</a:rPr>" if children else f"<a:rPr{attrs}/>"
    return f"<a:p>{ppr}<a:r>{rpr}<a:t>{text}</a:t></a:r></a:p>"


def shape_xml(eid: int, name: str, x: int, y: int, w: int, h: int,
              preset: str = "rect", fill: str | None = "DDDDDD",
              border: str | None = None, border_w: int | None = None,
              rot: int = 0) -> str:
    rot_attr = f' rot="{rot}"' if rot else ""
    fill_xml = (f'<a:solidFill><a:srgbClr val="{fill}"/></a:solidFill>'
                if fill else "<a:noFill/>")
    ln = ""
    if border or border_w:
        w_attr = f' w="{border_w}"' if border_w else ""
        ln_fill = f'<a:solidFill><a:srgbClr val="{border}"/></a:solidFill>' if border else ""
        ln = f"<a:ln{w_attr}>{ln_fill}</a:ln>"
    return (
        f'<p:sp><p:nvSpPr><p:cNvPr id="{eid}" name="{name}"/>'
        f'<p:cNvSpPr/><p:nvPr/></p:nvSpPr>'
        f'<p:spPr><a:xfrm{rot_attr}><a:off x="{x}" y="{y}"/><a:ext cx="{w}" cy="{h}"/></a:xfrm>'
        f'<a:prstGeom prst="{preset}"><a:avLst/></a:prstGeom>{fill_xml}{ln}</p:spPr></p:sp>'
    )


def pic_xml(eid: int, name: str, x: int, y: int, w: int, h: int, rid: str) -> str:
    return (
        f'<p:pic><p:nvPicPr><p:cNvPr id="{eid}" name="{name}"/>'
        f'<p:cNvPicPr/><p:nvPr/></p:nvPicPr>'
        f'<p:blipFill><a:blip r:embed="{rid}"/><a:stretch><a:fillRect/></a:stretch></p:blipFill>'
        f'<p:spPr><a:xfrm><a:off x="{x}" y="{y}"/><a:ext cx="{w}" cy="{h}"/></a:xfrm>'
        f'<a:prstGeom prst="rect"><a:avLst/></a:prstGeom></p:spPr></p:pic>'
    )


def group_xml(eid: int, name: str, x: int, y: int, w: int, h: int,
              ch_x: int, ch_y: int, ch_w: int, ch_h: int, children: str) -> str:
    return (
        f'<p:grpSp><p:nvGrpSpPr><p:cNvPr id="{eid}" name="{name}"/>'
        f'<p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr>'
        f'<p:grpSpPr><a:xfrm><a:off x="{x}" y="{y}"/><a:ext cx="{w}" cy="{h}"/>'
        f'<a:chOff x="{ch_x}" y="{ch_y}"/><a:chExt cx="{ch_w}" cy="{ch_h}"/></a:xfrm></p:grpSpPr>'
        f'{children}</p:grpSp>'
    )


def table_frame_xml(eid: int, name: str, x: int, y: int, w: int, h: int) -> str:
    """A graphicFrame holding a 1x2 table; opaque to the element model."""
    tbl = (
        '<a:tbl><a:tblPr/><a:tblGrid>'
        f'<a:gridCol w="{w // 2}"/><a:gridCol w="{w - w // 2}"/></a:tblGrid>'
        f'<a:tr h="{h}">'
        '<a:tc><a:txBody><a:bodyPr/><a:p><a:r><a:rPr lang="en-US"/><a:t>k</a:t></a:r></a:p></a:txBody><a:tcPr/></a:tc>'
        '<a:tc><a:txBody><a:bodyPr/><a:p><a:r><a:rPr lang="en-US"/><a:t>v</a:t></a:r></a:p></a:txBody><a:tcPr/></a:tc>'
        '</a:tr></a:tbl>'
    )
    return (
        f'<p:graphicFrame><p:nvGraphicFramePr><p:cNvPr id="{eid}" name="{name}"/>'
        f'<p:cNvGraphicFramePr/><p:nvPr/></p:nvGraphicFramePr>'
        f'<p:xfrm><a:off x="{x}" y="{y}"/><a:ext cx="{w}" cy="{h}"/></p:xfrm>'
        f'<a:graphic><a:graphicData uri="http://schemas.openxmlformats.org/drawingml/2006/table">'
        f'{tbl}</a:graphicData></a:graphic></p:graphicFrame>'
    )


def sample_png(color: tuple[int, int, int], size: tuple[int, int] = (120, 80)) -> bytes:
    img = Image.new("RGB", size, color)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def _zip_parts(parts: dict[str, bytes]) -> bytes:
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        for path, data in parts.items():
            info = zipfile.ZipInfo(path, date_time=(1980, 1, 1, 0, 0, 0))
            zf.writestr(info, data)
    return buf.getvalue()


def build_poster(shapes_xml: str, title: str, media: dict[str, bytes] | None = None,
                 width: int = POSTER_W, height: int = POSTER_H) -> bytes:
    media = media or {}
    extra_rels = ""
    for i, part_name in enumerate(sorted(media), start=2):
        extra_rels += (
            f'<Relationship Id="rId{i}" '
            f'Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/image" '
            f'Target="../media/{part_name}"/>'
        )
    parts: dict[str, bytes] = {
        "[Content_Types].xml": _CT_BASE.format(
            png_default='<Default Extension="png" ContentType="image/png"/>' if media else ""
        ).encode(),
        "_rels/.rels": _ROOT_RELS.encode(),
        "docProps/core.xml": _CORE_PROPS.format(title=title).encode(),
        "docProps/app.xml": _APP_PROPS.encode(),
        "ppt/presentation.xml": _PRESENTATION.format(w=width, h=height).encode(),
        "ppt/_rels/presentation.xml.rels": _PRESENTATION_RELS.encode(),
        "ppt/slideMasters/slideMaster1.xml": _MASTER.encode(),
        "ppt/slideMasters/_rels/slideMaster1.xml.rels": _MASTER_RELS.encode(),
        "ppt/slideLayouts/slideLayout1.xml": _LAYOUT.encode(),
        "ppt/slideLayouts/_rels/slideLayout1.xml.rels": _LAYOUT_RELS.encode(),
        "ppt/theme/theme1.xml": _THEME.encode(),
        "ppt/slides/slide1.xml": _SLIDE_SHELL.format(shapes=shapes_xml).encode(),
        "ppt/slides/_rels/slide1.xml.rels": _SLIDE_RELS_SHELL.format(extra=extra_rels).encode(),
    }
    for part_name, data in media.items():
        parts[f"ppt/media/{part_name}"] = data
    return _zip_parts(parts)


IN = EMU  # readability below


def poster_minimal() -> bytes:
    return build_poster("", "minimal")


def poster_columns() -> bytes:
    shapes = (
        shape_xml(2, "Header Bar", 0, 0, POSTER_W, 4 * IN, fill="1F3864")
        + textbox_xml(3, "Poster Title", 2 * IN, int(0.5 * IN), 44 * IN, 2 * IN,
                      para_xml("Adaptive Layout Editing for Dense Posters",
                               size_pt=72, bold=True, color="FFFFFF", align="ctr"))
        + textbox_xml(4, "Authors", 2 * IN, int(2.5 * IN), 44 * IN, 1 * IN,
                      para_xml("A. Researcher, B. Scholar", size_pt=32, color="DDE5F5",
                               align="ctr"))
        + textbox_xml(5, "Intro Head", 1 * IN, 5 * IN, 14 * IN, int(1.5 * IN),
                      para_xml("Introduction", size_pt=44, bold=True, color="1F3864"))
        + textbox_xml(6, "Intro Body", 1 * IN, 7 * IN, 14 * IN, 10 * IN,
                      para_xml("Posters compress a paper into one dense canvas.",
                               size_pt=24)
                      + para_xml("Layout quality drives readability.", size_pt=24,
                                 bullet="•"))
        + textbox_xml(7, "Method Head", 17 * IN, 5 * IN, 14 * IN, int(1.5 * IN),
                      para_xml("Method", size_pt=44, bold=True, color="1F3864"))
        + textbox_xml(8, "Method Body", 17 * IN, 7 * IN, 14 * IN, 10 * IN,
                      para_xml("Edits compile to typed operations.", size_pt=24)
                      + para_xml("Each operation is validated then applied.",
                                 size_pt=24, bullet="•"))
        + textbox_xml(9, "Results Head", 33 * IN, 5 * IN, 14 * IN, int(1.5 * IN),
                      para_xml("Results", size_pt=44, bold=True, color="1F3864"))
        + textbox_xml(10, "Results Body", 33 * IN, 7 * IN, 14 * IN, 6 * IN,
                      para_xml("Quality holds across difficulty levels.", size_pt=24))
        + pic_xml(11, "Results Figure", 33 * IN, 14 * IN, 14 * IN, 9 * IN, "rId2")
        + shape_xml(12, "Footer Rule", 1 * IN, 33 * IN, 46 * IN, int(0.1 * IN),
                    fill="1F3864")
    )
    return build_poster(shapes, "columns",
                        media={"image1.png": sample_png((64, 104, 182), (300, 200))})


def poster_grouped() -> bytes:
    # Group child coordinates live in a scaled child space (chExt is half the
    # ext in each axis -> absolute size is 2x the child-space numbers).
    g1_children = (
        textbox_xml(3, "G1 Head", 1000, 1000, 6000, 1000,
                    para_xml("Problem", size_pt=40, bold=True))
        + textbox_xml(4, "G1 Body", 1000, 2200, 6000, 3000,
                      para_xml("Single-pass generation misses user intent.", size_pt=22))
    )
    g2_children = (
        textbox_xml(6, "G2 Head", 0, 0, 12000000, 1500000,
                    para_xml("Approach", size_pt=40, bold=True))
        + shape_xml(7, "G2 Plate", 0, 1800000, 12000000, 6000000, fill="EEF2FA")
    )
    g3_children = (
        textbox_xml(9, "G3 Head", 0, 0, 12000000, 1500000,
                    para_xml("Findings", size_pt=40, bold=True))
        + pic_xml(10, "G3 Figure", 200000, 1800000, 11000000, 7000000, "rId2")
    )
    shapes = (
        group_xml(2, "Section Problem", 1 * IN, 5 * IN, 14 * IN, 9 * IN,
                  1000, 1000, 6400, 4500, g1_children)
        + group_xml(5, "Section Approach", 17 * IN, 5 * IN, 14 * IN, 9 * IN,
                    0, 0, 12000000, 8000000, g2_children)
        + group_xml(8, "Section Findings", 33 * IN, 5 * IN, 14 * IN, 10 * IN,
                    0, 0, 12000000, 9000000, g3_children)
        + textbox_xml(11, "Grouped Title", 4 * IN, 1 * IN, 40 * IN, 3 * IN,
                      para_xml("Sectioned Poster", size_pt=66, bold=True, align="ctr"))
    )
    return build_poster(shapes, "grouped",
                        media={"image1.png": sample_png((182, 104, 64), (400, 250))})


def poster_mixed() -> bytes:
    # Manual inventory: 3 textboxes + 2 images + 1 group (group wraps 2 of the
    # textboxes) = 6 elements.
    grouped = (
        textbox_xml(5, "Caption A", 0, 0, 8000000, 1200000,
                    para_xml("Fig. 1: pipeline", size_pt=20))
        + textbox_xml(6, "Caption B", 0, 1500000, 8000000, 1200000,
                      para_xml("Fig. 2: scores", size_pt=20))
    )
    shapes = (
        textbox_xml(2, "Mixed Title", 2 * IN, 1 * IN, 44 * IN, 2 * IN,
                    para_xml("Mixed Content Poster", size_pt=60, bold=True, align="ctr"))
        + pic_xml(3, "Figure One", 4 * IN, 6 * IN, 16 * IN, 10 * IN, "rId2")
        + pic_xml(4, "Figure Two", 26 * IN, 6 * IN, 16 * IN, 10 * IN, "rId3")
        + group_xml(7, "Captions", 4 * IN, 18 * IN, 38 * IN, 3 * IN,
                    0, 0, 8000000, 2700000, grouped)
    )
    return build_poster(shapes, "mixed", media={
        "image1.png": sample_png((30, 120, 90), (320, 200)),
        "image2.png": sample_png((120, 30, 90), (320, 200)),
    })


def poster_dense() -> bytes:
    body = (
        para_xml("Résumé of findings — α vs β", size_pt=24,
                 font="Georgia")
        + para_xml("First takeaway", size_pt=20, bullet="•")
        + para_xml("Second takeaway", size_pt=20, bullet="•")
        + para_xml("kappa = 0.81", size_pt=20, align="r")
    )
    shapes = (
        shape_xml(2, "Backdrop", int(0.5 * IN), int(0.5 * IN), 47 * IN, 35 * IN,
                  fill="FAFAF5", border="CCCCCC", border_w=12700)
        + textbox_xml(3, "Dense Title", 2 * IN, 1 * IN, 44 * IN, 2 * IN,
                      para_xml("Dense • Unicode • Styles", size_pt=64,
                               bold=True, align="ctr", color="202020"))
        + textbox_xml(4, "Dense Body", 2 * IN, 4 * IN, 20 * IN, 12 * IN, body)
        + shape_xml(5, "Rotated Badge", 36 * IN, 4 * IN, 6 * IN, 6 * IN,
                    preset="ellipse", fill="FFC000", rot=2700000)
        + shape_xml(6, "Arrow", 24 * IN, 8 * IN, 8 * IN, 3 * IN,
                    preset="rightArrow", fill="4472C4")
        + textbox_xml(7, "Footnote", 2 * IN, 32 * IN, 30 * IN, 2 * IN,
                      para_xml("Contact: lab@example.edu", size_pt=18))
        + shape_xml(8, "Divider", 2 * IN, 17 * IN, 44 * IN, int(0.08 * IN),
                    fill="888888")
        + textbox_xml(9, "Column Two", 24 * IN, 12 * IN, 22 * IN, 4 * IN,
                      para_xml("Wide middle note", size_pt=22, align="just"))
    )
    return build_poster(shapes, "dense")


def poster_opaque() -> bytes:
    shapes = (
        textbox_xml(2, "Opaque Title", 2 * IN, 1 * IN, 44 * IN, 2 * IN,
                    para_xml("Pass-through Fidelity", size_pt=56, bold=True))
        + table_frame_xml(3, "Stats Table", 4 * IN, 6 * IN, 18 * IN, 8 * IN)
        + shape_xml(4, "Plain Box", 26 * IN, 6 * IN, 12 * IN, 8 * IN, fill="E7E6E6")
    )
    return build_poster(shapes, "opaque")


def poster_two_clusters() -> bytes:
    """Two spatially separated stacks; the ground-truth clustering is recorded
    in SAMPLE_INVENTORY for section-inference tests."""
    shapes = (
        textbox_xml(2, "Left Head", 1 * IN, 2 * IN, 10 * IN, int(1.5 * IN),
                    para_xml("Alpha", size_pt=40, bold=True))
        + textbox_xml(3, "Left Body", 1 * IN, 4 * IN, 10 * IN, 6 * IN,
                      para_xml("Left column text", size_pt=22))
        + shape_xml(4, "Left Plate", 1 * IN, int(10.5 * IN), 10 * IN, 4 * IN,
                    fill="DDE5F5")
        + textbox_xml(5, "Right Head", 30 * IN, 2 * IN, 10 * IN, int(1.5 * IN),
                      para_xml("Beta", size_pt=40, bold=True))
        + textbox_xml(6, "Right Body", 30 * IN, 4 * IN, 10 * IN, 6 * IN,
                      para_xml("Right column text", size_pt=22))
    )
    return build_poster(shapes, "two_clusters")


def sample_corpus() -> dict[str, bytes]:
    return {
        "minimal": poster_minimal(),
        "columns": poster_columns(),
        "grouped": poster_grouped(),
        "mixed": poster_mixed(),
        "dense": poster_dense(),
        "opaque": poster_opaque(),
        "two_clusters": poster_two_clusters(),
    }


# Manual inventories recorded when the fixtures above were authored.
SAMPLE_INVENTORY = {
    "minimal": {"elements": 0, "images": 0, "groups": 0},
    "columns": {"elements": 11, "images": 1, "groups": 0, "textboxes": 8, "shapes": 2},
    "grouped": {"elements": 10, "images": 1, "groups": 3,
                "group_children": {"e2": 2, "e5": 2, "e8": 2}},
    "mixed": {"elements": 6, "images": 2, "groups": 1, "textboxes": 3},
    "dense": {"elements": 8, "images": 0, "groups": 0, "textboxes": 4, "shapes": 4},
    "opaque": {"elements": 3, "images": 0, "groups": 0},
    "two_clusters": {
        "elements": 5, "images": 0, "groups": 0,
        "spatial_clusters": [["e2", "e3", "e4"], ["e5", "e6"]],
        "cluster_names": ["Alpha", "Beta"],
    },
}


PAPER_MARKDOWN = """# Adaptive Layout Editing for Dense Posters

## Abstract

We study instruction-driven revision of research posters and describe a
pipeline that compiles natural-language requests into typed operations.

## Method

The editor validates each operation against the current document before
applying it, so a failed step never blocks the rest of a plan. See
Figure 1 for the full pipeline and Figure 2 for score distributions.

## Results

Across 514 collected instructions the typed-operation route completes
every run, while monolithic script generation aborts on one bad line.
Figure 2 summarizes judged quality by difficulty.
"""


def write_sample_bundle(directory: str | Path) -> Path:
    """Materialize a small paper bundle (markdown + figures + manifest)."""
    root = Path(directory)
    (root / "assets").mkdir(parents=True, exist_ok=True)
    fig1 = sample_png((90, 90, 200), (400, 240))
    fig2 = sample_png((200, 140, 60), (360, 360))
    (root / "assets" / "fig1.png").write_bytes(fig1)
    (root / "assets" / "fig2.png").write_bytes(fig2)
    (root / "paper.md").write_text(PAPER_MARKDOWN, encoding="utf-8")
    manifest = {
        "markdown": "paper.md",
        "source_pdf_digest": "sha256:" + "0" * 64,
        "figures": [
            {"path": "assets/fig1.png", "caption": "Figure 1: pipeline overview",
             "aspect_ratio": 400 / 240, "kind": "figure"},
            {"path": "assets/fig2.png", "caption": "Figure 2: score distribution",
             "aspect_ratio": 1.0, "kind": "figure"},
        ],
    }
    (root / "bundle.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return root
