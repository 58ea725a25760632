"""XML namespaces and qualified-name helpers for OOXML parts."""

from __future__ import annotations

import xml.etree.ElementTree as ET

NS = {
    "a": "http://schemas.openxmlformats.org/drawingml/2006/main",
    "p": "http://schemas.openxmlformats.org/presentationml/2006/main",
    "r": "http://schemas.openxmlformats.org/officeDocument/2006/relationships",
    "rel": "http://schemas.openxmlformats.org/package/2006/relationships",
    "ct": "http://schemas.openxmlformats.org/package/2006/content-types",
}

# Register prefixes once so re-serialized fragments keep familiar names.
for _prefix, _uri in NS.items():
    if _prefix in ("rel", "ct"):
        continue
    ET.register_namespace(_prefix, _uri)


def qn(name: str) -> str:
    """'p:sp' -> '{presentationml-uri}sp'."""
    prefix, local = name.split(":")
    return f"{{{NS[prefix]}}}{local}"


REL_OFFICE_DOCUMENT = (
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument"
)
REL_SLIDE = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/slide"
REL_IMAGE = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/image"

CT_PRESENTATION = (
    "application/vnd.openxmlformats-officedocument.presentationml.presentation.main+xml"
)
CT_SLIDE = "application/vnd.openxmlformats-officedocument.presentationml.slide+xml"
CT_SLIDE_MASTER = (
    "application/vnd.openxmlformats-officedocument.presentationml.slideMaster+xml"
)
CT_SLIDE_LAYOUT = (
    "application/vnd.openxmlformats-officedocument.presentationml.slideLayout+xml"
)
CT_THEME = "application/vnd.openxmlformats-officedocument.theme+xml"
CT_RELATIONSHIPS = "application/vnd.openxmlformats-package.relationships+xml"

REL_SLIDE_LAYOUT = (
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/slideLayout"
)
REL_SLIDE_MASTER = (
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/slideMaster"
)
REL_THEME = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/theme"

XML_DECL = b'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\r\n'

MEDIA_TYPES_BY_EXT = {
    "png": "image/png",
    "jpg": "image/jpeg",
    "jpeg": "image/jpeg",
    "gif": "image/gif",
    "bmp": "image/bmp",
    "tiff": "image/tiff",
    "wmf": "image/x-wmf",
    "emf": "image/x-emf",
    "svg": "image/svg+xml",
}

EXT_BY_MEDIA_TYPE = {
    "image/png": "png",
    "image/jpeg": "jpeg",
    "image/gif": "gif",
    "image/bmp": "bmp",
    "image/tiff": "tiff",
    "image/svg+xml": "svg",
}


def serialize_part(root: ET.Element) -> bytes:
    return XML_DECL + ET.tostring(root, encoding="unicode").encode("utf-8")


def serialize_fragment(elem: ET.Element) -> str:
    return ET.tostring(elem, encoding="unicode")


def parse_fragment(text: str) -> ET.Element:
    return ET.fromstring(text)
