"""Zip-of-parts view of a pptx file with relationship resolution."""

from __future__ import annotations

import io
import posixpath
import xml.etree.ElementTree as ET
import zipfile
from dataclasses import dataclass, field

from .names import NS, REL_OFFICE_DOCUMENT, qn


class PptxFormatError(ValueError):
    """The input is not a pptx container we can interpret."""


@dataclass
class Relationship:
    rel_id: str
    rel_type: str
    target: str
    external: bool = False


@dataclass
class PptxContainer:
    """All parts of a pptx archive, path -> bytes, plus parsed manifests."""

    parts: dict[str, bytes] = field(default_factory=dict)
    part_order: list[str] = field(default_factory=list)

    @classmethod
    def from_bytes(cls, data: bytes) -> "PptxContainer":
        try:
            zf = zipfile.ZipFile(io.BytesIO(data))
        except zipfile.BadZipFile as exc:
            raise PptxFormatError(f"not a zip archive: {exc}") from exc
        container = cls()
        with zf:
            for info in zf.infolist():
                if info.is_dir():
                    continue
                container.parts[info.filename] = zf.read(info.filename)
                container.part_order.append(info.filename)
        if "[Content_Types].xml" not in container.parts:
            raise PptxFormatError("missing [Content_Types].xml part")
        return container

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        ordered = list(self.part_order) + sorted(
            p for p in self.parts if p not in self.part_order
        )
        with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
            for path in ordered:
                if path in self.parts:
                    info = zipfile.ZipInfo(path, date_time=(1980, 1, 1, 0, 0, 0))
                    info.compress_type = zipfile.ZIP_DEFLATED
                    info.external_attr = 0o600 << 16
                    zf.writestr(info, self.parts[path])
        return buf.getvalue()

    def xml(self, path: str) -> ET.Element:
        if path not in self.parts:
            raise PptxFormatError(f"missing part {path!r}")
        try:
            return ET.fromstring(self.parts[path])
        except ET.ParseError as exc:
            raise PptxFormatError(
                f"malformed XML in {path!r} at byte offset {exc.position}: {exc.msg}"
            ) from exc

    def rels_path(self, part_path: str) -> str:
        directory, name = posixpath.split(part_path)
        return posixpath.join(directory, "_rels", name + ".rels") if directory \
            else posixpath.join("_rels", name + ".rels")

    def relationships(self, part_path: str) -> dict[str, Relationship]:
        """Relationships declared by a part. '' means the package root."""
        rels_file = self.rels_path(part_path) if part_path else "_rels/.rels"
        if rels_file not in self.parts:
            return {}
        root = self.xml(rels_file)
        out = {}
        for rel in root.findall(f"{{{NS['rel']}}}Relationship"):
            r = Relationship(
                rel_id=rel.get("Id", ""),
                rel_type=rel.get("Type", ""),
                target=rel.get("Target", ""),
                external=rel.get("TargetMode") == "External",
            )
            out[r.rel_id] = r
        return out

    def resolve_target(self, base_part: str, target: str) -> str:
        if target.startswith("/"):
            return target[1:]
        base_dir = posixpath.dirname(base_part)
        return posixpath.normpath(posixpath.join(base_dir, target))

    def presentation_part(self) -> str:
        for rel in self.relationships("").values():
            if rel.rel_type == REL_OFFICE_DOCUMENT:
                return self.resolve_target("", rel.target)
        raise PptxFormatError("no presentation main part (officeDocument relationship)")

    def slide_parts(self) -> list[str]:
        """Slide part paths in presentation order."""
        pres = self.presentation_part()
        root = self.xml(pres)
        rels = self.relationships(pres)
        paths = []
        sld_lst = root.find(qn("p:sldIdLst"))
        if sld_lst is None:
            return []
        for sld in sld_lst.findall(qn("p:sldId")):
            rid = sld.get(qn("r:id"))
            if rid is None or rid not in rels:
                raise PptxFormatError(f"slide entry with unresolvable relationship {rid!r}")
            paths.append(self.resolve_target(pres, rels[rid].target))
        return paths

    def slide_size(self) -> tuple[int, int]:
        root = self.xml(self.presentation_part())
        sz = root.find(qn("p:sldSz"))
        if sz is None:
            raise PptxFormatError("presentation part lacks sldSz")
        return int(sz.get("cx", "0")), int(sz.get("cy", "0"))
