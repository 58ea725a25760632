"""Pre-parsed paper bundles: markdown plus figure/table assets.

A bundle directory holds ``bundle.json`` (manifest), the paper markdown,
and an assets directory. Figures carry the caption and aspect ratio the
static parsing step recorded, which is what grounds image insertion:
the editing pipeline may only place figures that actually exist here.
"""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional


class BundleError(ValueError):
    """The bundle is missing, malformed, or references absent assets."""


@dataclass
class PaperFigure:
    path: str  # relative to the bundle root
    caption: str
    aspect_ratio: float
    kind: str = "figure"

    def to_dict(self) -> dict:
        return {"path": self.path, "caption": self.caption,
                "aspect_ratio": self.aspect_ratio, "kind": self.kind}


@dataclass
class PaperBundle:
    root: Path
    markdown: str
    figures: list[PaperFigure] = field(default_factory=list)
    source_pdf_digest: Optional[str] = None

    def figure_by_path(self, path: str) -> Optional[PaperFigure]:
        for fig in self.figures:
            if fig.path == path:
                return fig
        return None

    def asset_bytes(self, path: str) -> bytes:
        fig = self.figure_by_path(path)
        if fig is None:
            raise BundleError(f"no bundle asset {path!r}")
        return (self.root / path).read_bytes()

    def to_dict(self) -> dict:
        return {
            "root": str(self.root),
            "markdown_chars": len(self.markdown),
            "figures": [f.to_dict() for f in self.figures],
            "source_pdf_digest": self.source_pdf_digest,
        }


def load_bundle(path: str | Path) -> PaperBundle:
    root = Path(path)
    manifest_path = root / "bundle.json"
    if not manifest_path.is_file():
        raise BundleError(f"no bundle.json under {root}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BundleError(f"bundle.json is not valid JSON: {exc}") from exc
    md_rel = manifest.get("markdown", "paper.md")
    md_path = root / md_rel
    if not md_path.is_file():
        raise BundleError(f"bundle markdown {md_rel!r} missing")
    figures = []
    for i, f in enumerate(manifest.get("figures", [])):
        fpath = f.get("path")
        if not fpath or not (root / fpath).is_file():
            raise BundleError(f"figures[{i}]: asset path {fpath!r} does not resolve")
        aspect = float(f.get("aspect_ratio", 0))
        if aspect <= 0:
            raise BundleError(f"figures[{i}]: aspect_ratio must be positive")
        figures.append(PaperFigure(
            path=fpath,
            caption=str(f.get("caption", "")),
            aspect_ratio=aspect,
            kind=str(f.get("kind", "figure")),
        ))
    return PaperBundle(
        root=root,
        markdown=md_path.read_text(encoding="utf-8"),
        figures=figures,
        source_pdf_digest=manifest.get("source_pdf_digest"),
    )


def extract_bundle_archive(data: bytes, target_dir: str | Path) -> PaperBundle:
    """Unpack a zipped bundle (as uploaded to the service) and load it."""
    target = Path(target_dir)
    target.mkdir(parents=True, exist_ok=True)
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            for info in zf.infolist():
                name = info.filename
                if name.startswith("/") or ".." in Path(name).parts:
                    raise BundleError(f"unsafe path in bundle archive: {name!r}")
                if info.is_dir():
                    continue
                dest = target / name
                dest.parent.mkdir(parents=True, exist_ok=True)
                dest.write_bytes(zf.read(name))
    except zipfile.BadZipFile as exc:
        raise BundleError(f"bundle archive is not a zip: {exc}") from exc
    return load_bundle(target)
