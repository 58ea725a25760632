"""Reading and writing ``.pptx`` containers.

A ``.pptx`` file is a zip of OOXML parts. We interpret the presentation
part, slides, their relationship files, and media; everything else
(masters, layouts, themes, doc properties) passes through untouched.
"""

from .container import PptxContainer, PptxFormatError
from .read import load_pptx
from .write import MissingAssetError, save_pptx

__all__ = [
    "PptxContainer",
    "PptxFormatError",
    "MissingAssetError",
    "load_pptx",
    "save_pptx",
]
