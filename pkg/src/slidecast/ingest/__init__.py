from .convert import DEFAULT_DPI, pdf_to_pngs, pptx_to_pdf
from .decks import gs_to_deck, pptx_to_deck
from .gslides import export_url, gslides_export
from .markdown import ScriptedSlide, front_matter_title, parse_markdown_deck
from .pptx import pptx_notes, slide_count

__all__ = [
    "DEFAULT_DPI",
    "ScriptedSlide",
    "export_url",
    "front_matter_title",
    "gs_to_deck",
    "gslides_export",
    "parse_markdown_deck",
    "pdf_to_pngs",
    "pptx_notes",
    "pptx_to_deck",
    "pptx_to_pdf",
    "slide_count",
]
