"""Front doors that turn PPTX files and Google Slides ids into validated decks."""

from __future__ import annotations

import tempfile
from pathlib import Path

from ..errors import CountMismatch
from ..model import Deck, VoiceSpec, validate_deck
from ..tools import Toolchain
from .convert import DEFAULT_DPI, pdf_to_pngs, pptx_to_pdf
from .gslides import DEFAULT_BASE_URL, gslides_export
from .pptx import pptx_notes


def _deck(images, scripts, title: str, voice: VoiceSpec | None) -> Deck:
    if len(images) != len(scripts):
        raise CountMismatch(len(images), len(scripts), "notes entries")
    return validate_deck(Deck.from_pairs(images, scripts, title, voice))


def pptx_to_deck(pptx_path, dpi: int = DEFAULT_DPI, voice: VoiceSpec | None = None, *,
                 tools: Toolchain | None = None, workdir=None) -> Deck:
    """PPTX -> PDF -> one PNG per page, with speaker notes as the scripts.

    Images are written under ``workdir`` (a fresh temporary directory when not
    given) and must outlive the returned deck.
    """
    tools = tools or Toolchain()
    workdir = Path(workdir) if workdir else Path(tempfile.mkdtemp(prefix="slidecast-pptx-"))
    scripts = pptx_notes(pptx_path)
    pdf = pptx_to_pdf(pptx_path, tools.soffice, workdir / "pdf")
    images = pdf_to_pngs(pdf, dpi, tools.pdftoppm, workdir / "pages")
    return _deck(images, scripts, Path(pptx_path).stem, voice)


def gs_to_deck(doc_id: str, dpi: int = DEFAULT_DPI, voice: VoiceSpec | None = None, *,
               tools: Toolchain | None = None, workdir=None,
               base_url: str = DEFAULT_BASE_URL, session=None) -> Deck:
    """Images from the PDF export, scripts from the PPTX export's notes."""
    tools = tools or Toolchain()
    workdir = Path(workdir) if workdir else Path(tempfile.mkdtemp(prefix="slidecast-gs-"))
    pdf = gslides_export(doc_id, "pdf", workdir / "download", base_url=base_url, session=session)
    pptx = gslides_export(doc_id, "pptx", workdir / "download", base_url=base_url, session=session)
    scripts = pptx_notes(pptx)
    images = pdf_to_pngs(pdf, dpi, tools.pdftoppm, workdir / "pages")
    return _deck(images, scripts, doc_id, voice)
