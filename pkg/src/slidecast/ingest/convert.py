"""PPTX to PDF via LibreOffice and PDF to PNG pages via pdftoppm."""

from __future__ import annotations

import re
import subprocess
import tempfile
from pathlib import Path

from ..errors import (
    ConverterFailed,
    ConverterMissing,
    RasterizerFailed,
    RasterizerMissing,
    ValidationError,
)
from ..tools import resolve, run

DEFAULT_DPI = 300
MIN_DPI = 36
CONVERT_TIMEOUT = 600


def pptx_to_pdf(pptx_path, converter_cmd: str | None = None, outdir=None) -> Path:
    """Convert with ``soffice --headless --convert-to pdf --outdir <dir> <pptx>``."""
    pptx_path = Path(pptx_path).resolve()
    exe = resolve(converter_cmd, "soffice") or (None if converter_cmd else resolve(None, "libreoffice"))
    if exe is None:
        raise ConverterMissing(
            f"PPTX converter {converter_cmd or 'soffice'} not found; install LibreOffice "
            "or set soffice_path"
        )
    if not pptx_path.is_file():
        raise ConverterFailed(f"input not found: {pptx_path}")
    outdir = Path(outdir) if outdir else Path(tempfile.mkdtemp(prefix="slidecast-pdf-"))
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        proc = run([exe, "--headless", "--convert-to", "pdf", "--outdir", outdir, pptx_path],
                   timeout=CONVERT_TIMEOUT)
    except subprocess.TimeoutExpired as exc:
        raise ConverterFailed(f"converter timed out after {CONVERT_TIMEOUT}s") from exc
    pdf = outdir / (pptx_path.stem + ".pdf")
    if proc.returncode != 0 or not pdf.is_file():
        raise ConverterFailed(f"could not convert {pptx_path.name} to PDF",
                              proc.returncode, proc.stderr or proc.stdout)
    return pdf


def pdf_to_pngs(pdf_path, dpi: int = DEFAULT_DPI, rasterizer: str | None = None,
                workdir=None) -> list[Path]:
    """Rasterize every page to ``page-0001.png``, ``page-0002.png``, ... in order."""
    if dpi < MIN_DPI:
        raise ValidationError(f"dpi must be >= {MIN_DPI}, got {dpi}")
    exe = resolve(rasterizer, "pdftoppm")
    if exe is None:
        raise RasterizerMissing(
            f"PDF rasterizer {rasterizer or 'pdftoppm'} not found; install poppler-utils "
            "or set pdftoppm_path"
        )
    workdir = Path(workdir) if workdir else Path(tempfile.mkdtemp(prefix="slidecast-png-"))
    workdir.mkdir(parents=True, exist_ok=True)
    raw = workdir / "raw"
    try:
        proc = run([exe, "-png", "-r", str(dpi), Path(pdf_path).resolve(), raw],
                   timeout=CONVERT_TIMEOUT)
    except subprocess.TimeoutExpired as exc:
        raise RasterizerFailed(f"rasterizer timed out after {CONVERT_TIMEOUT}s") from exc
    # pdftoppm zero-pads page numbers to the width of the page count
    produced = []
    for p in workdir.glob("raw-*.png"):
        m = re.fullmatch(r"raw-(\d+)\.png", p.name)
        if m:
            produced.append((int(m.group(1)), p))
    if proc.returncode != 0 or not produced:
        raise RasterizerFailed(f"could not rasterize {pdf_path}", proc.returncode, proc.stderr)
    pages = []
    for number, p in sorted(produced):
        target = workdir / f"page-{number:04d}.png"
        p.replace(target)
        pages.append(target)
    return pages
