"""Speaker notes from PPTX packages, read straight from the OOXML parts."""

from __future__ import annotations

import posixpath
import re
import warnings
import zipfile
from pathlib import Path
from xml.etree import ElementTree as ET

from ..errors import MalformedOoxml, NotZip, OoxmlFallback
from ..model import normalize_script

P_NS = "{http://schemas.openxmlformats.org/presentationml/2006/main}"
A_NS = "{http://schemas.openxmlformats.org/drawingml/2006/main}"
R_NS = "{http://schemas.openxmlformats.org/officeDocument/2006/relationships}"
REL_NS = "{http://schemas.openxmlformats.org/package/2006/relationships}"
NOTES_REL = "/notesSlide"

PRESENTATION = "ppt/presentation.xml"
# notes text lives in body placeholders (untyped ones default to "obj");
# sldNum, hdr, ftr, dt and sldImg are page furniture and never read
NARRATION_PLACEHOLDERS = {"body", "obj"}


def _rels_part(part: str) -> str:
    folder, name = posixpath.split(part)
    return posixpath.join(folder, "_rels", name + ".rels")


def _resolve(source: str, target: str) -> str:
    if target.startswith("/"):
        return target.lstrip("/")
    return posixpath.normpath(posixpath.join(posixpath.dirname(source), target))


def _xml(zf: zipfile.ZipFile, part: str) -> ET.Element:
    try:
        return ET.fromstring(zf.read(part))
    except KeyError as exc:
        raise MalformedOoxml(part, "part missing") from exc
    except ET.ParseError as exc:
        raise MalformedOoxml(part, str(exc)) from exc


def _relationships(zf: zipfile.ZipFile, part: str) -> dict[str, tuple[str, str]] | None:
    """rId -> (type, resolved target) for a part, or None without a rels part."""
    rels = _rels_part(part)
    if rels not in zf.namelist():
        return None
    out = {}
    for rel in _xml(zf, rels).iter(f"{REL_NS}Relationship"):
        if rel.get("TargetMode") == "External":
            continue
        out[rel.get("Id")] = (rel.get("Type", ""), _resolve(part, rel.get("Target", "")))
    return out


def _suffix(name: str) -> int:
    m = re.search(r"(\d+)\.xml$", name)
    return int(m.group(1)) if m else 0


def slide_parts(zf: zipfile.ZipFile) -> list[str]:
    """Slide part names in presentation order."""
    root = _xml(zf, PRESENTATION)
    ids = root.find(f"{P_NS}sldIdLst")
    rids = [] if ids is None else [s.get(f"{R_NS}id") for s in ids.findall(f"{P_NS}sldId")]
    rels = _relationships(zf, PRESENTATION)
    if rels is None:
        warnings.warn("presentation relationships missing; ordering slides by file name",
                      OoxmlFallback, stacklevel=3)
        names = [n for n in zf.namelist() if re.fullmatch(r"ppt/slides/slide\d+\.xml", n)]
        return sorted(names, key=_suffix)
    parts = []
    for rid in rids:
        if rid not in rels:
            raise MalformedOoxml(_rels_part(PRESENTATION), f"no relationship {rid}")
        parts.append(rels[rid][1])
    return parts


def _notes_part(zf: zipfile.ZipFile, slide: str) -> str | None:
    rels = _relationships(zf, slide)
    if rels is not None:
        for rtype, target in rels.values():
            if rtype.endswith(NOTES_REL):
                return target
        return None
    guess = f"ppt/notesSlides/notesSlide{_suffix(slide)}.xml"
    warnings.warn(f"{slide} has no relationships part; guessing notes part {guess}",
                  OoxmlFallback, stacklevel=3)
    return guess if guess in zf.namelist() else None


def _placeholder_type(shape: ET.Element) -> str | None:
    ph = shape.find(f"{P_NS}nvSpPr/{P_NS}nvPr/{P_NS}ph")
    if ph is None:
        return None
    return ph.get("type", "obj")


def _paragraph_text(p: ET.Element) -> str:
    pieces = []
    for node in p.iter():
        if node.tag == f"{A_NS}t" and node.text:
            pieces.append(node.text)
        elif node.tag == f"{A_NS}br":
            pieces.append(" ")
    return "".join(pieces)


def notes_text(root: ET.Element) -> str:
    paragraphs = []
    for shape in root.iter(f"{P_NS}sp"):
        if _placeholder_type(shape) not in NARRATION_PLACEHOLDERS:
            continue
        body = shape.find(f"{P_NS}txBody")
        if body is None:
            continue
        paragraphs.extend(_paragraph_text(p) for p in body.findall(f"{A_NS}p"))
    return normalize_script(" ".join(paragraphs))


def pptx_notes(path) -> list[str]:
    """One normalized notes string per slide, in presentation order."""
    path = Path(path)
    try:
        zf = zipfile.ZipFile(path)
    except (zipfile.BadZipFile, IsADirectoryError) as exc:
        raise NotZip(f"{path} is not a ZIP archive") from exc
    with zf:
        if PRESENTATION not in zf.namelist():
            raise MalformedOoxml(PRESENTATION, "part missing")
        notes = []
        for slide in slide_parts(zf):
            if slide not in zf.namelist():
                raise MalformedOoxml(slide, "slide part missing")
            part = _notes_part(zf, slide)
            if part is None:
                notes.append("")
                continue
            notes.append(notes_text(_xml(zf, part)))
        return notes


def slide_count(path) -> int:
    with zipfile.ZipFile(path) as zf:
        return len(slide_parts(zf))
