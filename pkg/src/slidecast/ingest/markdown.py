"""Markdown slide decks whose narration lives in HTML comments."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..errors import NotText, UnterminatedComment
from ..model import normalize_script

_HEADING = re.compile(r"^(#{1,2})(?:[ \t]+(.*?))?[ \t#]*$")
_RULE = re.compile(r"^---+[ \t]*$")
_FENCE = re.compile(r"^[ ]{0,3}(`{3,}|~{3,})")


@dataclass(frozen=True)
class ScriptedSlide:
    heading: str
    script: str
    source_locator: str


@dataclass
class _Open:
    heading: str
    line: int
    by_rule: bool
    comments: list
    has_content: bool = False


def _read_lines(path: Path) -> list[str]:
    data = path.read_bytes()
    if b"\x00" in data:
        raise NotText(f"{path} is not a text file")
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise NotText(f"{path} is not UTF-8 text: {exc}") from exc
    return text.splitlines()


def _front_matter_end(lines: list[str]) -> int:
    if lines and lines[0].strip() == "---":
        for i in range(1, len(lines)):
            if lines[i].strip() in ("---", "..."):
                return i + 1
    return 0


def front_matter_title(path) -> str:
    lines = _read_lines(Path(path))
    for line in lines[1:_front_matter_end(lines)]:
        m = re.match(r"""^title:\s*["']?(.*?)["']?\s*$""", line)
        if m:
            return m.group(1)
    return ""


def parse_markdown_deck(path) -> list[ScriptedSlide]:
    """Split a Markdown deck into slides and collect each slide's comment text.

    Slides start at ``#``/``##`` headings or ``---`` rules. A heading directly
    after a rule titles the rule's slide instead of opening another one. A
    stretch with neither text nor comments (blank preamble, trailing rule)
    does not count as a slide.
    """
    path = Path(path)
    lines = _read_lines(path)
    start = _front_matter_end(lines)

    slides: list[_Open] = []
    current = _Open("", start + 1, False, [])
    fence = None
    comment = None  # (first line number, collected fragments)

    def close(slide: _Open) -> None:
        # blank preamble or a rule with nothing under it is not a slide
        if slide.has_content or slide.comments:
            slides.append(slide)

    for lineno, line in enumerate(lines[start:], start + 1):
        if comment is not None:
            end = line.find("-->")
            if end < 0:
                comment[1].append(line)
                continue
            comment[1].append(line[:end])
            current.comments.append(" ".join(comment[1]))
            comment = None
            line = line[end + 3:]
            if not line.strip():
                continue
        elif fence is not None:
            m = _FENCE.match(line)
            if m and m.group(1)[0] == fence[0] and len(m.group(1)) >= len(fence) \
                    and not line.strip()[len(m.group(1)):].strip():
                fence = None
            current.has_content = True
            continue
        else:
            m = _FENCE.match(line)
            if m:
                fence = m.group(1)
                current.has_content = True
                continue
            heading = _HEADING.match(line)
            if heading or _RULE.match(line):
                title = (heading.group(2) or "").strip() if heading else ""
                if heading and current.by_rule and not current.has_content and not current.comments:
                    current.heading = title
                    current.has_content = True
                    continue
                close(current)
                current = _Open(title, lineno, not heading, [], has_content=bool(heading))
                continue

        # scan the line for comments, possibly several or one left open
        pos = 0
        while True:
            begin = line.find("<!--", pos)
            if begin < 0:
                if line[pos:].strip():
                    current.has_content = True
                break
            if line[pos:begin].strip():
                current.has_content = True
            end = line.find("-->", begin + 4)
            if end < 0:
                comment = (lineno, [line[begin + 4:]])
                break
            current.comments.append(line[begin + 4:end])
            pos = end + 3

    if comment is not None:
        raise UnterminatedComment(comment[0], path)
    close(current)
    return [
        ScriptedSlide(s.heading, normalize_script(" ".join(s.comments)), f"{path}:{s.line}")
        for s in slides
    ]
