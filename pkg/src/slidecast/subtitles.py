"""SRT subtitles timed from per-slide narration lengths."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyCaptions, InvalidCue, MalformedBlock, ValidationError
from .model import TimingManifest, normalize_script, pause_seconds

DEFAULT_LINE_CHARS = 42

_TIMING = re.compile(
    r"^(\d{2,}):(\d{2}):(\d{2}),(\d{3})\s+-->\s+(\d{2,}):(\d{2}):(\d{2}),(\d{3})\s*$"
)


@dataclass(frozen=True)
class SubtitleCue:
    index: int
    start_ms: int
    end_ms: int
    text: str


def split_captions(text: str, max_line_chars: int = DEFAULT_LINE_CHARS) -> list[str]:
    """Greedy word wrap; a word longer than the limit gets a caption of its own."""
    if max_line_chars < 8:
        raise ValidationError("max_line_chars must be >= 8")
    captions: list[str] = []
    line = ""
    for word in normalize_script(text).split(" "):
        if not word:
            continue
        if line and len(line) + 1 + len(word) <= max_line_chars:
            line += " " + word
        else:
            if line:
                captions.append(line)
            line = word
    if line:
        captions.append(line)
    return captions


def allocate_cues(captions: Sequence[str], slide_start: float, slide_duration: float,
                  first_index: int = 1) -> list[SubtitleCue]:
    """Share the slide's time among captions in proportion to their length."""
    if not captions:
        raise EmptyCaptions("a slide needs at least one caption")
    if not slide_duration > 0:
        raise ValidationError(f"slide duration must be positive, got {slide_duration}")
    start_ms = round(slide_start * 1000)
    end_ms = round((slide_start + slide_duration) * 1000)
    n = len(captions)
    if end_ms - start_ms < n:
        raise InvalidCue(f"{n} captions do not fit in {end_ms - start_ms} ms")
    weights = [max(len(c), 1) for c in captions]
    total = sum(weights)
    bounds = [start_ms]
    running = 0
    for k in range(1, n):
        running += weights[k - 1]
        b = round((slide_start + slide_duration * running / total) * 1000)
        # keep every cue at least 1 ms long
        bounds.append(min(max(b, bounds[-1] + 1), end_ms - (n - k)))
    bounds.append(end_ms)
    return [
        SubtitleCue(first_index + k, bounds[k], bounds[k + 1], captions[k]) for k in range(n)
    ]


def build_track(display_scripts: Sequence[str], timings: TimingManifest,
                max_line_chars: int = DEFAULT_LINE_CHARS) -> list[SubtitleCue]:
    """Cues for a whole video; each slide's cues cover only its narrated part."""
    if len(display_scripts) != len(timings.slides):
        raise ValidationError("need one script per timed slide")
    cues: list[SubtitleCue] = []
    for script, t in zip(display_scripts, timings.slides):
        if pause_seconds(script) is not None:
            continue
        captions = split_captions(script, max_line_chars)
        if not captions:
            continue
        cues.extend(allocate_cues(captions, t.start, t.speech, len(cues) + 1))
    return cues


def format_timestamp(ms: int) -> str:
    hours, rest = divmod(ms, 3_600_000)
    minutes, rest = divmod(rest, 60_000)
    seconds, millis = divmod(rest, 1000)
    return f"{hours:02d}:{minutes:02d}:{seconds:02d},{millis:03d}"


def _check(cues: Sequence[SubtitleCue]) -> None:
    prev_end = 0
    for i, cue in enumerate(cues, 1):
        if cue.index != i:
            raise InvalidCue(f"cue {i} has index {cue.index}")
        if not 0 <= cue.start_ms < cue.end_ms:
            raise InvalidCue(f"cue {i} has bad span {cue.start_ms}..{cue.end_ms}")
        if cue.start_ms < prev_end:
            raise InvalidCue(f"cue {i} overlaps the previous cue")
        lines = cue.text.split("\n")
        if not cue.text or any(not line.strip() for line in lines):
            raise InvalidCue(f"cue {i} has empty text lines")
        prev_end = cue.end_ms


def format_srt(cues: Sequence[SubtitleCue]) -> str:
    _check(cues)
    blocks = [
        f"{c.index}\n{format_timestamp(c.start_ms)} --> {format_timestamp(c.end_ms)}\n{c.text}\n"
        for c in cues
    ]
    return "\n".join(blocks)


def _ms(h, m, s, ms) -> int:
    return ((int(h) * 60 + int(m)) * 60 + int(s)) * 1000 + int(ms)


def parse_srt(text: str) -> list[SubtitleCue]:
    text = text.lstrip("\ufeff").replace("\r\n", "\n").replace("\r", "\n")
    cues = []
    for number, block in enumerate(re.split(r"\n[ \t]*\n", text.strip("\n")), 1):
        lines = block.strip("\n").split("\n")
        if not block.strip():
            continue
        if len(lines) < 3 or not lines[0].strip().isdigit():
            raise MalformedBlock(number, "expected index, timing and text lines")
        m = _TIMING.match(lines[1].strip())
        if not m:
            raise MalformedBlock(number, f"bad timing line {lines[1]!r}")
        g = m.groups()
        start, end = _ms(*g[:4]), _ms(*g[4:])
        if start >= end:
            raise MalformedBlock(number, "cue ends before it starts")
        cues.append(SubtitleCue(int(lines[0].strip()), start, end, "\n".join(lines[2:])))
    return cues
