"""Core value types: slides, decks, voices, lexicons and timing manifests."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    EmptyDeck,
    EmptyScript,
    InvalidDeck,
    InvalidLexicon,
    InvalidManifest,
    MissingImage,
)

_PAUSE = re.compile(r"^\[\[pause\s+(\d+(?:\.\d*)?|\.\d+)\]\]$")


def normalize_script(text: str) -> str:
    """Strip the ends and collapse every whitespace run to a single space."""
    return " ".join(text.split())


def pause_seconds(script: str) -> float | None:
    """Seconds of silence requested by a ``[[pause X]]`` script, else None."""
    m = _PAUSE.match(normalize_script(script))
    return float(m.group(1)) if m else None


@dataclass(frozen=True)
class VoiceSpec:
    engine: str
    voice_id: str
    language_tag: str = ""
    gender_label: str = ""

    def __post_init__(self) -> None:
        if not self.voice_id:
            raise InvalidDeck("voice_id must be non-empty")
        if not self.engine:
            raise InvalidDeck("engine must be non-empty")


@dataclass(frozen=True)
class Slide:
    index: int
    image_path: Path
    script_display: str
    script_spoken: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "image_path", Path(self.image_path))
        if not self.script_spoken:
            object.__setattr__(self, "script_spoken", self.script_display)


@dataclass(frozen=True)
class Deck:
    slides: tuple[Slide, ...]
    title: str = ""
    default_voice: VoiceSpec | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "slides", tuple(self.slides))

    @classmethod
    def from_pairs(
        cls,
        images: Sequence,
        scripts: Sequence[str],
        title: str = "",
        voice: VoiceSpec | None = None,
    ) -> "Deck":
        from .errors import CountMismatch

        if len(images) != len(scripts):
            raise CountMismatch(len(images), len(scripts))
        slides = [Slide(i, Path(img), s) for i, (img, s) in enumerate(zip(images, scripts))]
        return cls(tuple(slides), title, voice)

    @property
    def images(self) -> list[Path]:
        return [s.image_path for s in self.slides]

    @property
    def scripts(self) -> list[str]:
        return [s.script_display for s in self.slides]


def validate_deck(deck: Deck) -> Deck:
    """Check the slide invariants and return the deck untouched."""
    if not deck.slides:
        raise EmptyDeck()
    indices = [s.index for s in deck.slides]
    if indices != list(range(len(deck.slides))):
        raise InvalidDeck(f"slide indices must be 0..{len(deck.slides) - 1}, got {indices}")
    for slide in deck.slides:
        if not slide.image_path.is_file():
            raise MissingImage(slide.image_path, slide.index)
        if not normalize_script(slide.script_display):
            raise EmptyScript(slide.index)
        if not normalize_script(slide.script_spoken):
            raise EmptyScript(slide.index)
    return deck


@dataclass(frozen=True)
class Lexicon:
    """Display spellings mapped to the spellings a synthesizer pronounces well."""

    entries: tuple[tuple[str, str], ...] = ()
    _pattern: re.Pattern | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        entries = tuple((str(d), str(s)) for d, s in self.entries)
        object.__setattr__(self, "entries", entries)
        seen = set()
        for display, _ in entries:
            if not display:
                raise InvalidLexicon("lexicon display forms must be non-empty")
            if display in seen:
                raise InvalidLexicon(f"duplicate lexicon display form {display!r}")
            seen.add(display)
        if entries:
            # longest first so "ggplot2" wins over "ggplot"
            alternatives = sorted((d for d, _ in entries), key=len, reverse=True)
            pattern = re.compile(
                r"(?<!\w)(?:" + "|".join(re.escape(a) for a in alternatives) + r")(?!\w)"
            )
            object.__setattr__(self, "_pattern", pattern)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "Lexicon":
        return cls(tuple(pairs))

    @classmethod
    def load(cls, path) -> "Lexicon":
        """Read a JSON array of ``{"display": ..., "spoken": ...}`` objects."""
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidLexicon(f"cannot read lexicon {path}: {exc}") from exc
        if not isinstance(data, list):
            raise InvalidLexicon("lexicon file must hold a JSON array")
        try:
            return cls(tuple((item["display"], item["spoken"]) for item in data))
        except (KeyError, TypeError) as exc:
            raise InvalidLexicon("lexicon entries need 'display' and 'spoken' keys") from exc

    def apply(self, text: str) -> str:
        if self._pattern is None:
            return text
        table = dict(self.entries)
        return self._pattern.sub(lambda m: table[m.group(0)], text)


@dataclass(frozen=True)
class SlideTiming:
    index: int
    start: float
    duration: float
    cache_key: str = ""
    speech_duration: float | None = None

    @property
    def end(self) -> float:
        return self.start + self.duration

    @property
    def speech(self) -> float:
        return self.duration if self.speech_duration is None else self.speech_duration


@dataclass(frozen=True)
class TimingManifest:
    """Where each slide's audio sits on the output timeline.

    ``duration`` is the full slot (speech plus trailing pad); ``speech_duration``
    is the narrated part that subtitles cover.
    """

    slides: tuple[SlideTiming, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "slides", tuple(self.slides))
        prev_end = None
        for t in self.slides:
            if not t.duration > 0:
                raise InvalidManifest(f"slide {t.index} has non-positive duration {t.duration}")
            if prev_end is not None and abs(t.start - prev_end) > 1e-6:
                raise InvalidManifest(f"slide {t.index} does not start where the previous ends")
            prev_end = t.end

    @classmethod
    def from_frames(
        cls,
        slot_frames: Sequence[int],
        sample_rate: int,
        keys: Sequence[str] | None = None,
        speech_frames: Sequence[int] | None = None,
    ) -> "TimingManifest":
        """Build from integer frame counts so starts chain exactly."""
        keys = keys or [""] * len(slot_frames)
        speech_frames = speech_frames or slot_frames
        out = []
        offset = 0
        for i, (n, key, sp) in enumerate(zip(slot_frames, keys, speech_frames)):
            out.append(
                SlideTiming(i, offset / sample_rate, n / sample_rate, key, sp / sample_rate)
            )
            offset += n
        return cls(tuple(out))

    @property
    def total(self) -> float:
        return self.slides[-1].end if self.slides else 0.0

    def to_json(self) -> str:
        records = [
            {
                "index": t.index,
                "start": round(t.start, 6),
                "duration": round(t.duration, 6),
                "speech_duration": round(t.speech, 6),
                "cache_key": t.cache_key,
            }
            for t in self.slides
        ]
        return json.dumps({"slides": records, "total": round(self.total, 6)}, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TimingManifest":
        data = json.loads(text)
        return cls(
            tuple(
                SlideTiming(r["index"], r["start"], r["duration"], r.get("cache_key", ""),
                            r.get("speech_duration"))
                for r in data["slides"]
            )
        )


def load_manifest(path) -> Deck:
    """Load a deck manifest, resolving image paths against the manifest's folder."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidManifest(f"cannot read manifest {path}: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("slides"), list):
        raise InvalidManifest("manifest needs a 'slides' array")
    voice = None
    if isinstance(data.get("voice"), dict):
        v = data["voice"]
        voice = VoiceSpec(v.get("engine", "offline"), v.get("voice_id", ""),
                          v.get("language_tag", ""), v.get("gender_label", ""))
    slides = []
    for i, item in enumerate(data["slides"]):
        try:
            image, script = item["image"], item["script"]
        except (KeyError, TypeError) as exc:
            raise InvalidManifest(f"slide {i} needs 'image' and 'script'") from exc
        image = Path(image)
        if not image.is_absolute():
            image = path.parent / image
        slides.append(Slide(i, image, script))
    return Deck(tuple(slides), data.get("title", ""), voice)
