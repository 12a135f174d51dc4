"""Synthesizer contract, text preparation and the engine registry."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from ..audio import STANDARD_RATE, WaveAudio, concat_audio
from ..errors import UnknownEngine, UnsplittableToken, ValidationError
from ..model import Lexicon, VoiceSpec, normalize_script

DEFAULT_MAX_CHARS = 1500


@dataclass(frozen=True)
class SynthRequest:
    text: str
    voice: VoiceSpec
    output_rate: int = STANDARD_RATE

    def __post_init__(self) -> None:
        if not normalize_script(self.text):
            raise ValidationError("synthesis text must be non-empty")


@runtime_checkable
class Synthesizer(Protocol):
    name: str
    max_chars: int

    def synthesize_chunk(self, text: str, voice: VoiceSpec, output_rate: int) -> WaveAudio:
        """Return audio already normalized to the internal standard format."""

    def list_voices(self) -> list[VoiceSpec]: ...

    def check_auth(self) -> tuple[bool, str]: ...


def apply_lexicon(text: str, lexicon: Lexicon | None) -> str:
    return lexicon.apply(text) if lexicon else text


def _sentence_break(window: str, limit: int) -> int:
    # index just past the last ". ", "! " or "? " whose chunk fits in limit
    for i in range(min(limit, len(window) - 1) - 1, -1, -1):
        if window[i] in ".!?" and window[i + 1] == " ":
            return i + 1
    return -1


def chunk_text(text: str, max_chars: int = DEFAULT_MAX_CHARS) -> list[str]:
    """Split normalized text into request-sized chunks at sentence or word breaks."""
    if max_chars < 1:
        raise ValidationError("max_chars must be >= 1")
    rest = normalize_script(text)
    chunks = []
    while len(rest) > max_chars:
        window = rest[:max_chars + 1]
        cut = _sentence_break(window, max_chars)
        if cut <= 0:
            cut = window.rfind(" ")
        if cut <= 0:
            cut = rest.find(" ")
            if cut < 0:
                cut = len(rest)
            warnings.warn(
                f"word of {cut} characters exceeds the {max_chars}-character limit",
                UnsplittableToken,
                stacklevel=2,
            )
        chunks.append(rest[:cut])
        rest = rest[cut:].lstrip(" ")
    if rest:
        chunks.append(rest)
    return chunks


def synthesize(request: SynthRequest, engine: Synthesizer) -> WaveAudio:
    """Chunk, synthesize and join one narration text."""
    pieces = [
        engine.synthesize_chunk(chunk, request.voice, request.output_rate)
        for chunk in chunk_text(request.text, engine.max_chars)
    ]
    return concat_audio(pieces, 0.0)


def check_auth(engine: Synthesizer) -> tuple[bool, str]:
    return engine.check_auth()


def list_voices(engine: Synthesizer) -> list[VoiceSpec]:
    return engine.list_voices()


ENGINES = ("offline", "polly")


def get_engine(name: str, **settings) -> Synthesizer:
    """Construct a registered adapter; ``settings`` go to the polly adapter."""
    if name == "offline":
        from .offline import OfflineSynthesizer

        return OfflineSynthesizer()
    if name == "polly":
        from .polly import PollySynthesizer

        return PollySynthesizer.from_environment(**settings)
    raise UnknownEngine(f"unknown engine {name!r}; choose from {', '.join(ENGINES)}")
