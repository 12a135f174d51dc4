"""Deterministic offline synthesizer: a sine tone whose length follows the word count."""

from __future__ import annotations

import sys
import zlib

import numpy as np

from ..audio import STANDARD_RATE, WaveAudio
from ..errors import ValidationError
from ..model import VoiceSpec

WORDS_PER_SECOND = 2.5
MIN_SECONDS = 0.4
AMPLITUDE = 0.3

VOICES = (
    VoiceSpec("offline", "OfflineA", "en-US", "female"),
    VoiceSpec("offline", "OfflineB", "en-GB", "male"),
)
_FREQUENCIES = {"OfflineA": 440.0, "OfflineB": 330.0}


def tone_frequency(voice_id: str) -> float:
    """440/330 Hz for the two built-in voices; other ids get a stable pitch in 200-600 Hz."""
    if voice_id in _FREQUENCIES:
        return _FREQUENCIES[voice_id]
    return 200.0 + zlib.crc32(voice_id.encode("utf-8")) % 400


def offline_duration(text: str) -> float:
    return max(MIN_SECONDS, len(text.split()) / WORDS_PER_SECOND)


def synthesize_offline(text: str, voice: VoiceSpec | str = "OfflineA") -> WaveAudio:
    voice_id = voice.voice_id if isinstance(voice, VoiceSpec) else voice
    if not text.split():
        raise ValidationError("offline synthesis needs non-empty text")
    frames = int(round(offline_duration(text) * STANDARD_RATE))
    t = np.arange(frames, dtype=np.float64) / STANDARD_RATE
    wave = np.round(AMPLITUDE * 32767.0 * np.sin(2.0 * np.pi * tone_frequency(voice_id) * t))
    return WaveAudio(STANDARD_RATE, 1, wave.astype("<i2").tobytes())


class OfflineSynthesizer:
    name = "offline"
    # one request per text so the duration law holds for the whole script
    max_chars = sys.maxsize

    def synthesize_chunk(self, text: str, voice: VoiceSpec, output_rate: int = STANDARD_RATE) -> WaveAudio:
        return synthesize_offline(text, voice)

    def list_voices(self) -> list[VoiceSpec]:
        return list(VOICES)

    def check_auth(self) -> tuple[bool, str]:
        return True, "offline engine needs no credentials"
