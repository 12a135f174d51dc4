"""Compile slide images plus narration scripts into narrated lecture videos."""

from .audio import WaveAudio, concat_audio, make_silence, normalize_audio, read_wav, write_wav
from .model import Deck, Lexicon, Slide, TimingManifest, VoiceSpec, normalize_script, validate_deck
from .pipeline import RunOptions, cache_key, doctor, narrate, spin, spin_gslides, spin_pptx
from .render import RenderPreset, RenderResult, probe_media, stitch
from .subtitles import SubtitleCue, format_srt, parse_srt

__version__ = "0.1.0"

__all__ = [
    "Deck",
    "Lexicon",
    "RenderPreset",
    "RenderResult",
    "RunOptions",
    "Slide",
    "SubtitleCue",
    "TimingManifest",
    "VoiceSpec",
    "WaveAudio",
    "cache_key",
    "concat_audio",
    "doctor",
    "format_srt",
    "make_silence",
    "narrate",
    "normalize_audio",
    "normalize_script",
    "parse_srt",
    "probe_media",
    "read_wav",
    "spin",
    "spin_gslides",
    "spin_pptx",
    "stitch",
    "validate_deck",
    "write_wav",
]
