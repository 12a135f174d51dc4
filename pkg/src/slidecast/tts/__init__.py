from ..model import VoiceSpec
from .base import (
    DEFAULT_MAX_CHARS,
    ENGINES,
    Synthesizer,
    SynthRequest,
    apply_lexicon,
    check_auth,
    chunk_text,
    get_engine,
    list_voices,
    synthesize,
)
from .offline import OfflineSynthesizer, synthesize_offline
from .polly import Credentials, PollySynthesizer, load_credentials

__all__ = [
    "DEFAULT_MAX_CHARS",
    "ENGINES",
    "Credentials",
    "OfflineSynthesizer",
    "PollySynthesizer",
    "SynthRequest",
    "Synthesizer",
    "VoiceSpec",
    "apply_lexicon",
    "check_auth",
    "chunk_text",
    "get_engine",
    "list_voices",
    "load_credentials",
    "synthesize",
    "synthesize_offline",
]
