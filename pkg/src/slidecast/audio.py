"""16-bit PCM audio values and WAV file I/O."""

from __future__ import annotations

import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    CorruptHeader,
    DecodeFailure,
    IoFailure,
    MixedFormats,
    NegativeDuration,
    NotWav,
    UnsupportedEncoding,
    ValidationError,
)
from .tools import Toolchain, run

STANDARD_RATE = 22050
STANDARD_CHANNELS = 1

_PCM = 0x0001
_FLOAT = 0x0003
_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class WaveAudio:
    """Interleaved little-endian signed 16-bit samples."""

    sample_rate: int
    channels: int
    samples: bytes = b""

    def __post_init__(self) -> None:
        if self.sample_rate <= 0:
            raise ValidationError(f"sample rate must be positive, got {self.sample_rate}")
        if self.channels not in (1, 2):
            raise ValidationError(f"channels must be 1 or 2, got {self.channels}")
        if len(self.samples) % (2 * self.channels):
            raise ValidationError("sample data is not a whole number of frames")

    bit_depth = 16

    @classmethod
    def from_array(cls, array, sample_rate: int, channels: int = 1) -> "WaveAudio":
        data = np.asarray(array, dtype="<i2")
        return cls(sample_rate, channels, data.tobytes())

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.samples, dtype="<i2")

    @property
    def frame_count(self) -> int:
        return len(self.samples) // (2 * self.channels)

    @property
    def duration(self) -> float:
        return self.frame_count / self.sample_rate

    def wav_bytes(self) -> bytes:
        return _header(self.sample_rate, self.channels, len(self.samples)) + self.samples

    def __repr__(self) -> str:
        return (f"WaveAudio(sample_rate={self.sample_rate}, channels={self.channels}, "
                f"frames={self.frame_count})")


def duration(audio: WaveAudio) -> float:
    return audio.frame_count / audio.sample_rate


def _header(rate: int, channels: int, data_len: int) -> bytes:
    block = channels * 2
    return (
        b"RIFF" + struct.pack("<I", 36 + data_len) + b"WAVE"
        + b"fmt " + struct.pack("<IHHIIHH", 16, _PCM, channels, rate, rate * block, block, 16)
        + b"data" + struct.pack("<I", data_len)
    )


def _to_int16(raw: bytes, tag: int, bits: int) -> np.ndarray:
    if tag == _FLOAT:
        if bits not in (32, 64):
            raise UnsupportedEncoding(f"{bits}-bit float samples")
        x = np.frombuffer(raw, dtype="<f4" if bits == 32 else "<f8")
        return np.clip(np.round(x * 32767.0), -32768, 32767).astype("<i2")
    if bits == 16:
        return np.frombuffer(raw, dtype="<i2")
    if bits == 8:
        x = np.frombuffer(raw, dtype=np.uint8).astype(np.int32)
        return ((x - 128) << 8).astype("<i2")
    if bits == 24:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        x = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        x = np.where(x >= 1 << 23, x - (1 << 24), x)
        return np.clip((x + 128) >> 8, -32768, 32767).astype("<i2")
    if bits == 32:
        x = np.frombuffer(raw, dtype="<i4").astype(np.int64)
        return np.clip((x + 32768) >> 16, -32768, 32767).astype("<i2")
    raise UnsupportedEncoding(f"{bits}-bit PCM samples")


def decode_wav(data: bytes) -> WaveAudio:
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise NotWav("not a RIFF/WAVE file")
    pos = 12
    fmt = None
    payload = None
    while pos + 8 <= len(data):
        cid = data[pos:pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4:pos + 8])
        body = data[pos + 8:pos + 8 + size]
        if cid == b"fmt ":
            if len(body) < 16:
                raise CorruptHeader("fmt chunk too short")
            fmt = body
        elif cid == b"data":
            # streamed WAVs may carry a bogus 0xFFFFFFFF size; slicing clamps it
            payload = body
            if fmt is not None:
                break
        pos += 8 + size + (size & 1)
    if fmt is None or payload is None:
        raise CorruptHeader("missing fmt or data chunk")
    tag, channels, rate, _, block, bits = struct.unpack("<HHIIHH", fmt[:16])
    if tag == _EXTENSIBLE:
        if len(fmt) < 40:
            raise CorruptHeader("extensible fmt chunk too short")
        (tag,) = struct.unpack("<H", fmt[24:26])
    if tag not in (_PCM, _FLOAT):
        raise UnsupportedEncoding(f"WAV format tag 0x{tag:04x} is not PCM")
    if channels not in (1, 2):
        raise UnsupportedEncoding(f"{channels}-channel audio")
    if rate <= 0 or bits == 0 or bits % 8:
        raise CorruptHeader(f"bad rate/bit depth ({rate} Hz, {bits} bits)")
    width = bits // 8 * channels
    usable = len(payload) - len(payload) % width
    samples = _to_int16(payload[:usable], tag, bits)
    return WaveAudio(rate, channels, samples.astype("<i2").tobytes())


def read_wav(path) -> WaveAudio:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return decode_wav(data)


def write_wav(audio: WaveAudio, path) -> Path:
    path = Path(path)
    try:
        path.write_bytes(audio.wav_bytes())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def make_silence(seconds: float, sample_rate: int = STANDARD_RATE,
                 channels: int = STANDARD_CHANNELS) -> WaveAudio:
    if seconds < 0:
        raise NegativeDuration(f"silence length must be >= 0, got {seconds}")
    frames = int(round(seconds * sample_rate))
    return WaveAudio(sample_rate, channels, bytes(frames * 2 * channels))


def concat_audio(segments: Sequence[WaveAudio],
                 pad_seconds: float | Sequence[float] = 0.0) -> WaveAudio:
    """Join segments in order, each followed by its trailing silence."""
    if not segments:
        raise ValidationError("nothing to concatenate")
    pads = ([pad_seconds] * len(segments) if isinstance(pad_seconds, (int, float))
            else list(pad_seconds))
    if len(pads) != len(segments):
        raise ValidationError("need one pad length per segment")
    rate, channels = segments[0].sample_rate, segments[0].channels
    parts = []
    for seg, pad in zip(segments, pads):
        if seg.sample_rate != rate or seg.channels != channels:
            raise MixedFormats(
                f"cannot join {seg.sample_rate} Hz/{seg.channels} ch with {rate} Hz/{channels} ch"
            )
        parts.append(seg.samples)
        if pad:
            parts.append(make_silence(pad, rate, channels).samples)
    return WaveAudio(rate, channels, b"".join(parts))


def _is_standard(audio: WaveAudio) -> bool:
    return audio.sample_rate == STANDARD_RATE and audio.channels == STANDARD_CHANNELS


def normalize_audio(source, hint: str | None = None, tools: Toolchain | None = None) -> WaveAudio:
    """Decode any FFmpeg-readable audio into 22050 Hz mono 16-bit.

    ``source`` is raw bytes or a path; ``hint`` is a file extension such as
    ``"mp3"`` used to name the temporary input for FFmpeg's format probe.
    """
    tools = tools or Toolchain()
    data = source if isinstance(source, (bytes, bytearray)) else None
    if data is None:
        try:
            data = Path(source).read_bytes()
        except OSError as exc:
            raise DecodeFailure(f"cannot read {source}: {exc}") from exc
        hint = hint or Path(source).suffix.lstrip(".")
    if not data:
        raise DecodeFailure("empty audio input")
    if data[:4] == b"RIFF":
        try:
            audio = decode_wav(bytes(data))
        except ValidationError:
            audio = None
        if audio is not None and _is_standard(audio):
            return audio
    exe = tools.ffmpeg_exe()
    with tempfile.TemporaryDirectory(prefix="slidecast-norm-") as tmp:
        src = Path(tmp) / f"in.{(hint or 'bin').lstrip('.')}"
        dst = Path(tmp) / "out.wav"
        src.write_bytes(data)
        proc = run([exe, "-hide_banner", "-nostdin", "-y", "-i", src,
                    "-ar", str(STANDARD_RATE), "-ac", str(STANDARD_CHANNELS),
                    "-sample_fmt", "s16", "-c:a", "pcm_s16le", dst])
        if proc.returncode != 0 or not dst.exists():
            raise DecodeFailure("ffmpeg could not decode audio", proc.returncode, proc.stderr)
        return read_wav(dst)
