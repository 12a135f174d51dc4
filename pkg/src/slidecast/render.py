"""Turning ordered still images and their narration into one video with FFmpeg."""

from __future__ import annotations

import json
import logging
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .audio import WaveAudio, concat_audio, read_wav, write_wav
from .errors import (
    CountMismatch,
    FfmpegFailed,
    MissingImage,
    NonpositiveDuration,
    OddDimensions,
    ParseFailure,
    ProbeFailed,
    TooSmall,
    ValidationError,
)
from .model import TimingManifest
from .tools import LOG_CAP, Toolchain, run

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RenderPreset:
    """Encoder settings; ``quality`` is a CRF level, ``bitrate`` overrides it."""

    container: str = "mp4"
    video_codec: str = "libx264"
    audio_codec: str = "aac"
    pixel_format: str = "yuv420p"
    fps: float = 24
    quality: int | None = 23
    bitrate: str | None = None
    divisible_dims: bool = True
    extra_args: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "extra_args", tuple(self.extra_args))
        if not self.fps > 0:
            raise ValidationError(f"fps must be positive, got {self.fps}")
        if self.bitrate is not None and self.quality is not None:
            # an explicit bitrate wins over the default CRF
            object.__setattr__(self, "quality", None)
        if self.bitrate is None and self.quality is None:
            raise ValidationError("preset needs a quality level or a bitrate")

    def encoder_args(self) -> list[str]:
        args = ["-c:v", self.video_codec]
        if self.bitrate is not None:
            args += ["-b:v", str(self.bitrate)]
        else:
            args += ["-crf", str(self.quality)]
        args += ["-pix_fmt", self.pixel_format, "-r", f"{self.fps:g}", "-c:a", self.audio_codec]
        if self.container in ("mp4", "mov", "ipod"):
            args += ["-movflags", "+faststart"]
        return args + ["-f", self.container]


@dataclass(frozen=True)
class Capability:
    name: str
    kind: str
    flags: dict = field(default_factory=dict, compare=False)
    description: str = ""


@dataclass(frozen=True)
class StreamInfo:
    kind: str
    codec: str
    width: int | None = None
    height: int | None = None
    pixel_format: str | None = None
    duration: float | None = None


@dataclass(frozen=True)
class MediaInfo:
    duration: float
    streams: tuple[StreamInfo, ...]
    format_name: str = ""

    def of_kind(self, kind: str) -> list[StreamInfo]:
        return [s for s in self.streams if s.kind == kind]


@dataclass(frozen=True)
class RenderResult:
    success: bool
    outfile: Path
    log: str = ""
    timings: TimingManifest | None = None
    subtitle_path: Path | None = None

    def __bool__(self) -> bool:
        return self.success


# -- capability discovery ------------------------------------------------------

KINDS = ("muxer", "video_codec", "audio_codec")
_MUXER_LINE = re.compile(r"^ ([D. ])([E. ]) (\S+)\s*(.*)$")
_CODEC_LINE = re.compile(r"^ ([D.])([E.])([VASDT.])([I.])([L.])([S.]) (\S+)\s*(.*)$")


def parse_muxers(text: str) -> list[Capability]:
    out = []
    body = False
    for line in text.splitlines():
        if not body:
            body = line.strip() == "--"
            continue
        if not line.strip():
            continue
        m = _MUXER_LINE.match(line)
        if not m:
            raise ParseFailure(line)
        demux, mux, name, desc = m.groups()
        out.append(Capability(name, "muxer", {"demux": demux == "D", "mux": mux == "E"}, desc))
    return out


def parse_codecs(text: str) -> list[Capability]:
    out = []
    body = False
    kinds = {"V": "video_codec", "A": "audio_codec", "S": "subtitle_codec",
             "D": "data_codec", "T": "attachment_codec"}
    for line in text.splitlines():
        if not body:
            body = set(line.strip()) == {"-"}
            continue
        if not line.strip():
            continue
        m = _CODEC_LINE.match(line)
        if not m:
            raise ParseFailure(line)
        dec, enc, kind, intra, lossy, lossless, name, desc = m.groups()
        out.append(Capability(name, kinds.get(kind, "unknown"), {
            "decode": dec == "D", "encode": enc == "E", "intra_only": intra == "I",
            "lossy": lossy == "L", "lossless": lossless == "S",
        }, desc))
    return out


def ffmpeg_capabilities(kind: str, tools: Toolchain | None = None) -> list[Capability]:
    """Muxers, video codecs or audio codecs known to the installed FFmpeg."""
    if kind not in KINDS:
        raise ValidationError(f"kind must be one of {KINDS}, got {kind!r}")
    exe = (tools or Toolchain()).ffmpeg_exe()
    proc = run([exe, "-hide_banner", "-muxers" if kind == "muxer" else "-codecs"])
    if proc.returncode != 0:
        raise FfmpegFailed("ffmpeg capability listing failed", proc.returncode, proc.stderr)
    if kind == "muxer":
        return parse_muxers(proc.stdout)
    return [c for c in parse_codecs(proc.stdout) if c.kind == kind]


# -- geometry and concat playlist ----------------------------------------------


def even_scale(width: int, height: int) -> tuple[int, int]:
    """Round each dimension down to an even number (x264 with yuv420p needs it)."""
    if width < 2 or height < 2:
        raise TooSmall(f"image {width}x{height} is smaller than 2x2")
    return width - width % 2, height - height % 2


def _quote(path: str) -> str:
    return "'" + path.replace("'", "'\\''") + "'"


def build_concat_spec(images: Sequence, durations: Sequence[float]) -> str:
    """Concat-demuxer playlist showing each image for its duration.

    The last ``file`` line is repeated so the demuxer holds the final image for
    its full duration instead of a single frame.
    """
    if len(images) != len(durations):
        raise CountMismatch(len(images), len(durations), "durations")
    if not images:
        raise ValidationError("no images to stitch")
    lines = []
    for image, d in zip(images, durations):
        if not d > 0:
            raise NonpositiveDuration(f"slide duration must be positive, got {d}")
        lines.append(f"file {_quote(str(image))}")
        lines.append(f"duration {d:.3f}")
    lines.append(f"file {_quote(str(images[-1]))}")
    return "\n".join(lines) + "\n"


# -- probing -------------------------------------------------------------------


def _num(value) -> float | None:
    try:
        return float(value)
    except (TypeError, ValueError):
        return None


def probe_media(path, tools: Toolchain | None = None) -> MediaInfo:
    path = Path(path)
    if not path.exists():
        raise ProbeFailed(f"no such file: {path}")
    exe = (tools or Toolchain()).ffprobe_exe()
    proc = run([exe, "-v", "error", "-print_format", "json", "-show_format", "-show_streams", path])
    if proc.returncode != 0:
        raise ProbeFailed(f"ffprobe failed on {path}: {proc.stderr.strip()[-500:]}")
    try:
        data = json.loads(proc.stdout)
    except json.JSONDecodeError as exc:
        raise ProbeFailed(f"ffprobe returned invalid JSON for {path}") from exc
    streams = tuple(
        StreamInfo(s.get("codec_type", ""), s.get("codec_name", ""), s.get("width"),
                   s.get("height"), s.get("pix_fmt"), _num(s.get("duration")))
        for s in data.get("streams", [])
    )
    fmt = data.get("format", {})
    duration = _num(fmt.get("duration"))
    if duration is None:
        durations = [s.duration for s in streams if s.duration is not None]
        duration = max(durations) if durations else 0.0
    return MediaInfo(duration, streams, fmt.get("format_name", ""))


# -- stitching -----------------------------------------------------------------


def _frame_size(image: Path, tools: Toolchain) -> tuple[int, int]:
    info = probe_media(image, tools)
    for s in info.of_kind("video"):
        if s.width and s.height:
            return s.width, s.height
    raise ProbeFailed(f"cannot read dimensions of {image}")


def stitch(images: Sequence, audios: Sequence, preset: RenderPreset | None = None,
           output="output.mp4", *, tools: Toolchain | None = None,
           timings: TimingManifest | None = None) -> RenderResult:
    """Show each image for the length of its audio and encode one video.

    ``audios`` holds WaveAudio values or WAV paths. Raises FfmpegFailed (with a
    failed RenderResult attached) when the encoder exits non-zero.
    """
    if len(images) != len(audios):
        raise CountMismatch(len(images), len(audios), "audio segments")
    if not images:
        raise ValidationError("need at least one image")
    preset = preset or RenderPreset()
    tools = tools or Toolchain()
    images = [Path(p).resolve() for p in images]
    for i, image in enumerate(images):
        if not image.is_file():
            raise MissingImage(image, i)
    segments = [a if isinstance(a, WaveAudio) else read_wav(a) for a in audios]
    joined = concat_audio(segments, 0.0)
    if timings is None:
        timings = TimingManifest.from_frames([s.frame_count for s in segments],
                                             joined.sample_rate)
    spec = build_concat_spec(images, [s.duration for s in segments])
    exe = tools.ffmpeg_exe()

    width, height = _frame_size(images[0], tools)
    if preset.divisible_dims:
        width, height = even_scale(width, height)
    elif width % 2 or height % 2:
        raise OddDimensions(
            f"{images[0].name} is {width}x{height}; enable divisible_dims to scale it"
        )
    vf = f"scale={width}:{height},setsar=1,fps={preset.fps:g},format={preset.pixel_format}"

    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    # encode beside the target and rename once probed, so a failed run never
    # leaves a truncated video at the output path
    partial = output.with_name(f".{output.name}.partial")
    with tempfile.TemporaryDirectory(prefix="slidecast-stitch-") as tmp:
        spec_path = Path(tmp) / "slides.txt"
        spec_path.write_text(spec, encoding="utf-8")
        audio_path = write_wav(joined, Path(tmp) / "narration.wav")
        cmd = [exe, "-hide_banner", "-nostdin", "-y",
               "-f", "concat", "-safe", "0", "-i", spec_path,
               "-i", audio_path,
               "-map", "0:v:0", "-map", "1:a:0",
               "-vf", vf, *preset.encoder_args(), "-shortest",
               *preset.extra_args, partial]
        logger.debug("running %s", " ".join(map(str, cmd)))
        proc = run(cmd)
    log = proc.stderr[-LOG_CAP:]
    # some FFmpeg builds exit 0 after an encoder setup error, so also require output
    produced = partial.is_file() and partial.stat().st_size > 0
    if proc.returncode != 0 or not produced:
        partial.unlink(missing_ok=True)
        output.unlink(missing_ok=True)
        err = FfmpegFailed("ffmpeg failed to encode the video", proc.returncode, log)
        err.result = RenderResult(False, output, log or f"ffmpeg exited {proc.returncode}", timings)
        raise err
    try:
        info = probe_media(partial, tools)
        if not info.of_kind("video") or not info.of_kind("audio"):
            raise ProbeFailed(f"{output} lacks a video or an audio stream")
    except ProbeFailed:
        partial.unlink(missing_ok=True)
        raise
    partial.replace(output)
    return RenderResult(True, output, log, timings)
