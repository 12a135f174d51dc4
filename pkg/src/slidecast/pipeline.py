"""End-to-end flows: narrate a deck, stitch it, write subtitles and timings."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import shlex
import shutil
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

from .audio import STANDARD_RATE, WaveAudio, concat_audio, make_silence, read_wav, write_wav
from .config import Config, default_cache_dir
from .errors import CountMismatch, RendererFailed, ValidationError
from .ingest import (
    DEFAULT_DPI,
    front_matter_title,
    gs_to_deck,
    parse_markdown_deck,
    pptx_to_deck,
)
from .model import (
    Deck,
    Lexicon,
    Slide,
    TimingManifest,
    VoiceSpec,
    normalize_script,
    pause_seconds,
    validate_deck,
)
from .render import RenderPreset, RenderResult, stitch
from .subtitles import DEFAULT_LINE_CHARS, build_track, format_srt
from .tools import Toolchain, resolve, run
from .tts import SynthRequest, Synthesizer, apply_lexicon, get_engine, synthesize

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".webp"}


@dataclass(frozen=True)
class RunOptions:
    voice: VoiceSpec = VoiceSpec("offline", "OfflineA", "en-US", "female")
    preset: RenderPreset = field(default_factory=RenderPreset)
    subtitles: bool = True
    pad_seconds: float = 0.5
    lexicon_path: Path | None = None
    cache_dir: Path = field(default_factory=default_cache_dir)
    keep_temps: bool = False
    tts_concurrency: int = 4
    max_line_chars: int = DEFAULT_LINE_CHARS

    def __post_init__(self) -> None:
        if self.pad_seconds < 0:
            raise ValidationError(f"pad_seconds must be >= 0, got {self.pad_seconds}")
        if self.tts_concurrency < 1:
            raise ValidationError("tts_concurrency must be a positive integer")
        object.__setattr__(self, "cache_dir", Path(self.cache_dir))


def cache_key(engine: str, voice_id: str, text: str, sample_rate: int = STANDARD_RATE) -> str:
    """SHA-256 over the canonical JSON of the synthesis inputs."""
    payload = json.dumps([engine, voice_id, normalize_script(text), int(sample_rate)],
                         ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class AudioCache:
    """Synthesized narration stored as ``<key>.wav`` files."""

    def __init__(self, root) -> None:
        self.root = Path(root)

    def path(self, key: str) -> Path:
        return self.root / f"{key}.wav"

    def get(self, key: str) -> WaveAudio | None:
        p = self.path(key)
        if not p.is_file():
            return None
        try:
            return read_wav(p)
        except ValidationError:
            logger.warning("ignoring unreadable cache entry %s", p)
            return None

    def put(self, key: str, audio: WaveAudio) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".part")
        os.close(fd)
        write_wav(audio, tmp)
        os.replace(tmp, self.path(key))


def _sidecar(output: Path, suffix: str) -> Path:
    return output.with_name(output.stem + suffix)


def _narration(deck: Deck, options: RunOptions, engine: Synthesizer,
               lexicon: Lexicon | None) -> tuple[list[WaveAudio], list[str]]:
    """Speech audio and cache key per slide; every synthesis finishes before returning."""
    cache = AudioCache(options.cache_dir)
    audio: list[WaveAudio | None] = [None] * len(deck.slides)
    keys: list[str] = []
    todo = []
    for slide in deck.slides:
        pause = pause_seconds(slide.script_display)
        if pause is not None:
            keys.append(cache_key("pause", "", str(pause), STANDARD_RATE))
            audio[slide.index] = make_silence(pause, STANDARD_RATE, 1)
            continue
        spoken = normalize_script(apply_lexicon(slide.script_spoken, lexicon))
        key = cache_key(engine.name, options.voice.voice_id, spoken, STANDARD_RATE)
        keys.append(key)
        hit = cache.get(key)
        if hit is not None:
            audio[slide.index] = hit
        else:
            todo.append((slide.index, key, spoken))

    def work(item):
        index, key, text = item
        result = synthesize(SynthRequest(text, options.voice, STANDARD_RATE), engine)
        cache.put(key, result)
        return index, result

    if todo:
        logger.info("synthesizing %d of %d slides", len(todo), len(deck.slides))
        with ThreadPoolExecutor(max_workers=options.tts_concurrency) as pool:
            for index, result in pool.map(work, todo):
                audio[index] = result
    return audio, keys


def spin(deck: Deck, options: RunOptions | None = None, output="output.mp4", *,
         engine: Synthesizer | None = None, tools: Toolchain | None = None,
         config: Config | None = None) -> RenderResult:
    """Synthesize every slide, stitch the video, then write subtitles and timings."""
    options = options or RunOptions()
    config = config or Config()
    tools = tools or config.toolchain()
    validate_deck(deck)
    if engine is None:
        engine = get_engine(options.voice.engine, **config.engine_settings())
    lexicon = Lexicon.load(options.lexicon_path) if options.lexicon_path else None

    speech, keys = _narration(deck, options, engine, lexicon)
    slots = [concat_audio([a], options.pad_seconds) for a in speech]
    timings = TimingManifest.from_frames(
        [s.frame_count for s in slots], STANDARD_RATE, keys, [a.frame_count for a in speech]
    )

    output = Path(output)
    result = stitch(deck.images, slots, options.preset, output, tools=tools, timings=timings)
    _sidecar(output, ".timings.json").write_text(timings.to_json(), encoding="utf-8")
    subtitle_path = None
    if options.subtitles:
        cues = build_track([s.script_display for s in deck.slides], timings,
                           options.max_line_chars)
        subtitle_path = _sidecar(output, ".srt")
        with subtitle_path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_srt(cues))
    return replace(result, subtitle_path=subtitle_path)


# -- markdown --------------------------------------------------------------------

Renderer = Callable[[Path, int, Path], Sequence[Path]]


def _natural_key(p: Path):
    return [int(t) if t.isdigit() else t.lower() for t in re.split(r"(\d+)", p.name)]


def list_images(folder) -> list[Path]:
    folder = Path(folder)
    if not folder.is_dir():
        raise ValidationError(f"image folder not found: {folder}")
    return sorted((p for p in folder.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES),
                  key=_natural_key)


def render_slides(command: str, markdown_path, count: int, workdir) -> list[Path]:
    """Run ``<command> --input <md> --slide <k> --out <png>`` once per slide (k from 1)."""
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    base = shlex.split(command)
    if not base or resolve(base[0], base[0]) is None:
        raise RendererFailed(1, None, f"renderer command not found: {command}")
    images = []
    for k in range(1, count + 1):
        png = workdir / f"slide-{k:04d}.png"
        try:
            proc = run([*base, "--input", Path(markdown_path).resolve(), "--slide", str(k),
                        "--out", png], timeout=600)
        except subprocess.TimeoutExpired:
            raise RendererFailed(k, None, "renderer timed out")
        if proc.returncode != 0 or not png.is_file():
            raise RendererFailed(k, proc.returncode, proc.stderr or "no image written")
        images.append(png)
    return images


def markdown_deck(markdown_path, images: Sequence | None = None,
                  renderer: str | Renderer | None = None, workdir=None,
                  voice: VoiceSpec | None = None) -> Deck:
    scripted = parse_markdown_deck(markdown_path)
    if images is None:
        if renderer is None:
            raise ValidationError("supply slide images or a renderer")
        workdir = Path(workdir) if workdir else Path(tempfile.mkdtemp(prefix="slidecast-md-"))
        workdir.mkdir(parents=True, exist_ok=True)
        if callable(renderer):
            images = list(renderer(Path(markdown_path), len(scripted), workdir))
        else:
            images = render_slides(renderer, markdown_path, len(scripted), workdir)
    if len(images) != len(scripted):
        raise CountMismatch(len(images), len(scripted))
    slides = tuple(Slide(i, Path(img), s.script) for i, (img, s) in enumerate(zip(images, scripted)))
    title = front_matter_title(markdown_path) or Path(markdown_path).stem
    return validate_deck(Deck(slides, title, voice))


def _with_workdir(options: RunOptions, build: Callable[[Path], Deck], run_spin):
    workdir = Path(tempfile.mkdtemp(prefix="slidecast-run-"))
    try:
        result = run_spin(build(workdir))
    except Exception:
        logger.error("keeping work directory %s for inspection", workdir)
        raise
    if options.keep_temps:
        logger.info("work directory kept at %s", workdir)
    else:
        shutil.rmtree(workdir, ignore_errors=True)
    return result


def narrate(markdown_path, images: Sequence | None = None,
            renderer: str | Renderer | None = None, options: RunOptions | None = None,
            output="output.mp4", **kwargs) -> RenderResult:
    """Scripts from the Markdown's HTML comments, images supplied or rendered."""
    options = options or RunOptions()
    return _with_workdir(
        options,
        lambda wd: markdown_deck(markdown_path, images, renderer, wd, options.voice),
        lambda deck: spin(deck, options, output, **kwargs),
    )


def spin_pptx(pptx_path, options: RunOptions | None = None, output="output.mp4",
              dpi: int = DEFAULT_DPI, **kwargs) -> RenderResult:
    options = options or RunOptions()
    tools = kwargs.get("tools") or (kwargs.get("config") or Config()).toolchain()
    return _with_workdir(
        options,
        lambda wd: pptx_to_deck(pptx_path, dpi, options.voice, tools=tools, workdir=wd),
        lambda deck: spin(deck, options, output, **kwargs),
    )


def spin_gslides(doc_id: str, options: RunOptions | None = None, output="output.mp4",
                 dpi: int = DEFAULT_DPI, session=None, **kwargs) -> RenderResult:
    options = options or RunOptions()
    config = kwargs.get("config") or Config()
    tools = kwargs.get("tools") or config.toolchain()
    return _with_workdir(
        options,
        lambda wd: gs_to_deck(doc_id, dpi, options.voice, tools=tools, workdir=wd,
                              base_url=config.gslides_base_url, session=session),
        lambda deck: spin(deck, options, output, **kwargs),
    )


# -- environment doctor ------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str
    remedy: str = ""


@dataclass(frozen=True)
class DoctorReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def format(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"[{'PASS' if c.ok else 'FAIL'}] {c.name}: {c.detail}")
            if not c.ok and c.remedy:
                lines.append(f"       fix: {c.remedy}")
        return "\n".join(lines)


def _tool_check(name: str, exe: str | None, version_args: list[str], remedy: str) -> Check:
    if exe is None:
        return Check(name, False, "not found", remedy)
    try:
        proc = run([exe, *version_args], timeout=60)
    except (OSError, subprocess.TimeoutExpired) as exc:
        return Check(name, False, f"{exe} did not run: {exc}", remedy)
    text = (proc.stdout or proc.stderr).strip().splitlines()
    first = text[0] if text else ""
    return Check(name, True, f"{exe} {first}".strip())


def doctor(config: Config | None = None, env=None) -> DoctorReport:
    """Check every external prerequisite; never raises."""
    config = config or Config()
    tools = config.toolchain()
    checks = [
        _tool_check("ffmpeg", resolve(tools.ffmpeg, "ffmpeg"), ["-version"],
                    "install FFmpeg (apt install ffmpeg, brew install ffmpeg, "
                    "pip install ffmpeg-binaries) or set ffmpeg_path"),
        _tool_check("ffprobe", resolve(tools.ffprobe, "ffprobe"), ["-version"],
                    "ffprobe ships with FFmpeg; install it or set probe_path"),
        _tool_check("pptx converter", tools.soffice_exe(), ["--version"],
                    "install LibreOffice (soffice) or set soffice_path"),
        _tool_check("pdf rasterizer", tools.pdftoppm_exe(), ["-v"],
                    "install poppler-utils (pdftoppm) or set pdftoppm_path"),
        Check("offline engine", True, "always available"),
    ]
    try:
        from .tts.polly import PollySynthesizer

        polly = PollySynthesizer.from_environment(
            env=env, credentials_file=config.credentials_file,
            endpoint=config.polly_endpoint, region=config.polly_region)
        ok, detail = polly.check_auth()
    except Exception as exc:
        ok, detail = False, f"check failed: {exc}"
    checks.append(Check("cloud auth (polly)", ok, detail,
                        "" if ok else "export AWS_ACCESS_KEY_ID and AWS_SECRET_ACCESS_KEY "
                        "(and AWS_DEFAULT_REGION), or set credentials_file in slidecast.toml"))
    cache = config.resolved_cache_dir()
    try:
        cache.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=cache):
            pass
        checks.append(Check("cache dir", True, f"{cache} is writable"))
    except OSError as exc:
        checks.append(Check("cache dir", False, f"{cache}: {exc}",
                            "point cache_dir at a writable folder"))
    return DoctorReport(tuple(checks))
