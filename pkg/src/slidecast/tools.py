"""Locating and running the external programs the pipeline shells out to."""

from __future__ import annotations

import importlib.util
import os
import shutil
import subprocess
from dataclasses import dataclass
from pathlib import Path

LOG_CAP = 64 * 1024


def _bundled(name: str) -> str | None:
    # the ffmpeg-binaries wheel ships static ffmpeg/ffprobe under ffmpeg/binaries/
    try:
        spec = importlib.util.find_spec("ffmpeg")
    except (ImportError, ValueError):
        return None
    if spec is None or not spec.submodule_search_locations:
        return None
    for location in spec.submodule_search_locations:
        candidate = Path(location) / "binaries" / name
        if candidate.is_file():
            if not os.access(candidate, os.X_OK):
                try:
                    candidate.chmod(candidate.stat().st_mode | 0o111)
                except OSError:
                    return None
            return str(candidate)
    return None


def resolve(configured: str | None, default_name: str) -> str | None:
    """Return an executable path, or None when nothing usable is found.

    A configured value may be an absolute path or a bare command name. With no
    configured value the default name is searched on PATH, and for ffmpeg and
    ffprobe the binaries bundled by the optional ``ffmpeg-binaries`` package
    are used as a last resort.
    """
    if configured:
        path = Path(configured).expanduser()
        if path.is_file() and os.access(path, os.X_OK):
            return str(path)
        return shutil.which(configured)
    found = shutil.which(default_name)
    if found:
        return found
    if default_name in ("ffmpeg", "ffprobe"):
        return _bundled(default_name)
    return None


@dataclass(frozen=True)
class Toolchain:
    """Configured locations of external programs (None means search PATH)."""

    ffmpeg: str | None = None
    ffprobe: str | None = None
    soffice: str | None = None
    pdftoppm: str | None = None

    def ffmpeg_exe(self) -> str:
        from .errors import FfmpegMissing

        exe = resolve(self.ffmpeg, "ffmpeg")
        if exe is None:
            raise FfmpegMissing(
                "ffmpeg executable not found; install FFmpeg or set ffmpeg_path"
            )
        return exe

    def ffprobe_exe(self) -> str:
        from .errors import FfmpegMissing

        exe = resolve(self.ffprobe, "ffprobe")
        if exe is None:
            raise FfmpegMissing(
                "ffprobe executable not found; install FFmpeg or set probe_path"
            )
        return exe

    def soffice_exe(self) -> str | None:
        return resolve(self.soffice, "soffice") or (
            None if self.soffice else resolve(None, "libreoffice")
        )

    def pdftoppm_exe(self) -> str | None:
        return resolve(self.pdftoppm, "pdftoppm")


def run(cmd: list[str], timeout: float | None = None, cwd=None) -> subprocess.CompletedProcess:
    """Run a command capturing text output; stderr is capped to the last 64 KiB."""
    proc = subprocess.run(
        [str(c) for c in cmd],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        timeout=timeout,
        cwd=cwd,
    )
    proc.stdout = proc.stdout.decode("utf-8", "replace")
    proc.stderr = proc.stderr[-LOG_CAP:].decode("utf-8", "replace")
    return proc
