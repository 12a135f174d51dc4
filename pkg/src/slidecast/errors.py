"""Exception hierarchy.

Every error carries the CLI exit code of its category so the command line
front end can map failures without a lookup table:

    2  validation error        (bad input decks, scripts, files, cues)
    3  missing external tool   (ffmpeg, ffprobe, soffice, pdftoppm)
    4  authentication failure  (cloud credentials, private documents)
    5  network failure         (unreachable endpoints, provider errors)
    6  render failure          (an external tool ran and failed)
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TOOL_MISSING = 3
EXIT_AUTH = 4
EXIT_NETWORK = 5
EXIT_RENDER = 6


class SlidecastError(Exception):
    exit_code = EXIT_RENDER


# -- validation ------------------------------------------------------------


class ValidationError(SlidecastError, ValueError):
    exit_code = EXIT_VALIDATION


class EmptyDeck(ValidationError):
    def __init__(self, message: str = "deck has no slides") -> None:
        super().__init__(message)


class EmptyScript(ValidationError):
    def __init__(self, index: int) -> None:
        self.index = index
        super().__init__(f"slide {index} has an empty script")


class MissingImage(ValidationError):
    def __init__(self, path, index: int | None = None) -> None:
        self.path = path
        self.index = index
        where = "" if index is None else f" (slide {index})"
        super().__init__(f"image not found: {path}{where}")


class CountMismatch(ValidationError):
    def __init__(self, images: int, scripts: int, what: str = "scripts") -> None:
        self.images = images
        self.scripts = scripts
        super().__init__(
            f"number of images ({images}) does not equal number of {what} ({scripts})"
        )


class InvalidDeck(ValidationError):
    pass


class InvalidLexicon(ValidationError):
    pass


class InvalidManifest(ValidationError):
    pass


class UnknownEngine(ValidationError):
    pass


class NegativeDuration(ValidationError):
    pass


class NonpositiveDuration(ValidationError):
    pass


class TooSmall(ValidationError):
    pass


class OddDimensions(ValidationError):
    pass


class MixedFormats(ValidationError):
    pass


class NotWav(ValidationError):
    pass


class CorruptHeader(ValidationError):
    pass


class UnsupportedEncoding(ValidationError):
    pass


class NotText(ValidationError):
    pass


class UnterminatedComment(ValidationError):
    def __init__(self, line: int, path=None) -> None:
        self.line = line
        where = f"{path}:" if path else "line "
        super().__init__(f"{where}{line}: HTML comment opened but never closed")


class NotZip(ValidationError):
    pass


class MalformedOoxml(ValidationError):
    def __init__(self, part: str, detail: str = "") -> None:
        self.part = part
        super().__init__(f"malformed OOXML part {part}" + (f": {detail}" if detail else ""))


class EmptyCaptions(ValidationError):
    pass


class InvalidCue(ValidationError):
    pass


class MalformedBlock(ValidationError):
    def __init__(self, block: int, detail: str = "") -> None:
        self.block = block
        super().__init__(f"malformed SRT block {block}" + (f": {detail}" if detail else ""))


class NotFound(ValidationError):
    pass


# -- missing tools ---------------------------------------------------------


class ToolMissing(SlidecastError):
    exit_code = EXIT_TOOL_MISSING


class FfmpegMissing(ToolMissing):
    pass


class ConverterMissing(ToolMissing):
    pass


class RasterizerMissing(ToolMissing):
    pass


# -- auth / network --------------------------------------------------------


class AuthFailure(SlidecastError):
    exit_code = EXIT_AUTH


class SharingDisabled(AuthFailure):
    pass


class NetworkFailure(SlidecastError):
    exit_code = EXIT_NETWORK


class ProviderError(NetworkFailure):
    def __init__(self, status: int, body: str = "") -> None:
        self.status = status
        self.body = body[:500]
        super().__init__(f"provider returned HTTP {status}: {self.body}")


# -- render ----------------------------------------------------------------


class RenderFailure(SlidecastError):
    exit_code = EXIT_RENDER


class ToolFailed(RenderFailure):
    """An external program exited non-zero."""

    def __init__(self, message: str, returncode: int | None = None, stderr: str = "") -> None:
        self.returncode = returncode
        self.stderr = stderr
        tail = stderr.strip().splitlines()[-5:]
        detail = ("\n  " + "\n  ".join(tail)) if tail else ""
        super().__init__(message + detail)


class FfmpegFailed(ToolFailed):
    result = None


class ProbeFailed(RenderFailure):
    pass


class ParseFailure(RenderFailure):
    def __init__(self, line: str) -> None:
        self.line = line
        super().__init__(f"could not parse ffmpeg output line: {line!r}")


class DecodeFailure(ToolFailed):
    pass


class ConverterFailed(ToolFailed):
    pass


class RasterizerFailed(ToolFailed):
    pass


class RendererFailed(ToolFailed):
    def __init__(self, slide: int, returncode: int | None = None, stderr: str = "") -> None:
        self.slide = slide
        super().__init__(f"slide renderer failed on slide {slide}", returncode, stderr)


class IoFailure(RenderFailure, OSError):
    pass


# -- warnings --------------------------------------------------------------


class UnsplittableToken(UserWarning):
    """A single word is longer than the synthesizer's request limit."""


class OoxmlFallback(UserWarning):
    """Slide/notes correlation fell back to file-name numbering."""
