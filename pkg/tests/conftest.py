import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from slidecast.tools import Toolchain, resolve  # noqa: E402
from slidecast.tts.offline import OfflineSynthesizer  # noqa: E402
from helpers import write_png  # noqa: E402

BIN = Path(__file__).parent / "bin"
HAVE_FFMPEG = resolve(None, "ffmpeg") is not None and resolve(None, "ffprobe") is not None


def pytest_collection_modifyitems(config, items):
    skip = pytest.mark.skip(reason="ffmpeg/ffprobe not installed")
    for item in items:
        if "ffmpeg" in item.keywords and not HAVE_FFMPEG:
            item.add_marker(skip)


@pytest.fixture
def fake_tools() -> Toolchain:
    """Toolchain whose converter and rasterizer are the PyMuPDF-backed doubles."""
    return Toolchain(soffice=str(BIN / "soffice"), pdftoppm=str(BIN / "pdftoppm"))


@pytest.fixture
def make_images(tmp_path):
    def make(n, width=64, height=36, folder="img"):
        d = tmp_path / folder
        d.mkdir(exist_ok=True)
        return [write_png(d / f"s{i}.png", width, height, (40 * i % 256, 90, 160))
                for i in range(n)]
    return make


class CountingOffline(OfflineSynthesizer):
    """Offline engine that counts synthesize_chunk calls."""

    def __init__(self):
        self.calls = 0

    def synthesize_chunk(self, text, voice, output_rate=22050):
        self.calls += 1
        return super().synthesize_chunk(text, voice, output_rate)


@pytest.fixture
def counting_engine():
    return CountingOffline()


# -- acceptance reporting ------------------------------------------------------

_ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and not report.passed):
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        # several tests may back one criterion; any failure fails it
        previous = _ACCEPTANCE.get(number, ("PASS", title))[0]
        if previous != "PASS":
            status = previous if previous == "FAIL" or status == "PASS" else status
        _ACCEPTANCE[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")
