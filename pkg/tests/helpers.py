"""Fixture builders shared by the test modules."""

from __future__ import annotations

import json
import struct
import threading
import zipfile
import zlib
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from xml.sax.saxutils import escape

LECTURE_NOTES = [
    "Sometimes it's hard for an instructor to take the time to record their lectures. "
    "For example, I'm in a coffee shop and it may be loud.",
    "Here is an example of a plot with really small axes. We plot the x versus the "
    "y-variables and a smoother between them.",
]


def write_png(path, width: int = 64, height: int = 36, rgb=(30, 90, 160)) -> Path:
    """Minimal truecolor PNG, written with zlib only."""
    row = b"\x00" + bytes(rgb) * width
    raw = row * height

    def chunk(tag: bytes, data: bytes) -> bytes:
        return struct.pack(">I", len(data)) + tag + data + struct.pack(
            ">I", zlib.crc32(tag + data) & 0xFFFFFFFF)

    png = (b"\x89PNG\r\n\x1a\n"
           + chunk(b"IHDR", struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0))
           + chunk(b"IDAT", zlib.compress(raw))
           + chunk(b"IEND", b""))
    path = Path(path)
    path.write_bytes(png)
    return path


# -- OOXML ---------------------------------------------------------------------

NS = ('xmlns:a="http://schemas.openxmlformats.org/drawingml/2006/main" '
      'xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships" '
      'xmlns:p="http://schemas.openxmlformats.org/presentationml/2006/main"')
REL = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"


def _shape(ph_type: str | None, paragraphs: list[str], sid: int) -> str:
    ph = "" if ph_type is None else f'<p:ph type="{ph_type}"/>'
    paras = "".join(
        "<a:p>" + "".join(f"<a:r><a:t>{escape(run)}</a:t></a:r>" for run in p.split("|")) + "</a:p>"
        for p in paragraphs
    )
    return (f'<p:sp><p:nvSpPr><p:cNvPr id="{sid}" name="s{sid}"/><p:cNvSpPr/>'
            f"<p:nvPr>{ph}</p:nvPr></p:nvSpPr><p:spPr/>"
            f"<p:txBody><a:bodyPr/>{paras}</p:txBody></p:sp>")


def notes_xml(paragraphs: list[str], furniture: bool = True) -> str:
    shapes = [_shape("body", paragraphs, 3)]
    if furniture:
        shapes.insert(0, _shape("sldImg", [], 2))
        shapes.append(_shape("sldNum", ["7"], 4))
        shapes.append(_shape("ftr", ["Footer text"], 5))
        shapes.append(_shape("dt", ["1/1/2020"], 6))
    return (f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?><p:notes {NS}>'
            f'<p:cSld><p:spTree>{"".join(shapes)}</p:spTree></p:cSld></p:notes>')


def build_pptx(path, notes: list, *, slide_rels: bool = True, order: list[int] | None = None,
               presentation_rels: bool = True) -> Path:
    """Write a small PPTX.

    ``notes[k]`` is None (no notes part), a string, or a list of paragraph
    strings where ``|`` separates text runs. Slide files are numbered 1..n;
    ``order`` lists file numbers in presentation order. Notes parts are
    numbered in reverse so only the relationship parts can pair them up.
    """
    n = len(notes)
    order = order or list(range(1, n + 1))
    files = {}
    files["[Content_Types].xml"] = (
        '<?xml version="1.0" encoding="UTF-8"?><Types '
        'xmlns="http://schemas.openxmlformats.org/package/2006/content-types"/>')
    ids = "".join(f'<p:sldId id="{256 + i}" r:id="rId{i + 1}"/>' for i in range(n))
    files["ppt/presentation.xml"] = (
        f'<?xml version="1.0" encoding="UTF-8"?><p:presentation {NS}>'
        f"<p:sldIdLst>{ids}</p:sldIdLst></p:presentation>")
    if presentation_rels:
        rels = "".join(
            f'<Relationship Id="rId{i + 1}" Type="{REL}/slide" Target="slides/slide{num}.xml"/>'
            for i, num in enumerate(order))
        files["ppt/_rels/presentation.xml.rels"] = (
            '<?xml version="1.0" encoding="UTF-8"?><Relationships '
            f'xmlns="http://schemas.openxmlformats.org/package/2006/relationships">{rels}'
            "</Relationships>")
    for num in range(1, n + 1):
        files[f"ppt/slides/slide{num}.xml"] = (
            f'<?xml version="1.0" encoding="UTF-8"?><p:sld {NS}><p:cSld><p:spTree>'
            f'{_shape("title", [f"Slide {num}"], 2)}</p:spTree></p:cSld></p:sld>')
        note = notes[order.index(num)]
        notes_num = (n + 1 - num) if slide_rels else num
        if note is not None:
            paragraphs = [note] if isinstance(note, str) else list(note)
            files[f"ppt/notesSlides/notesSlide{notes_num}.xml"] = notes_xml(paragraphs)
        if slide_rels:
            target = "" if note is None else (
                f'<Relationship Id="rId2" Type="{REL}/notesSlide" '
                f'Target="../notesSlides/notesSlide{notes_num}.xml"/>')
            files[f"ppt/slides/_rels/slide{num}.xml.rels"] = (
                '<?xml version="1.0" encoding="UTF-8"?><Relationships '
                'xmlns="http://schemas.openxmlformats.org/package/2006/relationships">'
                f'<Relationship Id="rId1" Type="{REL}/slideLayout" '
                f'Target="../slideLayouts/slideLayout1.xml"/>{target}</Relationships>')
    path = Path(path)
    with zipfile.ZipFile(path, "w") as zf:
        for name, body in files.items():
            zf.writestr(name, body)
    return path


# -- HTTP ----------------------------------------------------------------------


class MockServer:
    """Threaded HTTP server dispatching to ``routes[(method, path)]``.

    A route is a callable ``(request) -> (status, headers, body)`` or a list of
    such tuples/callables consumed in order (the last one repeats).
    """

    def __init__(self) -> None:
        self.routes: dict = {}
        self.requests: list[dict] = []
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _serve(self):
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length) if length else b""
                path = self.path.split("?")[0]
                req = {"method": self.command, "path": path, "url": self.path,
                       "headers": dict(self.headers), "body": body}
                server.requests.append(req)
                route = server.routes.get((self.command, path))
                if route is None:
                    status, headers, payload = 404, {"Content-Type": "text/plain"}, b"not found"
                else:
                    if isinstance(route, list):
                        step = route.pop(0) if len(route) > 1 else route[0]
                    else:
                        step = route
                    status, headers, payload = step(req) if callable(step) else step
                if isinstance(payload, (dict, list)):
                    payload = json.dumps(payload).encode()
                    headers = {"Content-Type": "application/json", **headers}
                self.send_response(status)
                for k, v in headers.items():
                    self.send_header(k, v)
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            do_GET = do_POST = _serve

        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(
            target=self.httpd.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True)

    @property
    def url(self) -> str:
        host, port = self.httpd.server_address[:2]
        return f"http://{host}:{port}"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.httpd.shutdown()
        self.httpd.server_close()


TEST_KEY, TEST_SECRET = "TESTKEY", "testsecret"
POLLY_VOICES = [
    [{"Id": "Joanna", "LanguageCode": "en-US", "Gender": "Female"},
     {"Id": "Brian", "LanguageCode": "en-GB", "Gender": "Male"}],
    [{"Id": "Lea", "LanguageCode": "fr-FR", "Gender": "Female"}],
]


def pcm_tone(seconds: float, rate: int = 16000, freq: float = 440.0) -> bytes:
    """Raw little-endian 16-bit mono samples, like Polly's pcm output."""
    import numpy as np

    t = np.arange(int(round(seconds * rate))) / rate
    return (8000 * np.sin(2 * np.pi * freq * t)).astype("<i2").tobytes()


def _authorized(req) -> bool:
    return f"Credential={TEST_KEY}/" in req["headers"].get("Authorization", "")


def _denied():
    return 403, {}, {"message": "The security token included in the request is invalid."}


def polly_speech(body: bytes = None, content_type: str = "audio/pcm"):
    def handler(req):
        if not _authorized(req):
            return _denied()
        payload = json.loads(req["body"])
        if not payload.get("Text") or not payload.get("VoiceId"):
            return 400, {}, {"message": "Text and VoiceId are required"}
        audio = body if body is not None else pcm_tone(1.0, int(payload["SampleRate"]))
        return 200, {"Content-Type": content_type}, audio
    return handler


def polly_voices(req):
    if not _authorized(req):
        return _denied()
    if "NextToken=page2" in req["url"]:
        return 200, {}, {"Voices": POLLY_VOICES[1]}
    return 200, {}, {"Voices": POLLY_VOICES[0], "NextToken": "page2"}


def install_polly(server: MockServer, speech=None) -> MockServer:
    server.routes[("POST", "/v1/speech")] = speech or polly_speech()
    server.routes[("GET", "/v1/voices")] = polly_voices
    return server
