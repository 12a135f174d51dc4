"""Download link-shared Google Slides decks through the export endpoint."""

from __future__ import annotations

import tempfile
from pathlib import Path
from urllib.parse import urlsplit

import requests

from ..errors import NetworkFailure, NotFound, SharingDisabled, ValidationError

DEFAULT_BASE_URL = "https://docs.google.com"
CONTENT_TYPES = {
    "pdf": "application/pdf",
    "pptx": "application/vnd.openxmlformats-officedocument.presentationml.presentation",
}
_LOGIN_HINTS = ("accounts.google.com", "servicelogin", "/signin", "/login")


def export_url(doc_id: str, fmt: str, base_url: str = DEFAULT_BASE_URL) -> str:
    return f"{base_url.rstrip('/')}/presentation/d/{doc_id}/export/{fmt}"


def _looks_like_login(url: str) -> bool:
    parts = urlsplit(url)
    where = (parts.netloc + parts.path).lower()
    return any(h in where for h in _LOGIN_HINTS)


def gslides_export(doc_id: str, fmt: str = "pdf", dest_dir=None, *,
                   base_url: str = DEFAULT_BASE_URL,
                   session: requests.Session | None = None,
                   timeout: float = 60.0) -> Path:
    if fmt not in CONTENT_TYPES:
        raise ValidationError(f"export format must be one of {sorted(CONTENT_TYPES)}")
    if not doc_id or "/" in doc_id:
        raise ValidationError(f"bad document id {doc_id!r}")
    session = session or requests.Session()
    url = export_url(doc_id, fmt, base_url)
    try:
        response = session.get(url, allow_redirects=True, timeout=timeout)
    except requests.RequestException as exc:
        raise NetworkFailure(f"GET {url} failed: {exc}") from exc

    hops = [r.url for r in response.history] + [response.url]
    if response.status_code in (401, 403) or any(_looks_like_login(u) for u in hops[1:]):
        raise SharingDisabled(
            f"document {doc_id} is not shared by link; turn on link sharing and retry"
        )
    if response.status_code == 404:
        raise NotFound(f"no Google Slides document with id {doc_id}")
    if response.status_code != 200:
        raise NetworkFailure(f"GET {url} returned HTTP {response.status_code}")
    ctype = response.headers.get("Content-Type", "").split(";")[0].strip()
    if ctype != CONTENT_TYPES[fmt]:
        # an HTML interstitial in place of the file means access was refused
        if ctype.startswith("text/html"):
            raise SharingDisabled(f"document {doc_id} returned a sign-in page")
        raise NetworkFailure(f"unexpected content type {ctype!r} for {fmt} export")

    dest = Path(dest_dir) if dest_dir else Path(tempfile.mkdtemp(prefix="slidecast-gs-"))
    dest.mkdir(parents=True, exist_ok=True)
    out = dest / f"{doc_id}.{fmt}"
    out.write_bytes(response.content)
    return out
