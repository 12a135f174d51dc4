"""Amazon Polly compatible REST adapter."""

from __future__ import annotations

import configparser
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import requests

from ..audio import STANDARD_RATE, WaveAudio, normalize_audio
from ..errors import AuthFailure, NetworkFailure, ProviderError
from ..model import VoiceSpec
from ..retry import RetryPolicy
from ..tools import Toolchain
from .base import DEFAULT_MAX_CHARS
from .sigv4 import sign_headers

logger = logging.getLogger(__name__)

SERVICE = "polly"
DEFAULT_REGION = "us-east-1"
# Polly only accepts these rates for raw PCM; anything else is resampled locally
PCM_RATES = (16000, 8000)


@dataclass(frozen=True)
class Credentials:
    access_key: str
    secret_key: str
    session_token: str | None = None


def load_credentials(env: Mapping[str, str] | None = None,
                     credentials_file=None, profile: str = "default"):
    """Return (Credentials or None, list of missing variable names)."""
    env = os.environ if env is None else env
    key, secret = env.get("AWS_ACCESS_KEY_ID"), env.get("AWS_SECRET_ACCESS_KEY")
    token = env.get("AWS_SESSION_TOKEN")
    if not (key and secret) and credentials_file:
        parser = configparser.ConfigParser()
        if parser.read(Path(credentials_file).expanduser()) and parser.has_section(profile):
            section = parser[profile]
            key = key or section.get("aws_access_key_id")
            secret = secret or section.get("aws_secret_access_key")
            token = token or section.get("aws_session_token")
    missing = [name for name, value in
               (("AWS_ACCESS_KEY_ID", key), ("AWS_SECRET_ACCESS_KEY", secret)) if not value]
    if missing:
        return None, missing
    return Credentials(key, secret, token), []


class PollySynthesizer:
    name = "polly"

    def __init__(
        self,
        credentials: Credentials | None,
        region: str = DEFAULT_REGION,
        endpoint: str | None = None,
        *,
        missing: list[str] | None = None,
        max_chars: int = DEFAULT_MAX_CHARS,
        retry: RetryPolicy | None = None,
        session: requests.Session | None = None,
        tools: Toolchain | None = None,
        timeout: float = 30.0,
    ) -> None:
        self.credentials = credentials
        self.missing = missing or ([] if credentials else ["AWS_ACCESS_KEY_ID", "AWS_SECRET_ACCESS_KEY"])
        self.region = region
        self.endpoint = (endpoint or f"https://polly.{region}.amazonaws.com").rstrip("/")
        self.max_chars = max_chars
        self.retry = retry or RetryPolicy()
        self.session = session or requests.Session()
        self.tools = tools
        self.timeout = timeout

    @classmethod
    def from_environment(cls, env: Mapping[str, str] | None = None, credentials_file=None,
                         endpoint: str | None = None, region: str | None = None, **kwargs):
        env = os.environ if env is None else env
        creds, missing = load_credentials(env, credentials_file)
        region = region or env.get("AWS_DEFAULT_REGION") or env.get("AWS_REGION") or DEFAULT_REGION
        return cls(creds, region, endpoint, missing=missing, **kwargs)

    # -- transport ---------------------------------------------------------

    def _request(self, method: str, path: str, payload: dict | None = None) -> requests.Response:
        if self.credentials is None:
            raise AuthFailure("missing credentials: " + ", ".join(self.missing))
        url = self.endpoint + path
        body = b"" if payload is None else json.dumps(payload).encode("utf-8")
        headers = {"Content-Type": "application/json"} if payload is not None else {}

        def send():
            signed = sign_headers(
                method, url, headers, body,
                access_key=self.credentials.access_key,
                secret_key=self.credentials.secret_key,
                session_token=self.credentials.session_token,
                region=self.region, service=SERVICE,
            )
            try:
                return self.session.request(method, url, data=body or None, headers=signed,
                                            timeout=self.timeout)
            except requests.RequestException as exc:
                raise NetworkFailure(f"{method} {url} failed: {exc}") from exc

        response = self.retry.call(send)
        if response.status_code in (401, 403):
            raise AuthFailure(f"HTTP {response.status_code}: {response.text[:300]}")
        return response

    # -- contract ----------------------------------------------------------

    def synthesize_chunk(self, text: str, voice: VoiceSpec, output_rate: int = STANDARD_RATE) -> WaveAudio:
        pcm_rate = output_rate if output_rate in PCM_RATES else PCM_RATES[0]
        payload = {"Text": text, "VoiceId": voice.voice_id,
                   "OutputFormat": "pcm", "SampleRate": str(pcm_rate)}
        response = self._request("POST", "/v1/speech", payload)
        if response.status_code == 400 and ("OutputFormat" in response.text
                                             or "SampleRate" in response.text):
            logger.info("provider rejected PCM output, falling back to MP3")
            payload.update(OutputFormat="mp3", SampleRate=str(output_rate))
            response = self._request("POST", "/v1/speech", payload)
        if response.status_code != 200:
            raise ProviderError(response.status_code, response.text)
        return self._decode(response, payload)

    def _decode(self, response: requests.Response, payload: dict) -> WaveAudio:
        data = response.content
        ctype = response.headers.get("Content-Type", "")
        if data[:4] == b"RIFF":
            return normalize_audio(data, "wav", self.tools)
        if payload["OutputFormat"] == "pcm" and "mpeg" not in ctype and "ogg" not in ctype:
            raw = data[: len(data) - len(data) % 2]
            pcm = WaveAudio(int(payload["SampleRate"]), 1, raw)
            return normalize_audio(pcm.wav_bytes(), "wav", self.tools)
        hint = "ogg" if "ogg" in ctype else "mp3"
        return normalize_audio(data, hint, self.tools)

    def list_voices(self) -> list[VoiceSpec]:
        voices = []
        token = None
        while True:
            path = "/v1/voices" + (f"?NextToken={requests.utils.quote(token)}" if token else "")
            response = self._request("GET", path)
            if response.status_code != 200:
                raise ProviderError(response.status_code, response.text)
            data = response.json()
            for v in data.get("Voices", []):
                voices.append(VoiceSpec(self.name, v.get("Id") or v.get("Name"),
                                        v.get("LanguageCode", ""), v.get("Gender", "")))
            token = data.get("NextToken")
            if not token:
                return voices

    def check_auth(self) -> tuple[bool, str]:
        if self.credentials is None:
            return False, ("missing " + ", ".join(self.missing)
                           + "; export them or set credentials_file in slidecast.toml")
        try:
            voices = self.list_voices()
        except (AuthFailure, NetworkFailure) as exc:
            return False, str(exc)
        return True, f"authenticated against {self.endpoint} ({len(voices)} voices)"
