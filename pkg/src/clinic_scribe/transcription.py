"""Speech-to-text stage: a remote HTTP backend and a deterministic fixture
backend keyed by the clip's content digest."""

from __future__ import annotations

import json
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from clinic_scribe import _http
from clinic_scribe.audio_ingest import AudioClip, clip_digest, encode_wav
from clinic_scribe.errors import BackendRejected, DuplicateDigest, EmptyTranscript

_DIGEST_RE = re.compile(r"^[0-9a-f]{64}$")


@dataclass(frozen=True)
class TranscriptionBackendDescriptor:
    kind: str  # "remote_api" | "fixture"
    endpoint_url: str = ""
    model_name: str = ""
    language_hint: str = "id"
    timeout_s: float = 30.0
    max_retries: int = 2
    token_env: str | None = None
    registry_path: str | None = None  # fixture kind only

    def __post_init__(self):
        if self.kind not in ("remote_api", "fixture"):
            raise ValueError(f"unknown backend kind: {self.kind}")
        if self.kind == "remote_api" and not self.endpoint_url:
            raise ValueError("remote_api backend requires endpoint_url")
        if self.timeout_s < 1:
            raise ValueError("timeout_s must be at least 1 second")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")


@dataclass(frozen=True)
class Transcript:
    text: str
    language: str
    audio_duration_s: float
    latency_s: float


class FixtureRegistry:
    """Digest-keyed text store backing the deterministic test backends.

    Concurrent lookups are lock-free dict reads; registration takes the
    write lock. Serializes to a flat JSON object mapping digest to text.
    """

    def __init__(self, entries: dict[str, str] | None = None):
        self._entries: dict[str, str] = dict(entries or {})
        self._write_lock = threading.Lock()

    @classmethod
    def load(cls, path: str | Path) -> "FixtureRegistry":
        entries = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(entries, dict):
            raise ValueError("fixture registry must be a JSON object")
        return cls(entries)

    def save(self, path: str | Path) -> None:
        text = json.dumps(self._entries, ensure_ascii=False, indent=2, sort_keys=True)
        Path(path).write_text(text + "\n", encoding="utf-8")

    def register(self, digest: str, text: str) -> None:
        if not _DIGEST_RE.match(digest):
            raise ValueError(f"not a sha-256 hex digest: {digest!r}")
        if not text:
            raise ValueError("fixture text must be non-empty")
        with self._write_lock:
            if digest in self._entries:
                raise DuplicateDigest(digest)
            self._entries[digest] = text

    def lookup(self, digest: str) -> str | None:
        return self._entries.get(digest)

    def __len__(self) -> int:
        return len(self._entries)


def register_fixture(registry: FixtureRegistry, digest: str, text: str) -> None:
    registry.register(digest, text)


def transcribe(
    clip: AudioClip,
    backend: TranscriptionBackendDescriptor,
    registry: FixtureRegistry | None = None,
) -> Transcript:
    """Convert a 16 kHz clip to text through the configured backend.

    Latency covers the backend call only. The input clip is never modified.
    """
    if clip.sample_rate_hz != 16000:
        raise ValueError(f"transcription expects 16000 Hz audio, got {clip.sample_rate_hz}")

    if backend.kind == "fixture":
        if registry is None:
            if backend.registry_path is None:
                raise ValueError("fixture backend needs a registry")
            registry = FixtureRegistry.load(backend.registry_path)
        digest = clip_digest(clip)
        start = time.perf_counter()
        text = registry.lookup(digest)
        latency = time.perf_counter() - start
        if text is None:
            raise BackendRejected(f"no fixture for digest {digest[:12]}")
        return Transcript(
            text=text,
            language=backend.language_hint,
            audio_duration_s=clip.duration_s,
            latency_s=latency,
        )

    wav = encode_wav(clip)
    headers = _http.bearer_headers(backend.token_env)
    start = time.perf_counter()
    response = _http.post_with_retries(
        backend.endpoint_url,
        timeout_s=backend.timeout_s,
        max_retries=backend.max_retries,
        headers=headers,
        files={"file": ("audio.wav", wav, "audio/wav")},
        data={"model": backend.model_name, "language": backend.language_hint},
    )
    latency = time.perf_counter() - start

    if response.status_code // 100 != 2:
        raise BackendRejected(
            "transcription backend refused the request",
            status=response.status_code,
            body_excerpt=response.text[:200],
        )
    try:
        payload = response.json()
        text = payload["text"]
    except (ValueError, KeyError, TypeError):
        raise BackendRejected(
            "transcription response had no text member",
            status=response.status_code,
            body_excerpt=response.text[:200],
        )
    if not isinstance(text, str) or not text.strip():
        raise EmptyTranscript("backend returned blank transcript text")
    language = payload.get("language") or backend.language_hint
    return Transcript(
        text=text,
        language=language,
        audio_duration_s=clip.duration_s,
        latency_s=latency,
    )
