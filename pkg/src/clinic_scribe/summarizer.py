"""Structured summarization: prompt assembly, chat-completion backends,
JSON recovery, and strict eight-field validation.

Summaries are never checked for clinical accuracy here; they are surfaced
for physician review downstream.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from importlib import resources

from clinic_scribe import _http
from clinic_scribe.errors import (
    BackendRejected,
    EmptyTranscript,
    MissingKey,
    NoJsonObjectFound,
    NonTextValue,
    ParseFailure,
    ScribeError,
    SummaryInvalid,
    UnexpectedKey,
)
from clinic_scribe.transcription import FixtureRegistry, Transcript

SUMMARY_KEYS = (
    "chief_complaint",
    "additional_complaint",
    "history_of_present_illness",
    "past_medical_history",
    "family_history",
    "recommended_medication_therapy",
    "recommended_non_medication_therapy",
    "education",
)

FALLBACK_PHRASE = "Informasi tidak tersedia"

# Terse repair instruction appended for the single re-ask.
REASK_INSTRUCTION = "Return only the JSON object."

DEFAULT_MAX_TOKENS = 500
DEFAULT_TEMPERATURE = 0.2


def default_system_prompt() -> str:
    return (resources.files("clinic_scribe") / "data" / "system_prompt_v1.txt").read_text(
        encoding="utf-8"
    )


@dataclass(frozen=True)
class MedicalSummary:
    """The eight-field structured consultation summary."""

    chief_complaint: str
    additional_complaint: str
    history_of_present_illness: str
    past_medical_history: str
    family_history: str
    recommended_medication_therapy: str
    recommended_non_medication_therapy: str
    education: str

    def to_dict(self) -> dict[str, str]:
        return {key: getattr(self, key) for key in SUMMARY_KEYS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"


@dataclass(frozen=True)
class PromptConfig:
    system_prompt: str
    max_tokens: int = DEFAULT_MAX_TOKENS
    temperature: float = DEFAULT_TEMPERATURE

    @classmethod
    def default(cls) -> "PromptConfig":
        return cls(system_prompt=default_system_prompt())


@dataclass(frozen=True)
class PromptBundle:
    system_prompt: str
    user_content: str
    max_tokens: int
    temperature: float

    def __post_init__(self):
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")
        if not self.user_content:
            raise ValueError("user_content must be non-empty")


@dataclass(frozen=True)
class SummarizerBackendDescriptor:
    kind: str  # "remote_api" | "fixture"
    endpoint_url: str = ""
    model_name: str = ""
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
class BackendUsage:
    prompt_tokens: int
    completion_tokens: int


@dataclass(frozen=True)
class SummarizeOutcome:
    summary: MedicalSummary
    latency_s: float
    backend_calls: int
    usage: BackendUsage | None
    prompt_chars: int
    response_chars: int


def transcript_digest(text: str) -> str:
    """Fixture key for the summarization stage."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def build_prompt(transcript: Transcript, config: PromptConfig | None = None) -> PromptBundle:
    """Assemble the chat request: pinned system prompt, transcript verbatim."""
    if config is None:
        config = PromptConfig.default()
    if not transcript.text.strip():
        raise EmptyTranscript("cannot summarize an empty transcript")
    return PromptBundle(
        system_prompt=config.system_prompt,
        user_content=transcript.text,
        max_tokens=config.max_tokens,
        temperature=config.temperature,
    )


def recover_json(raw: str) -> str:
    """Extract the first balanced top-level JSON object from backend output.

    Scans candidate opening braces left to right; from each, walks forward
    tracking string state and escapes until the brace depth returns to zero.
    The earliest candidate that closes wins.
    """
    if not raw:
        raise NoJsonObjectFound("empty backend output")
    n = len(raw)
    start = raw.find("{")
    while start != -1:
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, n):
            ch = raw[i]
            if in_string:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_string = False
            elif ch == '"':
                in_string = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    return raw[start : i + 1]
        start = raw.find("{", start + 1)
    raise NoJsonObjectFound("no balanced JSON object in backend output")


def validate_summary(json_text: str) -> MedicalSummary:
    """Parse and strictly validate the eight-key summary object.

    Exactly the eight known keys must be present with text values; empty
    strings are replaced with the fallback phrase so every field carries
    reviewable text.
    """
    try:
        obj = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise ParseFailure(f"summary text is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseFailure("summary JSON is not an object")

    for key in SUMMARY_KEYS:
        if key not in obj:
            raise MissingKey(key)
    for key in obj:
        if key not in SUMMARY_KEYS:
            raise UnexpectedKey(key)
    for key in SUMMARY_KEYS:
        if not isinstance(obj[key], str):
            raise NonTextValue(key)

    values = {key: (obj[key] if obj[key] != "" else FALLBACK_PHRASE) for key in SUMMARY_KEYS}
    return MedicalSummary(**values)


def _complete(
    bundle: PromptBundle,
    backend: SummarizerBackendDescriptor,
    registry: FixtureRegistry | None,
    extra_instruction: str | None,
) -> tuple[str, BackendUsage | None, float]:
    """One backend call; returns (raw text, usage report, latency)."""
    if backend.kind == "fixture":
        if registry is None:
            if backend.registry_path is None:
                raise ValueError("fixture backend needs a registry")
            registry = FixtureRegistry.load(backend.registry_path)
        digest = transcript_digest(bundle.user_content)
        start = time.perf_counter()
        text = registry.lookup(digest)
        latency = time.perf_counter() - start
        if text is None:
            raise BackendRejected(f"no fixture for digest {digest[:12]}")
        return text, None, latency

    messages = [
        {"role": "system", "content": bundle.system_prompt},
        {"role": "user", "content": bundle.user_content},
    ]
    if extra_instruction:
        messages.append({"role": "user", "content": extra_instruction})
    body = {
        "model": backend.model_name,
        "messages": messages,
        "max_tokens": bundle.max_tokens,
        "temperature": bundle.temperature,
    }
    headers = _http.bearer_headers(backend.token_env)
    start = time.perf_counter()
    response = _http.post_with_retries(
        backend.endpoint_url,
        timeout_s=backend.timeout_s,
        max_retries=backend.max_retries,
        headers=headers,
        json_body=body,
    )
    latency = time.perf_counter() - start

    if response.status_code // 100 != 2:
        raise BackendRejected(
            "summarizer backend refused the request",
            status=response.status_code,
            body_excerpt=response.text[:200],
        )
    try:
        payload = response.json()
        text = payload["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError):
        raise BackendRejected(
            "summarizer response had no message content",
            status=response.status_code,
            body_excerpt=response.text[:200],
        )
    if not isinstance(text, str):
        raise BackendRejected("summarizer message content was not text")

    usage = None
    raw_usage = payload.get("usage")
    if isinstance(raw_usage, dict):
        try:
            usage = BackendUsage(
                prompt_tokens=int(raw_usage["prompt_tokens"]),
                completion_tokens=int(raw_usage["completion_tokens"]),
            )
        except (KeyError, TypeError, ValueError):
            usage = None
    return text, usage, latency


def summarize_detailed(
    transcript: Transcript,
    backend: SummarizerBackendDescriptor,
    registry: FixtureRegistry | None = None,
    prompt_config: PromptConfig | None = None,
) -> SummarizeOutcome:
    """Full summarization pass with the single-re-ask repair policy.

    The first invalid output triggers exactly one repeat call carrying a
    terse JSON-only instruction; a second invalid output raises
    SummaryInvalid. Backend transport errors are not re-asked.
    """
    bundle = build_prompt(transcript, prompt_config)
    total_latency = 0.0
    calls = 0
    last_error: ScribeError | None = None
    for instruction in (None, REASK_INSTRUCTION):
        text, usage, latency = _complete(bundle, backend, registry, instruction)
        calls += 1
        total_latency += latency
        try:
            summary = validate_summary(recover_json(text))
        except (NoJsonObjectFound, ParseFailure, MissingKey, UnexpectedKey, NonTextValue) as exc:
            last_error = exc
            continue
        return SummarizeOutcome(
            summary=summary,
            latency_s=total_latency,
            backend_calls=calls,
            usage=usage,
            prompt_chars=len(bundle.system_prompt) + len(bundle.user_content),
            response_chars=len(text),
        )
    raise SummaryInvalid(last_error, attempts=calls)


def summarize(
    transcript: Transcript,
    backend: SummarizerBackendDescriptor,
    registry: FixtureRegistry | None = None,
    prompt_config: PromptConfig | None = None,
) -> tuple[MedicalSummary, float]:
    outcome = summarize_detailed(transcript, backend, registry, prompt_config)
    return outcome.summary, outcome.latency_s
