"""Typed errors shared across the pipeline.

Every operational failure surfaces as a ScribeError subclass so callers
(the service, the CLI) can map failures to HTTP statuses and exit codes
without string matching.
"""

from __future__ import annotations


class ScribeError(Exception):
    """Base class for all pipeline errors."""


# --- audio ingest ---


class MalformedContainer(ScribeError):
    """Audio container failed structural parsing (bad magic, truncated chunks)."""


class UnsupportedEncoding(ScribeError):
    """Container parsed but its encoding is outside the supported contract."""


class QualityRejected(ScribeError):
    """Decoded audio failed the quality policy."""

    def __init__(self, reasons: list[str]):
        super().__init__(f"audio rejected: {', '.join(reasons)}")
        self.reasons = list(reasons)


# --- backends (transcription and summarization) ---


class BackendUnreachable(ScribeError):
    """Network failure persisted through all retry attempts."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


class BackendRejected(ScribeError):
    """Backend answered but did not produce a usable result."""

    def __init__(self, message: str, status: int | None = None, body_excerpt: str = ""):
        detail = message if status is None else f"{message} (status {status})"
        super().__init__(detail)
        self.status = status
        self.body_excerpt = body_excerpt


class EmptyTranscript(ScribeError):
    """Transcript text is blank where non-empty text is required."""


class DuplicateDigest(ScribeError):
    """A fixture is already registered under this digest."""

    def __init__(self, digest: str):
        super().__init__(f"fixture already registered for digest {digest}")
        self.digest = digest


# --- summary recovery and validation ---


class NoJsonObjectFound(ScribeError):
    """No balanced JSON object could be located in the backend output."""


class ParseFailure(ScribeError):
    """Candidate text does not parse as a JSON object."""


class MissingKey(ScribeError):
    def __init__(self, key: str):
        super().__init__(f"missing required key: {key}")
        self.key = key


class UnexpectedKey(ScribeError):
    def __init__(self, key: str):
        super().__init__(f"unexpected key: {key}")
        self.key = key


class NonTextValue(ScribeError):
    def __init__(self, key: str):
        super().__init__(f"value for key {key!r} is not text")
        self.key = key


class SummaryInvalid(ScribeError):
    """Backend output stayed invalid after the single re-ask."""

    def __init__(self, cause: ScribeError, attempts: int):
        super().__init__(f"summary invalid after {attempts} attempts: {cause}")
        self.cause = cause
        self.attempts = attempts


# --- mapping configuration ---


class ConfigParseError(ScribeError):
    """Mapping or service configuration text is structurally invalid."""


class DuplicateKey(ScribeError):
    def __init__(self, key: str):
        super().__init__(f"summary key mapped more than once: {key}")
        self.key = key


class DuplicateFieldId(ScribeError):
    def __init__(self, field_id: str):
        super().__init__(f"form field id mapped more than once: {field_id}")
        self.field_id = field_id


class UnknownSummaryKey(ScribeError):
    def __init__(self, key: str):
        super().__init__(f"not a summary key: {key}")
        self.key = key


# --- session lifecycle ---


class WrongState(ScribeError):
    def __init__(self, current: str, wanted: str):
        super().__init__(f"session is in state {current!r}, operation requires {wanted!r}")
        self.current = current
        self.wanted = wanted


class NotFound(ScribeError):
    def __init__(self, session_id: str):
        super().__init__(f"no such session: {session_id}")
        self.session_id = session_id


class StorageFailure(ScribeError):
    """Session store could not be read or written."""
