"""Session lifecycle: state machine, append-only persistence, pipeline runs.

Each session advances created -> audio_received -> transcribed ->
summarized -> plan_ready, or drops to failed from any live state. Every
transition is appended to a JSON-lines log before the operation returns,
and stage artifacts are mirrored as plain files in a per-session directory.
"""

from __future__ import annotations

import copy
import json
import logging
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from clinic_scribe.audio_ingest import (
    AudioClip,
    RawAudioFile,
    assess_quality,
    clip_digest,
    decode_wav,
    encode_wav,
)
from clinic_scribe.config import AppConfig
from clinic_scribe.costing import CostEstimate, PriceConfig, estimate_cost  # noqa: F401
from clinic_scribe.errors import NotFound, QualityRejected, StorageFailure, WrongState
from clinic_scribe.form_mapper import FillPlan, PlanEntry, fill_plan_to_dict, fill_plan_to_json
from clinic_scribe.pipeline import (
    PipelineDeps,
    StageFailure,
    StageTimings,
    execute_stages,
    timings_to_json,
)
from clinic_scribe.summarizer import MedicalSummary
from clinic_scribe.transcription import FixtureRegistry, Transcript

log = logging.getLogger(__name__)


class SessionState(str, Enum):
    CREATED = "created"
    AUDIO_RECEIVED = "audio_received"
    TRANSCRIBED = "transcribed"
    SUMMARIZED = "summarized"
    PLAN_READY = "plan_ready"
    FAILED = "failed"


_ORDER = (
    SessionState.CREATED,
    SessionState.AUDIO_RECEIVED,
    SessionState.TRANSCRIBED,
    SessionState.SUMMARIZED,
    SessionState.PLAN_READY,
)


def can_transition(current: SessionState, target: SessionState) -> bool:
    """Only the next state in order is reachable; failed is reachable from
    any live state and is terminal."""
    if current == SessionState.FAILED:
        return False
    if target == SessionState.FAILED:
        return True
    if current == SessionState.PLAN_READY:
        return False
    return _ORDER.index(target) == _ORDER.index(current) + 1


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class SessionRecord:
    session_id: str
    state: SessionState
    created_at: str
    updated_at: str
    audio_digest: str | None = None
    transcript: Transcript | None = None
    summary: MedicalSummary | None = None
    fill_plan: FillPlan | None = None
    timings: StageTimings | None = None
    cost: CostEstimate | None = None
    failure: dict | None = None  # {"stage": ..., "error_code": ..., "message": ...}

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "state": self.state.value,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "audio_digest": self.audio_digest,
            "transcript": None
            if self.transcript is None
            else {
                "text": self.transcript.text,
                "language": self.transcript.language,
                "audio_duration_s": self.transcript.audio_duration_s,
                "latency_s": self.transcript.latency_s,
            },
            "summary": None if self.summary is None else self.summary.to_dict(),
            "fill_plan": None if self.fill_plan is None else fill_plan_to_dict(self.fill_plan),
            "timings": None if self.timings is None else self.timings.to_dict(),
            "cost": None
            if self.cost is None
            else {
                "audio_minutes": self.cost.audio_minutes,
                "input_tokens": self.cost.input_tokens,
                "output_tokens": self.cost.output_tokens,
                "audio_rate_per_min": self.cost.audio_rate_per_min,
                "input_rate_per_1k": self.cost.input_rate_per_1k,
                "output_rate_per_1k": self.cost.output_rate_per_1k,
                "total_usd": self.cost.total_usd,
                "token_source": self.cost.token_source,
            },
            "failure": self.failure,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SessionRecord":
        transcript = None
        if doc.get("transcript") is not None:
            transcript = Transcript(**doc["transcript"])
        summary = None
        if doc.get("summary") is not None:
            summary = MedicalSummary(**doc["summary"])
        fill_plan = None
        if doc.get("fill_plan") is not None:
            raw = doc["fill_plan"]
            fill_plan = FillPlan(
                entries=tuple(PlanEntry(**e) for e in raw["entries"]),
                warnings=tuple(raw["warnings"]),
                summary_digest=raw["summary_digest"],
            )
        timings = None
        if doc.get("timings") is not None:
            timings = StageTimings(**doc["timings"])
        cost = None
        if doc.get("cost") is not None:
            cost = CostEstimate(**doc["cost"])
        return cls(
            session_id=doc["session_id"],
            state=SessionState(doc["state"]),
            created_at=doc["created_at"],
            updated_at=doc["updated_at"],
            audio_digest=doc.get("audio_digest"),
            transcript=transcript,
            summary=summary,
            fill_plan=fill_plan,
            timings=timings,
            cost=cost,
            failure=doc.get("failure"),
        )


class SessionStore:
    """Append-only JSON-lines log plus a per-session artifact directory.

    Each appended line is a full record snapshot; on reload the last
    snapshot per session wins. A torn final line (crash mid-write) is
    tolerated; corruption anywhere else is an error.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageFailure(f"cannot create session store at {self.root}: {exc}") from exc
        self.log_path = self.root / "sessions.jsonl"
        self._append_lock = threading.Lock()

    def append(self, record: SessionRecord) -> None:
        line = json.dumps(record.to_dict(), ensure_ascii=False)
        with self._append_lock:
            try:
                with self.log_path.open("a", encoding="utf-8") as f:
                    f.write(line + "\n")
                    f.flush()
            except OSError as exc:
                raise StorageFailure(f"cannot append to {self.log_path}: {exc}") from exc

    def load_all(self) -> dict[str, SessionRecord]:
        if not self.log_path.exists():
            return {}
        try:
            lines = self.log_path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise StorageFailure(f"cannot read {self.log_path}: {exc}") from exc
        records: dict[str, SessionRecord] = {}
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                record = SessionRecord.from_dict(json.loads(line))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                if i == len(lines) - 1:
                    log.warning("dropping torn final session-log line: %s", exc)
                    continue
                raise StorageFailure(f"corrupt session log line {i + 1}: {exc}") from exc
            records[record.session_id] = record
        return records

    def artifact_dir(self, session_id: str) -> Path:
        path = self.root / session_id
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageFailure(f"cannot create artifact dir {path}: {exc}") from exc
        return path

    def write_artifact(self, session_id: str, name: str, content: str | bytes) -> Path:
        path = self.artifact_dir(session_id) / name
        try:
            if isinstance(content, bytes):
                path.write_bytes(content)
            else:
                path.write_text(content, encoding="utf-8")
        except OSError as exc:
            raise StorageFailure(f"cannot write artifact {path}: {exc}") from exc
        return path

    def remove_artifact(self, session_id: str, name: str) -> None:
        path = self.root / session_id / name
        try:
            path.unlink(missing_ok=True)
        except OSError as exc:
            raise StorageFailure(f"cannot remove artifact {path}: {exc}") from exc


class Orchestrator:
    """Owns session records, their locks, and pipeline execution."""

    def __init__(
        self,
        config: AppConfig,
        transcript_registry: FixtureRegistry | None = None,
        summary_registry: FixtureRegistry | None = None,
    ):
        self.config = config
        self.store = SessionStore(config.store_dir)
        self.mapping = config.load_field_mapping()
        self.transcript_registry = self._registry(config.transcription, transcript_registry)
        self.summary_registry = self._registry(config.summarizer, summary_registry)
        self._records = self.store.load_all()
        self._clips: dict[str, AudioClip] = {}
        self._records_guard = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}
        self._run_slots = threading.BoundedSemaphore(config.concurrency_limit)

    @staticmethod
    def _registry(descriptor, explicit: FixtureRegistry | None) -> FixtureRegistry | None:
        if explicit is not None:
            return explicit
        if descriptor.kind == "fixture" and descriptor.registry_path:
            return FixtureRegistry.load(descriptor.registry_path)
        if descriptor.kind == "fixture":
            return FixtureRegistry()
        return None

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._records_guard:
            if session_id not in self._session_locks:
                self._session_locks[session_id] = threading.Lock()
            return self._session_locks[session_id]

    def _get(self, session_id: str) -> SessionRecord:
        with self._records_guard:
            record = self._records.get(session_id)
        if record is None:
            raise NotFound(session_id)
        return record

    def _persist(self, record: SessionRecord) -> None:
        record.updated_at = _utc_now()
        self.store.append(record)

    # --- operations ---

    def create_session(self) -> SessionRecord:
        now = _utc_now()
        record = SessionRecord(
            session_id=uuid.uuid4().hex,
            state=SessionState.CREATED,
            created_at=now,
            updated_at=now,
        )
        self.store.append(record)
        with self._records_guard:
            self._records[record.session_id] = record
        return copy.deepcopy(record)

    def attach_audio(self, session_id: str, file: RawAudioFile) -> SessionRecord:
        with self._lock_for(session_id):
            record = self._get(session_id)
            if record.state != SessionState.CREATED:
                raise WrongState(record.state.value, SessionState.CREATED.value)
            clip = decode_wav(file)
            report = assess_quality(clip, self.config.quality)
            if not report.passes:
                raise QualityRejected(list(report.reasons))
            digest = clip_digest(clip)
            self.store.write_artifact(session_id, "audio.digest", digest + "\n")
            self.store.write_artifact(session_id, "audio.wav", encode_wav(clip))
            self._clips[session_id] = clip
            record.audio_digest = digest
            record.state = SessionState.AUDIO_RECEIVED
            self._persist(record)
            return copy.deepcopy(record)

    def run_pipeline(self, session_id: str) -> SessionRecord:
        with self._run_slots, self._lock_for(session_id):
            record = self._get(session_id)
            if record.state != SessionState.AUDIO_RECEIVED:
                raise WrongState(record.state.value, SessionState.AUDIO_RECEIVED.value)
            clip = self._clips.get(session_id)
            if clip is None:
                clip = self._reload_clip(session_id)

            def on_stage(stage: str, transcript: Transcript | None = None,
                         summary: MedicalSummary | None = None) -> None:
                if transcript is not None:
                    record.transcript = transcript
                    record.state = SessionState.TRANSCRIBED
                    self.store.write_artifact(session_id, "transcript.txt", transcript.text)
                    self._persist(record)
                    if not self.config.retain_audio:
                        self.store.remove_artifact(session_id, "audio.wav")
                if summary is not None:
                    record.summary = summary
                    record.state = SessionState.SUMMARIZED
                    self.store.write_artifact(session_id, "summary.json", summary.to_json())
                    self._persist(record)

            deps = PipelineDeps(
                transcription_backend=self.config.transcription,
                summarizer_backend=self.config.summarizer,
                mapping=self.mapping,
                prices=self.config.prices,
                prompt_config=self.config.prompt,
                transcript_registry=self.transcript_registry,
                summary_registry=self.summary_registry,
            )
            try:
                result = execute_stages(clip, deps, observer=on_stage)
            except StageFailure as exc:
                record.failure = {
                    "stage": exc.stage,
                    "error_code": type(exc.error).__name__,
                    "message": str(exc.error),
                }
                record.state = SessionState.FAILED
                self._persist(record)
                return copy.deepcopy(record)
            finally:
                self._clips.pop(session_id, None)

            record.fill_plan = result.fill_plan
            record.timings = result.timings
            record.cost = result.cost
            record.state = SessionState.PLAN_READY
            self.store.write_artifact(session_id, "fill_plan.json", fill_plan_to_json(result.fill_plan))
            self.store.write_artifact(session_id, "timings.json", timings_to_json(result.timings))
            self._persist(record)
            return copy.deepcopy(record)

    def _reload_clip(self, session_id: str) -> AudioClip:
        path = self.store.root / session_id / "audio.wav"
        if not path.exists():
            raise StorageFailure(f"audio for session {session_id} is not retained")
        return decode_wav(RawAudioFile(path.read_bytes(), "wav", path.name))

    def get_session(self, session_id: str) -> SessionRecord:
        return copy.deepcopy(self._get(session_id))

    def list_sessions(self, state: SessionState | str | None = None) -> list[SessionRecord]:
        if isinstance(state, str):
            state = SessionState(state)
        with self._records_guard:
            records = list(self._records.values())
        records.sort(key=lambda r: r.created_at)
        if state is not None:
            records = [r for r in records if r.state == state]
        return copy.deepcopy(records)
