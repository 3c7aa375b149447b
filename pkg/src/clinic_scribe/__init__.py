"""Consultation audio to validated medical summary and EHR form fill plan."""

from clinic_scribe.audio_ingest import (
    AudioClip,
    QualityPolicy,
    QualityReport,
    RawAudioFile,
    assess_quality,
    clip_digest,
    decode_wav,
    encode_wav,
    resample,
)
from clinic_scribe.config import AppConfig, load_config
from clinic_scribe.costing import CostEstimate, PriceConfig, estimate_cost
from clinic_scribe.form_mapper import (
    FieldMapping,
    FillPlan,
    build_fill_plan,
    load_default_mapping,
    load_mapping,
)
from clinic_scribe.orchestrator import Orchestrator, SessionRecord, SessionState
from clinic_scribe.pipeline import PipelineDeps, PipelineResult, StageTimings, execute_stages
from clinic_scribe.summarizer import (
    FALLBACK_PHRASE,
    SUMMARY_KEYS,
    MedicalSummary,
    PromptBundle,
    PromptConfig,
    SummarizerBackendDescriptor,
    build_prompt,
    recover_json,
    summarize,
    validate_summary,
)
from clinic_scribe.transcription import (
    FixtureRegistry,
    Transcript,
    TranscriptionBackendDescriptor,
    register_fixture,
    transcribe,
)

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "AudioClip",
    "CostEstimate",
    "FALLBACK_PHRASE",
    "FieldMapping",
    "FillPlan",
    "FixtureRegistry",
    "MedicalSummary",
    "Orchestrator",
    "PipelineDeps",
    "PipelineResult",
    "PriceConfig",
    "PromptBundle",
    "PromptConfig",
    "QualityPolicy",
    "QualityReport",
    "RawAudioFile",
    "SUMMARY_KEYS",
    "SessionRecord",
    "SessionState",
    "StageTimings",
    "SummarizerBackendDescriptor",
    "Transcript",
    "TranscriptionBackendDescriptor",
    "assess_quality",
    "build_fill_plan",
    "build_prompt",
    "clip_digest",
    "decode_wav",
    "encode_wav",
    "estimate_cost",
    "execute_stages",
    "load_config",
    "load_default_mapping",
    "load_mapping",
    "recover_json",
    "register_fixture",
    "resample",
    "summarize",
    "transcribe",
    "validate_summary",
]
