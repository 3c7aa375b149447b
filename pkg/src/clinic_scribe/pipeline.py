"""The staged pipeline core shared by the HTTP service and the CLI.

Both frontends run the same three stages over a decoded clip and write the
same artifact serializations, so their outputs stay diffable byte for byte.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Callable

from clinic_scribe.audio_ingest import AudioClip, resample
from clinic_scribe.costing import CostEstimate, PriceConfig, estimate_cost
from clinic_scribe.errors import ScribeError
from clinic_scribe.form_mapper import FieldMapping, FillPlan, build_fill_plan
from clinic_scribe.summarizer import (
    MedicalSummary,
    PromptConfig,
    SummarizerBackendDescriptor,
    summarize_detailed,
)
from clinic_scribe.transcription import (
    FixtureRegistry,
    Transcript,
    TranscriptionBackendDescriptor,
    transcribe,
)

PIPELINE_RATE_HZ = 16000

# Stage names in execution (and reporting) order.
STAGE_TRANSCRIBE = "transcribe"
STAGE_SUMMARIZE = "summarize"
STAGE_FILL = "fill"
STAGES = (STAGE_TRANSCRIBE, STAGE_SUMMARIZE, STAGE_FILL)


@dataclass(frozen=True)
class StageTimings:
    transcribe_s: float
    summarize_s: float
    fill_s: float
    total_s: float

    def to_dict(self) -> dict[str, float]:
        return {
            "transcribe_s": self.transcribe_s,
            "summarize_s": self.summarize_s,
            "fill_s": self.fill_s,
            "total_s": self.total_s,
        }


class StageFailure(ScribeError):
    """A pipeline stage failed; carries the stage name and the original error."""

    def __init__(self, stage: str, error: ScribeError):
        super().__init__(f"stage {stage} failed: {error}")
        self.stage = stage
        self.error = error


@dataclass
class PipelineDeps:
    transcription_backend: TranscriptionBackendDescriptor
    summarizer_backend: SummarizerBackendDescriptor
    mapping: FieldMapping
    prices: PriceConfig
    prompt_config: PromptConfig | None = None
    transcript_registry: FixtureRegistry | None = None
    summary_registry: FixtureRegistry | None = None


@dataclass(frozen=True)
class PipelineResult:
    transcript: Transcript
    summary: MedicalSummary
    fill_plan: FillPlan
    timings: StageTimings
    cost: CostEstimate


def execute_stages(
    clip: AudioClip,
    deps: PipelineDeps,
    observer: Callable[..., None] | None = None,
) -> PipelineResult:
    """Run transcribe, summarize, and fill over a decoded clip.

    The observer, when given, is invoked after the first two stages with
    the artifact each produced, letting the session layer persist progress
    between stages. Stage errors are wrapped in StageFailure; anything else
    propagates untouched.
    """
    run_start = time.perf_counter()

    stage_start = time.perf_counter()
    try:
        clip16 = resample(clip, PIPELINE_RATE_HZ)
        transcript = transcribe(clip16, deps.transcription_backend, deps.transcript_registry)
    except ScribeError as exc:
        raise StageFailure(STAGE_TRANSCRIBE, exc) from exc
    transcribe_s = time.perf_counter() - stage_start
    if observer:
        observer(STAGE_TRANSCRIBE, transcript=transcript)

    stage_start = time.perf_counter()
    try:
        outcome = summarize_detailed(
            transcript,
            deps.summarizer_backend,
            deps.summary_registry,
            deps.prompt_config,
        )
    except ScribeError as exc:
        raise StageFailure(STAGE_SUMMARIZE, exc) from exc
    summarize_s = time.perf_counter() - stage_start
    if observer:
        observer(STAGE_SUMMARIZE, summary=outcome.summary)

    stage_start = time.perf_counter()
    try:
        plan = build_fill_plan(outcome.summary, deps.mapping)
    except ScribeError as exc:
        raise StageFailure(STAGE_FILL, exc) from exc
    fill_s = time.perf_counter() - stage_start

    timings = StageTimings(
        transcribe_s=transcribe_s,
        summarize_s=summarize_s,
        fill_s=fill_s,
        total_s=time.perf_counter() - run_start,
    )
    if outcome.usage is not None:
        input_tokens = outcome.usage.prompt_tokens
        output_tokens = outcome.usage.completion_tokens
        token_source = "reported"
    else:
        input_tokens = math.ceil(outcome.prompt_chars / 4)
        output_tokens = math.ceil(outcome.response_chars / 4)
        token_source = "estimated"
    cost = estimate_cost(
        clip.duration_s, input_tokens, output_tokens, deps.prices, token_source=token_source
    )
    return PipelineResult(
        transcript=transcript,
        summary=outcome.summary,
        fill_plan=plan,
        timings=timings,
        cost=cost,
    )


def timings_to_json(timings: StageTimings) -> str:
    return json.dumps(timings.to_dict(), indent=2) + "\n"
