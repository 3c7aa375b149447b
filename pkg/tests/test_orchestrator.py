import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clinic_scribe.audio_ingest import QualityPolicy, RawAudioFile, clip_digest, decode_wav
from clinic_scribe.config import AppConfig
from clinic_scribe.costing import PriceConfig, estimate_cost
from clinic_scribe.errors import NotFound, QualityRejected, StorageFailure, WrongState
from clinic_scribe.orchestrator import (
    Orchestrator,
    SessionState,
    can_transition,
)
from clinic_scribe.summarizer import transcript_digest
from clinic_scribe.transcription import FixtureRegistry

from conftest import quiet_tone_wav, scenario_summary_text, scenario_transcript, silence_wav

TEST_QUALITY = QualityPolicy(min_s=0.5, max_s=3600.0, max_clipping_fraction=0.01)


def make_env(tmp_path, *, transcript_text=None, summary_text=None, retain_audio=True):
    transcript_text = transcript_text or scenario_transcript(1)
    summary_text = summary_text or scenario_summary_text(1)
    wav = quiet_tone_wav(1.0)
    clip = decode_wav(RawAudioFile(wav))
    t_reg = FixtureRegistry()
    t_reg.register(clip_digest(clip), transcript_text)
    s_reg = FixtureRegistry()
    s_reg.register(transcript_digest(transcript_text), summary_text)
    config = AppConfig(
        store_dir=tmp_path / "store", quality=TEST_QUALITY, retain_audio=retain_audio
    )
    return Orchestrator(config, t_reg, s_reg), wav


# --- create_session ---


def test_create_session_initial_state(tmp_path):
    orch, _ = make_env(tmp_path)
    record = orch.create_session()
    assert record.state == SessionState.CREATED
    assert record.transcript is None and record.summary is None and record.fill_plan is None
    assert record.session_id


def test_create_session_unique_ids(tmp_path):
    orch, _ = make_env(tmp_path)
    assert orch.create_session().session_id != orch.create_session().session_id


def test_unwritable_store_is_storage_failure(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory")
    config = AppConfig(store_dir=blocker / "store", quality=TEST_QUALITY)
    with pytest.raises(StorageFailure):
        Orchestrator(config)


# --- attach_audio ---


def test_attach_audio_advances_and_records_digest(tmp_path):
    orch, wav = make_env(tmp_path)
    sid = orch.create_session().session_id
    record = orch.attach_audio(sid, RawAudioFile(wav))
    assert record.state == SessionState.AUDIO_RECEIVED
    assert record.audio_digest == clip_digest(decode_wav(RawAudioFile(wav)))
    store_dir = tmp_path / "store" / sid
    assert (store_dir / "audio.wav").exists()
    assert (store_dir / "audio.digest").read_text().strip() == record.audio_digest


def test_attach_twice_is_wrong_state(tmp_path):
    orch, wav = make_env(tmp_path)
    sid = orch.create_session().session_id
    orch.attach_audio(sid, RawAudioFile(wav))
    with pytest.raises(WrongState):
        orch.attach_audio(sid, RawAudioFile(wav))


def test_attach_rejects_short_clip(tmp_path):
    orch, _ = make_env(tmp_path)
    sid = orch.create_session().session_id
    with pytest.raises(QualityRejected) as excinfo:
        orch.attach_audio(sid, RawAudioFile(silence_wav(0.2)))
    assert excinfo.value.reasons == ["too_short"]


def test_attach_unknown_session(tmp_path):
    orch, wav = make_env(tmp_path)
    with pytest.raises(NotFound):
        orch.attach_audio("missing", RawAudioFile(wav))


# --- run_pipeline ---


def _run_e2e(tmp_path, **kwargs):
    orch, wav = make_env(tmp_path, **kwargs)
    sid = orch.create_session().session_id
    orch.attach_audio(sid, RawAudioFile(wav))
    return orch, sid, orch.run_pipeline(sid)


def test_run_pipeline_reaches_plan_ready(tmp_path):
    orch, sid, record = _run_e2e(tmp_path)
    assert record.state == SessionState.PLAN_READY
    assert len(record.fill_plan.entries) == 8
    assert record.transcript.text == scenario_transcript(1)
    assert "Perut sakit" in record.summary.chief_complaint
    store_dir = tmp_path / "store" / sid
    for name in ("transcript.txt", "summary.json", "fill_plan.json", "timings.json"):
        assert (store_dir / name).exists(), name


def test_run_pipeline_timing_additivity(tmp_path):
    _, _, record = _run_e2e(tmp_path)
    t = record.timings
    assert abs(t.total_s - (t.transcribe_s + t.summarize_s + t.fill_s)) <= 0.5
    assert t.total_s < 2.0


def test_run_pipeline_cost_estimated_tokens(tmp_path):
    _, _, record = _run_e2e(tmp_path)
    cost = record.cost
    assert cost.token_source == "estimated"
    assert cost.input_tokens > 0 and cost.output_tokens > 0
    expected = (
        cost.audio_minutes * cost.audio_rate_per_min
        + cost.input_tokens / 1000 * cost.input_rate_per_1k
        + cost.output_tokens / 1000 * cost.output_rate_per_1k
    )
    assert cost.total_usd == pytest.approx(expected, abs=1e-9)


def test_run_pipeline_failure_records_stage(tmp_path):
    orch, sid, record = None, None, None
    orch, wav = make_env(tmp_path, summary_text="{bukan json}")
    # registered summary text recovers as a brace blob but fails validation
    sid = orch.create_session().session_id
    orch.attach_audio(sid, RawAudioFile(wav))
    record = orch.run_pipeline(sid)
    assert record.state == SessionState.FAILED
    assert record.failure["stage"] == "summarize"
    assert record.failure["error_code"] == "SummaryInvalid"
    # artifacts from completed stages are retained
    assert record.transcript is not None
    assert (tmp_path / "store" / sid / "transcript.txt").exists()


def test_run_pipeline_transcribe_miss_fails(tmp_path):
    orch, wav = make_env(tmp_path)
    orch.transcript_registry = FixtureRegistry()  # lose the fixture
    sid = orch.create_session().session_id
    orch.attach_audio(sid, RawAudioFile(wav))
    record = orch.run_pipeline(sid)
    assert record.state == SessionState.FAILED
    assert record.failure["stage"] == "transcribe"
    assert record.transcript is None


def test_run_before_attach_is_wrong_state(tmp_path):
    orch, _ = make_env(tmp_path)
    sid = orch.create_session().session_id
    with pytest.raises(WrongState):
        orch.run_pipeline(sid)


def test_run_twice_is_wrong_state(tmp_path):
    orch, sid, _ = _run_e2e(tmp_path)
    with pytest.raises(WrongState):
        orch.run_pipeline(sid)


def test_retain_audio_false_drops_wav_after_transcription(tmp_path):
    orch, sid, record = _run_e2e(tmp_path, retain_audio=False)
    assert record.state == SessionState.PLAN_READY
    store_dir = tmp_path / "store" / sid
    assert not (store_dir / "audio.wav").exists()
    assert (store_dir / "audio.digest").exists()


def test_retain_audio_true_keeps_wav(tmp_path):
    orch, sid, _ = _run_e2e(tmp_path)
    assert (tmp_path / "store" / sid / "audio.wav").exists()


# --- reload durability ---


def test_reload_restores_last_persisted_state(tmp_path):
    orch, wav = make_env(tmp_path)
    sid = orch.create_session().session_id
    orch.attach_audio(sid, RawAudioFile(wav))

    reloaded = Orchestrator(
        AppConfig(store_dir=tmp_path / "store", quality=TEST_QUALITY),
        orch.transcript_registry,
        orch.summary_registry,
    )
    record = reloaded.get_session(sid)
    assert record.state == SessionState.AUDIO_RECEIVED
    assert record.audio_digest
    # the clip cache is gone; the retained WAV lets the run proceed
    final = reloaded.run_pipeline(sid)
    assert final.state == SessionState.PLAN_READY


def test_reload_after_full_run_keeps_artifacts(tmp_path):
    orch, sid, record = _run_e2e(tmp_path)
    reloaded = Orchestrator(AppConfig(store_dir=tmp_path / "store", quality=TEST_QUALITY))
    got = reloaded.get_session(sid)
    assert got.state == SessionState.PLAN_READY
    assert got.fill_plan == record.fill_plan
    assert got.summary == record.summary
    assert got.timings == record.timings


def test_reload_without_retained_audio_cannot_run(tmp_path):
    orch, wav = make_env(tmp_path, retain_audio=False)
    sid = orch.create_session().session_id
    orch.attach_audio(sid, RawAudioFile(wav))
    (tmp_path / "store" / sid / "audio.wav").unlink()
    reloaded = Orchestrator(
        AppConfig(store_dir=tmp_path / "store", quality=TEST_QUALITY, retain_audio=False),
        orch.transcript_registry,
        orch.summary_registry,
    )
    with pytest.raises(StorageFailure):
        reloaded.run_pipeline(sid)


# --- reads ---


def test_get_session_unknown(tmp_path):
    orch, _ = make_env(tmp_path)
    with pytest.raises(NotFound):
        orch.get_session("nope")


def test_get_session_returns_snapshot(tmp_path):
    orch, _ = make_env(tmp_path)
    sid = orch.create_session().session_id
    snapshot = orch.get_session(sid)
    snapshot.state = SessionState.FAILED
    assert orch.get_session(sid).state == SessionState.CREATED


def test_list_sessions_filter(tmp_path):
    orch, sid, _ = _run_e2e(tmp_path)
    other = orch.create_session().session_id
    ready = orch.list_sessions(state=SessionState.PLAN_READY)
    assert [r.session_id for r in ready] == [sid]
    assert {r.session_id for r in orch.list_sessions()} == {sid, other}
    assert orch.list_sessions(state="created")[0].session_id == other


# --- state machine ---

_ALL_STATES = list(SessionState)
_ORDERED = [
    SessionState.CREATED,
    SessionState.AUDIO_RECEIVED,
    SessionState.TRANSCRIBED,
    SessionState.SUMMARIZED,
    SessionState.PLAN_READY,
]


def test_transitions_exhaustive():
    legal = set()
    for i, cur in enumerate(_ORDERED[:-1]):
        legal.add((cur, _ORDERED[i + 1]))
    for cur in _ORDERED:
        legal.add((cur, SessionState.FAILED))
    for cur in _ALL_STATES:
        for nxt in _ALL_STATES:
            assert can_transition(cur, nxt) == ((cur, nxt) in legal), (cur, nxt)


# --- estimate_cost ---


def test_estimate_cost_zero():
    cost = estimate_cost(0, 0, 0, PriceConfig())
    assert cost.total_usd == 0.0


def test_estimate_cost_worked_example():
    prices = PriceConfig(audio_rate_per_min=0.006, input_rate_per_1k=0.0015, output_rate_per_1k=0.002)
    cost = estimate_cost(300.0, 1500, 400, prices)
    # 5 min x 0.006 + 1.5k x 0.0015 + 0.4k x 0.002
    assert cost.total_usd == pytest.approx(0.03305, abs=1e-9)


def test_estimate_cost_national_projection_band():
    consultations = 100_000_000
    low, high = consultations * 0.10, consultations * 0.15
    assert low == pytest.approx(10_000_000)
    assert high == pytest.approx(15_000_000)
    assert 1_000_000 < low <= high  # millions per year


def test_estimate_cost_rejects_negative():
    with pytest.raises(ValueError):
        estimate_cost(-1, 0, 0, PriceConfig())


@given(
    duration=st.floats(min_value=0, max_value=7200),
    input_tokens=st.integers(min_value=0, max_value=200_000),
    output_tokens=st.integers(min_value=0, max_value=200_000),
    audio_rate=st.floats(min_value=0, max_value=1),
    in_rate=st.floats(min_value=0, max_value=1),
    out_rate=st.floats(min_value=0, max_value=1),
)
@settings(max_examples=200, deadline=None)
def test_estimate_cost_matches_closed_form(
    duration, input_tokens, output_tokens, audio_rate, in_rate, out_rate
):
    prices = PriceConfig(
        audio_rate_per_min=audio_rate, input_rate_per_1k=in_rate, output_rate_per_1k=out_rate
    )
    cost = estimate_cost(duration, input_tokens, output_tokens, prices)
    independent = (
        (duration / 60.0) * audio_rate
        + (input_tokens / 1000.0) * in_rate
        + (output_tokens / 1000.0) * out_rate
    )
    assert abs(cost.total_usd - independent) <= 1e-6


# --- persisted log shape ---


def test_session_log_lines_are_full_snapshots(tmp_path):
    orch, sid, _ = _run_e2e(tmp_path)
    lines = (tmp_path / "store" / "sessions.jsonl").read_text().strip().splitlines()
    states = [json.loads(line)["state"] for line in lines if json.loads(line)["session_id"] == sid]
    assert states == ["created", "audio_received", "transcribed", "summarized", "plan_ready"]
