"""Shared helpers: WAV construction via the stdlib (independent of the
package's own codec) and scenario fixture plumbing."""

from __future__ import annotations

import io
import json
import wave
from pathlib import Path

import numpy as np
import pytest


def stdlib_wav_bytes(samples: np.ndarray, rate: int, channels: int = 1) -> bytes:
    """Write PCM-16 WAV bytes with the stdlib wave module.

    samples: int16 array; for stereo, shape (n, 2) interleaved on write.
    """
    samples = np.asarray(samples, dtype=np.int16)
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(samples.reshape(-1).astype("<i2").tobytes())
    return buf.getvalue()


def sine_int16(freq_hz: float, duration_s: float, rate: int, amplitude: int = 12000) -> np.ndarray:
    t = np.arange(int(round(duration_s * rate))) / rate
    return np.rint(amplitude * np.sin(2 * np.pi * freq_hz * t)).astype(np.int16)


def silence_wav(duration_s: float, rate: int = 16000) -> bytes:
    return stdlib_wav_bytes(np.zeros(int(round(duration_s * rate)), dtype=np.int16), rate)


def quiet_tone_wav(duration_s: float, rate: int = 16000) -> bytes:
    return stdlib_wav_bytes(sine_int16(220.0, duration_s, rate, amplitude=4000), rate)


DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "clinic_scribe" / "data"
SCENARIO_DIR = DATA_DIR / "scenarios"


def scenario_transcript(n: int) -> str:
    return (SCENARIO_DIR / f"scenario{n}_transcript.txt").read_text(encoding="utf-8")


def scenario_summary_text(n: int) -> str:
    return (SCENARIO_DIR / f"scenario{n}_summary.json").read_text(encoding="utf-8")


def scenario_summary_dict(n: int) -> dict:
    return json.loads(scenario_summary_text(n))


@pytest.fixture
def tmp_store(tmp_path):
    d = tmp_path / "store"
    d.mkdir()
    return d


def build_scenario_setup(target_dir: Path, n: int, duration_s: float = 12.0):
    """Write a scenario WAV plus fixture-registry files keyed to it.

    Returns (wav_path, transcript_registry_path, summary_registry_path).
    The WAV is 16 kHz so the in-pipeline resample is the identity and the
    digest computed here matches the one the pipeline sees.
    """
    from clinic_scribe.audio_ingest import RawAudioFile, clip_digest, decode_wav
    from clinic_scribe.summarizer import transcript_digest
    from clinic_scribe.transcription import FixtureRegistry

    target_dir.mkdir(parents=True, exist_ok=True)
    wav = stdlib_wav_bytes(sine_int16(180.0 + 20 * n, duration_s, 16000, amplitude=5000), 16000)
    wav_path = target_dir / f"scenario{n}.wav"
    wav_path.write_bytes(wav)

    clip = decode_wav(RawAudioFile(wav))
    transcript_text = scenario_transcript(n)
    t_registry = FixtureRegistry()
    t_registry.register(clip_digest(clip), transcript_text)
    t_path = target_dir / f"scenario{n}_transcripts.json"
    t_registry.save(t_path)

    s_registry = FixtureRegistry()
    s_registry.register(transcript_digest(transcript_text), scenario_summary_text(n))
    s_path = target_dir / f"scenario{n}_summaries.json"
    s_registry.save(s_path)
    return wav_path, t_path, s_path
