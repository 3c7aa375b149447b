"""Launches the pipeline service preloaded with a deterministic fixture set.

Writes a WAV plus matching fixture registries into a scratch directory,
then serves until killed. Prints the two environment variables the
integration test expects:

    SCRIBE_SERVICE_URL=http://127.0.0.1:<port>
    SCRIBE_TEST_WAV=<path to the registered recording>

Usage: python3 scripts/start_test_service.py [port]
"""

import sys
import tempfile
from pathlib import Path

import numpy as np
import uvicorn

from clinic_scribe.audio_ingest import QualityPolicy, RawAudioFile, clip_digest, decode_wav
from clinic_scribe.config import AppConfig
from clinic_scribe.orchestrator import Orchestrator
from clinic_scribe.service import create_app
from clinic_scribe.summarizer import transcript_digest
from clinic_scribe.transcription import FixtureRegistry

TRANSCRIPT = (
    "Assalamualaikum Bu, selamat pagi. Keluhan integrasi: pasien hanya "
    "menguji jalur ekstensi dari perekaman sampai pengisian formulir."
)
SUMMARY = """{
  "chief_complaint": "Uji integrasi ekstensi",
  "additional_complaint": "Tidak ada",
  "history_of_present_illness": "Jalur unggah, transkripsi, ringkasan, dan rencana isi diuji",
  "past_medical_history": "Informasi tidak tersedia",
  "family_history": "Informasi tidak tersedia",
  "recommended_medication_therapy": "Tidak ada",
  "recommended_non_medication_therapy": "Tidak ada",
  "education": "Tinjau hasil sebelum mengisi formulir"
}"""


def main() -> None:
    port = int(sys.argv[1]) if len(sys.argv) > 1 else 8400
    scratch = Path(tempfile.mkdtemp(prefix="scribe-integration-"))

    rate = 16000
    t = np.arange(rate * 2) / rate
    samples = np.rint(4000 * np.sin(2 * np.pi * 220 * t)).astype(np.int16)
    import wave

    wav_path = scratch / "integration.wav"
    with wave.open(str(wav_path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(samples.tobytes())

    clip = decode_wav(RawAudioFile(wav_path.read_bytes()))
    transcripts = FixtureRegistry()
    transcripts.register(clip_digest(clip), TRANSCRIPT)
    summaries = FixtureRegistry()
    summaries.register(transcript_digest(TRANSCRIPT), SUMMARY)

    config = AppConfig(
        store_dir=scratch / "store",
        quality=QualityPolicy(min_s=0.5, max_s=3600.0, max_clipping_fraction=0.01),
    )
    app = create_app(Orchestrator(config, transcripts, summaries))

    print(f"SCRIBE_SERVICE_URL=http://127.0.0.1:{port}", flush=True)
    print(f"SCRIBE_TEST_WAV={wav_path}", flush=True)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


if __name__ == "__main__":
    main()
