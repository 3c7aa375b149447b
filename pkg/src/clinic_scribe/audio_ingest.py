"""Audio ingest: WAV decoding, 16 kHz normalization, and quality gating.

The core accepts RIFF/WAVE containers carrying 16-bit PCM with one or two
channels. Stereo is downmixed to mono by per-frame arithmetic mean. All
operations are pure functions over immutable inputs.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from clinic_scribe.errors import MalformedContainer, UnsupportedEncoding

# Sample rates the pipeline will carry. Anything outside is rejected at decode.
MIN_SAMPLE_RATE_HZ = 8000
MAX_SAMPLE_RATE_HZ = 192000

# Windowed-sinc resampler parameters: Kaiser window, 16-tap half-width,
# cutoff at 0.45 x the lower of the two rates (0.9 x its Nyquist).
KERNEL_HALF_WIDTH = 16
KAISER_BETA = 8.6
CUTOFF_RATE_FRACTION = 0.45

# Output samples materialized per block while resampling, bounding the
# (block x taps) work matrix to a few tens of MB for hour-long clips.
_RESAMPLE_BLOCK = 500_000


@dataclass(frozen=True)
class RawAudioFile:
    """An uploaded audio container, as received."""

    data: bytes
    declared_container: str = "wav"  # "wav" | "unknown"
    source_name: str = ""


@dataclass
class AudioClip:
    """Decoded mono PCM: the unit flowing into transcription."""

    samples: np.ndarray  # int16, 1-D
    sample_rate_hz: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.int16)
        if samples.ndim != 1:
            raise ValueError("AudioClip samples must be 1-D mono")
        if not MIN_SAMPLE_RATE_HZ <= self.sample_rate_hz <= MAX_SAMPLE_RATE_HZ:
            raise ValueError(f"sample rate out of range: {self.sample_rate_hz}")
        samples.setflags(write=False)
        self.samples = samples

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


@dataclass(frozen=True)
class QualityPolicy:
    min_s: float = 10.0
    max_s: float = 3600.0
    max_clipping_fraction: float = 0.01

    def __post_init__(self):
        if self.min_s <= 0 or self.max_s <= 0 or self.max_clipping_fraction <= 0:
            raise ValueError("quality thresholds must be positive")
        if self.min_s >= self.max_s:
            raise ValueError("min_s must be below max_s")


@dataclass(frozen=True)
class QualityReport:
    duration_s: float
    clipping_fraction: float
    passes: bool
    reasons: tuple[str, ...] = field(default_factory=tuple)


def decode_wav(file: RawAudioFile) -> AudioClip:
    """Decode a RIFF/WAVE container into a mono AudioClip at its native rate.

    Raises MalformedContainer for structural damage and UnsupportedEncoding
    for containers outside the PCM-16 / 1-2 channel contract. Never raises
    anything else, regardless of input bytes.
    """
    data = file.data
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedContainer("not a RIFF/WAVE container")

    fmt: tuple[int, int, int, int] | None = None  # (format, channels, rate, bits)
    pcm: bytes | None = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset : offset + 4]
        (size,) = struct.unpack_from("<I", data, offset + 4)
        body_start = offset + 8
        if body_start + size > len(data):
            raise MalformedContainer(f"chunk {chunk_id!r} truncated")
        body = data[body_start : body_start + size]
        if chunk_id == b"fmt ":
            if size < 16:
                raise MalformedContainer("fmt chunk too small")
            audio_format, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", body, 0)
            fmt = (audio_format, channels, rate, bits)
        elif chunk_id == b"data":
            pcm = body
        offset = body_start + size + (size & 1)  # chunks are word-aligned

    if fmt is None:
        raise MalformedContainer("missing fmt chunk")
    if pcm is None:
        raise MalformedContainer("missing data chunk")

    audio_format, channels, rate, bits = fmt
    if audio_format != 1:
        raise UnsupportedEncoding(f"only PCM is supported, got format {audio_format}")
    if bits != 16:
        raise UnsupportedEncoding(f"only 16-bit samples are supported, got {bits}")
    if channels not in (1, 2):
        raise UnsupportedEncoding(f"only 1 or 2 channels are supported, got {channels}")
    if not MIN_SAMPLE_RATE_HZ <= rate <= MAX_SAMPLE_RATE_HZ:
        raise UnsupportedEncoding(f"sample rate {rate} Hz outside supported range")

    frame_size = channels * 2
    if len(pcm) % frame_size != 0:
        raise MalformedContainer("data chunk is not a whole number of frames")

    samples = np.frombuffer(pcm, dtype="<i2")
    if channels == 2:
        frames = samples.reshape(-1, 2).astype(np.int32)
        mono = np.rint((frames[:, 0] + frames[:, 1]) / 2.0).astype(np.int16)
    else:
        mono = samples.astype(np.int16)
    return AudioClip(mono, rate)


def encode_wav(clip: AudioClip) -> bytes:
    """Serialize a clip as canonical PCM-16 mono WAV (the digest input)."""
    pcm = clip.samples.astype("<i2").tobytes()
    rate = clip.sample_rate_hz
    header = b"RIFF" + struct.pack("<I", 36 + len(pcm)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16)
    header += b"data" + struct.pack("<I", len(pcm))
    return header + pcm


def clip_digest(clip: AudioClip) -> str:
    """SHA-256 of the canonical WAV serialization; the fixture-registry key."""
    return hashlib.sha256(encode_wav(clip)).hexdigest()


def _kernel(u: np.ndarray, cutoff_frac: float) -> np.ndarray:
    # Band-limited interpolation kernel: sinc at the cutoff, Kaiser-windowed
    # over |u| <= KERNEL_HALF_WIDTH input samples.
    w = KERNEL_HALF_WIDTH
    inside = np.abs(u) <= w
    arg = np.where(inside, 1.0 - (u / w) ** 2, 0.0)
    window = np.i0(KAISER_BETA * np.sqrt(arg)) / np.i0(KAISER_BETA)
    return np.where(inside, 2.0 * cutoff_frac * np.sinc(2.0 * cutoff_frac * u) * window, 0.0)


def resample(clip: AudioClip, target_hz: int) -> AudioClip:
    """Band-limited resample to target_hz. Identity when rates already match."""
    if not MIN_SAMPLE_RATE_HZ <= target_hz <= MAX_SAMPLE_RATE_HZ:
        raise ValueError(f"target rate out of range: {target_hz}")
    in_rate = clip.sample_rate_hz
    if target_hz == in_rate:
        return AudioClip(clip.samples.copy(), in_rate)

    x = clip.samples.astype(np.float64)
    n_in = len(x)
    n_out = int(round(n_in * target_hz / in_rate))
    step = in_rate / target_hz
    cutoff_frac = CUTOFF_RATE_FRACTION * min(in_rate, target_hz) / in_rate
    offsets = np.arange(-KERNEL_HALF_WIDTH + 1, KERNEL_HALF_WIDTH + 1)

    out = np.empty(n_out, dtype=np.float64)
    for start in range(0, n_out, _RESAMPLE_BLOCK):
        stop = min(start + _RESAMPLE_BLOCK, n_out)
        t = np.arange(start, stop) * step
        base = np.floor(t).astype(np.int64)
        idx = base[:, None] + offsets[None, :]
        taps = _kernel(t[:, None] - idx, cutoff_frac)
        valid = (idx >= 0) & (idx < n_in)
        gathered = x[np.clip(idx, 0, n_in - 1)] * valid
        out[start:stop] = (taps * gathered).sum(axis=1)

    samples = np.clip(np.rint(out), -32768, 32767).astype(np.int16)
    return AudioClip(samples, target_hz)


def assess_quality(clip: AudioClip, policy: QualityPolicy | None = None) -> QualityReport:
    """Gate a clip on duration bounds and full-scale sample share."""
    if policy is None:
        policy = QualityPolicy()
    duration = clip.duration_s
    n = len(clip.samples)
    clipped = int(np.count_nonzero(np.abs(clip.samples.astype(np.int32)) >= 32767))
    fraction = clipped / n if n else 0.0

    reasons = []
    if duration < policy.min_s:
        reasons.append("too_short")
    if duration > policy.max_s:
        reasons.append("too_long")
    if fraction > policy.max_clipping_fraction:
        reasons.append("clipped")
    return QualityReport(
        duration_s=duration,
        clipping_fraction=fraction,
        passes=not reasons,
        reasons=tuple(reasons),
    )
