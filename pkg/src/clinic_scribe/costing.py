"""Per-consultation cost accounting."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PriceConfig:
    audio_rate_per_min: float = 0.006
    input_rate_per_1k: float = 0.0015
    output_rate_per_1k: float = 0.002
    currency: str = "USD"

    def __post_init__(self):
        if min(self.audio_rate_per_min, self.input_rate_per_1k, self.output_rate_per_1k) < 0:
            raise ValueError("rates must be non-negative")


@dataclass(frozen=True)
class CostEstimate:
    audio_minutes: float
    input_tokens: int
    output_tokens: int
    audio_rate_per_min: float
    input_rate_per_1k: float
    output_rate_per_1k: float
    total_usd: float
    # "reported" when the backend supplied token counts, "estimated" when
    # counts were derived from character lengths
    token_source: str = "reported"


def estimate_cost(
    audio_duration_s: float,
    input_tokens: int,
    output_tokens: int,
    prices: PriceConfig,
    token_source: str = "reported",
) -> CostEstimate:
    """Closed-form cost: audio minutes plus token thousands at their rates."""
    if audio_duration_s < 0 or input_tokens < 0 or output_tokens < 0:
        raise ValueError("cost inputs must be non-negative")
    minutes = audio_duration_s / 60.0
    total = (
        minutes * prices.audio_rate_per_min
        + input_tokens / 1000.0 * prices.input_rate_per_1k
        + output_tokens / 1000.0 * prices.output_rate_per_1k
    )
    return CostEstimate(
        audio_minutes=minutes,
        input_tokens=input_tokens,
        output_tokens=output_tokens,
        audio_rate_per_min=prices.audio_rate_per_min,
        input_rate_per_1k=prices.input_rate_per_1k,
        output_rate_per_1k=prices.output_rate_per_1k,
        total_usd=total,
        token_source=token_source,
    )
