"""Service configuration: one UTF-8 JSON document.

API credentials never live in the file; backend descriptors name the
environment variable carrying the token instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from clinic_scribe.audio_ingest import QualityPolicy
from clinic_scribe.costing import PriceConfig
from clinic_scribe.errors import ConfigParseError
from clinic_scribe.form_mapper import FieldMapping, load_default_mapping, load_mapping
from clinic_scribe.summarizer import PromptConfig, SummarizerBackendDescriptor
from clinic_scribe.transcription import TranscriptionBackendDescriptor

_TOP_LEVEL_KEYS = {
    "store_dir",
    "transcription",
    "summarizer",
    "prompt",
    "prices",
    "quality",
    "mapping_path",
    "concurrency_limit",
    "retain_audio",
}


@dataclass
class AppConfig:
    store_dir: Path = Path("scribe-store")
    transcription: TranscriptionBackendDescriptor = field(
        default_factory=lambda: TranscriptionBackendDescriptor(kind="fixture")
    )
    summarizer: SummarizerBackendDescriptor = field(
        default_factory=lambda: SummarizerBackendDescriptor(kind="fixture")
    )
    prompt: PromptConfig = field(default_factory=PromptConfig.default)
    prices: PriceConfig = field(default_factory=PriceConfig)
    quality: QualityPolicy = field(default_factory=QualityPolicy)
    mapping_path: Path | None = None
    concurrency_limit: int = 4
    retain_audio: bool = True

    def load_field_mapping(self) -> FieldMapping:
        if self.mapping_path is None:
            return load_default_mapping()
        return load_mapping(Path(self.mapping_path).read_text(encoding="utf-8"))


def _build_section(name: str, raw: dict, builder):
    if not isinstance(raw, dict):
        raise ConfigParseError(f"config section {name!r} must be an object")
    try:
        return builder(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigParseError(f"config section {name!r} is invalid: {exc}") from exc


def parse_config(text: str) -> AppConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigParseError("config must be a JSON object")
    unknown = set(doc) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigParseError(f"unknown config keys: {sorted(unknown)}")

    config = AppConfig()
    if "store_dir" in doc:
        config.store_dir = Path(doc["store_dir"])
    if "transcription" in doc:
        config.transcription = _build_section(
            "transcription", doc["transcription"], TranscriptionBackendDescriptor
        )
    if "summarizer" in doc:
        config.summarizer = _build_section(
            "summarizer", doc["summarizer"], SummarizerBackendDescriptor
        )
    if "prompt" in doc:
        raw = doc["prompt"]
        if not isinstance(raw, dict):
            raise ConfigParseError("config section 'prompt' must be an object")
        raw = dict(raw)
        prompt_path = raw.pop("system_prompt_path", None)
        if prompt_path is not None:
            raw["system_prompt"] = Path(prompt_path).read_text(encoding="utf-8")
        elif "system_prompt" not in raw:
            raw["system_prompt"] = PromptConfig.default().system_prompt
        config.prompt = _build_section("prompt", raw, PromptConfig)
    if "prices" in doc:
        config.prices = _build_section("prices", doc["prices"], PriceConfig)
    if "quality" in doc:
        config.quality = _build_section("quality", doc["quality"], QualityPolicy)
    if "mapping_path" in doc and doc["mapping_path"] is not None:
        config.mapping_path = Path(doc["mapping_path"])
    if "concurrency_limit" in doc:
        limit = doc["concurrency_limit"]
        if not isinstance(limit, int) or limit < 1:
            raise ConfigParseError("concurrency_limit must be a positive integer")
        config.concurrency_limit = limit
    if "retain_audio" in doc:
        if not isinstance(doc["retain_audio"], bool):
            raise ConfigParseError("retain_audio must be a boolean")
        config.retain_audio = doc["retain_audio"]
    return config


def load_config(path: str | Path) -> AppConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
