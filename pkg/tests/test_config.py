import json

import pytest

from clinic_scribe.config import AppConfig, load_config, parse_config
from clinic_scribe.errors import ConfigParseError


def test_defaults_are_fixture_backends():
    config = AppConfig()
    assert config.transcription.kind == "fixture"
    assert config.summarizer.kind == "fixture"
    assert config.prompt.max_tokens == 500
    assert config.prompt.temperature == 0.2
    assert config.concurrency_limit == 4
    assert config.retain_audio is True
    assert len(config.load_field_mapping().entries) == 8


def test_parse_full_document(tmp_path):
    doc = {
        "store_dir": str(tmp_path / "store"),
        "transcription": {
            "kind": "remote_api",
            "endpoint_url": "https://stt.example/v1/audio",
            "model_name": "stt-1",
            "language_hint": "id",
            "timeout_s": 20,
            "max_retries": 1,
            "token_env": "STT_TOKEN",
        },
        "summarizer": {
            "kind": "remote_api",
            "endpoint_url": "https://llm.example/v1/chat",
            "model_name": "gen-1",
        },
        "prices": {"audio_rate_per_min": 0.01, "input_rate_per_1k": 0.001, "output_rate_per_1k": 0.002},
        "quality": {"min_s": 5, "max_s": 1200, "max_clipping_fraction": 0.02},
        "concurrency_limit": 2,
        "retain_audio": False,
    }
    config = parse_config(json.dumps(doc))
    assert config.transcription.endpoint_url == "https://stt.example/v1/audio"
    assert config.transcription.token_env == "STT_TOKEN"
    assert config.summarizer.model_name == "gen-1"
    assert config.prices.audio_rate_per_min == 0.01
    assert config.quality.min_s == 5
    assert config.concurrency_limit == 2
    assert config.retain_audio is False


def test_parse_rejects_unknown_keys():
    with pytest.raises(ConfigParseError):
        parse_config('{"storedir": "x"}')


def test_parse_rejects_bad_section():
    with pytest.raises(ConfigParseError):
        parse_config('{"transcription": {"kind": "remote_api"}}')  # missing endpoint
    with pytest.raises(ConfigParseError):
        parse_config('{"quality": {"min_s": -1}}')
    with pytest.raises(ConfigParseError):
        parse_config('{"concurrency_limit": 0}')
    with pytest.raises(ConfigParseError):
        parse_config("[1, 2]")
    with pytest.raises(ConfigParseError):
        parse_config("not json")


def test_prompt_override_from_file(tmp_path):
    prompt_path = tmp_path / "prompt.txt"
    prompt_path.write_text("custom prompt with all keys elsewhere", encoding="utf-8")
    config = parse_config(json.dumps({"prompt": {"system_prompt_path": str(prompt_path)}}))
    assert config.prompt.system_prompt.startswith("custom prompt")
    assert config.prompt.max_tokens == 500


def test_load_config_roundtrip(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"retain_audio": False}), encoding="utf-8")
    assert load_config(path).retain_audio is False


def test_mapping_path_loading(tmp_path):
    mapping = {
        "version": "9",
        "target_form": "custom",
        "entries": [{"summary_key": "education", "field_id": "edu"}],
    }
    mapping_path = tmp_path / "mapping.json"
    mapping_path.write_text(json.dumps(mapping), encoding="utf-8")
    config = parse_config(json.dumps({"mapping_path": str(mapping_path)}))
    loaded = config.load_field_mapping()
    assert loaded.version == "9"
    assert len(loaded.entries) == 1
