"""Compile validated summaries into ordered form fill plans.

The mapping from summary keys to form field identifiers is a versioned
JSON document, so retargeting a different form build is a data change.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources

from clinic_scribe.errors import (
    ConfigParseError,
    DuplicateFieldId,
    DuplicateKey,
    UnknownSummaryKey,
)
from clinic_scribe.summarizer import FALLBACK_PHRASE, SUMMARY_KEYS, MedicalSummary


@dataclass(frozen=True)
class MappingEntry:
    summary_key: str
    field_id: str
    required: bool = True


@dataclass(frozen=True)
class FieldMapping:
    entries: tuple[MappingEntry, ...]
    version: str = "unversioned"
    target_form: str = ""


@dataclass(frozen=True)
class PlanEntry:
    field_id: str
    value: str


@dataclass(frozen=True)
class FillPlan:
    entries: tuple[PlanEntry, ...]
    warnings: tuple[str, ...]
    summary_digest: str


def default_mapping_text() -> str:
    return (resources.files("clinic_scribe") / "data" / "default_mapping.json").read_text(
        encoding="utf-8"
    )


def load_mapping(config_text: str) -> FieldMapping:
    """Parse a mapping document, preserving declaration order.

    Rejects duplicate summary keys, duplicate field ids, and keys outside
    the eight-key summary schema.
    """
    try:
        doc = json.loads(config_text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"mapping is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigParseError("mapping document must be a JSON object")

    version = doc.get("version")
    if not isinstance(version, str) or not version:
        raise ConfigParseError("mapping needs a non-empty string version")
    target_form = doc.get("target_form", "")
    if not isinstance(target_form, str):
        raise ConfigParseError("target_form must be a string")
    raw_entries = doc.get("entries")
    if not isinstance(raw_entries, list):
        raise ConfigParseError("mapping needs an entries list")

    entries: list[MappingEntry] = []
    seen_keys: set[str] = set()
    seen_ids: set[str] = set()
    for raw in raw_entries:
        if not isinstance(raw, dict):
            raise ConfigParseError("each mapping entry must be an object")
        key = raw.get("summary_key")
        field_id = raw.get("field_id")
        required = raw.get("required", True)
        if not isinstance(key, str) or not isinstance(field_id, str) or not field_id:
            raise ConfigParseError("mapping entries need summary_key and field_id strings")
        if not isinstance(required, bool):
            raise ConfigParseError("required must be a boolean")
        if key not in SUMMARY_KEYS:
            raise UnknownSummaryKey(key)
        if key in seen_keys:
            raise DuplicateKey(key)
        if field_id in seen_ids:
            raise DuplicateFieldId(field_id)
        seen_keys.add(key)
        seen_ids.add(field_id)
        entries.append(MappingEntry(summary_key=key, field_id=field_id, required=required))

    return FieldMapping(entries=tuple(entries), version=version, target_form=target_form)


def load_default_mapping() -> FieldMapping:
    return load_mapping(default_mapping_text())


def summary_digest(summary: MedicalSummary) -> str:
    """Content hash binding a fill plan to the exact summary it came from."""
    canonical = json.dumps(summary.to_dict(), ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_fill_plan(summary: MedicalSummary, mapping: FieldMapping) -> FillPlan:
    """One plan entry per mapped key, in mapping declaration order.

    Degradations never fail the build: unmapped summary keys and required
    fields holding the fallback phrase are reported as warnings. Fallback
    text is still emitted so the physician can edit it in the form.
    """
    entries: list[PlanEntry] = []
    warnings: list[str] = []
    mapped_keys: set[str] = set()
    for entry in mapping.entries:
        value = getattr(summary, entry.summary_key)
        entries.append(PlanEntry(field_id=entry.field_id, value=value))
        mapped_keys.add(entry.summary_key)
        if entry.required and value == FALLBACK_PHRASE:
            warnings.append(f"fallback:{entry.summary_key}")
    for key in SUMMARY_KEYS:
        if key not in mapped_keys:
            warnings.append(f"unmapped:{key}")
    return FillPlan(
        entries=tuple(entries),
        warnings=tuple(warnings),
        summary_digest=summary_digest(summary),
    )


def fill_plan_to_dict(plan: FillPlan) -> dict:
    """The wire document the browser extension consumes."""
    return {
        "summary_digest": plan.summary_digest,
        "entries": [{"field_id": e.field_id, "value": e.value} for e in plan.entries],
        "warnings": list(plan.warnings),
    }


def fill_plan_to_json(plan: FillPlan) -> str:
    return json.dumps(fill_plan_to_dict(plan), ensure_ascii=False, indent=2) + "\n"
