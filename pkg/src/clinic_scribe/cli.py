"""Operator entry point.

Commands: process a recording end to end without the service, validate a
mapping file, benchmark stage latencies over repeated runs, and launch the
HTTP service. Exit codes: 0 success, 1 usage error, 2 pipeline or
configuration failure.
"""

from __future__ import annotations

import argparse
import statistics
import sys
from pathlib import Path

from clinic_scribe.audio_ingest import RawAudioFile, assess_quality, decode_wav, encode_wav, resample
from clinic_scribe.config import AppConfig, load_config
from clinic_scribe.errors import ScribeError
from clinic_scribe.form_mapper import fill_plan_to_json, load_mapping
from clinic_scribe.pipeline import (
    PipelineDeps,
    StageFailure,
    execute_stages,
    timings_to_json,
)
from clinic_scribe.summarizer import SummarizerBackendDescriptor
from clinic_scribe.transcription import FixtureRegistry, TranscriptionBackendDescriptor

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract reserves 2 for
    # pipeline/config failures and uses 1 for usage problems.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="clinic-scribe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("process", help="run the pipeline on one audio file")
    p.add_argument("audio", help="path to a WAV recording")
    p.add_argument("--backend", choices=["fixture", "remote"], default="fixture")
    p.add_argument("--mapping", help="mapping file (default: packaged mapping)")
    p.add_argument("--out", default="scribe-out", help="artifact output directory")
    p.add_argument("--config", help="service config JSON")
    p.add_argument("--transcript-fixtures", help="fixture registry JSON for transcription")
    p.add_argument("--summary-fixtures", help="fixture registry JSON for summaries")
    p.add_argument("--dump-audio", action="store_true", help="also write the 16 kHz WAV")

    v = sub.add_parser("validate-mapping", help="check a mapping file")
    v.add_argument("path")

    b = sub.add_parser("bench", help="repeat the pipeline and report stage latencies")
    b.add_argument("audio")
    b.add_argument("--runs", type=int, default=3)
    b.add_argument("--mapping")
    b.add_argument("--config")
    b.add_argument("--transcript-fixtures")
    b.add_argument("--summary-fixtures")

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--config")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8400)
    return parser


def _usage_error(parser: _Parser, message: str) -> int:
    parser.print_usage(sys.stderr)
    print(f"{parser.prog}: error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _load_app_config(parser: _Parser, config_path: str | None) -> AppConfig | int:
    if config_path is None:
        return AppConfig()
    path = Path(config_path)
    if not path.is_file():
        return _usage_error(parser, f"config file not found: {path}")
    return load_config(path)


def _load_registry(parser: _Parser, option: str, value: str | None) -> FixtureRegistry | None | int:
    if value is None:
        return None
    path = Path(value)
    if not path.is_file():
        return _usage_error(parser, f"{option} file not found: {path}")
    return FixtureRegistry.load(path)


def _build_deps(parser: _Parser, args) -> "PipelineDeps | int":
    config = _load_app_config(parser, args.config)
    if isinstance(config, int):
        return config
    if getattr(args, "backend", "fixture") == "fixture":
        if config.transcription.kind != "fixture":
            config.transcription = TranscriptionBackendDescriptor(kind="fixture")
        if config.summarizer.kind != "fixture":
            config.summarizer = SummarizerBackendDescriptor(kind="fixture")
    else:
        if config.transcription.kind != "remote_api" or config.summarizer.kind != "remote_api":
            print(
                "remote backend requested but the config does not define remote descriptors",
                file=sys.stderr,
            )
            return EXIT_FAILURE

    transcript_registry = _load_registry(parser, "--transcript-fixtures", args.transcript_fixtures)
    if isinstance(transcript_registry, int):
        return transcript_registry
    summary_registry = _load_registry(parser, "--summary-fixtures", args.summary_fixtures)
    if isinstance(summary_registry, int):
        return summary_registry
    if transcript_registry is None and config.transcription.kind == "fixture":
        transcript_registry = _default_registry(config.transcription)
    if summary_registry is None and config.summarizer.kind == "fixture":
        summary_registry = _default_registry(config.summarizer)

    if args.mapping is not None:
        mapping_path = Path(args.mapping)
        if not mapping_path.is_file():
            return _usage_error(parser, f"mapping file not found: {mapping_path}")
        mapping = load_mapping(mapping_path.read_text(encoding="utf-8"))
    else:
        mapping = config.load_field_mapping()

    return PipelineDeps(
        transcription_backend=config.transcription,
        summarizer_backend=config.summarizer,
        mapping=mapping,
        prices=config.prices,
        prompt_config=config.prompt,
        transcript_registry=transcript_registry,
        summary_registry=summary_registry,
    ), config


def _default_registry(descriptor) -> FixtureRegistry:
    if descriptor.registry_path:
        return FixtureRegistry.load(descriptor.registry_path)
    return FixtureRegistry()


def _decode_and_gate(parser: _Parser, args, config: AppConfig):
    path = Path(args.audio)
    if not path.is_file():
        return _usage_error(parser, f"audio file not found: {path}")
    container = "wav" if path.suffix.lower() == ".wav" else "unknown"
    try:
        clip = decode_wav(RawAudioFile(path.read_bytes(), container, path.name))
        report = assess_quality(clip, config.quality)
    except ScribeError as exc:
        print(f"pipeline failed at stage ingest: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    if not report.passes:
        print(
            f"pipeline failed at stage ingest: audio rejected ({', '.join(report.reasons)})",
            file=sys.stderr,
        )
        return EXIT_FAILURE
    return clip


def _cmd_process(parser: _Parser, args) -> int:
    built = _build_deps(parser, args)
    if isinstance(built, int):
        return built
    deps, config = built
    clip = _decode_and_gate(parser, args, config)
    if isinstance(clip, int):
        return clip

    try:
        result = execute_stages(clip, deps)
    except StageFailure as exc:
        print(f"pipeline failed at stage {exc.stage}: {exc.error}", file=sys.stderr)
        return EXIT_FAILURE

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "transcript.txt").write_text(result.transcript.text, encoding="utf-8")
    (out_dir / "summary.json").write_text(result.summary.to_json(), encoding="utf-8")
    (out_dir / "fill_plan.json").write_text(fill_plan_to_json(result.fill_plan), encoding="utf-8")
    (out_dir / "timings.json").write_text(timings_to_json(result.timings), encoding="utf-8")
    if args.dump_audio:
        (out_dir / "resampled_16k.wav").write_bytes(encode_wav(resample(clip, 16000)))

    print(
        f"plan_ready: {len(result.fill_plan.entries)} fields, "
        f"{len(result.fill_plan.warnings)} warnings, "
        f"total {result.timings.total_s:.3f}s, "
        f"cost {result.cost.total_usd:.6f} {config.prices.currency}"
    )
    return EXIT_OK


def _cmd_validate_mapping(parser: _Parser, args) -> int:
    path = Path(args.path)
    if not path.is_file():
        return _usage_error(parser, f"mapping file not found: {path}")
    try:
        mapping = load_mapping(path.read_text(encoding="utf-8"))
    except ScribeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    print(f"{len(mapping.entries)} entries")
    return EXIT_OK


def _cmd_bench(parser: _Parser, args) -> int:
    if args.runs < 1:
        return _usage_error(parser, "--runs must be at least 1")
    built = _build_deps(parser, args)
    if isinstance(built, int):
        return built
    deps, config = built
    clip = _decode_and_gate(parser, args, config)
    if isinstance(clip, int):
        return clip

    rows = {"transcribe": [], "summarize": [], "fill": [], "total": []}
    for _ in range(args.runs):
        try:
            result = execute_stages(clip, deps)
        except StageFailure as exc:
            print(f"pipeline failed at stage {exc.stage}: {exc.error}", file=sys.stderr)
            return EXIT_FAILURE
        rows["transcribe"].append(result.timings.transcribe_s)
        rows["summarize"].append(result.timings.summarize_s)
        rows["fill"].append(result.timings.fill_s)
        rows["total"].append(result.timings.total_s)

    print(f"runs: {args.runs}")
    print(f"{'stage':<12} {'mean_s':>10} {'max_s':>10}")
    for name in ("transcribe", "summarize", "fill", "total"):
        values = rows[name]
        print(f"{name:<12} {statistics.mean(values):>10.6f} {max(values):>10.6f}")
    return EXIT_OK


def _cmd_serve(parser: _Parser, args) -> int:
    import uvicorn

    from clinic_scribe.orchestrator import Orchestrator
    from clinic_scribe.service import create_app

    config = _load_app_config(parser, args.config)
    if isinstance(config, int):
        return config
    app = create_app(Orchestrator(config))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK

    try:
        if args.command == "process":
            return _cmd_process(parser, args)
        if args.command == "validate-mapping":
            return _cmd_validate_mapping(parser, args)
        if args.command == "bench":
            return _cmd_bench(parser, args)
        if args.command == "serve":
            return _cmd_serve(parser, args)
    except ScribeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
