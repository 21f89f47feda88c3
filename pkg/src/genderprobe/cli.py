"""Command-line front end.

Subcommands cover the pipeline stages in order: ``ingest`` (validate lexicons
and print their stats), ``elicit`` (query the backend, resumable), ``translate``
(fill the pivot-translation cache), ``profile`` (parse and aggregate stored
completions), ``eval same|transfer|compare|similarity`` (experiments),
``synth`` (generate synthetic fixtures) and ``report`` (re-render CSV tables
from stored report JSON). Exit codes: 0 success, 1 validation error,
2 transport error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import (
    load_config,
    read_config_file,
    synth_settings_from_dict,
)
from .describe import aggregate, parse_completion, write_profiles
from .errors import GenderProbeError, TransportError
from .experiments import (
    ExperimentConfig,
    build_source_profiles,
    load_language_lexicon,
    render_report_csvs,
    run_model_comparison,
    run_same_language,
    run_similarity,
    run_transfer,
)
from .gateway import BackendSpec, build_backend, elicit
from .lexicon import load_lexicon
from .prompts import prompt_sha256, render_prompt, template_for
from .synthetic import build_spec, generate_suite
from .transcripts import TranscriptStore
from .translate import TranslationCache, translate_profile

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_TRANSPORT = 2
EXIT_USAGE = 64


class _UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 64 instead of argparse's default 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageExit(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="genderprobe",
        description=(
            "Elicit adjectives for gendered nouns from a language-model backend "
            "and measure whether they predict grammatical gender."
        ),
    )
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="TOML config file")
        p.add_argument("--languages", help="comma-separated override of configured languages")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--out-dir", help="override the output directory")
        p.add_argument("--n-samples", type=int, help="samples per noun")
        p.add_argument("--top-p", type=int, help="profile truncation size")
        p.add_argument("--max-parallel", type=int, help="concurrent backend requests")
        p.add_argument(
            "--weighting", choices=["scaled", "raw"], help="frequency weighting mode"
        )
        p.add_argument(
            "--animate-filter",
            action="store_true",
            default=None,
            help="drop animate nouns before any other stage",
        )

    p_ingest = sub.add_parser("ingest", help="validate lexicons and print their stats")
    add_common(p_ingest)

    p_elicit = sub.add_parser("elicit", help="collect completions for every configured noun")
    add_common(p_elicit)
    p_elicit.add_argument(
        "--dry-run",
        action="store_true",
        help="print prompts and the planned request count; no backend calls",
    )

    p_translate = sub.add_parser("translate", help="fill the pivot-translation cache")
    add_common(p_translate)

    p_profile = sub.add_parser("profile", help="parse and aggregate stored completions")
    add_common(p_profile)

    p_eval = sub.add_parser("eval", help="run an evaluation and write its report")
    p_eval.add_argument(
        "mode", choices=["same", "transfer", "compare", "similarity"], help="evaluation kind"
    )
    add_common(p_eval)

    p_synth = sub.add_parser("synth", help="generate synthetic fixture languages")
    p_synth.add_argument("--config", required=True, help="TOML config with a [synthetic] table")

    p_report = sub.add_parser("report", help="re-render CSV tables from stored reports")
    add_common(p_report)

    return parser


def _overrides(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if getattr(args, "languages", None):
        overrides["languages"] = [l.strip() for l in args.languages.split(",") if l.strip()]
    for attr, key in [
        ("seed", "seed"),
        ("out_dir", "out_dir"),
        ("n_samples", "n_samples"),
        ("top_p", "top_p"),
        ("max_parallel", "max_parallel"),
        ("weighting", "weighting"),
        ("animate_filter", "animate_filter"),
    ]:
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    return overrides


def _load(args: argparse.Namespace) -> ExperimentConfig:
    return load_config(args.config, overrides=_overrides(args))


def _cmd_ingest(args: argparse.Namespace) -> int:
    config = _load(args)
    for language in sorted(config.languages):
        lexicon = load_lexicon(Path(config.lexicon_dir) / f"{language}.tsv", language)
        total, masc, fem = lexicon.counts
        print(f"{language} total={total} masc={masc} fem={fem}")
    return EXIT_OK


def _cmd_elicit(args: argparse.Namespace) -> int:
    config = _load(args)
    backend_spec = config.backends[0]
    store = TranscriptStore(config.transcript_dir)
    planned = 0
    done = 0
    for language in sorted(config.languages):
        lexicon = load_language_lexicon(config, language)
        template = template_for(language)
        backend = None
        for noun in lexicon.entries:
            prompt = render_prompt(template, noun)
            h = prompt_sha256(prompt)
            missing = [
                i
                for i in range(config.n_samples)
                if store.get(language, backend_spec.model_name, h, i) is None
            ]
            if args.dry_run:
                print(prompt)
                planned += len(missing)
                continue
            if backend is None:
                backend = build_backend(backend_spec, store, language)
            elicit(backend, noun, template, config.n_samples, store)
            done += len(missing)
    if args.dry_run:
        print(f"planned requests: {planned}")
    else:
        print(f"fetched {done} new completions into {config.transcript_dir}")
    return EXIT_OK


def _source_profiles_from_store(config: ExperimentConfig, language: str, store: TranscriptStore):
    """Parse/aggregate stages always read back stored completions (no new calls)."""
    replay_spec = BackendSpec(
        kind="replay", model_name=config.backends[0].model_name
    )
    return build_source_profiles(config, replay_spec, language, store)


def _cmd_translate(args: argparse.Namespace) -> int:
    from .experiments import _build_translator  # internal wiring shared with runners

    config = _load(args)
    store = TranscriptStore(config.transcript_dir)
    cache = TranslationCache(config.translator.cache_path or None)
    translator = _build_translator(config)
    before = len(cache)
    for language in sorted(config.languages):
        for profile in _source_profiles_from_store(config, language, store):
            translate_profile(profile, cache, translator)
    print(f"translation cache: {before} entries before, {len(cache)} after")
    return EXIT_OK


def _cmd_profile(args: argparse.Namespace) -> int:
    config = _load(args)
    store = TranscriptStore(config.transcript_dir)
    out = Path(config.out_dir) / "profiles"
    for language in sorted(config.languages):
        profiles = _source_profiles_from_store(config, language, store)
        path = write_profiles(
            out / f"{language}__{config.backends[0].model_name}.jsonl", profiles
        )
        print(f"{language}: wrote {len(profiles)} profiles to {path}")
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    config = _load(args)
    runners = {
        "same": run_same_language,
        "transfer": run_transfer,
        "compare": run_model_comparison,
        "similarity": run_similarity,
    }
    report = runners[args.mode](config)
    path = report.write(config.out_dir)
    csvs = render_report_csvs({"kind": report.kind, **report.body}, config.out_dir, report.stem)
    print(f"report: {path}")
    for csv_path in csvs:
        print(f"table:  {csv_path}")
    for row in report.body.get("rows", []):
        label = row.get("language", row.get("model", "?"))
        if "overall_accuracy" in row:
            print(
                f"  {label}: overall={row['overall_accuracy']:.3f} "
                f"f1={row['f1']:.3f} masc={row['masculine_accuracy']:.3f} "
                f"fem={row['feminine_accuracy']:.3f}"
            )
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    data, base_dir = read_config_file(args.config)
    settings = synth_settings_from_dict(data, base_dir)
    spec = build_spec(
        n_nouns=settings.n_nouns,
        bias_strength=settings.bias_strength,
        masculine_fraction=settings.masculine_fraction,
        adjectives_per_response=settings.adjectives_per_response,
        n_samples=settings.n_samples,
        pool_sizes=settings.pool_sizes,
        dimension=settings.dimension,
        surface_variants=settings.surface_variants,
        n_oov=settings.n_oov,
        map_seed=settings.seed,
        token_prefix=settings.token_prefix,
    )
    generated = generate_suite(
        {tag: spec for tag in settings.languages},
        seed=settings.seed,
        out_root=settings.out_root,
        model_name=settings.model_name,
    )
    for tag in sorted(generated):
        g = generated[tag]
        total, masc, fem = g.lexicon.counts
        print(f"{tag}: {total} nouns ({masc} m / {fem} f) -> {g.lexicon_path}")
    print(f"fixtures under {settings.out_root}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    config = _load(args)
    out_dir = Path(config.out_dir)
    reports = sorted(out_dir.glob("*.json"))
    if not reports:
        print(f"no report JSON files under {out_dir}")
        return EXIT_OK
    for path in reports:
        data = json.loads(path.read_text(encoding="utf-8"))
        if data.get("kind") not in ("same_language", "transfer", "model_comparison", "similarity"):
            continue
        for csv_path in render_report_csvs(data, out_dir, path.stem):
            print(f"rendered {csv_path}")
    return EXIT_OK


_COMMANDS = {
    "ingest": _cmd_ingest,
    "elicit": _cmd_elicit,
    "translate": _cmd_translate,
    "profile": _cmd_profile,
    "eval": _cmd_eval,
    "synth": _cmd_synth,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageExit:
        return EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except GenderProbeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
