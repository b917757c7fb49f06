"""Command-line interface.

Subcommands: noise, augment, eval, ter, bleu, significance, build-lexicon.
Every subcommand accepts --config pointing at a JSON object whose keys
mirror the long flag names (hyphens or underscores); explicit flags win over
config values.  Exit codes: 0 success, 1 I/O error, 2 configuration or
validation error, 3 translator protocol error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import augment as aug
from . import harness, report
from .lineio import InputError, read_lines, write_lines
from .metrics import corpus_bleu, ter
from .noise import PRODUCTIVE_NOISE_TYPES, NoiseType
from .text import (
    LanguageProfile,
    Lexicon,
    LexiconError,
    ProfileError,
    build_lexicon,
    bundled_profile,
    bundled_profile_tags,
    load_lexicon,
    load_profile_file,
    save_lexicon,
    tokenize,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_TRANSLATOR = 3


class ConfigError(ValueError):
    """Bad flags, config values, or input data shapes."""


# --- option resolution ----------------------------------------------------


def _load_config(path: str) -> dict:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge flag values over config values over built-in defaults."""
    config = _load_config(args.config) if getattr(args, "config", None) else {}
    unknown = sorted(set(config) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    options = {}
    for key, default in defaults.items():
        value = getattr(args, key, None)
        if value is None:
            value = config.get(key, default)
        options[key] = value
    return options


def _require(options: dict, *keys: str) -> None:
    missing = [k for k in keys if options.get(k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise ConfigError(f"missing required option(s): {flags}")


def _check_input(path: str) -> str:
    if not os.path.isfile(path):
        raise InputError(f"input file not found: {path}")
    return path


def _get_profile(value: str | None) -> LanguageProfile:
    if value is None:
        raise ConfigError("missing required option(s): --profile")
    if os.path.isfile(value):
        return load_profile_file(value)
    if value in bundled_profile_tags():
        return bundled_profile(value)
    raise ConfigError(
        f"profile {value!r} is neither a file nor a bundled tag"
        f" ({', '.join(bundled_profile_tags())})"
    )


def _get_lexicon(value: str | None) -> Lexicon | None:
    if value is None:
        return None
    _check_input(value)
    return load_lexicon(value)


def _parse_type(value: str) -> NoiseType:
    try:
        return NoiseType.from_cli_name(value)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_types(value) -> tuple[NoiseType, ...]:
    if isinstance(value, str):
        names = [part.strip() for part in value.split(",") if part.strip()]
    elif isinstance(value, (list, tuple)):
        names = [str(part) for part in value]
    else:
        raise ConfigError(f"cannot parse noise types from {value!r}")
    if not names:
        raise ConfigError("empty noise type list")
    return tuple(_parse_type(name) for name in names)


def _require_lexicon_for_substitute(
    types: tuple[NoiseType, ...], lexicon: Lexicon | None
) -> None:
    if NoiseType.SAMPLE_SUBSTITUTE in types and lexicon is None:
        raise ConfigError(
            "sample-substitute requires --lexicon (build one with"
            " 'mtnoise build-lexicon')"
        )


def _write_json_file(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


# --- subcommand handlers ----------------------------------------------------

_NOISE_DEFAULTS = {
    "input": None,
    "output": None,
    "type": None,
    "profile": None,
    "lexicon": None,
    "seed": 0,
    "edits": 1,
    "jobs": 1,
    "manifest": None,
}


def cmd_noise(args: argparse.Namespace) -> int:
    options = _resolve(args, _NOISE_DEFAULTS)
    _require(options, "input", "output", "type", "profile")
    profile = _get_profile(options["profile"])
    noise_type = _parse_type(options["type"])
    lexicon = _get_lexicon(options["lexicon"])
    _require_lexicon_for_substitute((noise_type,), lexicon)
    lines = read_lines(_check_input(options["input"]))
    results = aug.noise_lines(
        lines, [noise_type] * len(lines), profile, lexicon,
        int(options["seed"]), int(options["edits"]), int(options["jobs"]),
    )
    write_lines(options["output"], [text for text, _ in results])
    noops = sum(1 for _, noop in results if noop)
    manifest = {
        "plan": {
            "mode": "noise",
            "noise_types": [noise_type.cli_name],
            "seed": int(options["seed"]),
            "edits_per_sentence": int(options["edits"]),
            "profile": profile.language_tag,
        },
        "lines_in": len(lines),
        "lines_out": len(lines),
        "per_type_counts": {noise_type.cli_name: len(lines)},
        "noop_count": noops,
        "noop_fraction": noops / len(lines) if lines else 0.0,
    }
    manifest_path = options["manifest"] or options["output"] + ".manifest.json"
    _write_json_file(manifest_path, manifest)
    print(f"noised {len(lines)} lines ({noops} no-ops) -> {options['output']}")
    return EXIT_OK


_AUGMENT_DEFAULTS = {
    "mode": None,
    "source": None,
    "target": None,
    "tsv": None,
    "out_source": None,
    "out_target": None,
    "out_tsv": None,
    "type": None,
    "types": None,
    "profile": None,
    "lexicon": None,
    "seed": 0,
    "edits": 1,
    "jobs": 1,
    "manifest": None,
}


def cmd_augment(args: argparse.Namespace) -> int:
    options = _resolve(args, _AUGMENT_DEFAULTS)
    _require(options, "mode", "profile")
    mode = options["mode"]
    if mode not in ("one-to-one", "equal-mix"):
        raise ConfigError(f"unknown mode {mode!r}; expected one-to-one or equal-mix")
    profile = _get_profile(options["profile"])
    lexicon = _get_lexicon(options["lexicon"])

    if options["tsv"] is not None:
        corpus = aug.read_parallel(tsv_path=_check_input(options["tsv"]))
    elif options["source"] is not None and options["target"] is not None:
        corpus = aug.read_parallel(
            source_path=_check_input(options["source"]),
            target_path=_check_input(options["target"]),
        )
    else:
        raise ConfigError("need --tsv, or both --source and --target")

    seed = int(options["seed"])
    edits = int(options["edits"])
    jobs = int(options["jobs"])
    if mode == "one-to-one":
        _require(options, "type")
        types = (_parse_type(options["type"]),)
        _require_lexicon_for_substitute(types, lexicon)
        augmented = aug.upsample_one_to_one(
            corpus, types[0], profile, lexicon, seed, edits, jobs
        )
    else:
        types = (
            _parse_types(options["types"])
            if options["types"] is not None
            else PRODUCTIVE_NOISE_TYPES
        )
        _require_lexicon_for_substitute(types, lexicon)
        augmented = aug.mix_equal_proportion(
            corpus, types, profile, lexicon, seed, edits, jobs
        )

    if options["out_tsv"] is not None:
        aug.write_parallel(augmented, tsv_path=options["out_tsv"])
        out_anchor = options["out_tsv"]
    elif options["out_source"] is not None and options["out_target"] is not None:
        aug.write_parallel(
            augmented,
            source_path=options["out_source"],
            target_path=options["out_target"],
        )
        out_anchor = options["out_source"]
    else:
        raise ConfigError("need --out-tsv, or both --out-source and --out-target")

    plan = aug.AugmentPlan(mode, types, seed, edits)
    manifest = aug.augment_manifest(corpus, augmented, plan, profile)
    manifest_path = options["manifest"] or out_anchor + ".manifest.json"
    aug.write_manifest(manifest, manifest_path)
    print(
        f"augmented {len(corpus)} -> {len(augmented)} line pairs"
        f" ({manifest['noop_count']} no-ops) -> {out_anchor}"
    )
    return EXIT_OK


_EVAL_DEFAULTS = {
    "input": None,
    "reference": None,
    "translator": None,
    "profile": None,
    "lexicon": None,
    "types": None,
    "variants": 10,
    "seed": 0,
    "edits": 1,
    "batch_size": 64,
    "jobs": 1,
    "report_dir": None,
    "figures": True,
    "timestamp": None,
    "auth_header": None,
}


def cmd_eval(args: argparse.Namespace) -> int:
    options = _resolve(args, _EVAL_DEFAULTS)
    _require(options, "input", "translator", "profile", "report_dir")
    profile = _get_profile(options["profile"])
    lexicon = _get_lexicon(options["lexicon"])
    types = (
        _parse_types(options["types"])
        if options["types"] is not None
        else PRODUCTIVE_NOISE_TYPES
    )
    _require_lexicon_for_substitute(types, lexicon)
    sentences = read_lines(_check_input(options["input"]))
    if not sentences:
        raise ConfigError(f"test set {options['input']} is empty")
    try:
        translator = harness.parse_translator_spec(
            options["translator"], options["auth_header"]
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    figures = bool(options["figures"])
    try:
        robustness = harness.evaluate_robustness(
            translator,
            sentences,
            types,
            profile,
            lexicon,
            variants_per_sentence=int(options["variants"]),
            seed=int(options["seed"]),
            edits_per_sentence=int(options["edits"]),
            batch_size=int(options["batch_size"]),
            jobs=int(options["jobs"]),
            timestamp=options["timestamp"],
        )
        paths = report.write_robustness_report(
            robustness, options["report_dir"], "robustness", figures
        )
        sys.stdout.write(report.render_robustness_table([robustness]))
        if options["reference"] is not None:
            refs = read_lines(_check_input(options["reference"]))
            corpus = aug.ParallelCorpus(tuple(sentences), tuple(refs))
            quality = harness.evaluate_quality(
                translator,
                corpus,
                types,
                profile,
                lexicon,
                seed=int(options["seed"]),
                edits_per_sentence=int(options["edits"]),
                batch_size=int(options["batch_size"]),
                timestamp=options["timestamp"],
            )
            paths += report.write_quality_report(
                quality, options["report_dir"], "bleu", figures
            )
            sys.stdout.write(report.render_quality_table([quality]))
    finally:
        if hasattr(translator, "close"):
            translator.close()
    print(f"reports written to {options['report_dir']} ({len(paths)} files)")
    return EXIT_OK


_TER_DEFAULTS = {"hyp": None, "ref": None, "profile": None}


def cmd_ter(args: argparse.Namespace) -> int:
    options = _resolve(args, _TER_DEFAULTS)
    _require(options, "hyp", "ref", "profile")
    profile = _get_profile(options["profile"])
    hyp_lines = read_lines(_check_input(options["hyp"]))
    ref_lines = read_lines(_check_input(options["ref"]))
    if len(hyp_lines) != len(ref_lines):
        raise ConfigError(
            f"line count mismatch: {len(hyp_lines)} hypotheses"
            f" vs {len(ref_lines)} references"
        )
    if not hyp_lines:
        raise ConfigError("no sentences to score")
    total_edits = total_shifts = total_ref = 0
    total_score = 0.0
    for lineno, (hyp, ref) in enumerate(zip(hyp_lines, ref_lines), start=1):
        hyp_tokens = [t.surface for t in tokenize(hyp, profile).tokens]
        ref_tokens = [t.surface for t in tokenize(ref, profile).tokens]
        if not ref_tokens:
            raise ConfigError(f"reference line {lineno} is empty")
        score = ter(hyp_tokens, ref_tokens)
        print(f"TER {score.edits} {score.shifts} {score.ref_length} {score.score:.6f}")
        total_edits += score.edits
        total_shifts += score.shifts
        total_ref += score.ref_length
        total_score += score.score
    mean = total_score / len(hyp_lines)
    print(f"TER-CORPUS {total_edits} {total_shifts} {total_ref} {mean:.6f}")
    return EXIT_OK


_BLEU_DEFAULTS = {"hyp": None, "ref": None, "profile": None}


def cmd_bleu(args: argparse.Namespace) -> int:
    options = _resolve(args, _BLEU_DEFAULTS)
    _require(options, "hyp", "ref", "profile")
    profile = _get_profile(options["profile"])
    hyp_lines = read_lines(_check_input(options["hyp"]))
    ref_lines = read_lines(_check_input(options["ref"]))
    if len(hyp_lines) != len(ref_lines):
        raise ConfigError(
            f"line count mismatch: {len(hyp_lines)} hypotheses"
            f" vs {len(ref_lines)} references"
        )
    if not hyp_lines:
        raise ConfigError("no sentences to score")
    score = corpus_bleu(hyp_lines, ref_lines, profile)
    precisions = "/".join(f"{p:.6f}" for p in score.precisions)
    print(
        f"BLEU {score.score:.6f} precisions {precisions}"
        f" BP {score.brevity_penalty:.6f}"
        f" hyp_len {score.hyp_length} ref_len {score.ref_length}"
    )
    return EXIT_OK


_SIGNIFICANCE_DEFAULTS = {
    "hyp_a": None,
    "hyp_b": None,
    "ref": None,
    "profile": None,
    "iterations": 1000,
    "seed": 0,
}


def cmd_significance(args: argparse.Namespace) -> int:
    options = _resolve(args, _SIGNIFICANCE_DEFAULTS)
    _require(options, "hyp_a", "hyp_b", "ref", "profile")
    profile = _get_profile(options["profile"])
    hyps_a = read_lines(_check_input(options["hyp_a"]))
    hyps_b = read_lines(_check_input(options["hyp_b"]))
    refs = read_lines(_check_input(options["ref"]))
    result = harness.paired_bootstrap(
        hyps_a, hyps_b, refs, profile,
        iterations=int(options["iterations"]), seed=int(options["seed"]),
    )
    sys.stdout.write(report.render_significance(result))
    return EXIT_OK


_BUILD_LEXICON_DEFAULTS = {
    "inputs": None,
    "output": None,
    "profile": None,
    "min_count": 2,
}


def cmd_build_lexicon(args: argparse.Namespace) -> int:
    options = _resolve(args, _BUILD_LEXICON_DEFAULTS)
    _require(options, "inputs", "output", "profile")
    profile = _get_profile(options["profile"])
    inputs = options["inputs"]
    if isinstance(inputs, str):
        inputs = [inputs]
    lines: list[str] = []
    for path in inputs:
        lines.extend(read_lines(_check_input(path)))
    lexicon = build_lexicon(lines, profile, int(options["min_count"]))
    save_lexicon(lexicon, options["output"])
    print(f"lexicon with {len(lexicon)} entries -> {options['output']}")
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtnoise",
        description=(
            "Orthographic and punctuation noise for MT corpora, plus"
            " robustness (10NT-TER) and quality (BLEU) evaluation."
        ),
    )
    sub = parser.add_subparsers(dest="command")

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file mirroring the flags")

    p = sub.add_parser("noise", help="noise a file of sentences, one per line")
    p.add_argument("--input", "-i")
    p.add_argument("--output", "-o")
    p.add_argument("--type", help="noise type (e.g. latinize, permute-letters)")
    p.add_argument("--profile", help="bundled tag (lv, lt, et, en) or profile JSON path")
    p.add_argument("--lexicon", help="word<TAB>count lexicon file")
    p.add_argument("--seed", type=int)
    p.add_argument("--edits", type=int, help="edits per sentence (default 1)")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.add_argument("--manifest", help="manifest path (default OUTPUT.manifest.json)")
    common(p)
    p.set_defaults(handler=cmd_noise)

    p = sub.add_parser("augment", help="double a parallel corpus with noised copies")
    p.add_argument("--mode", help="one-to-one or equal-mix")
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("--tsv", help="source<TAB>target file instead of --source/--target")
    p.add_argument("--out-source", dest="out_source")
    p.add_argument("--out-target", dest="out_target")
    p.add_argument("--out-tsv", dest="out_tsv")
    p.add_argument("--type", help="noise type for one-to-one mode")
    p.add_argument("--types", help="comma-separated types for equal-mix"
                   " (default: the seven productive types)")
    p.add_argument("--profile")
    p.add_argument("--lexicon")
    p.add_argument("--seed", type=int)
    p.add_argument("--edits", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--manifest")
    common(p)
    p.set_defaults(handler=cmd_augment)

    p = sub.add_parser("eval", help="measure translator robustness (and BLEU)")
    p.add_argument("--input", "-i", help="test sentences, one per line")
    p.add_argument("--reference", help="aligned references; enables the BLEU table")
    p.add_argument("--translator", help="identity | constant:<text> | cmd:<command> | http:<url>")
    p.add_argument("--profile")
    p.add_argument("--lexicon")
    p.add_argument("--types", help="comma-separated noise types (default: productive seven)")
    p.add_argument("--variants", type=int, help="noised variants per sentence (default 10)")
    p.add_argument("--seed", type=int)
    p.add_argument("--edits", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--report-dir", dest="report_dir")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction,
                   help="render PNG charts next to the reports (default on)")
    p.add_argument("--timestamp", help="stamp reports with this string (default: none)")
    p.add_argument("--auth-header", dest="auth_header",
                   help="'Name: value' header for http translators")
    common(p)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("ter", help="per-line TER and corpus mean for two files")
    p.add_argument("--hyp")
    p.add_argument("--ref")
    p.add_argument("--profile")
    common(p)
    p.set_defaults(handler=cmd_ter)

    p = sub.add_parser("bleu", help="corpus BLEU for two files")
    p.add_argument("--hyp")
    p.add_argument("--ref")
    p.add_argument("--profile")
    common(p)
    p.set_defaults(handler=cmd_bleu)

    p = sub.add_parser("significance", help="paired bootstrap BLEU comparison")
    p.add_argument("--hyp-a", dest="hyp_a")
    p.add_argument("--hyp-b", dest="hyp_b")
    p.add_argument("--ref")
    p.add_argument("--profile")
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(handler=cmd_significance)

    p = sub.add_parser("build-lexicon", help="count word frequencies into a lexicon file")
    p.add_argument("--inputs", nargs="+")
    p.add_argument("--output", "-o")
    p.add_argument("--profile")
    p.add_argument("--min-count", dest="min_count", type=int)
    common(p)
    p.set_defaults(handler=cmd_build_lexicon)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "handler"):
        parser.print_help()
        return EXIT_CONFIG
    try:
        return args.handler(args)
    except (ConfigError, ProfileError, LexiconError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except harness.TranslatorError as exc:
        print(f"translator error: {exc}", file=sys.stderr)
        return EXIT_TRANSLATOR
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
