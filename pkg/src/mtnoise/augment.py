"""Corpus augmentation: build noisy copies of parallel training data.

Two protocols, both doubling the corpus: ``upsample_one_to_one`` appends one
noised copy of every source line using a single noise model;
``mix_equal_proportion`` appends one noised copy per line with noise models
assigned in equal proportions (counts differ by at most one).  The target
side is never modified.  Per-line seeds are derived from the corpus seed and
the line index, so output is independent of worker count and processing
order.
"""

from __future__ import annotations

import json
import unicodedata
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .lineio import read_lines, write_lines
from .noise import PRODUCTIVE_NOISE_TYPES, NoiseType, apply_noise
from .rng import SplitMix64, mix
from .text import LanguageProfile, Lexicon, tokenize

__all__ = [
    "ParallelCorpus",
    "AugmentPlan",
    "upsample_one_to_one",
    "mix_equal_proportion",
    "equal_mix_assignment",
    "noise_lines",
    "read_parallel",
    "write_parallel",
    "augment_manifest",
]


@dataclass(frozen=True, slots=True)
class ParallelCorpus:
    """Aligned source/target line pairs; lines carry no newline characters."""

    source_lines: tuple[str, ...]
    target_lines: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.source_lines) != len(self.target_lines):
            raise ValueError(
                f"misaligned corpus: {len(self.source_lines)} source lines"
                f" vs {len(self.target_lines)} target lines"
            )
        for side, lines in (("source", self.source_lines), ("target", self.target_lines)):
            for i, line in enumerate(lines):
                if "\n" in line or "\r" in line:
                    raise ValueError(f"{side} line {i + 1} contains a newline")

    def __len__(self) -> int:
        return len(self.source_lines)


@dataclass(frozen=True, slots=True)
class AugmentPlan:
    """What an augmentation run did; serialized into the sidecar manifest."""

    mode: str  # "one-to-one" or "equal-mix"
    noise_types: tuple[NoiseType, ...]
    seed: int
    edits_per_sentence: int = 1

    def __post_init__(self) -> None:
        if self.mode not in ("one-to-one", "equal-mix"):
            raise ValueError(f"unknown augment mode {self.mode!r}")
        if not self.noise_types:
            raise ValueError("plan needs at least one noise type")


# --- parallel noising of line batches ---------------------------------------

_POOL_STATE: dict = {}


def _noise_one(
    line: str,
    type_code: int,
    seed: int,
    profile: LanguageProfile,
    lexicon: Lexicon | None,
    edits: int,
) -> tuple[str, bool]:
    noised = apply_noise(
        tokenize(line, profile), NoiseType(type_code), profile, lexicon, seed, edits
    )
    return noised.noised_text, noised.is_noop


def _pool_init(profile: LanguageProfile, lexicon: Lexicon | None, edits: int) -> None:
    _POOL_STATE["profile"] = profile
    _POOL_STATE["lexicon"] = lexicon
    _POOL_STATE["edits"] = edits


def _pool_task(task: tuple[str, int, int]) -> tuple[str, bool]:
    line, type_code, seed = task
    return _noise_one(
        line, type_code, seed,
        _POOL_STATE["profile"], _POOL_STATE["lexicon"], _POOL_STATE["edits"],
    )


def noise_lines(
    lines,
    assignment: list[NoiseType],
    profile: LanguageProfile,
    lexicon: Lexicon | None = None,
    seed: int = 0,
    edits_per_sentence: int = 1,
    jobs: int = 1,
) -> list[tuple[str, bool]]:
    """Noise line i with assignment[i]; returns (noised_text, was_noop) pairs.

    Line i's RNG stream is seeded with mix(seed, i, type_code), so results
    are byte-identical for any ``jobs`` value.
    """
    if len(lines) != len(assignment):
        raise ValueError("one noise type per line required")
    tasks = [
        (line, nt.code, mix(seed, i, nt.code))
        for i, (line, nt) in enumerate(zip(lines, assignment))
    ]
    if jobs <= 1 or len(tasks) < 2:
        return [
            _noise_one(line, code, s, profile, lexicon, edits_per_sentence)
            for line, code, s in tasks
        ]
    chunk = max(1, len(tasks) // (jobs * 8))
    with ProcessPoolExecutor(
        max_workers=jobs,
        initializer=_pool_init,
        initargs=(profile, lexicon, edits_per_sentence),
    ) as pool:
        return list(pool.map(_pool_task, tasks, chunksize=chunk))


# --- augmentation protocols --------------------------------------------------


def upsample_one_to_one(
    corpus: ParallelCorpus,
    noise_type: NoiseType,
    profile: LanguageProfile,
    lexicon: Lexicon | None = None,
    seed: int = 0,
    edits_per_sentence: int = 1,
    jobs: int = 1,
) -> ParallelCorpus:
    """Originals plus one noised copy of every line: exactly 2x the input.

    Lines where the noise model finds no eligible site are kept unchanged
    (the size law holds regardless); the manifest reports how many.
    """
    noised = noise_lines(
        corpus.source_lines, [noise_type] * len(corpus), profile, lexicon,
        seed, edits_per_sentence, jobs,
    )
    return ParallelCorpus(
        corpus.source_lines + tuple(text for text, _ in noised),
        corpus.target_lines + corpus.target_lines,
    )


def equal_mix_assignment(
    n_lines: int, noise_types: tuple[NoiseType, ...], seed: int
) -> list[NoiseType]:
    """Balanced noise-type vector (counts differ by at most 1), seeded shuffle."""
    if not noise_types:
        raise ValueError("need at least one noise type")
    assignment = [noise_types[i % len(noise_types)] for i in range(n_lines)]
    SplitMix64(seed).shuffle(assignment)
    return assignment


def mix_equal_proportion(
    corpus: ParallelCorpus,
    noise_types: tuple[NoiseType, ...] = PRODUCTIVE_NOISE_TYPES,
    profile: LanguageProfile = None,
    lexicon: Lexicon | None = None,
    seed: int = 0,
    edits_per_sentence: int = 1,
    jobs: int = 1,
) -> ParallelCorpus:
    """Originals plus one noised copy per line, noise models in equal shares."""
    if profile is None:
        raise ValueError("mix_equal_proportion requires a language profile")
    assignment = equal_mix_assignment(len(corpus), tuple(noise_types), seed)
    noised = noise_lines(
        corpus.source_lines, assignment, profile, lexicon,
        seed, edits_per_sentence, jobs,
    )
    return ParallelCorpus(
        corpus.source_lines + tuple(text for text, _ in noised),
        corpus.target_lines + corpus.target_lines,
    )


# --- corpus and manifest I/O --------------------------------------------------


def read_parallel(
    source_path: str | None = None,
    target_path: str | None = None,
    tsv_path: str | None = None,
) -> ParallelCorpus:
    """Read two aligned files, or a single source<TAB>target TSV."""
    if tsv_path is not None:
        sources: list[str] = []
        targets: list[str] = []
        for i, line in enumerate(read_lines(tsv_path), start=1):
            if "\t" not in line:
                raise ValueError(f"{tsv_path}: line {i}: expected source<TAB>target")
            src, tgt = line.split("\t", 1)
            sources.append(src)
            targets.append(tgt)
        return ParallelCorpus(tuple(sources), tuple(targets))
    if source_path is None or target_path is None:
        raise ValueError("need either tsv_path or both source_path and target_path")
    return ParallelCorpus(
        tuple(read_lines(source_path)), tuple(read_lines(target_path))
    )


def write_parallel(
    corpus: ParallelCorpus,
    source_path: str | None = None,
    target_path: str | None = None,
    tsv_path: str | None = None,
) -> None:
    if tsv_path is not None:
        for i, src in enumerate(corpus.source_lines, start=1):
            if "\t" in src:
                raise ValueError(
                    f"source line {i} contains a tab; cannot write TSV losslessly"
                )
        write_lines(
            tsv_path,
            [f"{s}\t{t}" for s, t in zip(corpus.source_lines, corpus.target_lines)],
        )
        return
    if source_path is None or target_path is None:
        raise ValueError("need either tsv_path or both source_path and target_path")
    write_lines(source_path, list(corpus.source_lines))
    write_lines(target_path, list(corpus.target_lines))


def augment_manifest(
    original: ParallelCorpus,
    augmented: ParallelCorpus,
    plan: AugmentPlan,
    profile: LanguageProfile,
) -> dict:
    """Describe an augmentation run: plan, per-type counts, no-op accounting.

    The noised half sits after the originals; a noised line counts as a
    no-op when it equals the NFC form of its original (exactly the cases
    where apply_noise found no eligible edit site).
    """
    n = len(original)
    if len(augmented) != 2 * n:
        raise ValueError(f"augmented corpus is {len(augmented)} lines, expected {2 * n}")
    if plan.mode == "one-to-one":
        counts = {plan.noise_types[0].cli_name: n}
    else:
        assignment = equal_mix_assignment(n, plan.noise_types, plan.seed)
        counts = {nt.cli_name: 0 for nt in plan.noise_types}
        for nt in assignment:
            counts[nt.cli_name] += 1
    noops = sum(
        1
        for i in range(n)
        if augmented.source_lines[n + i]
        == unicodedata.normalize("NFC", original.source_lines[i])
    )
    return {
        "plan": {
            "mode": plan.mode,
            "noise_types": [nt.cli_name for nt in plan.noise_types],
            "seed": plan.seed,
            "edits_per_sentence": plan.edits_per_sentence,
            "profile": profile.language_tag,
        },
        "lines_in": n,
        "lines_out": len(augmented),
        "per_type_counts": counts,
        "noop_count": noops,
        "noop_fraction": noops / n if n else 0.0,
    }


def write_manifest(manifest: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, ensure_ascii=False)
        fh.write("\n")
