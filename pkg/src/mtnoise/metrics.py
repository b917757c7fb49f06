"""Translation metrics: word edit distance, TER, corpus BLEU, 10NT-TER.

TER here is translation edit rate with a greedy block-shift search: starting
from the plain word-level Levenshtein distance, repeatedly take the block
shift (cost 1) that most reduces the remaining edit distance, requiring the
shifted span to exactly match a currently-misaligned reference span.  The
10NT metric scores noise robustness without references: the translation of
the clean sentence serves as the reference for the translations of its
noised variants, so a perfectly noise-invariant system scores 0.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .text import LanguageProfile, tokenize

__all__ = [
    "TerScore",
    "BleuScore",
    "word_edit_distance",
    "ter",
    "corpus_bleu",
    "sentence_10nt_ter",
    "bleu_sentence_stats",
    "bleu_from_stats",
    "BLEU_MAX_ORDER",
]

BLEU_MAX_ORDER = 4
MAX_SHIFT_SPAN = 10  # longest block a single shift may move


@dataclass(frozen=True, slots=True)
class TerScore:
    edits: int
    shifts: int
    ref_length: int
    score: float


@dataclass(frozen=True, slots=True)
class BleuScore:
    score: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_length: int
    ref_length: int


def word_edit_distance(hyp: Sequence[str], ref: Sequence[str]) -> int:
    """Word-level Levenshtein distance (insert/delete/substitute, cost 1)."""
    if not hyp:
        return len(ref)
    if not ref:
        return len(hyp)
    prev = list(range(len(ref) + 1))
    cur = [0] * (len(ref) + 1)
    for i, h in enumerate(hyp, start=1):
        cur[0] = i
        for j, r in enumerate(ref, start=1):
            if h == r:
                cur[j] = prev[j - 1]
            else:
                cur[j] = 1 + min(prev[j - 1], prev[j], cur[j - 1])
        prev, cur = cur, prev
    return prev[len(ref)]


def _ref_error_flags(hyp: Sequence[str], ref: Sequence[str]) -> list[bool]:
    """Which reference positions are NOT exact matches in one optimal alignment.

    Full DP with backtrace; on ties the backtrace prefers diagonal, then
    deletion from hyp, then insertion, which keeps the flags deterministic.
    """
    n, m = len(hyp), len(ref)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for j in range(m + 1):
        dp[0][j] = j
    for i in range(1, n + 1):
        row = dp[i]
        prev_row = dp[i - 1]
        row[0] = i
        h = hyp[i - 1]
        for j in range(1, m + 1):
            if h == ref[j - 1]:
                row[j] = prev_row[j - 1]
            else:
                row[j] = 1 + min(prev_row[j - 1], prev_row[j], row[j - 1])
    flags = [True] * m
    i, j = n, m
    while i > 0 and j > 0:
        if hyp[i - 1] == ref[j - 1] and dp[i][j] == dp[i - 1][j - 1]:
            flags[j - 1] = False
            i -= 1
            j -= 1
        elif dp[i][j] == dp[i - 1][j - 1] + 1:
            i -= 1
            j -= 1
        elif dp[i][j] == dp[i - 1][j] + 1:
            i -= 1
        else:
            j -= 1
    return flags


def _best_shift(hyp: list[str], ref: Sequence[str], current_dist: int):
    """Best single block shift, or None if no shift reduces edit distance.

    Candidates are spans of hyp (length capped at MAX_SHIFT_SPAN) that
    exactly match a reference span containing at least one misaligned
    position.  Ranking: largest distance reduction, then longest span, then
    leftmost origin, then leftmost destination.
    """
    n = len(hyp)
    if n < 2:
        return None
    ref_err = _ref_error_flags(hyp, ref)
    # index reference spans that contain an error, keyed by span content
    misaligned: set[tuple[str, ...]] = set()
    m = len(ref)
    max_len = min(MAX_SHIFT_SPAN, n, m)
    for length in range(1, max_len + 1):
        for k in range(m - length + 1):
            if any(ref_err[k : k + length]):
                misaligned.add(tuple(ref[k : k + length]))
    if not misaligned:
        return None
    best = None  # (new_dist, -length, origin, dest, new_hyp)
    for length in range(1, max_len + 1):
        for i in range(n - length + 1):
            span = tuple(hyp[i : i + length])
            if span not in misaligned:
                continue
            removed = hyp[:i] + hyp[i + length :]
            span_list = list(span)
            for dest in range(len(removed) + 1):
                if dest == i:
                    continue
                candidate = removed[:dest] + span_list + removed[dest:]
                new_dist = word_edit_distance(candidate, ref)
                if new_dist >= current_dist:
                    continue
                key = (new_dist, -length, i, dest)
                if best is None or key < best[0]:
                    best = (key, candidate)
    if best is None:
        return None
    return best[1], best[0][0]


def ter(hyp: Sequence[str], ref: Sequence[str]) -> TerScore:
    """Translation edit rate of a tokenized hypothesis against a reference.

    Greedy: while some eligible block shift strictly reduces the word edit
    distance, apply the best one (each costs 1 edit); the final edit count
    is shifts + remaining distance, normalized by reference length.  Never
    exceeds plain edit distance / ref length.
    """
    if not ref:
        raise ValueError("TER reference must be non-empty")
    current = list(hyp)
    dist = word_edit_distance(current, ref)
    shifts = 0
    while dist > 0:
        found = _best_shift(current, ref, dist)
        if found is None:
            break
        current, dist = found
        shifts += 1
    edits = shifts + dist
    return TerScore(edits=edits, shifts=shifts, ref_length=len(ref), score=edits / len(ref))


# --- BLEU -------------------------------------------------------------------


def _token_surfaces(text: str, profile: LanguageProfile) -> list[str]:
    return [t.surface for t in tokenize(text, profile).tokens]


def bleu_sentence_stats(
    hyp_tokens: Sequence[str], ref_tokens: Sequence[str]
) -> tuple[int, ...]:
    """Per-sentence sufficient statistics for corpus BLEU.

    Layout: clipped matches for n=1..4, then total hyp n-grams for n=1..4,
    then hyp length, then ref length.  Stats are summed across sentences (or
    bootstrap resamples) before computing the score, so merging is
    associative and order-independent.
    """
    stats = [0] * (2 * BLEU_MAX_ORDER + 2)
    for n in range(1, BLEU_MAX_ORDER + 1):
        hyp_ngrams = Counter(
            tuple(hyp_tokens[i : i + n]) for i in range(len(hyp_tokens) - n + 1)
        )
        if hyp_ngrams:
            ref_ngrams = Counter(
                tuple(ref_tokens[i : i + n]) for i in range(len(ref_tokens) - n + 1)
            )
            stats[n - 1] = sum(
                min(count, ref_ngrams[gram]) for gram, count in hyp_ngrams.items()
            )
            stats[BLEU_MAX_ORDER + n - 1] = sum(hyp_ngrams.values())
    stats[-2] = len(hyp_tokens)
    stats[-1] = len(ref_tokens)
    return tuple(stats)


def bleu_from_stats(stats: Sequence[int]) -> BleuScore:
    hyp_len = stats[-2]
    ref_len = stats[-1]
    precisions = []
    for n in range(1, BLEU_MAX_ORDER + 1):
        total = stats[BLEU_MAX_ORDER + n - 1]
        precisions.append(stats[n - 1] / total if total else 0.0)
    if hyp_len == 0:
        bp = 0.0
    elif hyp_len >= ref_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - ref_len / hyp_len)
    if all(p > 0.0 for p in precisions):
        score = bp * math.exp(sum(math.log(p) for p in precisions) / BLEU_MAX_ORDER)
    else:
        score = 0.0
    return BleuScore(
        score=score,
        precisions=tuple(precisions),
        brevity_penalty=bp,
        hyp_length=hyp_len,
        ref_length=ref_len,
    )


def corpus_bleu(
    hypotheses: Sequence[str], references: Sequence[str], profile: LanguageProfile
) -> BleuScore:
    """Corpus-level BLEU (orders 1-4, no smoothing), case-sensitive tokenized."""
    if len(hypotheses) != len(references):
        raise ValueError(
            f"hypothesis/reference count mismatch: {len(hypotheses)} vs {len(references)}"
        )
    if not hypotheses:
        raise ValueError("corpus_bleu needs at least one sentence pair")
    totals = [0] * (2 * BLEU_MAX_ORDER + 2)
    for hyp, ref in zip(hypotheses, references):
        stats = bleu_sentence_stats(
            _token_surfaces(hyp, profile), _token_surfaces(ref, profile)
        )
        for i, v in enumerate(stats):
            totals[i] += v
    return bleu_from_stats(totals)


# --- 10NT-TER ----------------------------------------------------------------


def sentence_10nt_ter(
    original_translation: str,
    noised_translations: Sequence[str],
    profile: LanguageProfile,
) -> float:
    """Mean TER of noised-variant translations against the clean translation.

    The clean translation is the reference.  Normally ten variants; fewer
    are accepted when noise generation no-opped on some draws, in which case
    the mean runs over the variants that were produced.
    """
    if not noised_translations:
        raise ValueError("need at least one noised translation")
    ref = _token_surfaces(original_translation, profile)
    if not ref:
        raise ValueError("original translation has no tokens")
    total = 0.0
    for variant in noised_translations:
        total += ter(_token_surfaces(variant, profile), ref).score
    return total / len(noised_translations)
