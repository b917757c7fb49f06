"""Evaluation harness: translator adapters and robustness/quality measurement.

A translator is anything with ``translate(batch) -> list[str]`` returning one
output line per input line.  Robustness is measured reference-free: each
test sentence is noised ten ways per noise type, everything is translated,
and the translations of the variants are scored with TER against the
translation of the clean sentence (10NT-TER).  Quality is corpus BLEU under
clean and noised test inputs, with paired bootstrap resampling for
significance.
"""

from __future__ import annotations

import shlex
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

from .metrics import (
    BleuScore,
    bleu_from_stats,
    bleu_sentence_stats,
    corpus_bleu,
    sentence_10nt_ter,
)
from .augment import ParallelCorpus
from .noise import NoiseType, apply_noise
from .rng import SplitMix64, mix
from .text import LanguageProfile, Lexicon, tokenize

__all__ = [
    "Translator",
    "TranslatorError",
    "TranslatorProtocolError",
    "IdentityTranslator",
    "ConstantTranslator",
    "SubprocessTranslator",
    "HttpTranslator",
    "subprocess_translator",
    "http_translator",
    "parse_translator_spec",
    "TypeRobustness",
    "RobustnessReport",
    "QualityReport",
    "SignificanceResult",
    "evaluate_robustness",
    "evaluate_quality",
    "paired_bootstrap",
]

HTTP_BATCH_LIMIT = 64
HTTP_TIMEOUT = 60.0
HTTP_RETRIES = 2
SUBPROCESS_RETRIES = 2


class TranslatorError(RuntimeError):
    """Translator failed; message carries the batch/sentence context."""


class TranslatorProtocolError(TranslatorError):
    """Translator violated the line/length protocol."""


@runtime_checkable
class Translator(Protocol):
    name: str

    def translate(self, batch: list[str]) -> list[str]: ...


@dataclass
class IdentityTranslator:
    name: str = "identity"

    def translate(self, batch: list[str]) -> list[str]:
        return list(batch)


@dataclass
class ConstantTranslator:
    text: str
    name: str = "constant"

    def translate(self, batch: list[str]) -> list[str]:
        return [self.text] * len(batch)


class SubprocessTranslator:
    """Line-protocol child process: one input line in, one output line out.

    The child must flush per line.  If it dies mid-batch the whole batch is
    retried against a fresh process, at most SUBPROCESS_RETRIES times; a
    command that cannot even spawn fails immediately.
    """

    def __init__(self, command: list[str]):
        if not command:
            raise ValueError("empty translator command")
        self.command = list(command)
        self.name = "cmd:" + " ".join(command)
        self._proc: subprocess.Popen | None = None

    def _ensure_process(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    encoding="utf-8",
                    bufsize=1,
                )
            except OSError as exc:
                raise TranslatorError(f"cannot spawn translator {self.command!r}: {exc}") from exc
        return self._proc

    def _round_trip(self, batch: list[str]) -> list[str]:
        proc = self._ensure_process()
        out: list[str] = []
        for line in batch:
            # the protocol is line-based; embedded newlines would desync it
            line = line.replace("\n", " ").replace("\r", " ")
            try:
                proc.stdin.write(line + "\n")
                proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise TranslatorProtocolError(f"translator closed stdin: {exc}") from exc
            reply = proc.stdout.readline()
            if reply == "":
                raise TranslatorProtocolError("translator closed stdout mid-batch")
            out.append(reply.rstrip("\n"))
        return out

    def translate(self, batch: list[str]) -> list[str]:
        if not batch:
            return []
        last: Exception | None = None
        for _ in range(1 + SUBPROCESS_RETRIES):
            try:
                return self._round_trip(batch)
            except TranslatorProtocolError as exc:
                last = exc
                self.close()
        raise TranslatorProtocolError(
            f"translator {self.command!r} failed after {SUBPROCESS_RETRIES} retries: {last}"
        )

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.kill()
                self._proc.wait()
            except OSError:
                pass
            self._proc = None

    def __del__(self):  # best effort; close() is the real API
        try:
            self.close()
        except Exception:
            pass


class HttpTranslator:
    """POST {"texts": [...]} to an endpoint, expect {"translations": [...]}.

    Batches are capped at HTTP_BATCH_LIMIT texts per request; 5xx and
    timeouts are retried twice with exponential backoff, malformed responses
    fail immediately.
    """

    def __init__(self, endpoint: str, auth_header: str | None = None):
        self.endpoint = endpoint
        self.name = f"http:{endpoint}"
        self._headers = {}
        if auth_header:
            if ":" not in auth_header:
                raise ValueError("auth_header must look like 'Name: value'")
            key, value = auth_header.split(":", 1)
            self._headers[key.strip()] = value.strip()

    def translate(self, batch: list[str]) -> list[str]:
        out: list[str] = []
        for start in range(0, len(batch), HTTP_BATCH_LIMIT):
            out.extend(self._post(batch[start : start + HTTP_BATCH_LIMIT]))
        return out

    def _post(self, chunk: list[str]) -> list[str]:
        import requests

        delay = 0.5
        for attempt in range(1 + HTTP_RETRIES):
            try:
                response = requests.post(
                    self.endpoint,
                    json={"texts": chunk},
                    headers=self._headers,
                    timeout=HTTP_TIMEOUT,
                )
            except requests.Timeout:
                if attempt == HTTP_RETRIES:
                    raise TranslatorError(f"translator endpoint timed out: {self.endpoint}")
                time.sleep(delay)
                delay *= 2
                continue
            except requests.RequestException as exc:
                raise TranslatorError(f"translator request failed: {exc}") from exc
            if response.status_code >= 500:
                if attempt == HTTP_RETRIES:
                    raise TranslatorError(
                        f"translator endpoint returned {response.status_code} after retries"
                    )
                time.sleep(delay)
                delay *= 2
                continue
            if response.status_code != 200:
                raise TranslatorError(
                    f"translator endpoint returned {response.status_code}"
                )
            try:
                payload = response.json()
                translations = payload["translations"]
            except (ValueError, KeyError, TypeError) as exc:
                raise TranslatorProtocolError(
                    f"malformed translator response: {exc}"
                ) from exc
            if not isinstance(translations, list) or len(translations) != len(chunk):
                raise TranslatorProtocolError(
                    f"translator returned {len(translations) if isinstance(translations, list) else 'non-list'}"
                    f" translations for {len(chunk)} texts"
                )
            return [str(t) for t in translations]
        raise TranslatorError("unreachable")


def subprocess_translator(command: str | list[str]) -> SubprocessTranslator:
    if isinstance(command, str):
        command = shlex.split(command)
    return SubprocessTranslator(command)


def http_translator(endpoint: str, auth_header: str | None = None) -> HttpTranslator:
    return HttpTranslator(endpoint, auth_header)


def parse_translator_spec(spec: str, auth_header: str | None = None) -> Translator:
    """Build a translator from a CLI spec string.

    Forms: ``identity``, ``constant:<text>``, ``cmd:<shell command>``,
    ``http:<url>`` (or a bare http(s) URL).
    """
    if spec == "identity":
        return IdentityTranslator()
    if spec.startswith("constant:"):
        return ConstantTranslator(spec[len("constant:") :])
    if spec.startswith("cmd:"):
        command = shlex.split(spec[len("cmd:") :])
        return SubprocessTranslator(command)
    if spec.startswith(("http://", "https://")):
        return HttpTranslator(spec, auth_header)
    if spec.startswith("http:"):
        return HttpTranslator(spec[len("http:") :], auth_header)
    raise ValueError(
        f"unknown translator spec {spec!r}; expected identity, constant:<text>,"
        " cmd:<command>, or http:<url>"
    )


# --- report types -------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class TypeRobustness:
    noise_type: NoiseType
    mean_10nt_ter: float
    sentences: int  # sentences that contributed at least one produced variant
    noops: int  # variants where noise generation found no eligible site


@dataclass(frozen=True, slots=True)
class RobustnessReport:
    translator: str
    profile_tag: str
    seed: int
    variants_per_sentence: int
    total_sentences: int
    per_type: tuple[TypeRobustness, ...]
    overall: float  # macro average over per-type means
    timestamp: str | None = None


@dataclass(frozen=True, slots=True)
class QualityReport:
    translator: str
    profile_tag: str
    seed: int
    sentences: int
    conditions: tuple[tuple[str, BleuScore], ...]  # ("clean", ...), then per type
    timestamp: str | None = None


@dataclass(frozen=True, slots=True)
class SignificanceResult:
    metric: str
    score_a: float
    score_b: float
    p_value: float
    iterations: int
    seed: int

    @property
    def significant(self) -> bool:
        return self.p_value < 0.05


# --- translation plumbing ------------------------------------------------------


def _translate_all(
    translator: Translator, lines: Sequence[str], batch_size: int
) -> list[str]:
    out: list[str] = []
    for start in range(0, len(lines), batch_size):
        chunk = list(lines[start : start + batch_size])
        try:
            result = translator.translate(chunk)
        except TranslatorError as exc:
            raise type(exc)(f"batch starting at sentence {start}: {exc}") from exc
        if len(result) != len(chunk):
            raise TranslatorProtocolError(
                f"batch starting at sentence {start}: got {len(result)}"
                f" translations for {len(chunk)} inputs"
            )
        out.extend(result)
    return out


# --- robustness ----------------------------------------------------------------

_SCORE_STATE: dict = {}


def _score_init(profile: LanguageProfile) -> None:
    _SCORE_STATE["profile"] = profile


def _score_task(task: tuple[str, tuple[str, ...]]) -> float:
    original, variants = task
    return sentence_10nt_ter(original, variants, _SCORE_STATE["profile"])


def evaluate_robustness(
    translator: Translator,
    test_sentences: Sequence[str],
    noise_types: Sequence[NoiseType],
    profile: LanguageProfile,
    lexicon: Lexicon | None = None,
    variants_per_sentence: int = 10,
    seed: int = 0,
    edits_per_sentence: int = 1,
    batch_size: int = 64,
    jobs: int = 1,
    timestamp: str | None = None,
) -> RobustnessReport:
    """Measure 10NT-TER per noise type for one translator.

    Variant j of sentence i under type t is generated with seed
    mix(seed, i, t.code, j).  Variants where noise found no eligible site
    are recorded as no-ops and excluded from the averages; a type where
    every draw no-ops reports a mean of 0.0 over 0 sentences.
    """
    if not test_sentences:
        raise ValueError("test set is empty")
    if variants_per_sentence < 1:
        raise ValueError("variants_per_sentence must be >= 1")
    if not noise_types:
        raise ValueError("need at least one noise type")

    original_translations = _translate_all(translator, test_sentences, batch_size)
    for i, translation in enumerate(original_translations):
        if not tokenize(translation, profile).tokens:
            raise TranslatorProtocolError(
                f"sentence {i}: translator returned an empty translation"
            )
    tokenized = [tokenize(s, profile) for s in test_sentences]

    per_type: list[TypeRobustness] = []
    for nt in noise_types:
        owners: list[int] = []
        variant_texts: list[str] = []
        noops = 0
        for i, sent in enumerate(tokenized):
            for j in range(variants_per_sentence):
                noised = apply_noise(
                    sent, nt, profile, lexicon, mix(seed, i, nt.code, j),
                    edits_per_sentence,
                )
                if noised.is_noop:
                    noops += 1
                else:
                    owners.append(i)
                    variant_texts.append(noised.noised_text)
        translations = _translate_all(translator, variant_texts, batch_size)
        groups: dict[int, list[str]] = {}
        for owner, translation in zip(owners, translations):
            groups.setdefault(owner, []).append(translation)
        tasks = [
            (original_translations[i], tuple(groups[i]))
            for i in sorted(groups)
        ]
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(
                max_workers=jobs, initializer=_score_init, initargs=(profile,)
            ) as pool:
                scores = list(pool.map(_score_task, tasks, chunksize=max(1, len(tasks) // (jobs * 4))))
        else:
            scores = [sentence_10nt_ter(orig, variants, profile) for orig, variants in tasks]
        mean = sum(scores) / len(scores) if scores else 0.0
        per_type.append(TypeRobustness(nt, mean, len(scores), noops))

    overall = sum(t.mean_10nt_ter for t in per_type) / len(per_type)
    return RobustnessReport(
        translator=getattr(translator, "name", type(translator).__name__),
        profile_tag=profile.language_tag,
        seed=seed,
        variants_per_sentence=variants_per_sentence,
        total_sentences=len(test_sentences),
        per_type=tuple(per_type),
        overall=overall,
        timestamp=timestamp,
    )


# --- quality ---------------------------------------------------------------------


def evaluate_quality(
    translator: Translator,
    corpus: ParallelCorpus,
    noise_types: Sequence[NoiseType],
    profile: LanguageProfile,
    lexicon: Lexicon | None = None,
    seed: int = 0,
    edits_per_sentence: int = 1,
    batch_size: int = 64,
    timestamp: str | None = None,
) -> QualityReport:
    """Corpus BLEU under the clean test set and one noised copy per type.

    The noised copy of sentence i under type t uses seed mix(seed, i, t.code, 0),
    matching variant 0 of the robustness evaluation.
    """
    if not len(corpus):
        raise ValueError("test corpus is empty")
    conditions: list[tuple[str, BleuScore]] = []
    clean = _translate_all(translator, corpus.source_lines, batch_size)
    conditions.append(("clean", corpus_bleu(clean, corpus.target_lines, profile)))
    tokenized = [tokenize(s, profile) for s in corpus.source_lines]
    for nt in noise_types:
        noised = [
            apply_noise(
                sent, nt, profile, lexicon, mix(seed, i, nt.code, 0), edits_per_sentence
            ).noised_text
            for i, sent in enumerate(tokenized)
        ]
        translated = _translate_all(translator, noised, batch_size)
        conditions.append(
            (nt.cli_name, corpus_bleu(translated, corpus.target_lines, profile))
        )
    return QualityReport(
        translator=getattr(translator, "name", type(translator).__name__),
        profile_tag=profile.language_tag,
        seed=seed,
        sentences=len(corpus),
        conditions=tuple(conditions),
        timestamp=timestamp,
    )


# --- significance ------------------------------------------------------------------


def paired_bootstrap(
    hyps_a: Sequence[str],
    hyps_b: Sequence[str],
    refs: Sequence[str],
    profile: LanguageProfile,
    iterations: int = 1000,
    seed: int = 0,
) -> SignificanceResult:
    """Paired bootstrap resampling over corpus BLEU.

    Both systems are scored on the same resampled sentence sets; the p-value
    is the fraction of resamples where the globally-lower-scoring system
    scores at least as high as the other.  p < 0.05 reads as a significant
    difference.  Ties in the global scores treat system B as the lower one,
    so comparing a system against itself yields p = 1.0.
    """
    n = len(refs)
    if len(hyps_a) != n or len(hyps_b) != n:
        raise ValueError(
            f"system/reference length mismatch: {len(hyps_a)}, {len(hyps_b)}, {n}"
        )
    if n == 0:
        raise ValueError("empty test set")
    if iterations < 100:
        raise ValueError(f"iterations must be >= 100, got {iterations}")

    ref_tokens = [[t.surface for t in tokenize(r, profile).tokens] for r in refs]
    stats_a = [
        bleu_sentence_stats([t.surface for t in tokenize(h, profile).tokens], rt)
        for h, rt in zip(hyps_a, ref_tokens)
    ]
    stats_b = [
        bleu_sentence_stats([t.surface for t in tokenize(h, profile).tokens], rt)
        for h, rt in zip(hyps_b, ref_tokens)
    ]
    width = len(stats_a[0])

    def corpus_score(stats: list[tuple[int, ...]], indices: Sequence[int]) -> float:
        acc = [0] * width
        for i in indices:
            row = stats[i]
            for k in range(width):
                acc[k] += row[k]
        return bleu_from_stats(acc).score

    everything = range(n)
    score_a = corpus_score(stats_a, everything)
    score_b = corpus_score(stats_b, everything)
    lower_is_a = score_a < score_b

    rng = SplitMix64(seed)
    wins = 0
    for _ in range(iterations):
        indices = [rng.randrange(n) for _ in range(n)]
        sample_a = corpus_score(stats_a, indices)
        sample_b = corpus_score(stats_b, indices)
        low, high = (sample_a, sample_b) if lower_is_a else (sample_b, sample_a)
        if low >= high:
            wins += 1
    return SignificanceResult(
        metric="bleu",
        score_a=score_a,
        score_b=score_b,
        p_value=wins / iterations,
        iterations=iterations,
        seed=seed,
    )
