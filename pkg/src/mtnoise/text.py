"""Text model: tokenization, language profiles, and frequency lexicons.

Everything downstream (noise kernels, metrics, augmentation) works on the
types defined here.  Text is NFC-normalized once at ingestion; tokens carry
their source spans and the inter-token whitespace is kept verbatim so that
``detokenize(tokenize(s))`` reproduces the input exactly.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable, Mapping, Sequence

__all__ = [
    "TokenKind",
    "Token",
    "Sentence",
    "LanguageProfile",
    "Lexicon",
    "ProfileError",
    "LexiconError",
    "tokenize",
    "detokenize",
    "rebuild_sentence",
    "load_profile",
    "load_profile_file",
    "bundled_profile",
    "bundled_profile_tags",
    "build_lexicon",
    "load_lexicon",
    "save_lexicon",
    "ed1_neighbors",
    "recase",
]

BUNDLED_PROFILE_TAGS = ("lv", "lt", "et", "en")


class ProfileError(ValueError):
    """Raised when a language profile document is malformed or inconsistent."""


class LexiconError(ValueError):
    """Raised when a lexicon file or entry is malformed."""


class TokenKind(Enum):
    WORD = "word"
    PUNCTUATION = "punctuation"
    NUMBER = "number"
    OTHER = "other"


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    kind: TokenKind
    char_span: tuple[int, int]


@dataclass(frozen=True, slots=True)
class Sentence:
    """An immutable tokenized sentence.

    ``joiners`` has one more element than ``tokens``: joiners[i] is the
    whitespace before token i, joiners[-1] the trailing whitespace.  The raw
    text is always the strict alternation joiner/token/joiner/...
    """

    raw: str
    tokens: tuple[Token, ...]
    joiners: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.joiners) != len(self.tokens) + 1:
            raise ValueError(
                f"expected {len(self.tokens) + 1} joiners, got {len(self.joiners)}"
            )

    def word_indices(self) -> list[int]:
        return [i for i, t in enumerate(self.tokens) if t.kind is TokenKind.WORD]


@dataclass(frozen=True, slots=True)
class LanguageProfile:
    """Per-language data driving the noise kernels.

    alphabet keeps the order of the profile document: insertion sampling
    indexes into it, so the order is part of the deterministic contract.
    """

    language_tag: str
    alphabet: str
    diacritic_variants: Mapping[str, tuple[str, ...]]
    latinize_map: Mapping[str, str]
    phonetic_map: Mapping[str, str]
    keyboard_adjacency: Mapping[str, str]
    punctuation: frozenset[str]
    comma: str = ","

    def __contains__(self, letter: str) -> bool:
        return letter in self.alphabet


@dataclass
class Lexicon:
    """Case-folded word frequencies plus a lazily built deletion index.

    The deletion index maps every entry and every one-character deletion of
    an entry to the entries it came from; it makes distance-1 neighbor lookup
    symmetric and alphabet-independent.  The caches are write-once per key,
    so concurrent readers need no locking.
    """

    entries: dict[str, int]
    _del1_index: dict[str, list[str]] | None = field(default=None, repr=False)
    _neighbor_cache: dict[str, tuple[str, ...]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for word, count in self.entries.items():
            if not word or any(ch.isspace() for ch in word):
                raise LexiconError(f"invalid lexicon entry {word!r}")
            if count < 1:
                raise LexiconError(f"non-positive count for {word!r}: {count}")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def count(self, word: str) -> int:
        return self.entries.get(word, 0)

    def deletion_index(self) -> dict[str, list[str]]:
        if self._del1_index is None:
            index: dict[str, list[str]] = {}
            for entry in self.entries:
                index.setdefault(entry, []).append(entry)
                for i in range(len(entry)):
                    index.setdefault(entry[:i] + entry[i + 1 :], []).append(entry)
            self._del1_index = index
        return self._del1_index


# --- tokenization ---------------------------------------------------------

_NONSPACE = re.compile(r"\S+")


def tokenize(text: str, profile: LanguageProfile) -> Sentence:
    """Split NFC-normalized text into word/punctuation/number/other tokens.

    Contiguous letters form a word token, contiguous digits a number token;
    each profile punctuation character is its own token; runs of anything
    else are "other".  Total over all inputs: never raises.
    """
    raw = unicodedata.normalize("NFC", text)
    tokens: list[Token] = []
    joiners: list[str] = []
    punct = profile.punctuation
    prev_end = 0
    for m in _NONSPACE.finditer(raw):
        chunk = m.group()
        start = m.start()
        # fast paths for the two most common chunk shapes
        if chunk.isalpha():
            joiners.append(raw[prev_end:start])
            tokens.append(Token(chunk, TokenKind.WORD, (start, m.end())))
            prev_end = m.end()
            continue
        i = 0
        n = len(chunk)
        while i < n:
            ch = chunk[i]
            begin = i
            if ch in punct:
                i += 1
                kind = TokenKind.PUNCTUATION
            elif ch.isalpha():
                while i < n and chunk[i].isalpha() and chunk[i] not in punct:
                    i += 1
                kind = TokenKind.WORD
            elif ch.isdigit():
                while i < n and chunk[i].isdigit() and chunk[i] not in punct:
                    i += 1
                kind = TokenKind.NUMBER
            else:
                while i < n and not (
                    chunk[i].isalpha() or chunk[i].isdigit() or chunk[i] in punct
                ):
                    i += 1
                kind = TokenKind.OTHER
            abs_start = start + begin
            joiners.append(raw[prev_end:abs_start])
            tokens.append(Token(chunk[begin:i], kind, (abs_start, start + i)))
            prev_end = start + i
    joiners.append(raw[prev_end:])
    return Sentence(raw, tuple(tokens), tuple(joiners))


def detokenize(sentence: Sentence) -> str:
    """Rebuild the text by alternating stored joiners and token surfaces."""
    parts: list[str] = []
    for joiner, token in zip(sentence.joiners, sentence.tokens):
        parts.append(joiner)
        parts.append(token.surface)
    parts.append(sentence.joiners[-1])
    return "".join(parts)


def rebuild_sentence(
    surfaces: Sequence[str],
    kinds: Sequence[TokenKind],
    joiners: Sequence[str],
) -> Sentence:
    """Construct a Sentence from edited pieces, recomputing spans and raw text."""
    if len(joiners) != len(surfaces) + 1:
        raise ValueError("joiner count must be token count + 1")
    parts: list[str] = []
    tokens: list[Token] = []
    pos = 0
    for surface, kind, joiner in zip(surfaces, kinds, joiners):
        parts.append(joiner)
        pos += len(joiner)
        tokens.append(Token(surface, kind, (pos, pos + len(surface))))
        parts.append(surface)
        pos += len(surface)
    parts.append(joiners[-1])
    return Sentence("".join(parts), tuple(tokens), tuple(joiners))


# --- language profiles ----------------------------------------------------

_REQUIRED_PROFILE_KEYS = (
    "language_tag",
    "alphabet",
    "diacritic_variants",
    "latinize_map",
    "phonetic_map",
    "keyboard_adjacency",
    "punctuation",
)


def load_profile(document: bytes | str) -> LanguageProfile:
    """Parse and validate a profile JSON document.

    Raises ProfileError naming the offending key on any inconsistency:
    mapping keys outside the alphabet, diacritic variants that do not
    latinize back to their base, adjacency lists containing the key itself,
    or replacement values whose characters re-enter the same map (which
    would break idempotence of latinize / phonetic latinize).
    """
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        data = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ProfileError(f"profile is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ProfileError("profile document must be a JSON object")
    for key in _REQUIRED_PROFILE_KEYS:
        if key not in data:
            raise ProfileError(f"profile missing required key {key!r}")

    nfc = lambda s: unicodedata.normalize("NFC", s)
    tag = data["language_tag"]
    alphabet = nfc(data["alphabet"])
    if not alphabet:
        raise ProfileError("alphabet: must not be empty")
    if len(set(alphabet)) != len(alphabet):
        raise ProfileError("alphabet: contains duplicate letters")
    for ch in alphabet:
        if ch != ch.lower() or not ch.isalpha():
            raise ProfileError(f"alphabet: {ch!r} is not a lowercase letter")
    alpha_set = set(alphabet)

    def str_map(key: str) -> dict[str, str]:
        raw = data[key]
        if not isinstance(raw, dict):
            raise ProfileError(f"{key}: must be an object")
        return {nfc(k): nfc(v) for k, v in raw.items()}

    latinize_map = str_map("latinize_map")
    phonetic_map = str_map("phonetic_map")
    for name, mapping in (("latinize_map", latinize_map), ("phonetic_map", phonetic_map)):
        for k, v in mapping.items():
            if k not in alpha_set:
                raise ProfileError(f"{name}: key {k!r} not in alphabet")
            if not v:
                raise ProfileError(f"{name}: empty replacement for {k!r}")
            for ch in v:
                if ch in mapping:
                    raise ProfileError(
                        f"{name}: replacement {v!r} for {k!r} contains key {ch!r}"
                        " (idempotence would break)"
                    )

    variants_raw = data["diacritic_variants"]
    if not isinstance(variants_raw, dict):
        raise ProfileError("diacritic_variants: must be an object")
    diacritic_variants: dict[str, tuple[str, ...]] = {}
    for base, variants in variants_raw.items():
        base = nfc(base)
        if base in latinize_map:
            raise ProfileError(f"diacritic_variants: key {base!r} is not a base letter")
        if not isinstance(variants, list) or not variants:
            raise ProfileError(f"diacritic_variants: {base!r} needs a non-empty list")
        vs = tuple(nfc(v) for v in variants)
        for v in vs:
            if latinize_map.get(v) != base:
                raise ProfileError(
                    f"diacritic_variants: {v!r} does not latinize back to {base!r}"
                )
        diacritic_variants[base] = vs

    adjacency_raw = data["keyboard_adjacency"]
    if not isinstance(adjacency_raw, dict):
        raise ProfileError("keyboard_adjacency: must be an object")
    keyboard_adjacency: dict[str, str] = {}
    for key, values in adjacency_raw.items():
        key = nfc(key)
        values = nfc(values)
        if key in values:
            raise ProfileError(f"keyboard_adjacency: {key!r} lists itself as neighbor")
        keyboard_adjacency[key] = values

    punctuation = nfc(data["punctuation"])
    for ch in punctuation:
        if ch.isalpha() or ch.isdigit() or ch.isspace():
            raise ProfileError(f"punctuation: {ch!r} is a letter, digit, or space")
    comma = nfc(data.get("comma", ","))
    if comma not in punctuation:
        raise ProfileError(f"comma: {comma!r} not in punctuation set")

    return LanguageProfile(
        language_tag=tag,
        alphabet=alphabet,
        diacritic_variants=diacritic_variants,
        latinize_map=latinize_map,
        phonetic_map=phonetic_map,
        keyboard_adjacency=keyboard_adjacency,
        punctuation=frozenset(punctuation),
        comma=comma,
    )


def load_profile_file(path: str) -> LanguageProfile:
    with open(path, "rb") as fh:
        return load_profile(fh.read())


def bundled_profile(tag: str) -> LanguageProfile:
    """Load one of the profiles shipped with the package (lv, lt, et, en)."""
    if tag not in BUNDLED_PROFILE_TAGS:
        raise ProfileError(
            f"unknown bundled profile {tag!r}; available: {', '.join(BUNDLED_PROFILE_TAGS)}"
        )
    doc = resources.files("mtnoise").joinpath(f"profiles/{tag}.json").read_bytes()
    return load_profile(doc)


def bundled_profile_tags() -> tuple[str, ...]:
    return BUNDLED_PROFILE_TAGS


# --- lexicon --------------------------------------------------------------


def build_lexicon(
    lines: Iterable[str], profile: LanguageProfile, min_count: int = 2
) -> Lexicon:
    """Count case-folded word tokens and keep those seen >= min_count times.

    Entries are stored in descending-count order (ties lexicographic) so
    that iteration and serialization are deterministic.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    counts: dict[str, int] = {}
    for line in lines:
        for token in tokenize(line, profile).tokens:
            if token.kind is TokenKind.WORD:
                folded = token.surface.casefold()
                counts[folded] = counts.get(folded, 0) + 1
    kept = {w: c for w, c in counts.items() if c >= min_count}
    ordered = dict(sorted(kept.items(), key=lambda item: (-item[1], item[0])))
    return Lexicon(ordered)


def load_lexicon(path: str) -> Lexicon:
    """Read a word<TAB>count lexicon file (UTF-8, one entry per line)."""
    entries: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise LexiconError(f"{path}:{lineno}: expected word<TAB>count")
            word, count_text = parts
            try:
                count = int(count_text)
            except ValueError as exc:
                raise LexiconError(f"{path}:{lineno}: bad count {count_text!r}") from exc
            if count < 1:
                raise LexiconError(f"{path}:{lineno}: non-positive count {count}")
            entries[unicodedata.normalize("NFC", word)] = count
    return Lexicon(entries)


def save_lexicon(lexicon: Lexicon, path: str) -> None:
    rows = sorted(lexicon.entries.items(), key=lambda item: (-item[1], item[0]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for word, count in rows:
            fh.write(f"{word}\t{count}\n")


def _distance_is_one(a: str, b: str) -> bool:
    """True iff Damerau-Levenshtein distance (adjacent transpositions) == 1."""
    la, lb = len(a), len(b)
    if a == b:
        return False
    if la == lb:
        diffs = [i for i in range(la) if a[i] != b[i]]
        if len(diffs) == 1:
            return True
        if len(diffs) == 2:
            i, j = diffs
            return j == i + 1 and a[i] == b[j] and a[j] == b[i]
        return False
    if la > lb:
        a, b, la, lb = b, a, lb, la
    if lb - la != 1:
        return False
    # b must be a with one character inserted
    i = 0
    while i < la and a[i] == b[i]:
        i += 1
    return a[i:] == b[i + 1 :]


def ed1_neighbors(
    word: str, lexicon: Lexicon, profile: LanguageProfile
) -> tuple[str, ...]:
    """Lexicon entries at Damerau-Levenshtein distance exactly 1 from ``word``.

    Matching is case-folded and NFC; the word itself is excluded.  Results
    are ordered by descending count, ties broken lexicographically.  The
    profile fixes the normalization conventions; candidates come from the
    lexicon's deletion index, so letters outside the alphabet still match.
    """
    folded = unicodedata.normalize("NFC", word).casefold()
    cached = lexicon._neighbor_cache.get(folded)
    if cached is not None:
        return cached
    index = lexicon.deletion_index()
    seen: set[str] = set()
    for probe in _probes(folded):
        for entry in index.get(probe, ()):
            if entry not in seen and _distance_is_one(folded, entry):
                seen.add(entry)
    ordered = tuple(sorted(seen, key=lambda w: (-lexicon.entries[w], w)))
    lexicon._neighbor_cache[folded] = ordered
    return ordered


def _probes(word: str) -> Iterable[str]:
    yield word
    for i in range(len(word)):
        yield word[:i] + word[i + 1 :]


def recase(original: str, replacement: str) -> str:
    """Re-case a lowercase replacement to the original word's pattern.

    All-caps words stay all-caps; an initial capital is preserved; anything
    else passes through unchanged.
    """
    if not original or not replacement:
        return replacement
    if original.isupper() and len(original) > 1:
        return replacement.upper()
    if original[0].isupper():
        return replacement[0].upper() + replacement[1:]
    return replacement
