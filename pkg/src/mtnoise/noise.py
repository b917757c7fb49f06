"""Ten orthographic and punctuation noise models for MT source text.

Word-level kernels (insert/delete/permute/confuse/add_diacritic) are pure
string functions; sentence-level kernels work on the Sentence type and keep
spacing lossless.  ``apply_noise`` is the seeded sampler on top: it picks an
eligible token, then an eligible site, applies the kernel, and records an
edit trail that ``replay_edits`` can re-run to reproduce the output.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .rng import SplitMix64
from .text import (
    LanguageProfile,
    Lexicon,
    Sentence,
    TokenKind,
    detokenize,
    ed1_neighbors,
    rebuild_sentence,
    recase,
)

__all__ = [
    "NoiseType",
    "EditRecord",
    "NoisedSentence",
    "PRODUCTIVE_NOISE_TYPES",
    "insert_letter",
    "delete_letter",
    "permute_letters",
    "confuse_letter",
    "add_diacritic",
    "sample_substitute",
    "remove_punctuation",
    "add_comma",
    "latinize",
    "phonetic_latinize",
    "apply_noise",
    "replay_edits",
]


class NoiseType(Enum):
    """The ten noise models, with stable integer codes used in seeds."""

    EXTRA_LETTER = 1
    DELETE_LETTER = 2
    PERMUTE_LETTERS = 3
    CONFUSE_LETTERS = 4
    ADD_DIACRITIC = 5
    SAMPLE_SUBSTITUTE = 6
    REMOVE_PUNCT = 7
    ADD_COMMA = 8
    LATINIZE = 9
    PHONETIC_LATINIZE = 10

    @property
    def code(self) -> int:
        return self.value

    @property
    def cli_name(self) -> str:
        return _CLI_NAMES[self]

    @classmethod
    def from_cli_name(cls, name: str) -> "NoiseType":
        try:
            return _CLI_LOOKUP[name]
        except KeyError:
            valid = ", ".join(sorted(_CLI_LOOKUP))
            raise ValueError(f"unknown noise type {name!r}; expected one of: {valid}")


_CLI_NAMES = {
    NoiseType.EXTRA_LETTER: "extra-letter",
    NoiseType.DELETE_LETTER: "delete-letter",
    NoiseType.PERMUTE_LETTERS: "permute-letters",
    NoiseType.CONFUSE_LETTERS: "confuse-letters",
    NoiseType.ADD_DIACRITIC: "add-diacritic",
    NoiseType.SAMPLE_SUBSTITUTE: "sample-substitute",
    NoiseType.REMOVE_PUNCT: "remove-punct",
    NoiseType.ADD_COMMA: "add-comma",
    NoiseType.LATINIZE: "latinize",
    NoiseType.PHONETIC_LATINIZE: "phonetic-latinize",
}
_CLI_LOOKUP = {name: nt for nt, name in _CLI_NAMES.items()}

# The seven types kept for corpus augmentation: deletions, insertions and
# comma addition are dropped because they destroy information or add noise a
# reader would not produce systematically.
PRODUCTIVE_NOISE_TYPES = (
    NoiseType.PERMUTE_LETTERS,
    NoiseType.CONFUSE_LETTERS,
    NoiseType.ADD_DIACRITIC,
    NoiseType.SAMPLE_SUBSTITUTE,
    NoiseType.REMOVE_PUNCT,
    NoiseType.LATINIZE,
    NoiseType.PHONETIC_LATINIZE,
)

_SENTENCE_LEVEL = frozenset(
    {NoiseType.REMOVE_PUNCT, NoiseType.LATINIZE, NoiseType.PHONETIC_LATINIZE}
)


@dataclass(frozen=True, slots=True)
class EditRecord:
    """One applied edit; enough to replay it against the pre-edit sentence.

    Positions are relative to the sentence state at application time, so a
    sequence of records replays front to back.  Sentence-level types
    (remove-punct, latinize, phonetic-latinize) are deterministic and carry
    no positions.
    """

    noise_type: NoiseType
    token_index: int | None = None
    char_position: int | None = None
    inserted: str = ""
    removed: str = ""
    replacement: str = ""


@dataclass(frozen=True, slots=True)
class NoisedSentence:
    original: Sentence
    noised_text: str
    edits: tuple[EditRecord, ...]
    seed: int

    @property
    def is_noop(self) -> bool:
        return not self.edits


# --- word-level kernels ----------------------------------------------------


def insert_letter(word: str, pos: int, letter: str) -> str:
    if not 0 <= pos <= len(word):
        raise ValueError(f"insert position {pos} out of range for {word!r}")
    return word[:pos] + letter + word[pos:]


def delete_letter(word: str, pos: int) -> str:
    if len(word) < 2:
        raise ValueError(f"cannot delete from {word!r}: need at least 2 letters")
    if not 0 <= pos < len(word):
        raise ValueError(f"delete position {pos} out of range for {word!r}")
    return word[:pos] + word[pos + 1 :]


def permute_letters(word: str, pos: int) -> str:
    """Swap the adjacent characters at pos and pos+1."""
    if len(word) < 2:
        raise ValueError(f"cannot permute {word!r}: need at least 2 letters")
    if not 0 <= pos < len(word) - 1:
        raise ValueError(f"permute position {pos} out of range for {word!r}")
    return word[:pos] + word[pos + 1] + word[pos] + word[pos + 2 :]


def confuse_letter(
    word: str, pos: int, adjacency_choice: int, profile: LanguageProfile
) -> str:
    """Replace the letter at pos with a keyboard neighbor, preserving case."""
    if not 0 <= pos < len(word):
        raise ValueError(f"confuse position {pos} out of range for {word!r}")
    ch = word[pos]
    neighbors = profile.keyboard_adjacency.get(ch.lower(), "")
    if not neighbors:
        raise ValueError(f"no keyboard neighbors for {ch!r}")
    if not 0 <= adjacency_choice < len(neighbors):
        raise ValueError(f"adjacency choice {adjacency_choice} out of range for {ch!r}")
    new = neighbors[adjacency_choice]
    if ch.isupper():
        new = new.upper()
    return word[:pos] + new + word[pos + 1 :]


def add_diacritic(
    word: str, pos: int, variant_choice: int, profile: LanguageProfile
) -> str:
    """Turn the base letter at pos into one of its diacritic variants."""
    if not 0 <= pos < len(word):
        raise ValueError(f"diacritic position {pos} out of range for {word!r}")
    ch = word[pos]
    variants = profile.diacritic_variants.get(ch.lower(), ())
    if not variants:
        raise ValueError(f"{ch!r} has no diacritic variants")
    if not 0 <= variant_choice < len(variants):
        raise ValueError(f"variant choice {variant_choice} out of range for {ch!r}")
    new = variants[variant_choice]
    if ch.isupper():
        new = new.upper()
    return word[:pos] + new + word[pos + 1 :]


# --- sentence-level kernels -------------------------------------------------


def sample_substitute(
    sentence: Sentence,
    token_index: int,
    replacement: str,
    lexicon: Lexicon,
    profile: LanguageProfile,
) -> Sentence:
    """Swap a word for a lexicon form at edit distance 1, re-cased."""
    token = sentence.tokens[token_index]
    if token.kind is not TokenKind.WORD:
        raise ValueError(f"token {token_index} ({token.surface!r}) is not a word")
    if replacement not in ed1_neighbors(token.surface, lexicon, profile):
        raise ValueError(
            f"{replacement!r} is not a distance-1 lexicon neighbor of {token.surface!r}"
        )
    return _replace_surface(sentence, token_index, recase(token.surface, replacement))


def remove_punctuation(sentence: Sentence) -> Sentence:
    """Drop all punctuation tokens; spacing collapses to single spaces.

    Where punctuation vanished between two kept tokens the joiner becomes a
    single space; leading and trailing whitespace is preserved.  A sentence
    without punctuation is returned unchanged (same object).
    """
    kept = [i for i, t in enumerate(sentence.tokens) if t.kind is not TokenKind.PUNCTUATION]
    if len(kept) == len(sentence.tokens):
        return sentence
    if not kept:
        return rebuild_sentence([], [], [sentence.joiners[0] + sentence.joiners[-1]])
    surfaces = [sentence.tokens[i].surface for i in kept]
    kinds = [sentence.tokens[i].kind for i in kept]
    joiners = [sentence.joiners[0]]
    for prev, cur in zip(kept, kept[1:]):
        joiners.append(" " if cur - prev > 1 else sentence.joiners[cur])
    joiners.append(sentence.joiners[-1])
    return rebuild_sentence(surfaces, kinds, joiners)


def add_comma(sentence: Sentence, gap_index: int, comma: str = ",") -> Sentence:
    """Insert a comma after the gap_index-th word token.

    The comma attaches to the word (no space before) and takes over the
    joiner that followed the word, so "Zeme" becomes "Zeme," and
    "Balta jura" becomes "Balta, jura" for gap 0.
    """
    words = sentence.word_indices()
    if not 0 <= gap_index < len(words):
        raise ValueError(f"gap index {gap_index} out of range ({len(words)} words)")
    at = words[gap_index] + 1
    if at < len(sentence.tokens) and sentence.tokens[at].surface == comma:
        raise ValueError(f"token after word gap {gap_index} is already a comma")
    surfaces = [t.surface for t in sentence.tokens]
    kinds = [t.kind for t in sentence.tokens]
    joiners = list(sentence.joiners)
    surfaces.insert(at, comma)
    kinds.insert(at, TokenKind.PUNCTUATION)
    joiners.insert(at, "")
    return rebuild_sentence(surfaces, kinds, joiners)


def latinize(sentence: Sentence, profile: LanguageProfile) -> Sentence:
    """Strip diacritics via the profile's latinize map, preserving case."""
    return _map_chars(sentence, profile.latinize_map)


def phonetic_latinize(sentence: Sentence, profile: LanguageProfile) -> Sentence:
    """Replace diacritic letters with ascii digraphs (e.g. ū -> uu, ļ -> lj).

    Multi-character replacements inherit the case of the replaced letter on
    their first character only, so "Šī" becomes "Shii".
    """
    return _map_chars(sentence, profile.phonetic_map)


def _map_chars(sentence: Sentence, mapping) -> Sentence:
    if not mapping:
        return sentence
    changed = False
    surfaces = []
    for token in sentence.tokens:
        out = []
        for ch in token.surface:
            rep = mapping.get(ch.lower())
            if rep is None:
                out.append(ch)
            else:
                changed = True
                if ch.isupper():
                    rep = rep[0].upper() + rep[1:]
                out.append(rep)
        surfaces.append("".join(out))
    if not changed:
        return sentence
    kinds = [t.kind for t in sentence.tokens]
    return rebuild_sentence(surfaces, kinds, list(sentence.joiners))


def _replace_surface(sentence: Sentence, token_index: int, new_surface: str) -> Sentence:
    surfaces = [t.surface for t in sentence.tokens]
    kinds = [t.kind for t in sentence.tokens]
    surfaces[token_index] = new_surface
    return rebuild_sentence(surfaces, kinds, list(sentence.joiners))


# --- seeded sampler ---------------------------------------------------------


def apply_noise(
    sentence: Sentence,
    noise_type: NoiseType,
    profile: LanguageProfile,
    lexicon: Lexicon | None = None,
    seed: int = 0,
    edits_per_sentence: int = 1,
) -> NoisedSentence:
    """Apply one noise model to a sentence, driven entirely by ``seed``.

    Draw order per edit (documented because it is part of the deterministic
    contract): eligible token uniformly, then position, then candidate.  If
    no eligible site exists the sentence is returned unchanged with an empty
    edit list; ``edits`` is empty if and only if the text is unchanged.
    """
    if noise_type is NoiseType.SAMPLE_SUBSTITUTE and lexicon is None:
        raise ValueError("sample-substitute requires a lexicon")
    if edits_per_sentence < 1:
        raise ValueError(f"edits_per_sentence must be >= 1, got {edits_per_sentence}")

    if noise_type in _SENTENCE_LEVEL:
        if noise_type is NoiseType.REMOVE_PUNCT:
            result = remove_punctuation(sentence)
        elif noise_type is NoiseType.LATINIZE:
            result = latinize(sentence, profile)
        else:
            result = phonetic_latinize(sentence, profile)
        text = detokenize(result)
        if text == sentence.raw:
            return NoisedSentence(sentence, sentence.raw, (), seed)
        return NoisedSentence(sentence, text, (EditRecord(noise_type),), seed)

    rng = SplitMix64(seed)
    current = sentence
    edits: list[EditRecord] = []
    for _ in range(edits_per_sentence):
        applied = _apply_one(current, noise_type, profile, lexicon, rng)
        if applied is None:
            break
        record, current = applied
        edits.append(record)
    text = detokenize(current)
    if text == sentence.raw:
        # possible when later edits cancel earlier ones (e.g. double swap)
        return NoisedSentence(sentence, sentence.raw, (), seed)
    return NoisedSentence(sentence, text, tuple(edits), seed)


def _apply_one(
    sentence: Sentence,
    noise_type: NoiseType,
    profile: LanguageProfile,
    lexicon: Lexicon | None,
    rng: SplitMix64,
):
    if noise_type is NoiseType.ADD_COMMA:
        gaps = _comma_gaps(sentence, profile.comma)
        if not gaps:
            return None
        gap = rng.choice(gaps)
        at = sentence.word_indices()[gap] + 1
        record = EditRecord(noise_type, token_index=at, inserted=profile.comma)
        return record, add_comma(sentence, gap, profile.comma)

    if noise_type is NoiseType.SAMPLE_SUBSTITUTE:
        eligible = [
            i
            for i in sentence.word_indices()
            if ed1_neighbors(sentence.tokens[i].surface, lexicon, profile)
        ]
        if not eligible:
            return None
        ti = rng.choice(eligible)
        surface = sentence.tokens[ti].surface
        replacement = rng.choice(ed1_neighbors(surface, lexicon, profile))
        record = EditRecord(
            noise_type,
            token_index=ti,
            removed=surface,
            replacement=recase(surface, replacement),
        )
        return record, _replace_surface(sentence, ti, record.replacement)

    eligible = _eligible_letter_tokens(sentence, noise_type, profile)
    if not eligible:
        return None
    ti = rng.choice(eligible)
    word = sentence.tokens[ti].surface

    if noise_type is NoiseType.EXTRA_LETTER:
        pos = rng.randrange(len(word) + 1)
        letter = profile.alphabet[rng.randrange(len(profile.alphabet))]
        record = EditRecord(noise_type, ti, pos, inserted=letter)
        return record, _replace_surface(sentence, ti, insert_letter(word, pos, letter))

    if noise_type is NoiseType.DELETE_LETTER:
        pos = rng.randrange(len(word))
        record = EditRecord(noise_type, ti, pos, removed=word[pos])
        return record, _replace_surface(sentence, ti, delete_letter(word, pos))

    if noise_type is NoiseType.PERMUTE_LETTERS:
        positions = [p for p in range(len(word) - 1) if word[p] != word[p + 1]]
        pos = rng.choice(positions)
        new_word = permute_letters(word, pos)
        record = EditRecord(
            noise_type, ti, pos,
            removed=word[pos : pos + 2],
            inserted=new_word[pos : pos + 2],
        )
        return record, _replace_surface(sentence, ti, new_word)

    if noise_type is NoiseType.CONFUSE_LETTERS:
        adjacency = profile.keyboard_adjacency
        positions = [p for p, ch in enumerate(word) if adjacency.get(ch.lower())]
        pos = rng.choice(positions)
        choice = rng.randrange(len(adjacency[word[pos].lower()]))
        new_word = confuse_letter(word, pos, choice, profile)
        record = EditRecord(
            noise_type, ti, pos, removed=word[pos], replacement=new_word[pos]
        )
        return record, _replace_surface(sentence, ti, new_word)

    if noise_type is NoiseType.ADD_DIACRITIC:
        variants = profile.diacritic_variants
        positions = [p for p, ch in enumerate(word) if variants.get(ch.lower())]
        pos = rng.choice(positions)
        choice = rng.randrange(len(variants[word[pos].lower()]))
        new_word = add_diacritic(word, pos, choice, profile)
        record = EditRecord(
            noise_type, ti, pos, removed=word[pos], replacement=new_word[pos]
        )
        return record, _replace_surface(sentence, ti, new_word)

    raise ValueError(f"unhandled noise type {noise_type}")


def _eligible_letter_tokens(
    sentence: Sentence, noise_type: NoiseType, profile: LanguageProfile
) -> list[int]:
    """Word tokens a letter-level kernel can act on.

    Length >= 2 except for insertion (>= 1): deleting from a single letter
    would empty the token and permuting it is degenerate.
    """
    min_len = 1 if noise_type is NoiseType.EXTRA_LETTER else 2
    out = []
    for i, token in enumerate(sentence.tokens):
        if token.kind is not TokenKind.WORD or len(token.surface) < min_len:
            continue
        word = token.surface
        if noise_type is NoiseType.PERMUTE_LETTERS:
            if all(word[p] == word[p + 1] for p in range(len(word) - 1)):
                continue
        elif noise_type is NoiseType.CONFUSE_LETTERS:
            if not any(profile.keyboard_adjacency.get(ch.lower()) for ch in word):
                continue
        elif noise_type is NoiseType.ADD_DIACRITIC:
            if not any(profile.diacritic_variants.get(ch.lower()) for ch in word):
                continue
        out.append(i)
    return out


def _comma_gaps(sentence: Sentence, comma: str) -> list[int]:
    gaps = []
    for g, ti in enumerate(sentence.word_indices()):
        nxt = ti + 1
        if nxt < len(sentence.tokens) and sentence.tokens[nxt].surface == comma:
            continue
        gaps.append(g)
    return gaps


# --- replay -----------------------------------------------------------------


def replay_edits(
    original: Sentence,
    edits: Sequence[EditRecord],
    profile: LanguageProfile,
) -> str:
    """Re-run an edit trail against the original sentence.

    For any NoisedSentence produced by apply_noise,
    ``replay_edits(ns.original, ns.edits, profile) == ns.noised_text``.
    """
    current = original
    for e in edits:
        if e.noise_type is NoiseType.REMOVE_PUNCT:
            current = remove_punctuation(current)
        elif e.noise_type is NoiseType.LATINIZE:
            current = latinize(current, profile)
        elif e.noise_type is NoiseType.PHONETIC_LATINIZE:
            current = phonetic_latinize(current, profile)
        elif e.noise_type is NoiseType.ADD_COMMA:
            surfaces = [t.surface for t in current.tokens]
            kinds = [t.kind for t in current.tokens]
            joiners = list(current.joiners)
            surfaces.insert(e.token_index, e.inserted)
            kinds.insert(e.token_index, TokenKind.PUNCTUATION)
            joiners.insert(e.token_index, "")
            current = rebuild_sentence(surfaces, kinds, joiners)
        elif e.noise_type is NoiseType.SAMPLE_SUBSTITUTE:
            current = _replace_surface(current, e.token_index, e.replacement)
        else:
            word = current.tokens[e.token_index].surface
            pos = e.char_position
            if e.noise_type is NoiseType.EXTRA_LETTER:
                new_word = insert_letter(word, pos, e.inserted)
            elif e.noise_type is NoiseType.DELETE_LETTER:
                new_word = delete_letter(word, pos)
            elif e.noise_type is NoiseType.PERMUTE_LETTERS:
                new_word = permute_letters(word, pos)
            else:  # confuse or diacritic: single-char replacement at pos
                new_word = word[:pos] + e.replacement + word[pos + 1 :]
            current = _replace_surface(current, e.token_index, new_word)
    return detokenize(current)
