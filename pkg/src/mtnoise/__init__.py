"""Noise injection and robustness evaluation for machine translation corpora.

The package has three layers:

- generation: ten character/punctuation noise types applied to tokenized
  sentences (`noise`, `text`),
- corpus building: 1-to-1 upsampling and equal-proportion mixing of a
  parallel corpus with noised copies (`augment`),
- evaluation: reference-free robustness via noised-translation TER,
  corpus BLEU, and paired bootstrap significance (`metrics`, `harness`,
  `report`).
"""

from .augment import (
    AugmentPlan,
    ParallelCorpus,
    augment_manifest,
    equal_mix_assignment,
    mix_equal_proportion,
    noise_lines,
    read_parallel,
    upsample_one_to_one,
    write_manifest,
    write_parallel,
)
from .harness import (
    ConstantTranslator,
    HttpTranslator,
    IdentityTranslator,
    QualityReport,
    RobustnessReport,
    SignificanceResult,
    SubprocessTranslator,
    Translator,
    TranslatorError,
    TranslatorProtocolError,
    TypeRobustness,
    evaluate_quality,
    evaluate_robustness,
    http_translator,
    paired_bootstrap,
    parse_translator_spec,
    subprocess_translator,
)
from .lineio import InputError, read_lines, write_lines
from .metrics import (
    BleuScore,
    TerScore,
    bleu_from_stats,
    bleu_sentence_stats,
    corpus_bleu,
    sentence_10nt_ter,
    ter,
    word_edit_distance,
)
from .noise import (
    PRODUCTIVE_NOISE_TYPES,
    EditRecord,
    NoisedSentence,
    NoiseType,
    add_comma,
    add_diacritic,
    apply_noise,
    confuse_letter,
    delete_letter,
    insert_letter,
    latinize,
    permute_letters,
    phonetic_latinize,
    remove_punctuation,
    replay_edits,
    sample_substitute,
)
from .report import (
    render_quality_table,
    render_quality_tsv,
    render_robustness_table,
    render_robustness_tsv,
    render_significance,
    write_quality_report,
    write_robustness_report,
)
from .rng import SplitMix64, mix
from .text import (
    LanguageProfile,
    Lexicon,
    LexiconError,
    ProfileError,
    Sentence,
    Token,
    TokenKind,
    build_lexicon,
    bundled_profile,
    bundled_profile_tags,
    detokenize,
    ed1_neighbors,
    load_lexicon,
    load_profile,
    load_profile_file,
    save_lexicon,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentPlan",
    "BleuScore",
    "ConstantTranslator",
    "EditRecord",
    "HttpTranslator",
    "IdentityTranslator",
    "InputError",
    "LanguageProfile",
    "Lexicon",
    "LexiconError",
    "NoiseType",
    "NoisedSentence",
    "PRODUCTIVE_NOISE_TYPES",
    "ParallelCorpus",
    "ProfileError",
    "QualityReport",
    "RobustnessReport",
    "Sentence",
    "SignificanceResult",
    "SplitMix64",
    "SubprocessTranslator",
    "TerScore",
    "Token",
    "TokenKind",
    "Translator",
    "TranslatorError",
    "TranslatorProtocolError",
    "TypeRobustness",
    "add_comma",
    "add_diacritic",
    "apply_noise",
    "augment_manifest",
    "bleu_from_stats",
    "bleu_sentence_stats",
    "build_lexicon",
    "bundled_profile",
    "bundled_profile_tags",
    "confuse_letter",
    "corpus_bleu",
    "delete_letter",
    "detokenize",
    "ed1_neighbors",
    "equal_mix_assignment",
    "evaluate_quality",
    "evaluate_robustness",
    "http_translator",
    "insert_letter",
    "latinize",
    "load_lexicon",
    "load_profile",
    "load_profile_file",
    "mix",
    "mix_equal_proportion",
    "noise_lines",
    "paired_bootstrap",
    "parse_translator_spec",
    "permute_letters",
    "phonetic_latinize",
    "read_lines",
    "read_parallel",
    "remove_punctuation",
    "render_quality_table",
    "render_quality_tsv",
    "render_robustness_table",
    "render_robustness_tsv",
    "render_significance",
    "replay_edits",
    "sample_substitute",
    "save_lexicon",
    "sentence_10nt_ter",
    "ter",
    "tokenize",
    "upsample_one_to_one",
    "word_edit_distance",
    "write_lines",
    "write_manifest",
    "write_parallel",
    "write_quality_report",
    "write_robustness_report",
]
