import json
import os

import pytest

from mtnoise.harness import (
    ConstantTranslator,
    IdentityTranslator,
    evaluate_quality,
    evaluate_robustness,
    paired_bootstrap,
)
from mtnoise.noise import NoiseType
from mtnoise.report import (
    quality_to_dict,
    render_quality_table,
    render_quality_tsv,
    render_robustness_table,
    render_robustness_tsv,
    render_significance,
    robustness_to_dict,
    write_quality_report,
    write_robustness_report,
)

TYPES = (NoiseType.PERMUTE_LETTERS, NoiseType.LATINIZE)


@pytest.fixture(scope="module")
def robustness(fixture_sources, lv, fixture_lexicon):
    return evaluate_robustness(
        IdentityTranslator(), fixture_sources[:6], TYPES, lv, fixture_lexicon,
        variants_per_sentence=3, seed=4, timestamp="2026-01-02T03:04:05Z",
    )


@pytest.fixture(scope="module")
def quality(fixture_corpus, lv, fixture_lexicon):
    return evaluate_quality(
        IdentityTranslator(), fixture_corpus, TYPES, lv, fixture_lexicon, seed=4,
    )


def test_robustness_dict_structure(robustness):
    d = robustness_to_dict(robustness)
    assert d["metadata"]["translator"] == "identity"
    assert d["metadata"]["profile"] == "lv"
    assert d["metadata"]["seed"] == 4
    assert d["metadata"]["timestamp"] == "2026-01-02T03:04:05Z"
    assert [row["noise_type"] for row in d["per_type"]] == [
        "permute-letters", "latinize",
    ]
    for row in d["per_type"]:
        assert set(row) == {"noise_type", "mean_10nt_ter", "sentences", "noops"}
    assert d["overall"] == robustness.overall
    json.dumps(d)  # serializable


def test_robustness_table_layout(robustness):
    table = render_robustness_table([robustness])
    lines = table.splitlines()
    assert lines[0].split() == ["system", "permute-letters", "latinize", "overall"]
    assert lines[1].split()[0] == "identity"
    assert lines[1].split()[-1] == f"{robustness.overall:.4f}"
    assert table.endswith("\n")


def test_robustness_table_multiple_systems(robustness):
    table = render_robustness_table([robustness, robustness])
    assert len(table.splitlines()) == 3
    with pytest.raises(ValueError):
        render_robustness_table([])


def test_robustness_tsv_full_precision(robustness):
    tsv = render_robustness_tsv(robustness)
    lines = tsv.splitlines()
    assert lines[0] == "noise_type\tmean_10nt_ter\tsentences\tnoops"
    row = lines[1].split("\t")
    assert row[0] == "permute-letters"
    # repr round-trips the exact float
    assert float(row[1]) == robustness.per_type[0].mean_10nt_ter
    assert lines[-1].startswith("overall\t")


def test_quality_dict_and_tsv(quality):
    d = quality_to_dict(quality)
    assert [c["condition"] for c in d["conditions"]] == [
        "clean", "permute-letters", "latinize",
    ]
    assert len(d["conditions"][0]["precisions"]) == 4
    tsv = render_quality_tsv(quality)
    assert tsv.splitlines()[0] == "condition\tbleu\tbrevity_penalty\thyp_length\tref_length"
    assert len(tsv.splitlines()) == 4


def test_quality_table(quality):
    table = render_quality_table([quality])
    lines = table.splitlines()
    assert lines[0].split() == ["system", "clean", "permute-letters", "latinize"]
    assert lines[1].split()[0] == "identity"


def test_significance_rendering(lv):
    refs = [f"teikums numur {i} šeit" for i in range(20)]
    result = paired_bootstrap(refs, refs, refs, lv, iterations=100, seed=3)
    text = render_significance(result)
    assert "metric: bleu" in text
    assert "p_value: 1.000000" in text
    assert "verdict: not significant at p < 0.05" in text
    assert "iterations: 100" in text


def test_robustness_bundle_files(robustness, tmp_path):
    out = str(tmp_path / "reports")
    paths = write_robustness_report(robustness, out)
    assert [os.path.basename(p) for p in paths] == [
        "robustness.json", "robustness.txt", "robustness.tsv", "robustness.png",
    ]
    for p in paths:
        assert os.path.getsize(p) > 0
    with open(paths[0], encoding="utf-8") as fh:
        assert json.load(fh) == robustness_to_dict(robustness)
    with open(paths[3], "rb") as fh:
        assert fh.read(8) == b"\x89PNG\r\n\x1a\n"


def test_robustness_bundle_without_figures(robustness, tmp_path):
    paths = write_robustness_report(robustness, str(tmp_path), figures=False)
    assert [os.path.basename(p) for p in paths] == [
        "robustness.json", "robustness.txt", "robustness.tsv",
    ]


def test_quality_bundle_files(quality, tmp_path):
    paths = write_quality_report(quality, str(tmp_path))
    assert [os.path.basename(p) for p in paths] == [
        "bleu.json", "bleu.txt", "bleu.tsv", "bleu.png",
    ]


def test_png_bytes_stable_across_renders(robustness, tmp_path):
    write_robustness_report(robustness, str(tmp_path / "a"))
    write_robustness_report(robustness, str(tmp_path / "b"))
    with open(tmp_path / "a" / "robustness.png", "rb") as fh:
        first = fh.read()
    with open(tmp_path / "b" / "robustness.png", "rb") as fh:
        second = fh.read()
    assert first == second


def test_text_outputs_use_unix_newlines(robustness, tmp_path):
    paths = write_robustness_report(robustness, str(tmp_path), figures=False)
    for p in paths:
        with open(p, "rb") as fh:
            assert b"\r" not in fh.read()
