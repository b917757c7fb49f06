"""Report rendering: JSON, plain-text tables, TSV, and figures.

The eval command drops all four next to each other in the report directory.
Figures are drawn straight on matplotlib Figure objects (no pyplot, no
global state) so library users keep their own backend, and output bytes are
stable for a given input and matplotlib version.
"""

from __future__ import annotations

import json
from typing import Sequence

from .harness import QualityReport, RobustnessReport, SignificanceResult

__all__ = [
    "robustness_to_dict",
    "render_robustness_table",
    "render_robustness_tsv",
    "quality_to_dict",
    "render_quality_table",
    "render_quality_tsv",
    "render_significance",
    "write_robustness_report",
    "write_quality_report",
    "save_robustness_figure",
    "save_quality_figure",
]

_FIGURE_DPI = 120
_PNG_METADATA = {"Software": "mtnoise"}  # fixed so repeated runs are byte-identical


def robustness_to_dict(report: RobustnessReport) -> dict:
    return {
        "metadata": {
            "translator": report.translator,
            "profile": report.profile_tag,
            "seed": report.seed,
            "variants_per_sentence": report.variants_per_sentence,
            "total_sentences": report.total_sentences,
            "averaging": "macro",
            "timestamp": report.timestamp,
        },
        "per_type": [
            {
                "noise_type": row.noise_type.cli_name,
                "mean_10nt_ter": row.mean_10nt_ter,
                "sentences": row.sentences,
                "noops": row.noops,
            }
            for row in report.per_type
        ],
        "overall": report.overall,
    }


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = []
    for row in [header] + rows:
        cells = [row[0].ljust(widths[0])]
        cells += [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def render_robustness_table(reports: Sequence[RobustnessReport]) -> str:
    """One row per system, one column per noise type, plus the macro average."""
    if not reports:
        raise ValueError("no reports to render")
    types = [row.noise_type.cli_name for row in reports[0].per_type]
    header = ["system"] + types + ["overall"]
    rows = []
    for report in reports:
        by_name = {row.noise_type.cli_name: row for row in report.per_type}
        cells = [report.translator]
        cells += [f"{by_name[t].mean_10nt_ter:.4f}" for t in types]
        cells.append(f"{report.overall:.4f}")
        rows.append(cells)
    return _table(header, rows)


def render_robustness_tsv(report: RobustnessReport) -> str:
    lines = ["noise_type\tmean_10nt_ter\tsentences\tnoops"]
    for row in report.per_type:
        lines.append(
            f"{row.noise_type.cli_name}\t{row.mean_10nt_ter!r}\t{row.sentences}\t{row.noops}"
        )
    lines.append(f"overall\t{report.overall!r}\t{report.total_sentences}\t")
    return "\n".join(lines) + "\n"


def quality_to_dict(report: QualityReport) -> dict:
    return {
        "metadata": {
            "translator": report.translator,
            "profile": report.profile_tag,
            "seed": report.seed,
            "sentences": report.sentences,
            "timestamp": report.timestamp,
        },
        "conditions": [
            {
                "condition": name,
                "bleu": score.score,
                "precisions": list(score.precisions),
                "brevity_penalty": score.brevity_penalty,
                "hyp_length": score.hyp_length,
                "ref_length": score.ref_length,
            }
            for name, score in report.conditions
        ],
    }


def render_quality_table(reports: Sequence[QualityReport]) -> str:
    """One row per system, one BLEU column per test condition."""
    if not reports:
        raise ValueError("no reports to render")
    conditions = [name for name, _ in reports[0].conditions]
    header = ["system"] + conditions
    rows = []
    for report in reports:
        by_name = dict(report.conditions)
        rows.append(
            [report.translator] + [f"{by_name[c].score:.4f}" for c in conditions]
        )
    return _table(header, rows)


def render_quality_tsv(report: QualityReport) -> str:
    lines = ["condition\tbleu\tbrevity_penalty\thyp_length\tref_length"]
    for name, score in report.conditions:
        lines.append(
            f"{name}\t{score.score!r}\t{score.brevity_penalty!r}"
            f"\t{score.hyp_length}\t{score.ref_length}"
        )
    return "\n".join(lines) + "\n"


def render_significance(result: SignificanceResult) -> str:
    verdict = "significant" if result.significant else "not significant"
    return (
        f"metric: {result.metric}\n"
        f"score_a: {result.score_a:.6f}\n"
        f"score_b: {result.score_b:.6f}\n"
        f"p_value: {result.p_value:.6f}\n"
        f"iterations: {result.iterations}\n"
        f"seed: {result.seed}\n"
        f"verdict: {verdict} at p < 0.05\n"
    )


# --- figures -----------------------------------------------------------------


def _bar_figure(labels: list[str], values: list[float], title: str, ylabel: str):
    from matplotlib.figure import Figure

    fig = Figure(figsize=(max(6.0, 0.9 * len(labels) + 2.0), 4.0), dpi=_FIGURE_DPI)
    ax = fig.subplots()
    ax.bar(range(len(labels)), values, color="#4878a8")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(axis="y", linewidth=0.3, alpha=0.5)
    fig.tight_layout()
    return fig


def save_robustness_figure(report: RobustnessReport, path: str) -> None:
    labels = [row.noise_type.cli_name for row in report.per_type]
    values = [row.mean_10nt_ter for row in report.per_type]
    fig = _bar_figure(
        labels, values,
        f"10NT-TER by noise type ({report.translator}, {report.profile_tag})",
        "mean 10NT-TER",
    )
    fig.savefig(path, format="png", metadata=_PNG_METADATA)


def save_quality_figure(report: QualityReport, path: str) -> None:
    labels = [name for name, _ in report.conditions]
    values = [score.score for _, score in report.conditions]
    fig = _bar_figure(
        labels, values,
        f"BLEU by test condition ({report.translator}, {report.profile_tag})",
        "corpus BLEU",
    )
    fig.savefig(path, format="png", metadata=_PNG_METADATA)


# --- file bundles ---------------------------------------------------------------


def _write_text(path: str, content: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def write_robustness_report(
    report: RobustnessReport, out_dir: str, basename: str = "robustness",
    figures: bool = True,
) -> list[str]:
    """Write <basename>.{json,txt,tsv,png} into out_dir; returns the paths."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    paths = []
    json_path = os.path.join(out_dir, f"{basename}.json")
    _write_json(json_path, robustness_to_dict(report))
    paths.append(json_path)
    txt_path = os.path.join(out_dir, f"{basename}.txt")
    _write_text(txt_path, render_robustness_table([report]))
    paths.append(txt_path)
    tsv_path = os.path.join(out_dir, f"{basename}.tsv")
    _write_text(tsv_path, render_robustness_tsv(report))
    paths.append(tsv_path)
    if figures:
        png_path = os.path.join(out_dir, f"{basename}.png")
        save_robustness_figure(report, png_path)
        paths.append(png_path)
    return paths


def write_quality_report(
    report: QualityReport, out_dir: str, basename: str = "bleu",
    figures: bool = True,
) -> list[str]:
    import os

    os.makedirs(out_dir, exist_ok=True)
    paths = []
    json_path = os.path.join(out_dir, f"{basename}.json")
    _write_json(json_path, quality_to_dict(report))
    paths.append(json_path)
    txt_path = os.path.join(out_dir, f"{basename}.txt")
    _write_text(txt_path, render_quality_table([report]))
    paths.append(txt_path)
    tsv_path = os.path.join(out_dir, f"{basename}.tsv")
    _write_text(tsv_path, render_quality_tsv(report))
    paths.append(tsv_path)
    if figures:
        png_path = os.path.join(out_dir, f"{basename}.png")
        save_quality_figure(report, png_path)
        paths.append(png_path)
    return paths
