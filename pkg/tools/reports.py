from dataclasses import asdict
from pathlib import Path
from typing import Dict, List, Sequence, Union

import pandas as pd

from models.data_models import EvaluationReport, LogStatistics
from utils.files import atomic_writer
from utils.metrics import profile_distance


REPORT_COLUMNS = ["dataset", "sampler", "n_pairs", "mean_sdl", "mean_ras", "mae_hours", "order", "alpha", "seed"]
FLOAT_FORMAT = "%.6f"


def report_frame(report: EvaluationReport) -> pd.DataFrame:
    rows = [
        {
            "dataset": report.dataset,
            "sampler": e.policy,
            "n_pairs": e.summary.n_pairs,
            "mean_sdl": e.summary.mean_sdl,
            "mean_ras": e.summary.mean_ras,
            "mae_hours": e.summary.mae_hours,
            "order": report.order,
            "alpha": report.alpha,
            "seed": report.seed,
        }
        for e in report.evaluations
    ]
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    with atomic_writer(path) as f:
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return Path(path)


def write_text(text: str, path: Union[str, Path]) -> Path:
    with atomic_writer(path) as f:
        f.write(text)
    return Path(path)


def markdown_table(frame: pd.DataFrame, float_digits: int = 4) -> str:
    """Column-aligned GitHub markdown table."""

    def cell(value) -> str:
        if isinstance(value, float):
            return f"{value:.{float_digits}f}"
        return str(value)

    header = [str(c) for c in frame.columns]
    body = [[cell(v) for v in row] for row in frame.itertuples(index=False)]
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h) for i, h in enumerate(header)]
    lines = [
        "| " + " | ".join(h.ljust(w) for h, w in zip(header, widths)) + " |",
        "|" + "|".join("-" * (w + 2) for w in widths) + "|",
    ]
    lines.extend("| " + " | ".join(c.ljust(w) for c, w in zip(row, widths)) + " |" for row in body)
    return "\n".join(lines) + "\n"


def ranks_frame(tables: Dict[str, pd.DataFrame]) -> pd.DataFrame:
    """Stack per-metric rank tables into one frame with metric and dataset columns."""
    blocks: List[pd.DataFrame] = []
    for metric, table in tables.items():
        block = table.reset_index(names="dataset")
        block.insert(0, "metric", metric)
        blocks.append(block)
    return pd.concat(blocks, ignore_index=True)


def ranks_markdown(tables: Dict[str, pd.DataFrame]) -> str:
    parts = []
    for metric, table in tables.items():
        parts.append(f"### {metric}\n\n" + markdown_table(table.reset_index(names="dataset")))
    return "\n".join(parts)


def summary_markdown(report: EvaluationReport) -> str:
    rows = [
        {
            "sampler": e.policy,
            "n_pairs": e.summary.n_pairs,
            "mean_sdl": e.summary.mean_sdl,
            "mean_ras": e.summary.mean_ras,
            "mae_hours": e.summary.mae_hours,
            "repetition_l1": profile_distance(e.repetition_profile, report.truth_profile),
        }
        for e in report.evaluations
    ]
    lines = [
        f"# Suffix prediction report: {report.dataset}",
        "",
        f"- n-gram order: {report.order}, alpha: {report.alpha:g}",
        f"- seed: {report.seed}, generation cap: {report.max_steps} steps",
    ]
    if report.search is not None:
        lines.append(f"- random search: {len(report.search.trials)} trials, best validation MAE {report.search.validation_mae:.4f} h")
    lines += ["", markdown_table(pd.DataFrame(rows))]
    lines.append("repetition_l1: L1 distance between the sampler's run-length profile and the ground truth's.")
    return "\n".join(lines) + "\n"


def statistics_frame(name: str, stats: LogStatistics) -> pd.DataFrame:
    return pd.DataFrame([{"dataset": name, **asdict(stats)}])


def write_experiment(
    reports: Sequence[EvaluationReport], tables: Dict[str, pd.DataFrame], out_dir: Union[str, Path]
) -> Dict[str, Path]:
    """One report row per dataset and sampler, ranks across datasets, one summary section per dataset."""
    if not reports:
        raise ValueError("no reports to write")
    out = Path(out_dir)
    frame = pd.concat([report_frame(r) for r in reports], ignore_index=True)
    return {
        "report": write_csv(frame, out / "report.csv"),
        "ranks_csv": write_csv(ranks_frame(tables), out / "ranks.csv"),
        "ranks_md": write_text(ranks_markdown(tables), out / "ranks.md"),
        "summary": write_text("\n".join(summary_markdown(r) for r in reports), out / "summary.md"),
    }
