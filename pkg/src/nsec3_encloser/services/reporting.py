"""CSV and JSON artifacts for simulations, sweeps and loss tables."""

import json
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

import pandas as pd

from ..models.sim_models import SimReport
from ..utils.exceptions import DatasetError

logger = logging.getLogger(__name__)

TIMESERIES_COLUMNS = ["second", "utilization", "attack_rate"]
QUERY_COLUMNS = ["query_id", "kind", "arrival", "service_time", "start", "finish", "dropped", "lost"]
STEP_COLUMNS = ["step", "start", "end", "rate", "utilization"]
SWEEP_COLUMNS = ["axis", "value", "step", "rate", "utilization", "adjusted_loss_rate"]
LOSS_COLUMNS = ["profile", "rate", "total_loss_rate", "adjusted_loss_rate"]


def _frame(rows: Sequence[Dict[str, object]], columns: List[str]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=columns)


def _write_csv(frame: pd.DataFrame, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format="%.9g", lineterminator="\n")
    except OSError as exc:
        raise DatasetError(f"Cannot write {path}: {exc}") from exc
    return path


def timeseries_frame(report: SimReport) -> pd.DataFrame:
    rows = [
        {"second": second, "utilization": utilization, "attack_rate": rate}
        for second, (utilization, (_, rate)) in enumerate(zip(report.utilization, report.attack_rate_trace))
    ]
    return _frame(rows, TIMESERIES_COLUMNS)


def queries_frame(report: SimReport) -> pd.DataFrame:
    rows = [
        {
            "query_id": job.query_id,
            "kind": job.kind.value,
            "arrival": job.arrival,
            "service_time": job.service_time,
            "start": job.start,
            "finish": job.finish,
            "dropped": job.dropped,
            "lost": job.lost,
        }
        for job in report.queries
    ]
    return _frame(rows, QUERY_COLUMNS)


def export_report(report: SimReport, out_dir: Union[str, Path]) -> List[Path]:
    """Write ``timeseries.csv``, ``queries.csv``, ``steps.csv`` and ``summary.json``.

    Column order is fixed; a run without queries still gets header rows.
    """
    out_path = Path(out_dir)
    steps = [
        {"step": s.step, "start": s.start, "end": s.end, "rate": s.rate, "utilization": s.utilization}
        for s in report.step_samples
    ]
    written = [
        _write_csv(timeseries_frame(report), out_path / "timeseries.csv"),
        _write_csv(queries_frame(report), out_path / "queries.csv"),
        _write_csv(_frame(steps, STEP_COLUMNS), out_path / "steps.csv"),
    ]
    summary_path = out_path / "summary.json"
    try:
        summary_path.write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"Cannot write {summary_path}: {exc}") from exc
    written.append(summary_path)
    logger.info(f"Wrote simulation report to {out_path}")
    return written


def export_sweep(rows: Sequence[Dict[str, object]], path: Union[str, Path]) -> Path:
    """One row per (axis, value, rate step)."""
    written = _write_csv(_frame(rows, SWEEP_COLUMNS), Path(path))
    logger.info(f"Wrote {len(rows)} sweep rows to {written}")
    return written


def export_loss_table(rows: Sequence[Dict[str, object]], path: Union[str, Path]) -> Path:
    return _write_csv(_frame(rows, LOSS_COLUMNS), Path(path))


def load_sweep(path: Union[str, Path]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError) as exc:
        raise DatasetError(f"Cannot read sweep CSV {path}: {exc}") from exc
    missing = [column for column in SWEEP_COLUMNS if column not in frame.columns]
    if missing:
        raise DatasetError(f"Sweep CSV {path} lacks columns {missing}")
    return frame
