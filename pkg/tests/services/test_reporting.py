"""Tests for CSV and JSON report artifacts"""

import importlib.util
import json
from pathlib import Path

import pandas as pd
import pytest

from nsec3_encloser.models.sim_models import RampSchedule, SimConfig
from nsec3_encloser.services.attack_harness import SweepAxis, run_parameter_sweep, simulate, sweep_rows
from nsec3_encloser.services.reporting import (
    LOSS_COLUMNS,
    QUERY_COLUMNS,
    STEP_COLUMNS,
    SWEEP_COLUMNS,
    TIMESERIES_COLUMNS,
    export_loss_table,
    export_report,
    export_sweep,
    load_sweep,
)
from nsec3_encloser.utils.exceptions import DatasetError

GOLDEN_SWEEP = Path(__file__).parents[1] / "data" / "sweep_iterations.golden.csv"


@pytest.fixture
def small_config():
    ramp = RampSchedule(start_delay=1.0, step_interval=1.0, rate_delta=20.0, max_rate=40.0, duration=2.0)
    return SimConfig(attack=ramp, tail=1.0)


def test_export_report(small_config, output_dir):
    """Test the four report files and their columns"""
    report = simulate(small_config)
    paths = export_report(report, output_dir / "run")
    assert [p.name for p in paths] == ["timeseries.csv", "queries.csv", "steps.csv", "summary.json"]

    timeseries = pd.read_csv(paths[0])
    assert list(timeseries.columns) == TIMESERIES_COLUMNS
    assert len(timeseries) == 4
    assert list(pd.read_csv(paths[1]).columns) == QUERY_COLUMNS
    assert len(pd.read_csv(paths[1])) == len(report.queries)
    assert list(pd.read_csv(paths[2]).columns) == STEP_COLUMNS

    summary = json.loads(paths[3].read_text(encoding="utf-8"))
    assert summary["benign_arrivals"] == report.benign_arrivals
    assert summary["attack_status"] == "ProvenNonexistent"


def test_reports_are_byte_identical(small_config, output_dir):
    """Test equal seeds give byte-identical files"""
    first = export_report(simulate(small_config), output_dir / "a")
    second = export_report(simulate(small_config), output_dir / "b")
    for left, right in zip(first, second):
        assert left.read_bytes() == right.read_bytes()


def test_empty_tables_keep_headers(output_dir):
    """Test empty sweeps and loss tables still get a header row"""
    sweep = export_sweep([], output_dir / "sweep.csv")
    assert sweep.read_text(encoding="utf-8") == ",".join(SWEEP_COLUMNS) + "\n"
    loss = export_loss_table([], output_dir / "loss.csv")
    assert loss.read_text(encoding="utf-8") == ",".join(LOSS_COLUMNS) + "\n"


def test_sweep_round_trip(small_config, output_dir):
    """Test sweep rows reload with their columns"""
    reports = run_parameter_sweep(small_config, SweepAxis.ITERATIONS, [0, 150])
    path = export_sweep(sweep_rows(reports, SweepAxis.ITERATIONS), output_dir / "sweep.csv")
    frame = load_sweep(path)
    assert list(frame.columns) == SWEEP_COLUMNS
    assert sorted(frame["value"].unique()) == [0, 150]


def test_sweep_matches_golden(small_config, output_dir):
    """Test the iteration sweep reproduces the committed curve"""
    golden = load_sweep(GOLDEN_SWEEP)
    reports = run_parameter_sweep(small_config, SweepAxis.ITERATIONS, [0, 150])
    frame = load_sweep(export_sweep(sweep_rows(reports, SweepAxis.ITERATIONS), output_dir / "sweep.csv"))

    keys = ["axis", "value", "step", "rate"]
    pd.testing.assert_frame_equal(frame[keys], golden[keys], check_dtype=False)
    assert frame["utilization"].to_numpy() == pytest.approx(golden["utilization"].to_numpy(), abs=0.01)
    assert (frame["adjusted_loss_rate"] == 0).all()


def test_golden_sweep_rewrites_identically(output_dir):
    """Test reloading and exporting the committed sweep keeps its bytes"""
    rows = load_sweep(GOLDEN_SWEEP).to_dict("records")
    path = export_sweep(rows, output_dir / "sweep.csv")
    assert path.read_bytes() == GOLDEN_SWEEP.read_bytes()


def test_plot_sweep_traces_golden():
    """Test the plot script draws one utilisation curve per swept value"""
    script = Path(__file__).parents[2] / "scripts" / "plot_sweep.py"
    spec = importlib.util.spec_from_file_location("plot_sweep", script)
    plot_sweep = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(plot_sweep)

    figure = plot_sweep.build_figure(load_sweep(GOLDEN_SWEEP))
    assert [trace.name for trace in figure.data] == ["iterations=0", "iterations=150"]
    assert list(figure.data[1].x) == [20, 40]
    assert list(figure.data[1].y) == pytest.approx([15.84, 31.57])


def test_load_sweep_errors(output_dir):
    """Test missing files and columns are dataset errors"""
    with pytest.raises(DatasetError):
        load_sweep(output_dir / "missing.csv")
    bad = output_dir / "bad.csv"
    bad.write_text("axis,value\niterations,0\n", encoding="utf-8")
    with pytest.raises(DatasetError):
        load_sweep(bad)


def test_write_failure_is_dataset_error(output_dir):
    blocker = output_dir / "file"
    blocker.write_text("x", encoding="utf-8")
    with pytest.raises(DatasetError):
        export_sweep([], blocker / "sweep.csv")
