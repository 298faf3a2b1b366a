"""
Tests for attack queries, calibration, amplification and simulation runs.
"""

import numpy as np
import pytest

from nsec3_encloser.config.profiles import THEORETICAL_CEILING
from nsec3_encloser.core.names import parse_name
from nsec3_encloser.models.sim_models import QueryKind, QueueDiscipline, RampSchedule, SimConfig
from nsec3_encloser.models.validation_models import ValidationStatus
from nsec3_encloser.services.attack_harness import (
    SweepAxis,
    amplification_report,
    attack_hash_cost,
    attack_query_cost,
    build_attack_qname,
    calibrate,
    max_filler_labels,
    measure_block_time,
    reference_hash_blocks,
    run_parameter_sweep,
    simulate,
    sweep_rows,
)
from nsec3_encloser.utils.exceptions import ConfigurationError, QnameConstructionError

REFERENCE_BLOCKS = 87788
UNSALTED_BLOCKS = 17724

SHORT_RAMP = RampSchedule(start_delay=2.0, step_interval=2.0, rate_delta=50.0, max_rate=150.0, duration=6.0)


@pytest.fixture
def sim_config():
    return SimConfig(attack=SHORT_RAMP, tail=2.0)


def test_attack_qname_fills_255_bytes(origin, rng):
    """Test the longest attack name and its random label"""
    assert max_filler_labels(origin) == 113
    qname = build_attack_qname(origin, rng)
    assert qname.wire_len == 255
    assert qname.labels[:113] == (b"a",) * 113
    assert len(qname.labels[113]) == 4
    assert qname.labels[114:] == origin.labels


def test_attack_qname_label_count(origin, rng):
    assert len(build_attack_qname(origin, rng, filler_labels=0)) == len(origin) + 1
    with pytest.raises(QnameConstructionError):
        build_attack_qname(origin, rng, filler_labels=114)


def test_attack_qname_needs_room(rng):
    """Test an origin near the length limit cannot host an attack name"""
    long_origin = parse_name(".".join(["x" * 61] * 4))
    with pytest.raises(QnameConstructionError):
        build_attack_qname(long_origin, rng)


def test_attack_qname_is_seeded(origin):
    """Test equal seeds give equal random labels"""
    first = build_attack_qname(origin, np.random.default_rng(5))
    assert first == build_attack_qname(origin, np.random.default_rng(5))


def test_reference_cost():
    """Test the reference attack costs 87,788 compression blocks"""
    assert reference_hash_blocks(SimConfig()) == REFERENCE_BLOCKS
    blocks, candidates, evaluations, status = attack_hash_cost(SimConfig())
    assert (blocks, candidates, evaluations) == (REFERENCE_BLOCKS, 115, 116)
    assert status == ValidationStatus.PROVEN_NONEXISTENT.value


def test_unsalted_cost():
    """Test the same attack without salt costs 17,724 blocks"""
    blocks, _, _, _ = attack_hash_cost(SimConfig(salt_length=0))
    assert blocks == UNSALTED_BLOCKS


def test_over_limit_attack_costs_nothing():
    """Test 165 iterations are refused before hashing"""
    cost = attack_query_cost(SimConfig(iterations=165))
    assert cost.status == ValidationStatus.BOGUS.value
    assert cost.hash_blocks == 0
    assert cost.total_blocks == cost.overhead_blocks


def test_calibration():
    """Test calibration reproduces the profile factor and saturation rate"""
    cfg = calibrate(SimConfig())
    assert cfg.calibrated
    assert cfg.benign_service_blocks == pytest.approx(REFERENCE_BLOCKS / 71)
    assert cfg.attack_overhead_blocks == cfg.benign_service_blocks
    attack_service = (cfg.attack_overhead_blocks + REFERENCE_BLOCKS) * cfg.block_time
    benign_load = cfg.benign_rate * cfg.benign_service_blocks * cfg.block_time
    assert cfg.saturation_rate * attack_service + benign_load == pytest.approx(1.0)
    assert attack_service == pytest.approx(7.865e-3, rel=1e-3)
    assert calibrate(cfg) is cfg


def test_calibration_keeps_explicit_values():
    cfg = calibrate(SimConfig(benign_service_blocks=1000.0, attack_overhead_blocks=0.0, block_time=1e-7))
    assert (cfg.benign_service_blocks, cfg.attack_overhead_blocks, cfg.block_time) == (1000.0, 0.0, 1e-7)


def test_amplification_report():
    """Test labels and salt factors of the reference attack"""
    report = amplification_report(SimConfig())
    assert report.labels_factor == 114
    assert report.salt_factor == pytest.approx(REFERENCE_BLOCKS / UNSALTED_BLOCKS)
    assert report.salt_factor == pytest.approx(4.953, abs=1e-3)
    assert report.block_amplification == pytest.approx(564.6, abs=0.1)
    assert 0.8 * THEORETICAL_CEILING <= report.block_amplification <= THEORETICAL_CEILING
    assert report.instruction_factor == pytest.approx(72.0)
    assert report.prediction.blocks_cached == REFERENCE_BLOCKS
    assert report.to_dict()["ceiling"] == 625


@pytest.mark.parametrize("profile,factor", [("bind", 41.0), ("knot", 13.0)])
def test_amplification_per_profile(profile, factor):
    assert amplification_report(SimConfig(profile=profile)).instruction_factor == pytest.approx(factor)


def test_simulation_conserves_benign_queries(sim_config):
    """Test every benign query is served, lost or still in flight"""
    report = simulate(sim_config)
    assert report.benign_served + report.benign_lost + report.benign_in_flight == report.benign_arrivals
    assert report.attack_arrivals == 2 * 50 + 2 * 100 + 2 * 150
    assert len(report.utilization) == 10
    assert all(0.0 <= u <= 1.0 for u in report.utilization)
    assert [s.rate for s in report.step_samples] == [50.0, 100.0, 150.0]


def test_simulation_is_deterministic(sim_config):
    """Test equal seeds give identical runs"""
    first, second = simulate(sim_config), simulate(sim_config)
    assert first.summary() == second.summary()
    assert [q.finish for q in first.queries] == [q.finish for q in second.queries]
    other = simulate(sim_config.model_copy(update={"seed": 1}))
    assert [q.arrival for q in other.queries] != [q.arrival for q in first.queries]


def test_simulation_saturates_at_top_rate(sim_config):
    """Test utilization climbs with the ramp and saturates at 150/s"""
    samples = simulate(sim_config).step_samples
    assert samples[0].utilization < samples[1].utilization < samples[2].utilization
    assert samples[0].utilization == pytest.approx(0.4, abs=0.02)
    assert samples[2].utilization > 0.99


def test_no_attack_no_loss():
    """Test benign traffic alone is never lost"""
    cfg = SimConfig(attack=RampSchedule.constant(0.0, duration=20.0), tail=0.0)
    report = simulate(cfg)
    assert report.attack_arrivals == 0
    assert report.benign_lost == 0
    assert report.adjusted_loss_rate == 0.0


def test_zero_tail_counts_stale_backlog_as_lost():
    """Test benign queries still queued past their deadline at the horizon are lost, not in flight"""
    cfg = SimConfig(attack=RampSchedule.constant(150.0, start_delay=2.0, duration=40.0), tail=0.0)
    report = simulate(cfg)
    horizon = cfg.horizon
    benign = [job for job in report.queries if job.kind == QueryKind.BENIGN]
    stale = [job for job in benign if job.finish is None and horizon - job.arrival > cfg.timeout]
    assert stale
    assert all(job.lost for job in stale)
    assert report.benign_lost == sum(1 for job in benign if job.lost)
    assert report.benign_in_flight == sum(1 for job in benign if job.finish is None and not job.lost)
    assert all(horizon - job.arrival <= cfg.timeout for job in benign if job.finish is None and not job.lost)

def test_processor_sharing_run(sim_config):
    report = simulate(sim_config.model_copy(update={"discipline": QueueDiscipline.PROCESSOR_SHARING}))
    assert report.benign_served + report.benign_lost + report.benign_in_flight == report.benign_arrivals


def test_iteration_sweep(sim_config):
    """Test utilization grows with iterations at every step"""
    reports = run_parameter_sweep(sim_config, SweepAxis.ITERATIONS, [0, 50, 100, 150])
    per_value = [[s.utilization for s in report.step_samples] for report in reports]
    assert all(a[0] < b[0] for a, b in zip(per_value, per_value[1:]))
    for step in range(3):
        column = [values[step] for values in per_value]
        assert column == sorted(column)


def test_sweep_pins_calibration(sim_config):
    """Test swept configs share the base calibration"""
    reports = run_parameter_sweep(sim_config, "salt", [0, 255])
    assert reports[0].config.block_time == reports[1].config.block_time
    assert reports[0].attack_cost.hash_blocks < reports[1].attack_cost.hash_blocks


def test_key_size_sweep_is_flat(sim_config):
    """Test key size leaves hashing cost and utilization unchanged"""
    reports = run_parameter_sweep(sim_config, SweepAxis.KEY_SIZE, [1024, 2048, 4096])
    curves = {tuple(s.utilization for s in report.step_samples) for report in reports}
    assert len(curves) == 1


def test_sweep_rejects_out_of_range(sim_config):
    with pytest.raises(ConfigurationError):
        run_parameter_sweep(sim_config, SweepAxis.ITERATIONS, [70000])


def test_sweep_rows(sim_config):
    """Test one row per value and step"""
    reports = run_parameter_sweep(sim_config, SweepAxis.ITERATIONS, [0, 150])
    rows = sweep_rows(reports, SweepAxis.ITERATIONS)
    assert len(rows) == 6
    assert rows[0]["axis"] == "iterations"
    assert [row["value"] for row in rows] == [0, 0, 0, 150, 150, 150]
    assert set(rows[0]) == {"axis", "value", "step", "rate", "utilization", "adjusted_loss_rate"}


def test_measure_block_time():
    assert 0.0 < measure_block_time(samples=1000) < 1e-3
