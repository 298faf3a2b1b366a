"""
Attack queries, resolver cost calibration, simulations and sweeps.

All randomness derives from ``SimConfig.seed`` through a numpy
SeedSequence: separate child streams feed arrival phases, query labels and
zone salts, so configs that differ in one parameter share arrival times.
"""

import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ..config.profiles import THEORETICAL_CEILING, instruction_factor, policy_for
from ..core.names import DomainName
from ..core.nsec3 import Nsec3Params
from ..models.response_models import NegativeResponse
from ..models.sim_models import (
    AmplificationReport,
    AttackCost,
    QueryKind,
    RampSchedule,
    SimConfig,
    SimReport,
    StepSample,
)
from ..models.validation_models import ValidationStatus, ValidatorPolicy
from ..models.zone_models import ZoneConfig
from ..utils.exceptions import ConfigurationError, InvariantViolation, QnameConstructionError
from .auth_sim import answer_query
from .signers import TestSigner
from .simulation import attack_arrival_times, busy_between, fixed_rate_times, run_queue
from .validator import predict_discovery_cost, validate_denial
from .zone_forge import build_with_retries, sign_zone

logger = logging.getLogger(__name__)

RANDOM_LABEL_LEN = 4
_LABEL_ALPHABET = np.array(list("abcdefghijklmnopqrstuvwxyz0123456789"))
_MAX_QNAME_WIRE = 255


class SweepAxis(str, Enum):
    ITERATIONS = "iterations"
    SALT = "salt"
    KEY_SIZE = "key_size"

    @property
    def config_field(self) -> str:
        return {"iterations": "iterations", "salt": "salt_length", "key_size": "key_size_bits"}[self.value]


def max_filler_labels(origin: DomainName) -> int:
    """Single-byte labels that fit alongside a 4-byte random label under ``origin``."""
    return (_MAX_QNAME_WIRE - origin.wire_len - (RANDOM_LABEL_LEN + 1)) // 2


def build_attack_qname(
    zone_origin: DomainName,
    rng: np.random.Generator,
    filler_labels: Optional[int] = None
) -> DomainName:
    """``a.`` repeated k times, a fresh random 4-byte label, then the zone origin.

    k defaults to the largest count keeping the name within 255 wire bytes.

    Raises:
        QnameConstructionError: the origin leaves no room for the labels.
    """
    if zone_origin.wire_len > _MAX_QNAME_WIRE - 10:
        raise QnameConstructionError(
            f"Origin {zone_origin} ({zone_origin.wire_len} bytes) leaves no room for attack labels",
            details={"wire_len": zone_origin.wire_len},
        )
    limit = max_filler_labels(zone_origin)
    k = limit if filler_labels is None else filler_labels
    if not 0 <= k <= limit:
        raise QnameConstructionError(f"filler_labels {k} outside 0..{limit} for {zone_origin}")
    random_label = "".join(rng.choice(_LABEL_ALPHABET, size=RANDOM_LABEL_LEN)).encode("ascii")
    return DomainName((b"a",) * k + (random_label,) + zone_origin.labels)


def _seed_streams(seed: int) -> Dict[str, np.random.Generator]:
    phases, labels, salts = np.random.SeedSequence(seed).spawn(3)
    return {
        "phases": np.random.default_rng(phases),
        "labels": np.random.default_rng(labels),
        "salts": np.random.default_rng(salts),
    }


def _policy(cfg: SimConfig) -> ValidatorPolicy:
    return cfg.policy if cfg.policy is not None else policy_for(cfg.profile)


@lru_cache(maxsize=256)
def _attack_cost(
    origin: DomainName,
    iterations: int,
    salt_length: int,
    key_size_bits: int,
    policy_json: str,
    filler_labels: Optional[int],
    seed: int
) -> Tuple[int, int, int, str]:
    streams = _seed_streams(seed)
    zone_cfg = ZoneConfig(
        origin=origin,
        iterations=iterations,
        salt=streams["salts"].bytes(salt_length),
        key_size_bits=key_size_bits,
    )
    zone = sign_zone(build_with_retries(zone_cfg, seed=seed), TestSigner(seed=seed))
    qname = build_attack_qname(origin, streams["labels"], filler_labels)
    response = answer_query(zone, qname, "A")
    if not isinstance(response, NegativeResponse):
        raise InvariantViolation(f"Attack query {qname} was answered positively")
    policy = ValidatorPolicy.model_validate_json(policy_json)
    outcome = validate_denial(qname, response, zone.params, policy, key_size_bits=key_size_bits)
    return (
        outcome.meter.compression_blocks,
        outcome.candidates_hashed,
        outcome.meter.chain_evaluations,
        outcome.status.value,
    )


def attack_hash_cost(
    cfg: SimConfig,
    iterations: Optional[int] = None,
    salt_length: Optional[int] = None,
    policy: Optional[ValidatorPolicy] = None
) -> Tuple[int, int, int, str]:
    """(hash blocks, candidates, chain evaluations, status) of one attack query validation."""
    policy = policy or _policy(cfg)
    return _attack_cost(
        cfg.origin,
        cfg.iterations if iterations is None else iterations,
        cfg.salt_length if salt_length is None else salt_length,
        cfg.key_size_bits,
        policy.model_dump_json(),
        cfg.filler_labels,
        cfg.seed,
    )


def reference_hash_blocks(cfg: SimConfig) -> int:
    """Hash blocks of the reference attack, ignoring the iteration limit."""
    policy = _policy(cfg).model_copy(update={"max_iterations": 65535})
    blocks, _, _, _ = attack_hash_cost(cfg, cfg.reference_iterations, cfg.reference_salt_length, policy)
    return blocks


def calibrate(cfg: SimConfig) -> SimConfig:
    """Fill in benign cost, per-query overhead and block time.

    The benign cost makes the reference attack cost ``profile factor`` times a
    benign query; block time puts the reference attack's saturation point at
    ``saturation_rate`` queries/s.
    """
    if cfg.calibrated:
        return cfg
    reference = reference_hash_blocks(cfg)
    factor = instruction_factor(cfg.profile)
    benign = cfg.benign_service_blocks
    if benign is None:
        benign = reference / (factor - 1.0)
    overhead = benign if cfg.attack_overhead_blocks is None else cfg.attack_overhead_blocks
    block_time = cfg.block_time
    if block_time is None:
        block_time = 1.0 / (cfg.saturation_rate * (overhead + reference) + cfg.benign_rate * benign)
    logger.info(
        f"Calibrated {cfg.profile}: benign={benign:.1f} blocks, overhead={overhead:.1f} blocks, "
        f"block_time={block_time:.3e}s"
    )
    return cfg.model_copy(
        update={"benign_service_blocks": benign, "attack_overhead_blocks": overhead, "block_time": block_time}
    )


def attack_query_cost(cfg: SimConfig) -> AttackCost:
    cfg = calibrate(cfg)
    blocks, candidates, evaluations, status = attack_hash_cost(cfg)
    return AttackCost(
        hash_blocks=blocks,
        overhead_blocks=cfg.attack_overhead_blocks,
        candidates=candidates,
        chain_evaluations=evaluations,
        status=status,
    )


def measure_block_time(samples: int = 200000, message_len: int = 275) -> float:
    """Seconds per SHA-1 compression block on this host."""
    buffer = bytes(message_len)
    blocks_per_call = (message_len + 8) // 64 + 1
    started = time.perf_counter()
    for _ in range(samples):
        hashlib.sha1(buffer).digest()
    elapsed = time.perf_counter() - started
    return elapsed / (samples * blocks_per_call)


def amplification_report(cfg: SimConfig) -> AmplificationReport:
    """Cost of one attack query against a benign query and against unsalted hashing."""
    cfg = calibrate(cfg)
    cost = attack_query_cost(cfg)
    labels_factor = max(cost.candidates - 1, 0) if cost.status == ValidationStatus.PROVEN_NONEXISTENT.value else 0

    salt_factor = 0.0
    prediction = None
    if cost.hash_blocks:
        qname = build_attack_qname(cfg.origin, _seed_streams(cfg.seed)["labels"], cfg.filler_labels)
        cached = _policy(cfg).candidate_hash_caching
        unsalted = predict_discovery_cost(qname, cfg.origin, Nsec3Params(iterations=cfg.iterations))
        salt_factor = cost.hash_blocks / (unsalted.blocks_cached if cached else unsalted.blocks_uncached)
        prediction = predict_discovery_cost(
            qname, cfg.origin, Nsec3Params(iterations=cfg.iterations, salt=bytes(cfg.salt_length))
        )

    block_amplification = labels_factor * salt_factor
    if block_amplification > THEORETICAL_CEILING:
        raise InvariantViolation(
            f"Block amplification {block_amplification:.1f} exceeds {THEORETICAL_CEILING}",
            details={"labels_factor": labels_factor, "salt_factor": salt_factor},
        )
    return AmplificationReport(
        profile=cfg.profile,
        attack_hash_blocks=cost.hash_blocks,
        attack_overhead_blocks=cost.overhead_blocks,
        benign_service_blocks=cfg.benign_service_blocks,
        instruction_factor=cost.total_blocks / cfg.benign_service_blocks,
        labels_factor=labels_factor,
        salt_factor=salt_factor,
        block_amplification=block_amplification,
        status=cost.status,
        prediction=prediction,
    )


def simulate(cfg: SimConfig) -> SimReport:
    """Run one deterministic resolver simulation."""
    cfg = calibrate(cfg)
    if not cfg.attack.reaches_max:
        logger.warning(f"Ramp never reaches max_rate {cfg.attack.max_rate}/s within {cfg.attack.duration}s")
    cost = attack_query_cost(cfg)
    streams = _seed_streams(cfg.seed)
    phase_rng = streams["phases"]
    benign_phase = float(phase_rng.uniform(0.0, 1.0))
    horizon = cfg.horizon
    benign_times = fixed_rate_times(0.0, horizon, cfg.benign_rate, benign_phase)
    attack_times = attack_arrival_times(cfg.attack, phase_rng)

    jobs, busy = run_queue(
        attack_times,
        benign_times,
        attack_service=cost.total_blocks * cfg.block_time,
        benign_service=cfg.benign_service_blocks * cfg.block_time,
        discipline=cfg.discipline,
        timeout=cfg.timeout,
        horizon=horizon,
    )

    bins = int(np.ceil(horizon))
    edges = np.minimum(np.arange(bins + 1, dtype=float), horizon)
    widths = np.diff(edges)
    utilization = np.clip(busy_between(busy, edges) / widths, 0.0, 1.0)

    step_samples = []
    for index, start, end, rate in cfg.attack.steps():
        step_busy = busy_between(busy, np.array([start, end]))[0]
        step_samples.append(StepSample(index, start, end, rate, float(min(step_busy / (end - start), 1.0))))

    benign = [job for job in jobs if job.kind == QueryKind.BENIGN]
    attack = [job for job in jobs if job.kind == QueryKind.ATTACK]
    report = SimReport(
        config=cfg,
        utilization=[float(u) for u in utilization],
        step_samples=step_samples,
        queries=jobs,
        attack_rate_trace=[(float(t), cfg.attack.rate_at(float(t))) for t in edges[:-1]],
        attack_cost=cost,
        benign_arrivals=len(benign),
        benign_served=sum(1 for job in benign if job.finish is not None and not job.lost),
        benign_lost=sum(1 for job in benign if job.lost),
        benign_in_flight=sum(1 for job in benign if job.in_flight and not job.lost),
        benign_in_attack_window=sum(
            1 for job in benign if cfg.attack.start_delay <= job.arrival < cfg.attack.end
        ),
        attack_arrivals=len(attack),
        attack_served=sum(1 for job in attack if job.finish is not None),
    )
    if report.benign_served + report.benign_lost + report.benign_in_flight != report.benign_arrivals:
        raise InvariantViolation("Benign query conservation violated", details=report.summary())
    logger.info(
        f"Simulation seed={cfg.seed}: adjusted loss {report.adjusted_loss_rate:.2%}, "
        f"peak utilization {max(report.utilization, default=0.0):.2f}"
    )
    return report


def run_parameter_sweep(
    base: SimConfig,
    axis: SweepAxis,
    values: Sequence[int],
    workers: int = 1,
    progress: bool = False
) -> List[SimReport]:
    """One simulation per value, with calibration pinned to ``base``."""
    axis = SweepAxis(axis)
    base = calibrate(base)
    try:
        configs = [base.model_validate({**base.model_dump(), axis.config_field: value}) for value in values]
    except ValueError as exc:
        raise ConfigurationError(f"Sweep value out of range for {axis.value}: {exc}", config_key=axis.config_field) from exc

    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(tqdm(pool.map(simulate, configs), total=len(configs), disable=not progress))
    else:
        reports = [simulate(cfg) for cfg in tqdm(configs, disable=not progress, desc=f"sweep {axis.value}")]
    return reports


def sweep_rows(reports: Sequence[SimReport], axis: SweepAxis) -> List[Dict[str, object]]:
    axis = SweepAxis(axis)
    rows = []
    for report in reports:
        value = getattr(report.config, axis.config_field)
        for sample in report.step_samples:
            rows.append({
                "axis": axis.value,
                "value": value,
                "step": sample.step,
                "rate": sample.rate,
                "utilization": sample.utilization,
                "adjusted_loss_rate": report.adjusted_loss_rate,
            })
    return rows


def loss_table(
    base: SimConfig,
    rates: Sequence[float] = (110, 120, 130, 140, 150),
    profiles: Sequence[str] = ("unbound", "bind", "powerdns", "knot"),
    seeds: Sequence[int] = (0,),
    duration: float = 40.0
) -> List[Dict[str, object]]:
    """Average benign loss for constant-rate attacks per resolver profile."""
    rows = []
    for profile in profiles:
        for rate in rates:
            losses, adjusted = [], []
            for seed in seeds:
                cfg = base.model_copy(update={
                    "profile": profile,
                    "policy": None,
                    "benign_service_blocks": None,
                    "attack_overhead_blocks": None,
                    "block_time": None,
                    "seed": seed,
                    "attack": RampSchedule.constant(rate, start_delay=base.attack.start_delay, duration=duration),
                })
                report = simulate(cfg)
                losses.append(report.total_loss_rate)
                adjusted.append(report.adjusted_loss_rate)
            rows.append({
                "profile": profile,
                "rate": rate,
                "total_loss_rate": float(np.mean(losses)),
                "adjusted_loss_rate": float(np.mean(adjusted)),
            })
    return rows
