"""
Discrete-event model of a single-threaded validating resolver.

Two deterministic arrival streams share one server: benign queries at a
fixed interval and attack queries following the ramp. The FIFO server is
non-preemptive and discards benign work whose deadline passed while it
was queued; the processor-sharing variant serves all queued work at once.
"""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
import simpy

from ..models.sim_models import QueryKind, QueryRecord, QueueDiscipline, RampSchedule

logger = logging.getLogger(__name__)

_EPSILON = 1e-12


class ResolverModel:
    """One server, one queue. Records busy intervals for utilisation."""

    def __init__(self, env: simpy.Environment, discipline: QueueDiscipline, timeout: float):
        self.env = env
        self.timeout = timeout
        self.queue = simpy.Store(env)
        self.busy: List[Tuple[float, float]] = []
        self._in_service: List[QueryRecord] = []
        self._busy_since = None
        if discipline == QueueDiscipline.FIFO:
            env.process(self._serve_fifo())
        else:
            env.process(self._serve_processor_sharing())

    def _expired(self, job: QueryRecord, now: float) -> bool:
        return job.kind == QueryKind.BENIGN and now - job.arrival > self.timeout

    def _finish(self, job: QueryRecord, now: float) -> None:
        job.finish = now
        if self._expired(job, now):
            job.lost = True

    def _serve_fifo(self):
        while True:
            job = yield self.queue.get()
            now = self.env.now
            if self._expired(job, now):
                job.dropped = True
                job.lost = True
                continue
            job.start = now
            self._in_service = [job]
            self._busy_since = now
            if job.service_time > 0:
                yield self.env.timeout(job.service_time)
            self._in_service = []
            self._busy_since = None
            self.busy.append((job.start, self.env.now))
            self._finish(job, self.env.now)

    def _serve_processor_sharing(self):
        active = self._in_service
        pending = self.queue.get()
        last = self.env.now
        while True:
            if active:
                shortest = min(job.remaining for job in active)
                yield pending | self.env.timeout(shortest * len(active))
            else:
                yield pending
            now = self.env.now
            if active:
                share = (now - last) / len(active)
                self.busy.append((last, now))
                for job in active:
                    job.remaining -= share
                for job in [job for job in active if job.remaining <= _EPSILON]:
                    active.remove(job)
                    self._finish(job, now)
            last = now
            if pending.triggered:
                job = pending.value
                job.start = now
                job.remaining = job.service_time
                if job.remaining <= _EPSILON:
                    self._finish(job, now)
                else:
                    active.append(job)
                pending = self.queue.get()
            self._busy_since = now if active else None

    def close(self, horizon: float) -> None:
        """Account busy time of work still in service at the horizon."""
        if self._in_service and self._busy_since is not None and horizon > self._busy_since:
            self.busy.append((self._busy_since, horizon))

    def expire_unfinished(self, jobs: Sequence[QueryRecord], horizon: float) -> None:
        """Mark benign work still pending at the horizon as lost once its deadline has passed."""
        for job in jobs:
            if job.finish is None and not job.lost and self._expired(job, horizon):
                job.lost = True


def _arrivals(env: simpy.Environment, model: ResolverModel, jobs: Sequence[QueryRecord]):
    for job in jobs:
        delay = job.arrival - env.now
        if delay > 0:
            yield env.timeout(delay)
        model.queue.put(job)


def fixed_rate_times(start: float, end: float, rate: float, phase: float) -> np.ndarray:
    """Arrival instants at ``rate`` in [start, end), offset by ``phase`` of one interval."""
    if rate <= 0 or end <= start:
        return np.empty(0)
    interval = 1.0 / rate
    times = start + (phase + np.arange(math.ceil((end - start) * rate) + 1)) * interval
    return times[times < end]


def attack_arrival_times(schedule: RampSchedule, rng: np.random.Generator) -> np.ndarray:
    phase = float(rng.uniform(0.0, 1.0))
    chunks = [fixed_rate_times(start, end, rate, phase) for _, start, end, rate in schedule.steps()]
    return np.concatenate(chunks) if chunks else np.empty(0)


def busy_between(busy: Sequence[Tuple[float, float]], edges: np.ndarray) -> np.ndarray:
    """Busy seconds inside each [edges[i], edges[i+1]) bin."""
    if not busy:
        return np.zeros(len(edges) - 1)
    intervals = np.asarray(busy, dtype=float)
    durations = intervals[:, 1] - intervals[:, 0]
    cumulative = np.cumsum(durations)
    times = intervals.reshape(-1)
    levels = np.empty_like(times)
    levels[0::2] = cumulative - durations
    levels[1::2] = cumulative
    busy_until = np.interp(edges, times, levels, left=0.0, right=cumulative[-1])
    return np.diff(busy_until)


def run_queue(
    attack_times: np.ndarray,
    benign_times: np.ndarray,
    attack_service: float,
    benign_service: float,
    discipline: QueueDiscipline,
    timeout: float,
    horizon: float
) -> Tuple[List[QueryRecord], List[Tuple[float, float]]]:
    """Simulate until ``horizon``; return per-query records and busy intervals.

    Benign queries still unfinished at the horizon count as lost once their
    deadline has passed, and as in flight otherwise.
    """
    jobs = [QueryRecord(0, QueryKind.BENIGN, float(t), benign_service) for t in benign_times]
    jobs += [QueryRecord(0, QueryKind.ATTACK, float(t), attack_service) for t in attack_times]
    jobs.sort(key=lambda job: (job.arrival, job.kind != QueryKind.BENIGN))
    for query_id, job in enumerate(jobs):
        job.query_id = query_id

    env = simpy.Environment()
    model = ResolverModel(env, discipline, timeout)
    env.process(_arrivals(env, model, jobs))
    env.run(until=horizon)
    model.close(horizon)
    model.expire_unfinished(jobs, horizon)
    logger.debug(f"Simulated {len(jobs)} queries up to t={horizon}s")
    return jobs, model.busy
