from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..core.names import parse_name
from .fields import NameField
from .validation_models import CostPrediction, ValidatorPolicy
from .zone_models import KeySize


class QueueDiscipline(str, Enum):
    FIFO = "fifo"
    PROCESSOR_SHARING = "ps"


class QueryKind(str, Enum):
    ATTACK = "attack"
    BENIGN = "benign"


class RampSchedule(BaseModel):
    """Attack rate raised by ``rate_delta`` every ``step_interval`` seconds up to ``max_rate``."""

    start_delay: float = Field(10.0, ge=0, description="Seconds before the first attack query")
    step_interval: float = Field(3.0, gt=0)
    rate_delta: float = Field(10.0, ge=0, description="Queries/s added per step")
    max_rate: float = Field(150.0, ge=0)
    duration: float = Field(45.0, gt=0, description="Attack length in seconds")
    initial_rate: Optional[float] = Field(None, ge=0, description="Rate of the first step; defaults to rate_delta")

    @classmethod
    def constant(cls, rate: float, start_delay: float = 10.0, duration: float = 40.0) -> "RampSchedule":
        return cls(
            start_delay=start_delay,
            step_interval=duration,
            rate_delta=0.0,
            max_rate=rate,
            duration=duration,
            initial_rate=rate,
        )

    @property
    def end(self) -> float:
        return self.start_delay + self.duration

    @property
    def first_rate(self) -> float:
        return self.rate_delta if self.initial_rate is None else self.initial_rate

    def rate_for_step(self, step: int) -> float:
        return min(self.max_rate, self.first_rate + step * self.rate_delta)

    def rate_at(self, t: float) -> float:
        if t < self.start_delay or t >= self.end:
            return 0.0
        return self.rate_for_step(int((t - self.start_delay) // self.step_interval))

    def steps(self) -> List[Tuple[int, float, float, float]]:
        """(index, start, end, rate) for every step inside the attack window."""
        result = []
        index = 0
        start = self.start_delay
        while start < self.end - 1e-12:
            end = min(start + self.step_interval, self.end)
            result.append((index, start, end, self.rate_for_step(index)))
            index += 1
            start = self.start_delay + index * self.step_interval
        return result

    @property
    def reaches_max(self) -> bool:
        return any(rate >= self.max_rate for _, _, _, rate in self.steps())


class SimConfig(BaseModel):
    """One resolver simulation.

    Unset calibration fields (``benign_service_blocks``,
    ``attack_overhead_blocks``, ``block_time``) are derived by the harness.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    origin: NameField = Field(parse_name("ex00.nsec3.example.org."))
    iterations: int = Field(150, ge=0, le=65535)
    salt_length: int = Field(255, ge=0, le=255)
    key_size_bits: KeySize = 2048
    profile: str = Field("unbound", description="Resolver profile for the instruction factor")
    policy: Optional[ValidatorPolicy] = Field(None, description="Defaults to the profile's policy")
    benign_rate: float = Field(10.0, ge=0)
    benign_service_blocks: Optional[float] = Field(None, gt=0)
    attack_overhead_blocks: Optional[float] = Field(None, ge=0)
    block_time: Optional[float] = Field(None, gt=0, description="Seconds per SHA-1 compression block")
    saturation_rate: float = Field(127.0, gt=0, description="Attack rate saturating the reference configuration")
    reference_iterations: int = Field(150, ge=0, le=65535)
    reference_salt_length: int = Field(255, ge=0, le=255)
    timeout: float = Field(5.0, gt=0)
    attack: RampSchedule = Field(default_factory=RampSchedule)
    discipline: QueueDiscipline = QueueDiscipline.FIFO
    filler_labels: Optional[int] = Field(None, ge=0)
    tail: float = Field(10.0, ge=0, description="Seconds simulated after the attack ends")
    seed: int = 0

    @property
    def horizon(self) -> float:
        return self.attack.end + self.tail

    @property
    def calibrated(self) -> bool:
        return None not in (self.benign_service_blocks, self.attack_overhead_blocks, self.block_time)


@dataclass
class QueryRecord:
    query_id: int
    kind: QueryKind
    arrival: float
    service_time: float
    start: Optional[float] = None
    finish: Optional[float] = None
    dropped: bool = False
    lost: bool = False
    remaining: float = field(default=0.0, repr=False)

    @property
    def in_flight(self) -> bool:
        return self.finish is None and not self.dropped


@dataclass(frozen=True)
class StepSample:
    step: int
    start: float
    end: float
    rate: float
    utilization: float


@dataclass(frozen=True)
class AttackCost:
    """Resolver cost of one attack query."""

    hash_blocks: int
    overhead_blocks: float
    candidates: int
    chain_evaluations: int
    status: str

    @property
    def total_blocks(self) -> float:
        return self.overhead_blocks + self.hash_blocks


@dataclass
class AmplificationReport:
    profile: str
    attack_hash_blocks: int
    attack_overhead_blocks: float
    benign_service_blocks: float
    instruction_factor: float
    labels_factor: int
    salt_factor: float
    block_amplification: float
    status: str
    prediction: Optional[CostPrediction] = None
    ceiling: int = 625

    def to_dict(self) -> Dict[str, Any]:
        return {
            "profile": self.profile,
            "attack_hash_blocks": self.attack_hash_blocks,
            "attack_overhead_blocks": self.attack_overhead_blocks,
            "benign_service_blocks": self.benign_service_blocks,
            "instruction_factor": self.instruction_factor,
            "labels_factor": self.labels_factor,
            "salt_factor": self.salt_factor,
            "block_amplification": self.block_amplification,
            "ceiling": self.ceiling,
            "status": self.status,
        }


@dataclass
class SimReport:
    config: SimConfig
    utilization: List[float]
    step_samples: List[StepSample]
    queries: List[QueryRecord]
    attack_rate_trace: List[Tuple[float, float]]
    attack_cost: AttackCost
    benign_arrivals: int = 0
    benign_served: int = 0
    benign_lost: int = 0
    benign_in_flight: int = 0
    benign_in_attack_window: int = 0
    attack_arrivals: int = 0
    attack_served: int = 0

    @property
    def total_loss_rate(self) -> float:
        return self.benign_lost / self.benign_arrivals if self.benign_arrivals else 0.0

    @property
    def adjusted_loss_rate(self) -> float:
        """Losses relative to benign queries sent during the attack window."""
        if not self.benign_in_attack_window:
            return 0.0
        return self.benign_lost / self.benign_in_attack_window

    @property
    def amplification_factor(self) -> float:
        return self.attack_cost.total_blocks / self.config.benign_service_blocks

    def summary(self) -> Dict[str, Any]:
        return {
            "seed": self.config.seed,
            "profile": self.config.profile,
            "iterations": self.config.iterations,
            "salt_length": self.config.salt_length,
            "key_size_bits": self.config.key_size_bits,
            "discipline": self.config.discipline.value,
            "block_time": self.config.block_time,
            "benign_service_blocks": self.config.benign_service_blocks,
            "attack_query_blocks": self.attack_cost.total_blocks,
            "attack_status": self.attack_cost.status,
            "amplification_factor": self.amplification_factor,
            "benign_arrivals": self.benign_arrivals,
            "benign_served": self.benign_served,
            "benign_lost": self.benign_lost,
            "benign_in_flight": self.benign_in_flight,
            "benign_in_attack_window": self.benign_in_attack_window,
            "attack_arrivals": self.attack_arrivals,
            "attack_served": self.attack_served,
            "total_loss_rate": self.total_loss_rate,
            "adjusted_loss_rate": self.adjusted_loss_rate,
            "peak_utilization": max(self.utilization, default=0.0),
        }
