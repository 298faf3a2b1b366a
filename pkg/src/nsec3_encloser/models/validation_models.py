from dataclasses import dataclass, field
from enum import Enum
from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator

from ..core.names import DomainName
from ..core.nsec3 import CostMeter


class OverLimitBehavior(str, Enum):
    BOGUS = "bogus"
    INSECURE_SKIP = "insecure_skip"


class ValidatorPolicy(BaseModel):
    """Iteration-limit and hashing behaviour of a validating resolver."""

    max_iterations: Union[int, Literal["rfc5155"]] = Field(
        150, description="Iteration ceiling, or 'rfc5155' for the key-size table"
    )
    over_limit_behavior: OverLimitBehavior = Field(OverLimitBehavior.BOGUS)
    candidate_hash_caching: bool = Field(True, description="Reuse candidate hashes during discovery")
    check_signatures: bool = Field(True, description="Require an RRSIG per NSEC3 record")

    @field_validator("max_iterations")
    @classmethod
    def _non_negative(cls, value):
        if isinstance(value, int) and value < 0:
            raise ValueError("max_iterations must be >= 0")
        return value


class ValidationStatus(str, Enum):
    PROVEN_NONEXISTENT = "ProvenNonexistent"
    PROVEN_NODATA = "ProvenNoData"
    BOGUS = "Bogus"
    INSECURE_SKIPPED = "InsecureSkipped"


@dataclass
class ValidationOutcome:
    status: ValidationStatus
    closest_encloser: Optional[DomainName] = None
    next_closer: Optional[DomainName] = None
    meter: CostMeter = field(default_factory=CostMeter)
    candidates_hashed: int = 0
    reason: Optional[str] = None

    @property
    def secure(self) -> bool:
        return self.status in (ValidationStatus.PROVEN_NONEXISTENT, ValidationStatus.PROVEN_NODATA)


@dataclass(frozen=True)
class CostPrediction:
    """Closed-form hashing cost of one denial validation."""

    candidates: int
    chain_evaluations_cached: int
    chain_evaluations_uncached: int
    blocks_cached: int
    blocks_uncached: int
