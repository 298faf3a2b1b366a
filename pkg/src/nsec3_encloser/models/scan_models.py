from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from .fields import NameField

SCAN_SCHEMA_VERSION = 1


class DenialType(str, Enum):
    NSEC = "NSEC"
    NSEC3 = "NSEC3"


class ScanResult(BaseModel):
    """One line of the scan dataset."""

    schema_version: int = SCAN_SCHEMA_VERSION
    domain: NameField
    signed: bool = False
    denial: Optional[DenialType] = None
    iterations: Optional[int] = Field(None, ge=0, le=65535)
    salt_len: Optional[int] = Field(None, ge=0, le=255)
    rcodes: Dict[str, str] = Field(default_factory=dict, description="Response code per probe type")
    timings: Dict[str, float] = Field(default_factory=dict, description="Seconds per probe type")
    error: Optional[str] = None

    @model_validator(mode="after")
    def _params_iff_nsec3(self) -> "ScanResult":
        has_params = self.iterations is not None and self.salt_len is not None
        has_any = self.iterations is not None or self.salt_len is not None
        if self.denial == DenialType.NSEC3 and not has_params:
            raise ValueError("NSEC3 results need iterations and salt_len")
        if self.denial != DenialType.NSEC3 and has_any:
            raise ValueError("iterations/salt_len are only recorded for NSEC3 results")
        return self


class CcdfPoint(BaseModel):
    threshold: int
    share: float = Field(..., ge=0.0, le=1.0)


class Distribution(BaseModel):
    """Share of zones whose parameter meets or exceeds each threshold."""

    parameter: str
    population: int
    points: List[CcdfPoint] = Field(default_factory=list)
    median: Optional[float] = None
    maximum: Optional[int] = None

    def share_at(self, threshold: int) -> float:
        """Share of zones with a value >= ``threshold``."""
        for point in self.points:
            if point.threshold >= threshold:
                return point.share
        return 0.0


class ParameterPair(BaseModel):
    iterations: int
    salt_len: int
    hash_blocks: int


class ScanSummary(BaseModel):
    total: int
    errors: int
    signed: int
    nsec3: int
    nsec: int
    no_denial: int
    nsec3_share: float
    nsec_share: float
    nonzero_iterations_share: float
    salted_share: float
    iterations: Distribution
    salt_length: Distribution
    max_burden: Optional[ParameterPair] = None

    def lines(self) -> List[str]:
        text = [
            f"{self.total} domains probed, {self.errors} errors, {self.signed} signed",
            f"NSEC3: {self.nsec3} ({self.nsec3_share:.2%}), NSEC: {self.nsec} ({self.nsec_share:.2%})",
            f"iterations > 0: {self.nonzero_iterations_share:.2%}, salted: {self.salted_share:.2%}",
            f"median iterations {self.iterations.median}, median salt length {self.salt_length.median}",
            f"max iterations {self.iterations.maximum}, max salt length {self.salt_length.maximum}",
        ]
        if self.max_burden is not None:
            text.append(
                f"heaviest: {self.max_burden.iterations} iterations, "
                f"{self.max_burden.salt_len}-byte salt ({self.max_burden.hash_blocks} blocks per hash)"
            )
        return text
