from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import dns.rdata

from ..core.names import DomainName
from .zone_models import Nsec3Record, SignatureRecord


class Rcode(str, Enum):
    NOERROR = "NOERROR"
    NXDOMAIN = "NXDOMAIN"


@dataclass(frozen=True)
class NegativeResponse:
    """Denial answer: up to three distinct NSEC3 records plus their signatures."""

    qname: DomainName
    qtype: str
    rcode: Rcode
    nsec3_records: Tuple[Nsec3Record, ...]
    rrsigs: Tuple[SignatureRecord, ...] = ()
    soa: Optional[dns.rdata.Rdata] = None
    soa_owner: Optional[DomainName] = None
    closest_encloser: Optional[DomainName] = None

    def __post_init__(self):
        owners = [rec.owner_hash for rec in self.nsec3_records]
        if len(owners) != len(set(owners)):
            raise ValueError("negative response carries duplicate NSEC3 owners")
        if len(owners) > 3:
            raise ValueError(f"negative response carries {len(owners)} NSEC3 records")

    @property
    def record_count(self) -> int:
        return len(self.nsec3_records)


@dataclass(frozen=True)
class PositiveAnswer:
    qname: DomainName
    qtype: str
    records: Tuple[dns.rdata.Rdata, ...]
    rrsigs: Tuple[SignatureRecord, ...] = ()
    rcode: Rcode = Rcode.NOERROR
