from dataclasses import dataclass, field
from ipaddress import IPv4Address
from typing import Dict, FrozenSet, List, Literal, Optional, Tuple

import dns.rdata
import dns.rdataclass
import dns.rdatatype
import dns.rdtypes.ANY.NSEC3
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.names import DomainName, Hash160, base32hex_encode
from ..core.nsec3 import MAX_ITERATIONS, Nsec3Params, covers, matches
from .fields import NameField, SaltField

KeySize = Literal[1024, 2048, 4096]


class ZoneConfig(BaseModel):
    """One attack zone as described in the JSON configuration document."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    origin: NameField = Field(..., description="Zone apex, e.g. ex00.nsec3.example.org.")
    nameserver_name: Optional[NameField] = Field(
        None, description="Authoritative nameserver; defaults to ns1.<origin>"
    )
    nameserver_address: IPv4Address = Field(IPv4Address("192.0.2.53"), description="Glue address")
    iterations: int = Field(150, ge=0, le=MAX_ITERATIONS, description="NSEC3 additional iterations")
    salt: SaltField = Field(b"", description="Salt as hex text, '-' for none")
    key_size_bits: KeySize = Field(2048, description="RSA modulus size for KSK and ZSK")
    ttl: int = Field(0, ge=0, description="TTL applied to every record")
    zone_id: Optional[str] = Field(None, pattern=r"^\d{2}$", description="Two-digit batch tag")
    dnssec_algorithm: int = Field(7, ge=1, le=255, description="DNSKEY/RRSIG/DS algorithm number")
    ds_digest: Literal["SHA1", "SHA256", "SHA384"] = Field("SHA256", description="DS digest type")
    nsec3_flags: Literal[0, 1] = Field(0, description="NSEC3 record flags; opt-out stays 0 in practice")

    @model_validator(mode="after")
    def _check_shape(self) -> "ZoneConfig":
        if len(self.salt) > 255:
            raise ValueError(f"salt of {len(self.salt)} bytes exceeds 255")
        if self.origin.is_root:
            raise ValueError("origin must not be the root")
        if self.nameserver_name is None:
            object.__setattr__(self, "nameserver_name", self.origin.child("ns1"))
        elif self.nameserver_name == self.origin:
            raise ValueError("nameserver_name must differ from origin")
        return self

    @property
    def nameserver_in_zone(self) -> bool:
        return self.nameserver_name.is_subdomain_of(self.origin)

    @property
    def params(self) -> Nsec3Params:
        """NSEC3PARAM payload; its flags field is always zero."""
        return Nsec3Params(iterations=self.iterations, salt=self.salt)

    @property
    def record_params(self) -> Nsec3Params:
        return Nsec3Params(flags=self.nsec3_flags, iterations=self.iterations, salt=self.salt)


@dataclass(frozen=True)
class Nsec3Record:
    """One link of the circular hash chain."""

    owner_hash: Hash160
    params: Nsec3Params
    next_hash: Hash160
    type_bitmap: FrozenSet[str] = frozenset()

    def owner_name(self, origin: DomainName) -> DomainName:
        return origin.child(base32hex_encode(self.owner_hash).lower())

    def matches(self, target: Hash160) -> bool:
        return matches(self.owner_hash, target)

    def covers(self, target: Hash160) -> bool:
        return covers(self.owner_hash, self.next_hash, target)

    def to_rdata(self) -> dns.rdtypes.ANY.NSEC3.NSEC3:
        rdtypes = sorted(dns.rdatatype.from_text(t) for t in self.type_bitmap)
        return dns.rdtypes.ANY.NSEC3.NSEC3(
            dns.rdataclass.IN,
            dns.rdatatype.NSEC3,
            self.params.algorithm,
            self.params.flags,
            self.params.iterations,
            self.params.salt,
            self.next_hash.value,
            dns.rdtypes.ANY.NSEC3.Bitmap.from_rdtypes(rdtypes),
        )

    @classmethod
    def from_rdata(cls, owner_hash: Hash160, rdata) -> "Nsec3Record":
        return cls(
            owner_hash=owner_hash,
            params=Nsec3Params(
                algorithm=rdata.algorithm,
                flags=rdata.flags,
                iterations=rdata.iterations,
                salt=bytes(rdata.salt),
            ),
            next_hash=Hash160(bytes(rdata.next)),
            type_bitmap=frozenset(bitmap_types(rdata.windows)),
        )


def bitmap_types(windows) -> List[str]:
    """Decode NSEC/NSEC3 type-bitmap windows into mnemonics."""
    types = []
    for window, bitmap in windows:
        for index, octet in enumerate(bitmap):
            for bit in range(8):
                if octet & (0x80 >> bit):
                    types.append(dns.rdatatype.to_text(window * 256 + index * 8 + bit))
    return types


@dataclass(frozen=True)
class SignatureRecord:
    owner: DomainName
    type_covered: str
    rdata: dns.rdata.Rdata


@dataclass(frozen=True)
class ZoneHashes:
    """Hashes the chain is built around."""

    origin: Hash160
    wildcard: Hash160
    nameserver: Optional[Hash160] = None


@dataclass(frozen=True)
class Zone:
    origin: DomainName
    nameserver_name: DomainName
    params: Nsec3Params
    ttl: int
    key_size_bits: int
    soa: dns.rdata.Rdata
    ns: Tuple[dns.rdata.Rdata, ...]
    a: Tuple[dns.rdata.Rdata, ...]
    nsec3_chain: Tuple[Nsec3Record, ...]
    hashes: ZoneHashes
    algorithm: int = 7
    ds_digest: str = "SHA256"
    dnskey: Tuple[dns.rdata.Rdata, ...] = ()
    ds: Tuple[dns.rdata.Rdata, ...] = ()
    rrsigs: Tuple[SignatureRecord, ...] = ()
    cryptographic: bool = False
    signer_name: Optional[str] = None
    _by_owner: Dict[Hash160, Nsec3Record] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_owner", {rec.owner_hash: rec for rec in self.nsec3_chain})

    @property
    def nameserver_in_zone(self) -> bool:
        return self.nameserver_name.is_subdomain_of(self.origin)

    @property
    def signed(self) -> bool:
        return bool(self.rrsigs)

    @property
    def names(self) -> Tuple[DomainName, ...]:
        """Names that exist in the zone."""
        if self.nameserver_in_zone:
            return (self.origin, self.nameserver_name)
        return (self.origin,)

    def types_at(self, name: DomainName) -> FrozenSet[str]:
        if name == self.origin:
            types = {"SOA", "NS", "NSEC3PARAM"}
            if self.dnskey:
                types.add("DNSKEY")
            if self.ds:
                types.add("DS")
            return frozenset(types)
        if self.nameserver_in_zone and name == self.nameserver_name:
            return frozenset({"A"})
        return frozenset()

    def rdatas(self, name: DomainName, rdtype: str) -> Tuple[dns.rdata.Rdata, ...]:
        if name == self.origin:
            return {
                "SOA": (self.soa,),
                "NS": self.ns,
                "DNSKEY": self.dnskey,
                "DS": self.ds,
                "NSEC3PARAM": (self.nsec3param_rdata(),),
            }.get(rdtype, ())
        if self.nameserver_in_zone and name == self.nameserver_name and rdtype == "A":
            return self.a
        return ()

    def nsec3param_rdata(self) -> dns.rdata.Rdata:
        return dns.rdata.from_text(dns.rdataclass.IN, dns.rdatatype.NSEC3PARAM, str(self.params))

    def record_for_owner(self, owner_hash: Hash160) -> Optional[Nsec3Record]:
        return self._by_owner.get(owner_hash)

    def signatures_for(self, owner: DomainName, type_covered: str) -> Tuple[SignatureRecord, ...]:
        return tuple(
            sig for sig in self.rrsigs if sig.owner == owner and sig.type_covered == type_covered
        )


@dataclass
class ValidationReport:
    """Outcome of probing a zone with random non-existent names."""

    origin: DomainName
    trials: int
    counterexamples: List[Tuple[str, int]] = field(default_factory=list)
    out_of_shape: List[str] = field(default_factory=list)
    record_count_histogram: Dict[int, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def summary(self) -> str:
        text = f"{self.origin}: {self.trials} trials, {len(self.counterexamples)} counterexamples"
        if self.out_of_shape:
            text += f", {len(self.out_of_shape)} out-of-attack-shape queries"
        return text
