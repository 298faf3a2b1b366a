"""Presentation-format zonefiles: serialization, parsing, and file output."""

import logging
import re
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

import dns.exception
import dns.name
import dns.rdata
import dns.rdatatype
import dns.zone

from ..core.names import DomainName, base32hex_decode, format_name
from ..core.nsec3 import Nsec3Hasher, Nsec3Params
from ..models.zone_models import Nsec3Record, SignatureRecord, Zone, ZoneHashes
from ..utils.exceptions import DatasetError, ForgeError, ZonefileError

logger = logging.getLogger(__name__)

_ORIGIN_RE = re.compile(r"^\$ORIGIN\s+(\S+)", re.MULTILINE)


def _line(owner: DomainName, ttl: int, rdata: dns.rdata.Rdata) -> str:
    rdtype = dns.rdatatype.to_text(rdata.rdtype)
    return f"{format_name(owner)} {ttl} IN {rdtype} {rdata.to_text()}"


def _rrset_lines(zone: Zone, owner: DomainName, rdtype: str, rdatas) -> Iterator[str]:
    for rdata in rdatas:
        yield _line(owner, zone.ttl, rdata)
    for sig in zone.signatures_for(owner, rdtype):
        yield _line(owner, zone.ttl, sig.rdata)


def serialize_zone(zone: Zone) -> str:
    """Render the child zone with absolute owner names in a fixed order."""
    lines = [f"$ORIGIN {format_name(zone.origin)}", f"$TTL {zone.ttl}"]
    origin = zone.origin
    lines.extend(_rrset_lines(zone, origin, "SOA", (zone.soa,)))
    lines.extend(_rrset_lines(zone, origin, "NS", zone.ns))
    if zone.dnskey:
        lines.extend(_rrset_lines(zone, origin, "DNSKEY", zone.dnskey))
    lines.extend(_rrset_lines(zone, origin, "NSEC3PARAM", (zone.nsec3param_rdata(),)))
    if zone.a:
        lines.extend(_rrset_lines(zone, zone.nameserver_name, "A", zone.a))
    for record in zone.nsec3_chain:
        lines.extend(_rrset_lines(zone, record.owner_name(origin), "NSEC3", (record.to_rdata(),)))
    return "\n".join(lines) + "\n"


def build_parent_stub(zone: Zone) -> str:
    """DS RRset for the parent side of the delegation; empty text when unsigned."""
    if not zone.ds:
        return ""
    parent = DomainName(zone.origin.labels[1:])
    lines = [f"; parent-side records for {format_name(zone.origin)}", f"$ORIGIN {format_name(parent)}"]
    lines.extend(_line(zone.origin, zone.ttl, ds) for ds in zone.ds)
    return "\n".join(lines) + "\n"


def _rsa_modulus_bits(dnskey) -> int:
    key = bytes(dnskey.key)
    if not key:
        return 0
    if key[0] == 0:
        exponent_len = int.from_bytes(key[1:3], "big")
        offset = 3 + exponent_len
    else:
        offset = 1 + key[0]
    return (len(key) - offset) * 8


def parse_zonefile(text: str, origin: Optional[Union[str, DomainName]] = None) -> Zone:
    """Read zonefile text written by ``serialize_zone`` back into a Zone."""
    if origin is None:
        match = _ORIGIN_RE.search(text)
        if not match:
            raise ZonefileError("Zonefile has no $ORIGIN line and no origin was given")
        origin = match.group(1)
    origin_text = format_name(origin) if isinstance(origin, DomainName) else origin
    try:
        dzone = dns.zone.from_text(text, origin=origin_text, relativize=False, check_origin=True)
    except (dns.exception.DNSException, ValueError) as exc:
        raise ZonefileError(f"Cannot parse zonefile for {origin_text}: {exc}") from exc

    apex = DomainName.from_dns(dzone.origin)
    rdatasets: Dict[Tuple[DomainName, str], list] = {}
    rrsigs: List[SignatureRecord] = []
    ttl = 0
    for name, node in dzone.nodes.items():
        owner = DomainName.from_dns(name)
        for rdataset in node.rdatasets:
            rdtype = dns.rdatatype.to_text(rdataset.rdtype)
            if rdtype == "RRSIG":
                for rdata in rdataset:
                    rrsigs.append(SignatureRecord(owner, dns.rdatatype.to_text(rdata.type_covered), rdata))
                continue
            rdatasets[(owner, rdtype)] = list(rdataset)
            if owner == apex and rdtype == "SOA":
                ttl = rdataset.ttl

    try:
        soa = rdatasets[(apex, "SOA")][0]
        ns = tuple(rdatasets[(apex, "NS")])
        param_rdata = rdatasets[(apex, "NSEC3PARAM")][0]
    except KeyError as exc:
        raise ZonefileError(f"Zone {apex} lacks required apex record {exc.args[0][1]}") from exc

    nameserver = DomainName.from_dns(ns[0].target)
    params = Nsec3Params(
        algorithm=param_rdata.algorithm,
        flags=param_rdata.flags,
        iterations=param_rdata.iterations,
        salt=bytes(param_rdata.salt),
    )
    try:
        chain = sorted(
            (
                Nsec3Record.from_rdata(base32hex_decode(owner.labels[0].decode("ascii")), rdatas[0])
                for (owner, rdtype), rdatas in rdatasets.items()
                if rdtype == "NSEC3"
            ),
            key=lambda rec: rec.owner_hash,
        )
    except ForgeError as exc:
        raise ZonefileError(f"Malformed NSEC3 owner in {apex}: {exc.message}") from exc
    if not chain:
        raise ZonefileError(f"Zone {apex} has no NSEC3 chain")

    record_params = chain[0].params
    hasher = Nsec3Hasher(record_params)
    in_zone = nameserver.is_subdomain_of(apex)
    hashes = ZoneHashes(
        origin=hasher(apex),
        wildcard=hasher(apex.child("*")),
        nameserver=hasher(nameserver) if in_zone else None,
    )
    dnskey = tuple(rdatasets.get((apex, "DNSKEY"), ()))
    a = tuple(rdatasets.get((nameserver, "A"), ())) if in_zone else ()
    return Zone(
        origin=apex,
        nameserver_name=nameserver,
        params=params,
        ttl=ttl,
        key_size_bits=_rsa_modulus_bits(dnskey[-1]) if dnskey else 0,
        soa=soa,
        ns=ns,
        a=a,
        nsec3_chain=tuple(chain),
        hashes=hashes,
        algorithm=dnskey[0].algorithm if dnskey else 7,
        dnskey=dnskey,
        rrsigs=tuple(rrsigs),
    )


def zone_filename(origin: DomainName) -> str:
    return f"{format_name(origin)}zone"


def write_zone_files(zone: Zone, out_dir: Union[str, Path]) -> List[Path]:
    """Write ``‹origin›.zone`` and, for signed zones, ``‹origin›.parent.zone``."""
    out_path = Path(out_dir)
    try:
        out_path.mkdir(parents=True, exist_ok=True)
        zone_path = out_path / zone_filename(zone.origin)
        zone_path.write_text(serialize_zone(zone), encoding="utf-8")
        written = [zone_path]
        stub = build_parent_stub(zone)
        if stub:
            stub_path = out_path / f"{format_name(zone.origin)}parent.zone"
            stub_path.write_text(stub, encoding="utf-8")
            written.append(stub_path)
    except OSError as exc:
        raise DatasetError(f"Cannot write zone files to {out_path}: {exc}") from exc
    logger.info(f"Wrote {', '.join(p.name for p in written)}")
    return written
