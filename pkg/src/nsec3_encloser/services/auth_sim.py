"""
Authoritative-side denial synthesis over an in-memory zone.

Given a query, the server proves the closest encloser (matching record),
the non-existence of the next closer name and of the wildcard at the
closest encloser (covering records). Records cited twice are sent once.
"""

import bisect
import logging
from typing import List, Tuple, Union

from ..core.names import DomainName, Hash160
from ..core.nsec3 import nsec3_hash
from ..models.response_models import NegativeResponse, PositiveAnswer, Rcode
from ..models.zone_models import Nsec3Record, SignatureRecord, Zone
from ..utils.exceptions import ZoneScopeError

logger = logging.getLogger(__name__)


def _require_in_zone(zone: Zone, qname: DomainName) -> None:
    if not qname.is_subdomain_of(zone.origin):
        raise ZoneScopeError(
            f"{qname} is not at or below {zone.origin}",
            details={"qname": str(qname), "origin": str(zone.origin)},
        )


def find_closest_encloser(zone: Zone, qname: DomainName) -> DomainName:
    """Longest existing ancestor of ``qname`` (``qname`` itself if it exists)."""
    _require_in_zone(zone, qname)
    existing = set(zone.names)
    for candidate in qname.ancestors():
        if candidate in existing:
            return candidate
    # origin always exists, so the loop returns before leaving the zone
    return zone.origin


def next_closer_name(qname: DomainName, closest_encloser: DomainName) -> DomainName:
    return DomainName(qname.labels[len(qname.labels) - len(closest_encloser.labels) - 1:])


def _known_hash(zone: Zone, name: DomainName) -> Hash160:
    hashes = zone.hashes
    if name == zone.origin:
        return hashes.origin
    if name == zone.origin.child("*"):
        return hashes.wildcard
    if hashes.nameserver is not None and name == zone.nameserver_name:
        return hashes.nameserver
    return nsec3_hash(name, _chain_params(zone))


def _chain_params(zone: Zone):
    return zone.nsec3_chain[0].params if zone.nsec3_chain else zone.params


def covering_record(zone: Zone, target: Hash160) -> Nsec3Record:
    """Record whose circular interval contains ``target`` (largest owner below it, wrapping)."""
    chain = zone.nsec3_chain
    owners = [rec.owner_hash for rec in chain]
    index = bisect.bisect_left(owners, target) - 1
    return chain[index]


def matching_record(zone: Zone, target: Hash160) -> Union[Nsec3Record, None]:
    return zone.record_for_owner(target)


def _signatures(zone: Zone, records: List[Nsec3Record]) -> Tuple[SignatureRecord, ...]:
    sigs: List[SignatureRecord] = []
    for rec in records:
        sigs.extend(zone.signatures_for(rec.owner_name(zone.origin), "NSEC3"))
    sigs.extend(zone.signatures_for(zone.origin, "SOA"))
    return tuple(sigs)


def _dedup(records: List[Nsec3Record]) -> List[Nsec3Record]:
    seen = set()
    unique = []
    for rec in records:
        if rec.owner_hash not in seen:
            seen.add(rec.owner_hash)
            unique.append(rec)
    return unique


def answer_query(zone: Zone, qname: DomainName, qtype: str = "A") -> Union[NegativeResponse, PositiveAnswer]:
    """Answer ``qname``/``qtype`` from ``zone``.

    Raises:
        ZoneScopeError: qname is outside the zone.
    """
    qtype = qtype.upper()
    encloser = find_closest_encloser(zone, qname)

    if encloser == qname:
        records = zone.rdatas(qname, qtype)
        if records:
            return PositiveAnswer(
                qname=qname,
                qtype=qtype,
                records=records,
                rrsigs=zone.signatures_for(qname, qtype),
            )
        proof = [rec for rec in (matching_record(zone, _known_hash(zone, qname)),) if rec is not None]
        return NegativeResponse(
            qname=qname,
            qtype=qtype,
            rcode=Rcode.NOERROR,
            nsec3_records=tuple(proof),
            rrsigs=_signatures(zone, proof),
            soa=zone.soa,
            soa_owner=zone.origin,
            closest_encloser=encloser,
        )

    encloser_hash = _known_hash(zone, encloser)
    next_closer = next_closer_name(qname, encloser)
    next_closer_hash = nsec3_hash(next_closer, _chain_params(zone))
    wildcard_hash = _known_hash(zone, encloser.child("*"))

    cited = []
    encloser_record = matching_record(zone, encloser_hash)
    if encloser_record is not None:
        cited.append(encloser_record)
    cited.append(covering_record(zone, next_closer_hash))
    cited.append(covering_record(zone, wildcard_hash))
    proof = _dedup(cited)

    logger.debug(f"{qname}: encloser {encloser}, {len(proof)} NSEC3 records")
    return NegativeResponse(
        qname=qname,
        qtype=qtype,
        rcode=Rcode.NXDOMAIN,
        nsec3_records=tuple(proof),
        rrsigs=_signatures(zone, proof),
        soa=zone.soa,
        soa_owner=zone.origin,
        closest_encloser=encloser,
    )
