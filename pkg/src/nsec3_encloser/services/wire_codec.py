"""
DNS wire messages for the scanner.

Responses synthesized by the authoritative simulator are rendered as real
dnspython messages, so fixture playback and live UDP probes share the
same decoding path.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import dns.exception
import dns.flags
import dns.message
import dns.name
import dns.rcode
import dns.rdataclass
import dns.rdatatype
import dns.rrset

from ..core.names import DomainName, format_name
from ..models.response_models import NegativeResponse, PositiveAnswer, Rcode
from ..models.scan_models import DenialType
from ..models.zone_models import SignatureRecord, Zone
from ..utils.exceptions import TransportError
from .auth_sim import answer_query

logger = logging.getLogger(__name__)

PROBE_TYPES = ("SOA", "DNSKEY", "DS", "PTR")


@dataclass(frozen=True)
class ProbeResponse:
    """Fields the scanner reads from one response."""

    rcode: str
    answer_types: frozenset
    authority_types: frozenset
    nsec3_params: Optional[Tuple[int, int]] = None


def fixture_key(name: Union[str, DomainName], qtype: str) -> str:
    text = format_name(name) if isinstance(name, DomainName) else name.lower()
    if not text.endswith("."):
        text += "."
    return f"{text} {qtype.upper()}"


def build_query(qname: DomainName, qtype: str) -> dns.message.QueryMessage:
    """EDNS query with the DO bit set, recursion not desired."""
    query = dns.message.make_query(qname.to_dns(), qtype, want_dnssec=True)
    query.flags &= ~dns.flags.RD
    return query


def _rrset(name: DomainName, ttl: int, rdatas) -> dns.rrset.RRset:
    return dns.rrset.from_rdata_list(name.to_dns(), ttl, list(rdatas))


def _sig_rrsets(sigs: Tuple[SignatureRecord, ...], ttl: int):
    grouped: Dict[Tuple[DomainName, str], list] = {}
    for sig in sigs:
        grouped.setdefault((sig.owner, sig.type_covered), []).append(sig.rdata)
    return [_rrset(owner, ttl, rdatas) for (owner, _), rdatas in grouped.items()]


def response_to_message(
    query: dns.message.Message,
    response: Union[NegativeResponse, PositiveAnswer],
    zone: Zone
) -> dns.message.Message:
    """Render a simulated answer as an authoritative wire response to ``query``."""
    message = dns.message.make_response(query)
    message.flags |= dns.flags.AA
    if isinstance(response, PositiveAnswer):
        message.answer.append(_rrset(response.qname, zone.ttl, response.records))
        message.answer.extend(_sig_rrsets(response.rrsigs, zone.ttl))
        return message

    if response.rcode == Rcode.NXDOMAIN:
        message.set_rcode(dns.rcode.NXDOMAIN)
    if response.soa is not None:
        message.authority.append(_rrset(response.soa_owner or zone.origin, zone.ttl, (response.soa,)))
    for record in response.nsec3_records:
        message.authority.append(_rrset(record.owner_name(zone.origin), zone.ttl, (record.to_rdata(),)))
    message.authority.extend(_sig_rrsets(response.rrsigs, zone.ttl))
    return message


def decode_message(wire: bytes) -> dns.message.Message:
    try:
        return dns.message.from_wire(wire)
    except dns.exception.DNSException as exc:
        raise TransportError(f"Malformed DNS response: {exc}", kind="malformed") from exc


def summarize_response(message: dns.message.Message) -> ProbeResponse:
    """Record types present and the NSEC3 (iterations, salt length) of the first NSEC3 record."""
    nsec3_params = None
    for rrset in message.authority:
        if rrset.rdtype == dns.rdatatype.NSEC3 and len(rrset):
            rdata = next(iter(rrset))
            nsec3_params = (rdata.iterations, len(rdata.salt))
            break
    return ProbeResponse(
        rcode=dns.rcode.to_text(message.rcode()),
        answer_types=frozenset(dns.rdatatype.to_text(r.rdtype) for r in message.answer if len(r)),
        authority_types=frozenset(dns.rdatatype.to_text(r.rdtype) for r in message.authority if len(r)),
        nsec3_params=nsec3_params,
    )


def denial_type(response: ProbeResponse) -> Optional[DenialType]:
    if "NSEC3" in response.authority_types:
        return DenialType.NSEC3
    if "NSEC" in response.authority_types:
        return DenialType.NSEC
    return None


def build_zone_fixtures(zone: Zone) -> Dict[str, bytes]:
    """Wire responses for every probe the scanner sends to ``zone``'s apex.

    The DS answer carries the DS set of a signed zone.
    """
    fixtures: Dict[str, bytes] = {}
    for qtype in PROBE_TYPES:
        query = build_query(zone.origin, qtype)
        message = response_to_message(query, answer_query(zone, zone.origin, qtype), zone)
        fixtures[fixture_key(zone.origin, qtype)] = message.to_wire()
    logger.debug(f"Built {len(fixtures)} wire fixtures for {zone.origin}")
    return fixtures
