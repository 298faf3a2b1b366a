"""
Tests for DNS wire messages exchanged with the scanner.
"""

import dns.flags
import dns.message
import dns.rcode
import dns.rdatatype
import pytest

from nsec3_encloser.core.names import parse_name
from nsec3_encloser.models.scan_models import DenialType
from nsec3_encloser.services.auth_sim import answer_query
from nsec3_encloser.services.wire_codec import (
    PROBE_TYPES,
    ProbeResponse,
    build_query,
    build_zone_fixtures,
    decode_message,
    denial_type,
    fixture_key,
    response_to_message,
    summarize_response,
)
from nsec3_encloser.utils.exceptions import TransportError


def test_fixture_key():
    assert fixture_key(parse_name("Example.ORG"), "soa") == "example.org. SOA"
    assert fixture_key("Example.org", "ptr") == "example.org. PTR"


def test_build_query(origin):
    """Test probes ask for DNSSEC records without recursion"""
    query = build_query(origin, "DNSKEY")
    assert not query.flags & dns.flags.RD
    assert query.ednsflags & dns.flags.DO
    assert query.question[0].rdtype == dns.rdatatype.DNSKEY


def test_zone_fixtures(signed_zone, origin):
    """Test the apex probes of a signed zone"""
    fixtures = build_zone_fixtures(signed_zone)
    assert set(fixtures) == {f"ex00.nsec3.example.org. {qtype}" for qtype in PROBE_TYPES}

    summaries = {key.split()[1]: summarize_response(decode_message(wire)) for key, wire in fixtures.items()}
    assert summaries["SOA"].answer_types == {"SOA", "RRSIG"}
    assert summaries["DNSKEY"].answer_types == {"DNSKEY", "RRSIG"}
    assert summaries["DS"].answer_types == {"DS"}
    ptr = summaries["PTR"]
    assert ptr.rcode == "NOERROR"
    assert ptr.answer_types == frozenset()
    assert "NSEC3" in ptr.authority_types
    assert ptr.nsec3_params == (10, 4)
    assert denial_type(ptr) == DenialType.NSEC3


def test_unsigned_zone_has_no_ds(forged_zone):
    fixtures = build_zone_fixtures(forged_zone)
    ds = summarize_response(decode_message(fixtures["ex00.nsec3.example.org. DS"]))
    assert ds.answer_types == frozenset()


def test_nxdomain_message(signed_zone, origin):
    """Test a denial renders as an authoritative NXDOMAIN with three NSEC3 RRsets"""
    qname = origin.child("missing")
    query = build_query(qname, "A")
    message = response_to_message(query, answer_query(signed_zone, qname, "A"), signed_zone)
    decoded = decode_message(message.to_wire())
    assert decoded.rcode() == dns.rcode.NXDOMAIN
    assert decoded.flags & dns.flags.AA
    nsec3 = [rrset for rrset in decoded.authority if rrset.rdtype == dns.rdatatype.NSEC3]
    assert len(nsec3) == 3
    assert len(decoded.find_rrset(decoded.authority, origin.to_dns(), 1, dns.rdatatype.SOA)) == 1


def test_malformed_wire():
    with pytest.raises(TransportError) as exc_info:
        decode_message(b"\x00\x01")
    assert exc_info.value.kind == "malformed"


@pytest.mark.parametrize(
    "authority,expected",
    [
        ({"NSEC3", "RRSIG", "SOA"}, DenialType.NSEC3),
        ({"NSEC", "RRSIG", "SOA"}, DenialType.NSEC),
        ({"NSEC", "NSEC3"}, DenialType.NSEC3),
        ({"SOA"}, None),
    ],
)
def test_denial_type(authority, expected):
    response = ProbeResponse(rcode="NXDOMAIN", answer_types=frozenset(), authority_types=frozenset(authority))
    assert denial_type(response) == expected
