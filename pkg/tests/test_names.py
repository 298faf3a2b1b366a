"""
Tests for domain names, base32hex and hash values.
"""

import pytest

from nsec3_encloser.core.names import (
    ROOT,
    DomainName,
    Hash160,
    base32hex_decode,
    base32hex_encode,
    format_name,
    parse_name,
    strip_leftmost_label,
    to_wire,
    wire_len,
)
from nsec3_encloser.utils.exceptions import InvalidHashError, InvalidNameError


def test_parse_and_format():
    """Test names are lowercased and always absolute"""
    name = parse_name("Example.COM")
    assert name.labels == (b"example", b"com")
    assert format_name(name) == "example.com."
    assert parse_name("example.com.") == name
    assert parse_name(".") == ROOT
    assert format_name(ROOT) == "."


def test_wire_length():
    """Test wire length counts length octets and the root label"""
    origin = parse_name("ex00.nsec3.example.org.")
    assert wire_len(origin) == 24
    assert len(to_wire(origin)) == 24
    assert wire_len(ROOT) == 1


@pytest.mark.parametrize(
    "text",
    [
        "a" * 64 + ".example.",
        ".".join(["abcdefghi"] * 26) + ".",
        "a..b.",
    ],
)
def test_invalid_names(text):
    """Test label, length and empty-label violations"""
    with pytest.raises(InvalidNameError):
        parse_name(text)


def test_name_at_wire_limit():
    """Test a 255-byte name is accepted"""
    name = parse_name(".".join(["a"] * 127) + ".")
    assert name.wire_len == 255


def test_uppercase_labels_rejected():
    """Test the dataclass refuses non-canonical labels"""
    with pytest.raises(InvalidNameError):
        DomainName((b"Example",))


def test_strip_and_ancestors():
    """Test slicing from the leftmost label down to root"""
    name = parse_name("a.b.example.")
    assert strip_leftmost_label(name) == parse_name("b.example.")
    chain = [format_name(n) for n in name.ancestors()]
    assert chain == ["a.b.example.", "b.example.", "example.", "."]
    with pytest.raises(InvalidNameError):
        strip_leftmost_label(ROOT)


def test_subdomain_and_child():
    """Test subdomain checks include equality"""
    origin = parse_name("example.")
    child = origin.child("WWW")
    assert child == parse_name("www.example.")
    assert child.is_subdomain_of(origin)
    assert origin.is_subdomain_of(origin)
    assert not origin.is_subdomain_of(child)
    assert not parse_name("example.org.").is_subdomain_of(origin)
    assert origin.is_subdomain_of(ROOT)


def test_base32hex_roundtrip():
    """Test base32hex is uppercase, 32 characters and case-insensitive on input"""
    text = "0P9MHAVEQVM6T7VBL5LOP2U3T2RP3TOM"
    h = base32hex_decode(text)
    assert base32hex_encode(h) == text
    assert base32hex_decode(text.lower()) == h
    assert str(h) == text


@pytest.mark.parametrize("text", ["0P9MHAVEQVM6T7VBL5LOP2U3T2RP3TO", "0P9MHAVEQVM6T7VBL5LOP2U3T2RP3TOW"])
def test_base32hex_invalid(text):
    """Test wrong length and out-of-alphabet characters"""
    with pytest.raises(InvalidHashError):
        base32hex_decode(text)


def test_hash_ordering():
    """Test hashes order as unsigned big-endian integers and wrap"""
    low = Hash160.from_int(1)
    high = Hash160.from_int((1 << 160) - 1)
    assert low < high
    assert Hash160.from_int(1 << 160) == Hash160.from_int(0)
    with pytest.raises(InvalidHashError):
        Hash160(b"\x00" * 19)
