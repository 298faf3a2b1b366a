"""Tests for the deterministic and RSA zone signers"""

import dns.dnssec
import dns.name
import dns.rdataclass
import dns.rdatatype
import dns.rrset
import pytest

from nsec3_encloser.services.signers import KSK_FLAGS, ZSK_FLAGS, RsaSigner, TestSigner, get_signer
from nsec3_encloser.utils.exceptions import SignerError

ORIGIN = dns.name.from_text("ex00.nsec3.example.org.")
NS = "ns1.ex00.nsec3.example.org."


def _soa_rrset():
    return dns.rrset.from_text(
        ORIGIN, 0, dns.rdataclass.IN, dns.rdatatype.SOA, f"{NS} {NS} 0 0 0 10 0"
    )


def test_test_signer_is_deterministic():
    """Test equal seeds give equal keys and signatures"""
    first, second = TestSigner(seed=4), TestSigner(seed=4)
    keys = first.make_keys(ORIGIN, 2048)
    assert keys == second.make_keys(ORIGIN, 2048)
    assert first.sign_rrset(_soa_rrset(), keys.zsk, ORIGIN) == second.sign_rrset(_soa_rrset(), keys.zsk, ORIGIN)
    assert TestSigner(seed=5).make_keys(ORIGIN, 2048) != keys


@pytest.mark.parametrize("bits", [1024, 2048, 4096])
def test_test_signer_key_shape(bits):
    """Test key flags and RSA-sized keys and signatures"""
    signer = TestSigner()
    keys = signer.make_keys(ORIGIN, bits)
    assert keys.ksk.dnskey.flags == KSK_FLAGS
    assert keys.zsk.dnskey.flags == ZSK_FLAGS
    assert len(keys.zsk.dnskey.key) == 4 + bits // 8
    rrsig = signer.sign_rrset(_soa_rrset(), keys.zsk, ORIGIN)
    assert len(rrsig.signature) == bits // 8
    assert rrsig.key_tag == keys.zsk.key_tag
    assert rrsig.labels == 4


def test_signature_window():
    """Test expiration must follow inception"""
    with pytest.raises(SignerError):
        TestSigner(inception=100, expiration=100)


def test_get_signer():
    assert isinstance(get_signer("test", seed=2), TestSigner)
    assert isinstance(get_signer("rsa"), RsaSigner)
    with pytest.raises(SignerError):
        get_signer("hsm")


@pytest.mark.slow
def test_rsa_signatures_validate():
    """Test RSA signatures verify against their DNSKEY"""
    signer = RsaSigner()
    keys = signer.make_keys(ORIGIN, 1024)
    rrset = _soa_rrset()
    rrsig = signer.sign_rrset(rrset, keys.zsk, ORIGIN)
    sig_rrset = dns.rrset.from_rdata(ORIGIN, 0, rrsig)
    dns.dnssec.validate(
        rrset,
        sig_rrset,
        {ORIGIN: dns.rrset.from_rdata(ORIGIN, 0, keys.zsk.dnskey)},
        now=signer.inception + 10,
        policy=dns.dnssec.allow_all_policy,
    )
