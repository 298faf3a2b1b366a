"""
Zone signers.

``TestSigner`` produces reproducible, RSA-shaped keys and signatures from a
seed; they are structurally valid but carry no cryptographic meaning.
``RsaSigner`` generates real RSA keys and signs through dnspython.
"""

import hashlib
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Optional

import dns.dnssec
import dns.exception
import dns.name
import dns.rdataclass
import dns.rdatatype
import dns.rrset
from dns.rdtypes.ANY.DNSKEY import DNSKEY
from dns.rdtypes.ANY.RRSIG import RRSIG
from cryptography.hazmat.primitives.asymmetric import rsa

from ..config.settings import get_settings
from ..utils.exceptions import SignerError

logger = logging.getLogger(__name__)

KSK_FLAGS = 257
ZSK_FLAGS = 256


@dataclass(frozen=True)
class SigningKey:
    dnskey: DNSKEY
    private: Any = None

    @property
    def key_tag(self) -> int:
        return dns.dnssec.key_id(self.dnskey)


@dataclass(frozen=True)
class SigningKeys:
    ksk: SigningKey
    zsk: SigningKey


class SignerInterface(ABC):
    """Creates zone keys and signs RRsets."""

    name = "abstract"
    cryptographic = False

    def __init__(
        self,
        algorithm: int = 7,
        inception: Optional[int] = None,
        expiration: Optional[int] = None
    ):
        settings = get_settings()
        self.algorithm = algorithm
        self.inception = inception if inception is not None else settings.SIGNATURE_INCEPTION
        self.expiration = expiration if expiration is not None else settings.SIGNATURE_EXPIRATION
        if self.expiration <= self.inception:
            raise SignerError(
                "Signature expiration must follow inception",
                details={"inception": self.inception, "expiration": self.expiration},
            )

    @abstractmethod
    def make_keys(self, origin: dns.name.Name, key_size_bits: int) -> SigningKeys:
        """Return KSK and ZSK for the zone."""

    @abstractmethod
    def sign_rrset(self, rrset: dns.rrset.RRset, key: SigningKey, signer: dns.name.Name) -> RRSIG:
        """Return one RRSIG over ``rrset``."""


class TestSigner(SignerInterface):
    """Deterministic placeholder signer; the default for experiments and tests."""

    __test__ = False  # not a pytest class
    name = "test"
    cryptographic = False

    def __init__(self, seed: int = 0, **kwargs):
        super().__init__(**kwargs)
        self.seed = seed

    def _stream(self, *parts: bytes, length: int) -> bytes:
        shake = hashlib.shake_256()
        shake.update(str(self.seed).encode("ascii"))
        for part in parts:
            shake.update(b"|" + part)
        return shake.digest(length)

    def _dnskey(self, origin: dns.name.Name, key_size_bits: int, flags: int, role: bytes) -> DNSKEY:
        modulus = bytearray(self._stream(origin.to_wire(), role, length=key_size_bits // 8))
        modulus[0] |= 0x80
        modulus[-1] |= 0x01
        # RFC3110 layout: exponent length, exponent 65537, modulus
        public_key = b"\x03\x01\x00\x01" + bytes(modulus)
        return DNSKEY(dns.rdataclass.IN, dns.rdatatype.DNSKEY, flags, 3, self.algorithm, public_key)

    def make_keys(self, origin: dns.name.Name, key_size_bits: int) -> SigningKeys:
        return SigningKeys(
            ksk=SigningKey(self._dnskey(origin, key_size_bits, KSK_FLAGS, b"ksk")),
            zsk=SigningKey(self._dnskey(origin, key_size_bits, ZSK_FLAGS, b"zsk")),
        )

    def sign_rrset(self, rrset: dns.rrset.RRset, key: SigningKey, signer: dns.name.Name) -> RRSIG:
        modulus_len = len(key.dnskey.key) - 4
        rdata_blob = b"".join(sorted(rd.to_digestable() for rd in rrset))
        signature = self._stream(
            rrset.name.to_wire(),
            int(rrset.rdtype).to_bytes(2, "big"),
            rdata_blob,
            str(key.key_tag).encode("ascii"),
            length=modulus_len,
        )
        return RRSIG(
            dns.rdataclass.IN,
            dns.rdatatype.RRSIG,
            rrset.rdtype,
            self.algorithm,
            len(rrset.name) - 1,
            rrset.ttl,
            self.expiration,
            self.inception,
            key.key_tag,
            signer,
            signature,
        )


class RsaSigner(SignerInterface):
    """Real RSA signatures via the cryptography provider."""

    name = "rsa"
    cryptographic = True

    def make_keys(self, origin: dns.name.Name, key_size_bits: int) -> SigningKeys:
        logger.info(f"Generating {key_size_bits}-bit RSA keys for {origin}")
        try:
            keys = []
            for flags in (KSK_FLAGS, ZSK_FLAGS):
                private = rsa.generate_private_key(public_exponent=65537, key_size=key_size_bits)
                dnskey = dns.dnssec.make_dnskey(private.public_key(), self.algorithm, flags=flags)
                keys.append(SigningKey(dnskey, private))
        except (ValueError, TypeError, dns.dnssec.UnsupportedAlgorithm) as exc:
            raise SignerError(f"Cannot create RSA keys: {exc}", details={"algorithm": self.algorithm}) from exc
        return SigningKeys(ksk=keys[0], zsk=keys[1])

    def sign_rrset(self, rrset: dns.rrset.RRset, key: SigningKey, signer: dns.name.Name) -> RRSIG:
        try:
            return dns.dnssec.sign(
                rrset,
                key.private,
                signer,
                key.dnskey,
                inception=self.inception,
                expiration=self.expiration,
                policy=dns.dnssec.allow_all_policy,
            )
        except dns.exception.DNSException as exc:
            raise SignerError(f"Signing {rrset.name}/{dns.rdatatype.to_text(rrset.rdtype)} failed: {exc}") from exc


def get_signer(name: str, seed: int = 0, algorithm: int = 7) -> SignerInterface:
    if name == TestSigner.name:
        return TestSigner(seed=seed, algorithm=algorithm)
    if name == RsaSigner.name:
        return RsaSigner(algorithm=algorithm)
    raise SignerError(f"Unknown signer '{name}'", details={"known": ["test", "rsa"]})
