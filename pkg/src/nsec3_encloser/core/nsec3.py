"""
Iterated salted NSEC3 hashing with exact SHA-1 block accounting.

The engine owns cost accounting; digests come from hashlib. Compression
blocks are derived from the length of every buffer actually fed to SHA-1,
so the meter follows the buffers hashlib actually sees.
"""

import hashlib
import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, Optional, Tuple

from ..utils.exceptions import ConfigurationError, UnsupportedAlgorithmError
from .names import HASH_LEN, DomainName, Hash160, to_wire

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 65535
MAX_SALT_LEN = 255
SHA1_BLOCK = 64


class HashAlgorithm(IntEnum):
    SHA1 = 1


# digest length per algorithm; a new algorithm adds an entry here
DIGEST_LENGTHS: Dict[HashAlgorithm, int] = {HashAlgorithm.SHA1: HASH_LEN}


@dataclass(frozen=True)
class Nsec3Params:
    """The NSEC3PARAM payload governing a zone's hash chain."""

    algorithm: int = HashAlgorithm.SHA1
    flags: int = 0
    iterations: int = 0
    salt: bytes = b""

    def __post_init__(self):
        if self.algorithm not in DIGEST_LENGTHS:
            raise UnsupportedAlgorithmError(
                f"Unsupported NSEC3 hash algorithm {self.algorithm}",
                details={"algorithm": self.algorithm},
            )
        if not 0 <= self.flags <= 255:
            raise ConfigurationError(f"NSEC3 flags {self.flags} outside 0..255", config_key="flags")
        if not 0 <= self.iterations <= MAX_ITERATIONS:
            raise ConfigurationError(
                f"Iterations {self.iterations} outside 0..{MAX_ITERATIONS}", config_key="iterations"
            )
        if len(self.salt) > MAX_SALT_LEN:
            raise ConfigurationError(
                f"Salt of {len(self.salt)} bytes exceeds {MAX_SALT_LEN}", config_key="salt"
            )

    @property
    def salt_len(self) -> int:
        return len(self.salt)

    @property
    def salt_text(self) -> str:
        return self.salt.hex().upper() if self.salt else "-"

    def __str__(self) -> str:
        return f"{int(self.algorithm)} {self.flags} {self.iterations} {self.salt_text}"


@dataclass
class CostMeter:
    """Counters for hashing work. Single owner; never shared between tasks."""

    hash_calls: int = 0
    compression_blocks: int = 0
    chain_evaluations: int = 0

    def snapshot(self) -> "CostMeter":
        return CostMeter(self.hash_calls, self.compression_blocks, self.chain_evaluations)

    def add(self, other: "CostMeter") -> None:
        self.hash_calls += other.hash_calls
        self.compression_blocks += other.compression_blocks
        self.chain_evaluations += other.chain_evaluations

    def to_dict(self) -> Dict[str, int]:
        return {
            "hash_calls": self.hash_calls,
            "compression_blocks": self.compression_blocks,
            "chain_evaluations": self.chain_evaluations,
        }


def sha1_blocks(message_len: int) -> int:
    """Compression invocations for a message: one 0x80 byte and 8 length bytes of padding."""
    return (message_len + 8) // SHA1_BLOCK + 1


def hash_cost_blocks(name_wire_len: int, params: Nsec3Params) -> int:
    salt_len = params.salt_len
    digest_len = DIGEST_LENGTHS[HashAlgorithm(params.algorithm)]
    return sha1_blocks(name_wire_len + salt_len) + params.iterations * sha1_blocks(digest_len + salt_len)


def nsec3_hash(name: DomainName, params: Nsec3Params, meter: Optional[CostMeter] = None) -> Hash160:
    """RFC5155 iterated hash of ``name``: iterations+1 SHA-1 calls, salt appended each time."""
    if params.algorithm != HashAlgorithm.SHA1:
        raise UnsupportedAlgorithmError(f"Unsupported NSEC3 hash algorithm {params.algorithm}")
    salt = params.salt
    buffer = to_wire(name) + salt
    blocks = sha1_blocks(len(buffer))
    digest = hashlib.sha1(buffer).digest()
    for _ in range(params.iterations):
        # previous digest followed by the salt
        buffer = digest + salt
        blocks += sha1_blocks(len(buffer))
        digest = hashlib.sha1(buffer).digest()
    if meter is not None:
        meter.hash_calls += params.iterations + 1
        meter.compression_blocks += blocks
        meter.chain_evaluations += 1
    return Hash160(digest)


class Nsec3Hasher:
    """Hashes names with an optional memo keyed by (name, params).

    With memoisation on, a repeated name is charged to the meter once.
    """

    def __init__(self, params: Nsec3Params, meter: Optional[CostMeter] = None, memoize: bool = True):
        self.params = params
        self.meter = meter if meter is not None else CostMeter()
        self.memoize = memoize
        self._memo: Dict[Tuple[DomainName, Nsec3Params], Hash160] = {}

    def __call__(self, name: DomainName) -> Hash160:
        key = (name, self.params)
        if self.memoize and key in self._memo:
            return self._memo[key]
        digest = nsec3_hash(name, self.params, self.meter)
        if self.memoize:
            self._memo[key] = digest
        return digest


_MODULUS = 1 << (8 * HASH_LEN)


def hash_inc(h: Hash160) -> Hash160:
    return Hash160.from_int((h.as_int + 1) % _MODULUS)


def hash_dec(h: Hash160) -> Hash160:
    return Hash160.from_int((h.as_int - 1) % _MODULUS)


def matches(owner: Hash160, target: Hash160) -> bool:
    return owner == target


def covers(owner: Hash160, next_hash: Hash160, target: Hash160) -> bool:
    """Strict circular-interval test.

    ``owner == next_hash`` denotes a single-record chain covering every
    hash except the owner.
    """
    if owner == next_hash:
        return target != owner
    if owner < next_hash:
        return owner < target < next_hash
    return target > owner or target < next_hash
