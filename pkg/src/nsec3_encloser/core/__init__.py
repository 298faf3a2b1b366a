from .names import (
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
from .nsec3 import (
    CostMeter,
    HashAlgorithm,
    Nsec3Hasher,
    Nsec3Params,
    covers,
    hash_cost_blocks,
    hash_dec,
    hash_inc,
    matches,
    nsec3_hash,
    sha1_blocks,
)

__all__ = [
    "ROOT", "DomainName", "Hash160", "base32hex_decode", "base32hex_encode", "format_name",
    "parse_name", "strip_leftmost_label", "to_wire", "wire_len",
    "CostMeter", "HashAlgorithm", "Nsec3Hasher", "Nsec3Params", "covers", "hash_cost_blocks",
    "hash_dec", "hash_inc", "matches", "nsec3_hash", "sha1_blocks",
]
