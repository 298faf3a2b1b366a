"""
Domain-name model, base32hex and 160-bit hash values.

Names are canonicalised (lowercased) once, at parse time, and are always
absolute. Parsing and wire encoding go through dnspython so that label and
length rules match what resolvers enforce.
"""

import base64
import binascii
import re
from dataclasses import dataclass
from typing import Iterator, Tuple, Union

import dns.exception
import dns.name

from ..utils.exceptions import InvalidHashError, InvalidNameError

HASH_LEN = 20
MAX_WIRE_LEN = 255
MAX_LABEL_LEN = 63

_B32HEX_RE = re.compile(r"^[0-9A-Va-v]{32}$")


@dataclass(frozen=True)
class DomainName:
    """Canonical absolute DNS name; ``labels`` excludes the root label."""

    labels: Tuple[bytes, ...] = ()

    def __post_init__(self):
        for label in self.labels:
            if not label:
                raise InvalidNameError("Empty label inside name", details={"labels": self.labels})
            if len(label) > MAX_LABEL_LEN:
                raise InvalidNameError(
                    f"Label longer than {MAX_LABEL_LEN} bytes",
                    details={"label": label[:16] + b"...", "length": len(label)},
                )
            if label != label.lower():
                raise InvalidNameError("Label is not in canonical lowercase form", details={"label": label})
        wire = self.wire_len
        if wire > MAX_WIRE_LEN:
            raise InvalidNameError(
                f"Name wire length {wire} exceeds {MAX_WIRE_LEN}", details={"wire_len": wire}
            )

    @property
    def absolute(self) -> bool:
        return True

    @property
    def wire_len(self) -> int:
        return sum(len(label) + 1 for label in self.labels) + 1

    @property
    def is_root(self) -> bool:
        return not self.labels

    def __len__(self) -> int:
        return len(self.labels)

    def __str__(self) -> str:
        return format_name(self)

    def to_dns(self) -> dns.name.Name:
        return dns.name.Name(self.labels + (b"",))

    @classmethod
    def from_dns(cls, name: dns.name.Name) -> "DomainName":
        if not name.is_absolute():
            raise InvalidNameError(f"Relative name '{name}' is not accepted")
        return cls(tuple(label.lower() for label in name.labels[:-1]))

    def child(self, label: Union[str, bytes]) -> "DomainName":
        if isinstance(label, str):
            label = label.encode("ascii")
        return DomainName((label.lower(),) + self.labels)

    def is_subdomain_of(self, other: "DomainName") -> bool:
        """True when ``self`` equals ``other`` or sits below it."""
        if len(other.labels) > len(self.labels):
            return False
        return not other.labels or self.labels[-len(other.labels):] == other.labels

    def ancestors(self) -> Iterator["DomainName"]:
        """Yield self, then each name obtained by stripping one more label, ending at root."""
        current = self
        yield current
        while not current.is_root:
            current = strip_leftmost_label(current)
            yield current


ROOT = DomainName(())


def parse_name(text: str) -> DomainName:
    """Parse presentation text into a canonical absolute name.

    A missing trailing dot is accepted and treated as absolute.
    """
    text = text.strip()
    if text in ("", "."):
        return ROOT
    try:
        name = dns.name.from_text(text, origin=dns.name.root)
    except dns.name.LabelTooLong as exc:
        raise InvalidNameError(f"Label longer than {MAX_LABEL_LEN} bytes in '{text}'") from exc
    except dns.name.NameTooLong as exc:
        raise InvalidNameError(f"Name '{text[:40]}...' exceeds {MAX_WIRE_LEN} bytes") from exc
    except dns.name.EmptyLabel as exc:
        raise InvalidNameError(f"Empty label in '{text}'") from exc
    except dns.exception.DNSException as exc:
        raise InvalidNameError(f"Cannot parse name '{text}': {exc}") from exc
    return DomainName.from_dns(name.canonicalize())


def format_name(name: DomainName) -> str:
    if name.is_root:
        return "."
    return name.to_dns().to_text()


def to_wire(name: DomainName) -> bytes:
    """Uncompressed RFC1035 wire encoding."""
    return name.to_dns().to_wire()


def wire_len(name: DomainName) -> int:
    return name.wire_len


def strip_leftmost_label(name: DomainName) -> DomainName:
    if name.is_root:
        raise InvalidNameError("Cannot strip a label from the root name")
    return DomainName(name.labels[1:])


@dataclass(frozen=True, order=True)
class Hash160:
    """20-byte digest ordered as a big-endian unsigned integer."""

    value: bytes

    def __post_init__(self):
        if len(self.value) != HASH_LEN:
            raise InvalidHashError(
                f"Hash must be {HASH_LEN} bytes, got {len(self.value)}",
                details={"length": len(self.value)},
            )

    @property
    def as_int(self) -> int:
        return int.from_bytes(self.value, "big")

    @classmethod
    def from_int(cls, number: int) -> "Hash160":
        return cls((number % (1 << (8 * HASH_LEN))).to_bytes(HASH_LEN, "big"))

    def __str__(self) -> str:
        return base32hex_encode(self)

    def __repr__(self) -> str:
        return f"Hash160({base32hex_encode(self)})"


def base32hex_encode(h: Hash160) -> str:
    return base64.b32hexencode(h.value).decode("ascii").rstrip("=")


def base32hex_decode(text: str) -> Hash160:
    if len(text) != 32:
        raise InvalidHashError(f"base32hex hash must be 32 characters, got {len(text)}")
    if not _B32HEX_RE.match(text):
        raise InvalidHashError(f"Invalid base32hex character in '{text}'")
    try:
        # 32 chars encode 160 bits exactly, no padding needed
        return Hash160(base64.b32hexdecode(text.upper()))
    except binascii.Error as exc:
        raise InvalidHashError(f"Cannot decode '{text}'") from exc
