"""
Custom exceptions for the NSEC3 encloser forge.
"""

from typing import Optional, Dict, Any


class ForgeError(Exception):
    """Base class for every domain error raised by the toolkit.

    Attributes:
        message -- explanation of the error
        code -- error code for categorization
        details -- additional error details
    """

    default_code = "FORGE_ERROR"

    def __init__(
        self,
        message: str,
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.code = code or self.default_code
        self.details = details or {}
        super().__init__(self.message)

    def __str__(self) -> str:
        error_str = f"[{self.code}] {self.message}"
        if self.details:
            error_str += f"\nDetails: {self.details}"
        return error_str

    def to_dict(self) -> Dict[str, Any]:
        """Convert the error to a dictionary format."""
        return {
            'error': self.code,
            'message': self.message,
            'details': self.details
        }


class InvalidNameError(ForgeError):
    """Raised when a domain name violates label or length rules."""
    default_code = "NAME_INVALID"


class InvalidHashError(ForgeError):
    """Raised for malformed base32hex hash text."""
    default_code = "HASH_INVALID"


class UnsupportedAlgorithmError(ForgeError):
    default_code = "ALGORITHM_UNSUPPORTED"


class ConfigurationError(ForgeError):
    """Exception raised for configuration-related errors.

    Attributes:
        config_key -- the configuration key that caused the error
    """

    default_code = "CONFIG_INVALID"

    def __init__(
        self,
        message: str,
        config_key: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        self.config_key = config_key
        details = dict(details or {})
        if config_key:
            details.setdefault('config_key', config_key)
        super().__init__(message, details=details)


class HashCollisionError(ForgeError):
    """Raised when the attack chain hashes are not pairwise distinct."""
    default_code = "HASH_COLLISION"


class ZoneScopeError(ForgeError):
    """Raised when a query name is not at or below the zone origin."""
    default_code = "OUTSIDE_ZONE"


class NoEncloserFoundError(ForgeError):
    default_code = "NO_ENCLOSER"


class SignerError(ForgeError):
    default_code = "SIGNER_FAILED"


class ZonefileError(ForgeError):
    default_code = "ZONEFILE_INVALID"


class QnameConstructionError(ForgeError):
    default_code = "QNAME_TOO_LONG"


class TransportError(ForgeError):
    """Raised by scan transports.

    Attributes:
        kind -- 'timeout', 'malformed', 'unreachable' or 'no_nameserver'
    """

    default_code = "TRANSPORT_FAILED"

    def __init__(self, message: str, kind: str = "timeout", details: Optional[Dict[str, Any]] = None):
        self.kind = kind
        super().__init__(message, details=details)


class DatasetError(ForgeError):
    default_code = "DATASET_IO"


class InvariantViolation(ForgeError):
    default_code = "INVARIANT_VIOLATION"
