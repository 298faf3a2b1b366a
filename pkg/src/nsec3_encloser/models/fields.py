"""Pydantic field types shared by the configuration models."""

from typing import Annotated, Any

from pydantic import BeforeValidator, PlainSerializer

from ..core.names import DomainName, format_name, parse_name
from ..utils.exceptions import InvalidNameError


def _coerce_name(value: Any) -> Any:
    if isinstance(value, str):
        try:
            return parse_name(value)
        except InvalidNameError as exc:
            raise ValueError(exc.message) from exc
    return value


def parse_salt(value: Any) -> Any:
    if isinstance(value, str):
        text = value.strip()
        if text in ("", "-"):
            return b""
        try:
            return bytes.fromhex(text)
        except ValueError:
            raise ValueError(f"salt must be hex text or '-', got '{text[:20]}'") from None
    return value


NameField = Annotated[
    DomainName,
    BeforeValidator(_coerce_name),
    PlainSerializer(format_name, return_type=str),
]

SaltField = Annotated[
    bytes,
    BeforeValidator(parse_salt),
    PlainSerializer(lambda salt: salt.hex() if salt else "-", return_type=str),
]
