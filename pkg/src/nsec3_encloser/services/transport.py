"""
Transports for scanner probes.

``FixtureTransport`` plays back recorded wire responses; ``UdpTransport``
queries a domain's authoritative servers (or one configured server) with
dnspython's asyncio API.
"""

import asyncio
import json
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, List, Optional, Union

import dns.asyncquery
import dns.asyncresolver
import dns.exception
import dns.message
from tenacity import AsyncRetrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..config.settings import get_settings
from ..core.names import DomainName, format_name
from ..utils.exceptions import DatasetError, TransportError
from .wire_codec import build_query, decode_message, fixture_key

logger = logging.getLogger(__name__)


class TransportInterface(ABC):
    """Sends one probe and returns the decoded response."""

    @abstractmethod
    async def query(self, qname: DomainName, qtype: str) -> dns.message.Message:
        """
        Raises:
            TransportError: timeout, malformed response or unreachable server.
        """


class FixtureTransport(TransportInterface):
    """Deterministic playback of ``"<name> <TYPE>" -> wire`` fixtures."""

    def __init__(self, fixtures: Optional[Dict[str, bytes]] = None):
        self.fixtures: Dict[str, bytes] = dict(fixtures or {})
        self.queries: List[str] = []

    def add(self, fixtures: Dict[str, bytes]) -> None:
        self.fixtures.update(fixtures)

    async def query(self, qname: DomainName, qtype: str) -> dns.message.Message:
        key = fixture_key(qname, qtype)
        self.queries.append(key)
        try:
            wire = self.fixtures[key]
        except KeyError:
            raise TransportError(f"No response for {key}", kind="timeout", details={"query": key}) from None
        return decode_message(wire)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "FixtureTransport":
        try:
            document = json.loads(Path(path).read_text(encoding="utf-8"))
            return cls({key: bytes.fromhex(value) for key, value in document.items()})
        except (OSError, ValueError, AttributeError) as exc:
            raise DatasetError(f"Cannot load fixtures from {path}: {exc}") from exc

    def save(self, path: Union[str, Path]) -> Path:
        out_path = Path(path)
        try:
            out_path.parent.mkdir(parents=True, exist_ok=True)
            out_path.write_text(
                json.dumps({key: wire.hex() for key, wire in sorted(self.fixtures.items())}, indent=1),
                encoding="utf-8",
            )
        except OSError as exc:
            raise DatasetError(f"Cannot write fixtures to {out_path}: {exc}") from exc
        return out_path


class UdpTransport(TransportInterface):
    """Live probes over UDP with retries and a per-nameserver concurrency cap."""

    def __init__(
        self,
        timeout: Optional[float] = None,
        retries: Optional[int] = None,
        nameserver: Optional[str] = None,
        per_nameserver: Optional[int] = None
    ):
        settings = get_settings()
        self.timeout = settings.SCAN_TIMEOUT if timeout is None else timeout
        self.retries = settings.SCAN_RETRIES if retries is None else retries
        self.nameserver = nameserver or settings.SCAN_NAMESERVER
        self.per_nameserver = per_nameserver or settings.PER_NAMESERVER_CONCURRENCY
        self._semaphores: Dict[str, asyncio.Semaphore] = {}
        self._nameservers: Dict[DomainName, List[str]] = {}
        self._resolver: Optional[dns.asyncresolver.Resolver] = None

    def _semaphore(self, address: str) -> asyncio.Semaphore:
        if address not in self._semaphores:
            self._semaphores[address] = asyncio.Semaphore(self.per_nameserver)
        return self._semaphores[address]

    @property
    def resolver(self) -> dns.asyncresolver.Resolver:
        """System resolver, created on first nameserver lookup."""
        if self._resolver is None:
            self._resolver = dns.asyncresolver.Resolver()
            self._resolver.lifetime = self.timeout * (self.retries + 1)
        return self._resolver

    async def _addresses(self, domain: DomainName) -> List[str]:
        if self.nameserver:
            return [self.nameserver]
        if domain not in self._nameservers:
            try:
                ns_answer = await self.resolver.resolve(domain.to_dns(), "NS")
                addresses: List[str] = []
                for ns in ns_answer:
                    a_answer = await self.resolver.resolve(ns.target, "A")
                    addresses.extend(rdata.address for rdata in a_answer)
            except (dns.exception.DNSException, OSError) as exc:
                raise TransportError(
                    f"Cannot find nameservers for {format_name(domain)}: {exc}", kind="no_nameserver"
                ) from exc
            self._nameservers[domain] = sorted(set(addresses))
        if not self._nameservers[domain]:
            raise TransportError(f"No nameserver addresses for {format_name(domain)}", kind="no_nameserver")
        return self._nameservers[domain]

    async def _send(self, query: dns.message.Message, address: str) -> dns.message.Message:
        async with self._semaphore(address):
            return await dns.asyncquery.udp(query, address, timeout=self.timeout, ignore_unexpected=True)

    async def query(self, qname: DomainName, qtype: str) -> dns.message.Message:
        address = (await self._addresses(qname))[0]
        query = build_query(qname, qtype)
        try:
            async for attempt in AsyncRetrying(
                stop=stop_after_attempt(self.retries + 1),
                wait=wait_exponential(multiplier=0.5, min=0.5, max=4),
                retry=retry_if_exception_type(dns.exception.Timeout),
                reraise=True,
            ):
                with attempt:
                    return await self._send(query, address)
        except dns.exception.Timeout as exc:
            raise TransportError(f"{fixture_key(qname, qtype)} timed out at {address}", kind="timeout") from exc
        except dns.exception.DNSException as exc:
            raise TransportError(f"Malformed response from {address}: {exc}", kind="malformed") from exc
        except OSError as exc:
            raise TransportError(f"{address} unreachable: {exc}", kind="unreachable") from exc
