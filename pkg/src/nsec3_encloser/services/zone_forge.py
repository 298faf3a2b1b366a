"""
Attack zone generation.

The forged chain holds the hashes of the apex and the nameserver plus three
synthetic owners: H(apex)+1, H(*.apex)-1 and H(*.apex)+1. The apex record
then covers nothing, and the wildcard hash sits alone in a gap of width two,
so every denial below the apex needs three distinct records.
"""

import json
import logging
from dataclasses import replace
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import dns.dnssec
import dns.rdata
import dns.rdataclass
import dns.rdatatype
import dns.rrset
import numpy as np
from pydantic import ValidationError

from ..core.names import DomainName, Hash160, format_name, parse_name
from ..core.nsec3 import Nsec3Hasher, Nsec3Params, hash_dec, hash_inc
from ..models.response_models import NegativeResponse
from ..models.zone_models import Nsec3Record, SignatureRecord, ValidationReport, Zone, ZoneConfig, ZoneHashes
from ..utils.exceptions import ConfigurationError, HashCollisionError, SignerError
from .auth_sim import answer_query, find_closest_encloser
from .signers import SignerInterface

logger = logging.getLogger(__name__)

# Bitmaps describe the signed zone; sign_zone adds the DNSKEY, DS and RRSIG sets the
# apex bitmap already names, so only signed zones serve them.
ORIGIN_TYPES = frozenset({"NS", "SOA", "DS", "RRSIG", "DNSKEY", "NSEC3PARAM"})
NAMESERVER_TYPES = frozenset({"A", "RRSIG"})

_LABEL_ALPHABET = np.array(list("abcdefghijklmnopqrstuvwxyz0123456789"))


def expand_batch(parent: Union[str, DomainName], count: int, template: Optional[Dict[str, Any]] = None) -> List[Dict[str, Any]]:
    """Config entries ``ex00.<parent>`` … for a batch of zones."""
    if not 1 <= count <= 100:
        raise ConfigurationError(f"Batch count {count} outside 1..100", config_key="batch.count")
    parent_name = parse_name(parent) if isinstance(parent, str) else parent
    entries = []
    for index in range(count):
        zone_id = f"{index:02d}"
        entry = dict(template or {})
        entry["origin"] = format_name(parent_name.child(f"ex{zone_id}"))
        entry["zone_id"] = zone_id
        entries.append(entry)
    return entries


def load_config(document: Union[str, Dict[str, Any], List[Dict[str, Any]]], seed: int = 0) -> List[ZoneConfig]:
    """Parse the JSON zone document into validated configs.

    Accepts a list of zone entries, ``{"zones": [...]}``, or
    ``{"batch": {"parent": ..., "count": N, ...shared fields}}``. An entry may
    give ``salt_length`` instead of ``salt``; the salt bytes then come from
    the seeded generator.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"Zone configuration is not valid JSON: {exc}") from exc

    if isinstance(document, list):
        entries = document
    elif isinstance(document, dict) and "zones" in document:
        entries = list(document["zones"])
    elif isinstance(document, dict) and "batch" in document:
        batch = dict(document["batch"])
        parent = batch.pop("parent", None)
        count = batch.pop("count", None)
        if parent is None or count is None:
            raise ConfigurationError("Batch entry needs 'parent' and 'count'", config_key="batch")
        entries = expand_batch(parent, int(count), batch)
    elif isinstance(document, dict) and "origin" in document:
        entries = [document]
    else:
        raise ConfigurationError("Zone configuration must be a list, {'zones': [...]} or {'batch': {...}}")

    if not entries:
        raise ConfigurationError("Zone configuration lists no zones", config_key="zones")

    rng = np.random.default_rng(seed)
    configs = []
    for position, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ConfigurationError(f"Zone entry {position} is not an object", config_key=f"zones[{position}]")
        entry = dict(entry)
        if "nameserver" in entry:
            entry.setdefault("nameserver_name", entry.pop("nameserver"))
        salt_length = entry.pop("salt_length", None)
        if salt_length is not None:
            if "salt" in entry:
                raise ConfigurationError("Give either 'salt' or 'salt_length'", config_key=f"zones[{position}]")
            if not 0 <= int(salt_length) <= 255:
                raise ConfigurationError(f"salt_length {salt_length} outside 0..255", config_key="salt_length")
            entry["salt"] = rng.bytes(int(salt_length)).hex()
        try:
            configs.append(ZoneConfig.model_validate(entry))
        except ValidationError as exc:
            raise ConfigurationError(
                f"Zone entry {position} is invalid",
                config_key=f"zones[{position}]",
                details={"errors": [f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in exc.errors()]},
            ) from exc

    origins = [cfg.origin for cfg in configs]
    if len(set(origins)) != len(origins):
        raise ConfigurationError("Zone origins must be unique", config_key="origin")
    logger.info(f"Loaded {len(configs)} zone configurations")
    return configs


def _link_chain(owners: Dict[Hash160, frozenset], params: Nsec3Params) -> tuple:
    ordered = sorted(owners)
    return tuple(
        Nsec3Record(
            owner_hash=owner,
            params=params,
            next_hash=ordered[(index + 1) % len(ordered)],
            type_bitmap=owners[owner],
        )
        for index, owner in enumerate(ordered)
    )


def _apex_records(cfg: ZoneConfig):
    ns_text = format_name(cfg.nameserver_name)
    soa = dns.rdata.from_text(
        dns.rdataclass.IN, dns.rdatatype.SOA, f"{ns_text} {ns_text} 0 0 0 10 {cfg.ttl}"
    )
    ns = (dns.rdata.from_text(dns.rdataclass.IN, dns.rdatatype.NS, ns_text),)
    a = ()
    if cfg.nameserver_in_zone:
        a = (dns.rdata.from_text(dns.rdataclass.IN, dns.rdatatype.A, str(cfg.nameserver_address)),)
    return soa, ns, a


def _zone_hashes(cfg: ZoneConfig) -> ZoneHashes:
    hasher = Nsec3Hasher(cfg.record_params)
    return ZoneHashes(
        origin=hasher(cfg.origin),
        wildcard=hasher(cfg.origin.child("*")),
        nameserver=hasher(cfg.nameserver_name) if cfg.nameserver_in_zone else None,
    )


def _assemble(cfg: ZoneConfig, hashes: ZoneHashes, owners: Dict[Hash160, frozenset]) -> Zone:
    soa, ns, a = _apex_records(cfg)
    return Zone(
        origin=cfg.origin,
        nameserver_name=cfg.nameserver_name,
        params=cfg.params,
        ttl=cfg.ttl,
        key_size_bits=cfg.key_size_bits,
        soa=soa,
        ns=ns,
        a=a,
        nsec3_chain=_link_chain(owners, cfg.record_params),
        hashes=hashes,
        algorithm=cfg.dnssec_algorithm,
        ds_digest=cfg.ds_digest,
    )


def build_attack_zone(cfg: ZoneConfig) -> Zone:
    """Build the unsigned forged zone for ``cfg``.

    Raises:
        HashCollisionError: the chain hashes are not pairwise distinct or the
            wildcard hash lands on a chain owner; retry with another salt.
    """
    hashes = _zone_hashes(cfg)
    chain = [hashes.origin]
    if hashes.nameserver is not None:
        chain.append(hashes.nameserver)
    chain.extend([hash_inc(hashes.origin), hash_dec(hashes.wildcard), hash_inc(hashes.wildcard)])

    if len(set(chain)) != len(chain) or hashes.wildcard in chain:
        raise HashCollisionError(
            f"NSEC3 chain hashes collide for {cfg.origin}",
            details={"hashes": [str(h) for h in chain], "wildcard": str(hashes.wildcard)},
        )

    owners = {h: frozenset() for h in chain}
    owners[hashes.origin] = ORIGIN_TYPES
    if hashes.nameserver is not None:
        owners[hashes.nameserver] = NAMESERVER_TYPES

    zone = _assemble(cfg, hashes, owners)
    logger.debug(f"Forged {len(zone.nsec3_chain)}-record chain for {cfg.origin}")
    return zone


def build_plain_zone(cfg: ZoneConfig) -> Zone:
    """Conventional chain over the existing names only, as a standard signer emits it."""
    hashes = _zone_hashes(cfg)
    owners = {hashes.origin: ORIGIN_TYPES}
    if hashes.nameserver is not None:
        if hashes.nameserver == hashes.origin:
            raise HashCollisionError(f"Apex and nameserver hashes collide for {cfg.origin}")
        owners[hashes.nameserver] = NAMESERVER_TYPES
    return _assemble(cfg, hashes, owners)


def build_with_retries(cfg: ZoneConfig, attempts: int = 3, seed: int = 0) -> Zone:
    """Build ``cfg``, drawing a fresh salt of the same length after a collision."""
    rng = np.random.default_rng(seed)
    for attempt in range(1, attempts + 1):
        try:
            return build_attack_zone(cfg)
        except HashCollisionError:
            if attempt == attempts:
                raise
            logger.warning(f"Hash collision for {cfg.origin}, retrying with a fresh salt")
            cfg = cfg.model_copy(update={"salt": rng.bytes(max(len(cfg.salt), 1))})


def _random_label(rng: np.random.Generator, min_len: int = 1, max_len: int = 12) -> str:
    length = int(rng.integers(min_len, max_len + 1))
    return "".join(rng.choice(_LABEL_ALPHABET, size=length))


def random_nonexistent_qname(zone: Zone, rng: np.random.Generator, max_depth: int = 3) -> DomainName:
    """Random name under the apex that exists nowhere and avoids the nameserver subtree."""
    existing = set(zone.names)
    while True:
        name = zone.origin
        for _ in range(int(rng.integers(1, max_depth + 1))):
            name = name.child(_random_label(rng))
        if name in existing:
            continue
        if zone.nameserver_in_zone and name.is_subdomain_of(zone.nameserver_name):
            continue
        return name


def validate_zone(
    zone: Zone,
    trials: int = 10000,
    seed: int = 0,
    extra_qnames: Sequence[DomainName] = ()
) -> ValidationReport:
    """Check that denials under the apex always carry three distinct NSEC3 records.

    ``extra_qnames`` are checked as well; names whose closest encloser is not
    the apex are listed as out of attack shape instead of being counted.
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1", config_key="trials")
    rng = np.random.default_rng(seed)
    report = ValidationReport(origin=zone.origin, trials=trials)

    def _check(qname: DomainName) -> None:
        response = answer_query(zone, qname, "A")
        if not isinstance(response, NegativeResponse):
            report.out_of_shape.append(str(qname))
            return
        count = response.record_count
        report.record_count_histogram[count] = report.record_count_histogram.get(count, 0) + 1
        if count != 3:
            report.counterexamples.append((str(qname), count))

    for _ in range(trials):
        _check(random_nonexistent_qname(zone, rng))
    for qname in extra_qnames:
        if qname in zone.names or find_closest_encloser(zone, qname) != zone.origin:
            report.out_of_shape.append(str(qname))
            continue
        _check(qname)

    if report.counterexamples:
        logger.warning(report.summary())
    else:
        logger.info(report.summary())
    return report


def _rrsets(zone: Zone, dnskeys) -> Iterable[dns.rrset.RRset]:
    origin = zone.origin.to_dns()
    yield dns.rrset.from_rdata(origin, zone.ttl, zone.soa)
    yield dns.rrset.from_rdata(origin, zone.ttl, *zone.ns)
    yield dns.rrset.from_rdata(origin, zone.ttl, *dnskeys)
    yield dns.rrset.from_rdata(origin, zone.ttl, zone.nsec3param_rdata())
    if zone.a:
        yield dns.rrset.from_rdata(zone.nameserver_name.to_dns(), zone.ttl, *zone.a)
    for record in zone.nsec3_chain:
        yield dns.rrset.from_rdata(record.owner_name(zone.origin).to_dns(), zone.ttl, record.to_rdata())


def sign_zone(zone: Zone, signer: SignerInterface) -> Zone:
    """Attach KSK/ZSK DNSKEYs, the parent-side DS and one RRSIG per RRset."""
    origin = zone.origin.to_dns()
    keys = signer.make_keys(origin, zone.key_size_bits)
    dnskeys = (keys.ksk.dnskey, keys.zsk.dnskey)
    try:
        ds = dns.dnssec.make_ds(origin, keys.ksk.dnskey, zone.ds_digest, policy=dns.dnssec.allow_all_policy)
    except (ValueError, dns.dnssec.UnsupportedAlgorithm) as exc:
        raise SignerError(f"Cannot compute DS for {zone.origin}: {exc}") from exc

    signatures = []
    for rrset in _rrsets(zone, dnskeys):
        key = keys.ksk if rrset.rdtype == dns.rdatatype.DNSKEY else keys.zsk
        rrsig = signer.sign_rrset(rrset, key, origin)
        signatures.append(
            SignatureRecord(
                owner=DomainName.from_dns(rrset.name),
                type_covered=dns.rdatatype.to_text(rrset.rdtype),
                rdata=rrsig,
            )
        )
    logger.info(f"Signed {zone.origin} with {signer.name} signer: {len(signatures)} RRSIGs")
    return replace(
        zone,
        dnskey=dnskeys,
        ds=(ds,),
        rrsigs=tuple(signatures),
        cryptographic=signer.cryptographic,
        signer_name=signer.name,
    )
