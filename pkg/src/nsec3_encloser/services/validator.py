"""
Resolver-side denial validation with metered hashing.

Discovery hashes the full query name first and strips one label per step
until a response record matches. Each step costs a full iterated hash,
so long query names multiply the per-hash price set by the zone.
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

from ..core.names import DomainName, strip_leftmost_label
from ..core.nsec3 import CostMeter, Nsec3Hasher, Nsec3Params, hash_cost_blocks
from ..models.response_models import NegativeResponse, Rcode
from ..models.validation_models import (
    CostPrediction,
    OverLimitBehavior,
    ValidationOutcome,
    ValidationStatus,
    ValidatorPolicy,
)
from ..models.zone_models import Nsec3Record
from ..utils.exceptions import ConfigurationError, NoEncloserFoundError

logger = logging.getLogger(__name__)

RFC5155_LIMITS: Dict[int, int] = {1024: 150, 2048: 500, 4096: 2500}


def rfc5155_iteration_limit(key_size_bits: int) -> int:
    """Iteration ceiling RFC5155 ties to the zone's smallest signing key."""
    try:
        return RFC5155_LIMITS[key_size_bits]
    except KeyError:
        raise ConfigurationError(
            f"No RFC5155 iteration limit for {key_size_bits}-bit keys",
            config_key="key_size_bits",
            details={"supported": sorted(RFC5155_LIMITS)},
        ) from None


def effective_iteration_limit(policy: ValidatorPolicy, key_size_bits: Optional[int] = None) -> int:
    if policy.max_iterations == "rfc5155":
        if key_size_bits is None:
            raise ConfigurationError("Key size required for the rfc5155 iteration policy", config_key="key_size_bits")
        return rfc5155_iteration_limit(key_size_bits)
    return policy.max_iterations


def _apex_of(response: NegativeResponse) -> Optional[DomainName]:
    return response.soa_owner


def closest_encloser_discovery(
    qname: DomainName,
    response: NegativeResponse,
    params: Nsec3Params,
    policy: ValidatorPolicy,
    meter: CostMeter,
    apex: Optional[DomainName] = None,
    hasher: Optional[Nsec3Hasher] = None
) -> Tuple[DomainName, DomainName]:
    """Find the closest encloser proven by ``response``.

    Returns:
        (closest_encloser, next_closer)

    Raises:
        NoEncloserFoundError: slicing passed the apex without a match.
    """
    hasher = hasher or Nsec3Hasher(params, meter, memoize=policy.candidate_hash_caching)
    owners = {rec.owner_hash for rec in response.nsec3_records}
    if apex is None:
        apex = _apex_of(response) or DomainName()

    candidate = qname
    previous: Optional[DomainName] = None
    while True:
        if not candidate.is_subdomain_of(apex):
            raise NoEncloserFoundError(
                f"No NSEC3 record matches any ancestor of {qname} within {apex}",
                details={"qname": str(qname), "apex": str(apex)},
            )
        if hasher(candidate) in owners:
            if previous is None:
                # qname itself matched: it exists, there is no next closer
                return candidate, candidate
            return candidate, previous
        if candidate.is_root:
            raise NoEncloserFoundError(f"No NSEC3 record matches any ancestor of {qname}")
        previous = candidate
        candidate = strip_leftmost_label(candidate)


def _covered(records: Sequence[Nsec3Record], target) -> bool:
    return any(rec.covers(target) for rec in records)


def _signatures_present(response: NegativeResponse, apex: DomainName) -> bool:
    signed_owners = {sig.owner for sig in response.rrsigs if sig.type_covered == "NSEC3"}
    return all(rec.owner_name(apex) in signed_owners for rec in response.nsec3_records)


def validate_denial(
    qname: DomainName,
    response: NegativeResponse,
    params: Nsec3Params,
    policy: ValidatorPolicy,
    key_size_bits: Optional[int] = None,
    meter: Optional[CostMeter] = None
) -> ValidationOutcome:
    """Validate an NXDOMAIN closest-encloser proof, metering every hash.

    Failed checks yield ``Bogus``; nothing here raises on a malformed proof.
    """
    meter = meter if meter is not None else CostMeter()
    limit = effective_iteration_limit(policy, key_size_bits)

    def _bogus(reason: str, **kwargs) -> ValidationOutcome:
        logger.debug(f"{qname}: bogus ({reason})")
        return ValidationOutcome(ValidationStatus.BOGUS, meter=meter.snapshot(), reason=reason, **kwargs)

    if params.iterations > limit:
        if policy.over_limit_behavior == OverLimitBehavior.INSECURE_SKIP:
            return ValidationOutcome(
                ValidationStatus.INSECURE_SKIPPED, meter=meter.snapshot(), reason="iterations above limit"
            )
        return _bogus("iterations above limit")

    if not response.nsec3_records:
        return _bogus("no NSEC3 records")
    if any(rec.params != response.nsec3_records[0].params for rec in response.nsec3_records):
        return _bogus("inconsistent NSEC3 parameters")
    if response.nsec3_records[0].params.iterations != params.iterations or response.nsec3_records[0].params.salt != params.salt:
        return _bogus("NSEC3 parameters differ from the expected NSEC3PARAM")

    apex = _apex_of(response)
    if apex is None or not qname.is_subdomain_of(apex):
        return _bogus("query name outside the signer's zone")
    if policy.check_signatures and not _signatures_present(response, apex):
        return _bogus("unsigned NSEC3 record")

    hasher = Nsec3Hasher(params, meter, memoize=policy.candidate_hash_caching)
    try:
        encloser, next_closer = closest_encloser_discovery(
            qname, response, params, policy, meter, apex=apex, hasher=hasher
        )
    except NoEncloserFoundError as exc:
        return _bogus(exc.message)
    candidates = len(qname) - len(encloser) + 1

    if encloser == qname:
        matched = next(rec for rec in response.nsec3_records if rec.owner_hash == hasher(encloser))
        if response.rcode == Rcode.NOERROR and response.qtype not in matched.type_bitmap:
            return ValidationOutcome(
                ValidationStatus.PROVEN_NODATA,
                closest_encloser=encloser,
                meter=meter.snapshot(),
                candidates_hashed=candidates,
            )
        return _bogus("query name exists", closest_encloser=encloser, candidates_hashed=candidates)
    if response.rcode != Rcode.NXDOMAIN:
        return _bogus("NOERROR answer without a matching record", closest_encloser=encloser)

    if not _covered(response.nsec3_records, hasher(next_closer)):
        return _bogus("next closer not covered", closest_encloser=encloser, candidates_hashed=candidates)
    if not _covered(response.nsec3_records, hasher(encloser.child("*"))):
        return _bogus("wildcard not covered", closest_encloser=encloser, candidates_hashed=candidates)

    return ValidationOutcome(
        ValidationStatus.PROVEN_NONEXISTENT,
        closest_encloser=encloser,
        next_closer=next_closer,
        meter=meter.snapshot(),
        candidates_hashed=candidates,
    )


def predict_discovery_cost(qname: DomainName, encloser: DomainName, params: Nsec3Params) -> CostPrediction:
    """Closed-form cost of validating a denial for ``qname`` proven at ``encloser``."""
    candidates = []
    for name in qname.ancestors():
        candidates.append(name)
        if name == encloser:
            break
    candidate_blocks = sum(hash_cost_blocks(name.wire_len, params) for name in candidates)
    next_closer = candidates[-2] if len(candidates) > 1 else candidates[-1]
    wildcard_blocks = hash_cost_blocks(encloser.child("*").wire_len, params)
    next_closer_blocks = hash_cost_blocks(next_closer.wire_len, params)
    return CostPrediction(
        candidates=len(candidates),
        chain_evaluations_cached=len(candidates) + 1,
        chain_evaluations_uncached=len(candidates) + 2,
        blocks_cached=candidate_blocks + wildcard_blocks,
        blocks_uncached=candidate_blocks + next_closer_blocks + wildcard_blocks,
    )
