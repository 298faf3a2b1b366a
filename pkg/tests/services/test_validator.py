"""
Tests for resolver-side denial validation and its hashing cost.
"""

from dataclasses import replace

import numpy as np
import pytest

from nsec3_encloser.core.nsec3 import Nsec3Params
from nsec3_encloser.models.response_models import NegativeResponse, Rcode
from nsec3_encloser.models.validation_models import OverLimitBehavior, ValidationStatus, ValidatorPolicy
from nsec3_encloser.models.zone_models import ZoneConfig
from nsec3_encloser.services.attack_harness import build_attack_qname, max_filler_labels
from nsec3_encloser.services.auth_sim import answer_query
from nsec3_encloser.services.signers import TestSigner
from nsec3_encloser.services.validator import (
    effective_iteration_limit,
    predict_discovery_cost,
    rfc5155_iteration_limit,
    validate_denial,
)
from nsec3_encloser.services.zone_forge import build_attack_zone, build_with_retries, sign_zone
from nsec3_encloser.utils.exceptions import ConfigurationError

from conftest import EX00
from oracles import slicing_candidates

UNSIGNED_OK = ValidatorPolicy(check_signatures=False)


def _attack(zone, rng):
    qname = build_attack_qname(zone.origin, rng)
    return qname, answer_query(zone, qname, "A")


def test_attack_query_is_proven(signed_zone, rng):
    """Test a 255-byte attack name validates after 115 candidate hashes"""
    qname, response = _attack(signed_zone, rng)
    assert qname.wire_len == 255
    outcome = validate_denial(qname, response, signed_zone.params, ValidatorPolicy())
    assert outcome.status == ValidationStatus.PROVEN_NONEXISTENT
    assert outcome.secure
    assert outcome.closest_encloser == signed_zone.origin
    assert outcome.next_closer == signed_zone.origin.child(qname.labels[-len(signed_zone.origin) - 1])
    assert outcome.candidates_hashed == 115
    assert outcome.candidates_hashed == slicing_candidates(list(qname.labels), list(signed_zone.origin.labels))
    assert outcome.meter.chain_evaluations == 116
    assert outcome.meter.hash_calls == 116 * 11


def test_uncached_discovery_rehashes(signed_zone, rng):
    """Test disabling the candidate cache costs one more evaluation"""
    qname, response = _attack(signed_zone, rng)
    policy = ValidatorPolicy(candidate_hash_caching=False)
    outcome = validate_denial(qname, response, signed_zone.params, policy)
    assert outcome.status == ValidationStatus.PROVEN_NONEXISTENT
    assert outcome.meter.chain_evaluations == 117


@pytest.mark.parametrize("caching", [True, False])
def test_prediction_matches_meter(signed_zone, rng, caching):
    """Test the closed-form cost equals the metered cost"""
    qname, response = _attack(signed_zone, rng)
    policy = ValidatorPolicy(candidate_hash_caching=caching)
    outcome = validate_denial(qname, response, signed_zone.params, policy)
    prediction = predict_discovery_cost(qname, signed_zone.origin, signed_zone.params)
    assert prediction.candidates == outcome.candidates_hashed
    if caching:
        assert prediction.blocks_cached == outcome.meter.compression_blocks
        assert prediction.chain_evaluations_cached == outcome.meter.chain_evaluations
    else:
        assert prediction.blocks_uncached == outcome.meter.compression_blocks
        assert prediction.chain_evaluations_uncached == outcome.meter.chain_evaluations


def test_over_limit_is_bogus_without_hashing(rng):
    """Test iterations above the limit are rejected before any hash"""
    zone = sign_zone(build_attack_zone(ZoneConfig(origin=EX00, iterations=165)), TestSigner())
    qname, response = _attack(zone, rng)
    outcome = validate_denial(qname, response, zone.params, ValidatorPolicy(max_iterations=150))
    assert outcome.status == ValidationStatus.BOGUS
    assert outcome.meter.compression_blocks == 0
    assert outcome.meter.chain_evaluations == 0

    policy = ValidatorPolicy(max_iterations=150, over_limit_behavior=OverLimitBehavior.INSECURE_SKIP)
    skipped = validate_denial(qname, response, zone.params, policy)
    assert skipped.status == ValidationStatus.INSECURE_SKIPPED
    assert not skipped.secure
    assert skipped.meter.compression_blocks == 0


def test_rfc5155_limits():
    """Test the key-size iteration table"""
    assert rfc5155_iteration_limit(1024) == 150
    assert rfc5155_iteration_limit(2048) == 500
    assert rfc5155_iteration_limit(4096) == 2500
    policy = ValidatorPolicy(max_iterations="rfc5155")
    assert effective_iteration_limit(policy, 2048) == 500
    with pytest.raises(ConfigurationError):
        effective_iteration_limit(policy)
    with pytest.raises(ConfigurationError):
        rfc5155_iteration_limit(3072)


def test_rfc5155_policy_accepts_by_key_size(rng):
    """Test 165 iterations pass with 2048-bit keys under the key-size table"""
    zone = sign_zone(build_attack_zone(ZoneConfig(origin=EX00, iterations=165)), TestSigner())
    qname, response = _attack(zone, rng)
    policy = ValidatorPolicy(max_iterations="rfc5155")
    assert validate_denial(qname, response, zone.params, policy, key_size_bits=2048).secure
    assert not validate_denial(qname, response, zone.params, policy, key_size_bits=1024).secure


def test_nodata_proof(signed_zone, origin):
    """Test a missing type at an existing name is proven"""
    response = answer_query(signed_zone, origin, "A")
    outcome = validate_denial(origin, response, signed_zone.params, ValidatorPolicy())
    assert outcome.status == ValidationStatus.PROVEN_NODATA
    assert outcome.candidates_hashed == 1


def test_existing_type_is_bogus(forged_zone, origin):
    """Test a NOERROR denial for a type in the bitmap is rejected"""
    apex = forged_zone.record_for_owner(forged_zone.hashes.origin)
    response = NegativeResponse(
        qname=origin, qtype="SOA", rcode=Rcode.NOERROR, nsec3_records=(apex,), soa_owner=origin
    )
    outcome = validate_denial(origin, response, forged_zone.params, UNSIGNED_OK)
    assert outcome.status == ValidationStatus.BOGUS
    assert outcome.reason == "query name exists"


def _drop(response, index):
    records = tuple(rec for i, rec in enumerate(response.nsec3_records) if i != index)
    return replace(response, nsec3_records=records, rrsigs=())


@pytest.mark.parametrize(
    "index,reason",
    [(1, "next closer not covered"), (2, "wildcard not covered")],
)
def test_missing_cover_is_bogus(forged_zone, rng, index, reason):
    """Test proofs lacking a covering record are rejected"""
    qname, response = _attack(forged_zone, rng)
    outcome = validate_denial(qname, _drop(response, index), forged_zone.params, UNSIGNED_OK)
    assert outcome.status == ValidationStatus.BOGUS
    assert outcome.reason == reason


def test_missing_encloser_is_bogus(forged_zone, rng):
    """Test slicing past the apex without a match is rejected"""
    qname, response = _attack(forged_zone, rng)
    outcome = validate_denial(qname, _drop(response, 0), forged_zone.params, UNSIGNED_OK)
    assert outcome.status == ValidationStatus.BOGUS
    assert outcome.meter.chain_evaluations == 115


def test_parameter_mismatch_is_bogus(forged_zone, rng):
    """Test records hashed with other parameters are rejected"""
    qname, response = _attack(forged_zone, rng)
    other = Nsec3Params(iterations=forged_zone.params.iterations + 1, salt=forged_zone.params.salt)
    outcome = validate_denial(qname, response, other, UNSIGNED_OK)
    assert outcome.status == ValidationStatus.BOGUS


def test_unsigned_records_are_bogus(forged_zone, rng):
    """Test signature presence is required by default"""
    qname, response = _attack(forged_zone, rng)
    assert validate_denial(qname, response, forged_zone.params, ValidatorPolicy()).status == ValidationStatus.BOGUS
    assert validate_denial(qname, response, forged_zone.params, UNSIGNED_OK).secure


def test_empty_and_foreign_responses(forged_zone, rng, origin):
    """Test empty proofs and names outside the signer's zone"""
    qname, response = _attack(forged_zone, rng)
    empty = replace(response, nsec3_records=())
    assert validate_denial(qname, empty, forged_zone.params, UNSIGNED_OK).reason == "no NSEC3 records"
    foreign = replace(response, soa_owner=origin.child("sub"))
    assert validate_denial(qname, foreign, forged_zone.params, UNSIGNED_OK).status == ValidationStatus.BOGUS


def test_policy_rejects_negative_limit():
    with pytest.raises(ValueError):
        ValidatorPolicy(max_iterations=-1)


def _discovery_blocks(cfg, filler_labels=None, caching=True):
    zone = build_with_retries(cfg)
    qname = build_attack_qname(zone.origin, np.random.default_rng(0), filler_labels)
    response = answer_query(zone, qname, "A")
    policy = ValidatorPolicy(check_signatures=False, candidate_hash_caching=caching)
    outcome = validate_denial(qname, response, zone.params, policy)
    assert outcome.status == ValidationStatus.PROVEN_NONEXISTENT
    return qname, zone, outcome


def test_cost_grows_with_labels(zone_config, origin):
    """Test compression blocks rise with every label below the encloser"""
    limit = max_filler_labels(origin)
    depths = sorted(set(range(0, limit + 1, 7)) | {limit})
    blocks = [_discovery_blocks(zone_config, k)[2].meter.compression_blocks for k in depths]
    assert all(a < b for a, b in zip(blocks, blocks[1:]))


def test_cost_grows_with_iterations():
    """Test compression blocks rise with the iteration count"""
    blocks = [
        _discovery_blocks(ZoneConfig(origin=EX00, iterations=n, salt="aabbccdd"))[2].meter.compression_blocks
        for n in (0, 1, 5, 10, 50, 150)
    ]
    assert all(a < b for a, b in zip(blocks, blocks[1:]))


def test_cost_grows_with_salt_length():
    """Test compression blocks never fall as the salt grows"""
    blocks = [
        _discovery_blocks(ZoneConfig(origin=EX00, iterations=10, salt=bytes(n)))[2].meter.compression_blocks
        for n in (0, 1, 8, 32, 55, 56, 64, 128, 200, 255)
    ]
    assert all(a <= b for a, b in zip(blocks, blocks[1:]))
    assert blocks[-1] > blocks[0]


@pytest.mark.parametrize("caching", [True, False])
def test_prediction_matches_meter_across_parameters(origin, caching):
    """Test the closed-form cost stays exact over random depths, salts and iterations"""
    draws = np.random.default_rng(7)
    limit = max_filler_labels(origin)
    for _ in range(12):
        cfg = ZoneConfig(
            origin=EX00,
            iterations=int(draws.integers(0, 151)),
            salt=draws.bytes(int(draws.integers(0, 256))),
        )
        qname, zone, outcome = _discovery_blocks(cfg, int(draws.integers(0, limit + 1)), caching)
        prediction = predict_discovery_cost(qname, zone.origin, zone.params)
        assert prediction.candidates == outcome.candidates_hashed
        expected = prediction.blocks_cached if caching else prediction.blocks_uncached
        assert outcome.meter.compression_blocks == expected, (cfg.iterations, len(cfg.salt), len(qname))
