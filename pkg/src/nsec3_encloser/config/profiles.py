"""Resolver profiles: instruction factors and iteration-limit policies."""

from typing import Dict

from ..models.validation_models import OverLimitBehavior, ValidatorPolicy
from ..utils.exceptions import ConfigurationError

# Attack/benign instruction ratio observed per resolver implementation.
INSTRUCTION_FACTORS: Dict[str, float] = {
    "unbound": 72.0,
    "bind": 41.0,
    "powerdns": 33.0,
    "knot": 13.0,
}

THEORETICAL_CEILING = 625

_POLICIES: Dict[str, ValidatorPolicy] = {
    "unbound": ValidatorPolicy(max_iterations=150),
    "bind": ValidatorPolicy(max_iterations=150),
    "bind9_18": ValidatorPolicy(max_iterations=150),
    "bind9_16": ValidatorPolicy(max_iterations="rfc5155"),
    "powerdns": ValidatorPolicy(max_iterations=150),
    "knot": ValidatorPolicy(max_iterations=150),
    "rfc9276": ValidatorPolicy(max_iterations=0, over_limit_behavior=OverLimitBehavior.INSECURE_SKIP),
    "unlimited": ValidatorPolicy(max_iterations=65535),
}


def instruction_factor(profile: str) -> float:
    try:
        return INSTRUCTION_FACTORS[profile.lower()]
    except KeyError:
        raise ConfigurationError(
            f"Unknown resolver profile '{profile}'",
            config_key="profile",
            details={"known": sorted(INSTRUCTION_FACTORS)},
        ) from None


def policy_for(profile: str) -> ValidatorPolicy:
    """Return the iteration-limit policy a resolver profile enforces."""
    try:
        return _POLICIES[profile.lower()].model_copy()
    except KeyError:
        raise ConfigurationError(
            f"Unknown validator policy profile '{profile}'",
            config_key="policy",
            details={"known": sorted(_POLICIES)},
        ) from None
