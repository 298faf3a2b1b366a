import numpy as np
import pytest

from nsec3_encloser.config.settings import get_settings
from nsec3_encloser.core.names import parse_name
from nsec3_encloser.models.zone_models import ZoneConfig
from nsec3_encloser.services.signers import TestSigner
from nsec3_encloser.services.zone_forge import build_attack_zone, sign_zone

EX00 = "ex00.nsec3.example.org."


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are re-read in every test."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def origin():
    return parse_name(EX00)


@pytest.fixture
def zone_config():
    return ZoneConfig(origin=EX00, iterations=10, salt="aabbccdd")


@pytest.fixture
def forged_zone(zone_config):
    return build_attack_zone(zone_config)


@pytest.fixture
def signed_zone(forged_zone):
    return sign_zone(forged_zone, TestSigner(seed=0))


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def output_dir(tmp_path):
    out = tmp_path / "output"
    out.mkdir()
    return out
