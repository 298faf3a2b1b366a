"""
nsec3-forge - NSEC3 closest-encloser zone forging, resolver load simulation and parameter scanning
"""

from .config.settings import ForgeSettings, get_settings
from .core.names import DomainName, parse_name
from .core.nsec3 import Nsec3Params, nsec3_hash

__version__ = "0.1.0"
__all__ = ["ForgeSettings", "get_settings", "DomainName", "parse_name", "Nsec3Params", "nsec3_hash"]
