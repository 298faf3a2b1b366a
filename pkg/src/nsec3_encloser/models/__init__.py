from .response_models import NegativeResponse, PositiveAnswer, Rcode
from .scan_models import DenialType, Distribution, ScanResult, ScanSummary
from .sim_models import AmplificationReport, QueueDiscipline, RampSchedule, SimConfig, SimReport
from .validation_models import OverLimitBehavior, ValidationOutcome, ValidationStatus, ValidatorPolicy
from .zone_models import Nsec3Record, Zone, ZoneConfig

__all__ = [
    "NegativeResponse", "PositiveAnswer", "Rcode",
    "DenialType", "Distribution", "ScanResult", "ScanSummary",
    "AmplificationReport", "QueueDiscipline", "RampSchedule", "SimConfig", "SimReport",
    "OverLimitBehavior", "ValidationOutcome", "ValidationStatus", "ValidatorPolicy",
    "Nsec3Record", "Zone", "ZoneConfig",
]
