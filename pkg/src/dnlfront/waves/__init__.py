from .types import (
    EndpointFit,
    PhaseTrajectory,
    PressureView,
    ShotClass,
    SpeedCurve,
    SubwaveProfile,
    Termination,
    TerminationKind,
    WaveProfile,
)
from .shooting import (
    classify_shot,
    compute_barrier,
    critical_speed,
    predicted_endpoint_coefficient,
    shoot_from_one,
    upper_bound_speed,
)
from .profile import (
    ProfileGrid,
    endpoint_fit,
    phi_interpolant,
    pressure_view,
    subwave_profile,
    wave_profile,
)
from .speed import cprime_formula, speed_curve

__all__ = [
    "EndpointFit",
    "PhaseTrajectory",
    "PressureView",
    "ProfileGrid",
    "ShotClass",
    "SpeedCurve",
    "SubwaveProfile",
    "Termination",
    "TerminationKind",
    "WaveProfile",
    "classify_shot",
    "compute_barrier",
    "critical_speed",
    "predicted_endpoint_coefficient",
    "shoot_from_one",
    "upper_bound_speed",
    "endpoint_fit",
    "phi_interpolant",
    "pressure_view",
    "subwave_profile",
    "wave_profile",
    "cprime_formula",
    "speed_curve",
]
