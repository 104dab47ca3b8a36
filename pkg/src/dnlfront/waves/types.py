"""Value types produced by the phase-plane engine."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "TerminationKind",
    "Termination",
    "PhaseTrajectory",
    "ShotClass",
    "WaveProfile",
    "PressureView",
    "EndpointFit",
    "SpeedCurve",
    "SubwaveProfile",
]


class TerminationKind(Enum):
    HIT_U_AXIS = "hit_u_axis"          # phi reached 0 at some U* > eps_lo
    HIT_PHI_AXIS = "hit_phi_axis"      # U reached 0 with phi = nu > 0
    REACHED_LOW_CUTOFF = "low_cutoff"  # integration reached U = eps_lo


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    value: float  # U* for HIT_U_AXIS, nu for HIT_PHI_AXIS, phi(eps_lo) otherwise


class ShotClass(Enum):
    TOO_SLOW = "too_slow"
    TOO_FAST = "too_fast"


@dataclass(frozen=True)
class PhaseTrajectory:
    """A trajectory phi(U) integrated from U near 1 toward U = 0.

    U is strictly decreasing along the samples; phi >= 0 everywhere and
    strictly positive between the endpoints.
    """

    c: float
    gamma: float
    U: np.ndarray
    phi: np.ndarray
    termination: Termination
    eps_hi: float
    eps_lo: float
    seed_coefficient: float

    @property
    def phi_end(self) -> float:
        return float(self.phi[-1])


@dataclass(frozen=True)
class WaveProfile:
    """Finite wavefront normalized so the front sits at xi = 0.

    xi decreases from 0 (front) to -L; U increases from 0 toward 1 along it.
    V = (m/(m-alpha)) U^(m-alpha) is the pressure view.
    """

    gamma: float
    c: float
    xi: np.ndarray
    U: np.ndarray
    V: np.ndarray
    Vp: np.ndarray
    front: float = 0.0

    @property
    def L(self) -> float:
        return float(-self.xi[0])


@dataclass(frozen=True)
class PressureView:
    V_front: float
    Vp_front: float
    Vpp_front: float
    Vp_at_minus_inf: float
    predicted_Vpp: float


@dataclass(frozen=True)
class EndpointFit:
    slope0: float
    C1: float
    mu1: float
    predicted_C1: float
    predicted_mu1: float
    residual_origin: float
    residual_one: float


@dataclass(frozen=True)
class SpeedCurve:
    gammas: np.ndarray
    c_values: np.ndarray
    cprime_fd: np.ndarray
    cprime_formula: np.ndarray
    c_sharp: float
    brackets: list = field(default_factory=list)
    failures: list = field(default_factory=list)


@dataclass(frozen=True)
class SubwaveProfile:
    """Compactly supported decreasing profile from height eta down to 0.

    U(0) = eta with zero flux; U(b) = 0 where the absolute flux equals nu.
    """

    c: float
    gamma: float
    eta: float
    xi: np.ndarray
    U: np.ndarray
    b: float
    nu: float
