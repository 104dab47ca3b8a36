"""Problem parameters and reaction nonlinearities.

The equation under study is u_t = div(|grad u^m|^(p-2) grad u^m) + h(u) in the
slow diffusion regime m(p-1) > 1, with p >= 2 so the operator is singular only
at u = 0.  This module validates the standing assumptions, constructs the
supported reaction families and computes the scalar quantities derived from
them (sigma0, the Fujita exponent, the speed-sign integral, the negativity
window of h' around 1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import DegeneracyError, DimensionError, RegimeError, SignPatternError

__all__ = [
    "Params",
    "ReactionKind",
    "ReactionSpec",
    "ReactionStats",
    "validate_params",
    "make_reaction",
    "reaction_stats",
    "reduced_reaction",
    "negativity_window",
]


@dataclass(frozen=True)
class Params:
    """Diffusion exponents and space dimension.

    alpha = 1/(p-1) is derived; the slow diffusion regime guarantees
    0 < alpha < m.
    """

    m: float
    p: float
    N: int
    alpha: float

    @property
    def qF(self) -> float:
        """Fujita exponent m(p-1) + p/N."""
        return self.m * (self.p - 1.0) + self.p / self.N


def validate_params(m: float, p: float, N: int) -> Params:
    """Check the slow-diffusion constraints and return a Params value.

    Raises RegimeError if m <= 0, p < 2 or m(p-1) <= 1, and DimensionError
    if N is not a positive integer.
    """
    if not isinstance(N, (int, np.integer)) or isinstance(N, bool):
        raise DimensionError(f"N must be an integer, got {N!r}")
    if N < 1:
        raise DimensionError(f"N must be >= 1, got {N}")
    m = float(m)
    p = float(p)
    if m <= 0.0:
        raise RegimeError(f"m must be positive, got {m}")
    if p < 2.0:
        raise RegimeError(f"p must be >= 2, got {p}")
    if m * (p - 1.0) <= 1.0:
        raise RegimeError(f"slow diffusion requires m(p-1) > 1, got m(p-1) = {m * (p - 1.0)}")
    alpha = 1.0 / (p - 1.0)
    return Params(m=m, p=p, N=int(N), alpha=alpha)


class ReactionKind(Enum):
    MONOSTABLE = "monostable"
    BISTABLE = "bistable"
    COMBUSTION = "combustion"
    POWER_MONOSTABLE = "power"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ReactionSpec:
    """A reaction nonlinearity h together with its derivative.

    The evaluators are pure vectorized callables, safe to share across
    workers.  The sign pattern h(0) = 0, h <= 0 on [0, a], h > 0 on (a, 1),
    h < 0 above 1 and the nondegeneracy h'(1) < 0 are checked on a dense
    grid at construction time.
    """

    kind: ReactionKind
    a: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)

    def __call__(self, u):
        return self.evaluator(u)

    def deriv(self, u):
        return self.derivative(u)


@dataclass(frozen=True)
class ReactionStats:
    sigma0: float
    qF: float
    sign_integral: float
    H_sup: float


# Validation grid: at least 1000 points on [0, u_max], refined near the
# structurally important levels 0, a and 1.
_GRID_BASE = 1200


def _validation_grid(a: float, u_max: float) -> np.ndarray:
    pts = [np.linspace(0.0, u_max, _GRID_BASE)]
    for center in (0.0, a, 1.0):
        if 0.0 <= center <= u_max:
            local = center + np.geomspace(1e-9, 5e-2, 40)
            pts.append(local)
            pts.append(center - np.geomspace(1e-9, 5e-2, 40))
    grid = np.unique(np.concatenate(pts))
    return grid[(grid >= 0.0) & (grid <= u_max)]


def _check_sign_pattern(h: Callable, hp: Callable, a: float, u_max: float) -> None:
    grid = _validation_grid(a, u_max)
    vals = np.asarray(h(grid), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise SignPatternError("h is not finite on the validation grid")
    if abs(float(h(np.array(0.0)))) > 1e-14:
        raise SignPatternError("h(0) must vanish")
    margin = 1e-9
    on_low = grid <= a + 1e-15
    if np.any(vals[on_low] > 1e-12):
        u_bad = grid[on_low][vals[on_low] > 1e-12][0]
        raise SignPatternError(f"h must be <= 0 on [0, a]; h({u_bad:.6g}) > 0")
    mid = (grid > a + margin) & (grid < 1.0 - margin)
    if np.any(vals[mid] <= 0.0):
        u_bad = grid[mid][vals[mid] <= 0.0][0]
        raise SignPatternError(f"h must be > 0 on (a, 1); h({u_bad:.6g}) <= 0")
    above = grid > 1.0 + margin
    if np.any(vals[above] >= 0.0):
        u_bad = grid[above][vals[above] >= 0.0][0]
        raise SignPatternError(f"h must be < 0 above 1; h({u_bad:.6g}) >= 0")
    hp1 = float(hp(np.array(1.0)))
    if not np.isfinite(hp1) or hp1 >= 0.0:
        raise DegeneracyError(f"h'(1) must be negative, got {hp1}")


def _builtin_reaction(kind: ReactionKind, a: float, k: float, q: float):
    if kind is ReactionKind.MONOSTABLE:
        return (lambda u: k * u * (1.0 - u),
                lambda u: k * (1.0 - 2.0 * u))
    if kind is ReactionKind.BISTABLE:
        return (lambda u: k * u * (u - a) * (1.0 - u),
                lambda u: k * (-3.0 * u * u + 2.0 * (1.0 + a) * u - a))
    if kind is ReactionKind.COMBUSTION:
        # h is identically zero on the ignition plateau [0, a]; the piecewise
        # definition is structural, not a smoothing.
        def h(u):
            w = np.maximum(np.asarray(u, dtype=float) - a, 0.0)
            return k * w * w * (1.0 - u)

        def hp(u):
            u = np.asarray(u, dtype=float)
            w = np.maximum(u - a, 0.0)
            return k * (2.0 * w * (1.0 - u) - w * w)

        return h, hp
    if kind is ReactionKind.POWER_MONOSTABLE:
        def h(u):
            u = np.asarray(u, dtype=float)
            return k * np.power(u, q) * (1.0 - u)

        def hp(u):
            u = np.asarray(u, dtype=float)
            return k * np.power(u, q - 1.0) * (q - (q + 1.0) * u)

        return h, hp
    raise ValueError(f"unsupported kind {kind}")


def make_reaction(kind: ReactionKind | str,
                  *,
                  a: float = 0.0,
                  k: float = 1.0,
                  q: float | None = None,
                  h: Callable | None = None,
                  hp: Callable | None = None,
                  m: float | None = None,
                  u_max: float = 2.0) -> ReactionSpec:
    """Construct and validate a reaction nonlinearity.

    Built-in kinds: monostable logistic k*u*(1-u), bistable cubic
    k*u*(u-a)*(1-u), combustion k*(u-a)_+^2*(1-u), and the power family
    k*u^q*(1-u).  Custom reactions supply both h and hp.

    When a > 0 and the diffusion exponent m is given, the positive-speed
    assumption int_0^1 h(u) u^(m-1) du > 0 is enforced.
    """
    if isinstance(kind, str):
        kind = ReactionKind(kind)
    if not 0.0 <= a < 1.0:
        raise ValueError(f"threshold a must lie in [0, 1), got {a}")
    if kind is ReactionKind.CUSTOM:
        if h is None or hp is None:
            raise ValueError("custom reactions need both h and hp")
        params: dict = {}
    else:
        if kind is ReactionKind.POWER_MONOSTABLE:
            if q is None:
                raise ValueError("power reactions need the exponent q")
            if q < 1.0:
                raise ValueError("power exponent q must be >= 1 (h must be C1 at the origin)")
        if kind in (ReactionKind.BISTABLE, ReactionKind.COMBUSTION) and a == 0.0:
            raise ValueError(f"{kind.value} reactions need a threshold a in (0, 1)")
        if kind in (ReactionKind.MONOSTABLE, ReactionKind.POWER_MONOSTABLE) and a != 0.0:
            raise ValueError(f"{kind.value} reactions have a = 0")
        h, hp = _builtin_reaction(kind, a, k, q if q is not None else 1.0)
        params = {"k": k}
        if q is not None:
            params["q"] = q
        if a > 0.0:
            params["a"] = a

    _check_sign_pattern(h, hp, a, max(2.0, u_max))
    spec = ReactionSpec(kind=kind, a=a, evaluator=h, derivative=hp, params=params)

    if a > 0.0 and m is not None:
        integral = _sign_integral(spec, float(m))
        if integral <= 0.0:
            raise SignPatternError(
                f"positive-speed assumption violated: int h(u) u^(m-1) du = {integral:.6g} <= 0")
    return spec


def _sign_integral(h: ReactionSpec, m: float, rtol: float = 1e-10) -> float:
    val, _ = integrate.quad(lambda u: float(h(u)) * u ** (m - 1.0), 0.0, 1.0,
                            epsrel=rtol, epsabs=1e-14, limit=200)
    return val


def _grid_sup(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
              n: int = 2001, refine: bool = True) -> float:
    """Sup of fn on [lo, hi]: dense scan plus golden-section refinement."""
    grid = np.linspace(lo, hi, n)
    vals = np.asarray(fn(grid), dtype=float)
    i = int(np.argmax(vals))
    best = float(vals[i])
    if refine and 0 < i < n - 1:
        res = optimize.minimize_scalar(lambda u: -float(fn(np.array(u))),
                                       bracket=None,
                                       bounds=(grid[i - 1], grid[i + 1]),
                                       method="bounded",
                                       options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def reaction_stats(h: ReactionSpec, params: Params, M: float | None = None) -> ReactionStats:
    """Scalar quantities derived from (h, params).

    sigma0 is sup h(u)/u over (0, 1] (the grid scan is refined by a bounded
    1-d search since the quotient may peak interiorly for combustion-type h);
    qF is the Fujita exponent; sign_integral is int_0^1 h(u) u^(m-1) du with
    relative tolerance 1e-10; H_sup is sup |h'| on [0, M].
    """
    if M is None:
        M = max(1.0, 2.0)
    u_lo = 1e-9

    def quotient(u):
        u = np.asarray(u, dtype=float)
        return np.asarray(h(u), dtype=float) / u

    sigma0 = _grid_sup(quotient, u_lo, 1.0)
    # the quotient extends continuously to h'(0) at the origin
    sigma0 = max(sigma0, float(h.deriv(np.array(0.0))))
    H_sup = _grid_sup(lambda u: np.abs(h.deriv(np.asarray(u, dtype=float))), 0.0, M)
    return ReactionStats(
        sigma0=sigma0,
        qF=params.qF,
        sign_integral=_sign_integral(h, params.m),
        H_sup=H_sup,
    )


def reduced_reaction(h: ReactionSpec, params: Params) -> Callable[[np.ndarray], np.ndarray]:
    """The phase-plane forcing f(U) = m U^(m-1) h(U), with f(0) = 0."""
    m = params.m

    def f(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = m * np.power(u, m - 1.0) * np.asarray(h(u), dtype=float)
        return np.where(u > 0.0, out, 0.0)

    return f


def negativity_window(h: ReactionSpec, cap: float = 0.9, n: int = 4001) -> float:
    """Largest delta (on a grid) with h' < 0 throughout (1-delta, 1+delta).

    h' is only guaranteed negative at u = 1; the admissible window is found
    by scanning outward until the sign condition first fails on either side.
    """
    us = np.linspace(1.0 - cap, 1.0 + cap, n)
    dv = np.asarray(h.deriv(us), dtype=float)
    center = n // 2
    if dv[center] >= 0.0:
        raise DegeneracyError("h'(1) must be negative")
    left = center
    while left > 0 and dv[left - 1] < 0.0:
        left -= 1
    right = center
    while right < n - 1 and dv[right + 1] < 0.0:
        right += 1
    delta = min(1.0 - us[left], us[right] - 1.0)
    return max(delta - (us[1] - us[0]), 0.0)
