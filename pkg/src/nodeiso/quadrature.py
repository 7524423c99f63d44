"""Numerical evaluation of the defining range integrals.

This module is the independent check on every closed form in
:mod:`nodeiso.analytic` and the only evaluation path for non-integer
Nakagami severity. Nothing here reuses the closed-form algebra: the radial
integral is computed adaptively after the substitution u = rho^alpha
(which turns the stretched-exponential decay of the raw integrand into
exponential-with-polynomial decay), and the shadowing average is a
Gauss-Hermite sum over the standard normal.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special

from .channel import ChannelParams

__all__ = [
    "QuadratureError",
    "QuadratureSpec",
    "expected_r2_numeric_fading",
    "expected_r2_numeric_fading_shadow",
    "expected_r2_numeric_nofade",
    "shadow_averaged_success",
    "success_prob_real_m",
]

# Panel growth is geometric, so this cap corresponds to an astronomically
# wide integration range; hitting it means the integrand does not decay.
_MAX_PANELS = 600
_MAX_DOUBLINGS = 2400


class QuadratureError(RuntimeError):
    """Adaptive integration failed to reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and orders for the numeric range integrals."""

    rel_tol: float = 1e-9
    max_subdivisions: int = 200
    hermite_order: int = 64

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_subdivisions < 10:
            raise ValueError(f"max_subdivisions must be >= 10, got {self.max_subdivisions}")
        if self.hermite_order < 8:
            raise ValueError(f"hermite_order must be >= 8, got {self.hermite_order}")


_DEFAULT_SPEC = QuadratureSpec()


@lru_cache(maxsize=8)
def _hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.hermite.hermgauss(order)


# ============================================================================
#  Core semi-infinite scheme
# ============================================================================


def _find_scale(fn: Callable[[float], float], level: float) -> float:
    """Smallest power-of-two abscissa where the nonincreasing fn < level."""
    u = 1.0
    if fn(u) < level:
        for _ in range(_MAX_DOUBLINGS):
            u *= 0.5
            if u < 1e-280 or fn(u) >= level:
                return 2.0 * u
        raise QuadratureError("could not locate the integrand scale (no ascent)")
    for _ in range(_MAX_DOUBLINGS):
        u *= 2.0
        if u > 1e290:
            raise QuadratureError("integrand does not decay below the tail threshold")
        if fn(u) < level:
            return u
    raise QuadratureError("integrand does not decay below the tail threshold")


def _panel_sum(
    f: Callable[[float], float],
    first_panel_end: float,
    decay_end: float,
    spec: QuadratureSpec,
) -> float:
    """Integrate f over (0, inf) with geometrically growing panels.

    Panels are [0, h], [h, 2h], [2h, 4h], ...; iteration stops once the
    decay region has been passed and two consecutive panels are negligible
    against the running total. Endpoints are never evaluated (the interior
    Gauss-Kronrod rule handles the u = 0 power singularity).
    """
    total = 0.0
    err_budget = 0.0
    tiny_streak = 0
    a, b = 0.0, first_panel_end
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for _ in range(_MAX_PANELS):
            epsabs = max(1e-300, 0.02 * spec.rel_tol * abs(total))
            val, err = integrate.quad(
                f, a, b, epsabs=epsabs, epsrel=spec.rel_tol, limit=spec.max_subdivisions
            )
            total += val
            err_budget += err
            if b >= decay_end and abs(val) <= 0.5 * spec.rel_tol * abs(total):
                tiny_streak += 1
                if tiny_streak >= 2:
                    break
            else:
                tiny_streak = 0
            a, b = b, 2.0 * b
        else:
            raise QuadratureError("panel budget exhausted before the integrand decayed")
    if err_budget > 10.0 * spec.rel_tol * max(abs(total), 1e-300):
        raise QuadratureError(
            f"estimated error {err_budget:.2e} exceeds tolerance for value {total:.6e}"
        )
    return total


def _radial_integral(
    success_of_u: Callable[[float], float],
    alpha: float,
    spec: QuadratureSpec,
) -> float:
    """E[R^2] = integral (2/alpha) u^(2/alpha - 1) P_S(u) du over (0, inf)."""
    q = 2.0 / alpha - 1.0
    scale = 2.0 / alpha

    def integrand(u: float) -> float:
        return scale * u**q * success_of_u(u)

    first_end = _find_scale(success_of_u, 0.5)
    decay_end = _find_scale(success_of_u, 1e-16)
    return _panel_sum(integrand, first_end, decay_end, spec)


# ============================================================================
#  Range integrals
# ============================================================================


def expected_r2_numeric_fading(
    success_prob: Callable[[float], float],
    params: ChannelParams,
    spec: QuadratureSpec = _DEFAULT_SPEC,
) -> float:
    """Mean squared range for an arbitrary success-probability law.

    ``success_prob`` maps the distance-law mean SNR to a link success
    probability and must be nonincreasing in distance with eventual decay.
    """
    budget = params.k * params.ptx / params.w

    def success_of_u(u: float) -> float:
        return success_prob(budget / u)

    return _radial_integral(success_of_u, params.alpha, spec)


def expected_r2_numeric_fading_shadow(
    success_prob: Callable[[float], float],
    params: ChannelParams,
    spec: QuadratureSpec = _DEFAULT_SPEC,
) -> float:
    """Mean squared range with fading and lognormal shadowing.

    Outer Gauss-Hermite average over the standard normal shadowing
    variable; inner radial integral with the mean SNR scaled by the
    realized shadowing multiplier.
    """
    if not params.sigma > 0:
        raise ValueError("shadowed integral requires sigma > 0; use the fading-only form")
    nodes, weights = _hermite_rule(spec.hermite_order)
    budget = params.k * params.ptx / params.w
    total = 0.0
    for x, wgt in zip(nodes, weights):
        gain = math.exp(params.sigma * math.sqrt(2.0) * x)

        def success_of_u(u: float, _gain: float = gain) -> float:
            return success_prob(_gain * budget / u)

        total += wgt * _radial_integral(success_of_u, params.alpha, spec)
    return total / math.sqrt(math.pi)


def expected_r2_numeric_nofade(
    params: ChannelParams,
    spec: QuadratureSpec = _DEFAULT_SPEC,
) -> float:
    """Mean squared range under path loss and shadowing only (no fading).

    Nested quadrature: the inner integral is the lognormal path-loss tail
    mass above the decoding threshold (integrated in the log variable for
    stability), the outer one the radial average.
    """
    if not params.sigma > 0:
        raise ValueError("the shadowing-only integral requires sigma > 0")
    loss_threshold = params.psi * params.w / params.ptx
    ln_thr = math.log(loss_threshold)
    ln_k = math.log(params.k)
    sigma = params.sigma
    norm = 1.0 / math.sqrt(2.0 * math.pi)

    def tail_mass(rho: float) -> float:
        # P[path loss > threshold] at distance rho, log-substituted density.
        v0 = (ln_thr - (ln_k - params.alpha * math.log(rho))) / sigma
        lo = max(v0, -40.0)
        if lo >= 40.0:
            return 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(
                lambda v: norm * math.exp(-0.5 * v * v),
                lo,
                40.0,
                epsabs=1e-14,
                epsrel=1e-12,
                limit=spec.max_subdivisions,
            )
        return val

    # Radial part via u = rho^2, i.e. the alpha = 2 reduction of the
    # generic scheme: E[R^2] = integral tail_mass(sqrt(u)) du.
    def success_of_u(u: float) -> float:
        return tail_mass(math.sqrt(u))

    return _radial_integral(success_of_u, 2.0, spec)


# ============================================================================
#  Real-severity success probability and shadow averaging
# ============================================================================


def success_prob_real_m(y: float, m: float, psi: float) -> float:
    """Single-branch success probability for real Nakagami severity m >= 0.5.

    Regularized upper incomplete gamma at (m, m*psi/y); the library routine
    evaluates it by series/continued fraction to near machine precision.
    """
    if not y > 0:
        raise ValueError(f"average SNR must be positive, got {y}")
    if not m >= 0.5:
        raise ValueError(f"Nakagami severity must be >= 0.5, got {m}")
    if not psi > 0:
        raise ValueError(f"threshold must be positive, got {psi}")
    return float(special.gammaincc(m, m * psi / y))


def shadow_averaged_success(
    success_prob: Callable[[float], float],
    mean_snr: float,
    sigma: float,
    hermite_order: int = 64,
) -> float:
    """Average the success probability over the lognormal shadowing gain."""
    if sigma == 0.0:
        return success_prob(mean_snr)
    nodes, weights = _hermite_rule(hermite_order)
    total = 0.0
    for x, wgt in zip(nodes, weights):
        total += wgt * success_prob(mean_snr * math.exp(sigma * math.sqrt(2.0) * x))
    return total / math.sqrt(math.pi)
