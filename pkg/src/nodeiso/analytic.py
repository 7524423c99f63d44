"""Closed-form mean squared communication range and isolation probability.

The network is a planar Poisson process of density ``node_density``; a node
is isolated when no neighbour clears the SNR threshold. For every receiver
structure the isolation probability is

    P_I = exp(-node_density * pi * E[R^2])

with E[R^2] the mean squared communication range of the corresponding
channel/diversity combination. All E[R^2] variants share the lognormal
shadowing factor exp(2 sigma^2 / alpha^2); sigma = 0 reduces each form to
its unshadowed counterpart exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from math import comb
from typing import Sequence

from .channel import BetaTable, ChannelParams, DiversityScheme, build_beta_table
from .specialfn import gamma_fn

__all__ = [
    "CancellationError",
    "IsolationQuery",
    "SC_MAX_ORDER",
    "density_spread_tradeoff",
    "expected_r2",
    "expected_r2_mrc",
    "expected_r2_nakagami",
    "expected_r2_nakagami_shadow",
    "expected_r2_sc",
    "expected_r2_shadow_only",
    "isolation_probability",
    "min_density_for_isolation",
]

# The alternating selection-combining sum grows combinatorially with the
# number of branches; beyond this order double precision cannot keep the
# required six digits.
SC_MAX_ORDER = 16

# Raise once the alternating sum has lost more than six decimal digits.
_MAX_DIGIT_LOSS = 1e6


class CancellationError(ArithmeticError):
    """Alternating-sum evaluation lost too many significant digits."""


@dataclass(frozen=True)
class IsolationQuery:
    """A point evaluation request: channel, receiver structure, density."""

    params: ChannelParams
    scheme: DiversityScheme
    node_density: float   # nodes per square meter

    def __post_init__(self) -> None:
        if not self.node_density >= 0:
            raise ValueError(f"node density must be >= 0, got {self.node_density}")


def _shadow_factor(params: ChannelParams) -> float:
    return math.exp(2.0 * params.sigma**2 / params.alpha**2)


def _gamma_ladder(x0: float, count: int) -> list[float]:
    """[Gamma(x0), Gamma(x0+1), ..., Gamma(x0+count-1)] from one evaluation."""
    values = [gamma_fn(x0)]
    for l in range(1, count):
        values.append(values[-1] * (x0 + l - 1))
    return values


def _gamma_over_factorial_ladder(x0: float, count: int) -> list[float]:
    """[Gamma(x0+l)/l! for l < count]; the ratio grows only like l^(x0-1),
    so the ladder stays in range for arbitrarily long series."""
    values = [gamma_fn(x0)]
    for l in range(1, count):
        values.append(values[-1] * (x0 + l - 1) / l)
    return values


# ============================================================================
#  E[R^2] closed forms
# ============================================================================


def expected_r2_shadow_only(params: ChannelParams) -> float:
    """Mean squared range with path loss and shadowing only (no fading).

    Equals (k*ptx/(psi*w))^(2/alpha) * exp(2 sigma^2/alpha^2); the
    no-fading baseline that every fading form approaches as m grows.
    """
    budget = params.k * params.ptx / (params.psi * params.w)
    return budget ** (2.0 / params.alpha) * _shadow_factor(params)


def expected_r2_nakagami(params: ChannelParams) -> float:
    """Mean squared range under Nakagami-m fading, no shadowing."""
    x0 = 2.0 / params.alpha
    series = math.fsum(_gamma_over_factorial_ladder(x0, params.m))
    return x0 * params.theta ** (-x0) * series


def expected_r2_nakagami_shadow(params: ChannelParams) -> float:
    """Nakagami fading with superimposed lognormal shadowing."""
    return expected_r2_nakagami(params) * _shadow_factor(params)


def expected_r2_mrc(params: ChannelParams, diversity_order: int) -> float:
    """Mean squared range with maximal-ratio combining over M branches."""
    M = int(diversity_order)
    if M != diversity_order or M < 1:
        raise ValueError(f"diversity order must be a positive integer, got {diversity_order}")
    x0 = 2.0 / params.alpha
    series = math.fsum(_gamma_over_factorial_ladder(x0, params.m * M))
    return x0 * params.theta ** (-x0) * series * _shadow_factor(params)


def expected_r2_sc(params: ChannelParams, diversity_order: int, beta: BetaTable) -> float:
    """Mean squared range with selection combining over M branches.

    Alternating sum over branch subsets; evaluated with exact compensated
    summation and guarded against catastrophic cancellation.
    """
    M = int(diversity_order)
    if M != diversity_order or M < 1:
        raise ValueError(f"diversity order must be a positive integer, got {diversity_order}")
    if M > SC_MAX_ORDER:
        raise ValueError(
            f"selection-combining order {M} exceeds the supported maximum "
            f"{SC_MAX_ORDER}; the alternating sum loses too much precision beyond it"
        )
    if beta.m != params.m or beta.diversity_order < M:
        raise ValueError(
            f"coefficient table built for (m={beta.m}, M={beta.diversity_order}) "
            f"does not cover (m={params.m}, M={M})"
        )
    m = params.m
    x0 = 2.0 / params.alpha
    top = M * (m - 1)
    terms: list[float] = []
    if x0 + top < 170.0:
        ladder = _gamma_ladder(x0, top + 1)
        for h in range(1, M + 1):
            c = comb(M, h)
            sign = -1.0 if h % 2 else 1.0
            row = beta.rows[h]
            for l in range(len(row)):
                terms.append(sign * c * row[l] * h ** -(x0 + l) * ladder[l])
    else:
        # Gamma(x0 + l) overflows on its own up there; assemble each term
        # in log space instead (the terms themselves stay in range).
        for h in range(1, M + 1):
            log_c = math.log(comb(M, h))
            sign = -1.0 if h % 2 else 1.0
            log_h = math.log(h)
            row = beta.rows[h]
            for l in range(len(row)):
                if row[l] == 0.0:
                    continue
                mag = log_c + math.log(row[l]) - (x0 + l) * log_h + math.lgamma(x0 + l)
                terms.append(sign * math.exp(mag))
    inner = math.fsum(terms)
    peak = max(abs(t) for t in terms)
    if inner >= 0.0 or peak > _MAX_DIGIT_LOSS * abs(inner):
        raise CancellationError(
            f"selection-combining sum lost more than 6 digits "
            f"(peak term {peak:.3e}, sum {inner:.3e})"
        )
    return -x0 * params.theta ** (-x0) * _shadow_factor(params) * inner


def expected_r2(params: ChannelParams, scheme: DiversityScheme) -> float:
    """Single dispatch point for E[R^2] over receiver structures.

    M = 1 MRC/SC collapse to the single-branch form here, so the
    downstream isolation probability is computed in exactly one place.
    """
    if scheme.branches > 1 and scheme.kind == "mrc":
        return expected_r2_mrc(params, scheme.branches)
    if scheme.branches > 1 and scheme.kind == "sc":
        return expected_r2_sc(params, scheme.branches, build_beta_table(params.m, scheme.branches))
    return expected_r2_nakagami_shadow(params)


# ============================================================================
#  Isolation probability and inversions
# ============================================================================


def isolation_probability(query: IsolationQuery) -> float:
    """P_I = exp(-lambda * pi * E[R^2]) for the queried configuration."""
    return math.exp(-query.node_density * math.pi * expected_r2(query.params, query.scheme))


def min_density_for_isolation(
    params: ChannelParams,
    scheme: DiversityScheme,
    target_p_i: float,
) -> float:
    """Node density at which the isolation probability equals the target."""
    if not 0.0 < target_p_i < 1.0:
        raise ValueError(f"target isolation probability must lie in (0, 1), got {target_p_i}")
    return -math.log(target_p_i) / (math.pi * expected_r2(params, scheme))


def density_spread_tradeoff(
    params: ChannelParams,
    scheme: DiversityScheme,
    target_p_i: float,
    sigma_grid: Sequence[float],
) -> list[tuple[float, float]]:
    """Required density versus shadowing spread at a fixed isolation target.

    Returns (sigma, lambda) pairs; lambda decreases with sigma because the
    shadowing factor inflates E[R^2].
    """
    if len(sigma_grid) == 0:
        raise ValueError("sigma grid must be nonempty")
    out = []
    for sigma in sigma_grid:
        if sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {sigma}")
        p = replace(params, sigma=sigma)
        out.append((sigma, min_density_for_isolation(p, scheme, target_p_i)))
    return out
