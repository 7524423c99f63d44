"""Link-level channel model: parameters, success probabilities, diversity.

All power-like quantities are stored linear (milliwatts); dB inputs are
converted at the CLI boundary. The shadowing spread ``sigma`` is the
standard deviation of the *natural* logarithm of path loss; use
:func:`sigma_from_db` for a dB-spread input.

Provides:
  - ChannelParams / DiversityScheme / BetaTable value types
  - single-branch, maximal-ratio and selection-combining success
    probabilities for integer Nakagami severity
  - the multinomial coefficient table behind the selection-combining form
  - the lognormal path-loss density
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, factorial
from typing import Callable

from .specialfn import LOG_SPACE_CUTOVER, truncated_exp_series

__all__ = [
    "BetaTable",
    "ChannelParams",
    "DiversityScheme",
    "build_beta_table",
    "db_to_linear",
    "make_success_fn",
    "path_loss_pdf",
    "sigma_from_db",
    "success_prob_mrc",
    "success_prob_nakagami",
    "success_prob_sc",
]


def db_to_linear(value_db: float) -> float:
    """10^(dB/10)."""
    return 10.0 ** (value_db / 10.0)


def sigma_from_db(sigma_db: float) -> float:
    """Convert a dB shadowing spread to natural-log units."""
    return sigma_db * math.log(10.0) / 10.0


# ============================================================================
#  Value types
# ============================================================================


@dataclass(frozen=True)
class ChannelParams:
    """Static link-budget and fading parameters, all linear units."""

    ptx: float            # transmit power [mW]
    w: float              # receiver noise power [mW]
    k: float              # path-loss constant [linear]
    psi: float            # SNR threshold [linear]
    alpha: float          # path-loss exponent
    sigma: float = 0.0    # shadowing spread [natural-log units]
    m: int = 1            # Nakagami severity, positive integer

    def __post_init__(self) -> None:
        for name in ("ptx", "w", "k", "psi", "alpha"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def theta(self) -> float:
        """m * psi * w / (k * ptx), the recurring threshold-to-budget ratio."""
        return self.m * self.psi * self.w / (self.k * self.ptx)

    def mean_snr(self, rho: float) -> float:
        """Distance-law average SNR k * ptx * rho^-alpha / w (no shadowing)."""
        return self.k * self.ptx * rho ** -self.alpha / self.w


@dataclass(frozen=True)
class DiversityScheme:
    """Receiver structure: single branch, MRC or SC over M branches."""

    kind: str            # 'none' | 'mrc' | 'sc'
    branches: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("none", "mrc", "sc"):
            raise ValueError(f"unknown diversity kind {self.kind!r}")
        if int(self.branches) != self.branches or self.branches < 1:
            raise ValueError(f"branches must be a positive integer, got {self.branches}")
        object.__setattr__(self, "branches", int(self.branches))
        if self.kind == "none" and self.branches != 1:
            raise ValueError("single-branch reception has exactly one branch")

    @classmethod
    def no_diversity(cls) -> "DiversityScheme":
        return cls("none", 1)

    @classmethod
    def mrc(cls, branches: int) -> "DiversityScheme":
        return cls("mrc", branches)

    @classmethod
    def sc(cls, branches: int) -> "DiversityScheme":
        return cls("sc", branches)


@dataclass(frozen=True)
class BetaTable:
    """Coefficients of [sum_{k<m} x^k/k!]^n expanded in powers of x.

    ``rows[n][k]`` holds the coefficient of x^k in the n-th power,
    n = 0..diversity_order, k = 0..n*(m-1). Coefficients outside that
    range are zero.
    """

    m: int
    diversity_order: int
    rows: tuple[tuple[float, ...], ...]

    def coeff(self, k: int, n: int) -> float:
        if n < 0 or n > self.diversity_order:
            raise ValueError(f"power index {n} outside table (0..{self.diversity_order})")
        row = self.rows[n]
        if k < 0 or k >= len(row):
            return 0.0
        return row[k]


def build_beta_table(m: int, diversity_order: int) -> BetaTable:
    """Build the coefficient table by row convolution.

    Row n is row n-1 convolved with (1/0!, 1/1!, ..., 1/(m-1)!); the base
    cases beta_00 = beta_0n = 1 and beta_k1 = 1/k! fall out of the
    recursion from the seed row (1,).
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if int(diversity_order) != diversity_order or diversity_order < 1:
        raise ValueError(f"diversity order must be a positive integer, got {diversity_order}")
    m = int(m)
    diversity_order = int(diversity_order)
    rows: list[tuple[float, ...]] = [(1.0,)]
    for n in range(1, diversity_order + 1):
        prev = rows[n - 1]
        prev_top = (n - 1) * (m - 1)
        row = []
        for k in range(n * (m - 1) + 1):
            acc = 0.0
            for i in range(max(0, k - m + 1), min(k, prev_top) + 1):
                acc += prev[i] / factorial(k - i)
            row.append(acc)
        rows.append(tuple(row))
    return BetaTable(m=m, diversity_order=diversity_order, rows=tuple(rows))


# ============================================================================
#  Success probabilities
# ============================================================================


def success_prob_nakagami(y: float, params: ChannelParams) -> float:
    """P(instantaneous SNR >= psi) on one Nakagami-m branch of mean SNR y."""
    if not y > 0:
        raise ValueError(f"average SNR must be positive, got {y}")
    return truncated_exp_series(params.m * params.psi / y, params.m)


def success_prob_mrc(y: float, diversity_order: int, params: ChannelParams) -> float:
    """Success probability after maximal-ratio combining of M branches.

    Branches are independent with identical mean SNR y; the combiner output
    is Gamma(m*M, y/m), so the single-branch series simply runs to m*M - 1.
    """
    if not y > 0:
        raise ValueError(f"average SNR must be positive, got {y}")
    if int(diversity_order) != diversity_order or diversity_order < 1:
        raise ValueError(f"diversity order must be a positive integer, got {diversity_order}")
    return truncated_exp_series(params.m * params.psi / y, params.m * int(diversity_order))


def success_prob_sc(
    y: float,
    diversity_order: int,
    params: ChannelParams,
    beta: BetaTable,
) -> float:
    """Success probability after selection combining of M branches.

    Complement of all M branches falling below threshold, expanded
    binomially with the coefficient table:
        -sum_{n=1}^{M} (-1)^n C(M,n) e^{-n x} sum_k beta_kn x^k,  x = m psi / y.
    Identically equal to 1 - (1 - single_branch)^M.
    """
    if not y > 0:
        raise ValueError(f"average SNR must be positive, got {y}")
    M = int(diversity_order)
    if M != diversity_order or M < 1:
        raise ValueError(f"diversity order must be a positive integer, got {diversity_order}")
    if beta.m != params.m or beta.diversity_order < M:
        raise ValueError(
            f"coefficient table built for (m={beta.m}, M={beta.diversity_order}) "
            f"does not cover (m={params.m}, M={M})"
        )
    m = params.m
    x = m * params.psi / y
    terms: list[float] = []
    top = M * (m - 1)
    # x^k itself can overflow for very long polynomials even while each
    # full term is tiny; route those through the log-space branch too.
    if x <= LOG_SPACE_CUTOVER and top * max(math.log(x), 0.0) < 680.0:
        for n in range(1, M + 1):
            row = beta.rows[n]
            poly = 0.0
            xk = 1.0
            for k in range(len(row)):
                poly += row[k] * xk
                xk *= x
            terms.append(-((-1.0) ** n) * comb(M, n) * math.exp(-n * x) * poly)
    else:
        # Per-term log-space evaluation keeps sub-normal results meaningful.
        lx = math.log(x)
        for n in range(1, M + 1):
            row = beta.rows[n]
            for k in range(len(row)):
                if row[k] == 0.0:
                    continue
                mag = math.log(comb(M, n)) + math.log(row[k]) + k * lx - n * x
                terms.append(-((-1.0) ** n) * math.exp(mag))
    total = math.fsum(terms)
    return min(max(total, 0.0), 1.0)


def make_success_fn(params: ChannelParams, scheme: DiversityScheme) -> Callable[[float], float]:
    """Bind the per-scheme success probability to a function of mean SNR."""
    if scheme.kind == "mrc" and scheme.branches > 1:
        M = scheme.branches
        return lambda y: success_prob_mrc(y, M, params)
    if scheme.kind == "sc" and scheme.branches > 1:
        M = scheme.branches
        beta = build_beta_table(params.m, M)
        return lambda y: success_prob_sc(y, M, params, beta)
    return lambda y: success_prob_nakagami(y, params)


# ============================================================================
#  Path-loss density
# ============================================================================


def path_loss_pdf(a: float, rho: float, params: ChannelParams) -> float:
    """Lognormal density of the linear path loss at distance rho.

    The log of path loss is normal with median k * rho^-alpha and spread
    sigma. sigma = 0 is a point mass and must be dispatched by the caller
    to the unshadowed model instead of evaluated here.
    """
    if not params.sigma > 0:
        raise ValueError("sigma = 0 is a degenerate point mass; use the unshadowed model")
    if not a > 0:
        raise ValueError(f"path loss must be positive, got {a}")
    if not rho > 0:
        raise ValueError(f"distance must be positive, got {rho}")
    z = (math.log(a) - math.log(params.k) + params.alpha * math.log(rho)) / params.sigma
    return math.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * params.sigma * a)
