"""Monte Carlo estimation of the node isolation probability.

Each replication samples a Poisson number of nodes uniformly on a square,
draws one reciprocal channel per node pair (common shadowing across
diversity branches, independent fading per branch) and counts degree-zero
nodes. Replications are deterministic given (master_seed, run_index) and
independently executable in parallel; the reduction is over integer
counters, so serial and parallel execution agree bit for bit.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, DiversityScheme, make_success_fn
from .quadrature import shadow_averaged_success

__all__ = [
    "MonteCarloEstimate",
    "SimConfig",
    "Topology",
    "effective_range_cutoff",
    "format_topology_export",
    "isolation_count",
    "link_trial",
    "pair_distance",
    "run_monte_carlo",
    "sample_topology",
]

# Pairs farther apart than the cutoff radius have a shadow-averaged link
# probability below this and are skipped without consuming randomness.
_CUTOFF_TAIL = 1e-12

# Substream domains under one (master_seed, run_index) pair.
_TOPOLOGY_DOMAIN = 0
_CHANNEL_DOMAIN = 1


@dataclass(frozen=True)
class SimConfig:
    """One simulation campaign: channel, density, geometry, replication."""

    params: ChannelParams
    scheme: DiversityScheme
    node_density: float          # nodes per square meter
    area_side: float = 100.0     # meters
    boundary: str = "toroidal"   # 'bounded' | 'toroidal'
    runs: int = 1000
    master_seed: int = 0

    def __post_init__(self) -> None:
        if not self.node_density >= 0:
            raise ValueError(f"node density must be >= 0, got {self.node_density}")
        if not self.area_side > 0:
            raise ValueError(f"area side must be positive, got {self.area_side}")
        if self.boundary not in ("bounded", "toroidal"):
            raise ValueError(f"boundary must be 'bounded' or 'toroidal', got {self.boundary!r}")
        if int(self.runs) != self.runs or self.runs < 1:
            raise ValueError(f"runs must be a positive integer, got {self.runs}")
        if int(self.master_seed) != self.master_seed or not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master seed must be a 64-bit unsigned integer, got {self.master_seed}")
        object.__setattr__(self, "runs", int(self.runs))
        object.__setattr__(self, "master_seed", int(self.master_seed))


@dataclass(frozen=True)
class Topology:
    """Sampled node positions on the simulation square."""

    positions: np.ndarray        # shape (n, 2), coordinates in [0, area_side)
    area_side: float
    boundary: str

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Isolation-probability estimate with uncertainty and counters."""

    p_isolated: float
    std_error: float
    ci95: tuple[float, float]
    total_nodes: int
    total_isolated: int
    runs_executed: int
    runs_empty: int
    runs_with_isolated: int

    @property
    def p_any_isolated(self) -> float:
        """Fraction of nonempty replications containing an isolated node."""
        nonempty = self.runs_executed - self.runs_empty
        return self.runs_with_isolated / nonempty if nonempty else math.nan


def _stream(master_seed: int, run_index: int, domain: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=(master_seed, run_index, domain)))


# ============================================================================
#  Geometry and per-link trials
# ============================================================================


def sample_topology(config: SimConfig, run_index: int) -> Topology:
    """Poisson node count, independent uniform positions on the square.

    Deterministic in (config.master_seed, run_index); zero-node outputs
    are valid.
    """
    rng = _stream(config.master_seed, run_index, _TOPOLOGY_DOMAIN)
    count = int(rng.poisson(config.node_density * config.area_side**2))
    positions = rng.random((count, 2)) * config.area_side
    return Topology(positions=positions, area_side=config.area_side, boundary=config.boundary)


def pair_distance(
    p1: tuple[float, float],
    p2: tuple[float, float],
    area_side: float,
    boundary: str,
) -> float:
    """Euclidean distance, with per-axis wraparound in toroidal mode."""
    dx = abs(p1[0] - p2[0])
    dy = abs(p1[1] - p2[1])
    if boundary == "toroidal":
        dx = min(dx, area_side - dx)
        dy = min(dy, area_side - dy)
    return math.hypot(dx, dy)


def link_trial(
    rho: float,
    params: ChannelParams,
    scheme: DiversityScheme,
    rng: np.random.Generator,
) -> bool:
    """Realize one link at distance rho and test it against the threshold.

    One shadowing multiplier is shared across all diversity branches;
    branch fading gains are independent. The MRC combiner output is drawn
    as a single Gamma(m*M, y/m) variate (the exact law of the branch sum);
    SC draws all M branches and keeps the maximum.
    """
    if not rho > 0:
        raise ValueError(f"distance must be positive, got {rho}")
    y = params.mean_snr(rho)
    if params.sigma > 0:
        y *= math.exp(params.sigma * rng.standard_normal())
    m = params.m
    if scheme.kind == "mrc" and scheme.branches > 1:
        snr = rng.gamma(m * scheme.branches, y / m)
    elif scheme.kind == "sc" and scheme.branches > 1:
        snr = rng.gamma(m, y / m, size=scheme.branches).max()
    else:
        snr = rng.gamma(m, y / m)
    return bool(snr >= params.psi)


def effective_range_cutoff(
    params: ChannelParams,
    scheme: DiversityScheme,
    tail: float = _CUTOFF_TAIL,
) -> float:
    """Radius beyond which the shadow-averaged link probability < tail."""
    success = make_success_fn(params, scheme)

    def averaged(rho: float) -> float:
        y = params.mean_snr(rho)
        if y <= 0.0:
            return 0.0
        return shadow_averaged_success(success, y, params.sigma)

    hi = 1.0
    if averaged(hi) < tail:
        while hi > 1e-12 and averaged(hi / 2.0) < tail:
            hi /= 2.0
        lo = hi / 2.0
    else:
        for _ in range(400):
            hi *= 2.0
            if averaged(hi) < tail:
                break
        else:
            return math.inf
        lo = hi / 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if averaged(mid) < tail:
            hi = mid
        else:
            lo = mid
    return hi


# ============================================================================
#  Replications
# ============================================================================


def isolation_count(
    topology: Topology,
    params: ChannelParams,
    scheme: DiversityScheme,
    rng: np.random.Generator,
    range_cutoff: float = math.inf,
) -> tuple[int, int]:
    """Count degree-zero nodes after one channel realization per pair.

    Links are reciprocal: a single draw decides both directions of each
    unordered pair. Pairs beyond the range cutoff are skipped. Draws are
    consumed in sorted-pair order, so the result is deterministic in the
    generator state.
    """
    n = len(topology)
    if n == 0:
        return 0, 0
    if n == 1:
        return 1, 1
    pos = topology.positions
    i_idx, j_idx = np.triu_indices(n, k=1)
    delta = np.abs(pos[i_idx] - pos[j_idx])
    if topology.boundary == "toroidal":
        delta = np.minimum(delta, topology.area_side - delta)
    dist = np.hypot(delta[:, 0], delta[:, 1])
    if math.isfinite(range_cutoff):
        keep = dist <= range_cutoff
        i_idx, j_idx, dist = i_idx[keep], j_idx[keep], dist[keep]
    connected = np.zeros(n, dtype=bool)
    if len(dist):
        dist = np.maximum(dist, 1e-9)
        y = params.k * params.ptx * dist ** -params.alpha / params.w
        if params.sigma > 0:
            y = y * np.exp(params.sigma * rng.standard_normal(len(dist)))
        m = params.m
        if scheme.kind == "mrc" and scheme.branches > 1:
            snr = rng.gamma(m * scheme.branches, y / m)
        elif scheme.kind == "sc" and scheme.branches > 1:
            snr = rng.gamma(m, y[:, None] / m, size=(len(dist), scheme.branches)).max(axis=1)
        else:
            snr = rng.gamma(m, y / m)
        up = snr >= params.psi
        connected[i_idx[up]] = True
        connected[j_idx[up]] = True
    isolated = n - int(connected.sum())
    return isolated, n


def _simulate_block(
    config: SimConfig,
    range_cutoff: float,
    start: int,
    stop: int,
) -> tuple[int, np.ndarray, np.ndarray]:
    isolated = np.empty(stop - start, dtype=np.int64)
    totals = np.empty(stop - start, dtype=np.int64)
    for i in range(start, stop):
        topology = sample_topology(config, i)
        rng = _stream(config.master_seed, i, _CHANNEL_DOMAIN)
        iso, tot = isolation_count(topology, config.params, config.scheme, rng, range_cutoff)
        isolated[i - start] = iso
        totals[i - start] = tot
    return start, isolated, totals


def run_monte_carlo(config: SimConfig, n_jobs: int = 1) -> MonteCarloEstimate:
    """Execute all replications and reduce them to one estimate.

    The point estimate is total isolated nodes over total nodes; the
    standard error treats each replication as one cluster, which accounts
    for the correlation of isolation events within a topology. Results are
    bit-identical for any n_jobs.
    """
    cutoff = effective_range_cutoff(config.params, config.scheme)
    runs = config.runs
    isolated = np.empty(runs, dtype=np.int64)
    totals = np.empty(runs, dtype=np.int64)
    if n_jobs <= 1 or runs == 1:
        _, isolated, totals = _simulate_block(config, cutoff, 0, runs)
    else:
        n_jobs = min(n_jobs, runs)
        bounds = np.linspace(0, runs, n_jobs + 1, dtype=int)
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            futures = [
                pool.submit(_simulate_block, config, cutoff, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:])
                if b > a
            ]
            for fut in futures:
                start, iso_block, tot_block = fut.result()
                isolated[start : start + len(iso_block)] = iso_block
                totals[start : start + len(tot_block)] = tot_block

    total_nodes = int(totals.sum())
    total_isolated = int(isolated.sum())
    runs_empty = int((totals == 0).sum())
    runs_with_isolated = int((isolated > 0).sum())
    if total_nodes == 0:
        p = math.nan
        se = math.nan
        ci = (math.nan, math.nan)
    else:
        p = total_isolated / total_nodes
        if runs > 1:
            residuals = isolated - p * totals
            se = math.sqrt(runs * float(np.sum(residuals**2))) / ((runs - 1) ** 0.5 * total_nodes)
        else:
            se = math.nan
        ci = (max(0.0, p - 1.96 * se), min(1.0, p + 1.96 * se))
    if total_nodes < 100:
        warnings.warn(
            f"only {total_nodes} node samples across {runs} runs; "
            "the standard error is unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    return MonteCarloEstimate(
        p_isolated=p,
        std_error=se,
        ci95=ci,
        total_nodes=total_nodes,
        total_isolated=total_isolated,
        runs_executed=runs,
        runs_empty=runs_empty,
        runs_with_isolated=runs_with_isolated,
    )


def format_topology_export(topology: Topology, master_seed: int, run_index: int) -> str:
    """Render a topology in the plotter exchange format.

    Header line '# area_side=<v> boundary=<mode> seed=<s> run=<i>' followed
    by one 'x,y' line per node in decimal meters.
    """
    lines = [
        f"# area_side={topology.area_side:g} boundary={topology.boundary} "
        f"seed={master_seed} run={run_index}"
    ]
    for x, y in topology.positions:
        lines.append(f"{x:.6f},{y:.6f}")
    return "\n".join(lines) + "\n"
