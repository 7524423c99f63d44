import math

import numpy as np
import pytest

from nodeiso.analytic import (
    SC_MAX_ORDER,
    IsolationQuery,
    density_spread_tradeoff,
    expected_r2,
    expected_r2_mrc,
    expected_r2_nakagami,
    expected_r2_nakagami_shadow,
    expected_r2_sc,
    expected_r2_shadow_only,
    isolation_probability,
    min_density_for_isolation,
)
from nodeiso.channel import ChannelParams, DiversityScheme, build_beta_table

BASE = dict(ptx=1.0, w=0.01, k=10.0, psi=10.0)


def params(m=1, sigma=0.0, alpha=4.0, **over):
    kw = dict(BASE, alpha=alpha, sigma=sigma, m=m)
    kw.update(over)
    return ChannelParams(**kw)


# ============================================================================
#  Shadowing-only baseline
# ============================================================================


def test_shadow_only_deterministic_disk():
    # k*ptx/(psi*w) = 1e4 and alpha = 4 gives a 10 m disk.
    p = ChannelParams(ptx=1.0, w=0.01, k=100.0, psi=1.0, alpha=4.0, sigma=0.0)
    assert expected_r2_shadow_only(p) == pytest.approx(100.0, rel=1e-12)


@pytest.mark.parametrize(
    "sigma,expected",
    [(2.0, 164.87212707001282), (4.0, 738.905609893065)],
)
def test_shadow_only_spread_factor(sigma, expected):
    p = ChannelParams(ptx=1.0, w=0.01, k=100.0, psi=1.0, alpha=4.0, sigma=sigma)
    assert expected_r2_shadow_only(p) == pytest.approx(expected, rel=1e-12)


# ============================================================================
#  Nakagami forms
# ============================================================================


def test_nakagami_m1_alpha2_is_inverse_theta():
    p = params(m=1, alpha=2.0)
    assert expected_r2_nakagami(p) == pytest.approx(1.0 / p.theta, rel=1e-14)


def test_nakagami_reference_values():
    assert expected_r2_nakagami(params(m=2)) == pytest.approx(9.399856029866251, rel=1e-12)
    assert expected_r2_nakagami(params(m=1)) == pytest.approx(8.862269254527579, rel=1e-12)


def test_nakagami_shadow_reduction_and_values():
    p0 = params(m=2, sigma=0.0)
    assert expected_r2_nakagami_shadow(p0) == expected_r2_nakagami(p0)
    assert expected_r2_nakagami_shadow(params(m=2, sigma=2.0)) == pytest.approx(
        15.497742577959349, rel=1e-12
    )
    assert expected_r2_nakagami_shadow(params(m=2, sigma=4.0)) == pytest.approx(
        69.45606352655328, rel=1e-12
    )


# ============================================================================
#  Diversity forms
# ============================================================================


def test_mrc_single_branch_reduction_exact():
    for m in (1, 2, 4):
        for sigma in (0.0, 2.0):
            p = params(m=m, sigma=sigma)
            assert expected_r2_mrc(p, 1) == expected_r2_nakagami_shadow(p)


def test_mrc_reference_values():
    assert expected_r2_mrc(params(m=2), 2) == pytest.approx(13.708123376888283, rel=1e-12)
    assert expected_r2_mrc(params(m=1), 2) == pytest.approx(13.29340388179137, rel=1e-12)


def test_sc_single_branch_reduction():
    for m in (1, 2, 4):
        p = params(m=m)
        got = expected_r2_sc(p, 1, build_beta_table(m, 1))
        assert got == pytest.approx(expected_r2_nakagami_shadow(p), rel=1e-12)


def test_sc_reference_value():
    p = params(m=1)
    assert expected_r2_sc(p, 2, build_beta_table(1, 2)) == pytest.approx(
        11.457967822477658, rel=1e-12
    )


def test_sc_below_mrc():
    for m in (1, 2, 4):
        p = params(m=m)
        for M in (2, 3, 4, 8):
            sc = expected_r2_sc(p, M, build_beta_table(m, M))
            assert 0.0 < sc <= expected_r2_mrc(p, M)


def test_sc_order_cap():
    p = params(m=2)
    with pytest.raises(ValueError):
        expected_r2_sc(p, SC_MAX_ORDER + 1, build_beta_table(2, SC_MAX_ORDER + 1))


def test_sc_table_mismatch():
    p = params(m=2)
    with pytest.raises(ValueError):
        expected_r2_sc(p, 2, build_beta_table(3, 2))


def test_dispatch_reductions():
    p = params(m=2, sigma=1.0)
    base = expected_r2(p, DiversityScheme.no_diversity())
    assert expected_r2(p, DiversityScheme.mrc(1)) == base
    assert expected_r2(p, DiversityScheme.sc(1)) == base
    assert expected_r2(p, DiversityScheme.mrc(2)) == expected_r2_mrc(p, 2)
    assert expected_r2(p, DiversityScheme.sc(2)) == expected_r2_sc(p, 2, build_beta_table(2, 2))


# ============================================================================
#  Isolation probability
# ============================================================================


def test_isolation_empty_network():
    q = IsolationQuery(params(m=2), DiversityScheme.no_diversity(), 0.0)
    assert isolation_probability(q) == 1.0


def test_isolation_reference_value():
    q = IsolationQuery(params(m=2), DiversityScheme.no_diversity(), 1e-4)
    assert isolation_probability(q) == pytest.approx(0.9970513041039797, rel=1e-12)


def test_isolation_monotone_in_density():
    p = params(m=2)
    scheme = DiversityScheme.no_diversity()
    lams = np.logspace(-5, -1, 30)
    vals = [isolation_probability(IsolationQuery(p, scheme, lam)) for lam in lams]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < vals[0] <= 1.0


def test_isolation_limit_large_density():
    q = IsolationQuery(params(m=2), DiversityScheme.no_diversity(), 1e6)
    assert isolation_probability(q) == pytest.approx(0.0, abs=1e-300)


def test_isolation_query_validation():
    with pytest.raises(ValueError):
        IsolationQuery(params(), DiversityScheme.no_diversity(), -1e-3)


# ============================================================================
#  Inversions
# ============================================================================


def test_min_density_reference_value():
    lam = min_density_for_isolation(params(m=2), DiversityScheme.no_diversity(), 0.01)
    assert lam == pytest.approx(0.15594613290898593, rel=1e-10)


def test_min_density_round_trip_grid():
    p = params(m=2, sigma=1.0)
    scheme = DiversityScheme.mrc(2)
    for lam in np.logspace(-6, -1, 12):
        target = isolation_probability(IsolationQuery(p, scheme, lam))
        back = min_density_for_isolation(p, scheme, target)
        assert back == pytest.approx(lam, rel=1e-10)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.7])
def test_min_density_domain(bad):
    with pytest.raises(ValueError):
        min_density_for_isolation(params(), DiversityScheme.no_diversity(), bad)


def test_density_spread_tradeoff():
    p = params(m=4)
    scheme = DiversityScheme.no_diversity()
    grid = [0.0, 1.0, 2.0, 3.0, 4.0]
    pairs = density_spread_tradeoff(p, scheme, 0.01, grid)
    lam0 = min_density_for_isolation(p, scheme, 0.01)
    assert pairs[0] == (0.0, lam0)
    lams = [lam for _, lam in pairs]
    assert all(b < a for a, b in zip(lams, lams[1:]))
    for sigma, lam in pairs:
        assert lam / lam0 == pytest.approx(math.exp(-2 * sigma**2 / p.alpha**2), rel=1e-12)
    # alpha = 4, sigma = 4 forces the ratio e^-2.
    assert lams[-1] / lam0 == pytest.approx(math.exp(-2.0), rel=1e-12)


def test_density_spread_tradeoff_validation():
    with pytest.raises(ValueError):
        density_spread_tradeoff(params(), DiversityScheme.no_diversity(), 0.5, [])
    with pytest.raises(ValueError):
        density_spread_tradeoff(params(), DiversityScheme.no_diversity(), 0.5, [-1.0])
