import math
from fractions import Fraction

import pytest

from random3m.covers import (MIN_SPACING, ExperimentReport, alternating_model_p, exact_p_small_group,
                             expectation_limit, limit_probability, monte_carlo_p, quotient_distribution,
                             sequence_probability, tunnel_one_experiment)
from random3m.surface import WalkSpec
from random3m.symplectic import homology_dim_distribution


@pytest.mark.parametrize("p", [2, 3])
def test_cyclic_quotient_probability_two_routes(p):
    # a Z/p cover exists iff H_1(M; F_p) != 0, i.e. J and phi J meet
    assert exact_p_small_group(f"Z/{p}") == 1 - homology_dim_distribution(2, p)[0]


def test_z2_value():
    assert exact_p_small_group("Z/2") == Fraction(7, 15)


def test_a5_exact_values():
    p, expect, ot = alternating_model_p("A5")
    assert expect == Fraction(361, 1440)
    assert p == pytest.approx(1 - math.comb(1421, 19) / math.comb(1440, 19), rel=1e-12)
    assert round(p, 4) == 0.2243


def test_limits():
    mu, lim = limit_probability("A5")
    assert mu == 1 and lim == pytest.approx(1 - math.exp(-1))
    assert limit_probability("PSL(2,8)")[0] == Fraction(1, 3)
    assert expectation_limit("A5") == 1
    assert sequence_probability(["A5", "PSL(2,7)"]) == pytest.approx(1 - math.exp(-2))
    with pytest.raises(ValueError):
        limit_probability("Z/2")


def test_monte_carlo_is_deterministic_and_sane():
    walk = WalkSpec(2, 100_000, seed=7)
    r1 = monte_carlo_p("A5", walk, epochs=1000)
    r2 = monte_carlo_p("A5", walk, epochs=1000)
    assert (r1.successes, r1.histogram) == (r2.successes, r2.histogram)
    # the exact finite-genus value is 0.2243; epochs are correlated so allow 5 sigma
    assert abs(r1.estimate - 0.2243) < 5 * math.sqrt(0.2243 * 0.7757 / r1.n)
    assert quotient_distribution(r1).n == r1.n


def test_epoch_spacing_is_enforced():
    r = monte_carlo_p("A5", WalkSpec(2, 11_000, seed=1), epochs=10_000, burn_in=1000)
    assert r.extra["epochs"] == 10_000 // MIN_SPACING
    assert r.extra["epochs_requested"] == 10_000
    assert r.extra["spacing"] >= MIN_SPACING
    with pytest.raises(ValueError):
        monte_carlo_p("A5", WalkSpec(2, 1000), epochs=10)


def test_tunnel_one_bounds_closed_manifold_rate():
    walk = WalkSpec(2, 50_000, seed=3)
    closed = monte_carlo_p("A5", walk, epochs=500)
    tunnel = tunnel_one_experiment("A5", walk, epochs=500)
    # a closed-manifold quotient also kills phi(b_1), so the tunnel rate dominates epoch by epoch
    assert tunnel.successes >= closed.successes
    assert tunnel_one_experiment("A5", WalkSpec(2, 0)).estimate == 1.0


def test_report_merge():
    a = ExperimentReport({"seed": 1}, 10, 3, {0: 7, 1: 3})
    b = ExperimentReport({"seed": 0}, 5, 5, {1: 4, 2: 1})
    m = a.merge(b)
    assert (m.n, m.successes, m.histogram, m.config["seed"]) == (15, 8, {0: 7, 1: 7, 2: 1}, [0, 1])
    assert m.to_dict()["estimate"] == pytest.approx(8 / 15)
    lo, hi = m.ci
    assert 0 <= lo < m.estimate < hi <= 1
