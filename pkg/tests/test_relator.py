from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from random3m.catalog import build
from random3m.finite_field import Mat2, field_of_order, mat2_det, mat2_mul, mat2_trace
from random3m.relator import (PreconditionError, anti_fixed_brute, anti_fixed_formula, beta,
                              brute_hyperelliptic_T, brute_reversing_involutions, common_fixed_point,
                              genus2_image_bound, handlebody_image_check, pgl_involutions, primitive_kernel_density,
                              primitive_kernel_scan, solve_hyperelliptic_T, solve_reversing_involution,
                              surface_to_abcd, torus_image_distribution, verify_hyperelliptic)


def test_beta_values():
    assert [beta(a) for a in (1, 2, 3, 4, 5, 6, 12)] == [1, 3, 4, 6, 6, 12, 24]
    with pytest.raises(ValueError):
        beta(0)


@given(st.integers(1, 12), st.integers(0, 2), st.integers(5, 120))
def test_moebius_count_matches_scan(a, b, radius):
    assert primitive_kernel_density(a, b, radius) == primitive_kernel_scan(a, b, radius)


def test_density_error_shrinks_with_radius():
    err = [abs(float(primitive_kernel_density(3, 0, r).density) - 0.25) for r in (250, 2000)]
    assert err[1] < err[0]
    assert primitive_kernel_density(2, 1, 500).in_kernel == 0


@pytest.mark.parametrize("q", [3, 5])
def test_anti_fixed_formula(q):
    for U in pgl_involutions(q):
        assert anti_fixed_formula(U, q) == anti_fixed_brute(U, q)
    with pytest.raises(ValueError):
        anti_fixed_formula(Mat2(1, 0, 0, 1), q)


@pytest.mark.parametrize("q", [3, 5])
def test_involution_solver_against_exhaustive_search(q):
    cat = build(f"PSL(2,{q})")
    G = cat.group
    F = field_of_order(q)
    rng = np.random.default_rng(q)
    done = 0
    while done < 15:
        a, b = (int(x) for x in rng.integers(0, G.n, 2))
        A, B = cat.elements[a], cat.elements[b]
        if common_fixed_point([A, B], F):
            with pytest.raises(PreconditionError):
                solve_reversing_involution(A, B, q)
            continue
        w = solve_reversing_involution(A, B, q)
        assert w.verify()
        assert mat2_trace(w.T, F) == 0 and mat2_det(w.T, F) != 0
        assert mat2_mul(w.T, w.T, F)[1] == 0  # T^2 is scalar
        assert w.T in brute_reversing_involutions(A, B, q)
        done += 1


def test_even_q_rejected():
    with pytest.raises(PreconditionError):
        solve_reversing_involution(Mat2(1, 1, 0, 1), Mat2(1, 0, 1, 1), 4)


def test_handlebody_images_respect_bound():
    out = handlebody_image_check(5, 3, 150, seed=1)
    assert out["max_image"] <= out["bound"] == genus2_image_bound(5) == 16


def test_hyperelliptic_solver():
    from random3m.catalog import schur_cover
    from random3m.epi import enumerate_A, homology_class

    cat = build("PSL(2,5)")
    A = enumerate_A("PSL(2,5)", 2)
    cls = homology_class(A, schur_cover("PSL(2,5)"))
    rng = np.random.default_rng(2)
    for i in rng.choice(np.flatnonzero(cls == 0), 5, replace=False):
        mats = [cat.elements[j] for j in surface_to_abcd(A[i])]
        sol = solve_hyperelliptic_T(mats, 5)
        assert verify_hyperelliptic(sol.T, mats, 5, [[1, 2, -3], [4, 4, -1, 2]])
        assert sol.T in brute_hyperelliptic_T(mats, 5)


def test_torus_images_a5():
    d = torus_image_distribution("A5")
    total = sum(v.weight for v in d.values())
    assert total == 60 * 5  # |G| * number of classes
    assert abs(Fraction(d["Z/5"].weight, total) - Fraction(1, 2)) <= Fraction(1, 50)
    assert max(d, key=lambda k: d[k].weight) == "Z/5"
    assert d["Z/2+Z/2"].bounding is False and d["Z/5"].bounding is True


def test_torus_images_cyclic_group():
    assert all(k.startswith("Z/") or k == "1" for k in torus_image_distribution("Z/6"))
    assert "+" not in "".join(torus_image_distribution("Z/6"))
