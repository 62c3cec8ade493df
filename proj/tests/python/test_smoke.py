import math

import pytest

import rrag


def test_closed_forms():
    assert rrag.e_real(2) == pytest.approx(math.sqrt(2) - 0.5, rel=1e-14)
    assert rrag.e_complex(3) == 24
    assert rrag.e_real_even_bm(6) == pytest.approx(rrag.e_real(6), rel=1e-10)
    u, v = rrag.e_real_exact(2)
    assert (u, v) == ("-1/2", "1")
    assert rrag.critical_density_constant() == pytest.approx(math.sqrt(2) / math.pi)
    with pytest.raises(rrag.RragError):
        rrag.e_real_signed_small(3, 1)


def test_matrix_monte_carlo_is_deterministic():
    a = rrag.mc_e_real(3, 20000, seed=11)
    b = rrag.mc_e_real(3, 20000, seed=11, workers=3)
    assert (a.mean, a.stderr) == (b.mean, b.stderr)
    assert abs(a.mean - rrag.e_real(3)) <= 4 * a.stderr


def test_signature_tally():
    t = rrag.mc_e_real_by_signature(2, 20000, seed=5)
    assert sum(c["count"] for c in t["classes"]) + t["degenerate_count"] == 20000
    assert t["total"].mean == pytest.approx(sum(c["estimate"].mean for c in t["classes"]), rel=1e-12)


def test_roots():
    assert rrag.count_circle_zeros([0.0, 1.0, 0.0]) == 2
    e = rrag.mc_expected_roots(9, 500, seed=3)
    assert abs(e.mean - 3.0) <= 4 * e.stderr


def test_curves():
    s = rrag.trace_sample(4, seed=2, trial=0)
    assert s["balanced"]
    assert s["index0"] == s["index1"]
    for loop in s["loops"]:
        for x in loop:
            assert math.isclose(math.hypot(*x), 1.0, rel_tol=1e-12)
    r = rrag.mc_critical_point_density(4, 10, seed=2)
    assert r["aborted"] == 0
    assert r["index0"].mean == r["index1"].mean
    assert rrag.complex_crit_count(3, seed=1) == 6


def test_stats_and_acceptance_entry():
    stat, dof, p = rrag.chi_square_uniform([12, 8])
    assert (stat, dof) == (pytest.approx(0.8), 1)
    assert p == pytest.approx(0.371, abs=1e-3)
    c = rrag.run_criterion("closed-forms")
    assert c["pass"]
    with pytest.raises(ValueError):
        rrag.run_criterion("nope")
