import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tropos.bk_potential import gz2_cone
from tropos.cones import Cone, cones_equal
from tropos.dual_group import get_chart, numeric_bracket_matrix
from tropos.exact_algebra import parse_positive
from tropos.partial_trop import (Experiment, PointOnChamberWall, convergence_experiment, fit_slope,
                                 numeric_bracket_at, pl_limit_check, pt_space, real_form_spec, sample_points)


@pytest.fixture(scope="module")
def ex2():
    return Experiment(get_chart(2, (1,)))


@pytest.fixture(scope="module")
def pts2(ex2):
    return sample_points(ex2, 3, seed=1)


def test_real_form_sl2():
    rf = real_form_spec(2, (1,))
    assert rf.sigma == [1, 0, 2]
    assert rf.dim_L == 2 and rf.torus_dim == 1
    assert rf.embed_xi([5, 7]) == [5, 5, 7] and rf.embed_nu([0.5]) == [0.5, -0.5, 0]


def test_real_form_sl3():
    rf = real_form_spec(3, (1, 2, 1))
    assert rf.sigma == [3, 4, 5, 0, 1, 2, 6, 7]
    assert rf.dim_L == 5 and rf.torus_dim == 3


@pytest.mark.parametrize("n", [2, 3, 4])
def test_torus_dimension_is_dim_n(n):
    word = tuple(i for k in range(n - 1, 0, -1) for i in range(1, k + 1))
    assert real_form_spec(n, word).torus_dim == n * (n - 1) // 2


def test_pt_sl2_is_gz_cone_times_circle():
    pt = pt_space(2, (1,))
    # L-coordinates are (xi[b12], xi[b11]); swap into (xi11, xi12)
    assert cones_equal(pt.cone.pullback([[0, 1], [1, 0]]), gz2_cone())
    assert pt.torus_dim == 1
    assert pt.xi_nu() == [[0], [1]]
    assert pt.rank() == 2


@pytest.mark.slow
def test_pt_sl3():
    pt = pt_space(3, (1, 2, 1))
    want = Cone(5, [(-1, 0, 1, 0, -1), (-1, 1, -1, 0, 1), (0, -1, 1, 0, 0), (0, 0, -1, -1, 1),
                    (0, 0, -1, 1, 0), (1, -1, -1, 0, 0)])
    assert cones_equal(pt.cone, want)
    assert pt.torus_dim == 3 and pt.rank() == 6
    B = np.array(pt.bracket, dtype=float)
    assert np.allclose(B, -B.T)
    assert np.allclose(B[:5, :5], 0) and np.allclose(B[5:, 5:], 0)


def test_measured_bracket_near_limit(ex2, pts2):
    for xi, nu in pts2:
        m = numeric_bracket_at(ex2.chart, 40.0, (xi, nu), ex2)
        assert np.max(np.abs(m.bracket - ex2.pt)) < 1e-6
        assert m.imag_defect < 1e-10
        assert np.allclose(m.bracket, -m.bracket.T, atol=1e-10)


def test_limit_is_independent_of_s(ex2, pts2):
    xi, nu = pts2[0]
    a = numeric_bracket_at(ex2.chart, 30.0, (xi, nu), ex2).bracket
    b = numeric_bracket_at(ex2.chart, 50.0, (xi, nu), ex2).bracket
    assert np.max(np.abs(a - b)) < 1e-6


def test_measurement_matches_pushforward(ex2, pts2):
    # independent route: evaluate {z_i, z_j} directly and push forward by the linear change to (xi, nu)
    ch, rf = ex2.chart, ex2.rf
    for xi, nu in pts2:
        s = 5.0
        m = numeric_bracket_at(ch, s, (xi, nu), ex2)
        w = np.exp(m.lam)
        z = np.array([complex(p.evaluate(list(w))) for p in ch.z])
        target = s * np.array([float(v) for v in rf.embed_xi(xi)]) + 1j * np.array(rf.embed_nu(nu))
        assert np.allclose(np.log(z).real, target.real) and np.allclose(np.angle(np.exp(1j * (np.log(z).imag - target.imag))), 0)
        g = numeric_bracket_matrix(ch, w) / np.outer(z, z)
        K = len(z)
        rows = []
        for a in rf.xi_index:
            r = np.zeros(K, complex)
            r[a] += 1 / (2 * s)
            r[rf.sigma[a]] += 1 / (2 * s)
            rows.append(r)
        for c in rf.nu_index:
            r = np.zeros(K, complex)
            r[c] += 1 / 2j
            r[rf.sigma[c]] -= 1 / 2j
            rows.append(r)
        T = np.array(rows)
        assert np.allclose(s * T @ g @ T.T, m.bracket, atol=1e-10)


def test_convergence_rate_sl2(ex2, pts2):
    rep = convergence_experiment(ex2.chart, pts2, experiment=ex2)
    assert rep.ok
    for p in rep.points:
        assert p.predicted == -1
        assert abs(p.slope + 1) < 0.1
        # ratio of consecutive deviations follows exp(rate * ds)
        d = p.deviations
        ratio = math.log(d[-1] / d[-2]) / (p.s_grid[-1] - p.s_grid[-2])
        assert abs(ratio + 1) < 0.1


@pytest.mark.slow
def test_convergence_rate_sl3():
    ex = Experiment(get_chart(3, (1, 2, 1)))
    rep = convergence_experiment(ex.chart, sample_points(ex, 2, seed=0), experiment=ex)
    assert rep.ok


def test_deviation_grows_outside_cone(ex2):
    pt = pt_space(2, (1,))
    xi = [Fraction(1), Fraction(3)]
    assert not pt.cone.member(xi)
    devs = [np.max(np.abs(numeric_bracket_at(ex2.chart, s, (xi, [0.3]), ex2).deviation)) for s in (5.0, 10.0, 20.0)]
    assert devs[0] < devs[1] < devs[2]


def test_report_outputs(ex2, pts2):
    rep = convergence_experiment(ex2.chart, pts2[:1], [10.0, 20.0, 30.0], experiment=ex2)
    js = rep.to_json()
    assert js["all_ok"] in (True, False) and len(js["points"]) == 1
    rows = rep.csv_rows()
    assert rows[0] == ["point_id", "s", "entry_i", "entry_j", "measured_re", "measured_im", "target", "abs_dev"]
    assert len(rows) == 1 + 3 * 3


def test_fit_slope_exact_exponential():
    s = [5.0 * k for k in range(1, 13)]
    assert abs(fit_slope(s, [3.0 * math.exp(-0.7 * v) for v in s]) + 0.7) < 1e-12


NAMES = ["x1", "x2", "x3"]


@given(st.lists(st.integers(-6, 6), min_size=3, max_size=3).filter(lambda v: v[0] != v[2]))
def test_pl_limit_of_transition_component(xi):
    f = parse_positive("x2*x3/(x1+x3)", NAMES)[0]
    rep = pl_limit_check(f, xi)
    assert rep.limit_value == xi[1] + xi[2] - max(xi[0], xi[2])
    assert rep.value_errors[-1] < 1e-6


def test_pl_limit_sum_with_phase():
    f = parse_positive("x1+x3", NAMES)[0]
    rep = pl_limit_check(f, [1, 0, 2], [0.1, 0.2, 0.3])
    assert rep.limit_value == 2 and abs(rep.limit_phase - 0.3) < 1e-12
    assert rep.value_errors[-1] < 1e-10 and rep.phase_errors[-1] < 1e-10
    assert rep.value_errors[0] > rep.value_errors[-1]


def test_pl_limit_on_wall():
    with pytest.raises(PointOnChamberWall):
        pl_limit_check(parse_positive("x1+x3", NAMES)[0], [1, 0, 1])
