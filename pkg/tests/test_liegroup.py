import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tropos.exact_algebra import PositiveRational
from tropos.liegroup import (MinorSpec, NoMoveHere, NotDecomposable, NotReduced, Permutation, act_weight,
                             available_moves, braid_transition, derivative_action, elementary,
                             fundamental_weight, gaussian_decompose, generalized_minor, initial_minors,
                             is_reduced, mat_mul, minor_via_gauss, numeric_theta, reduced_words, theta_chart,
                             validate_double_word, w0_minor, weight_pairing)

perms3 = st.permutations([0, 1, 2]).map(lambda p: Permutation(tuple(p)))
perms4 = st.permutations([0, 1, 2, 3]).map(lambda p: Permutation(tuple(p)))
pos = st.fractions(min_value=Fraction(1, 3), max_value=3, max_denominator=4)


@given(perms4)
def test_reduced_word_round_trip(p):
    w = p.reduced_word()
    assert len(w) == p.length() and Permutation.from_word(4, w) == p
    assert is_reduced(4, w)


@given(perms4, perms4)
def test_length_subadditive(p, q):
    assert (p * q).length() <= p.length() + q.length()
    assert (p * p.inverse()) == Permutation.identity(4)


@pytest.mark.parametrize("n,count", [(2, 1), (3, 2), (4, 16)])
def test_number_of_reduced_words_of_w0(n, count):
    words = reduced_words(Permutation.longest(n))
    assert len(words) == count
    assert all(Permutation.from_word(n, w) == Permutation.longest(n) for w in words)


def test_double_word_validation():
    validate_double_word(3, (1, 2, 1))
    validate_double_word(3, (1, -1, 2))
    with pytest.raises(NotReduced):
        validate_double_word(3, (1, 1))
    assert not is_reduced(3, (1, 2, 1, 2))


def test_weights():
    w1, w2 = fundamental_weight(3, 1), fundamental_weight(3, 2)
    assert weight_pairing(w1, w1) == Fraction(2, 3)
    assert weight_pairing(w1, w2) == Fraction(1, 3)
    w0 = Permutation.longest(3)
    # w0 omega_1 pairs with omega_1 to -1/3
    assert weight_pairing(w1, act_weight(w0, w1)) == Fraction(-1, 3)
    assert weight_pairing(w1, w1, scale=2) == Fraction(4, 3)


@given(st.lists(pos, min_size=5, max_size=5))
def test_theta_chart_matches_numeric(params):
    M = theta_chart(3, (1, 2, 1))
    A = numeric_theta(3, (1, 2, 1), params)
    for i, j in itertools.product(range(3), repeat=2):
        e = M[i][j]
        val = Fraction(0) if e.is_zero() else PositiveRational(e).evaluate(params)
        assert val == A[i][j]


def _random_gl(n, rng):
    while True:
        A = [[Fraction(int(v)) for v in row] for row in rng.integers(-4, 5, size=(n, n))]
        if abs(np.linalg.det(np.array(A, dtype=float))) > 0.5:
            return A


@pytest.mark.parametrize("n", [3, 4])
def test_minor_two_routes(n):
    # determinant of a submatrix versus product of LDU pivots after Weyl twisting
    rng = np.random.default_rng(n)
    checked = 0
    for _ in range(40):
        M = _random_gl(n, rng)
        u = Permutation(tuple(rng.permutation(n)))
        v = Permutation(tuple(rng.permutation(n)))
        k = int(rng.integers(1, n))
        spec = MinorSpec.from_weyl(u, v, k)
        direct = generalized_minor(spec, M)
        try:
            via = minor_via_gauss(u, v, k, M)
        except NotDecomposable:
            continue
        assert direct == via
        checked += 1
    assert checked > 10


def test_gaussian_decompose():
    M = [[Fraction(2), Fraction(1)], [Fraction(4), Fraction(5)]]
    L, D, U = gaussian_decompose(M)
    assert mat_mul(mat_mul(L, D), U) == M
    with pytest.raises(NotDecomposable):
        gaussian_decompose([[0, 1], [1, 0]])


def test_minor_spec_parse_and_label():
    s = MinorSpec.parse("D12,23")
    assert s == MinorSpec((0, 1), (1, 2)) and str(s) == "D12,23" and s.k == 2
    assert w0_minor(3, 1) == MinorSpec((0,), (2,))


def test_initial_minors_sl3():
    assert {str(s) for s in initial_minors(3, (1, 2, 1))} == {"D12,23", "D1,3", "D1,2", "D12,12", "D1,1"}
    assert {str(s) for s in initial_minors(3, (2, 1, 2))} == {"D12,23", "D1,3", "D12,13", "D12,12", "D1,1"}


@given(st.lists(pos, min_size=5, max_size=5))
def test_braid_transition_preserves_matrix(params):
    new, comps = braid_transition((1, 2, 1), 1, 3)
    assert new == (2, 1, 2)
    mapped = [c.evaluate(params) for c in comps]
    assert numeric_theta(3, new, mapped) == numeric_theta(3, (1, 2, 1), params)


def test_commutation_move():
    new, comps = braid_transition((1, 3), 1, 4)
    assert new == (3, 1)
    with pytest.raises(NoMoveHere):
        braid_transition((1, 2), 1, 3)
    assert available_moves((1, 2, 1), 3) == [1]


def test_derivative_action_matches_finite_difference():
    rng = np.random.default_rng(1)
    M = [[Fraction(int(v)) for v in row] for row in rng.integers(1, 5, size=(3, 3))]
    spec = MinorSpec((0, 1), (1, 2))
    X = elementary(3, 0, 1)
    eps = Fraction(1, 10 ** 9)
    for side in ("left", "right"):
        exp = [[Fraction(int(i == j)) + eps * X[i][j] for j in range(3)] for i in range(3)]
        moved = mat_mul(exp, M) if side == "left" else mat_mul(M, exp)
        fd = (generalized_minor(spec, moved) - generalized_minor(spec, M)) / eps
        exact = derivative_action(side, X, spec, M)
        assert abs(float(fd - exact)) < 1e-6
