"""The dual Poisson-Lie group G* of SL_n in the minor chart, and its bracket.

Points of G* are pairs (b+, b-) with [b+]_0 [b-]_0 = 1.  We parametrize
b+ = theta(t; h) and tau(b-) = theta(u; h), tau(g) = (g^T)^{-1}, sharing the
torus block h.  Coordinates are minors of b+ and of tau(b-).

Brackets are computed from the r-matrix of the double.  A function on the
second factor of the form g = D o tau satisfies (Y.g) = (-Y^T . D) o tau, and
likewise on the right, which lets every action be read off a minor of an
upper triangular matrix.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bk_potential import PotentialSet, _check_w0_word, potentials_of_matrix
from .cones import Cone, cone_from_potentials, is_dominated, is_dominated_signed
from .exact_algebra import LaurentPolynomial, NotDivisible, PositiveRational, SignedPositiveSum, poly_divide_exact
from .liegroup import MinorSpec, derivative_action, initial_minors, theta_chart, weight_pairing
from .tropical import tropicalize

Lie = dict  # {(i, j): Fraction}, sparse n x n matrix


def _elem(i, j, c=1) -> Lie:
    return {(i, j): Fraction(c)}


def _neg(X: Lie) -> Lie:
    return {k: -v for k, v in X.items()}


def _transpose(X: Lie) -> Lie:
    return {(j, i): v for (i, j), v in X.items()}


def _cartan_gram(n: int, form_scale: Fraction) -> list:
    """Gram matrix of H_a = E_aa - E_{a+1,a+1} under form_scale * tr."""
    r = n - 1
    G = [[Fraction(0)] * r for _ in range(r)]
    for a in range(r):
        G[a][a] = 2 * form_scale
        if a + 1 < r:
            G[a][a + 1] = G[a + 1][a] = -form_scale
    return G


def _inv(G: list) -> list:
    n = len(G)
    A = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(G)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        A[c] = [x / A[c][c] for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


@dataclass
class RMatrix:
    """r = 1/2 sum X_i (x) X_i + sum E_a (x) E_-a, Cartan part via the inverse Gram matrix."""

    n: int
    form_scale: Fraction
    cartan: list  # (coef, H_a, H_b)
    roots: list  # (E_alpha, E_-alpha)

    @property
    def pairs(self) -> list:
        return [(c, a, b) for c, a, b in self.cartan] + [(Fraction(1), a, b) for a, b in self.roots]

    def form(self, X: Lie, Y: Lie) -> Fraction:
        # form_scale * tr(XY)
        tot = Fraction(0)
        for (i, j), v in X.items():
            tot += v * Y.get((j, i), 0)
        return self.form_scale * tot


def build_rmatrix(n: int, form_scale=Fraction(1, 2)) -> RMatrix:
    form_scale = Fraction(form_scale)
    if form_scale <= 0:
        raise ValueError("form_scale must be positive")
    G = _cartan_gram(n, form_scale)
    Gi = _inv(G)
    H = [{(a, a): Fraction(1), (a + 1, a + 1): Fraction(-1)} for a in range(n - 1)]
    cartan = [(Gi[a][b] / 2, H[a], H[b]) for a in range(n - 1) for b in range(n - 1) if Gi[a][b] != 0]
    roots = [(_elem(i, j), _elem(j, i, 1 / form_scale)) for i in range(n) for j in range(i + 1, n)]
    return RMatrix(n, form_scale, cartan, roots)


def _act(side: str, X: Lie, spec: MinorSpec, M, cache: dict):
    """Linear extension of derivative_action over elementary matrices."""
    n = len(M)
    total = None
    for (i, j), c in X.items():
        key = (side, i, j)
        if key not in cache:
            E = [[0] * n for _ in range(n)]
            E[i][j] = 1
            cache[key] = derivative_action(side, E, spec, M)
        v = cache[key]
        if v.is_zero():
            continue
        v = v.scale(c)
        total = v if total is None else total + v
    if total is None:
        return LaurentPolynomial.zero(M[0][0].nvars)
    return total


def bracket_B(f: MinorSpec, g: MinorSpec, M, rmat: RMatrix, sign: int = -1) -> LaurentPolynomial:
    """sign * sum_k (f.a_k)(g.b_k) - (a_k.f)(b_k.g) for the r-matrix pairs."""
    cf, cg = {}, {}
    tot = LaurentPolynomial.zero(M[0][0].nvars)
    for c, a, b in rmat.pairs:
        t = _act("right", a, f, M, cf) * _act("right", b, g, M, cg) - _act("left", a, f, M, cf) * _act("left", b, g, M, cg)
        tot = tot + t.scale(c)
    return tot.scale(sign)


# --- the chart ---------------------------------------------------------------------------

@dataclass
class CoordFn:
    side: int  # 1: minor of b+, 2: minor of tau(b-)
    spec: MinorSpec

    @property
    def label(self) -> str:
        return f"({self.spec})_{self.side}" if self.side == 1 else f"({self.spec} o tau)_2"


class GStarChart:
    """Minor coordinates on G* over the parameters (t_1..t_m, u_1..u_m, h_1..h_r)."""

    def __init__(self, n: int, word: Sequence[int], form_scale=Fraction(1, 2), twist: int = -1):
        word = tuple(word)
        _check_w0_word(n, word)
        self.n, self.word = n, word
        self.m, self.r = len(word), n - 1
        m, r = self.m, self.r
        self.N = 2 * m + r
        self.names = [f"t{i + 1}" for i in range(m)] + [f"u{i + 1}" for i in range(m)] + [f"h{i + 1}" for i in range(r)]
        self.bplus = theta_chart(n, word, True, nvars=self.N, offset=0, torus_offset=2 * m)
        self.tbminus = theta_chart(n, word, True, nvars=self.N, offset=m, torus_offset=2 * m)
        self.rmat = build_rmatrix(n, form_scale)
        if twist not in (1, -1):
            raise ValueError("twist must be +1 or -1")
        self.twist = twist
        F = initial_minors(n, word)
        principal = [s for s in F if s.rows == s.cols]
        hat = [s for s in F if s.rows != s.cols][::-1]
        principal.sort(key=lambda s: s.k)
        self.coords = [CoordFn(1, s) for s in hat] + [CoordFn(2, s) for s in hat] + [CoordFn(1, s) for s in principal]
        self.sigma = list(range(m, 2 * m)) + list(range(m)) + list(range(2 * m, 2 * m + r))
        self._cache: dict = {}
        self._values = [self.minor_value(c) for c in self.coords]

    def _matrix(self, side: int):
        return self.bplus if side == 1 else self.tbminus

    def minor_value(self, c: CoordFn) -> LaurentPolynomial:
        from .liegroup import generalized_minor
        return generalized_minor(c.spec, self._matrix(c.side))

    @property
    def z(self) -> list:
        """Coordinates as Laurent polynomials in the parameters."""
        return list(self._values)

    def labels(self) -> list:
        return [c.label for c in self.coords]

    # actions of g x g on coordinate functions
    def action(self, idx: int, side: str, X: Lie | None) -> LaurentPolynomial:
        if not X:
            return LaurentPolynomial.zero(self.N)
        c = self.coords[idx]
        cache = self._cache.setdefault(idx, {})
        M = self._matrix(c.side)
        if c.side == 1:
            return _act(side, X, c.spec, M, cache)
        return _act(side, _neg(_transpose(X)), c.spec, M, cache)

    def rd_terms(self) -> list:
        """r_D as (coef, (A1, A2), (B1, B2), group)."""
        out = []
        for c, Ha, Hb in self.rmat.cartan:
            out.append((c, (Ha, Ha), (Hb, _neg(Hb)), "cartan"))
        for Ea, Em in self.rmat.roots:
            out.append((Fraction(1), (Ea, Ea), (None, _neg(Em)), "root"))
            out.append((Fraction(1), (Em, Em), (Ea, None), "root"))
        return out

    def raw_bracket(self, i: int, j: int, split: bool = False):
        """-pi_D on coordinates i, j (no sqrt(-1) twist).

        With split=True returns (cartan_part, [(coef, product) root pieces]).
        """
        ci, cj = self.coords[i], self.coords[j]
        cart = LaurentPolynomial.zero(self.N)
        pieces = []
        for coef, A, B, group in self.rd_terms():
            a_i = A[ci.side - 1]
            b_j = B[cj.side - 1]
            if not a_i or not b_j:
                continue
            p1 = self.action(i, "right", a_i) * self.action(j, "right", b_j)
            p2 = self.action(i, "left", a_i) * self.action(j, "left", b_j)
            if group == "cartan":
                cart = cart + (p1 - p2).scale(-coef)
            else:
                if not p1.is_zero():
                    pieces.append((-coef, p1))
                if not p2.is_zero():
                    pieces.append((coef, p2))
        if split:
            return cart, pieces
        tot = cart
        for c, p in pieces:
            tot = tot + p.scale(c)
        return tot

    def table(self) -> dict:
        """All brackets {z_i, z_j}, computed once."""
        if not hasattr(self, "_table"):
            self._table = bracket_table(self)
        return self._table

    def potentials(self) -> PotentialSet:
        """Phi_{G*}: BK potentials of b+ and of tau(b-), 4(n-1) in all."""
        p1, q1 = potentials_of_matrix(self.n, self.bplus)
        p2, q2 = potentials_of_matrix(self.n, self.tbminus)
        r = self.n
        labels = ([f"phi{i}_1" for i in range(1, r)] + [f"psi{i}_1" for i in range(1, r)]
                  + [f"phi{i}_2" for i in range(1, r)] + [f"psi{i}_2" for i in range(1, r)])
        return PotentialSet(self.n, self.word, self.names, p1 + q1 + p2 + q2, labels)

    def cone(self) -> Cone:
        return cone_from_potentials(self.potentials().potentials)


@functools.lru_cache(maxsize=16)
def get_chart(n: int, word: tuple, form_scale=Fraction(1, 2), twist: int = -1) -> GStarChart:
    return GStarChart(n, tuple(word), form_scale, twist)


def phi_gstar(n: int, word: Sequence[int]) -> PotentialSet:
    return GStarChart(n, word).potentials()


# --- bracket entries -----------------------------------------------------------------------

@dataclass
class ResidualTerm:
    """coef * sqrt(-1) * term, with term = num / (z_i z_j) coefficient-positive."""

    coef: Fraction
    term: PositiveRational

    def to_json(self, names=None) -> dict:
        return {"coef_imag": str(self.coef), "term": self.term.to_text(names)}


@dataclass
class BracketEntry:
    i: int
    j: int
    pi_imag: Fraction  # pi_ij = sqrt(-1) * pi_imag
    residual: list = field(default_factory=list)
    cartan_check: bool | None = None

    @property
    def pi(self) -> complex:
        return complex(0, float(self.pi_imag))

    def to_json(self, names=None) -> dict:
        return {"i": self.i + 1, "j": self.j + 1, "pi": _imag_text(self.pi_imag),
                "residual_terms": [t.to_json(names) for t in self.residual]}


def _imag_text(c: Fraction) -> str:
    if c == 0:
        return "0"
    return f"{c}i"


def _signed_positive(p: LaurentPolynomial):
    if p.is_positive():
        return 1, p
    if (-p).is_positive():
        return -1, -p
    raise AssertionError("bracket piece is not sign-definite in the chart")


def cartan_constant(chart: GStarChart, i: int, j: int) -> Fraction:
    """s_i/2 (K(row_i, row_j) - K(col_i, col_j)), s_i = -1 for second-factor functions."""
    n = chart.n
    ci, cj = chart.coords[i], chart.coords[j]
    scale = 1 / chart.rmat.form_scale

    def w(idx):
        return tuple(Fraction(int(k in idx)) for k in range(n))

    s = 1 if ci.side == 1 else -1
    k_rows = weight_pairing(w(ci.spec.rows), w(cj.spec.rows), scale)
    k_cols = weight_pairing(w(ci.spec.cols), w(cj.spec.cols), scale)
    return s * (k_rows - k_cols) / 2


def bracket_gstar(chart: GStarChart, i: int, j: int) -> BracketEntry:
    """{z_i, z_j} = z_i z_j (pi_ij + f_ij) for the sqrt(-1)-twisted bracket."""
    zi, zj = chart.z[i], chart.z[j]
    zz = zi * zj
    tw = chart.twist
    if i == j:
        return BracketEntry(i, j, Fraction(0), [], True)
    cart, pieces = chart.raw_bracket(i, j, split=True)
    total = cart
    for c, p in pieces:
        total = total + p.scale(c)
    try:
        q = poly_divide_exact(total, zz)
    except NotDivisible:
        q = None
    if q is not None and (q.is_zero() or (q.is_monomial() and q.leading_term()[0] == (0,) * chart.N)):
        c = q.coeff((0,) * chart.N)
        return BracketEntry(i, j, tw * c, [], None)
    cq = poly_divide_exact(cart, zz) if not cart.is_zero() else LaurentPolynomial.zero(chart.N)
    if not (cq.is_zero() or (cq.is_monomial() and cq.leading_term()[0] == (0,) * chart.N)):
        raise AssertionError("Cartan part is not log-canonical")
    c = cq.coeff((0,) * chart.N)
    merged: dict = {}
    for coef, p in pieces:
        s, ap = _signed_positive(p)
        merged[ap] = merged.get(ap, 0) + coef * s
    residual = [ResidualTerm(tw * v, PositiveRational(ap, zz).strip_monomial_content())
                for ap, v in merged.items() if v != 0]
    residual.sort(key=lambda t: (t.coef < 0, t.term.to_text()))
    return BracketEntry(i, j, tw * c, residual, cartan_constant(chart, i, j) == c)


@dataclass
class WLCReport:
    n: int
    word: tuple
    entries: list
    verdicts: dict  # (i, j) -> list of (dominated, certificate json)

    @property
    def all_dominated(self) -> bool:
        return all(v for vs in self.verdicts.values() for v, _ in vs)

    def to_json(self, names=None) -> dict:
        out = []
        for e in self.entries:
            d = e.to_json(names)
            vs = self.verdicts.get((e.i, e.j), [])
            d["dominated"] = all(v for v, _ in vs)
            d["certificates"] = [c for _, c in vs]
            out.append(d)
        return {"n": self.n, "word": list(self.word), "all_dominated": self.all_dominated, "pairs": out}


def bracket_table(chart: GStarChart) -> dict:
    tab = {}
    K = len(chart.coords)
    for i in range(K):
        for j in range(K):
            if i < j:
                tab[(i, j)] = bracket_gstar(chart, i, j)
    for i in range(K):
        tab[(i, i)] = BracketEntry(i, i, Fraction(0), [], True)
        for j in range(i):
            e = tab[(j, i)]
            tab[(i, j)] = BracketEntry(i, j, -e.pi_imag, [ResidualTerm(-t.coef, t.term) for t in e.residual],
                                       e.cartan_check)
    return tab


def _psum(terms: list):
    if not terms:
        return None
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def verify_weak_log_canonical(n: int, word: Sequence[int], chart: GStarChart | None = None) -> WLCReport:
    chart = chart or get_chart(n, tuple(word))
    C = chart.cone()
    entries, verdicts = [], {}
    K = len(chart.coords)
    table = chart.table()
    for i in range(K):
        for j in range(i + 1, K):
            e = table[(i, j)]
            entries.append(e)
            vs = []
            for t in e.residual:
                v = is_dominated(tropicalize(t.term), C)
                vs.append((v.dominated, v.to_json()))
            if not all(ok for ok, _ in vs):
                # joint check on the positive and negative parts
                plus = [t.term for t in e.residual if t.coef > 0]
                minus = [t.term for t in e.residual if t.coef < 0]
                joint = SignedPositiveSum(_psum(plus), _psum(minus))
                if is_dominated_signed(joint, C):
                    vs = [(True, {"dominated": True, "joint": True})]
            verdicts[(i, j)] = vs
    return WLCReport(n, tuple(word), entries, verdicts)


# --- numerics -------------------------------------------------------------------------------

def _eval_poly(p: LaurentPolynomial, w) -> complex:
    return complex(p.evaluate([complex(x) for x in w]))


def numeric_bracket_matrix(chart: GStarChart, w, table: dict | None = None) -> np.ndarray:
    """B_ij = {z_i, z_j} (twisted) at a parameter point w."""
    table = table or chart.table()
    K = len(chart.coords)
    z = [_eval_poly(p, w) for p in chart.z]
    B = np.zeros((K, K), dtype=complex)
    for (i, j), e in table.items():
        g = e.pi
        for t in e.residual:
            g += 1j * float(t.coef) * complex(t.term.evaluate(w, "complex"))
        B[i, j] = z[i] * z[j] * g
    return B


def jacobi_defect(chart: GStarChart, w, table: dict | None = None) -> float:
    """max |{z_i,{z_j,z_k}} + cyclic| / scale at w, via the Jacobian of z in the parameters."""
    table = table or chart.table()
    K = len(chart.coords)
    N = chart.N
    w = [complex(x) for x in w]
    z = chart.z
    J = np.array([[_eval_poly(z[a].diff(l), w) for l in range(N)] for a in range(K)])
    Jinv = np.linalg.inv(J)
    B = numeric_bracket_matrix(chart, w, table)
    # symbolic B_jk as rational functions: differentiate numerically via exact forms
    grads = {}
    for (j, k), e in table.items():
        if j >= k:
            continue
        grads[(j, k)] = _grad_bracket(chart, e, w)
    defect = 0.0
    scale = np.max(np.abs(B)) ** 2 + 1e-300
    for i, j, k in itertools.combinations(range(K), 3):
        tot = 0j
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            key = (b, c) if b < c else (c, b)
            sgn = 1 if b < c else -1
            dz = grads[key] @ Jinv  # d B_bc / d z
            tot += sgn * np.dot(B[a, :], dz)
        defect = max(defect, abs(tot) / scale)
    return defect


def _grad_bracket(chart: GStarChart, e: BracketEntry, w) -> np.ndarray:
    """Gradient in the parameters of z_i z_j (pi + f)."""
    zi, zj = chart.z[e.i], chart.z[e.j]
    zz = zi * zj
    N = chart.N
    out = np.zeros(N, dtype=complex)
    for l in range(N):
        out[l] = e.pi * _eval_poly(zz.diff(l), w)
    for t in e.residual:
        # quotient rule on num * z_i z_j / den
        p = t.term.num * zz
        d = t.term.den
        pv, dv = _eval_poly(p, w), _eval_poly(d, w)
        for l in range(N):
            out[l] += 1j * float(t.coef) * (_eval_poly(p.diff(l), w) * dv - pv * _eval_poly(d.diff(l), w)) / dv ** 2
    return out
