"""Real forms, the E_s scaling map, and the constant bracket in the scaling limit.

On the real form, z_{sigma(k)} = conj(z_k) and torus coordinates are real.
Coordinates (xi, nu) come from z_k = exp(s xi_k + i nu_k), so xi lies in
L = {xi_k = xi_sigma(k)} and nu in the torus {nu_sigma(k) = -nu_k, nu_fixed = 0}.
With g_ab = {log z_a, log z_b}, the scaled bracket on (xi, nu) is

    {xi_a, xi_b}_s = (g_ab + g_a'b + g_ab' + g_a'b') / 4s
    {nu_c, nu_d}_s = -s (g_cd - g_c'd - g_cd' + g_c'd') / 4
    {xi_a, nu_c}_s = (g_ac - g_ac' + g_a'c - g_a'c') / 4i

where a' = sigma(a).  Splitting g = pi + f separates the limit from the
deviation, so tiny deviations are computed without cancellation.
"""
from __future__ import annotations

import concurrent.futures
import cmath
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cones import Cone, NonMonomialDenominator, _linear, interior_point, is_dominated
from .dual_group import GStarChart, get_chart
from .exact_algebra import LaurentPolynomial, PositiveRational
from .tropical import (PLMap, linearity_chambers, pl_inverse_point, tropicalize,
                       tropicalize_map, _solve)


class NumericalBreakdown(ArithmeticError):
    pass


class PointOnChamberWall(ValueError):
    pass


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TROPOS_THREADS", "1")))
    except ValueError:
        return 1


# --- real form --------------------------------------------------------------------------

@dataclass
class RealFormSpec:
    n: int
    word: tuple
    sigma: list  # 0-based involution on coordinates
    L_basis: list  # vectors in z-coordinates, one per L-coordinate
    T_basis: list  # integer vectors, one per torus coordinate
    xi_index: list  # representative coordinate of each L-coordinate
    nu_index: list  # representative coordinate of each torus coordinate

    @property
    def dim_L(self) -> int:
        return len(self.L_basis)

    @property
    def torus_dim(self) -> int:
        return len(self.T_basis)

    def embed_xi(self, eta) -> list:
        K = len(self.sigma)
        out = [0] * K
        for c, k in zip(eta, self.xi_index):
            out[k] = c
            out[self.sigma[k]] = c
        return out

    def embed_nu(self, theta) -> list:
        K = len(self.sigma)
        out = [0] * K
        for c, k in zip(theta, self.nu_index):
            out[k] = c
            out[self.sigma[k]] = -c
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "word": list(self.word), "sigma": [k + 1 for k in self.sigma],
                "dim_L": self.dim_L, "torus_dim": self.torus_dim,
                "L_basis": [[str(v) for v in b] for b in self.L_basis],
                "T_basis": [list(b) for b in self.T_basis]}


def _swap_tu(chart: GStarChart, p: LaurentPolynomial) -> LaurentPolynomial:
    m = chart.m
    perm = list(range(m, 2 * m)) + list(range(m)) + list(range(2 * m, chart.N))
    out = {}
    for e, c in p.items():
        f = [0] * chart.N
        for k, v in enumerate(e):
            f[perm[k]] = v
        out[tuple(f)] = c
    return LaurentPolynomial(chart.N, out)


def real_form_spec_of(chart: GStarChart) -> RealFormSpec:
    """sigma from tau, which exchanges the t and u parameters and fixes h."""
    z = chart.z
    K = len(z)
    sigma = []
    for k in range(K):
        img = _swap_tu(chart, z[k])
        match = [j for j in range(K) if z[j] == img]
        if len(match) != 1:
            raise AssertionError("tau does not permute the coordinates")
        sigma.append(match[0])
    if any(sigma[sigma[k]] != k for k in range(K)):
        raise AssertionError("sigma is not an involution")
    xi_index = [k for k in range(K) if sigma[k] >= k]
    nu_index = [k for k in range(K) if sigma[k] > k]
    L_basis, T_basis = [], []
    for k in xi_index:
        v = [Fraction(0)] * K
        v[k] = v[sigma[k]] = Fraction(1)
        L_basis.append(v)
    for k in nu_index:
        v = [0] * K
        v[k], v[sigma[k]] = 1, -1
        T_basis.append(v)
    return RealFormSpec(chart.n, chart.word, sigma, L_basis, T_basis, xi_index, nu_index)


def real_form_spec(n: int, word: Sequence[int]) -> RealFormSpec:
    return real_form_spec_of(get_chart(n, tuple(word)))


# --- the cone in z-coordinates --------------------------------------------------------------

def _mat_inv(A) -> list:
    n = len(A)
    cols = []
    for j in range(n):
        e = [Fraction(int(i == j)) for i in range(n)]
        x = _solve(A, e)
        if x is None:
            raise ValueError("singular linear piece")
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _vecmat(f, M) -> tuple:
    return tuple(sum(Fraction(f[i]) * M[i][j] for i in range(len(f))) for j in range(len(M[0])))


def _irredundant(C: Cone) -> Cone:
    forms = []
    for f in C.forms:
        if any(f) and f not in forms:
            forms.append(f)
    keep = list(forms)
    for f in forms:
        rest = [g for g in keep if g != f]
        if rest and is_dominated(_linear(f), Cone(C.dim, rest)).dominated:
            keep = rest
    return Cone(C.dim, sorted(keep))


class NotConvex(ValueError):
    pass


def _glue(dim: int, regions: list) -> Cone:
    """Convex cone equal to the union of {walls < 0, pieces < 0} over the regions.

    Candidate facets are the pieces valid on every region; the result is
    accepted only after checking that it implies each region's own pieces.
    """
    live = [(w, p) for w, p in regions if interior_point(Cone(dim, w + p)) is not None]
    cands = sorted({f for _, p in live for f in p if any(f)})
    valid = [f for f in cands
             if all(is_dominated(_linear(f), Cone(dim, w + p)).dominated for w, p in live)]
    C = Cone(dim, valid)
    for w, p in live:
        region = Cone(dim, valid + w)
        if interior_point(region) is None:
            continue
        for f in p:
            if any(f) and not is_dominated(_linear(f), region).dominated:
                raise NotConvex("the pulled-back potential cone is not convex")
    return _irredundant(C)


def _pieces(chart: GStarChart, Z: PLMap, M=None) -> list:
    """Per chamber of z^t: (walls, potential pieces) as forms in z- or L-coordinates."""
    pots = [tropicalize(p) for p in chart.potentials().potentials]
    for p in pots:
        if len(p.neg.forms) != 1:
            raise NonMonomialDenominator("potential denominator is not monomial in the parameters")
    out = []
    for ch in linearity_chambers(Z):
        Ainv = _mat_inv(ch.linear_map)
        walls = [_vecmat(c, Ainv) for c in ch.cone.forms]
        pieces = []
        for p in pots:
            (d,) = p.neg.forms
            for a in p.pos.forms:
                pieces.append(_vecmat(tuple(x - y for x, y in zip(a, d)), Ainv))
        if M is not None:
            walls = [_vecmat(f, M) for f in walls]
            pieces = [_vecmat(f, M) for f in pieces]
        out.append((walls, pieces))
    return out


def _zmap(chart: GStarChart) -> PLMap:
    return tropicalize_map([PositiveRational(p, LaurentPolynomial.one(chart.N)) for p in chart.z])


def z_chart_cone(chart: GStarChart, rf: "RealFormSpec | None" = None) -> Cone:
    """The potential cone of G* in tropical z-coordinates, or on L when rf is given.

    On each linearity chamber of z^t the inverse map is linear, so every
    potential pulls back to a max of linear pieces there.
    """
    M = None
    dim = len(chart.z)
    if rf is not None:
        M = [[b[i] for b in rf.L_basis] for i in range(len(chart.z))]
        dim = rf.dim_L
    return _glue(dim, _pieces(chart, _zmap(chart), M))


# --- the PT space ----------------------------------------------------------------------------

@dataclass
class PTSpace:
    rf: RealFormSpec
    cone: Cone  # in L-coordinates
    torus_dim: int
    bracket: list  # (dim_L + torus_dim) square, rational; xi block first
    xi_labels: list
    nu_labels: list

    def xi_nu(self) -> list:
        d = self.rf.dim_L
        return [row[d:] for row in self.bracket[:d]]

    def rank(self) -> int:
        return int(np.linalg.matrix_rank(np.array(self.bracket, dtype=float)))

    def to_json(self) -> dict:
        return {"n": self.rf.n, "word": list(self.rf.word), "xi": self.xi_labels, "nu": self.nu_labels,
                "cone": self.cone.to_json(), "torus_dim": self.torus_dim,
                "bracket": [[str(v) for v in row] for row in self.bracket],
                "sigma": [k + 1 for k in self.rf.sigma]}


def pt_bracket(rf: RealFormSpec, table: dict) -> list:
    """{xi_a, nu_c} = (pi_ac - pi_ac')/2i, {nu_c, xi_a} = (pi_ca + pi_ca')/2i."""
    d, e = rf.dim_L, rf.torus_dim
    sg = rf.sigma
    B = [[Fraction(0)] * (d + e) for _ in range(d + e)]
    for x, a in enumerate(rf.xi_index):
        for y, c in enumerate(rf.nu_index):
            B[x][d + y] = (table[(a, c)].pi_imag - table[(a, sg[c])].pi_imag) / 2
            B[d + y][x] = (table[(c, a)].pi_imag + table[(c, sg[a])].pi_imag) / 2
    return B


def pt_space(n: int, word: Sequence[int], chart: GStarChart | None = None) -> PTSpace:
    chart = chart or get_chart(n, tuple(word))
    rf = real_form_spec_of(chart)
    CL = z_chart_cone(chart, rf)
    labels = chart.labels()
    B = pt_bracket(rf, chart.table())
    return PTSpace(rf, CL, rf.torus_dim, B, [f"xi[{labels[k]}]" for k in rf.xi_index],
                   [f"nu[{labels[k]}]" for k in rf.nu_index])


# --- numerics on the real form --------------------------------------------------------------

def _log_terms(p: LaurentPolynomial):
    E = np.array(list(p.exponents()), dtype=float).reshape(len(list(p.exponents())), p.nvars)
    logc = np.array([complex(cmath.log(float(p.coeff(e)))) for e in p.exponents()])
    return E, logc


class _ZSystem:
    """log z(exp(lam)) and its Jacobian, vectorized."""

    def __init__(self, chart: GStarChart):
        self.terms = [_log_terms(p) for p in chart.z]

    def value_jac(self, lam):
        K = len(self.terms)
        F = np.empty(K, dtype=complex)
        J = np.empty((K, len(lam)), dtype=complex)
        for k, (E, logc) in enumerate(self.terms):
            v = logc + E @ lam
            m = np.max(v.real)
            ex = np.exp(v - m)
            s = ex.sum()
            if abs(s) < 1e-300:
                raise NumericalBreakdown("coordinate vanishes at the point")
            F[k] = m + cmath.log(s)
            J[k] = (ex / s) @ E
        return F, J


def _wrap(r):
    return r.real + 1j * ((r.imag + math.pi) % (2 * math.pi) - math.pi)


def solve_parameters(system: _ZSystem, target, lam0, tol: float = 1e-12, maxit: int = 100):
    """Newton on log z(exp(lam)) = target with phases taken mod 2 pi."""
    lam = np.array(lam0, dtype=complex)
    F, J = system.value_jac(lam)
    r = _wrap(F - target)
    nr = np.max(np.abs(r))
    for _ in range(maxit):
        if nr < tol:
            return lam
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise NumericalBreakdown("singular Jacobian") from exc
        t = 1.0
        while t > 1e-6:
            cand = lam + t * step
            F2, J2 = system.value_jac(cand)
            r2 = _wrap(F2 - target)
            n2 = np.max(np.abs(r2))
            if n2 < nr:
                lam, F, J, r, nr = cand, F2, J2, r2, n2
                break
            t /= 2
        else:
            break
    if nr < 1e-9:
        return lam
    raise NumericalBreakdown(f"Newton did not converge (residual {nr:.3e})")


@dataclass
class Measured:
    s: float
    bracket: np.ndarray  # real part, (dim_L + torus_dim) square
    deviation: np.ndarray  # measured - PT, computed from the residual part only
    imag_defect: float
    lam: np.ndarray


class Experiment:
    """Precomputed data for measurements at many (xi, nu, s)."""

    def __init__(self, chart: GStarChart):
        self.chart = chart
        self.rf = real_form_spec_of(chart)
        self.table = chart.table()
        self.system = _ZSystem(chart)
        self.Z = _zmap(chart)
        self.chambers = linearity_chambers(self.Z)
        K = len(chart.z)
        self.K = K
        self.P = np.array([[float(self.table[(i, j)].pi_imag) for j in range(K)] for i in range(K)]) * 1j
        self.pt = np.array(pt_bracket(self.rf, self.table), dtype=float)
        self.res = {(i, j): [(float(t.coef), t.term) for t in e.residual]
                    for (i, j), e in self.table.items() if e.residual}
        self.res_trop = {k: [tropicalize(t) for _, t in v] for k, v in self.res.items()}

    def predicted_rate(self, eta) -> Fraction:
        """max over residual terms of their tropicalization at the parameter point."""
        vals = [T(eta) for ts in self.res_trop.values() for T in ts]
        return max(vals) if vals else None

    def guess(self, xi_full, nu_full, s):
        eta = pl_inverse_point(self.Z, xi_full, self.chambers)
        A = None
        for ch in self.chambers:
            if ch.cone.member(eta, strict=False) and list(self.Z(eta)) == [Fraction(v) for v in xi_full]:
                A = np.array(ch.linear_map, dtype=float)
                break
        target = s * np.array([float(v) for v in xi_full]) + 1j * np.array(nu_full, dtype=float)
        return eta, np.linalg.solve(A, target)

    def f_matrix(self, lam) -> np.ndarray:
        Fm = np.zeros((self.K, self.K), dtype=complex)
        for (i, j), ts in self.res.items():
            tot = 0j
            for c, t in ts:
                lv = t.log_eval(lam)
                if lv.real > 700:
                    raise NumericalBreakdown("residual term overflows")
                tot += 1j * c * cmath.exp(lv)
            Fm[i, j] = tot
        return Fm

    def assemble(self, G, s) -> np.ndarray:
        rf = self.rf
        sg = rf.sigma
        d, e = rf.dim_L, rf.torus_dim
        X, V = rf.xi_index, rf.nu_index
        B = np.zeros((d + e, d + e), dtype=complex)
        for x, a in enumerate(X):
            for y, b in enumerate(X):
                B[x, y] = (G[a, b] + G[sg[a], b] + G[a, sg[b]] + G[sg[a], sg[b]]) / (4 * s)
            for y, c in enumerate(V):
                B[x, d + y] = (G[a, c] - G[a, sg[c]] + G[sg[a], c] - G[sg[a], sg[c]]) / 4j
                B[d + y, x] = (G[c, a] + G[c, sg[a]] - G[sg[c], a] - G[sg[c], sg[a]]) / 4j
        for x, c in enumerate(V):
            for y, dd in enumerate(V):
                B[d + x, d + y] = -s * (G[c, dd] - G[c, sg[dd]] - G[sg[c], dd] + G[sg[c], sg[dd]]) / 4
        return B

    def measure(self, s: float, xi_full, nu_full, lam0=None) -> Measured:
        target = s * np.array([float(v) for v in xi_full]) + 1j * np.array(nu_full, dtype=float)
        if lam0 is None:
            _, lam0 = self.guess(xi_full, nu_full, s)
        lam = solve_parameters(self.system, target, lam0)
        Fm = self.f_matrix(lam)
        lim = self.assemble(self.P, s)
        dev = self.assemble(Fm, s)
        if np.max(np.abs(lim.real - self.pt)) > 1e-12:
            raise AssertionError("log-canonical part does not reproduce the PT bracket")
        tot = lim + dev
        return Measured(s, tot.real, dev.real, float(np.max(np.abs(tot.imag))), lam)


def numeric_bracket_at(chart: GStarChart, s: float, point, experiment: Experiment | None = None) -> Measured:
    """point = (xi in L-coordinates, nu in torus coordinates)."""
    ex = experiment or Experiment(chart)
    xi, nu = point
    return ex.measure(s, ex.rf.embed_xi(xi), ex.rf.embed_nu(nu))


# --- scaling experiment ---------------------------------------------------------------------

@dataclass
class PointResult:
    point_id: int
    xi: list  # L-coordinates
    nu: list  # torus coordinates
    predicted: float
    s_grid: list
    deviations: list
    slope: float
    measured: list = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return (self.deviations[-1] < 1e-4 and self.slope < 0
                and abs(self.slope - self.predicted) <= 0.1 * abs(self.predicted))


@dataclass
class ScalingReport:
    n: int
    word: tuple
    labels: list
    pt: list
    points: list

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.points)

    def to_json(self) -> dict:
        return {"n": self.n, "word": list(self.word), "labels": self.labels,
                "points": [{"point_id": p.point_id, "xi": [str(v) for v in p.xi],
                            "nu": [round(v, 12) for v in p.nu], "predicted_rate": _r(p.predicted),
                            "fitted_rate": _r(p.slope), "s": p.s_grid,
                            "deviation": [float(f"{d:.6e}") for d in p.deviations], "ok": p.ok}
                           for p in self.points],
                "all_ok": self.ok}

    def csv_rows(self) -> list:
        rows = [["point_id", "s", "entry_i", "entry_j", "measured_re", "measured_im", "target", "abs_dev"]]
        D = len(self.labels)
        for p in self.points:
            for m in p.measured:
                for i in range(D):
                    for j in range(i + 1, D):
                        rows.append([p.point_id, _r(m.s), self.labels[i], self.labels[j],
                                     f"{m.bracket[i, j]:.12e}", f"{m.imag_defect:.3e}",
                                     f"{self.pt[i][j]:.12e}", f"{abs(m.deviation[i, j]):.6e}"])
        return rows


def _r(x) -> float:
    return float(f"{float(x):.10g}")


def fit_slope(s_grid, devs, tail: float = 0.5) -> float:
    """Least-squares slope of log deviation against s on the upper part of the grid."""
    s = np.array(s_grid, dtype=float)
    d = np.array(devs, dtype=float)
    k = max(2, int(math.ceil(len(s) * tail)))
    s, d = s[-k:], d[-k:]
    good = d > 0
    if good.sum() < 2:
        return float("-inf")
    return float(np.polyfit(s[good], np.log(d[good]), 1)[0])


def sample_points(ex: Experiment, count: int, seed: int = 0, box: int = 12, rate: Fraction = Fraction(-1)) -> list:
    """Random interior points of the PT cone, scaled so the predicted rate equals `rate`.

    Points are drawn in the parameter chart on the tau-fixed slice t = u and
    pushed forward, then rejected when any relevant max is tied.
    """
    chart = ex.chart
    rng = np.random.default_rng(seed)
    m, r = chart.m, chart.r
    C = chart.cone()
    polys = [p for p in chart.z] + [q for ts in ex.res.values() for _, t in ts for q in (t.num, t.den)]
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 200000:
            raise RuntimeError("could not sample interior points")
        th = [int(v) for v in rng.integers(-box, box + 1, size=m + r)]
        eta = [Fraction(v) for v in th[:m] + th[:m] + th[m:]]
        if not C.member(eta):
            continue
        if any(_tied(p, eta) for p in polys):
            continue
        rho = ex.predicted_rate(eta)
        if rho is None or rho >= 0:
            continue
        eta = [v * (rate / rho) for v in eta]
        xi_full = list(ex.Z(eta))
        xi = [xi_full[k] for k in ex.rf.xi_index]
        if any(xi == q for q, _ in out):
            continue
        nu = [float(v) for v in rng.uniform(-math.pi, math.pi, size=ex.rf.torus_dim)]
        out.append((xi, nu))
    return out


def _tied(p: LaurentPolynomial, eta) -> bool:
    vals = sorted((sum(Fraction(a) * b for a, b in zip(e, eta)) for e in p.exponents()), reverse=True)
    return len(vals) > 1 and vals[0] == vals[1]


def default_s_grid() -> list:
    return [5 * k for k in range(1, 13)]


def convergence_experiment(chart: GStarChart, points, s_grid: Sequence[float] | None = None,
                           experiment: Experiment | None = None) -> ScalingReport:
    ex = experiment or Experiment(chart)
    s_grid = sorted(float(s) for s in (s_grid or default_s_grid()))

    def run(args):
        pid, (xi, nu) = args
        xi_full = ex.rf.embed_xi(xi)
        nu_full = ex.rf.embed_nu(nu)
        eta, _ = ex.guess(xi_full, nu_full, 1.0)
        pred = ex.predicted_rate(eta)
        ms = []
        lam = None
        prev = None
        # start at the largest s, where the tropical guess is best, and continue downwards
        for s in reversed(s_grid):
            if lam is not None:
                lam = lam + (s - prev) * np.array([float(v) for v in eta])
            try:
                m = ex.measure(s, xi_full, nu_full, lam)
            except NumericalBreakdown:
                m = ex.measure(s, xi_full, nu_full, None)
            ms.append(m)
            lam, prev = m.lam, s
        ms.reverse()
        devs = [float(np.max(np.abs(m.deviation))) for m in ms]
        return PointResult(pid, list(xi), list(nu), float(pred) if pred is not None else 0.0, list(s_grid), devs,
                           fit_slope(s_grid, devs), ms)

    jobs = list(enumerate(points))
    nt = _threads()
    if nt > 1:
        with concurrent.futures.ThreadPoolExecutor(nt) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    labels = [f"xi{k + 1}" for k in ex.rf.xi_index] + [f"nu{k + 1}" for k in ex.rf.nu_index]
    return ScalingReport(chart.n, chart.word, labels, ex.pt.tolist(), results)


# --- PL limits of single functions ----------------------------------------------------------

@dataclass
class PLLimitReport:
    limit_value: Fraction
    limit_phase: float
    s_grid: list
    values: list  # (1/s) log |f|
    phases: list  # arg f
    value_errors: list
    phase_errors: list

    def to_json(self) -> dict:
        return {"limit_value": str(self.limit_value), "limit_phase": _r(self.limit_phase), "s": self.s_grid,
                "value_error": [float(f"{v:.6e}") for v in self.value_errors],
                "phase_error": [float(f"{v:.6e}") for v in self.phase_errors]}


def _argmax_form(p: LaurentPolynomial, xi):
    vals = sorted(((sum(Fraction(a) * b for a, b in zip(e, xi)), e) for e in p.exponents()), reverse=True)
    if len(vals) > 1 and vals[0][0] == vals[1][0]:
        raise PointOnChamberWall("the point lies on a wall of the tropicalization")
    return vals[0][1]


def pl_limit_check(f: PositiveRational, xi, nu=None, s_grid: Sequence[float] | None = None) -> PLLimitReport:
    """Compare (1/s) log|f(E_s)| and arg f(E_s) with the tropical limit and its phase."""
    xi = [Fraction(v) for v in xi]
    nu = [0.0] * len(xi) if nu is None else [float(v) for v in nu]
    a = _argmax_form(f.num, xi)
    d = _argmax_form(f.den, xi)
    lim = sum((x - y) * v for x, y, v in zip(a, d, xi))
    ph = sum((x - y) * v for x, y, v in zip(a, d, nu))
    ph = (ph + math.pi) % (2 * math.pi) - math.pi
    s_grid = sorted(float(s) for s in (s_grid or default_s_grid()))
    vals, phs, ve, pe = [], [], [], []
    for s in s_grid:
        lam = np.array([s * float(x) + 1j * v for x, v in zip(xi, nu)])
        lv = f.log_eval(lam)
        vals.append(lv.real / s)
        phase = (lv.imag + math.pi) % (2 * math.pi) - math.pi
        phs.append(phase)
        ve.append(abs(lv.real / s - float(lim)))
        diff = (phase - ph + math.pi) % (2 * math.pi) - math.pi
        pe.append(abs(diff))
    return PLLimitReport(lim, ph, s_grid, vals, phs, ve, pe)
