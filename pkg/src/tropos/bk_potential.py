"""Crystal potentials on G^{e,w0} in theta charts, string cones, estimate certificates."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .cones import Cone, cone_from_potentials, member
from .exact_algebra import LaurentPolynomial, PositiveRational, substitute
from .liegroup import (MinorSpec, NotReduced, braid_transition, chart_names, chevalley_E, derivative_action,
                       generalized_minor, is_reduced, theta_chart, w0_minor)
from .tropical import PLMap, tropicalize_map


class NotReducedForW0(NotReduced):
    pass


class ZeroDerivative(ValueError):
    pass


def _check_w0_word(n: int, word: Sequence[int]) -> None:
    word = tuple(word)
    if any(i <= 0 or i >= n for i in word) or len(word) != n * (n - 1) // 2 or not is_reduced(n, word):
        raise NotReducedForW0(f"{word} is not a reduced word for w0 in S_{n}")


@dataclass
class PotentialSet:
    n: int
    word: tuple
    names: list
    potentials: list  # phi_1..phi_r, psi_1..psi_r
    labels: list

    def total(self) -> PositiveRational:
        out = self.potentials[0]
        for p in self.potentials[1:]:
            out = out + p
        return out


def _ratio(num: LaurentPolynomial, den: LaurentPolynomial) -> PositiveRational:
    if not num.is_positive() or not den.is_positive():
        raise AssertionError("potential is not manifestly positive in this chart")
    return PositiveRational(num, den).strip_monomial_content()


def potentials_of_matrix(n: int, M) -> tuple:
    """phi_i = E_i . D_{w_i, w0 w_i} / D and psi_i = D . E_{n-i} / D on a symbolic matrix."""
    phis, psis = [], []
    for i in range(1, n):
        spec = w0_minor(n, i)
        den = generalized_minor(spec, M)
        phis.append(_ratio(derivative_action("left", chevalley_E(n, i), spec, M), den))
        psis.append(_ratio(derivative_action("right", chevalley_E(n, n - i), spec, M), den))
    return phis, psis


def bk_potential_set(n: int, word: Sequence[int]) -> PotentialSet:
    """The 2(n-1) potentials in the theta_word chart (with torus)."""
    word = tuple(word)
    _check_w0_word(n, word)
    M = theta_chart(n, word, True)
    phis, psis = potentials_of_matrix(n, M)
    labels = [f"phi{i}" for i in range(1, n)] + [f"psi{i}" for i in range(1, n)]
    return PotentialSet(n, word, chart_names(word, n, True), phis + psis, labels)


def matrix_entry_chart_sl2():
    """b = [[b11, b12], [0, 1/b11]] in coordinates (b11, b12)."""
    b11 = LaurentPolynomial.var(2, 0)
    b12 = LaurentPolynomial.var(2, 1)
    return [[b11, b12], [LaurentPolynomial.zero(2), b11 ** -1]]


def sl2_matrix_entry_potentials() -> PotentialSet:
    phis, psis = potentials_of_matrix(2, matrix_entry_chart_sl2())
    return PotentialSet(2, (), ["b11", "b12"], phis + psis, ["phi1", "psi1"])


def sl2_chart_to_entries() -> list:
    """(b11, b12) = (t2, t1/t2) as maps from the theta_(1) chart."""
    return [PositiveRational.monomial((0, 1)), PositiveRational.monomial((1, -1))]


@dataclass
class StringCone:
    n: int
    word: tuple
    chart_word: tuple  # chart in which the H-representation lives
    names: list
    potentials: list
    cone: Cone | None
    transition: list | None = None  # comps taking word coordinates to chart_word coordinates
    searched: int = 0

    def member(self, xi, strict: bool = True) -> bool:
        """Membership for a point in theta_word tropical coordinates."""
        if self.cone is not None and self.chart_word == self.word:
            return self.cone.member(xi, strict)
        return member(bk_potential_set(self.n, self.word).potentials, xi, strict)

    def to_json(self) -> dict:
        out = {"n": self.n, "word": list(self.word), "chart_word": list(self.chart_word),
               "coordinates": self.names}
        if self.cone is not None:
            out["cone"] = self.cone.to_json()
        else:
            out["cone"] = None
            out["membership_only"] = True
        return out


def _monomial_dens(ps: PotentialSet) -> bool:
    return all(p.den.is_monomial() for p in ps.potentials)


def string_cone(n: int, word: Sequence[int], search_cap: int = 64) -> StringCone:
    """H-representation in the first braid-equivalent chart with monomial denominators."""
    word = tuple(word)
    _check_w0_word(n, word)
    base = bk_potential_set(n, word)
    if _monomial_dens(base):
        return StringCone(n, word, word, base.names, base.potentials, cone_from_potentials(base.potentials), None, 1)
    m = len(word)
    ident = [PositiveRational.var(m + n - 1, k) for k in range(m + n - 1)]
    seen = {word}
    queue = deque([(word, ident)])
    count = 1
    while queue and count < search_cap:
        w, comps = queue.popleft()
        for pos in range(1, m + 1):
            try:
                w2, step = braid_transition(w, pos, n)
            except Exception:
                continue
            if w2 in seen:
                continue
            seen.add(w2)
            count += 1
            total = [substitute(c, comps) for c in step]
            ps = bk_potential_set(n, w2)
            if _monomial_dens(ps):
                return StringCone(n, word, w2, ps.names, ps.potentials,
                                  cone_from_potentials(ps.potentials), total, count)
            queue.append((w2, total))
    return StringCone(n, word, word, base.names, base.potentials, None, None, count)


def gz2_cone() -> Cone:
    """String cone for SL_2 in matrix-entry tropical coordinates (xi11, xi12)."""
    return cone_from_potentials(sl2_matrix_entry_potentials().potentials)


def sl2_transition_plmap() -> PLMap:
    return tropicalize_map(sl2_chart_to_entries())


# --- estimate domination --------------------------------------------------------------------

def iterated_action(n: int, jword: Sequence[int], spec: MinorSpec, word: Sequence[int]) -> LaurentPolynomial:
    """E_{j1} ... E_{jk} Delta evaluated on theta_word, in the chart variables.

    Uses Delta(e_{jk}(q_k) ... e_{j1}(q_1) theta) and extracts the coefficient of q_1...q_k.
    """
    word = tuple(word)
    m = len(word)
    r = n - 1
    k = len(jword)
    N = m + r + k
    M = theta_chart(n, word, True, nvars=N)
    # left multiply by e_{j1}(q1) first, then e_{j2}(q2), ...
    for idx, j in enumerate(jword):
        q = LaurentPolynomial.var(N, m + r + idx)
        # row j-1 += q * row j
        M = [list(row) for row in M]
        M[j - 1] = [a + q * b for a, b in zip(M[j - 1], M[j])]
    D = generalized_minor(spec, M)
    target = tuple([1] * k)
    acc = {}
    for e, c in D.items():
        if e[m + r:] == target:
            acc[e[:m + r] + (0,) * 0] = c
    return LaurentPolynomial(m + r, acc)


@dataclass
class EstimateCertificate:
    alpha: int
    expansion_degrees: list
    expansion: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "expansion_degrees": self.expansion_degrees}


def t1_expansion(p: LaurentPolynomial) -> dict:
    """{k: f_k} with p = sum f_k t1^k and f_k free of t1."""
    out: dict = {}
    for e, c in p.items():
        k = e[0]
        out.setdefault(k, {})[(0,) + e[1:]] = c
    return {k: LaurentPolynomial(p.nvars, v) for k, v in sorted(out.items())}


def estimate_domination_certificate(n: int, jword: Sequence[int], spec: MinorSpec,
                                    word: Sequence[int]) -> EstimateCertificate:
    """alpha with alpha/t1 - (E_j ... Delta)/(E_j' ... Delta) coefficient-positive."""
    word = tuple(word)
    _check_w0_word(n, word)
    jword = tuple(jword)
    if not jword or jword[0] != word[0]:
        raise ValueError("the first letter of jword must equal the first letter of the chart word")
    lower = iterated_action(n, jword[1:], spec, word)
    if lower.is_zero():
        raise ZeroDerivative("E_{j2}...E_{jn} Delta vanishes")
    f = t1_expansion(lower)
    if any(k < 0 for k in f) or not all(v.is_positive() for v in f.values()):
        raise AssertionError("expansion is not a positive polynomial in t1")
    alpha = max(max(f), 1)
    # re-check the closed form alpha/t1 - upper/lower = (alpha f0 + sum (alpha-k) f_k t1^k)/(t1 lower)
    upper = iterated_action(n, jword, spec, word)
    N = lower.nvars
    t1 = LaurentPolynomial.var(N, 0)
    lhs_num = lower.scale(alpha) - upper * t1
    rhs_num = LaurentPolynomial.zero(N)
    for k, fk in f.items():
        rhs_num = rhs_num + fk.shift((k,) + (0,) * (N - 1), alpha - k)
    if lhs_num != rhs_num:
        raise AssertionError("estimate identity failed")
    if not (rhs_num.is_zero() or all(c > 0 for _, c in rhs_num.items())):
        raise AssertionError("certificate is not coefficient-positive")
    return EstimateCertificate(alpha, sorted(f), f)
