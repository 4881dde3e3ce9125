"""Type A Lie theory: factorization charts, generalized minors, Weyl group, braid moves."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_algebra import LaurentPolynomial, PositiveRational


class NotReduced(ValueError):
    pass


class NotDecomposable(ValueError):
    def __init__(self, index: int):
        super().__init__(f"leading principal minor {index} vanishes")
        self.index = index


class NoMoveHere(ValueError):
    pass


# --- Weyl group ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Permutation:
    """Images of 0..n-1 (0-based)."""

    images: tuple

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"{self.images} is not a permutation")

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def simple(cls, n: int, i: int) -> "Permutation":
        """s_i for 1 <= i <= n-1, swapping i-1 and i (0-based)."""
        im = list(range(n))
        im[i - 1], im[i] = im[i], im[i - 1]
        return cls(tuple(im))

    @classmethod
    def longest(cls, n: int) -> "Permutation":
        return cls(tuple(range(n - 1, -1, -1)))

    @classmethod
    def from_word(cls, n: int, word: Sequence[int]) -> "Permutation":
        p = cls.identity(n)
        for i in word:
            p = p * cls.simple(n, abs(i))
        return p

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (self * other)(x) = self(other(x))
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def length(self) -> int:
        im = self.images
        return sum(1 for a in range(self.n) for b in range(a + 1, self.n) if im[a] > im[b])

    def apply_set(self, s: Sequence[int]) -> tuple:
        return tuple(sorted(self.images[j] for j in s))

    def reduced_word(self) -> tuple:
        """Some reduced word (1-based letters)."""
        word = []
        p = self
        while p.length():
            # find a right descent: p(i) > p(i+1)
            i = next(i for i in range(self.n - 1) if p.images[i] > p.images[i + 1])
            word.append(i + 1)
            p = p * Permutation.simple(self.n, i + 1)
        return tuple(reversed(word))

    def one_based(self) -> tuple:
        return tuple(v + 1 for v in self.images)


def is_reduced(n: int, word: Sequence[int]) -> bool:
    return Permutation.from_word(n, word).length() == len(word)


def reduced_words(perm: Permutation) -> list:
    """All reduced words of perm, sorted."""
    n = perm.n
    out = set()

    def rec(p, suffix):
        if p.length() == 0:
            out.add(tuple(suffix))
            return
        for i in range(n - 1):
            if p.images[i] > p.images[i + 1]:
                rec(p * Permutation.simple(n, i + 1), [i + 1] + suffix)

    rec(perm, [])
    return sorted(out)


def validate_double_word(n: int, word: Sequence[int], v: Permutation | None = None) -> None:
    """Positive letters must form a reduced word (for v when given), likewise negative letters."""
    pos = [i for i in word if i > 0]
    neg = [-i for i in word if i < 0]
    for i in word:
        if i == 0 or abs(i) >= n:
            raise NotReduced(f"letter {i} out of range for SL_{n}")
    if not is_reduced(n, pos) or not is_reduced(n, neg):
        raise NotReduced(f"{tuple(word)} is not a double reduced word")
    if v is not None and Permutation.from_word(n, pos) != v:
        raise NotReduced(f"{tuple(word)} is not a word for {v.one_based()}")


# --- weights ---------------------------------------------------------------------------------

def fundamental_weight(n: int, k: int) -> tuple:
    """Traceless representative of omega_k."""
    return tuple(Fraction(int(i < k)) - Fraction(k, n) for i in range(n))


def act_weight(p: Permutation, lam: Sequence) -> tuple:
    out = [Fraction(0)] * len(lam)
    for i, v in enumerate(lam):
        out[p.images[i]] = Fraction(v)
    return tuple(out)


def weight_pairing(lam: Sequence, mu: Sequence, scale=1) -> Fraction:
    if len(lam) != len(mu):
        raise ValueError("weights of different rank")
    ml = sum(map(Fraction, lam)) / len(lam)
    mm = sum(map(Fraction, mu)) / len(mu)
    return Fraction(scale) * sum((Fraction(a) - ml) * (Fraction(b) - mm) for a, b in zip(lam, mu))


# --- matrices over a commutative ring ---------------------------------------------------------

def mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = None
            for k in range(m):
                a, b = A[i][k], B[k][j]
                if _is_zero(a) or _is_zero(b):
                    continue
                t = a * b
                acc = t if acc is None else acc + t
            row.append(acc if acc is not None else _zero_like(A[i][0], B[0][j]))
        out.append(row)
    return out


def _is_zero(x) -> bool:
    if isinstance(x, LaurentPolynomial):
        return x.is_zero()
    return isinstance(x, (int, Fraction)) and x == 0


def _zero_like(a, b):
    for x in (a, b):
        if isinstance(x, LaurentPolynomial):
            return LaurentPolynomial.zero(x.nvars)
    return 0


def det(M):
    """Determinant by permutation expansion (fine for k <= 5)."""
    k = len(M)
    if k == 0:
        return 1
    total = None
    for perm in itertools.permutations(range(k)):
        t = None
        for i, j in enumerate(perm):
            x = M[i][j]
            if _is_zero(x):
                t = None
                break
            t = x if t is None else t * x
        else:
            if t is None:
                continue
            inv = sum(1 for a in range(k) for b in range(a + 1, k) if perm[a] > perm[b])
            t = -t if inv % 2 else t
            total = t if total is None else total + t
            continue
    if total is None:
        return _zero_like(M[0][0], M[0][0])
    return total


def submatrix(M, rows: Sequence[int], cols: Sequence[int]):
    return [[M[i][j] for j in cols] for i in rows]


# --- charts -------------------------------------------------------------------------------

def chart_names(word: Sequence[int], n: int, include_torus: bool, prefix: str = "t") -> list:
    r = n - 1 if include_torus else 0
    return [f"{prefix}{i + 1}" for i in range(len(word) + r)]


def theta_chart(n: int, word: Sequence[int], include_torus: bool = True,
                nvars: int | None = None, offset: int = 0, torus_offset: int | None = None):
    """e_{i1}(t1)...e_{im}(tm) h_1(t_{m+1})...h_{n-1}(t_{m+n-1}) with Laurent polynomial entries.

    Negative letters are f_{|i|}.  ``offset``/``torus_offset`` place the parameters
    inside a larger ring of ``nvars`` variables.
    """
    validate_double_word(n, word)
    m = len(word)
    r = n - 1 if include_torus else 0
    N = nvars if nvars is not None else m + r
    toff = torus_offset if torus_offset is not None else offset + m
    one = LaurentPolynomial.one(N)
    zero = LaurentPolynomial.zero(N)
    M = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for k, letter in enumerate(word):
        t = LaurentPolynomial.var(N, offset + k)
        i = abs(letter) - 1
        if letter > 0:
            # right multiply by I + t E_{i,i+1}: column i+1 += t * column i
            for row in range(n):
                if not M[row][i].is_zero():
                    M[row][i + 1] = M[row][i + 1] + M[row][i] * t
        else:
            # right multiply by I + t E_{i+1,i}: column i += t * column i+1
            for row in range(n):
                if not M[row][i + 1].is_zero():
                    M[row][i] = M[row][i] + M[row][i + 1] * t
    if include_torus:
        # diagonal of h_1(T1)...h_{n-1}(T_{n-1}): d_j = T_j / T_{j-1}
        for j in range(n):
            e = [0] * N
            if j < n - 1:
                e[toff + j] += 1
            if j > 0:
                e[toff + j - 1] -= 1
            d = LaurentPolynomial.monomial(e)
            for row in range(n):
                if not M[row][j].is_zero():
                    M[row][j] = M[row][j] * d
    return M


def numeric_theta(n: int, word: Sequence[int], params: Sequence, include_torus: bool = True):
    """theta_chart evaluated at numeric parameters (floats, complex, Fractions)."""
    m = len(word)
    M = [[(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for k, letter in enumerate(word):
        t = params[k]
        i = abs(letter) - 1
        for row in range(n):
            if letter > 0:
                M[row][i + 1] = M[row][i + 1] + M[row][i] * t
            else:
                M[row][i] = M[row][i] + M[row][i + 1] * t
    if include_torus:
        T = list(params[m:m + n - 1])
        for j in range(n):
            d = 1
            if j < n - 1:
                d = d * T[j]
            if j > 0:
                d = d / T[j - 1]
            for row in range(n):
                M[row][j] = M[row][j] * d
    return M


# --- minors -------------------------------------------------------------------------------

@dataclass(frozen=True)
class MinorSpec:
    """Delta_{u omega_k, v omega_k}: rows u({1..k}), columns v({1..k}), 0-based and sorted."""

    rows: tuple
    cols: tuple

    @classmethod
    def from_weyl(cls, u: Permutation, v: Permutation, k: int) -> "MinorSpec":
        if not 1 <= k <= u.n - 1:
            raise ValueError("k must be a fundamental weight index")
        return cls(u.apply_set(range(k)), v.apply_set(range(k)))

    @classmethod
    def parse(cls, text: str) -> "MinorSpec":
        """'12,23' or 'D12,23' (1-based digit strings) -> rows {0,1}, cols {1,2}."""
        a, b = text.replace(" ", "").lstrip("D").split(",")
        return cls(tuple(sorted(int(c) - 1 for c in a)), tuple(sorted(int(c) - 1 for c in b)))

    @property
    def k(self) -> int:
        return len(self.rows)

    def label(self) -> str:
        return "".join(str(i + 1) for i in self.rows) + "," + "".join(str(j + 1) for j in self.cols)

    def __str__(self):
        return f"D{self.label()}"


def generalized_minor(spec: MinorSpec, M):
    return det(submatrix(M, spec.rows, spec.cols))


def principal_minor(n: int, k: int) -> MinorSpec:
    return MinorSpec(tuple(range(k)), tuple(range(k)))


def w0_minor(n: int, k: int) -> MinorSpec:
    """Delta_{omega_k, w0 omega_k}."""
    return MinorSpec(tuple(range(k)), tuple(range(n - k, n)))


def gaussian_decompose(M):
    """Exact M = L D U with L lower unipotent, D diagonal, U upper unipotent."""
    n = len(M)
    A = [[Fraction(x) for x in row] for row in M]
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        if A[c][c] == 0:
            raise NotDecomposable(c + 1)
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            L[r][c] = f
            A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    D = [[A[i][i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    U = [[A[i][j] / A[i][i] if j >= i else Fraction(0) for j in range(n)] for i in range(n)]
    return L, D, U


def sbar(n: int, i: int):
    """phi_i of [[0,-1],[1,0]] as an integer matrix."""
    M = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
    M[i - 1][i - 1] = Fraction(0)
    M[i][i] = Fraction(0)
    M[i - 1][i] = Fraction(-1)
    M[i][i - 1] = Fraction(1)
    return M


def weyl_rep(p: Permutation):
    """The lift wbar = sbar_{i1}...sbar_{il} along a reduced word."""
    n = p.n
    R = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
    for i in p.reduced_word():
        R = mat_mul(R, sbar(n, i))
    return R


def _inverse_exact(M):
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        A[c] = [x / A[c][c] for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def minor_via_gauss(u: Permutation, v: Permutation, k: int, M) -> Fraction:
    """[ubar^{-1} M vbar]_0 raised to omega_k: the product of the first k LDU pivots."""
    A = mat_mul(mat_mul(_inverse_exact(weyl_rep(u)), [[Fraction(x) for x in r] for r in M]), weyl_rep(v))
    _, D, _ = gaussian_decompose(A)
    out = Fraction(1)
    for i in range(k):
        out *= D[i][i]
    return out


# --- dual numbers and derivative actions ------------------------------------------------------

class Dual:
    """a + b eps with eps^2 = 0 over any commutative ring."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = a
        self.b = b

    def __add__(self, o):
        if isinstance(o, Dual):
            return Dual(self.a + o.a, self.b + o.b)
        return Dual(self.a + o, self.b)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(self.a * o.a, self.a * o.b + self.b * o.a)
        return Dual(self.a * o, self.b * o)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Dual({self.a!r}, {self.b!r})"


def _scal(M, X, side):
    """X M (left) or M X (right) for a constant matrix X over the ring of M."""
    n = len(M)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = None
            for k in range(n):
                if side == "left":
                    c, m = X[i][k], M[k][j]
                else:
                    m, c = M[i][k], X[k][j]
                if c == 0 or _is_zero(m):
                    continue
                t = m * c
                acc = t if acc is None else acc + t
            out[i][j] = acc if acc is not None else _zero_like(M[i][j], M[i][j])
    return out


def derivative_action(side: str, X, spec: MinorSpec, M):
    """d/de Delta((I + eX) M) for side 'left', d/de Delta(M (I + eX)) for 'right'."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    XM = _scal(M, X, side)
    D = [[Dual(M[i][j], XM[i][j]) for j in spec.cols] for i in spec.rows]
    val = det(D)
    if isinstance(val, Dual):
        return val.b
    return _zero_like(M[0][0], M[0][0])


def elementary(n: int, i: int, j: int, c=1):
    """c E_{ij} (0-based)."""
    X = [[Fraction(0)] * n for _ in range(n)]
    X[i][j] = Fraction(c)
    return X


def chevalley_E(n: int, i: int):
    return elementary(n, i - 1, i)


def chevalley_F(n: int, i: int):
    return elementary(n, i, i - 1)


def chevalley_H(n: int, i: int):
    X = elementary(n, i - 1, i - 1)
    X[i][i] = Fraction(-1)
    return X


# --- cluster minors of a reduced word ------------------------------------------------------

def initial_minors(n: int, word: Sequence[int]) -> list:
    """F(i): Delta(k) = Delta_{omega_{i_k}, v_{>k} omega_{i_k}} and Delta(-j) = Delta_{omega_j, w0 omega_j}."""
    validate_double_word(n, word)
    out = []
    m = len(word)
    for k in range(m):
        i = word[k]
        v = Permutation.identity(n)
        for letter in word[k + 1:]:
            v = Permutation.simple(n, letter) * v
        spec = MinorSpec.from_weyl(Permutation.identity(n), v, i)
        if spec not in out:
            out.append(spec)
    for j in range(1, n):
        spec = w0_minor(n, j)
        if spec not in out:
            out.append(spec)
    return out


# --- braid moves --------------------------------------------------------------------------

def braid_transition(word: Sequence[int], pos: int, n: int | None = None, include_torus: bool = True):
    """Apply a braid or commutation move at 1-based position ``pos``.

    Returns (new_word, comps) where comps express the new chart coordinates in the
    old ones, so that theta_new(comps(t)) = theta_old(t).
    """
    word = tuple(word)
    if n is None:
        n = max(abs(i) for i in word) + 1
    m = len(word)
    r = n - 1 if include_torus else 0
    N = m + r
    p = pos - 1
    x = [PositiveRational.var(N, k) for k in range(N)]
    comps = list(x)
    if p + 2 < m + 0 and p >= 0:
        a, b, c = word[p:p + 3]
        if a == c and a * b > 0 and abs(abs(a) - abs(b)) == 1:
            x1, x2, x3 = x[p:p + 3]
            s = x1 + x3
            comps[p:p + 3] = [x2 * x3 / s, s, x1 * x2 / s]
            new = word[:p] + (b, a, b) + word[p + 3:]
            return new, comps
    if 0 <= p and p + 1 < m:
        a, b = word[p:p + 2]
        if a * b > 0 and abs(abs(a) - abs(b)) >= 2:
            comps[p], comps[p + 1] = x[p + 1], x[p]
            return word[:p] + (b, a) + word[p + 2:], comps
    raise NoMoveHere(f"no braid or commutation move at position {pos} of {word}")


def available_moves(word: Sequence[int], n: int) -> list:
    out = []
    for pos in range(1, len(word) + 1):
        try:
            braid_transition(word, pos, n)
            out.append(pos)
        except NoMoveHere:
            pass
    return out


def chart_to_positive(M) -> list:
    """Entries of a chart matrix as PositiveRational (None for zero entries)."""
    return [[PositiveRational(e) if not e.is_zero() else None for e in row] for row in M]
