"""Runtime verification suite behind `tropos verify-suite`.

Each check returns (status, detail) with status one of "pass", "fail",
"xfail".  An xfail is a documented discrepancy that is reproduced exactly;
anything else that differs is a failure.
"""
from __future__ import annotations

from fractions import Fraction

from .bk_potential import bk_potential_set, gz2_cone, sl2_transition_plmap, string_cone
from .cones import Cone, cone_from_potentials, cones_equal, is_dominated
from .dual_group import GStarChart, bracket_gstar, get_chart, jacobi_defect, verify_weak_log_canonical
from .exact_algebra import LaurentPolynomial, PositiveRational, parse_positive, poly_divide_exact, substitute
from .liegroup import MinorSpec, generalized_minor, initial_minors
from .partial_trop import Experiment, convergence_experiment, pt_space, real_form_spec_of, sample_points
from .tropical import TropPolynomial, TropRational, linearity_chambers, tropicalize, tropicalize_map, trop_equal


def _tr(pos, neg) -> TropRational:
    return TropRational(TropPolynomial(pos), TropPolynomial(neg))


def check_trop():
    f, _ = parse_positive("(x^3+1)/(x+1)")
    ok1 = trop_equal(tropicalize(f), _tr([(3,), (0,)], [(1,), (0,)]))
    comps = [parse_positive(e, ["x1", "x2", "x3"])[0]
             for e in ("x2*x3/(x1+x3)", "x1+x3", "x1*x2/(x1+x3)")]
    F = tropicalize_map(comps)
    want = [_tr([(0, 1, 1)], [(1, 0, 0), (0, 0, 1)]), _tr([(1, 0, 0), (0, 0, 1)], [(0, 0, 0)]),
            _tr([(1, 1, 0)], [(1, 0, 0), (0, 0, 1)])]
    ok2 = all(trop_equal(a, b) for a, b in zip(F.comps, want))
    nch = len(linearity_chambers(F))
    return ok1 and ok2 and nch == 2, f"chambers={nch}"


def check_division():
    names = ["t1", "t2"]
    F = [parse_positive("t1*t2/(t1+t2)", names)[0], parse_positive("t2^2/(t1+t2)", names)[0]]
    f = parse_positive("(t1^3+t2^3)*(t1+t2)/t2^2", names)[0]
    g = substitute(f, F)
    q = poly_divide_exact(g.num, g.den)
    want = LaurentPolynomial(2, {(2, 0): 1, (1, 1): -1, (0, 2): 1})
    return q == want and not q.is_positive(), q.to_text(names)


def check_example_cone():
    names = ["x1", "x2", "x3"]
    Phi = [parse_positive(e, names)[0] for e in ("1/x1", "1/x3", "(x1+x3)/(x1*x2)", "(x1+x3)/(x2*x3)")]
    C = cone_from_potentials(Phi)
    f = parse_positive("1/(x1*x2)", names)[0]
    v = is_dominated(f, C)
    lhs = parse_positive("1/x1", names)[0] * parse_positive("(x1+x3)/(x2*x3)", names)[0]
    diff = lhs.num * f.den - f.num * lhs.den
    ok_id = PositiveRational(diff, lhs.den * f.den).equals(parse_positive("1/(x2*x3)", names)[0])
    return len(C.forms) == 6 and v.dominated and bool(v.certificates) and ok_id, f"forms={len(C.forms)}"


def check_gz2():
    C = gz2_cone()
    want = Cone(2, [(-1, -1), (1, -1)])
    theta = string_cone(2, (1,)).cone
    T = sl2_transition_plmap()
    M = [[a - b for a, b in zip(c.pos.sorted_forms()[0], c.neg.sorted_forms()[0])] for c in T.comps]
    return cones_equal(C, want) and cones_equal(C.pullback(M), theta), "GZ_2"


def check_phi_first():
    ok = True
    for n, w in ((2, (1,)), (3, (1, 2, 1)), (3, (2, 1, 2))):
        ps = bk_potential_set(n, w)
        phi = ps.potentials[w[0] - 1]
        N = phi.nvars
        ok &= phi.equals(PositiveRational(LaurentPolynomial.one(N), LaurentPolynomial.var(N, 0)))
    return ok, "phi_{i1} = 1/t1"


def check_cluster_set():
    F = {str(s) for s in initial_minors(3, (1, 2, 1))}
    want = {"D12,23", "D1,3", "D1,2", "D12,12", "D1,1"}
    return F == want, ",".join(sorted(F))


def check_calibration(form_scale=Fraction(1, 2), twist=-1):
    ch = GStarChart(2, (1,), form_scale, twist)
    e31, e32, e12 = bracket_gstar(ch, 2, 0), bracket_gstar(ch, 2, 1), bracket_gstar(ch, 0, 1)
    first = e31.pi_imag == 1 and not e31.residual and e32.pi_imag == -1 and not e32.residual
    h = LaurentPolynomial.var(3, 2)
    b12b21 = ch.z[0] * ch.z[1]
    target = PositiveRational(h ** 2, b12b21)
    target_m = PositiveRational(h ** -2, b12b21)
    coefs = {}
    for t in e12.residual:
        for name, T in (("plus", target), ("minus", target_m)):
            ratio = PositiveRational(t.term.num * T.den, t.term.den * T.num)
            if ratio.num.is_monomial() and ratio.den.is_monomial():
                ea, ca = ratio.num.leading_term()
                eb, cb = ratio.den.leading_term()
                if ea == eb:
                    coefs[name] = t.coef * ca / cb
    if not first:
        return "fail", "log-canonical SL_2 brackets differ"
    if coefs == {"plus": 1, "minus": -1}:
        return "pass", "all three brackets"
    if coefs == {"plus": 2, "minus": -2}:
        return "xfail", "third bracket is twice the target"
    return "fail", f"third bracket coefficients {coefs}"


def check_wlc3():
    ch = get_chart(3, (1, 2, 1))
    rep = verify_weak_log_canonical(3, (1, 2, 1), ch)
    labels = ch.labels()
    i, j = labels.index("(D1,3)_1"), labels.index("(D1,2 o tau)_2")
    e = bracket_gstar(ch, i, j)
    zz = ch.z[i] * ch.z[j]
    t1 = generalized_minor(MinorSpec((1,), (2,)), ch.bplus) * generalized_minor(MinorSpec((1,), (1,)), ch.tbminus)
    t2 = generalized_minor(MinorSpec((2,), (2,)), ch.bplus) * generalized_minor(MinorSpec((2,), (1,)), ch.tbminus)
    ok_pair = (len(e.residual) == 1 and t2.is_zero() and e.residual[0].term.equals(PositiveRational(t1.scale(2), zz))
               and e.pi_imag == -1)
    return rep.all_dominated and ok_pair, f"pairs={len(rep.entries)}"


def check_pt2():
    pt = pt_space(2, (1,))
    M = [[0, 1], [1, 0]]  # (xi11, xi12) -> L-coordinates (xi_b12, xi_b11)
    ok = cones_equal(pt.cone.pullback(M), gz2_cone())
    B = pt.xi_nu()
    ok &= B[1][0] == 1 and B[0][0] == 0 and pt.torus_dim == 1
    return ok, "GZ_2 with {xi11,nu}=1"


def check_scaling(ns=(2, 3)):
    out = []
    ok = True
    for n, word, k in ((2, (1,), 5), (3, (1, 2, 1), 3)):
        if n not in ns:
            continue
        ex = Experiment(get_chart(n, word))
        rep = convergence_experiment(ex.chart, sample_points(ex, k, seed=0), experiment=ex)
        ok &= rep.ok
        out.append(f"n={n}:" + ",".join(f"{p.slope:.3f}" for p in rep.points))
    return ok, " ".join(out)


def check_properties(full=True):
    import numpy as np
    rng = np.random.default_rng(0)
    worst = 0.0
    for n, w in ((2, (1,)), (3, (1, 2, 1))) if full else ((2, (1,)),):
        ch = get_chart(n, w)
        for _ in range(3):
            worst = max(worst, jacobi_defect(ch, rng.uniform(0.5, 2.0, ch.N)))
    return worst < 1e-8, f"jacobi={worst:.1e}"


def check_torus():
    dims = {n: real_form_spec_of(GStarChart(n, tuple(_w0(n)))).torus_dim for n in (2, 3, 4)}
    return all(d == n * (n - 1) // 2 for n, d in dims.items()), str(dims)


def _w0(n):
    return [i for k in range(n - 1, 0, -1) for i in range(1, k + 1)]


def run_suite(level: str = "fast", form_scale=Fraction(1, 2), twist: int = -1) -> list:
    full = level == "full"
    checks = [
        ("C1", "tropicalization", check_trop),
        ("C2", "positivity breakage", check_division),
        ("C3", "potential cone and certificate", check_example_cone),
        ("C4", "SL_2 string cone", check_gz2),
        ("C5", "first potential", check_phi_first),
        ("C6", "cluster set", check_cluster_set),
        ("C7", "SL_2 calibration", lambda: check_calibration(form_scale, twist)),
        ("C8", "SL_3 weak log-canonicity", check_wlc3),
        ("C9", "PT of SL_2", check_pt2),
        ("C10", "scaling convergence", lambda: check_scaling((2, 3) if full else (2,))),
        ("C11", "property checks", lambda: check_properties(full)),
        ("C12", "torus dimension", check_torus),
    ]
    if not full:
        checks = [c for c in checks if c[0] != "C8"]
    out = []
    for cid, name, fn in checks:
        try:
            res = fn()
            status, detail = res if isinstance(res[0], str) else ("pass" if res[0] else "fail", res[1])
        except Exception as exc:  # reported, not raised
            status, detail = "fail", f"{type(exc).__name__}: {exc}"
        out.append({"id": cid, "name": name, "status": status, "detail": detail})
    return out
