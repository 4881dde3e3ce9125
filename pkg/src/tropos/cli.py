"""Command line interface: `tropos <command> ...`.

Usage errors exit with status 2; failures inside a computation exit with
status 1 and print a JSON error object.  Output is deterministic for a given
set of arguments and seed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    word: tuple | None = None
    form_scale: Fraction = Fraction(1, 2)
    twist: int = -1
    s_grid: list = field(default_factory=list)
    seed: int = 0
    out: str | None = None
    csv: str | None = None
    emit: str = "json"


def _word(text: str) -> tuple:
    try:
        w = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"word must be comma-separated integers, got {text!r}")
    if not w:
        raise argparse.ArgumentTypeError("empty word")
    return w


def _pair(text: str) -> tuple:
    try:
        i, j = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"pair must be i,j, got {text!r}")
    return i, j


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _fracs(text: str) -> list:
    return [_frac(v) for v in text.split(",") if v.strip()]


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _default_word(n: int) -> tuple:
    return tuple(i for k in range(n - 1, 0, -1) for i in range(1, k + 1))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropos", description="Tropicalization of positive Poisson varieties.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--emit", choices=["json", "csv"], default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)

    group = argparse.ArgumentParser(add_help=False)
    group.add_argument("--n", type=int, required=True)
    group.add_argument("--word", type=_word, help="reduced word for w0, e.g. 1,2,1")
    group.add_argument("--form-scale", type=_frac, default=Fraction(1, 2))
    group.add_argument("--twist", type=int, choices=[-1, 1], default=-1)

    s = sub.add_parser("trop", parents=[common], help="tropicalize positive rational functions")
    s.add_argument("--expr", action="append", required=True, help="expression; repeat for a map")
    s.add_argument("--vars", help="comma-separated variable order")
    s.add_argument("--chambers", action="store_true", help="also list linearity chambers")

    s = sub.add_parser("cone", parents=[common], help="potential cone of a set of functions")
    s.add_argument("--phi", action="append", required=True)
    s.add_argument("--vars")

    s = sub.add_parser("dominate", parents=[common], help="decide domination with certificates")
    s.add_argument("--f", required=True)
    s.add_argument("--phi", action="append", required=True)
    s.add_argument("--vars")

    s = sub.add_parser("string-cone", parents=[common, group], help="string cone of SL_n")
    s.add_argument("--coords", choices=["theta", "matrix"], default="theta")

    s = sub.add_parser("gstar-bracket", parents=[common, group], help="bracket of two G* coordinates")
    s.add_argument("--pair", type=_pair, required=True, help="1-based coordinate indices i,j")

    sub.add_parser("verify-wlc", parents=[common, group], help="weak log-canonicity report")
    sub.add_parser("pt", parents=[common, group], help="partial tropicalization")

    s = sub.add_parser("scaling", parents=[common, group], help="convergence experiment")
    s.add_argument("--points", type=int, default=5)
    s.add_argument("--smax", type=int, default=60)
    s.add_argument("--step", type=int, default=5)
    s.add_argument("--csv", help="CSV output path")

    s = sub.add_parser("pl-limit", parents=[common], help="PL limit of one function under E_s")
    s.add_argument("--expr", required=True)
    s.add_argument("--vars")
    s.add_argument("--xi", type=_fracs, required=True)
    s.add_argument("--nu", type=_floats)
    s.add_argument("--smax", type=int, default=60)

    s = sub.add_parser("verify-suite", parents=[common], help="run the acceptance checks")
    s.add_argument("--level", choices=["fast", "full"], default="fast")
    s.add_argument("--form-scale", type=_frac, default=Fraction(1, 2))
    s.add_argument("--twist", type=int, choices=[-1, 1], default=-1)
    return p


# --- commands --------------------------------------------------------------------------------

def _names(args):
    return [v.strip() for v in args.vars.split(",")] if getattr(args, "vars", None) else None


def _parse_all(exprs, names):
    from .exact_algebra import parse_positive

    if names is None:
        from .exact_algebra import _natural_key, _tokenize
        found = {v for e in exprs for k, v in _tokenize(e) if k == "name"}
        names = sorted(found, key=_natural_key)
    return [parse_positive(e, names)[0] for e in exprs], names


def cmd_trop(args, cfg):
    from .tropical import linearity_chambers, tropicalize_map

    fs, names = _parse_all(args.expr, _names(args))
    F = tropicalize_map(fs)
    xi = [f"xi_{v}" for v in names]
    out = {"vars": names, "components": [{"expr": e, "trop": c.to_json(), "text": c.to_text(xi)}
                                         for e, c in zip(args.expr, F.comps)]}
    if args.chambers:
        out["chambers"] = [{"cone": ch.cone.to_json(), "linear_map": [[str(v) for v in r] for r in ch.linear_map]}
                           for ch in linearity_chambers(F)]
    return out


def cmd_cone(args, cfg):
    from .cones import cone_from_potentials, interior_point

    fs, names = _parse_all(args.phi, _names(args))
    C = cone_from_potentials(fs, len(names))
    pt = interior_point(C)
    return {"vars": names, "cone": C.to_json(), "empty": pt is None,
            "interior_point": None if pt is None else [str(v) for v in pt]}


def cmd_dominate(args, cfg):
    from .cones import cone_from_potentials, is_dominated

    fs, names = _parse_all([args.f] + args.phi, _names(args))
    C = cone_from_potentials(fs[1:], len(names))
    return {"vars": names, **is_dominated(fs[0], C).to_json()}


def cmd_string_cone(args, cfg):
    from .bk_potential import gz2_cone, string_cone

    if args.coords == "matrix":
        if cfg.n != 2:
            raise ValueError("matrix-entry coordinates are implemented for n = 2")
        return {"n": 2, "coordinates": ["xi11", "xi12"], "cone": gz2_cone().to_json()}
    return string_cone(cfg.n, cfg.word).to_json()


def _chart(cfg):
    from .dual_group import get_chart

    return get_chart(cfg.n, cfg.word, cfg.form_scale, cfg.twist)


def cmd_gstar_bracket(args, cfg):
    from .cones import is_dominated
    from .tropical import tropicalize

    ch = _chart(cfg)
    K = len(ch.z)
    i, j = args.pair
    if not (1 <= i <= K and 1 <= j <= K):
        raise ValueError(f"coordinate indices must lie in 1..{K}")
    e = ch.table()[(i - 1, j - 1)]
    C = ch.cone()
    verdicts = [is_dominated(tropicalize(t.term), C) for t in e.residual]
    out = e.to_json(ch.names)
    out.update({"labels": [ch.labels()[i - 1], ch.labels()[j - 1]],
                "dominated": all(v.dominated for v in verdicts),
                "certificates": [v.to_json() for v in verdicts]})
    return out


def cmd_verify_wlc(args, cfg):
    from .dual_group import verify_weak_log_canonical

    ch = _chart(cfg)
    out = verify_weak_log_canonical(cfg.n, cfg.word, ch).to_json(ch.names)
    out["coordinates"] = ch.labels()
    return out


def _normalization(cfg) -> dict:
    # residual terms carry 1/form_scale; the log-canonical part fixes the PT bracket
    return {"form_scale": str(cfg.form_scale), "twist": cfg.twist, "residual_factor": str(1 / cfg.form_scale)}


def cmd_pt(args, cfg):
    from .partial_trop import pt_space

    pt = pt_space(cfg.n, cfg.word, _chart(cfg))
    out = pt.to_json()
    out["rank"] = pt.rank()
    out["normalization"] = _normalization(cfg)
    return out


def cmd_scaling(args, cfg):
    from .partial_trop import Experiment, convergence_experiment, sample_points

    if args.points < 1 or args.step < 1 or args.smax < args.step:
        raise ValueError("need points >= 1 and smax >= step >= 1")
    ex = Experiment(_chart(cfg))
    pts = sample_points(ex, args.points, seed=cfg.seed)
    rep = convergence_experiment(ex.chart, pts, cfg.s_grid, experiment=ex)
    rows = rep.csv_rows()
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    if cfg.emit == "csv":
        return rows
    out = rep.to_json()
    out["normalization"] = _normalization(cfg)
    return out


def cmd_pl_limit(args, cfg):
    from .partial_trop import pl_limit_check

    (f,), names = _parse_all([args.expr], _names(args))
    if len(args.xi) != len(names):
        raise ValueError(f"xi has {len(args.xi)} entries for {len(names)} variables")
    grid = [float(s) for s in range(5, args.smax + 1, 5)]
    out = pl_limit_check(f, args.xi, args.nu, grid).to_json()
    out["vars"] = names
    return out


def cmd_verify_suite(args, cfg):
    from .suite import run_suite

    return {"level": args.level, "checks": run_suite(args.level, args.form_scale, args.twist)}


COMMANDS = {"trop": cmd_trop, "cone": cmd_cone, "dominate": cmd_dominate, "string-cone": cmd_string_cone,
            "gstar-bracket": cmd_gstar_bracket, "verify-wlc": cmd_verify_wlc, "pt": cmd_pt,
            "scaling": cmd_scaling, "pl-limit": cmd_pl_limit, "verify-suite": cmd_verify_suite}


def make_config(args, parser) -> RunConfig:
    cfg = RunConfig(args.command, emit=args.emit, out=args.out, seed=args.seed, csv=getattr(args, "csv", None))
    if hasattr(args, "n") and args.n is not None:
        if args.n < 2:
            parser.error("--n must be at least 2")
        cfg.n = args.n
        cfg.word = args.word or _default_word(args.n)
        if args.form_scale <= 0:
            parser.error("--form-scale must be positive")
        cfg.form_scale = args.form_scale
        cfg.twist = args.twist
    if args.command == "scaling":
        cfg.s_grid = [float(s) for s in range(args.step, args.smax + 1, args.step)]
    return cfg


def _render(obj, emit: str) -> str:
    if emit == "csv":
        if not (isinstance(obj, list) and obj and isinstance(obj[0], list)):
            obj = _flatten(obj)
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(obj)
        return buf.getvalue()
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _flatten(obj, prefix="") -> list:
    rows = [["key", "value"]] if not prefix else []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows += _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            rows += _flatten(v, f"{prefix}[{i}]")
    else:
        rows.append([prefix, obj])
    return rows


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = make_config(args, parser)
    try:
        result = COMMANDS[args.command](args, cfg)
    except Exception as exc:
        sys.stdout.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
        return 1
    text = _render(result, cfg.emit)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify-suite" and any(c["status"] == "fail" for c in result["checks"]):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
