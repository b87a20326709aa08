"""Command line runner: every subcommand writes a Certificate (or report) as JSON.

Exit codes: 0 result written (whatever its verdict), 2 invalid input,
3 budget exhausted (partial result written when available), 4 internal
invariant violated.
"""
from __future__ import annotations

import argparse
import csv
import glob
import io
import json
import random
import sys as _sys
import time
from fractions import Fraction
from pathlib import Path

from . import boxgeom
from .certificate import Certificate, jsonable
from .errors import BudgetError, DyndimError, InvariantError, ValidationError
from .ground import DEFAULT_ATOM_BUDGET, closed
from .rational import fmt_q, parse_q
from .serialize import (cover_from_dict, kfamily_from_json, load_json, observable_from_json, system_from_dict,
                        system_to_dict, towers_from_json, write_text)

REPORT_FIELDS = ("file", "quantity", "kind", "value", "lower", "upper", "gap", "pass", "runtime")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("budgets must be positive")
    return v


def _emit(args, payload: dict) -> None:
    text = json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n"
    if args.out:
        write_text(args.out, text)
    else:
        _sys.stdout.write(text)


def _timing(args, seconds: float) -> None:
    """Runtimes go to a sidecar file so the main output stays byte-stable."""
    if args.out:
        write_text(str(args.out) + ".timing.json", json.dumps({"runtime_s": round(seconds, 6)}) + "\n")


def _decimal(v: Fraction | None, digits: int) -> str:
    if v is None:
        return ""
    return f"{float(v):.{digits}f}"


def _load_system(path):
    return system_from_dict(load_json(path))


# ------------------------------------------------------------ subcommands


def cmd_brickwall(args) -> dict:
    box = None
    if args.box:
        parts = args.box.split(",")
        box = []
        for p in parts:
            lo, sep, hi = p.partition(":")
            if not sep:
                raise ValidationError(f"box side {p!r} is not lo:hi")
            box.append(closed(parse_q(lo), parse_q(hi)))
    bw = boxgeom.build_brickwall(args.dim, parse_q(args.eps), box)
    return boxgeom.verify_brickwall(bw, args.budget_atoms).to_dict()


def cmd_ok_cover(args) -> dict:
    from .okcover import build_ok, verify_ok

    u = cover_from_dict(load_json(args.cover))
    ok = build_ok(u, args.k)
    cert = verify_ok(ok)
    d = cert.to_dict()
    d["witness"]["families"] = [[sorted(s.members) for s in fam] for fam in ok.families]
    return d


def _parse_folner(spec: str) -> tuple[str, int]:
    kind, _, rng = spec.partition(":")
    lo, sep, hi = rng.partition("..")
    if kind not in ("z", "group") or (kind == "z" and not sep):
        raise ValidationError(f"folner spec {spec!r} is not z:1..N or group:")
    return kind, int(hi) if sep else 0


def cmd_ergavg(args) -> dict:
    from .dynsys import SftSystem
    from .ergopt import folner_formulas, max_ergodic_average

    s = _load_system(args.sys)
    f = observable_from_json(load_json(args.f), s)
    if isinstance(s, SftSystem):
        return {"measure_value": max_ergodic_average(s, f), "system": system_to_dict(s)}
    _, top = _parse_folner(args.folner)
    rep = folner_formulas(s, f, top or None, args.budget_fsize)
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "estimate", "measure_value"])
        for n, v in rep.estimates:
            w.writerow([n, _decimal(v, args.precision), _decimal(rep.measure_value, args.precision)])
        write_text(args.csv, buf.getvalue())
    return rep.to_dict()


def cmd_dim_cert(args) -> dict:
    from .dimension import dim_U_T_lower_dim1, dim_U_T_upper, lemma92_check

    s = _load_system(args.sys)
    u = cover_from_dict(load_json(args.cover), s.space)
    if args.refine:
        v = cover_from_dict(load_json(args.refine), s.space)
        return dim_U_T_upper(s, u, v).to_dict()
    if args.lower_dim1:
        return dim_U_T_lower_dim1(s, u).to_dict()
    if args.lemma92:
        return lemma92_check(s, u, kfamily_from_json(load_json(args.lemma92)), args.d).to_dict()
    raise ValidationError("choose one of --refine, --lower-dim1, --lemma92")


def cmd_thm71(args) -> dict:
    from .dimension import thm71_check
    from .fixtures import polygon_rotation

    if args.sys:
        s = _load_system(args.sys)
    else:
        s = polygon_rotation(args.order, args.cells)
    u = cover_from_dict(load_json(args.cover), s.space) if args.cover else None
    return thm71_check(s, u).to_dict()


def cmd_cubeshift(args) -> dict:
    from .dimension import cubical_shift_upper

    return cubical_shift_upper(args.d, args.n, parse_q(args.eps), args.budget_atoms).to_dict()


def cmd_sbp(args) -> dict:
    from .dimension import sbp_witness_search

    return sbp_witness_search(_load_system(args.sys), parse_q(args.eps), args.budget_candidates).to_dict()


def cmd_urp(args) -> dict:
    from .dimension import urp_check

    s = _load_system(args.sys)
    return urp_check(s, towers_from_json(load_json(args.towers)), args.closed).to_dict()


def cmd_almost_embed(args) -> dict:
    from .almostemb import Observable, cor104_check, thm103_pipeline
    from .dynsys import almost_embedding_check, fiber_product

    s = _load_system(args.sys)
    cert = thm103_pipeline(s, args.d, args.levels)
    out = cert.to_dict()
    out["embedding"] = cor104_check(s, args.d, args.levels).to_dict()
    if args.mc_seeds:
        # randomised mode: uniformly dithered rational observables on a 1/den grid
        rows = []
        den = max(4, 2 * s.n)
        for seed in range(args.mc_seeds):
            rng = random.Random(seed)
            comps = tuple(tuple(Fraction(rng.randint(0, den), den) for _ in range(s.n)) for _ in range(args.d))
            ok, _ = almost_embedding_check(fiber_product(s, Observable(comps), args.d))
            rows.append((seed, int(ok)))
        good = sum(r[1] for r in rows)
        out["mc_density"] = Fraction(good, len(rows))
        if args.csv:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["seed", "almost_embedding"])
            w.writerows(rows)
            write_text(args.csv, buf.getvalue())
    return out


def cmd_sys_validate(args) -> dict:
    from .dynsys import SftSystem, orbits

    s = _load_system(args.file)
    if isinstance(s, SftSystem):
        return {"valid": True, "system": system_to_dict(s), "blocks": len(s.blocks())}
    if s.space.coords is not None or s.space.table is not None:
        s.space.check_metric()
    return {"valid": True, "system": system_to_dict(s), "points": s.n, "orbits": len(orbits(s))}


def _report_rows(paths, digits: int):
    rows, warnings = [], []
    for p in paths:
        try:
            cert = Certificate.from_dict(load_json(p))
        except KeyError as e:
            warnings.append(f"{p}: not a certificate (missing field {e})")
            continue
        except (DyndimError, TypeError, AttributeError) as e:
            warnings.append(f"{p}: {e}")
            continue
        lo, hi = cert.interval()
        gap = hi - lo if lo is not None and hi is not None else None
        runtime = ""
        side = Path(str(p) + ".timing.json")
        if side.exists():
            runtime = str(json.loads(side.read_text()).get("runtime_s", ""))
        rows.append({"file": str(p), "quantity": cert.quantity, "kind": cert.kind,
                     "value": "" if cert.value is None else fmt_q(cert.value),
                     "lower": _decimal(lo, digits), "upper": _decimal(hi, digits), "gap": _decimal(gap, digits),
                     "pass": int(cert.passed), "runtime": runtime})
    return rows, warnings


def cmd_report(args) -> int:
    paths = []
    for pattern in args.certs:
        hits = sorted(glob.glob(pattern))
        paths.extend(hits if hits else [pattern])
    paths = sorted({p for p in paths if not p.endswith(".timing.json")})
    rows, warnings = _report_rows(paths, args.precision)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    if args.out:
        write_text(args.out, buf.getvalue())
    else:
        _sys.stdout.write(buf.getvalue())
    for msg in warnings:
        print(f"warning: {msg}", file=_sys.stderr)
    passed = sum(r["pass"] for r in rows)
    print(f"{len(rows)} certificates: {passed} pass, {len(rows) - passed} not passing", file=_sys.stderr)
    return 2 if paths and not rows else 0


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dyndim", description="Exact certificates for dynamical dimension.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--out", help="output path (default: stdout)")
        return p

    p = add("brickwall", cmd_brickwall, "build and verify the brickwall cover of a box")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--box", help="sides as lo:hi,lo:hi (default unit cube)")
    p.add_argument("--budget-atoms", type=_positive, default=boxgeom.DEFAULT_ATOM_BUDGET)

    p = add("ok-cover", cmd_ok_cover, "build and verify disjoint families from a cover")
    p.add_argument("--cover", required=True)
    p.add_argument("--k", type=int, required=True)

    p = add("ergavg", cmd_ergavg, "maximal ergodic average, measure and Følner sides")
    p.add_argument("--sys", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--folner", default="z:1..24")
    p.add_argument("--budget-fsize", type=_positive, default=12)
    p.add_argument("--csv")
    p.add_argument("--precision", type=int, default=6)

    p = add("dim-cert", cmd_dim_cert, "upper or lower certificate for dim(U, T)")
    p.add_argument("--sys", required=True)
    p.add_argument("--cover", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--refine")
    g.add_argument("--lower-dim1", action="store_true")
    g.add_argument("--lemma92")
    p.add_argument("--d", type=int, default=1)

    p = add("thm71", cmd_thm71, "dimension of a free finite group action on a polygon")
    p.add_argument("--sys")
    p.add_argument("--cells", type=int, default=12)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--cover")

    p = add("cubeshift", cmd_cubeshift, "upper bound for the cubical shift on a cycle")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", default="1/2")
    p.add_argument("--budget-atoms", type=_positive, default=boxgeom.DEFAULT_ATOM_BUDGET)

    p = add("sbp", cmd_sbp, "search for a small-boundary cover")
    p.add_argument("--sys", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--budget-candidates", type=_positive, default=2_000_000)

    p = add("urp-check", cmd_urp, "check a tower family")
    p.add_argument("--sys", required=True)
    p.add_argument("--towers", required=True)
    p.add_argument("--closed", action="store_true")

    p = add("almost-embed", cmd_almost_embed, "run the almost-embedding pipeline")
    p.add_argument("--sys", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--levels", type=_positive, default=2)
    p.add_argument("--mc-seeds", type=int, default=0)
    p.add_argument("--csv")

    p = sub.add_parser("report", help="aggregate certificates into a CSV table")
    p.set_defaults(fn=None)
    p.add_argument("certs", nargs="*")
    p.add_argument("--out")
    p.add_argument("--precision", type=int, default=6)

    p = sub.add_parser("sys", help="system utilities")
    ssub = p.add_subparsers(dest="sys_command", required=True)
    v = ssub.add_parser("validate", help="parse and validate a system file")
    v.add_argument("file")
    v.add_argument("--out")
    v.set_defaults(fn=cmd_sys_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if args.command == "report":
            return cmd_report(args)
        t0 = time.perf_counter()
        payload = args.fn(args)
        _emit(args, payload)
        _timing(args, time.perf_counter() - t0)
        return 0
    except BudgetError as e:
        if e.partial is not None:
            _emit(args, {"budget_exhausted": str(e), "partial": e.partial})
        print(f"budget exhausted: {e}", file=_sys.stderr)
        return e.exit_code
    except InvariantError as e:
        print(f"invariant violated: {e}", file=_sys.stderr)
        return e.exit_code
    except DyndimError as e:
        print(f"error: {e}", file=_sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
