"""Command-line front end: `rzlab <group> <command> [options]`.

Reports are JSON on stdout (or in --out).  Exit codes: 0 success, 1 a
verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import fiber_graph, herm_lattice, neighbor_walk, quat_order, tangent_calc
from .errors import (
    InputError,
    NotRUCase,
    RZLabError,
    SingularGramError,
    UnsupportedModularity,
)
from .padic_tower import (
    default_precision,
    ext_from_json,
    inverse_different_bruteforce,
    inverse_different_exponent,
    make_ext,
    make_field,
)

INPUT_ERRORS = (InputError, UnsupportedModularity, NotRUCase, SingularGramError)


class VerificationFailed(Exception):
    pass


# ---------------------------------------------------------------------------
# shared options


def _field_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("field")
    g.add_argument("--field", type=Path, help="JSON field/extension description")
    g.add_argument("--f", type=int, default=1, help="inertia degree")
    g.add_argument("--e", type=int, default=1, help="ramification index")
    g.add_argument("--ext", "--case", dest="ext", choices=["rp", "ru", "unram"], type=str.lower, default=None)
    g.add_argument("--vt", type=int, default=None, help="v(t) for RU (t = pi0^vt)")
    g.add_argument("--precision", type=int, default=None)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)


def _read_json(path: Path):
    try:
        return json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def load_ext(args, default_kind: str = "rp", min_precision: int = 0):
    prec = args.precision if args.precision is not None else default_precision()
    prec = max(prec, min_precision)
    if args.field is not None:
        obj = _read_json(args.field)
        if args.ext is not None:
            obj = dict(obj)
            ext = dict(obj.get("ext", {}))
            ext["kind"] = args.ext.upper()
            if args.vt is not None:
                ext["vt"] = args.vt
                ext.pop("t", None)
            obj["ext"] = ext
        if args.precision is None and "precision" in obj:
            prec = max(int(obj["precision"]), min_precision)
        return ext_from_json(obj, precision=prec)
    kind = (args.ext or default_kind).upper()
    if args.f < 1 or args.e < 1:
        raise InputError("f and e must be positive")
    F = make_field(args.f, args.e, precision=prec)
    if kind == "RU":
        return make_ext(F, kind, vt=args.vt if args.vt is not None else 1)
    if args.vt is not None:
        raise InputError("--vt only applies to RU")
    return make_ext(F, kind)


def emit(args, payload, raw: bytes | None = None):
    data = raw if raw is not None else (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_bytes(data)
    else:
        sys.stdout.write(data.decode())


def _felt_json(x):
    if x.is_zero():
        return {"zero_mod_pi0": x.n}
    return {"val": x.n, "unit": x.u.to_list()}


def _eelt_json(x):
    if x.is_zero():
        return {"zero_mod_Pi": x.n}
    return {"val": x.n, "unit": [x.u.a.to_list(), x.u.b.to_list()]}


# ---------------------------------------------------------------------------
# commands


def cmd_field_describe(args):
    ext = load_ext(args)
    F = ext.F
    rep = {"field": ext.to_json(), "q": F.q, "f": F.f, "e": F.e, "precision": F.precision, "kind": ext.kind}
    if ext.ramified:
        rep["different_exponent"] = inverse_different_exponent(ext)
        rep["different_exponent_bruteforce"] = inverse_different_bruteforce(ext)
        rep["vt"] = ext.vt
    emit(args, rep)


def _load_lattice(args, ext):
    if args.input is None:
        return herm_lattice.Lattice.standard(ext)
    return herm_lattice.lattice_from_json(ext, _read_json(args.input))


def cmd_lattice_classify(args):
    ext = load_ext(args)
    L = _load_lattice(args, ext)
    i = L.modularity()
    rep = {
        "key": L.key_str(),
        "modularity": i,
        "norm_exponent": herm_lattice.norm_ideal(L).ell,
        "hyperbolic": None,
        "normal_form_gram": None,
    }
    if i is not None and i in herm_lattice.SUPPORTED_MODULARITY.get(ext.kind, ()):
        rep["hyperbolic"] = herm_lattice.is_hyperbolic(L, i)
        nf = herm_lattice.normal_form_basis(L, i)
        rep["normal_form_gram"] = [[_eelt_json(x) for x in row] for row in nf.gram]
        rep["normal_form_x"] = _felt_json(nf.x)
    emit(args, rep)


def cmd_lattice_neighbors(args):
    ext = load_ext(args)
    L = _load_lattice(args, ext)
    i = L.modularity()
    if i is None:
        raise UnsupportedModularity("lattice is not Pi^i-modular for any i")
    allowed = herm_lattice.SUPPORTED_MODULARITY.get(ext.kind, ())
    to_i = args.to if args.to is not None else next((j for j in allowed if abs(j - i) == 1), None)
    if to_i is None:
        raise UnsupportedModularity(f"no supported neighbor modularity next to {i}")
    tally, found = neighbor_walk.modular_neighbors(L, i, to_i)
    emit(args, {
        "key": L.key_str(),
        "from_i": i,
        "to_i": to_i,
        "tally": tally.to_json(),
        "total": tally.total,
        "neighbors": sorted(M.key_str() for M in found),
    })


def _random_lattice(ext, rng: random.Random):
    a, b = rng.randint(-3, 3), rng.randint(-3, 3)
    lo = min(a, b) - 2
    digits = tuple((p, d) for p in range(lo, a) for d in [rng.randrange(ext.F.q)] if d)
    return herm_lattice.Lattice(ext, a, b, digits)


def cmd_verify_props(args):
    ext = load_ext(args)
    rep = neighbor_walk.verify_neighbor_props(ext)
    rng = random.Random(args.seed)
    mism = []
    for _ in range(args.samples):
        L = _random_lattice(ext, rng)
        a, b = herm_lattice.norm_ideal(L).ell, herm_lattice.brute_norm_exponent(L)
        if a != b:
            mism.append({"key": L.key_str(), "closed_form": a, "oracle": b})
    rep["norm_oracle"] = {"samples": args.samples, "seed": args.seed, "mismatches": mism}
    rep["all_pass"] = rep["all_pass"] and not mism
    emit(args, rep)
    if not rep["all_pass"]:
        raise VerificationFailed("neighbor-count checks failed")


def _graph_ext(args, radius: int):
    probe = load_ext(args)
    need = fiber_graph.required_precision(probe, radius)
    return load_ext(args, min_precision=need) if probe.F.precision < need else probe


def cmd_graph_build(args):
    ext = _graph_ext(args, args.radius)
    g = fiber_graph.build_ball(None, args.radius, ext, jobs=args.jobs)
    emit(args, None, raw=fiber_graph.export(g, args.format))


def cmd_graph_stats(args):
    if args.input is not None:
        g = fiber_graph.import_json(_read_json(args.input))
    else:
        ext = _graph_ext(args, args.radius)
        g = fiber_graph.build_ball(None, args.radius, ext, jobs=args.jobs)
    rep = fiber_graph.graph_stats(g)
    rep["tails"] = [
        {k: t[k] for k in ("lines", "points", "max_drop", "truncated")}
        for t in fiber_graph.tails_report(g, allow_truncated=True)
    ]
    emit(args, rep)


def cmd_quat_check(args):
    ext = load_ext(args)
    rep = quat_order.quat_check(ext)
    emit(args, rep)
    if not rep["ok"]:
        raise VerificationFailed("quaternion checks failed")


def cmd_deform_tangent(args):
    ext = load_ext(args, default_kind="ru")
    rep = tangent_calc.tangent_report(ext)
    emit(args, rep)
    if not rep["ideal_equal"] or rep["tangent_dim"] != 3:
        raise VerificationFailed("deformation check failed")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rzlab", description=__doc__.splitlines()[0])
    groups = ap.add_subparsers(dest="group", required=True)

    def sub(group: str, name: str, fn, help_: str):
        if group not in subs:
            gp = groups.add_parser(group)
            subs[group] = gp.add_subparsers(dest="command", required=True)
        p = subs[group].add_parser(name, help=help_)
        _field_args(p)
        _common(p)
        p.set_defaults(fn=fn)
        return p

    subs: dict = {}
    sub("field", "describe", cmd_field_describe, "field parameters and the different")
    p = sub("lattice", "classify", cmd_lattice_classify, "modularity, norm ideal, normal form")
    p.add_argument("--in", dest="input", type=Path, default=None)
    p = sub("lattice", "neighbors", cmd_lattice_neighbors, "index-1 modular neighbors")
    p.add_argument("--in", dest="input", type=Path, default=None)
    p.add_argument("--to", type=int, default=None, help="target modularity")
    p = sub("verify", "props", cmd_verify_props, "check every neighbor-count case")
    p.add_argument("--samples", type=int, default=20, help="random lattices for the norm oracle")
    p = sub("graph", "build", cmd_graph_build, "incidence graph of a ball")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p = sub("graph", "stats", cmd_graph_stats, "vertex classes, degrees and tails")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--in", dest="input", type=Path, default=None, help="graph JSON from `graph build`")
    sub("quat", "check", cmd_quat_check, "discriminant, gamma relation, non-norms")
    sub("deform", "tangent", cmd_deform_tangent, "tangent dimension at a hyperbolic point")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.fn(args)
    except VerificationFailed as exc:
        print(json.dumps({"error": "verification", "detail": str(exc)}), file=sys.stderr)
        return 1
    except INPUT_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "command": f"{args.group} {args.command}", "detail": str(exc)}), file=sys.stderr)
        return 2
    except (RZLabError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "command": f"{args.group} {args.command}", "detail": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
