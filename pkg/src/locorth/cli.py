"""Command-line front end.

Every command writes a JSON report to stdout (or ``--output``) and a short
human summary to stderr. Exit codes: 0 success, 1 input error,
2 hypothesis-negative result, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import core, example, typicality
from .core import PSD_TOL, HERMITIAN_TOL, TRACE_TOL
from .entanglement import (RoofConfig, component_ef, concurrence_2q, ef_convex_roof,
                           ef_wootters_2q, two_qubit_block, verify_decomposition)
from .errors import InvalidStateError, NotLocallyOrthogonal, ResourceCapError
from .io import PURE_NORM_TOL, load
from .orthogonality import OVERLAP_TOL, find_lo_ordering, overlap_table

EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE, EXIT_CAP = 0, 1, 2, 3


def _tolerances(**extra) -> dict:
    tol = {
        "hermitian": HERMITIAN_TOL,
        "psd": PSD_TOL,
        "trace": TRACE_TOL,
        "pure_norm": PURE_NORM_TOL,
        "overlap": OVERLAP_TOL,
        "max_dim": core.MAX_DIM,
    }
    tol.update(extra)
    return tol


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _roof_config(args) -> RoofConfig:
    return RoofConfig(K=args.K, restarts=args.restarts, seed=args.seed,
                      max_iters=args.max_iters, tol=args.tol, workers=args.workers)


def _need_cut(ef):
    if ef.cut is None:
        raise InvalidStateError("dims_B: a bipartite cut (non-empty dims_A and dims_B) is required")
    return ef.cut


def _party(ef, factor: int) -> str:
    na = len(ef.dims_a)
    return f"A{factor}" if factor < na else f"B{factor - na}"


def cmd_check_lo(args) -> int:
    ef = load(args.path)
    ens = ef.ensemble()
    table = overlap_table(ens)
    cert = find_lo_ordering(ens)
    rows = []
    for i in range(len(ens)):
        for j in range(i + 1, len(ens)):
            rows.append({"pair": [ens.labels[i], ens.labels[j]],
                         "overlaps": [float(x) for x in table[i, j]]})
    report = {
        "command": "check-lo",
        "locally_orthogonal": cert is not None,
        "certificate": None if cert is None else cert.as_dict(),
        "witness_parties": None if cert is None else [
            None if f is None else _party(ef, f) for f in cert.witness_per_element],
        "overlap_table": rows,
        "tolerances": _tolerances(),
    }
    _emit(report, args)
    if cert is None:
        _say("NotLocallyOrthogonal: no ordering with single-factor witnesses exists")
        return EXIT_NEGATIVE
    _say(f"locally orthogonal: ordering {list(cert.ordering)}, "
         f"witnesses {list(cert.witness_per_element)}, uniform {cert.uniform_witness}")
    return EXIT_OK


def cmd_ef(args) -> int:
    ef = load(args.path)
    cut = _need_cut(ef)
    rho = ef.mixture()
    cfg = _roof_config(args)
    out = {"restarts": 0, "seed": cfg.seed, "converged": True}
    method = args.method
    if method == "wootters":
        block = rho if rho.dims == (2, 2) else two_qubit_block(rho, cut)
        if block is None:
            raise InvalidStateError("--method wootters needs a two-qubit (2x2) input")
        value = ef_wootters_2q(block)
        out["concurrence"] = concurrence_2q(block)
    elif method == "auto" and (rho.rank() == 1 or two_qubit_block(rho, cut) is not None):
        value, method = component_ef(rho, cut, cfg)
    else:
        method = "roof"
        res = ef_convex_roof(rho, cut, cfg)
        value = res.value
        out.update(restarts=res.restarts_used, converged=res.converged,
                   best_restart_seed=res.best_restart_seed, ensemble_size=res.ensemble_size)
    out.update({"command": "ef", "value": value, "method": method,
                "config": cfg.as_dict(), "tolerances": _tolerances(objective_tol=cfg.tol)})
    _emit(out, args)
    _say(f"E_f = {value:.6f} bits (method {method})")
    return EXIT_OK


def _decomposition_exit(rep, gap_tol) -> int:
    ok = abs(rep.gap) <= gap_tol
    _say(f"E_f direct {rep.ef_direct:.6f}, predicted {rep.ef_predicted:.6f}, "
         f"gap {rep.gap:.2e} ({'within' if ok else 'EXCEEDS'} {gap_tol:g}); "
         f"E_c prediction {rep.ec_predicted:.6f} assumes: {rep.ec_hypothesis}")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_verify_decomposition(args) -> int:
    ef = load(args.path)
    cut = _need_cut(ef)
    cfg = _roof_config(args)
    try:
        rep = verify_decomposition(ef.ensemble(), cut, cfg)
    except NotLocallyOrthogonal as exc:
        _emit({"command": "verify-decomposition", "locally_orthogonal": False,
               "explanation": f"{exc}; the hypothesis of the decomposition law fails",
               "tolerances": _tolerances(gap=args.gap_tol)}, args)
        raise
    doc = rep.as_dict()
    doc.update(command="verify-decomposition",
               gap_within_tolerance=abs(rep.gap) <= args.gap_tol,
               tolerances=_tolerances(gap=args.gap_tol, objective_tol=cfg.tol))
    _emit(doc, args)
    return _decomposition_exit(rep, args.gap_tol)


def _floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InvalidStateError(f"cannot parse number list {text!r}") from None


def cmd_typicality(args) -> int:
    spec = typicality.TypicalSpec(_floats(args.probs), args.n, args.eps, args.mode,
                                  args.labels.split(",") if args.labels else None)
    rep = typicality.typical_mass(spec, cap=args.lattice_cap)
    if args.exact_distance:
        ens = load(args.exact_distance).ensemble()
        rep.exact_trace_distance = typicality.exact_truncation_distance(spec, ens)
    doc = rep.as_dict()
    doc.update(command="typicality", probs=list(spec.probs), n=spec.n, eps=spec.eps,
               tolerances=_tolerances(lattice_cap=args.lattice_cap,
                                      window_slack=typicality._WINDOW_SLACK))
    _emit(doc, args)
    _say(f"{spec.mode}-typical mass {rep.mass:.12g}, tail {rep.tail_mass:.3e}")
    return EXIT_OK


def cmd_example(args) -> int:
    s = tuple(_floats(t) for t in args.s.split(";")) if args.s else ((1.0, 0.0, 0.0),)
    r = _floats(args.r)
    # without --p, weight the r-mixture uniformly so "--r 1" alone is valid
    p = _floats(args.p) if args.p else tuple(1.0 / len(r) for _ in r)
    params = example.ExampleParams(
        p=p, r=r, q=_floats(args.q), s=s, w=args.w,
        variant=args.variant)
    cfg = _roof_config(args)
    rep = example.run_example_checks(params, cfg)
    doc = rep.as_dict()
    doc.update(command="example",
               params={"p": list(params.p), "r": list(params.r), "q": list(params.q),
                       "s": [list(t) for t in params.s], "w": params.w,
                       "variant": params.variant},
               gap_within_tolerance=abs(rep.gap) <= args.gap_tol,
               tolerances=_tolerances(gap=args.gap_tol, objective_tol=cfg.tol))
    _emit(doc, args)
    return _decomposition_exit(rep, args.gap_tol)


def _add_roof_flags(p, restarts=20):
    p.add_argument("--restarts", type=int, default=restarts)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--K", type=int, default=None, help="decomposition size (default min(r^2, 8r, 24))")
    p.add_argument("--tol", type=float, default=1e-6, help="objective-decrease tolerance")
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--workers", type=int, default=1, help="threads for concurrent restarts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="locorth", description=__doc__.splitlines()[0])
    parser.add_argument("--max-dim", type=int, default=None, help="total dimension cap")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-lo", help="search for a local-orthogonality certificate")
    p.add_argument("path")
    p.add_argument("--output")
    p.set_defaults(func=cmd_check_lo)

    p = sub.add_parser("ef", help="entanglement of formation of the file's mixture")
    p.add_argument("path")
    p.add_argument("--method", choices=("auto", "roof", "wootters"), default="auto")
    p.add_argument("--output")
    _add_roof_flags(p)
    p.set_defaults(func=cmd_ef)

    p = sub.add_parser("verify-decomposition",
                       help="compare E_f of the mixture with the weighted component sum")
    p.add_argument("path")
    p.add_argument("--gap-tol", type=float, default=5e-3)
    p.add_argument("--output")
    _add_roof_flags(p)
    p.set_defaults(func=cmd_verify_decomposition)

    p = sub.add_parser("typicality", help="exact typical-set mass")
    p.add_argument("--probs", required=True)
    p.add_argument("--labels")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--mode", choices=("weak", "strong"), default="strong")
    p.add_argument("--exact-distance", metavar="PATH")
    p.add_argument("--lattice-cap", type=int, default=typicality.LATTICE_CAP)
    p.add_argument("--output")
    p.set_defaults(func=cmd_typicality)

    p = sub.add_parser("example", help="run the checks on the C^3 x C^6 example pair")
    p.add_argument("--w", type=float, default=0.5, help="weight of rho_V in the mixture")
    p.add_argument("--p", default=None, help="weights of the r-mixture (default uniform)")
    p.add_argument("--r", default="1,0")
    p.add_argument("--q", default="1")
    p.add_argument("--s", default="1,0,0", help="triples separated by ';'")
    p.add_argument("--variant", choices=("standard", "cyclic"), default="standard")
    p.add_argument("--gap-tol", type=float, default=5e-3)
    p.add_argument("--output")
    _add_roof_flags(p)
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    old_cap = core.set_max_dim(args.max_dim) if args.max_dim else None
    try:
        return args.func(args)
    except NotLocallyOrthogonal as exc:
        _say(f"NotLocallyOrthogonal: {exc}")
        return EXIT_NEGATIVE
    except ResourceCapError as exc:
        _say(f"resource cap exceeded: {exc}")
        return EXIT_CAP
    except (InvalidStateError, ValueError, OSError) as exc:
        _say(f"input error: {exc}")
        return EXIT_INPUT
    finally:
        if old_cap is not None:
            core.set_max_dim(old_cap)


if __name__ == "__main__":
    sys.exit(main())
