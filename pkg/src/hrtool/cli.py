"""hrtool command line.

Every subcommand prints one JSON document (stdout or --out) carrying
schema_version, and a one-line summary on stderr. Exit codes: 0 success,
1 bad input or failed precondition, 2 budget exhausted (best result so far
is still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .bits import elements
from .config import SCHEMA_VERSION, CapExceeded
from .family import SetFamily
from .io import FamilyFormatError, load_family

EXIT_OK, EXIT_ERROR, EXIT_BUDGET = 0, 1, 2


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _frac_json(x: Fraction) -> str:
    return str(Fraction(x))


def _num(x: float) -> float | None:
    return x if math.isfinite(x) else None


def _fam(F: SetFamily) -> list[list[int]]:
    return F.sets()


# ------------------------------------------------------------ handlers

def cmd_hvalue(a) -> tuple[dict, str, int]:
    from .constructions import h_opt, size_AM

    opt = h_opt(a.n, a.k, a.t, a.s)
    out = {"n": a.n, "k": a.k, "t": a.t, "s": a.s, "value": opt.value,
           "argmax": list(opt.argmax), "exhaustive": opt.exhaustive}
    if a.n >= a.s * a.t:
        out["matching_value"] = size_AM(a.n, a.k, a.t, a.s)
    code = EXIT_OK if opt.exhaustive else EXIT_BUDGET
    return out, f"h({a.n},{a.k},{a.t},{a.s}) = {opt.value} at {list(opt.argmax)}", code


def cmd_nu(a):
    from .matching import nu

    F = load_family(a.family)
    v, wit = nu(F, a.t, cap=a.cap)
    value = "inf" if v == float("inf") else v
    out = {"t": a.t, "nu": value, "capped": a.cap is not None and v == a.cap + 1,
           "witness": [elements(F.members[i]) for i in wit]}
    return out, f"nu = {value}", EXIT_OK


def cmd_cover(a):
    from .matching import covering_number

    F = load_family(a.family)
    tau, T = covering_number(F)
    return {"tau": tau, "cover": elements(T)}, f"tau = {tau}", EXIT_OK


def cmd_spread_check(a):
    from .spread import find_spread_restriction, is_rf_spread, is_spread, spread_lemma_trial

    F = load_family(a.family)
    cert = is_rf_spread(F, a.r, a.f) if a.f is not None else is_spread(F, a.r)
    out = {"r": _frac_json(a.r), "spread": cert.verdict,
           "violator": elements(cert.violator) if cert.violator is not None else None,
           "count": cert.count, "restriction": elements(cert.T) if cert.T is not None else None}
    X, FX = find_spread_restriction(F, a.r)
    out["maximal_restriction"] = {"X": elements(X), "size": len(FX)}
    if a.trials and not cert.verdict:
        out["trial"] = None
    elif a.trials:
        tr = spread_lemma_trial(F, a.beta, a.delta, a.r, a.trials, a.seed)
        out["trial"] = {"estimate": tr.estimate, "stderr": tr.stderr, "trials": tr.trials,
                        "p": tr.p, "bound": _num(tr.bound), "bound_classic": _num(tr.bound_classic),
                        "bound_refined": _num(tr.bound_refined), "consistent": tr.consistent}
    return out, f"{a.r}-spread: {cert.verdict}", EXIT_OK


def cmd_peel(a):
    from .approx import peel, peel_checks

    S = load_family(a.family)
    tr = peel(S, a.t, a.s, a.q, presimplify=not a.no_simplify)
    out = {
        "t": a.t, "s": a.s, "q": a.q, "phi": tr.phi, "ell": tr.ell,
        "chain": {str(i): _fam(T) for i, T in sorted(tr.chain.items(), reverse=True)},
        "layers": {str(i): _fam(W) for i, W in sorted(tr.layers.items(), reverse=True)},
        "tstar": [{"U": elements(U), "f": f} for U, f in tr.tstar_sets],
        "checks": peel_checks(tr, a.k),
    }
    ok = all(out["checks"].values())
    return out, f"peeled {len(S)} sets, phi = {tr.phi}, checks {'ok' if ok else 'FAILED'}", EXIT_OK


def cmd_approximate(a):
    from .approx import DriverConfig, decomposition_checks, iterative_driver
    from .spread import is_spread
    from .family import restrict

    F = load_family(a.family)
    cfg = DriverConfig(C=a.C, C_prime=a.C_prime, max_steps=a.max_steps, q=a.q,
                       t_prime=a.t_prime, l1=a.l1, l2=a.l2, r=a.r)
    res = iterative_driver(F, a.t, a.s, a.sigma, cfg)
    dec = res.decomposition
    out = {
        "t": a.t, "s": a.s, "sigma": a.sigma, "t_prime": res.t_prime,
        "S": _fam(dec.S), "R": _fam(dec.R),
        "pieces": [{"A": elements(A), "size": len(P),
                    "spread": is_spread(restrict(P, A), dec.r).verdict}
                   for A, P in sorted(dec.pieces.items(), key=lambda kv: (kv[0].bit_count(), elements(kv[0])))],
        "r": _frac_json(dec.r), "eta": _frac_json(dec.eta), "theta": _frac_json(dec.theta),
        "remainder_bound": _frac_json(dec.remainder_bound()),
        "checks": decomposition_checks(F, dec),
        "steps": [vars(st) for st in res.steps],
    }
    return out, f"|S| = {len(dec.S)}, |R| = {len(dec.R)}, t' = {res.t_prime}, steps = {len(res.steps)}", EXIT_OK


def cmd_extract(a):
    from .approx import extract_cliques

    S = load_family(a.family)
    ell = a.ell if a.ell is not None else S.max_size - a.t
    cl = extract_cliques(S, a.t, a.s, ell, a.k)
    out = {"t": a.t, "s": a.s, "ell": ell,
           "cliques": None if cl is None else [{"Y": elements(Y), "x": x} for Y, x in cl]}
    msg = "no clique structure found" if cl is None else f"{len(cl)} cliques"
    return out, msg, EXIT_OK


def _result_json(res) -> dict:
    return {"n": res.n, "k": res.k, "t": res.t, "s": res.s, "max_size": res.max_size,
            "witness": _fam(res.witness), "exhaustive": res.exhaustive, "nodes": res.nodes,
            "upper_bound": res.upper_bound}


def cmd_search_max(a):
    from .verify import max_family_exhaustive, verify_extremal_structure

    res = max_family_exhaustive(a.n, a.k, a.t, a.s, a.budget, all_optima=a.all_optima)
    out = _result_json(res)
    if res.optima is not None:
        out["optima"] = [_fam(F) for F in res.optima]
    if a.classify and res.exhaustive:
        out["structure"] = {k: ([{"Y": elements(Y), "x": x} for Y, x in v] if k == "cliques" and v else v)
                            for k, v in verify_extremal_structure(res).items()}
    tag = "exhaustive" if res.exhaustive else "budget exhausted"
    return out, f"max |F| = {res.max_size} ({tag}, {res.nodes} nodes)", EXIT_OK if res.exhaustive else EXIT_BUDGET


def cmd_verify(a):
    from .verify import smallcases

    if a.suite != "smallcases":
        raise ValueError(f"unknown suite {a.suite!r}")
    rows = smallcases(a.budget)
    ok = all(r["ok"] for r in rows)
    msg = "; ".join(f"({r['n']},{r['k']},{r['t']},{r['s']}): {r['max_size']} vs {r['expected']}" for r in rows)
    code = EXIT_OK if ok else (EXIT_BUDGET if not all(r["exhaustive"] for r in rows) else EXIT_ERROR)
    return {"suite": a.suite, "rows": rows, "ok": ok}, msg, code


# ------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--threads", type=int, default=1, help="accepted for compatibility; work is single-threaded")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps")

    p = argparse.ArgumentParser(prog="hrtool", description="Computations on families with bounded t-matching number.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def params(sp, names="nkts"):
        for ch in names:
            sp.add_argument(f"--{ch}", type=int, required=True)

    sp = sub.add_parser("hvalue", parents=[common], help="best clique-union profile value h(n,k,t,s)")
    params(sp)
    sp.set_defaults(func=cmd_hvalue)

    sp = sub.add_parser("nu", parents=[common], help="t-matching number of a family")
    sp.add_argument("--family", required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--cap", type=int, help="stop once nu exceeds this")
    sp.set_defaults(func=cmd_nu)

    sp = sub.add_parser("cover", parents=[common], help="covering number")
    sp.add_argument("--family", required=True)
    sp.set_defaults(func=cmd_cover)

    sp = sub.add_parser("spread-check", parents=[common], help="r-spread certificate")
    sp.add_argument("--family", required=True)
    sp.add_argument("--r", type=_frac, required=True)
    sp.add_argument("--f", type=int, help="check (r,f)-spreadness")
    sp.add_argument("--trials", type=int, default=0, help="Monte Carlo trials for the spread lemma")
    sp.add_argument("--beta", type=int, default=2)
    sp.add_argument("--delta", type=_frac, default=Fraction(1, 4))
    sp.set_defaults(func=cmd_spread_check)

    sp = sub.add_parser("peel", parents=[common], help="peeling chain with checks")
    sp.add_argument("--family", required=True)
    params(sp, "tsq")
    sp.add_argument("--k", type=int, help="also check the decomposition at level k by enumeration")
    sp.add_argument("--no-simplify", action="store_true", help="use the family as T_q without simplifying")
    sp.set_defaults(func=cmd_peel)

    sp = sub.add_parser("approximate", parents=[common], help="iterated spread approximation")
    sp.add_argument("--family", required=True)
    params(sp, "ts")
    sp.add_argument("--sigma", type=int, required=True)
    sp.add_argument("--r", type=_frac)
    sp.add_argument("--q", type=int)
    sp.add_argument("--t-prime", type=int, dest="t_prime")
    sp.add_argument("--l1", type=int)
    sp.add_argument("--l2", type=int)
    sp.add_argument("--C", type=float, default=1.0)
    sp.add_argument("--C-prime", type=float, default=1.0, dest="C_prime")
    sp.add_argument("--max-steps", type=int, dest="max_steps")
    sp.set_defaults(func=cmd_approximate)

    sp = sub.add_parser("extract-cliques", parents=[common], help="recover clique structure")
    sp.add_argument("--family", required=True)
    params(sp, "ts")
    sp.add_argument("--ell", type=int)
    sp.add_argument("--k", type=int)
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("search-max", parents=[common], help="largest family with nu <= s")
    params(sp)
    sp.add_argument("--budget", type=int, help="node budget")
    sp.add_argument("--all-optima", action="store_true")
    sp.add_argument("--classify", action="store_true", help="classify the witness structure")
    sp.set_defaults(func=cmd_search_max)

    sp = sub.add_parser("verify", parents=[common], help="run a verification suite")
    sp.add_argument("--suite", default="smallcases", choices=["smallcases"])
    sp.add_argument("--budget", type=int)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    try:
        out, summary, code = a.func(a)
    except (FamilyFormatError, ValueError, CapExceeded, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    doc = {"schema_version": SCHEMA_VERSION, "command": a.cmd, "result": out}
    text = json.dumps(doc, sort_keys=True, default=str) + "\n"
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{a.cmd}: {summary}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
