"""Command-line front end.

Subcommands: derive, gaps, spectrum, verify, multidim.  Exit codes are 0 on
success, 1 when a property or disjointness check fails, 2 on usage and parse
errors.  Reports are deterministic JSON; wall-clock timings are only added
with ``--timings``.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from itertools import product
from typing import Sequence

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# helpers


def _fraction(text, what: str) -> Fraction:
    from .diffpoly import to_fraction

    try:
        if isinstance(text, str):
            return Fraction(text.strip())
        return to_fraction(text)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ConfigError(f"{what}: cannot read {text!r} as a number") from None


def _range(text: str, what: str) -> tuple[str, str]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"{what}: expected lo:hi, got {text!r}")
    return parts[0].strip(), parts[1].strip()


def _box(text: str) -> list:
    return [list(_range(p, "--lambda-box")) for p in text.split(",") if p.strip()]


def _emit(report: dict, path: str | None, stream=None) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)


def _header(command: str) -> dict:
    return {"tool": "specgap", "version": __version__, "command": command}


# ---------------------------------------------------------------------------
# derive


def cmd_derive(args) -> int:
    from .diffpoly import expand_grouped, pretty, v_to_potential
    from .ladder import compute_F

    if args.N is None or args.N < 1:
        raise ConfigError("derive needs --N >= 1")
    F = compute_F(args.N)
    v_form = pretty(F)
    V_form = pretty(v_to_potential(F))
    if args.json:
        rep = _header("derive")
        rep.update({"N": args.N, "vForm": v_form, "VForm": V_form,
                    "VFormExpanded": pretty(expand_grouped(v_to_potential(F)))})
        _emit(rep, args.json)
    else:
        sys.stdout.write(f"F_{args.N} (v-form):\n{v_form}\nF_{args.N} (V-form):\n{V_form}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# gaps


DEFAULTS = {
    "potential": None,
    "N": 2,
    "a0Family": None,
    "eRange": None,
    "eStep": "1/100",
    "lambdaBox": None,
    "tol": "1/1000000",
    "oracle": {"L": None, "M": 4000, "k": 8},
    "seed": 0,
    "searchBudget": 400,
    "searchGrid": 7,
    "extendBelow": False,
}


def load_config(args) -> dict:
    """Merge defaults, the ``--config`` file and command-line overrides into a normalized RunConfig."""
    cfg = json.loads(json.dumps(DEFAULTS))
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for key, val in raw.items():
            if key == "oracle":
                if not isinstance(val, dict) or set(val) - {"L", "M", "k"}:
                    raise ConfigError("oracle must be an object with keys L, M, k")
                cfg["oracle"].update(val)
            else:
                cfg[key] = val
    overrides = {
        "potential": args.potential,
        "N": args.N,
        "a0Family": args.a0,
        "eRange": list(_range(args.e_range, "--e-range")) if args.e_range else None,
        "eStep": args.e_step,
        "lambdaBox": _box(args.lambda_box) if args.lambda_box else None,
        "tol": args.tol,
        "seed": args.seed,
        "searchBudget": args.search_budget,
        "searchGrid": args.search_grid,
    }
    for key, val in overrides.items():
        if val is not None:
            cfg[key] = val
    if args.extend_below:
        cfg["extendBelow"] = True
    for key, val in (("L", args.L), ("M", args.grid), ("k", args.count)):
        if val is not None:
            cfg["oracle"][key] = val
    return normalize_config(cfg)


def normalize_config(cfg: dict) -> dict:
    from .parse import parse_param_poly, parse_poly1

    for key in ("potential", "a0Family", "eRange"):
        if cfg.get(key) is None:
            raise ConfigError(f"missing required setting {key!r}")
    if not isinstance(cfg["N"], int) or cfg["N"] < 1:
        raise ConfigError("N must be an integer >= 1")
    parse_poly1(cfg["potential"])
    fam = parse_param_poly(cfg["a0Family"])
    er = cfg["eRange"]
    if not isinstance(er, (list, tuple)) or len(er) != 2:
        raise ConfigError("eRange must be [lo, hi]")
    lo, hi = _fraction(er[0], "eRange"), _fraction(er[1], "eRange")
    if hi <= lo:
        raise ConfigError("eRange needs lo < hi")
    step = _fraction(cfg["eStep"], "eStep")
    tol = _fraction(cfg["tol"], "tol")
    if step <= 0 or tol <= 0:
        raise ConfigError("eStep and tol must be positive")
    box = cfg["lambdaBox"]
    if box is None:
        box = [["-2", "2"]] * fam.nparams
    if len(box) == 1 and fam.nparams > 1:
        box = list(box) * fam.nparams
    if len(box) != fam.nparams:
        raise ConfigError(f"lambdaBox has {len(box)} entries, family has {fam.nparams} parameters")
    nbox = []
    for b in box:
        if len(b) != 2:
            raise ConfigError("each lambdaBox entry must be [lo, hi]")
        blo, bhi = _fraction(b[0], "lambdaBox"), _fraction(b[1], "lambdaBox")
        if bhi < blo:
            raise ConfigError("lambdaBox entry has hi < lo")
        nbox.append([str(blo), str(bhi)])
    orc = cfg["oracle"]
    if orc.get("L") is not None and not (isinstance(orc["L"], (int, float)) and orc["L"] > 0):
        raise ConfigError("oracle.L must be positive")
    if not isinstance(orc.get("M"), int) or orc["M"] < 100 or orc["M"] % 2:
        raise ConfigError("oracle.M must be an even integer >= 100")
    if not isinstance(orc.get("k"), int) or orc["k"] < 1:
        raise ConfigError("oracle.k must be a positive integer")
    for key in ("seed", "searchBudget", "searchGrid"):
        if not isinstance(cfg[key], int) or cfg[key] < 0:
            raise ConfigError(f"{key} must be a non-negative integer")
    return {
        "potential": cfg["potential"],
        "N": cfg["N"],
        "a0Family": cfg["a0Family"],
        "eRange": [str(lo), str(hi)],
        "eStep": str(step),
        "lambdaBox": nbox,
        "tol": str(tol),
        "oracle": {"L": None if orc.get("L") is None else float(orc["L"]), "M": orc["M"], "k": orc["k"]},
        "seed": cfg["seed"],
        "searchBudget": cfg["searchBudget"],
        "searchGrid": cfg["searchGrid"],
        "extendBelow": bool(cfg["extendBelow"]),
    }


def run_gaps(cfg: dict, workers: int = 1, timings: bool = False, check: bool = False) -> tuple[dict, int]:
    from .gapcert import build_F, certify_point, disjoint_from, scanGaps
    from .oracle import eigensolveFD
    from .parse import parse_param_poly, parse_poly1

    t0 = time.perf_counter()
    V = parse_poly1(cfg["potential"])
    fam = parse_param_poly(cfg["a0Family"])
    F = build_F(cfg["N"], V, fam)
    t1 = time.perf_counter()
    gaps = scanGaps(
        F,
        [Fraction(t) for t in cfg["eRange"]],
        Fraction(cfg["eStep"]),
        [tuple(Fraction(t) for t in b) for b in cfg["lambdaBox"]],
        tol=Fraction(cfg["tol"]),
        budget=cfg["searchBudget"],
        seed=cfg["seed"],
        grid=cfg["searchGrid"],
        workers=workers,
        extend_below=cfg["extendBelow"],
        N=cfg["N"],
        family=cfg["a0Family"],
    )
    t2 = time.perf_counter()
    orc = cfg["oracle"]
    spec = eigensolveFD(V, orc["L"], orc["M"], orc["k"])
    spec.potential = cfg["potential"]
    disjoint = disjoint_from(gaps, spec.values, spec.conv)
    t3 = time.perf_counter()
    rep = _header("gaps")
    rep.update({
        "config": cfg,
        "potential": cfg["potential"],
        "N": cfg["N"],
        "family": cfg["a0Family"],
        "F": str(F),
        "gaps": [g.to_json() for g in gaps],
        "oracleSpectrum": [e.to_json() for e in spec.eigenvalues],
        "oracle": {"method": spec.method, "L": spec.L, "M": spec.M},
        "disjoint": disjoint,
    })
    code = EXIT_OK if disjoint else EXIT_FAIL
    if check:
        bad = sum(1 for g in gaps for w in g.witnesses if certify_point(F, w.E, w.lam) is None)
        rep["witnessesVerified"] = bad == 0
        if bad:
            code = EXIT_FAIL
    if timings:
        rep["timings"] = {"derive": t1 - t0, "scan": t2 - t1, "oracle": t3 - t2, "workers": workers}
    return rep, code


def cmd_gaps(args) -> int:
    cfg = load_config(args)
    rep, code = run_gaps(cfg, workers=args.workers, timings=args.timings, check=args.check)
    _emit(rep, args.json)
    if args.json:
        sys.stdout.write(f"{len(rep['gaps'])} gap(s), disjoint={str(rep['disjoint']).lower()}\n")
    return code


# ---------------------------------------------------------------------------
# spectrum


def cmd_spectrum(args) -> int:
    from .oracle import eigensolveFD, eigensolveShoot
    from .parse import parse_poly1

    if not args.potential:
        raise ConfigError("spectrum needs --potential")
    V = parse_poly1(args.potential)
    k = args.count or 6
    if args.method == "fd":
        spec = eigensolveFD(V, args.L, args.grid or 4000, k)
    else:
        spec = eigensolveShoot(V, args.L, k, args.grid or 8000)
    spec.potential = args.potential
    rep = _header("spectrum")
    rep.update(spec.to_json())
    _emit(rep, args.json)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _verify_kernel(args) -> list:
    from .ladder import kernel_scan

    max_n = args.max_N or 4
    checks = [{"name": f"kernel N={N} n={n}", "passed": ok} for N, n, ok in kernel_scan(max_n, workers=args.workers)]
    if args.extended:
        top = max(args.extended, max_n)
        extra = kernel_scan(top, ns=lambda N: [n for n in (N - 1, N) if n >= 1], workers=args.workers)
        checks += [{"name": f"kernel N={N} n={n}", "passed": ok} for N, n, ok in extra if N > max_n]
    return checks


def _verify_words(args) -> list:
    from .words import alpha_table, direct_kernel, word_expansion

    max_n = args.max_N or 4
    checks = []
    for N in range(1, max_n + 1):
        for n in range(1, N + 1):
            we = word_expansion(N, n)
            checks.append({"name": f"words N={N} n={n}",
                           "passed": we.consistent and we.value == direct_kernel(N, n)})
        rows = alpha_table(max_n, N)
        checks.append({"name": f"alpha N={N}", "passed": all(r["agree"] for r in rows)})
    return checks


DIVERGENCE_CASES = (
    (2, "1", "1/2*x^2", 1.3, (-3.0, 3.0)),
    (4, "x^3-x", "x^4", 0.7, (-1.5, 1.5)),
)


def _verify_divergence(args) -> list:
    from .oracle import divergenceCheck
    from .parse import parse_poly1

    h = args.h or 1e-3
    checks = []
    for N, a0, V, E, rng in DIVERGENCE_CASES:
        r1 = divergenceCheck(N, parse_poly1(a0), parse_poly1(V), E, rng, h)
        r2 = divergenceCheck(N, parse_poly1(a0), parse_poly1(V), E, rng, h / 2)
        ratio = r1.relative / r2.relative if r2.relative > 0 else math.inf
        checks.append({"name": f"divergence N={N} a0={a0} V={V} E={E}",
                       "passed": r1.relative <= 1e-5 and 3.0 <= ratio <= 5.0,
                       "relative": r1.relative, "residual": r1.residual, "halvingRatio": ratio})
    return checks


def _verify_multidim(args) -> list:
    import random

    from .multidim import H0Family, buildF2d, buildH0, checkConstraints, constraintNullspace, PolyD

    d = args.d or 3
    if d < 3:
        raise ConfigError("verify multidim needs --d >= 3")
    res = constraintNullspace(d, 3)
    want = H0Family.parameter_count(d)
    checks = [{"name": f"nullspace d={d}", "passed": res.dimension == want and res.max_basis_degree <= 2
               and res.all_satisfy, "dimension": res.dimension, "expected": want}]
    rng = random.Random(args.seed or 0)
    X = [PolyD.var(mu, d) for mu in range(d)]
    V = PolyD({}, d)
    for mu in range(d):
        V = V + (X[mu] * X[mu] - 1) ** 2
    V = V + X[0] * X[1 % d] * Fraction(1, 3)
    ok_h = ok_f = True
    for _ in range(20):
        fam = H0Family.from_vector(d, [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(want)])
        ok_h &= checkConstraints(buildH0(fam))
        ok_f &= buildF2d(V, fam) == buildF2d(V, fam, "general")
    checks.append({"name": f"family constraints d={d}", "passed": ok_h})
    checks.append({"name": f"F2 paths agree d={d}", "passed": ok_f})
    return checks


VERIFIERS = {
    "kernel": _verify_kernel,
    "words": _verify_words,
    "divergence": _verify_divergence,
    "multidim": _verify_multidim,
}


def cmd_verify(args) -> int:
    checks = VERIFIERS[args.what](args)
    passed = all(c["passed"] for c in checks)
    for c in checks:
        sys.stdout.write(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}\n")
    sys.stdout.write(f"{args.what}: {'pass' if passed else 'FAIL'} ({len(checks)} checks)\n")
    if args.json:
        rep = _header("verify")
        rep.update({"what": args.what, "passed": passed, "checks": checks})
        _emit(rep, args.json)
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# multidim


D2_CASES = (
    ("1/2*x1^2 + 1/2*x2^2", ("x1", "x2"), 1.0),
    ("1/2*x1^2 + 1/2*x2^2", ("1", "0"), 0.7),
    ("1/2*x1^2 + 1/2*x2^2", ("x2", "-x1"), 2.0),
    ("x1^4 + x2^4 - 2*x1^2 + x1*x2", ("x1^2 - x2^2 + 3*x1", "2*x1*x2 + 3*x2"), 0.3),
    ("1/2*x1^2 + 1/2*x2^2", ("x1", "x2"), -1.0),
)


def _default_guesses(V, d: int) -> list:
    out = []
    for pt in product((-0.8, 0.1, 0.8), repeat=d):
        out.append(tuple(pt) + (float(V.evalf(*pt)),))
    return out


def _parse_guesses(text: str, d: int) -> list:
    out = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        vals = [float(t) for t in chunk.split(",")]
        if len(vals) != d + 1:
            raise ConfigError(f"each guess needs {d + 1} numbers (x1..x{d}, E)")
        out.append(tuple(vals))
    return out


def cmd_multidim(args) -> int:
    from .multidim import H0Family, constraintNullspace, criticalReduction, nullResult2d
    from .parse import parse_polyd

    d = args.d or 3
    if d < 3:
        raise ConfigError("multidim needs --d >= 3 (d = 2 integrals are always reported)")
    text = args.potential or " + ".join(f"(x{j}^2 - 1)^2" for j in range(1, d + 1))
    V = parse_polyd(text, d)
    ns = constraintNullspace(d, args.max_deg or 3)
    guesses = _parse_guesses(args.guesses, d) if args.guesses else _default_guesses(V, d)
    crit = criticalReduction(V, guesses)
    seen = []
    for c in crit:
        if c.verified and not any(max(abs(a - b) for a, b in zip(c.x + (c.E,), s.x + (s.E,))) < 1e-6 for s in seen):
            seen.append(c)
    failures = [c for c in crit if not c.converged]
    d2 = []
    for vt, ht, E in D2_CASES:
        V2 = parse_polyd(vt, 2)
        h = [parse_polyd(t, 2) for t in ht]
        val, err = nullResult2d(V2, h, E)
        d2.append({"potential": vt, "h": list(ht), "E": E, "integral": val, "errorEstimate": err,
                   "passed": abs(val) <= 1e-6})
    rep = _header("multidim")
    rep.update({
        "d": d,
        "potential": text,
        "nullspaceDim": ns.dimension,
        "expectedDim": H0Family.parameter_count(d),
        "nullspaceMaxDegree": ns.max_basis_degree,
        "criticalPoints": [_round_cp(c) for c in sorted(seen, key=lambda c: (round(c.E, 9),) + tuple(round(t, 9) for t in c.x))],
        "unconverged": len(failures),
        "d2IntegralChecks": d2,
    })
    _emit(rep, args.json)
    ok = (ns.dimension == rep["expectedDim"] and ns.max_basis_degree <= 2 and all(c["passed"] for c in d2)
          and all(c.verified for c in seen))
    return EXIT_OK if ok else EXIT_FAIL


def _round_cp(c) -> dict:
    # residuals near machine zero vary with guesses; snap coordinates for a stable report
    out = c.to_json()
    out["x"] = [0.0 if abs(t) < 1e-12 else round(t, 12) for t in out["x"]]
    out["E"] = 0.0 if abs(out["E"]) < 1e-12 else round(out["E"], 12)
    return out


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="specgap", description="Spectral gap certificates for 1D Schrodinger operators.")
    p.add_argument("--version", action="version", version=f"specgap {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--json", metavar="PATH", help="write the JSON report to PATH")
    out.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="worker processes (default: cores)")

    d = sub.add_parser("derive", parents=[out], help="print F_N in v-form and V-form")
    d.add_argument("--N", type=int, required=True)
    d.set_defaults(func=cmd_derive)

    g = sub.add_parser("gaps", parents=[out], help="certify eigenvalue-free intervals")
    g.add_argument("--config", help="RunConfig JSON file; flags override it")
    g.add_argument("--potential")
    g.add_argument("--N", type=int)
    g.add_argument("--a0", help="test-function family with parameters l1..l9")
    g.add_argument("--e-range", help="lo:hi")
    g.add_argument("--e-step")
    g.add_argument("--lambda-box", help="lo:hi[,lo:hi...]; one entry applies to all parameters")
    g.add_argument("--tol", help="boundary refinement tolerance")
    g.add_argument("--extend-below", action="store_true", help="allow a gap reaching -infinity")
    g.add_argument("--L", type=float, help="oracle half-width")
    g.add_argument("--grid", type=int, help="oracle grid size M")
    g.add_argument("--count", type=int, help="number of oracle eigenvalues")
    g.add_argument("--seed", type=int)
    g.add_argument("--search-budget", type=int)
    g.add_argument("--search-grid", type=int)
    g.add_argument("--check", action="store_true", help="also re-verify every stored witness exactly")
    g.add_argument("--timings", action="store_true", help="add wall-clock timings (not deterministic)")
    g.set_defaults(func=cmd_gaps)

    s = sub.add_parser("spectrum", parents=[out], help="oracle eigenvalues")
    s.add_argument("--potential")
    s.add_argument("--L", type=float)
    s.add_argument("--grid", type=int, help="grid size M")
    s.add_argument("--count", type=int)
    s.add_argument("--method", choices=("fd", "shoot"), default="fd")
    s.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("verify", parents=[out], help="run a property suite")
    v.add_argument("what", choices=sorted(VERIFIERS))
    v.add_argument("--max-N", dest="max_N", type=int)
    v.add_argument("--extended", type=int, metavar="N", help="kernel: also n in {N-1, N} up to this N")
    v.add_argument("--d", type=int)
    v.add_argument("--h", type=float)
    v.add_argument("--seed", type=int)
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("multidim", parents=[out], help="d-dimensional N = 2 report")
    m.add_argument("--d", type=int)
    m.add_argument("--potential", help="polynomial in x1..xd")
    m.add_argument("--max-deg", type=int)
    m.add_argument("--guesses", help="x1,..,xd,E;...")
    m.set_defaults(func=cmd_multidim)
    return p


# flags whose values may start with "-" (ranges, negative numbers, polynomials)
_SIGNED = {"--e-range", "--lambda-box", "--e-step", "--tol", "--potential", "--a0", "--guesses"}


def _join_signed(argv: Sequence[str]) -> list[str]:
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _SIGNED:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    from .diffpoly import SubstitutionError
    from .parse import PolyParseError

    parser = build_parser()
    args = parser.parse_args(_join_signed(sys.argv[1:] if argv is None else argv))
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be >= 1")
    try:
        return args.func(args)
    except PolyParseError as exc:
        sys.stderr.write(exc.diagnostic() + "\n")
        return EXIT_USAGE
    except (ConfigError, SubstitutionError) as exc:
        sys.stderr.write(f"specgap: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
