"""Command-line front end: every experiment behind one reproducible surface.

Reports are JSON envelopes {schema, command, config, seed, timestamp,
results} written atomically (temp file + rename); repeated runs with the
same config and seed are byte-identical except for the timestamp.  CSV
side-products (factor tables, per-n outcomes, phase logs, zero lists) are
documented in docs/formats.md.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import random
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from .arith import FactorCache, FactorizationOverflow, PeriodicFunction
from .construction import (
    ConstructionProfile,
    ThinClass,
    Unreachable,
    run_construction,
)
from .density import EmptyWindow, WindowSpec, density_sweep, private_prime_scan
from .ideals import AlgebraicAlpha, PreconditionViolated, ideal_factorize, norm_value
from .structure import (
    RationalShift,
    UnsupportedAlpha,
    coefficients_at_alpha_one,
    decompose,
    detect_pl_form,
    lift_rational,
    nonvanishing_verdict,
)
from .zeros import (
    BoundaryTooCloseToZero,
    Rectangle,
    decomposition_evaluator,
    periodic_series_evaluator,
    winding_number,
    zero_search,
)
from .zeta import (
    DivergesAtOne,
    EXPLORE,
    PoleAtOne,
    PrecisionExhausted,
    PrecisionProfile,
    f_eval,
)

SCHEMA_VERSION = 1

DOMAIN_ERRORS = (
    ThinClass, Unreachable, EmptyWindow, PoleAtOne, DivergesAtOne,
    PrecisionExhausted, FactorizationOverflow, BoundaryTooCloseToZero,
    UnsupportedAlpha, PreconditionViolated,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, domain errors exit 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _parse_values(text):
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if "/" in chunk:
            out.append(Fraction(chunk))
        elif "j" in chunk or "i" in chunk:
            out.append(complex(chunk.replace("i", "j")))
        else:
            out.append(Fraction(chunk) if "." not in chunk else float(chunk))
    return tuple(out)


def _parse_f(args) -> PeriodicFunction:
    values = _parse_values(args.f)
    q = args.q if args.q else len(values)
    if len(values) != q:
        raise ValueError(f"need exactly q={q} coefficient values, got {len(values)}")
    return PeriodicFunction(q, values)


def _format_f(f: PeriodicFunction):
    out = []
    for re, im in f.values:
        if im == 0:
            out.append(str(re.numerator) if re.denominator == 1 else str(re))
        else:
            out.append(str(complex(re, im)))
    return out


def _parse_alpha(args, *, allow_float=False):
    """Returns one of: Fraction (rational), AlgebraicAlpha, float (untyped).

    Untyped floats are accepted only where the arithmetic type does not
    drive a theorem-level claim (eval, zeros)."""
    if getattr(args, "minpoly", None):
        coeffs = tuple(int(c) for c in args.minpoly.split(","))
        if not args.interval:
            raise ValueError("--minpoly requires --interval lo,hi")
        lo, hi = (Fraction(x) for x in args.interval.split(","))
        return AlgebraicAlpha(coeffs, (lo, hi), q_context=args.q or 1)
    text = args.alpha
    if text is None:
        raise ValueError("no alpha given (use --alpha or --minpoly/--interval)")
    if "/" in text:
        frac = Fraction(text)
        if not 0 < frac <= 1:
            raise ValueError("rational alpha must lie in (0, 1]")
        return frac
    if text.strip() in {"1", "1.0"}:
        return Fraction(1)
    value = float(text)
    if not allow_float:
        raise UnsupportedAlpha(
            "this command needs a typed alpha: a/b or --minpoly/--interval"
        )
    if not 0 < value <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    return value


def _alpha_config(alpha):
    if isinstance(alpha, AlgebraicAlpha):
        return {
            "kind": "algebraic",
            "minpoly": list(alpha.minpoly),
            "interval": [str(alpha.interval[0]), str(alpha.interval[1])],
        }
    if isinstance(alpha, Fraction):
        return {"kind": "rational", "value": f"{alpha.numerator}/{alpha.denominator}"}
    return {"kind": "untyped-float", "value": alpha}


def _alpha_real(alpha, digits=17):
    if isinstance(alpha, AlgebraicAlpha):
        return alpha.value(digits)
    if isinstance(alpha, Fraction):
        return float(alpha) if digits <= 17 else alpha
    return alpha


def make_report(command, config, results, seed):
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "seed": seed,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "results": results,
    }


def report_bytes(report) -> bytes:
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()


def write_atomic(path, data: bytes):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(args, report):
    data = report_bytes(report)
    if args.output:
        write_atomic(args.output, data)
    else:
        sys.stdout.write(data.decode())


def _write_csv(path, header, rows):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name)
    with os.fdopen(fd, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    os.replace(tmp, path)


def _cache_from(args):
    path = args.cache or os.environ.get("HURWITZ_CACHE")
    return FactorCache(path) if path else FactorCache()


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args, seed):
    f = _parse_f(args)
    alpha = _parse_alpha(args, allow_float=True)
    digits = args.digits or 15
    prof = PrecisionProfile(max(15, digits), 10.0 ** (-(max(15, digits) - 5)))
    s_parts = (args.sigma, args.t)
    alpha_real = _alpha_real(alpha, max(digits, 17))
    res = f_eval(complex(*s_parts), f, alpha_real, prof)
    config = {
        "sigma": args.sigma, "t": args.t, "alpha": _alpha_config(alpha),
        "f": _format_f(f), "q": f.period, "digits": digits,
    }
    if res.pole_flag:
        results = {"pole": True}
    else:
        results = {
            "value_re": float(res.value.real if isinstance(res.value, complex) else res.value.real),
            "value_im": float(res.value.imag if isinstance(res.value, complex) else res.value.imag),
            "error_bound": res.abs_error_bound,
            "pole": False,
        }
        if digits > 17:
            from mpmath import mp

            results["value_str"] = [mp.nstr(res.value.real, digits), mp.nstr(res.value.imag, digits)]
    return make_report("eval", config, results, seed)


def _series_for_structure(f, alpha):
    if isinstance(alpha, Fraction):
        if alpha == 1:
            return coefficients_at_alpha_one(f), 1
        shift = RationalShift(alpha.numerator, alpha.denominator)
        return lift_rational(f, shift), shift.b
    raise UnsupportedAlpha("structure decisions need a rational alpha")


def cmd_decompose(args, seed):
    f = _parse_f(args)
    alpha = _parse_alpha(args)
    series, prefactor = _series_for_structure(f, alpha)
    dec = decompose(series)
    cert = detect_pl_form(series, args.max_conductor)
    config = {
        "alpha": _alpha_config(alpha), "f": _format_f(f),
        "q": f.period, "max_conductor": args.max_conductor,
    }
    results = {
        "prefactor": prefactor,
        "verified": dec.verified,
        "verification_period": dec.verification_period,
        "terms": [
            {
                "conductor": chi.modulus,
                "character_angles": [str(a) if a is not None else None for a in chi.angles],
                "polynomial": {str(n): c.to_json() for n, c in poly},
            }
            for chi, poly in dec.terms
        ],
        "pl_certificate": {
            "verdict": cert.verdict,
            "proof": cert.proof_kind,
            "obstruction": list(cert.obstruction) if cert.obstruction else None,
            "polynomial": {str(n): c.to_json() for n, c in cert.polynomial_support}
            if cert.verdict == "IsPL" else None,
            "character_modulus": cert.character.modulus if cert.character else None,
            "verification_period": cert.verification_period,
        },
    }
    return make_report("decompose", config, results, seed)


def cmd_classify(args, seed):
    f = _parse_f(args)
    alpha = _parse_alpha(args)
    report = nonvanishing_verdict(f, alpha, zero_scan_tmax=args.tmax)
    config = {
        "alpha": _alpha_config(alpha), "f": _format_f(f),
        "q": f.period, "tmax": args.tmax,
    }
    return make_report("classify", config, report.to_json(), seed)


def cmd_factor_ideals(args, seed):
    alpha = _parse_alpha(args)
    if not isinstance(alpha, AlgebraicAlpha):
        raise UnsupportedAlpha("factor-ideals needs --minpoly/--interval")
    lo, hi = (int(x) for x in args.range.split(".."))
    cache = _cache_from(args)
    rows = []
    for n in range(lo, hi + 1):
        rec = ideal_factorize(alpha, n, cache)
        admissible = " ".join(f"{k.p}^{e}@{k.root}" for k, e in rec.admissible_part)
        rows.append((n, norm_value(alpha, n), admissible, rec.residual_norm))
    config = {
        "alpha": _alpha_config(alpha), "q": args.q or 1,
        "range": [lo, hi],
    }
    if args.csv:
        _write_csv(args.csv, ("n", "norm", "admissible", "residual"), rows)
    results = {"rows": [[n, v, adm, res] for n, v, adm, res in rows]}
    return make_report("factor-ideals", config, results, seed)


def cmd_density(args, seed):
    alpha = _parse_alpha(args)
    if not isinstance(alpha, AlgebraicAlpha):
        raise UnsupportedAlpha("density needs --minpoly/--interval")
    n_list = [int(x) for x in args.N.split(",")]
    theta = Fraction(args.theta)
    cache = _cache_from(args)
    q = args.q or 1
    if args.b is not None:
        w = WindowSpec(n_list[0], theta, q, args.b)
        rep = private_prime_scan(alpha.with_q(q), w, cache=cache)
        results = {"windows": [rep.to_json()]}
        per_n = _per_n_rows([rep])
    else:
        sweep = _run_sweep(alpha, n_list, theta, q, cache, args.threads)
        results = sweep.to_json()
        per_n = _per_n_rows(sweep.reports)
    if args.csv:
        _write_csv(args.csv, ("N", "q", "b", "n", "eligible", "p", "root"), per_n)
    config = {
        "alpha": _alpha_config(alpha), "q": q, "theta": str(theta),
        "N": n_list, "b": args.b, "threads": args.threads,
    }
    return make_report("density", config, results, seed)


def _per_n_rows(reports):
    rows = []
    for rep in reports:
        chosen = dict(rep.eligible)
        for n in rep.window.members():
            key = chosen.get(n)
            rows.append((
                rep.window.N, rep.window.q, rep.window.b, n,
                int(key is not None),
                key.p if key else "", key.root if key is not None else "",
            ))
    return rows


def _sweep_one(job):
    minpoly, interval, q, N, theta_str = job
    alpha = AlgebraicAlpha(minpoly, tuple(Fraction(x) for x in interval), q_context=q)
    sweep = density_sweep(alpha, [N], Fraction(theta_str), q)
    return N, sweep.reports


def _run_sweep(alpha, n_list, theta, q, cache, threads):
    if threads and threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        jobs = [
            (alpha.minpoly, (str(alpha.interval[0]), str(alpha.interval[1])), q, N, str(theta))
            for N in n_list
        ]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = dict(pool.map(_sweep_one, jobs))
        reports = []
        for N in n_list:
            reports.extend(chunks[N])
        from .density import DICKMAN_REFERENCE, SweepReport

        mean_fraction = sum(r.fraction for r in reports) / len(reports)
        pass_fraction = sum(1 for r in reports if r.passed) / len(reports)
        flagged = [(r.window.N, r.window.b) for r in reports if not r.passed]
        return SweepReport(q, theta, reports, mean_fraction, pass_fraction,
                           flagged, DICKMAN_REFERENCE)
    return density_sweep(alpha, n_list, theta, q, cache)


def cmd_construct_phi(args, seed):
    alpha = _parse_alpha(args)
    if not isinstance(alpha, AlgebraicAlpha):
        raise UnsupportedAlpha("construct-phi needs --minpoly/--interval")
    q = args.q or 1
    if args.profile == "desk":
        profile = ConstructionProfile.desk(q)
    elif args.profile == "canonical":
        profile = ConstructionProfile.canonical(q)
    else:
        raise ValueError(f"unknown profile {args.profile!r}")
    if args.n1 or args.digits:
        profile = ConstructionProfile(profile.theta, args.n1 or profile.n1, q,
                                      profile.density_floor, profile.contraction,
                                      profile.min_a_size, profile.delta,
                                      args.digits or profile.digits, profile.name)
    f = _parse_f(args) if args.f else PeriodicFunction(q, tuple([1] * q))
    cache = _cache_from(args)
    report, state, log_rows = run_construction(f, alpha, profile, args.stages, cache)
    if args.phi_csv:
        _write_csv(args.phi_csv, ("p", "root", "phase_re", "phase_im"), log_rows)
    config = {
        "alpha": _alpha_config(alpha), "q": q, "profile": args.profile,
        "stages": args.stages, "n1": profile.n1, "digits": profile.digits,
        "f": _format_f(f),
    }
    return make_report("construct-phi", config, report.to_json(), seed)


def _zero_evaluator(f, alpha):
    if isinstance(alpha, Fraction):
        series, prefactor = _series_for_structure(f, alpha)
        dec = decompose(series)
        return decomposition_evaluator(dec, prefactor)
    return periodic_series_evaluator(f, _alpha_real(alpha))


def cmd_zeros(args, seed):
    f = _parse_f(args)
    alpha = _parse_alpha(args, allow_float=True)
    s1, s2, t1, t2 = (float(x) for x in args.rect.split(","))
    rect = Rectangle(s1, s2, t1, t2)
    F = _zero_evaluator(f, alpha)
    config = {
        "alpha": _alpha_config(alpha), "f": _format_f(f),
        "q": f.period, "rect": [s1, s2, t1, t2], "grid": args.grid,
    }
    if args.grid:
        nx, ny = (int(x) for x in args.grid.lower().replace("×", "x").split("x"))
        search = zero_search(F, rect, (nx, ny))
        results = {
            "cells": [
                {
                    "rect": list(c.rectangle.as_tuple()),
                    "winding": c.winding,
                    "min_boundary_modulus": c.min_boundary_modulus,
                    "samples": c.samples,
                }
                for c in search.cells
            ],
            "zeros": [
                {"sigma": z.real, "t": z.imag, "residual": abs(complex(F(z)))}
                for z in search.zeros
            ],
        }
        if args.csv:
            _write_csv(args.csv, ("sigma", "t", "residual"),
                       [(z.real, z.imag, abs(complex(F(z)))) for z in search.zeros])
    else:
        res = winding_number(F, rect)
        results = {
            "winding": res.winding,
            "min_boundary_modulus": res.min_boundary_modulus,
            "samples": res.samples,
        }
    return make_report("zeros", config, results, seed)


def cmd_verify(args, seed):
    """Recompute a random sample of a report's rows (default 1%, at least
    one row) and fail loudly on any mismatch."""
    payload = json.loads(Path(args.report).read_text())
    rng = random.Random(seed)
    command = payload.get("command")
    config = payload.get("config", {})
    results = payload.get("results", {})
    checked, mismatches = 0, []

    def sample(rows):
        k = max(1, int(len(rows) * args.fraction))
        return rng.sample(list(rows), min(k, len(rows)))

    if command == "factor-ideals":
        alpha = AlgebraicAlpha(tuple(config["alpha"]["minpoly"]),
                               tuple(Fraction(x) for x in config["alpha"]["interval"]),
                               q_context=config.get("q", 1))
        for row in sample(results["rows"]):
            n, norm, adm, residual = row
            rec = ideal_factorize(alpha, n)
            expect = " ".join(f"{k.p}^{e}@{k.root}" for k, e in rec.admissible_part)
            checked += 1
            if norm_value(alpha, n) != norm or expect != adm or rec.residual_norm != residual:
                mismatches.append(n)
    elif command == "density":
        alpha = AlgebraicAlpha(tuple(config["alpha"]["minpoly"]),
                               tuple(Fraction(x) for x in config["alpha"]["interval"]),
                               q_context=config.get("q", 1))
        windows = results.get("windows", [])
        for wj in sample(windows):
            w = WindowSpec(wj["N"], Fraction(config["theta"]), wj["q"], wj["b"])
            rep = private_prime_scan(alpha.with_q(wj["q"]), w)
            checked += 1
            if [[n, k.p, k.root] for n, k in rep.eligible] != wj["eligible"]:
                mismatches.append((wj["N"], wj["b"]))
    elif command == "eval":
        f = PeriodicFunction(config["q"], _parse_values(",".join(config["f"])))
        alpha_cfg = config["alpha"]
        if alpha_cfg["kind"] == "rational":
            alpha = float(Fraction(alpha_cfg["value"]))
        elif alpha_cfg["kind"] == "algebraic":
            alpha = AlgebraicAlpha(tuple(alpha_cfg["minpoly"]),
                                   tuple(Fraction(x) for x in alpha_cfg["interval"])).value(17)
        else:
            alpha = alpha_cfg["value"]
        res = f_eval(complex(config["sigma"], config["t"]), f, alpha, EXPLORE)
        checked += 1
        if results.get("pole"):
            if not res.pole_flag:
                mismatches.append("pole")
        elif abs(complex(res.value) - complex(results["value_re"], results["value_im"])) > 1e-9:
            mismatches.append("value")
    elif command == "zeros":
        f = PeriodicFunction(config["q"], _parse_values(",".join(config["f"])))
        alpha_cfg = config["alpha"]
        if alpha_cfg["kind"] == "rational":
            alpha = Fraction(alpha_cfg["value"])
        elif alpha_cfg["kind"] == "algebraic":
            alpha = AlgebraicAlpha(tuple(alpha_cfg["minpoly"]),
                                   tuple(Fraction(x) for x in alpha_cfg["interval"]))
        else:
            alpha = alpha_cfg["value"]
        F = _zero_evaluator(f, alpha)
        for zj in sample(results.get("zeros", [])):
            checked += 1
            if abs(complex(F(complex(zj["sigma"], zj["t"])))) > 1e-7:
                mismatches.append([zj["sigma"], zj["t"]])
    elif command == "construct-phi":
        # phases must be unimodular; spot-check the stage log consistency
        for stage in sample(payload["results"]["stages"]):
            checked += 1
            if not stage["induction_ok"]:
                mismatches.append(stage["stage"])
    elif command in ("decompose", "classify"):
        ns = argparse.Namespace(
            alpha=None, minpoly=None, interval=None, q=config["q"],
            f=",".join(config["f"]), max_conductor=config.get("max_conductor"),
            tmax=config.get("tmax", 30.0),
        )
        if config["alpha"]["kind"] == "rational":
            ns.alpha = config["alpha"]["value"]
        else:
            ns.minpoly = ",".join(str(c) for c in config["alpha"]["minpoly"])
            ns.interval = ",".join(config["alpha"]["interval"])
        rebuilt = (cmd_decompose if command == "decompose" else cmd_classify)(ns, seed)
        checked += 1
        if json.dumps(rebuilt["results"], sort_keys=True) != json.dumps(results, sort_keys=True):
            mismatches.append("results")
    else:
        raise ValueError(f"verify does not support command {command!r}")

    results = {"checked": checked, "mismatches": mismatches, "ok": not mismatches}
    rep = make_report("verify", {"report": str(args.report), "fraction": args.fraction},
                      results, seed)
    if mismatches:
        _emit(args, rep)
        sys.exit(2)
    return rep


# ---------------------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="ghzeta", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, alpha=True, coeffs=True):
        p.add_argument("--output", help="write the JSON report here (default stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cache", help="factorization cache CSV (or HURWITZ_CACHE)")
        p.add_argument("--q", type=int, default=None, help="coefficient period")
        if alpha:
            p.add_argument("--alpha", help="rational a/b, 1, or a decimal (where allowed)")
            p.add_argument("--minpoly", help="algebraic alpha: c_d,...,c_0")
            p.add_argument("--interval", help="isolating interval lo,hi")
        if coeffs:
            p.add_argument("--f", help="comma-separated period values, e.g. 1,-1")

    p = sub.add_parser("eval", help="evaluate F(sigma+it, f, alpha)")
    common(p)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--digits", type=int, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("decompose", help="L-function decomposition + P*L certificate")
    common(p)
    p.add_argument("--max-conductor", type=int, default=None)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("classify", help="zero/nonvanishing verdict for F")
    common(p)
    p.add_argument("--tmax", type=float, default=30.0, help="t depth of the P zero scan")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("factor-ideals", help="ideal factorizations over an n range")
    common(p, coeffs=False)
    p.add_argument("--range", required=True, help="N1..N2")
    p.add_argument("--csv", help="also write CSV rows here")
    p.set_defaults(func=cmd_factor_ideals)

    p = sub.add_parser("density", help="private-prime window scans")
    common(p, coeffs=False)
    p.add_argument("--theta", required=True, help="window ratio, e.g. 1/1000000")
    p.add_argument("--N", required=True, help="comma-separated window starts")
    p.add_argument("--b", type=int, default=None, help="single residue class")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--csv", help="per-n outcome CSV")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("construct-phi", help="run the phase construction")
    common(p)
    p.add_argument("--profile", default="desk", choices=["desk", "canonical"])
    p.add_argument("--stages", type=int, default=1)
    p.add_argument("--n1", type=int, default=None, help="override the profile N1")
    p.add_argument("--digits", type=int, default=None)
    p.add_argument("--phi-csv", help="write the phase log CSV here")
    p.set_defaults(func=cmd_construct_phi)

    p = sub.add_parser("zeros", help="winding-number zero location")
    common(p)
    p.add_argument("--rect", required=True, help="sigma1,sigma2,t1,t2")
    p.add_argument("--grid", help="cells as AxB, e.g. 4x16")
    p.add_argument("--csv", help="zero list CSV")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("verify", help="recompute a sample of a report's rows")
    p.add_argument("report")
    p.add_argument("--fraction", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="write the verification report here")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = getattr(args, "seed", 0)
    try:
        report = args.func(args, seed)
    except DOMAIN_ERRORS as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    _emit(args, report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
