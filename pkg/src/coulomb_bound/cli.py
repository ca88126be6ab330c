"""Command-line interface: ``coulomb-bound <command> [options]``.

Every command prints one JSON document (or CSV rows) and exits with 0 when
all asserted checks pass, 1 when a check fails and 2 on invalid input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import bounds, functionals, oracle
from .densities import (Exponential, density_from_descriptor, dilate, make_exponential,
                        scale_tf, to_grid)
from .exceptions import DomainError
from .mu_model import Uniform, parse_mu_spec

__all__ = ["main", "build_parser"]

REFERENCE_DECIMALS = {"C1": 1.4508, "C2": 0.2382, "C3": 1.1781, "c_D": 0.7386,
                  "D_mu": 0.6, "M1": None, "M2": None}
EXPONENTIAL_SWEEP = [10.0 ** k for k in range(1, 7)]
TF_SWEEP = [1, 2, 3, 5, 8, 12, 18, 27, 38, 50]
EXPONENT_TOL = 1e-3
INVARIANCE_TOL = 1e-6


def _plain(x):
    """Convert numpy scalars and arrays into JSON-native values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def _load_json_arg(text: str, what: str):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{what}: invalid JSON at line {exc.lineno} column {exc.colno}: "
                          f"{exc.msg}") from None


def _parse_grid(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--grid expects n,rmin,rmax")
    try:
        return int(parts[0]), float(parts[1]), float(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError("--grid expects n,rmin,rmax") from None


def _u64(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _density(args, default=None):
    if args.density is None:
        if default is None:
            raise DomainError("--density is required")
        rho = default
    else:
        rho = density_from_descriptor(_load_json_arg(args.density, "--density"))
    if getattr(args, "dilate", None) is not None:
        rho = dilate(rho, args.dilate)
    if getattr(args, "grid", None) is not None:
        n, r_min, r_max = args.grid
        rho = to_grid(rho, n, r_min, r_max)
    return rho


def _threads(args):
    if args.threads is not None:
        return args.threads
    env = os.environ.get("COULOMB_BOUND_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError("COULOMB_BOUND_THREADS must be an integer") from None
    return 1


def _fit_exponent(x, y):
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


# ---- commands: each returns (result dict, csv rows, ok) ----

def cmd_constants(args):
    mu = parse_mu_spec(args.mu)
    mc = mu.constants
    rows = []
    if isinstance(mu, Uniform):
        tc = bounds.theorem_constants()
        forms = dict(tc.provenance)
        values = {"C1": tc.C1, "C2": tc.C2, "C3": tc.C3, "c_D": bounds.C_DIRAC}
    else:
        tc = bounds.constants_from_mu(mc)
        forms = {"C1": "3 M1^(1/3) D^(2/3) / 2^(2/3)",
                 "C2": "M2 D^(5/6) / (2 M1)^(5/6) sqrt(2 pi^2)",
                 "C3": "2 pi^2 D / (8 M1)", "c_D": "(3/4) (3/pi)^(1/3)"}
        values = {"C1": tc.C1, "C2": tc.C2, "C3": tc.C3, "c_D": bounds.C_DIRAC}
    forms.update({"D_mu": "4 pi int t mu(t) m(t) dt", "M1": "(2 pi/3) int |z|^2 mu",
                  "M2": "(int |z|^2 R(|z|)^2)^(1/2)"})
    values.update({"D_mu": mc.D_mu, "M1": mc.M1, "M2": mc.M2})
    uniform = isinstance(mu, Uniform)
    for name, value in values.items():
        rows.append({"name": name, "closed_form": forms[name], "value": value,
                     "reference": REFERENCE_DECIMALS[name] if uniform else None})
    result = {"mu": mu.descriptor(), "constants": rows, "objective": mc.objective}
    return result, rows, True


def cmd_functionals(args):
    rho = _density(args)
    rep = functionals.functional_report(rho)
    d = rep.to_dict()
    d["density"] = rho.descriptor()
    rows = [{"name": k, "value": v} for k, v in rep.to_dict().items()]
    return d, rows, True


def cmd_bound(args):
    rho = _density(args)
    L = functionals.l43(rho)
    K = functionals.k_fourier(rho)
    if args.optimize and args.alpha is not None:
        raise DomainError("give either --alpha or --optimize, not both")
    if args.optimize:
        _, b = bounds.optimize_alpha(L, K, args.e)
    else:
        b = bounds.theorem_bound(L, K, args.e, 0.5 if args.alpha is None else args.alpha)
    d = b.to_dict()
    rows = [{"name": f"term{i + 1}", "value": t} for i, t in enumerate(b.terms)]
    rows += [{"name": "total", "value": b.total}, {"name": "alpha", "value": b.alpha}]
    rows += [{"name": k, "value": v} for k, v in b.comparisons.items()]
    return d, rows, True


def _orbital(spec):
    kind, _, val = spec.partition(":")
    try:
        v = float(val)
    except ValueError:
        raise DomainError(f"--orbital expects exp:c or gauss:s, got {spec!r}") from None
    return kind, v


def cmd_oracle_product(args):
    kind, v = _orbital(args.orbital)
    N = int(args.N if args.N is not None else 2)
    if kind == "exp":
        state = oracle.ProductState.exponential(v, N)
    elif kind == "gauss":
        state = oracle.ProductState.gaussian(v, N)
    else:
        raise DomainError(f"unknown orbital kind {kind!r}")
    chk = oracle.check_theorem(state, args.e)
    d = chk.to_dict()
    rows = [{"name": k, "value": v} for k, v in d.items() if k != "terms"]
    return d, rows, chk.holds


def cmd_oracle_onsager(args):
    n = args.points
    seed = args.seed
    rho = _density(args, default=make_exponential(float(n), 1.0))
    mu = parse_mu_spec(args.mu)
    smearing = oracle.FixedRadius(args.r0) if args.r0 is not None else \
        oracle.LambdaRecipe(args.lam if args.lam is not None else 1.0)
    V = functionals.radial_potential(rho)
    Drr = functionals.direct_energy(rho, rho, with_error=True)
    reports, rows = [], []
    for k in range(args.configs):
        cfg = oracle.random_config(n, seed + k, args.radius)
        rep = oracle.onsager_margin(cfg, rho, mu, smearing, potential=V, D_rho=Drr)
        reports.append(rep)
        rows.append({"seed": seed + k, "lhs": rep.lhs, "rhs": rep.rhs, "margin": rep.margin,
                     "budget": rep.budget, "holds": rep.holds})
    ok = all(r.holds for r in reports)
    d = {"points": n, "smearing": type(smearing).__name__, "configs": rows,
         "min_margin": min(r.margin for r in reports), "holds": ok}
    return d, rows, ok


def cmd_oracle_lemma2(args):
    rho = _density(args, default=Exponential(1.0, 1.0))
    mu = parse_mu_spec(args.mu)
    lam = args.lam if args.lam is not None else 4.0
    cfg = oracle.MCConfig(samples=args.samples, seed=args.seed, threads=_threads(args))
    chk = oracle.check_lemma2(rho, lam, mu, cfg)
    d = chk.to_dict()
    rows = [{"name": k, "value": v} for k, v in d.items() if k != "mc"]
    return d, rows, chk.holds


def cmd_appendix_exponential(args):
    a = 1.0
    Ns = EXPONENTIAL_SWEEP if args.N is None else [args.N]
    rows = []
    for N in Ns:
        rho = make_exponential(N, a)
        L = functionals.l43(rho)
        K = functionals.k_fourier(rho)
        row = {"N": N, "L": L, "K_prime": K, "Q": K / L}
        if args.dilate is not None:
            Qd = functionals.q_ratio(dilate(rho, args.dilate))
            row["Q_dilated"] = Qd
            row["dilation_deviation"] = abs(Qd / row["Q"] - 1.0)
        rows.append(row)
    d = {"a": a, "rows": rows}
    ok = True
    if len(rows) > 1:
        slope = _fit_exponent([r["N"] for r in rows], [r["Q"] for r in rows])
        d["Q_exponent"] = slope
        d["Q_exponent_target"] = -1.0 / 3.0
        ok = abs(slope + 1.0 / 3.0) < EXPONENT_TOL
    if args.dilate is not None:
        d["dilate"] = args.dilate
        ok = ok and all(r["dilation_deviation"] < INVARIANCE_TOL for r in rows)
    d["holds"] = ok
    return d, rows, ok


def cmd_appendix_tf(args):
    base = _density(args, default=Exponential(1.0, 1.0))
    Zmax = args.Z if args.Z is not None else 50.0
    Zs = [z for z in TF_SWEEP if z <= Zmax] or [Zmax]
    rows = []
    for Z in Zs:
        rho = scale_tf(base, Z)
        L = functionals.l43(rho)
        K = functionals.k_fourier(rho)
        rows.append({"Z": Z, "L": L, "K_prime": K, "Q": K / L})
    d = {"base": base.descriptor(), "rows": rows}
    ok = True
    if len(rows) > 1:
        z = [r["Z"] for r in rows]
        fits = {"L": (_fit_exponent(z, [r["L"] for r in rows]), 5.0 / 3.0),
                "K_prime": (_fit_exponent(z, [r["K_prime"] for r in rows]), 4.0 / 3.0),
                "Q": (_fit_exponent(z, [r["Q"] for r in rows]), -1.0 / 3.0)}
        d["exponents"] = {k: {"fitted": f, "target": t} for k, (f, t) in fits.items()}
        ok = all(abs(f - t) < EXPONENT_TOL for f, t in fits.values())
    d["holds"] = ok
    return d, rows, ok


# ---- parser ----

def _common(p, *, density=False, mu=False):
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--config", help="JSON file with option defaults; flags win")
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap (fallback: COULOMB_BOUND_THREADS, else 1)")
    if density:
        p.add_argument("--density", help="density descriptor as JSON or @file")
        p.add_argument("--grid", type=_parse_grid, help="resample onto a grid n,rmin,rmax")
        p.add_argument("--dilate", type=float, help="mass-preserving dilation factor")
    if mu:
        p.add_argument("--mu", default="uniform", help="uniform | power_law:p | JSON")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coulomb-bound",
                                 description="Lower bounds on the indirect Coulomb energy.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="bound constants and trial-distribution values")
    _common(p, mu=True)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("functionals", help="L, K' (two routes), D(rho,rho), Q")
    _common(p, density=True)
    p.set_defaults(func=cmd_functionals)

    p = sub.add_parser("bound", help="three-term lower bound and comparisons")
    _common(p, density=True)
    p.add_argument("--e", type=float, default=1.0)
    p.add_argument("--alpha", type=float)
    p.add_argument("--optimize", action="store_true")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("oracle", help="brute-force checks")
    osub = p.add_subparsers(dest="check", required=True)
    q = osub.add_parser("product", help="product state against the bounds")
    _common(q)
    q.add_argument("--N", type=float)
    q.add_argument("--orbital", default="exp:1")
    q.add_argument("--e", type=float, default=1.0)
    q.set_defaults(func=cmd_oracle_product)
    q = osub.add_parser("onsager", help="smeared-charge bound on random configurations")
    _common(q, density=True, mu=True)
    q.add_argument("--points", type=int, default=10)
    q.add_argument("--seed", type=_u64, default=0)
    q.add_argument("--configs", type=int, default=1)
    q.add_argument("--radius", type=float, default=3.0)
    q.add_argument("--lambda", dest="lam", type=float)
    q.add_argument("--r0", type=float)
    q.set_defaults(func=cmd_oracle_onsager)
    q = osub.add_parser("lemma2", help="Monte Carlo check of the smearing-error inequality")
    _common(q, density=True, mu=True)
    q.add_argument("--lambda", dest="lam", type=float)
    q.add_argument("--seed", type=_u64, default=0)
    q.add_argument("--samples", type=int, default=200_000)
    q.set_defaults(func=cmd_oracle_lemma2)

    p = sub.add_parser("appendix", help="exponential and Thomas-Fermi scaling tables")
    asub = p.add_subparsers(dest="example", required=True)
    q = asub.add_parser("exponential", help="Q(N) sweep and exponent fit")
    _common(q)
    q.add_argument("--N", type=float)
    q.add_argument("--dilate", type=float)
    q.set_defaults(func=cmd_appendix_exponential)
    q = asub.add_parser("tf", help="Thomas-Fermi scaling sweep and exponent fits")
    _common(q, density=True)
    q.add_argument("--Z", type=float)
    q.set_defaults(func=cmd_appendix_tf)
    return ap


def _subparser(ap, argv):
    """The innermost parser selected by ``argv`` (used to apply config defaults)."""
    node = ap
    for tok in argv:
        acts = [a for a in node._actions if isinstance(a, argparse._SubParsersAction)]
        if acts and tok in acts[0].choices:
            node = acts[0].choices[tok]
    return node


def _apply_config(ap, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config) as fh:
        conf = _load_json_arg(fh.read(), "--config")
    if not isinstance(conf, dict):
        raise DomainError("--config must hold a JSON object")
    node = _subparser(ap, argv)
    dests = {a.dest for a in node._actions}
    conf = {k.replace("-", "_"): v for k, v in conf.items()}
    if "lambda" in conf:
        conf["lam"] = conf.pop("lambda")
    unknown = sorted(set(conf) - dests)
    if unknown:
        raise DomainError(f"--config: unknown field(s) {', '.join(unknown)}")
    for k in ("density",):
        if k in conf and not isinstance(conf[k], str):
            conf[k] = json.dumps(conf[k])
    if "grid" in conf and isinstance(conf["grid"], (list, str)):
        g = conf["grid"]
        conf["grid"] = _parse_grid(g if isinstance(g, str) else ",".join(map(str, g)))
    node.set_defaults(**conf)


def _render(result, rows, fmt):
    if fmt == "json":
        return json.dumps(_plain(result), indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    rows = _plain(rows)
    fields = list(dict.fromkeys(k for r in rows for k in r))
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
        args = ap.parse_args(argv)
        result, rows, ok = args.func(args)
        command = args.command + "".join(
            f" {getattr(args, k)}" for k in ("check", "example") if getattr(args, k, None))
        envelope = {"command": command, "ok": bool(ok), "result": result}
        text = _render(envelope, rows, args.format)
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
