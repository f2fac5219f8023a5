"""Command-line entry point: ``hopflift generate|energy|expect|mc|sweep|figure``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import expectations as ex
from .diamond import read_rj_file
from .dpp import harmonic_profile, spherical_profile
from .errors import NumericalError, ValidationError
from .harness import (FAMILIES, K_RULES, ExperimentConfig, emit, figure_series, generate, mc_estimate,
                      read_points, sweep, write_points)
from .lift import log_energy

SWEEP_KEYS = {"n": "n", "m": "m", "r": "r", "L": "L", "parallels": "p"}


def _add_family_flags(p, multi=False):
    nargs = "+" if multi else None
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=int, nargs=nargs, help="number of points (uniform and antipodal families)")
    p.add_argument("--m", type=int, nargs=nargs, help="base size for lifted-uniform / lifted-antipodal")
    p.add_argument("--r", type=int, nargs=nargs, help="spherical ensemble rank")
    p.add_argument("--L", type=int, nargs=nargs, help="harmonic ensemble degree")
    p.add_argument("--k", type=int, help="points per fibre")
    p.add_argument("--k-rule", choices=K_RULES, default=None)
    p.add_argument("--parallels", type=int, nargs=nargs, help="Diamond parallels p (ansatz r_j)")
    p.add_argument("--rj", help="file with one r_j per line (overrides --parallels)")
    p.add_argument("--alpha", type=float, default=1.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="JSON file whose keys override command-line flags")


def _add_output_flags(p):
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = argparse.ArgumentParser(prog="hopflift", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample one configuration")
    _add_family_flags(g)
    _add_output_flags(g)

    e = sub.add_parser("energy", help="logarithmic energy of a point file")
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--dim", type=int, choices=(3, 4))
    e.add_argument("--format", choices=("csv", "json"))
    e.add_argument("--config")

    x = sub.add_parser("expect", help="predicted expected energy")
    _add_family_flags(x)

    m = sub.add_parser("mc", help="Monte Carlo estimate")
    _add_family_flags(m)
    m.add_argument("--runs", type=int, default=100)
    _add_output_flags(m)

    s = sub.add_parser("sweep", help="Monte Carlo over one list-valued parameter")
    _add_family_flags(s, multi=True)
    s.add_argument("--runs", type=int, default=5)
    _add_output_flags(s)

    f = sub.add_parser("figure", help="data series for the normalized lifted-Diamond figures")
    f.add_argument("--figure", type=int, choices=(1, 2), default=None, help="only the n1 (1) or n2 (2) series")
    f.add_argument("--parallels", type=int, nargs="+", default=[4, 8, 12, 16, 20, 24, 28])
    f.add_argument("--alpha", type=float, default=1.2)
    f.add_argument("--runs", type=int, default=5)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--config")
    _add_output_flags(f)
    return parser


def _apply_config(args):
    if not getattr(args, "config", None):
        return args
    try:
        with open(args.config) as fh:
            overrides = json.load(fh)
    except OSError as err:
        raise ValidationError(f"cannot read config {args.config}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise ValidationError(f"{args.config}: invalid JSON ({err})") from None
    if not isinstance(overrides, dict):
        raise ValidationError(f"{args.config}: expected a JSON object")
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ValidationError(f"{args.config}: unknown option {key!r}")
        setattr(args, attr, value)
    return args


def _first(v):
    return v[0] if isinstance(v, list) else v


def _experiment(args, runs=1, params_override=None) -> ExperimentConfig:
    if not args.family:
        raise ValidationError("--family is required")
    params = {}
    for flag, key in SWEEP_KEYS.items():
        v = _first(getattr(args, flag, None))
        if v is not None:
            params[key] = v
    if args.k is not None:
        params["k"] = args.k
    if args.rj:
        params["rj"] = read_rj_file(args.rj)
    params.update(params_override or {})
    k_rule = args.k_rule or ("explicit" if args.k is not None or not args.family.startswith("lifted-")
                             else _default_k_rule(args.family))
    return ExperimentConfig(args.family, params, runs, args.seed, k_rule, args.alpha,
                            getattr(args, "out", None), getattr(args, "format", None) or "csv")


def _default_k_rule(family):
    return {"lifted-diamond": "alpha", "lifted-spherical": "spherical",
            "lifted-harmonic": "harmonic"}.get(family, "explicit")


def _write(text, path):
    if path is None:
        sys.stdout.write(text)


def _json_num(v):
    return None if v is None or (isinstance(v, float) and not math.isfinite(v)) else v


def cmd_generate(args):
    cfg = _experiment(args)
    _write(write_points(generate(cfg, 0), args.format, args.out), args.out)


def cmd_energy(args):
    cfg = read_points(args.input, args.format, args.dim)
    print(json.dumps({"n": len(cfg), "energy": log_energy(cfg)}))


def cmd_expect(args):
    cfg = _experiment(args)
    P = cfg.params
    fam = cfg.family
    quad = None
    closed = None
    if fam == "lifted-spherical":
        closed = ex.expected_lifted_spherical_closed(P["r"], P["k"])
        quad = ex.expected_lifted_dpp(spherical_profile(P["r"]), k=P["k"])
    elif fam == "lifted-harmonic":
        quad = ex.expected_lifted_dpp(harmonic_profile(P["L"]), k=P["k"])
    elif fam == "lifted-diamond":
        quad = ex.expected_lifted_diamond_semianalytic(cfg.diamond_spec(), P["k"])
    elif fam == "diamond-s2":
        closed = ex.diamond_expected_energy_s2(cfg.diamond_spec())
    else:
        from .harness import predicted_energy
        closed = predicted_energy(cfg)
        if closed is None:
            raise ValidationError(f"no expected-energy formula for family {fam!r}")
    print(json.dumps({"family": fam, "params": P, "closed_form": _json_num(closed),
                      "quadrature": _json_num(quad)}))


def cmd_mc(args):
    row = mc_estimate(_experiment(args, args.runs))
    _write(emit([row], args.format, args.out), args.out)


def cmd_sweep(args):
    multi = [(flag, key) for flag, key in SWEEP_KEYS.items()
             if isinstance(getattr(args, flag), list) and len(getattr(args, flag)) > 1]
    if len(multi) != 1:
        raise ValidationError("sweep needs exactly one list-valued parameter "
                              "(--n, --m, --r, --L or --parallels with several values)")
    flag, key = multi[0]
    cfg = _experiment(args, args.runs)
    rows = sweep(cfg, key, getattr(args, flag))
    _write(emit(rows, args.format, args.out), args.out)


def cmd_figure(args):
    series = figure_series(args.parallels, args.alpha, args.runs, args.seed)
    if args.figure is not None:
        n = f"n{args.figure}"
        series = [{"N": s["N"], n: s[n], f"{n}_semianalytic": s[f"{n}_semianalytic"]} for s in series]
    _write(emit(series, args.format, args.out), args.out)


COMMANDS = {"generate": cmd_generate, "energy": cmd_energy, "expect": cmd_expect,
            "mc": cmd_mc, "sweep": cmd_sweep, "figure": cmd_figure}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        COMMANDS[args.command](args)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except KeyError as err:
        print(f"error: missing parameter {err.args[0]}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
