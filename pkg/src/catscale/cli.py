"""Command-line interface.

Subcommands:

  size         one SizeReport for a component pair, as JSON
  sweep        size vs a family parameter, CSV or JSON
  pg-sweep     size vs the target guessing probability, CSV or JSON
  calibrate    number-state self-consistency table (size/N ratios)
  phase-bound  dephasing analysis / tolerable phase spread, as JSON
  mc-check     Monte-Carlo vs quadrature comparison grid

Exit codes: 0 success, 2 argument or state-grammar errors, 3 numerical
failures (tail mass, non-convergence, out-of-range physics).  Output is
assembled first and printed whole, so failures never leave partial CSV on
stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional, Tuple

import numpy as np

from . import oracle, phase, sizing
from .oracle import DEFAULT_MC_SEED, McConfig
from .statekit import (_FAMILY_PARAMS, GrammarError, StateFamilySpec,
                       FamilyPair, family_pair, pair_from_specs)

_CSV_HEADER = "param,size,sigma_max,p_at_sigma0"


def _g(x: float) -> str:
    """Nine-significant-digit formatting used by every CSV surface."""
    return f"{float(x):.9g}"


def _pg_arg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.5 < v < 1.0:
        raise argparse.ArgumentTypeError("pg must lie strictly in (0.5, 1)")
    return v


def _samples_arg(text: str) -> int:
    v = int(text)
    if v < 10_000:
        raise argparse.ArgumentTypeError("need >= 10000 samples")
    return v


def _fraction_arg(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("fraction must lie in [0, 1]")
    return v


def _dphi_arg(text: str) -> float:
    v = float(text)
    if v < 0.0:
        raise argparse.ArgumentTypeError("dphi must be >= 0")
    return v


def _sigma_arg(text: str) -> float:
    v = float(text)
    if not math.isfinite(v) or v < 0.0:
        raise argparse.ArgumentTypeError("sigma must be finite and >= 0")
    return v


def _build_pair(args) -> FamilyPair:
    spec = StateFamilySpec.parse(args.state)
    cutoff = args.cutoff_override
    if spec.is_pair:
        if getattr(args, "pair", None):
            raise GrammarError(
                f"family {spec.family!r} already defines both components; "
                "--pair is not allowed")
        return family_pair(spec, cutoff)
    pair_expr = getattr(args, "pair", None)
    if not pair_expr:
        raise GrammarError(
            f"family {spec.family!r} defines a single state; provide the "
            "second component with --pair")
    spec_b = StateFamilySpec.parse(pair_expr)
    if spec_b.is_pair:
        raise GrammarError("--pair must name a single-state family")
    return pair_from_specs(spec, spec_b, cutoff)


def _parse_sweep(text: str, allowed: Tuple[str, ...]) -> Tuple[str, np.ndarray]:
    """param=start:stop:points[:log] -> (param, grid)."""
    if "=" not in text:
        raise GrammarError(f"expected param=start:stop:points[:log], got {text!r}")
    name, _, rest = text.partition("=")
    name = name.strip()
    if name not in allowed:
        raise GrammarError(
            f"cannot sweep {name!r} here; choose one of {sorted(allowed)}")
    parts = rest.split(":")
    if len(parts) not in (3, 4):
        raise GrammarError(f"expected start:stop:points[:log], got {rest!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        points = int(parts[2])
    except ValueError:
        raise GrammarError(f"non-numeric sweep bounds in {rest!r}")
    if points < 1:
        raise GrammarError("sweep needs at least one point")
    log = False
    if len(parts) == 4:
        if parts[3] != "log":
            raise GrammarError(f"unknown sweep modifier {parts[3]!r}")
        log = True
    if log:
        if start <= 0 or stop <= 0:
            raise GrammarError("log sweeps need positive bounds")
        values = np.geomspace(start, stop, points)
    else:
        values = np.linspace(start, stop, points)
    return name, values


def _emit(args, payload: str) -> Optional[str]:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(payload)
        return None
    return payload


def _rows_payload(rows, family: str, param: str, as_json: bool) -> str:
    if as_json:
        doc = {
            "family": family,
            "param": param,
            "rows": [dict(param=v, **rep.as_dict()) for v, rep in rows],
        }
        return json.dumps(doc) + "\n"
    lines = [_CSV_HEADER]
    for v, rep in rows:
        lines.append(",".join([_g(v), _g(rep.size), _g(rep.sigma_max),
                               _g(rep.p_at_sigma0)]))
    return "\n".join(lines) + "\n"


# ------------------------------- subcommands -------------------------------


def cmd_size(args) -> Tuple[Optional[str], int]:
    pair = _build_pair(args)
    rep = sizing.size(pair.pmf_a, pair.pmf_b, args.pg, family=pair.label)
    return _emit(args, rep.to_json() + "\n"), 0


def cmd_sweep(args) -> Tuple[Optional[str], int]:
    spec = StateFamilySpec.parse(args.state)
    if not spec.is_pair:
        raise GrammarError("sweep requires a pair family "
                           "(cat, dsp, cpair, spins)")
    req, opt = _FAMILY_PARAMS[spec.family]
    name, values = _parse_sweep(args.sweep, tuple(sorted(req | opt)))
    rows = []
    for v in values:
        params = dict(spec.params)
        val = float(v)
        if name == "N":
            val = int(round(val))
        params[name] = val
        StateFamilySpec._validate(spec.family, params)
        point = StateFamilySpec(spec.family, params)
        pair = family_pair(point, args.cutoff_override)
        rows.append((val, sizing.size(pair.pmf_a, pair.pmf_b, args.pg,
                                      family=pair.label)))
    return _emit(args, _rows_payload(rows, spec.label(), name, args.json)), 0


def cmd_pg_sweep(args) -> Tuple[Optional[str], int]:
    name, values = _parse_sweep(args.sweep, ("pg",))
    bad = [v for v in values if not 0.5 < v < 1.0]
    if bad:
        raise GrammarError("pg sweep values must lie strictly in (0.5, 1)")
    pair = _build_pair(args)
    rows = []
    for v in values:
        rows.append((float(v), sizing.size(pair.pmf_a, pair.pmf_b, float(v),
                                           family=pair.label)))
    return _emit(args, _rows_payload(rows, pair.label, name, args.json)), 0


def cmd_calibrate(args) -> Tuple[Optional[str], int]:
    """Fock-equivalent separation for a tolerated resolution: the pair
    {|0>, |N>} whose discrimination at sigma reaches exactly pg."""
    doc = {
        "sigma": args.sigma,
        "pg": args.pg,
        "equivalent_separation": sizing.size_from_sigma(args.sigma, args.pg),
    }
    return _emit(args, json.dumps(doc) + "\n"), 0


def cmd_phase_bound(args) -> Tuple[Optional[str], int]:
    pair = _build_pair(args)
    if args.dphi is not None:
        if pair.state_a is None or pair.state_d is None:
            raise GrammarError(
                "phase-bound --dphi needs amplitude-level components; the "
                "spins family provides only counts statistics")
        ent = phase.TwoComponentEntangledState(pair.state_a, pair.state_d)
        rep = phase.negativity(phase.apply_phase_noise(ent, args.dphi))
        return _emit(args, json.dumps(rep.as_dict()) + "\n"), 0

    curve = lambda p: sizing.size(pair.pmf_a, pair.pmf_b, p,
                                  family=pair.label)
    res = phase.required_phase_resolution(args.fraction, curve)
    if res.unbounded:
        print("note: size 0 at the implied guessing probability; "
              "no finite phase-spread bound", file=sys.stderr)
    return _emit(args, json.dumps(res.as_dict()) + "\n"), 0


def cmd_mc_check(args) -> Tuple[Optional[str], int]:
    cfg = McConfig(samples=args.samples, seed=args.seed)
    rows = oracle.mc_check(cfg)
    ok = all(r.passed for r in rows)
    if args.csv:
        lines = ["case,sigma,analytic,mc,std_err,n_se,passed"]
        for r in rows:
            lines.append(",".join([r.label.replace(",", ";"), _g(r.sigma),
                                   _g(r.analytic), _g(r.p_hat), _g(r.std_err),
                                   _g(r.n_se), "1" if r.passed else "0"]))
        payload = "\n".join(lines) + "\n"
    else:
        w = max(len(r.label) for r in rows)
        lines = [f"{'case':<{w}}  sigma  analytic        mc   std_err  n_se  status"]
        for r in rows:
            lines.append(
                f"{r.label:<{w}}  {r.sigma:5.2f}  {r.analytic:.6f}  "
                f"{r.p_hat:.6f}  {r.std_err:.6f}  {r.n_se:4.2f}  "
                f"{'ok' if r.passed else 'FAIL'}")
        worst = max(r.n_se for r in rows)
        lines.append(f"{len(rows)} cases, worst deviation {worst:.2f} "
                     f"standard errors: {'OK' if ok else 'FAIL'}")
        payload = "\n".join(lines) + "\n"
    return _emit(args, payload), 0 if ok else 3


# --------------------------------- parser ----------------------------------


def _add_pair_arguments(p: argparse.ArgumentParser, with_pg: bool = True):
    p.add_argument("--state", required=True,
                   help="family expression, e.g. cat:a2=0,b2=40")
    p.add_argument("--pair",
                   help="second component when --state is a single state")
    p.add_argument("--cutoff-override", type=int, default=None,
                   help="replace the automatic basis cutoff")
    if with_pg:
        p.add_argument("--pg", type=_pg_arg, default=2.0 / 3.0,
                       help="target guessing probability (default 2/3)")


def _add_output_arguments(p: argparse.ArgumentParser, csv_json: bool = True):
    p.add_argument("--out", help="write the payload to this file")
    if csv_json:
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true",
                         help="JSON instead of CSV")
        fmt.add_argument("--csv", action="store_true",
                         help="CSV output (default)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="catscale",
        description="Operational size of photonic superpositions under "
                    "noise-limited photon counting")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("size", help="one size analysis as JSON")
    _add_pair_arguments(p)
    p.add_argument("--out", help="write the payload to this file")
    p.set_defaults(handler=cmd_size)

    p = sub.add_parser("sweep", help="size vs a family parameter")
    _add_pair_arguments(p)
    p.add_argument("--sweep", required=True,
                   help="param=start:stop:points[:log]")
    _add_output_arguments(p)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("pg-sweep", help="size vs target guessing probability")
    _add_pair_arguments(p, with_pg=False)
    p.add_argument("--sweep", required=True, help="pg=start:stop:points[:log]")
    _add_output_arguments(p)
    p.set_defaults(handler=cmd_pg_sweep)

    p = sub.add_parser("calibrate",
                       help="Fock-equivalent separation for a resolution")
    p.add_argument("--sigma", type=_sigma_arg, required=True,
                   help="detector resolution")
    p.add_argument("--pg", type=_pg_arg, default=2.0 / 3.0)
    p.add_argument("--out", help="write the payload to this file")
    p.set_defaults(handler=cmd_calibrate)

    p = sub.add_parser("phase-bound",
                       help="dephasing / phase-resolution analysis as JSON")
    _add_pair_arguments(p, with_pg=False)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--dphi", type=_dphi_arg,
                     help="apply this phase spread and report entanglement")
    grp.add_argument("--fraction", type=_fraction_arg,
                     help="target surviving entanglement fraction E")
    p.add_argument("--out", help="write the payload to this file")
    p.set_defaults(handler=cmd_phase_bound)

    p = sub.add_parser("mc-check", help="Monte-Carlo vs quadrature grid")
    p.add_argument("--samples", type=_samples_arg, default=1_000_000)
    p.add_argument("--seed", type=int, default=DEFAULT_MC_SEED)
    _add_output_arguments(p)
    p.set_defaults(handler=cmd_mc_check)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, code = args.handler(args)
    except GrammarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, np.linalg.LinAlgError,
            sizing.ConvergenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if text is not None:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
