"""Command-line driver: verification suites, proofs, spectra, convergence.

Subcommands
-----------
check     run verification suites over a (lambda, n_max) grid
prove     run the exact symbolic identity library, emit transcripts
spectrum  solve central-potential sector spectra, one file per (lambda, j)
converge  commutative-limit study against the finite-difference oracle

Config files use a plain-text ``key = value`` grammar (``#`` comments,
comma-separated lists, ``tol.<check_id>`` overrides); command-line flags win
over file values.  Exit status is zero iff every non-diagnostic check passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional


from . import __version__
from .checks import (CheckConfig, POTENTIALS, SUITES, parse_config_text,
                     run_suite)
from .operators import RadialFunction, Space
from .report import emit_report
from . import identities as idn
from . import spectra as spc


def _potential_fn(name: str, q: float):
    if name == "free":
        return None
    if name not in POTENTIALS:
        raise SystemExit(f"error: unknown potential {name!r} "
                         f"(have {sorted(POTENTIALS)})")
    base = POTENTIALS[name]
    if name == "coulomb":
        return lambda r: -q / r
    return base


def _parse_schedule(text: str) -> List[tuple]:
    out = []
    for item in text.split(","):
        lam_s, n_s = item.split(":")
        out.append((float(lam_s), int(n_s)))
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=str, default=None,
                   help="comma-separated NC length scales")
    p.add_argument("--nmax", type=str, default=None,
                   help="comma-separated truncation cutoffs")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", dest="fmt", choices=("json", "csv", "text"),
                   default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzylab",
        description="quantum mechanics on a rotationally invariant fuzzy "
                    "3D space: verification suites, exact symbolic proofs, "
                    "and central-potential spectra")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser(
        "check", help="run verification suites",
        epilog="CSV columns: check_id, suite, kind, statement, params "
               "(JSON), residual, threshold, passed, wall_time_ms, detail")
    _add_common(p_check)
    p_check.add_argument("--suite", type=str, default=None,
                         help=f"comma-separated suites from {SUITES} or 'all'")
    p_check.add_argument("--margin", type=str, default=None,
                         help="interior margin policy: auto or fixed:k")
    p_check.add_argument("--states", type=int, default=None,
                         help="random states per check")
    p_check.add_argument("--potential", type=str, default=None)
    p_check.add_argument("--q", type=float, default=None,
                         help="potential strength parameter")
    p_check.add_argument("--tol", type=float, default=None,
                         help="override the default 1e-10 threshold")
    p_check.add_argument("--config", type=str, default=None,
                         help="plain-text config file (flags override it)")

    p_prove = sub.add_parser("prove", help="run the symbolic identity library")
    p_prove.add_argument("--identity", type=str, default="all",
                         help=f"one of {idn.IDENTITY_NAMES} or 'all'")
    p_prove.add_argument("--out", type=str, default=None,
                         help="write the proof transcript here")

    p_spec = sub.add_parser("spectrum", help="sector spectra for a potential")
    _add_common(p_spec)
    p_spec.add_argument("--potential", type=str, default="free")
    p_spec.add_argument("--q", type=float, default=1.0)
    p_spec.add_argument("--j", type=float, default=0,
                        help="angular momentum sector (integer for kappa=0)")
    p_spec.add_argument("--boundary", choices=("hard", "dirichlet"),
                        default="dirichlet")

    p_conv = sub.add_parser("converge", help="commutative-limit study")
    p_conv.add_argument("--potential", type=str, default="free")
    p_conv.add_argument("--q", type=float, default=1.0)
    p_conv.add_argument("--j", type=float, default=0)
    p_conv.add_argument("--schedule", type=str, default="0.4:19,0.2:39,0.1:79",
                        help="comma list of lam:n_max with fixed lam*(n_max+1)")
    p_conv.add_argument("--levels", type=int, default=3)
    p_conv.add_argument("--out", type=str, default=None)
    return parser


def _config_from_args(args) -> CheckConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = parse_config_text(fh.read())
    else:
        cfg = CheckConfig()
    if args.lam is not None:
        cfg.lams = tuple(float(v) for v in args.lam.split(","))
    if args.nmax is not None:
        cfg.n_maxes = tuple(int(v) for v in args.nmax.split(","))
    if args.seed is not None:
        cfg.seed = args.seed
    if args.states is not None:
        cfg.n_states = args.states
    if args.margin is not None:
        cfg.margin = args.margin
    if args.suite is not None:
        cfg.suites = tuple(s.strip() for s in args.suite.split(","))
    if args.potential is not None:
        cfg.potential = args.potential
    if args.q is not None:
        cfg.potential_q = args.q
    if args.tol is not None:
        cfg.tolerance = args.tol
    if args.out is not None:
        cfg.out = args.out
    if args.fmt is not None:
        cfg.fmt = args.fmt
    return cfg


def _cmd_check(args) -> int:
    try:
        cfg = _config_from_args(args)
        report = run_suite(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fmt = cfg.fmt or "json"
    try:
        out = emit_report(report, fmt, cfg.out)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        print(f"wrote {cfg.out}")
        print(emit_report(report, "text").splitlines()[-1])
    else:
        sys.stdout.write(out)
    return 0 if report.passed else 1


def _cmd_prove(args) -> int:
    names = idn.IDENTITY_NAMES if args.identity == "all" else (args.identity,)
    chunks, all_ok = [], True
    for name in names:
        try:
            res = idn.check_identity(name)
        except KeyError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        chunks.append(res.transcript())
        all_ok = all_ok and res.ok
        print(f"{name}: {'proved' if res.ok else 'FAILED'}")
    text = "\n".join(chunks)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    return 0 if all_ok else 1


def _spectrum_payload(result: spc.SpectrumResult) -> dict:
    lam = result.lam
    emax = float(result.eigenvalues.max())
    return {
        "lam": result.lam, "n_max": result.n_max, "j": result.j,
        "potential": result.potential, "boundary": result.boundary,
        "cutoff": 2.0 / lam**2, "max_energy": emax,
        "below_cutoff": bool(emax <= 2.0 / lam**2 + 1e-8 / lam**2),
        "levels": [float(e) for e in result.eigenvalues],
        "grid": result.metadata.get("grid", []),
    }


def _cmd_spectrum(args) -> int:
    if float(args.j) != int(args.j):
        print("error: half-integer j belongs to charged (kappa != 0) sectors, "
              "which are out of scope; pass an integer j", file=sys.stderr)
        return 2
    j = int(args.j)
    lams = [float(v) for v in (args.lam or "0.2").split(",")]
    n_maxes = [int(v) for v in (args.nmax or "19").split(",")]
    if len(n_maxes) == 1:
        n_maxes = n_maxes * len(lams)
    if len(n_maxes) != len(lams):
        print("error: --nmax needs one value, or one per --lambda entry",
              file=sys.stderr)
        return 2
    fn = _potential_fn(args.potential, args.q)
    fmt = args.fmt or "json"
    wrote = []
    for lam, n_max in zip(lams, n_maxes):
        space = Space(n_max, lam)
        pot = None
        if fn is not None:
            pot = RadialFunction.from_callable(fn, lam, n_max,
                                               name=args.potential)
        result = spc.solve_sector(space, j, pot, boundary=args.boundary)
        payload = _spectrum_payload(result)
        if fmt == "json":
            text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        else:
            lines = [f"# potential={payload['potential']} lam={lam} "
                     f"n_max={n_max} j={j} boundary={args.boundary}",
                     f"# cutoff 2/lam^2 = {payload['cutoff']!r} "
                     f"max_energy = {payload['max_energy']!r} "
                     f"below_cutoff = {payload['below_cutoff']}"]
            if fmt == "csv":
                lines.append("level,energy")
                lines += [f"{k},{e!r}" for k, e in enumerate(payload["levels"])]
            else:
                lines += [f"level {k}: {e!r}"
                          for k, e in enumerate(payload["levels"])]
            text = "\n".join(lines) + "\n"
        if args.out:
            path = f"{args.out}.lam{lam}.j{j}.{fmt}"
            with open(path, "w") as fh:
                fh.write(text)
            wrote.append(path)
        else:
            sys.stdout.write(text)
    if args.out and len(lams) > 1:
        # a schedule was given: emit the oracle-comparison table alongside
        records = spc.convergence_study(list(zip(lams, n_maxes)), j, fn,
                                        args.potential)
        path = f"{args.out}.convergence.csv"
        with open(path, "w") as fh:
            fh.write("lam,n_max,j,level,E_nc,E_oracle,gap\n")
            for rec in records:
                d = rec.as_dict()
                fh.write(f"{d['lam']!r},{d['n_max']},{d['j']},{d['level']},"
                         f"{d['E_nc']!r},{d['E_oracle']!r},{d['gap']!r}\n")
        wrote.append(path)
    for path in wrote:
        print(f"wrote {path}")
    return 0


def _cmd_converge(args) -> int:
    if float(args.j) != int(args.j):
        print("error: pass an integer j", file=sys.stderr)
        return 2
    schedule = _parse_schedule(args.schedule)
    fn = _potential_fn(args.potential, args.q)
    records = spc.convergence_study(schedule, int(args.j), fn,
                                    args.potential, levels=args.levels)
    lines = ["lam,n_max,j,level,E_nc,E_oracle,gap"]
    for rec in records:
        d = rec.as_dict()
        lines.append(f"{d['lam']!r},{d['n_max']},{d['j']},{d['level']},"
                     f"{d['E_nc']!r},{d['E_oracle']!r},{d['gap']!r}")
    # informational: how the deepest level scales with lam (no verdict
    # attached; flags any bound levels that vanish in the commutative limit)
    bound = [r for r in records if r.energy_nc < 0]
    if bound:
        lines.append(f"# bound levels present: {len(bound)} records with E < 0")
        deepest = {}
        for r in records:
            cur = deepest.get(r.lam)
            deepest[r.lam] = min(cur, r.energy_nc) if cur is not None \
                else r.energy_nc
        scaled = ", ".join(f"lam={lam!r}: E_min={e!r}, E_min/lam^2={e / lam**2!r}"
                           for lam, e in sorted(deepest.items()))
        lines.append(f"# deepest-level scaling: {scaled}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return _cmd_check(args)
    if args.command == "prove":
        return _cmd_prove(args)
    if args.command == "spectrum":
        return _cmd_spectrum(args)
    if args.command == "converge":
        return _cmd_converge(args)
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
