"""Command-line front end.

Every command writes one result file. JSON results are wrapped as
``{"metadata": ..., "payload": ...}``; CSV results carry their metadata in a
``<output>.meta.json`` sidecar so the CSV bytes depend only on the inputs.
Times are in units of 1/J and sites are numbered from 1.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from . import anyon, disorder, dynamics, floquet, ring
from .recipes import figure_recipes, get_recipe
from .spectral import basis_state, hermitian_eig

OUTPUT_DIR_ENV = "CHIRALRING_OUTPUT_DIR"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3


class ValidationError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict
    output_path: Path
    seed: Optional[int] = None


@dataclass
class ResultEnvelope:
    metadata: dict
    payload: Any
    fmt: str  # "json" or "csv"
    extra_files: dict = field(default_factory=dict)  # suffix -> text


# --- argument parsing helpers -------------------------------------------------

_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>[-+]?)\s*(?P<num>\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+\.?\d*))?\s*$"
)


def parse_angle(text: str) -> float:
    """Parse ``0.5``, ``pi/3``, ``-pi/6`` or ``5pi/6`` into radians."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE_RE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}")
    val = math.pi * (float(m["num"]) if m["num"] else 1.0)
    if m["den"]:
        val /= float(m["den"])
    return -val if m["sign"] == "-" else val


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` with inclusive endpoints, or a single value."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; expected start:stop:step")
    if len(nums) == 1:
        return nums
    if len(nums) != 3:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; expected start:stop:step")
    start, stop, step = nums
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"range {text!r} needs step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    if n > 1_000_000:
        raise argparse.ArgumentTypeError(f"range {text!r} has too many points")
    return [start + i * step for i in range(n)]


def parse_pair(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"bad interval {text!r}; expected lo:hi")
    lo, hi = (float(p) for p in parts)
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"interval {text!r} needs lo < hi")
    return lo, hi


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


# --- command implementations --------------------------------------------------


def _ring_from_args(args) -> ring.ChiralRingHamiltonian:
    if getattr(args, "hamiltonian", None):
        doc = json.loads(Path(args.hamiltonian).read_text())
        h = ring.from_json_dict(doc.get("payload", doc))
    else:
        _require(args.n >= 2, f"--n must be >= 2 (got {args.n})")
        _require(args.j > 0, f"--j must be > 0 (got {args.j})")
        h = ring.build_ideal(args.n, args.j, args.convention)
    if getattr(args, "reverse", False):
        h = ring.reverse(h)
    return h


def cmd_build(args) -> ResultEnvelope:
    h = _ring_from_args(args)
    return ResultEnvelope({}, ring.to_json_dict(h), "json")


def cmd_spectrum(args) -> ResultEnvelope:
    if args.flux_range:
        _require(args.n >= 3, "--flux-range needs --n >= 3")
        rows = [
            [flux] + list(hermitian_eig(ring.flux_ring_hamiltonian(args.n, args.j, flux)).eigenvalues)
            for flux in args.flux_range
        ]
        header = ["flux"] + [f"E{i + 1}" for i in range(args.n)]
        return ResultEnvelope({}, _csv(header, rows), "csv")
    h = _ring_from_args(args)
    eig = hermitian_eig(h.matrix)
    spacings, dev = ring.equidistance_report(eig)
    payload = {
        "eigenvalues": eig.eigenvalues.tolist(),
        "spacings": spacings.tolist(),
        "maxDeviation": dev,
        "expectedSpacing": h.spec.b,
        "stepTime": h.spec.step_time,
    }
    return ResultEnvelope({}, payload, "json")


def cmd_evolve(args) -> ResultEnvelope:
    h = _ring_from_args(args)
    N = h.N
    _require(1 <= args.source <= N, f"--source must be in [1, {N}]")
    _require(args.samples >= 2, "--samples must be >= 2")
    t_end = args.t_end if args.t_end is not None else args.periods * h.spec.period
    _require(t_end > 0, "--t-end must be > 0")
    times = np.linspace(0.0, t_end, args.samples)
    traj = dynamics.evolve_static(h.matrix, basis_state(N, args.source - 1), times)
    return ResultEnvelope({"stepTime": h.spec.step_time}, traj.to_csv(), "csv")


def cmd_fidelity(args) -> ResultEnvelope:
    h = _ring_from_args(args)
    fids = dynamics.step_fidelities(h.matrix, h.spec.step_time, direction=-1 if args.reverse else 1)
    payload = {
        "stepTime": h.spec.step_time,
        "stepFidelities": fids.tolist(),
        "averageFidelity": float(np.mean(fids)),
        "direction": "counterclockwise" if args.reverse else "clockwise",
    }
    return ResultEnvelope({}, payload, "json")


def cmd_disorder(args) -> ResultEnvelope:
    _require(args.n >= 2, f"--n must be >= 2 (got {args.n})")
    _require(args.j > 0, "--j must be > 0")
    _require(args.realizations >= 1, "--realizations must be >= 1")
    _require(all(s >= 0 for s in args.strengths), "--strengths must be non-negative")
    _require(args.background >= 0, "--background must be non-negative")
    mode = disorder.Mode(args.mode)
    bg = args.background
    cfg = disorder.DisorderConfig(
        W=bg if mode is disorder.Mode.HOPPING else 0.0,
        dJ=bg if mode is disorder.Mode.ONSITE else 0.0,
        realizations=args.realizations,
        seed=args.seed,
    )
    res = disorder.disorder_sweep(ring.RingSpec(args.n, args.j), args.strengths, mode, cfg)
    return ResultEnvelope(
        {"spread": "min/max envelope over realizations"},
        res.to_csv(),
        "csv",
        {".samples.json": res.to_json()},
    )


def cmd_floquet_match(args) -> ResultEnvelope:
    _require(args.omega_over_j > 0, "--omega-over-j must be > 0")
    try:
        report = floquet.matching_report(args.omega_over_j, args.phi, args.bracket)
    except floquet.NoRootError as exc:
        raise ValidationError(str(exc))
    return ResultEnvelope({}, report, "json")


def cmd_floquet_compare(args) -> ResultEnvelope:
    _require(args.omega_over_j > 0, "--omega-over-j must be > 0")
    _require(args.steps_per_period >= 64, "--steps-per-period must be >= 64")
    x = args.a_over_omega
    if x is None:
        try:
            x = floquet.solve_matching(args.omega_over_j, args.phi, args.bracket)
        except floquet.NoRootError as exc:
            raise ValidationError(str(exc))
    p = floquet.DriveParams.from_ratios(args.omega_over_j, x, args.phi)
    ec = floquet.effective_couplings(p)
    t_end = args.t_end if args.t_end is not None else 3 * ec.step_time
    _require(t_end >= p.period, "--t-end must cover at least one drive period")
    cmp = floquet.compare_driven_vs_effective(p, t_end, args.steps_per_period, method=args.method)
    meta = {
        "AoverOmega": x,
        "maxDeviation": cmp.max_deviation,
        "sampling": cmp.sampling,
        "effectiveStepTime": ec.step_time,
        "Jeff": ec.Jeff,
        "ImJtilde": ec.Jtilde.imag,
    }
    return ResultEnvelope(meta, cmp.exact.to_csv(), "csv", {".effective.csv": cmp.effective.to_csv()})


def _anyon_params(args) -> anyon.AnyonParams:
    _require(args.j > 0, "--j must be > 0")
    _require(args.u_over_j > 0, "--u-over-j must be > 0")
    return anyon.AnyonParams(args.j, args.u_over_j * args.j, args.theta)


def cmd_anyon_evolve(args) -> ResultEnvelope:
    p = _anyon_params(args)
    _require(args.samples >= 2, "--samples must be >= 2")
    t_end = args.t_end if args.t_end is not None else 3 * anyon.doublon_step_time(p)
    _require(t_end > 0, "--t-end must be > 0")
    traj = anyon.doublon_dynamics(p, t_end, args.samples)
    return ResultEnvelope({"doublonStepTime": anyon.doublon_step_time(p)}, traj.to_csv(), "csv")


def cmd_anyon_spectrum(args) -> ResultEnvelope:
    _require(args.j > 0 and args.u_over_j > 0, "--j and --u-over-j must be > 0")
    spectra = anyon.spectrum_vs_theta(args.j, args.u_over_j * args.j, args.thetas)
    return ResultEnvelope({}, anyon.spectrum_csv(args.thetas, spectra), "csv")


def cmd_anyon_thetaeq(args) -> ResultEnvelope:
    _require(args.j > 0, "--j must be > 0")
    if args.u_range:
        _require(all(u > 0 for u in args.u_range), "--u-range values must be > 0")
        table = anyon.theta_eq_sweep(args.j, [u * args.j for u in args.u_range])
        rows = [[u] + list(r) for u, r in zip(args.u_range, table)]
        header = ["UoverJ", "theta_eq_branch1", "theta_eq_branch2", "theta_eq_branch3"]
        return ResultEnvelope({}, _csv(header, rows), "csv")
    _require(args.u_over_j is not None and args.u_over_j > 0, "--u-over-j (> 0) or --u-range is required")
    _require(1 <= args.branch <= 3, "--branch must be 1, 2 or 3")
    bracket = args.bracket or anyon.THETA_EQ_BRACKETS[args.branch - 1]
    try:
        th = anyon.find_theta_eq(args.j, args.u_over_j * args.j, bracket)
    except ValueError as exc:
        raise ValidationError(str(exc))
    payload = {
        "UoverJ": args.u_over_j,
        "branch": args.branch,
        "thetaEq": th,
        "doublonFlux": ring.principal_angle(-3 * th),
    }
    return ResultEnvelope({}, payload, "json")


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(dynamics.format_float(v) for v in row))
    return "\n".join(lines) + "\n"


# --- parser --------------------------------------------------------------------


def _add_ring_flags(p: argparse.ArgumentParser, reverse: bool = True) -> None:
    p.add_argument("--n", type=int, default=3, help="number of ring sites (>= 2)")
    p.add_argument("--j", type=float, default=1.0, help="nearest-neighbour hopping amplitude J")
    p.add_argument(
        "--convention",
        choices=[c.value for c in ring.Convention],
        default=ring.Convention.AS_DERIVED.value,
        help="bond-phase gauge: distance-dependent phases as constructed, or every bond at pi/2",
    )
    p.add_argument("--hamiltonian", help="load the ring Hamiltonian from a JSON file written by 'build'")
    if reverse:
        p.add_argument("--reverse", action="store_true", help="complex-conjugate H (counterclockwise)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chiralring",
        description="Simulate perfect chiral circulation of an excitation around small rings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("-o", "--output", help=f"output file (relative paths resolve under ${OUTPUT_DIR_ENV})")
        p.set_defaults(func=func)
        return p

    p = add("build", cmd_build, "write the closed-form circulation Hamiltonian as JSON")
    _add_ring_flags(p)

    p = add("spectrum", cmd_spectrum, "eigenvalues and level-spacing report, or spectrum vs flux")
    _add_ring_flags(p)
    p.add_argument("--flux-range", type=parse_range,
                   help="start:stop:step scan of total flux (radians) through a uniform nearest-neighbour ring")

    p = add("evolve", cmd_evolve, "site populations starting from one site (CSV t,p1..pN)")
    _add_ring_flags(p)
    p.add_argument("--source", type=int, default=1, help="initially occupied site (1-based)")
    p.add_argument("--t-end", type=float, help="final time in units of 1/J (overrides --periods)")
    p.add_argument("--periods", type=float, default=1.0, help="number of full circulation periods N*T")
    p.add_argument("--samples", type=int, default=601, help="number of time samples")

    p = add("fidelity", cmd_fidelity, "step fidelities and their average from site 1")
    _add_ring_flags(p)

    p = add("disorder", cmd_disorder, "Monte Carlo average fidelity versus disorder strength")
    p.add_argument("--n", type=int, default=3, help="number of ring sites")
    p.add_argument("--j", type=float, default=1.0, help="nearest-neighbour hopping amplitude J")
    p.add_argument("--mode", choices=[m.value for m in disorder.Mode], default="onsite",
                   help="swept disorder: on-site energies or bond magnitudes")
    p.add_argument("--strengths", type=parse_range, default=parse_range("0:1:0.1"),
                   help="start:stop:step strengths in units of the mean hopping amplitude")
    p.add_argument("--background", type=float, default=0.0,
                   help="fixed strength of the other disorder type, same units")
    p.add_argument("--realizations", type=int, default=300, help="disorder realizations per point")
    p.add_argument("--seed", type=int, default=0, help="master seed of the counter-based RNG")

    def add_drive_flags(p):
        p.add_argument("--omega-over-j", type=float, default=40.0, help="drive frequency omega/J")
        p.add_argument("--phi", type=parse_angle, default=math.pi / 3,
                       help="drive phase in radians (accepts forms like pi/3)")
        p.add_argument("--bracket", type=parse_pair, default=floquet.DEFAULT_BRACKET,
                       help="lo:hi search interval for A/omega")

    p = add("floquet-match", cmd_floquet_match, "solve |J_eff| = |Jtilde| for the drive amplitude")
    add_drive_flags(p)

    p = add("floquet-compare", cmd_floquet_compare,
            "exact driven chain vs effective triangle, sampled once per drive period")
    add_drive_flags(p)
    p.add_argument("--a-over-omega", type=float, help="drive amplitude A/omega (default: matched value)")
    p.add_argument("--t-end", type=float, help="final time (default: one circulation period 3T)")
    p.add_argument("--steps-per-period", type=int, default=256, help="integrator substeps per drive period")
    p.add_argument("--method", choices=["cf4", "midpoint"], default="cf4", help="exponential integrator")

    def add_anyon_flags(p, theta=True):
        p.add_argument("--j", type=float, default=1.0, help="single-particle hopping J")
        p.add_argument("--u-over-j", type=float, default=30.0, help="on-site interaction U/J")
        if theta:
            p.add_argument("--theta", type=parse_angle, default=math.pi / 6,
                           help="statistical angle in radians (accepts forms like pi/6)")

    p = add("anyon-evolve", cmd_anyon_evolve, "site occupations of two anyons from a doublon on site 1")
    add_anyon_flags(p)
    p.add_argument("--t-end", type=float, help="final time (default: one doublon circulation period)")
    p.add_argument("--samples", type=int, default=2001, help="number of time samples")

    p = add("anyon-spectrum", cmd_anyon_spectrum, "two-particle spectrum versus statistical angle")
    add_anyon_flags(p, theta=False)
    p.add_argument("--thetas", type=parse_range, default=parse_range("-3.14159:3.14159:0.01"),
                   help="start:stop:step grid of statistical angles")

    p = add("anyon-thetaeq", cmd_anyon_thetaeq, "angle(s) making the three doublon levels equidistant")
    p.add_argument("--j", type=float, default=1.0, help="single-particle hopping J")
    p.add_argument("--u-over-j", type=float, help="on-site interaction U/J for a single root")
    p.add_argument("--branch", type=int, default=1, help="branch 1, 2 or 3 (near pi/6, pi/2, 5pi/6)")
    p.add_argument("--bracket", type=parse_pair, help="lo:hi search interval overriding the branch default")
    p.add_argument("--u-range", type=parse_range, help="start:stop:step sweep of U/J (CSV of all branches)")

    p = sub.add_parser("recipe", help="run or list canned figure reproductions")
    p.add_argument("name", nargs="?", help="recipe name, or 'all'")
    p.add_argument("--list", action="store_true", help="list recipes and the checks they feed")
    p.add_argument("--output-dir", help=f"directory for recipe outputs (default ${OUTPUT_DIR_ENV} or .)")
    p.set_defaults(func=None)
    return parser


# --- output --------------------------------------------------------------------


def resolve_output(path: Optional[str], default_name: str) -> Path:
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    p = Path(path) if path else Path(default_name)
    return p if p.is_absolute() else base / p


def _params_of(args) -> dict:
    skip = {"func", "command", "output"}
    out = {}
    for k, v in vars(args).items():
        if k in skip:
            continue
        if isinstance(v, tuple):
            v = list(v)
        out[k] = v
    return out


def write_result(cfg: RunConfig, env: ResultEnvelope) -> None:
    meta = {
        "command": cfg.command,
        "params": cfg.params,
        "version": __version__,
        "seed": cfg.seed,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        **env.metadata,
    }
    cfg.output_path.parent.mkdir(parents=True, exist_ok=True)
    if env.fmt == "json":
        text = json.dumps({"metadata": meta, "payload": env.payload}, indent=1)
        cfg.output_path.write_text(text + "\n")
    else:
        cfg.output_path.write_text(env.payload)
        Path(str(cfg.output_path) + ".meta.json").write_text(json.dumps(meta, indent=1) + "\n")
    for suffix, text in env.extra_files.items():
        Path(str(cfg.output_path) + suffix).write_text(text)


def run(args, output_override: Optional[Path] = None) -> Path:
    env = args.func(args)
    ext = "json" if env.fmt == "json" else "csv"
    out = output_override or resolve_output(args.output, f"{args.command}.{ext}")
    cfg = RunConfig(args.command, _params_of(args), out, getattr(args, "seed", None))
    write_result(cfg, env)
    return out


def _run_recipes(parser, args) -> int:
    recipes = figure_recipes()
    if args.list or not args.name:
        for r in recipes:
            print(f"{r.name:11s} {r.panel} -> {r.filename}  [{r.check}]")
        return EXIT_OK
    chosen = recipes if args.name == "all" else [get_recipe(args.name)]
    out_dir = Path(args.output_dir) if args.output_dir else Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    for r in chosen:
        sub_args = parser.parse_args(list(r.argv))
        path = run(sub_args, out_dir / r.filename)
        print(f"{r.name}: wrote {path}")
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "recipe":
            return _run_recipes(parser, args)
        path = run(args)
    except (ValidationError, ValueError, KeyError) as exc:
        print(f"chiralring {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"chiralring {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
