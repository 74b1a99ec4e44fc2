"""Command-line front end: sweeps, threshold searches, QPT witness and oracle checks."""

from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import ModelError, PhaseLabel
from .oracle import NEAR_CRITICAL, FockConfig, OracleError, OracleReport, compare
from .scenario import PRESETS, ConfigError, PhasePolicy, Scenario, parse_config, preset
from .steering import (
    THRESHOLD,
    WITNESS_EPSILON,
    Direction,
    SteeringMode,
    WitnessReport,
    classify,
    find_threshold,
    qpt_witness,
    steering_at,
    steering_from_moments,
)
from .supermode import Branch, ground_state_moments

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_NOT_CONVERGED = 4

# rows this close to lambda_c (relative) carry no steering values
CRITICAL_BAND = 0.005

CSV_HEADER = ["lambda", "phase", "omega_hi", "omega_lo", "sin2theta", "cos2theta",
              "E_atoms_to_photons", "E_photons_to_atoms", "steering_class"]


@dataclass(frozen=True)
class SweepRow:
    lam: float
    phase: PhaseLabel
    omega_hi: float | None = None
    omega_lo: float | None = None
    sin2theta: float | None = None
    cos2theta: float | None = None
    e_atoms_to_photons: float | None = None
    e_photons_to_atoms: float | None = None
    steering_class: str = ""
    error: str | None = None

    def csv_fields(self) -> list[str]:
        def fmt(x):
            return "" if x is None else repr(float(x))
        return [fmt(self.lam), self.phase.value, fmt(self.omega_hi), fmt(self.omega_lo),
                fmt(self.sin2theta), fmt(self.cos2theta), fmt(self.e_atoms_to_photons),
                fmt(self.e_photons_to_atoms), self.steering_class]


def evaluate_row(scenario: Scenario, lam: float) -> SweepRow:
    lam_c = scenario.lambda_c
    if abs(lam - lam_c) <= CRITICAL_BAND * lam_c:
        return SweepRow(lam, PhaseLabel.CRITICAL)
    natural = PhaseLabel.NORMAL if lam < lam_c else PhaseLabel.SUPERRADIANT
    try:
        phase = scenario.phase_for(lam)
        point = steering_at(scenario.params, lam, scenario.branch, phase)
        pair = point.pair
        if scenario.steering_mode is SteeringMode.REID:
            pair = steering_from_moments(ground_state_moments(point.spectrum), SteeringMode.REID)
    except (ModelError, ArithmeticError) as exc:
        return SweepRow(lam, natural, error=str(exc))
    s = point.spectrum
    return SweepRow(lam, phase, s.omega_hi, s.omega_lo, s.sin2theta, s.cos2theta,
                    pair.e_atoms_to_photons, pair.e_photons_to_atoms, classify(pair).value)


def lambda_grid(lambda_min: float, lambda_max: float, points: int) -> np.ndarray:
    if not 0 <= lambda_min < lambda_max:
        raise ConfigError("sweep needs 0 <= lambda_min < lambda_max")
    if points < 2:
        raise ConfigError("sweep needs at least 2 points")
    return np.linspace(lambda_min, lambda_max, points)


def run_sweep(scenario: Scenario, lambda_min: float, lambda_max: float, points: int,
              workers: int = 1) -> list[SweepRow]:
    grid = [float(x) for x in lambda_grid(lambda_min, lambda_max, points)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda lam: evaluate_row(scenario, lam), grid))
    return [evaluate_row(scenario, lam) for lam in grid]


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()


@dataclass(frozen=True)
class Crossing:
    which: Direction
    lam: float
    phase: PhaseLabel
    # True if the parameter drops below 1/2 as lambda increases
    enters_steering: bool


def phase_regions(scenario: Scenario, lambda_min: float | None = None,
                  lambda_max: float | None = None) -> list[tuple[PhaseLabel, float, float]]:
    lam_c = scenario.lambda_c
    lo = scenario.lambda_min if lambda_min is None else lambda_min
    hi = scenario.lambda_max if lambda_max is None else lambda_max
    lo = 1e-3 * lam_c if lo is None else max(lo, 1e-3 * lam_c)
    hi = 3.0 * lam_c if hi is None else hi
    regions = []
    if scenario.phase_policy in (PhasePolicy.AUTO, PhasePolicy.FORCE_NORMAL):
        top = min(hi, lam_c * (1 - CRITICAL_BAND))
        if lo < top:
            regions.append((PhaseLabel.NORMAL, lo, top))
    if scenario.phase_policy in (PhasePolicy.AUTO, PhasePolicy.FORCE_SUPERRADIANT):
        bottom = max(lo, lam_c * (1 + CRITICAL_BAND))
        if bottom < hi:
            regions.append((PhaseLabel.SUPERRADIANT, bottom, hi))
    return regions


def run_thresholds(scenario: Scenario, points: int = 400, lambda_min: float | None = None,
                   lambda_max: float | None = None) -> list[Crossing]:
    """All 1/2-crossings of either steering parameter inside the scenario's phase(s)."""
    hits = []
    for phase, lo, hi in phase_regions(scenario, lambda_min, lambda_max):
        grid = np.linspace(lo, hi, points)
        pairs = [steering_at(scenario.params, float(lam), scenario.branch, phase).pair for lam in grid]
        for which in Direction:
            excess = np.array([p.value(which) for p in pairs]) - THRESHOLD
            for k in np.nonzero(np.sign(excess[:-1]) * np.sign(excess[1:]) < 0)[0]:
                lam = find_threshold(scenario.params, scenario.branch, which,
                                     (float(grid[k]), float(grid[k + 1])))
                hits.append(Crossing(which, lam, phase, bool(excess[k] > 0)))
    return sorted(hits, key=lambda h: h.lam)


def run_witness(scenario: Scenario, epsilon: float = WITNESS_EPSILON,
                same_formula: bool = False) -> tuple[WitnessReport, str, str]:
    report = qpt_witness(scenario.params, scenario.branch, epsilon, same_formula)
    lam_c = report.lambda_c
    text = "\n".join([
        f"QPT witness ({'same-formula baseline' if same_formula else 'normal vs superradiant'}), "
        f"branch={scenario.branch.name}",
        f"  lambda_c = {lam_c:.6f}, epsilon = {epsilon:g}",
        f"  below  E_atoms_to_photons = {report.e_below.e_atoms_to_photons:.10g}"
        f"  E_photons_to_atoms = {report.e_below.e_photons_to_atoms:.10g}",
        f"  above  E_atoms_to_photons = {report.e_above.e_atoms_to_photons:.10g}"
        f"  E_photons_to_atoms = {report.e_above.e_photons_to_atoms:.10g}",
        f"  jump   atoms_to_photons = {report.jump_atoms_to_photons:.6g}"
        f"  photons_to_atoms = {report.jump_photons_to_atoms:.6g}",
        f"  dominant: {report.dominant.value}",
    ])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["side", "lambda", "E_atoms_to_photons", "E_photons_to_atoms"])
    w.writerow(["below", repr(lam_c * (1 - epsilon)), repr(report.e_below.e_atoms_to_photons),
                repr(report.e_below.e_photons_to_atoms)])
    w.writerow(["above", repr(lam_c * (1 + epsilon)), repr(report.e_above.e_atoms_to_photons),
                repr(report.e_above.e_photons_to_atoms)])
    w.writerow(["jump", "", repr(report.jump_atoms_to_photons), repr(report.jump_photons_to_atoms)])
    return report, text, buf.getvalue()


class NearCriticalError(ModelError):
    pass


def run_oracle_check(scenario: Scenario, lam: float, config: FockConfig = FockConfig()) -> tuple[OracleReport, str]:
    lam_c = scenario.lambda_c
    if abs(lam - lam_c) < NEAR_CRITICAL * lam_c:
        raise NearCriticalError(
            f"near-critical exclusion: |lambda - lambda_c|/lambda_c < {NEAR_CRITICAL} "
            f"(lambda={lam}, lambda_c={lam_c:.6f})")
    report = compare(scenario.params.with_lambda(lam), None, config)
    m = report.moments
    lines = [
        f"Fock oracle at lambda = {lam} ({report.phase.value} phase, branch {report.branch.name})",
        f"  cutoffs used: {report.cutoffs_used}, converged: {report.converged}",
        f"  ground energy: {report.ground_energy:.12g}",
        f"  var1 = {m.var1:.12g}, var2 = {m.var2:.12g}, cov = {m.cov:.12g}",
        f"  mean1 = {m.mean1:.12g}, mean2 = {m.mean2:.12g}",
        f"  E_atoms_to_photons = {report.steering.e_atoms_to_photons:.12g}, "
        f"E_photons_to_atoms = {report.steering.e_photons_to_atoms:.12g}",
        "  deltas vs closed form:",
    ]
    lines += [f"    {k:20s} {v:.3e}" for k, v in report.deltas.items()]
    if report.branch is not scenario.branch:
        lines.append(f"  note: scenario branch {scenario.branch.name} is not the ground-state branch; "
                     "the oracle checks the ground-state closed forms")
    return report, "\n".join(lines)


def _scenario_from_args(args) -> Scenario:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.preset:
        scenario = preset(args.preset)
    elif args.config:
        scenario = parse_config(args.config)
    else:
        raise ConfigError("one of --config or --preset is required")
    return scenario.with_overrides(
        branch=Branch.parse(args.branch) if args.branch else None,
        steering_mode=SteeringMode(args.mode) if args.mode else None,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gdmsteer",
        description="EPR steering of the normal and superradiant phases of the impurity-doped Dicke model.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="scenario file (key = value)")
        p.add_argument("--preset", help="figure preset, e.g. fig1")
        p.add_argument("--branch", choices=["pos", "neg"], help="sign of sin(2 theta)")
        p.add_argument("--mode", choices=["paper", "reid"], help="steering parameter form")
        p.add_argument("--out", help="CSV output path")

    p = sub.add_parser("sweep", help="steering parameters on a uniform lambda grid")
    common(p)
    p.add_argument("--lambda-min", type=float)
    p.add_argument("--lambda-max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("thresholds", help="lambda values where a steering parameter crosses 1/2")
    common(p)
    p.add_argument("--lambda-min", type=float)
    p.add_argument("--lambda-max", type=float)
    p.add_argument("--points", type=int, default=400)

    p = sub.add_parser("witness", help="steering jump across lambda_c")
    common(p)
    p.add_argument("--epsilon", type=float, default=WITNESS_EPSILON)
    p.add_argument("--same-formula", action="store_true",
                   help="continuity baseline: normal-phase formula on both sides")

    p = sub.add_parser("oracle-check", help="compare closed forms with a Fock-space ground state")
    common(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--cutoff1", type=int, default=8)
    p.add_argument("--cutoff2", type=int, default=8)

    sub.add_parser("preset-list", help="list the figure presets")
    return parser


def _cmd_preset_list() -> int:
    for name in PRESETS:
        sc = preset(name)
        p = sc.params
        print(f"{name:6s} omega={p.omega:g} chi={p.chi:g} chi_pp={p.chi_pp:g} kappa={p.kappa:g} "
              f"xi1={p.xi1:g} delta={p.delta:g} impurity={'on' if p.impurity_on else 'off'} "
              f"branch={sc.branch.name} phase={sc.phase_policy.value} "
              f"grid=[{sc.lambda_min:g}, {sc.lambda_max:g}] lambda_c={sc.lambda_c:.4f}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "preset-list":
        return _cmd_preset_list()
    try:
        scenario = _scenario_from_args(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "sweep":
            lo = args.lambda_min if args.lambda_min is not None else scenario.lambda_min
            hi = args.lambda_max if args.lambda_max is not None else scenario.lambda_max
            if lo is None or hi is None:
                raise ConfigError("sweep needs --lambda-min/--lambda-max or a scenario grid")
            rows = run_sweep(scenario, lo, hi, args.points or scenario.points, args.workers)
            table = rows_to_csv(rows)
            _emit(table, args.out)
            if not args.out:
                sys.stdout.write(table)
            failed = [r for r in rows if r.error]
            counts: dict[str, int] = {}
            for r in rows:
                if r.steering_class:
                    counts[r.steering_class] = counts.get(r.steering_class, 0) + 1
            print(f"# {len(rows)} rows, lambda_c = {scenario.lambda_c:.6f}, classes: {counts}",
                  file=sys.stderr if not args.out else sys.stdout)
            for r in failed:
                print(f"# lambda={r.lam!r}: {r.error}", file=sys.stderr)
        elif args.command == "thresholds":
            hits = run_thresholds(scenario, args.points, args.lambda_min, args.lambda_max)
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["parameter", "lambda", "phase", "enters_steering"])
            for h in hits:
                w.writerow([h.which.value, repr(h.lam), h.phase.value, str(h.enters_steering).lower()])
            _emit(buf.getvalue(), args.out)
            print(f"lambda_c = {scenario.lambda_c:.6f}, branch {scenario.branch.name}")
            if not hits:
                print("no crossings of 1/2")
            for h in hits:
                print(f"  E_{h.which.value} crosses 1/2 at lambda = {h.lam:.6f} ({h.phase.value}, "
                      f"{'enters' if h.enters_steering else 'leaves'} steering)")
        elif args.command == "witness":
            _, text, table = run_witness(scenario, args.epsilon, args.same_formula)
            _emit(table, args.out)
            print(text)
        elif args.command == "oracle-check":
            config = FockConfig(cutoff1=args.cutoff1, cutoff2=args.cutoff2)
            report, text = run_oracle_check(scenario, args.lam, config)
            print(text)
            if not report.converged:
                print("oracle did not converge within the dimension cap", file=sys.stderr)
                return EXIT_NOT_CONVERGED
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelError, OracleError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
