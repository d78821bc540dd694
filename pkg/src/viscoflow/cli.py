"""Command line interface: `viscoflow <subcommand> --config <path>`.

Subcommands: speeds, stability, dispersion, simulate, blowup-cert.
Exit codes: 0 success, 2 configuration error, 3 finite-time breakdown
detected by `simulate` (a successful detection, distinct from a crash),
4 internal numerical failure.

All CSV output uses the shortest round-trip decimal form of each value, so
identical configurations yield bit-identical files on one platform.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, diagnostics, solver, stability
from .config import ConfigError, ScenarioConfig, apply_overrides, format_config, \
    material_law, parse_config, reference_state
from .materials import BulkState, ShearState
from .quasilinear import assemble_bulk, assemble_shear, \
    characteristic_speeds_bulk_closed, characteristic_speeds_shear_closed, \
    characteristic_speeds_numeric

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BREAKDOWN = 3
EXIT_NUMERICAL = 4


@dataclass
class RunRecord:
    subcommand: str
    config_echo: str          # canonical text; alone reproduces the run
    outputs: list[str]
    status: str
    wall_time: float
    version: str
    exit_code: int = EXIT_OK

    def describe(self) -> str:
        parts = [
            f"subcommand = {self.subcommand}",
            f"status     = {self.status}",
            f"wall_time  = {self.wall_time:.3f} s",
            f"version    = viscoflow {self.version}",
            "outputs    = " + (", ".join(self.outputs) if self.outputs else "(none)"),
            "",
            "# resolved configuration",
            self.config_echo,
        ]
        return "\n".join(parts)


def _fmt(value) -> str:
    return repr(float(value))


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, row in enumerate(rows):
            if i == 0:
                fh.write(",".join(str(c) for c in row) + "\n")
            else:
                fh.write(",".join(_fmt(c) for c in row) + "\n")


def _background(cfg: ScenarioConfig) -> stability.Background:
    return stability.equilibrium_background(material_law(cfg), reference_state(cfg))


def _equilibrium_system(cfg: ScenarioConfig):
    law = material_law(cfg)
    ref = reference_state(cfg)
    if cfg.system == "bulk":
        state = BulkState(ref.rho_bar, ref.v_bar, ref.Pi_bar)
        return assemble_bulk(state, law), state, law
    state = ShearState(ref.rho_bar, ref.v_bar,
                       (ref.Pi_bar, 0.0, 0.0, ref.Pi_bar, 0.0, ref.Pi_bar))
    return assemble_shear(state, law), state, law


def cmd_speeds(cfg: ScenarioConfig, out_dir: Path | None, args) -> tuple[int, list[str]]:
    system, state, law = _equilibrium_system(cfg)
    direction = (1.0, 0.0, 0.0)
    report = characteristic_speeds_numeric(system, direction,
                                           cond_cap=cfg.tolerances["eig_cond_cap"])
    if cfg.system == "bulk":
        closed = characteristic_speeds_bulk_closed(state, law, direction)
    else:
        closed = characteristic_speeds_shear_closed(state, law, direction)

    print(f"characteristic speeds, {cfg.system} system, direction x")
    print(f"  symmetric matrices : {report.symmetric}")
    print(f"  a0 positive definite: {report.a0_posdef}")
    print(f"  eigenvector condition: {report.eigenvector_condition:.6g}")
    print(f"  verdict            : {report.hyperbolic_verdict}")
    print(f"  {'speed':>18}  multiplicity")
    pos = 0
    for mult in report.multiplicities:
        print(f"  {report.speeds[pos]:>18.12g}  {mult}")
        pos += mult
    print("  closed-form speed set: " + ", ".join(f"{s:.12g}" for s in closed))

    outputs = []
    if out_dir is not None:
        path = out_dir / "speeds.csv"
        rows = [("speed", "multiplicity")]
        pos = 0
        for mult in report.multiplicities:
            rows.append((report.speeds[pos], float(mult)))
            pos += mult
        _write_csv(path, rows)
        outputs.append(str(path))
    return EXIT_OK, outputs


def cmd_stability(cfg: ScenarioConfig, out_dir: Path | None, args) -> tuple[int, list[str]]:
    bg = _background(cfg)
    k = (args.k, 0.0, 0.0)
    band = cfg.tolerances["marginal_band"]
    if cfg.system == "bulk":
        problem = stability.bulk_dispersion(bg, k)
        verdict = stability.routh_hurwitz(problem, band)
        print(f"bulk dispersion cubic at |k| = {args.k}: "
              + ", ".join(_fmt(c) for c in problem.poly))
        for i, d in enumerate(verdict.deltas, start=1):
            print(f"  Delta_{i} = {_fmt(d)}")
        _print_roots(verdict)
        print("  transverse branch (k orthogonal to dv): neutral, Omega = 0")
    else:
        disp = stability.shear_dispersion(bg, k)
        verdicts = stability.shear_verdict(disp, band)
        stable = all(v.stable for v in verdicts.values())
        for name, poly in disp.factors.items():
            v = verdicts[name]
            print(f"{name} factor: " + ", ".join(_fmt(c) for c in poly))
            _print_roots(v, indent="  ")
        print(f"overall verdict: {'stable' if stable else 'unstable'}")
    return EXIT_OK, []


def _print_roots(verdict: stability.StabilityVerdict, indent: str = "  ") -> None:
    for r in verdict.roots:
        print(f"{indent}root = {r.real:+.12g} {r.imag:+.12g}i")
    label = "marginal" if verdict.marginal else ("stable" if verdict.stable else "unstable")
    print(f"{indent}max real part = {verdict.max_real_part:.12g} -> {label}")


def cmd_dispersion(cfg: ScenarioConfig, out_dir: Path | None, args) -> tuple[int, list[str]]:
    try:
        kmin, kmax, count = args.sweep.split(":")
        kmin, kmax, count = float(kmin), float(kmax), int(count)
        if count < 1 or kmin <= 0 or kmax < kmin:
            raise ValueError
    except ValueError:
        raise ConfigError([(0, f"--sweep must be kmin:kmax:n with 0 < kmin <= kmax, "
                               f"got {args.sweep!r}")])
    bg = _background(cfg)
    ks = np.linspace(kmin, kmax, count)
    rows = []
    n_branches = 3 if cfg.system == "bulk" else 8
    header = ["k"]
    for i in range(1, n_branches + 1):
        header += [f"re_omega_{i}", f"im_omega_{i}"]
    rows.append(tuple(header))
    for k in ks:
        problem_roots = _branch_roots(cfg.system, bg, float(k))
        shift = bg.v0[0] * k
        row = [k]
        for x in problem_roots:
            # x = -i Omega, omega = Omega + v0.k: lab frequency and growth rate
            row += [shift - x.imag, x.real]
        rows.append(tuple(row))
    if out_dir is not None:
        path = out_dir / "dispersion.csv"
        _write_csv(path, rows)
        return EXIT_OK, [str(path)]
    for i, row in enumerate(rows):
        print(",".join(str(c) if i == 0 else _fmt(c) for c in row))
    return EXIT_OK, []


def _branch_roots(system: str, bg: stability.Background, k: float) -> np.ndarray:
    if system == "bulk":
        roots, _ = stability.poly_roots(stability.bulk_dispersion(bg, (k, 0, 0)).poly)
        return roots
    disp = stability.shear_dispersion(bg, (k, 0, 0))
    relax_root, _ = stability.poly_roots(disp.relaxation)
    trans, _ = stability.poly_roots(disp.transverse)
    acoustic, _ = stability.poly_roots(disp.acoustic)
    roots = np.concatenate([np.repeat(relax_root, 3), trans, acoustic])
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def _write_snapshot(path: Path, sim: solver.Simulation) -> None:
    header = ("t", "cell_center") + tuple(sim.fields.names)
    rows = [header]
    x = sim.grid.centers_interior
    cols = [sim.fields.get(name) for name in sim.fields.names]
    for j in range(sim.grid.n_cells):
        rows.append((sim.t, x[j]) + tuple(col[j] for col in cols))
    _write_csv(path, rows)


def cmd_simulate(cfg: ScenarioConfig, out_dir: Path | None, args) -> tuple[int, list[str]]:
    sim = solver.init_scenario(cfg)
    outputs: list[str] = []
    snap_times = sorted(set(cfg.snapshot_times))
    snap_count = 0

    def write_snap():
        nonlocal snap_count
        if out_dir is None:
            return
        path = out_dir / f"snapshot_{snap_count:03d}.csv"
        _write_snapshot(path, sim)
        outputs.append(str(path))
        snap_count += 1

    print(f"initial report: max_rho0={_fmt(sim.initial.max_rho0)} "
          f"dM0={_fmt(sim.initial.dm0)} F0={_fmt(sim.initial.f0)} G0={_fmt(sim.initial.g0)}")

    full_series = diagnostics.DiagnosticSeries()
    full_series.record(sim, 0.0)
    if snap_times and snap_times[0] == 0.0:
        write_snap()
        snap_times = snap_times[1:]

    stops = [t for t in snap_times if t <= cfg.t_end] + [cfg.t_end]
    outcome = solver.StepOutcome("ok", 0.0, 0.0, 0.0)
    for t_stop in stops:
        if t_stop <= sim.t:
            continue
        outcome, series = solver.run(sim, t_stop, series_cadence=cfg.series_cadence)
        for name in ("t", "dt", "F", "dM", "G", "max_grad_u", "max_grad_rho"):
            getattr(full_series, name).extend(getattr(series, name)[1:])
        if series.breakdown_time is not None:
            full_series.mark_breakdown(series.breakdown_time, series.verdict)
        if outcome.status != "ok":
            break
        if t_stop != cfg.t_end or t_stop in snap_times:
            write_snap()

    if args.diagnostics:
        for row in full_series.csv_rows():
            print(",".join(str(c) if isinstance(c, str) else _fmt(c) for c in row))
    if out_dir is not None:
        path = out_dir / "series.csv"
        _write_csv(path, full_series.csv_rows())
        outputs.append(str(path))

    print(f"final status: {outcome.status} at t={_fmt(sim.t)} "
          f"after {sim.step_count} steps"
          + (f" ({outcome.message})" if outcome.message else ""))
    if outcome.status == "breakdown":
        return EXIT_BREAKDOWN, outputs
    if outcome.status == "invalid_state":
        return EXIT_NUMERICAL, outputs
    return EXIT_OK, outputs


def cmd_blowup_cert(cfg: ScenarioConfig, out_dir: Path | None, args) -> tuple[int, list[str]]:
    sim = solver.init_scenario(cfg)
    try:
        cert = diagnostics.certificate(sim)
    except diagnostics.CertificateError as exc:
        print(f"certificate refused: {exc}", file=sys.stderr)
        return EXIT_CONFIG, []
    print(cert.describe())
    return EXIT_OK, []


_COMMANDS = {
    "speeds": cmd_speeds,
    "stability": cmd_stability,
    "dispersion": cmd_dispersion,
    "simulate": cmd_simulate,
    "blowup-cert": cmd_blowup_cert,
}


def dispatch(subcommand: str, cfg: ScenarioConfig, out_dir: Path | None, args) -> RunRecord:
    start = time.perf_counter()
    exit_code, outputs = _COMMANDS[subcommand](cfg, out_dir, args)
    return RunRecord(subcommand=subcommand, config_echo=format_config(cfg),
                     outputs=outputs,
                     status={EXIT_OK: "ok", EXIT_BREAKDOWN: "breakdown",
                             EXIT_CONFIG: "config-error",
                             EXIT_NUMERICAL: "numerical-failure"}[exit_code],
                     wall_time=time.perf_counter() - start, version=__version__,
                     exit_code=exit_code)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viscoflow",
        description="Analyze and evolve bulk- and shear-viscous relaxation fluids.")
    parser.add_argument("--version", action="version", version=f"viscoflow {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="path to a scenario config file")
        p.add_argument("--out", default=None, help="directory for CSV outputs and run record")
        p.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="override a config entry (repeatable)")

    common(sub.add_parser("speeds", help="characteristic speeds and hyperbolicity report"))
    p = sub.add_parser("stability", help="dispersion polynomial, determinants, roots, verdict")
    common(p)
    p.add_argument("--k", type=float, default=1.0, help="wavenumber magnitude (default 1)")
    p = sub.add_parser("dispersion", help="CSV sweep of dispersion roots over k")
    common(p)
    p.add_argument("--sweep", required=True, metavar="KMIN:KMAX:N")
    p = sub.add_parser("simulate", help="evolve the configured scenario")
    common(p)
    p.add_argument("--diagnostics", action="store_true",
                   help="stream the diagnostic series CSV to stdout")
    common(sub.add_parser("blowup-cert", help="evaluate the finite-lifespan certificate"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text)
        if args.override:
            cfg = apply_overrides(cfg, args.override)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG

    out_dir = None
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)

    try:
        record = dispatch(args.subcommand, cfg, out_dir, args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, solver.SolverError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    if out_dir is not None:
        (out_dir / "run_record.txt").write_text(record.describe(), encoding="utf-8")
    return record.exit_code


if __name__ == "__main__":
    sys.exit(main())
