"""Command-line surface.

Subcommands:
    simulate    evolve the candidate trajectory alone and write its trace
    twin        run a twin experiment and write the full entropy trace
    gronwall    twin + Gronwall certification (exit 1 on failure)
    uniqueness  zero-perturbation entropy-collapse study over refinements
    energy      twin + per-sample-pair energy-inequality audit
    suite       a named battery of checks (gl-smoke, sphere-smoke, full)

Exit codes are the process-level contract: 0 all requested checks passed,
1 a check failed, 2 configuration/usage error, 3 solver abort.  Every
command writes a machine-readable JSON manifest next to its outputs; the
human-readable report goes to stdout.

Suite experiments are independent; setting NEMLAB_WORKERS to an integer
greater than 1 runs them in that many worker processes (absent: serial).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .config import ConfigError, canonical_text, parse_config
from .constitutive import System
from .dynamics import BoundarySpec, SolverError, evolve
from .functionals import dissipation, energy, mass
from .grid import Grid1D
from .traceio import write_columns, write_trace
from .verifier import (
    ExperimentConfig,
    Perturbation,
    check_energy,
    check_gronwall,
    check_uniqueness,
    make_initial_data,
    run_twin,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_SOLVER_ABORT = 3

WORKERS_ENV = "NEMLAB_WORKERS"


@dataclass
class RunManifest:
    """Machine-readable record of one command invocation."""

    command: str
    config_sha256: str
    version: str
    gamma_regime: str
    duration_seconds: float
    checks: Dict[str, bool] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)

    @property
    def passes(self) -> bool:
        return all(self.checks.values())

    def write(self, path: str) -> None:
        doc = asdict(self)
        doc["passes"] = self.passes
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _gamma_regime(gamma: float) -> str:
    if gamma > 1.5:
        return "gamma > 3/2 (weak-existence range)"
    return "1 < gamma <= 3/2 (uniqueness-only range)"


def _digest(text: str) -> str:
    return hashlib.sha256(canonical_text(text).encode()).hexdigest()


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def _load_config(path: str) -> Tuple[ExperimentConfig, str]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text), text


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_simulate(args) -> int:
    cfg, text = _load_config(args.config)
    t0 = time.time()
    params = cfg.params
    grid = cfg.grid_candidate
    init = make_initial_data(cfg.initial_preset, grid, params, cfg.perturbation)
    bc = BoundarySpec.for_system(params.system, init.d0)
    samples = []
    evolve(
        init, cfg.t_end, cfg.dt_candidate, params, grid, bc,
        observer=lambda st, t: samples.append((t, st)),
        sample_interval=cfg.resolved_sample_interval(),
        options=cfg.solver,
    )
    cols = {
        "t": [t for t, _ in samples],
        "energy_candidate": [energy(st, params) for _, st in samples],
        "dissipation_candidate": [dissipation(st, params) for _, st in samples],
        "mass_candidate": [mass(st) for _, st in samples],
    }
    if params.system is System.SPHERE:
        cols["sphere_defect"] = [
            float(np.max(np.abs(np.sqrt(np.sum(st.d.values**2, axis=0)) - 1.0)))
            for _, st in samples
        ]
    write_columns(cols, args.output)

    masses = np.asarray(cols["mass_candidate"])
    drift = float(np.max(np.abs(masses - masses[0])) / abs(masses[0]))
    energies = np.asarray(cols["energy_candidate"])
    print(
        f"simulate: {len(samples)} samples to t={cfg.t_end}; "
        f"E {energies[0]:.6g} -> {energies[-1]:.6g}; mass drift {drift:.2e}"
    )
    manifest = RunManifest(
        command="simulate",
        config_sha256=_digest(text),
        version=__version__,
        gamma_regime=_gamma_regime(params.gamma),
        duration_seconds=time.time() - t0,
        checks={},
        outputs=[args.output],
    )
    manifest.write(args.manifest)
    print(f"trace: {args.output}\nmanifest: {args.manifest}")
    return EXIT_OK


def _cmd_twin(args) -> int:
    cfg, text = _load_config(args.config)
    t0 = time.time()
    trace = run_twin(cfg)
    write_trace(trace, args.output)
    sup_e = float(np.max(trace.entropy))
    print(
        f"twin: {len(trace)} samples to t={cfg.t_end}; "
        f"entropy {trace.entropy[0]:.6e} -> sup {sup_e:.6e}"
    )
    manifest = RunManifest(
        command="twin",
        config_sha256=_digest(text),
        version=__version__,
        gamma_regime=_gamma_regime(cfg.params.gamma),
        duration_seconds=time.time() - t0,
        checks={},
        outputs=[args.output],
    )
    manifest.write(args.manifest)
    print(f"trace: {args.output}\nmanifest: {args.manifest}")
    return EXIT_OK


def _cmd_gronwall(args) -> int:
    cfg, text = _load_config(args.config)
    t0 = time.time()
    trace = run_twin(cfg)
    write_trace(trace, args.output)
    rep = check_gronwall(trace, cfg.gronwall)
    _report(
        "gronwall",
        rep.passes,
        f"minimal_c_h={rep.minimal_c_h:.6g} worst_time={rep.worst_time:.6g} "
        f"slack={rep.slack:g}"
        + (f" (checked at c_h={rep.c_h_used:g})" if rep.c_h_used is not None else ""),
    )
    manifest = RunManifest(
        command="gronwall",
        config_sha256=_digest(text),
        version=__version__,
        gamma_regime=_gamma_regime(cfg.params.gamma),
        duration_seconds=time.time() - t0,
        checks={"gronwall": rep.passes},
        outputs=[args.output],
    )
    manifest.write(args.manifest)
    print(f"trace: {args.output}\nmanifest: {args.manifest}")
    return EXIT_OK if rep.passes else EXIT_CHECK_FAILED


def _parse_levels(levels_arg: str, base_n: int) -> List[int]:
    if levels_arg:
        try:
            levels = [int(tok) for tok in levels_arg.split(",")]
        except ValueError:
            raise ConfigError(
                f"--levels must be comma-separated integers: {levels_arg!r}"
            )
    else:
        levels = [base_n, 2 * (base_n - 1) + 1, 4 * (base_n - 1) + 1]
    if len(levels) < 3:
        raise ConfigError("--levels needs at least 3 entries")
    return levels


def _cmd_uniqueness(args) -> int:
    cfg, text = _load_config(args.config)
    levels = _parse_levels(args.levels, cfg.grid_candidate.n_nodes)
    t0 = time.time()
    rep = check_uniqueness(cfg, levels)
    sups = " ".join(f"{s:.3e}" for s in rep.sup_entropy)
    orders = "exact" if rep.exact else " ".join(f"{o:.2f}" for o in rep.orders)
    _report("uniqueness", rep.passes, f"levels={levels} sup_entropy=[{sups}] orders=[{orders}]")
    manifest = RunManifest(
        command="uniqueness",
        config_sha256=_digest(text),
        version=__version__,
        gamma_regime=_gamma_regime(cfg.params.gamma),
        duration_seconds=time.time() - t0,
        checks={"uniqueness": rep.passes},
        outputs=[],
    )
    manifest.write(args.manifest)
    print(f"manifest: {args.manifest}")
    return EXIT_OK if rep.passes else EXIT_CHECK_FAILED


def _cmd_energy(args) -> int:
    cfg, text = _load_config(args.config)
    t0 = time.time()
    trace = run_twin(cfg)
    write_trace(trace, args.output)
    rep = check_energy(trace)
    _report(
        "energy",
        rep.passes,
        f"max_violation candidate={rep.max_violation_candidate:.3e} "
        f"reference={rep.max_violation_reference:.3e} tol={rep.tol:g}",
    )
    manifest = RunManifest(
        command="energy",
        config_sha256=_digest(text),
        version=__version__,
        gamma_regime=_gamma_regime(cfg.params.gamma),
        duration_seconds=time.time() - t0,
        checks={"energy": rep.passes},
        outputs=[args.output],
    )
    manifest.write(args.manifest)
    print(f"trace: {args.output}\nmanifest: {args.manifest}")
    return EXIT_OK if rep.passes else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------


def _suite_config(system: System, n: int, t_end: float, dt: float,
                  amplitude: float = 0.0, mode: int = 2,
                  n_ref: Optional[int] = None,
                  interval: Optional[float] = None) -> ExperimentConfig:
    preset = "gl-smooth" if system is System.GL else "sphere-smooth"
    from .constitutive import Params

    return ExperimentConfig(
        params=Params(system=system),
        grid_reference=Grid1D(n_ref or n, 0.0, 1.0),
        grid_candidate=Grid1D(n, 0.0, 1.0),
        dt_reference=dt,
        dt_candidate=dt,
        t_end=t_end,
        initial_preset=preset,
        perturbation=Perturbation(amplitude=amplitude, mode=mode),
        sample_interval=interval if interval is not None else t_end / 50.0,
    )


def _check_twin_floor(cfg: ExperimentConfig, trace_path: str) -> Tuple[bool, str]:
    trace = run_twin(cfg)
    write_trace(trace, trace_path)
    sup_e = float(np.max(trace.entropy))
    masses = trace.mass_candidate
    drift = float(np.max(np.abs(masses - masses[0])) / abs(masses[0]))
    ok = sup_e <= 1e-12 and drift <= 1e-12
    detail = f"sup_entropy={sup_e:.3e} mass_drift={drift:.3e}"
    if cfg.params.system is System.SPHERE:
        defect = float(np.max(trace.sphere_defect))
        ok = ok and defect <= 1e-10
        detail += f" unit_defect={defect:.3e}"
    e_rep = check_energy(trace)
    ok = ok and e_rep.passes
    detail += f" energy_viol={max(e_rep.max_violation_candidate, e_rep.max_violation_reference):.3e}"
    return ok, detail


def _check_gronwall_cert(cfg: ExperimentConfig, trace_path: str) -> Tuple[bool, str]:
    trace = run_twin(cfg)
    write_trace(trace, trace_path)
    rep = check_gronwall(trace, cfg.gronwall)
    return rep.passes, f"minimal_c_h={rep.minimal_c_h:.6g} worst_time={rep.worst_time:.4g}"


def _check_collapse(cfg: ExperimentConfig, levels: Sequence[int]) -> Tuple[bool, str]:
    rep = check_uniqueness(cfg, levels)
    orders = "exact" if rep.exact else " ".join(f"{o:.2f}" for o in rep.orders)
    return rep.passes, f"levels={list(levels)} orders=[{orders}]"


def _suite_task(task: Tuple[str, str, dict]) -> Tuple[str, bool, str]:
    """One independent suite experiment (safe to run in a worker process)."""
    name, kind, payload = task
    system = System.from_name(payload["system"])
    try:
        if kind == "floor":
            cfg = _suite_config(system, payload["n"], payload["t_end"], payload["dt"],
                                interval=payload.get("interval"))
            ok, detail = _check_twin_floor(cfg, payload["trace_path"])
        elif kind == "gronwall":
            cfg = _suite_config(
                system, payload["n"], payload["t_end"], payload["dt"],
                amplitude=payload["amplitude"], mode=payload["mode"],
            )
            ok, detail = _check_gronwall_cert(cfg, payload["trace_path"])
        elif kind == "collapse":
            base_n = payload["levels"][0]
            base = _suite_config(
                system, base_n, payload["t_end"], payload["kappa"] / (base_n - 1) ** 2,
                n_ref=payload["n_ref"],
            )
            # reference step also scales with its own dx^2; the factor 4
            # keeps its error well below the finest candidate level at a
            # quarter of the cost
            base = replace(
                base, dt_reference=4.0 * payload["kappa"] / (payload["n_ref"] - 1) ** 2
            )
            ok, detail = _check_collapse(base, payload["levels"])
        else:
            return name, False, f"unknown suite task kind {kind!r}"
    except SolverError as exc:
        return name, False, f"solver abort: {exc}"
    return name, ok, detail


_SMOKE = {
    "gl-smoke": System.GL,
    "sphere-smoke": System.SPHERE,
}


def _suite_tasks(preset: str, outdir: str) -> List[Tuple[str, str, dict]]:
    def tp(name: str) -> str:
        return os.path.join(outdir, f"{name}.csv")

    tasks: List[Tuple[str, str, dict]] = []
    if preset in _SMOKE:
        sysname = _SMOKE[preset].value
        tasks.append((
            f"{sysname}-identical-twin", "floor",
            {"system": sysname, "n": 97, "t_end": 0.05, "dt": 2e-4,
             "trace_path": tp(f"{preset}-identical-twin")},
        ))
        tasks.append((
            f"{sysname}-gronwall", "gronwall",
            {"system": sysname, "n": 97, "t_end": 0.05, "dt": 2e-4,
             "amplitude": 1e-3, "mode": 2,
             "trace_path": tp(f"{preset}-gronwall")},
        ))
    elif preset == "full":
        for sysname in ("gl", "sphere"):
            tasks.append((
                f"{sysname}-identical-twin", "floor",
                {"system": sysname, "n": 257, "t_end": 0.2, "dt": 5e-5,
                 "interval": 1e-3,
                 "trace_path": tp(f"full-{sysname}-identical-twin")},
            ))
            tasks.append((
                f"{sysname}-gronwall", "gronwall",
                {"system": sysname, "n": 257, "t_end": 0.1, "dt": 0.4 / 256**2,
                 "amplitude": 1e-3, "mode": 2,
                 "trace_path": tp(f"full-{sysname}-gronwall")},
            ))
            tasks.append((
                f"{sysname}-collapse", "collapse",
                {"system": sysname, "levels": [65, 129, 257], "n_ref": 1025,
                 "t_end": 0.1, "kappa": 0.4},
            ))
    else:
        raise ConfigError(
            f"unknown suite preset {preset!r}; choose from "
            f"{', '.join(sorted(_SMOKE))}, full"
        )
    return tasks


def _cmd_suite(args) -> int:
    outdir = args.output_dir
    os.makedirs(outdir, exist_ok=True)
    tasks = _suite_tasks(args.preset, outdir)
    t0 = time.time()

    workers = 0
    env_val = os.environ.get(WORKERS_ENV, "").strip()
    if env_val:
        try:
            workers = int(env_val)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env_val!r}")

    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_suite_task, tasks))
    else:
        results = [_suite_task(t) for t in tasks]

    checks: Dict[str, bool] = {}
    for name, ok, detail in results:
        checks[name] = ok
        _report(name, ok, detail)

    outputs = sorted(
        os.path.join(outdir, f)
        for f in os.listdir(outdir)
        if f.endswith(".csv")
    )
    manifest = RunManifest(
        command=f"suite --preset {args.preset}",
        config_sha256=_digest(json.dumps({"preset": args.preset})),
        version=__version__,
        gamma_regime=_gamma_regime(2.0),
        duration_seconds=time.time() - t0,
        checks=checks,
        outputs=outputs,
    )
    manifest_path = os.path.join(outdir, f"{args.preset}-manifest.json")
    manifest.write(manifest_path)
    print(f"manifest: {manifest_path}")
    return EXIT_OK if manifest.passes else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nemlab",
        description="Twin-experiment laboratory for compressible "
        "liquid-crystal flows with relative-entropy certification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_output=True):
        p.add_argument("-c", "--config", required=True, help="JSON config path")
        if needs_output:
            p.add_argument("-o", "--output", default="trace.csv", help="trace CSV path")
        p.add_argument("--manifest", default="manifest.json", help="manifest JSON path")

    add_common(sub.add_parser("simulate", help="single candidate trajectory"))
    add_common(sub.add_parser("twin", help="twin experiment trace"))
    add_common(sub.add_parser("gronwall", help="twin + Gronwall certification"))
    p_u = sub.add_parser("uniqueness", help="entropy collapse under refinement")
    add_common(p_u, needs_output=False)
    p_u.add_argument(
        "--levels", default="",
        help="comma-separated candidate node counts (default: 3 dyadic levels "
        "from grid_candidate.n)",
    )
    add_common(sub.add_parser("energy", help="twin + energy-inequality audit"))
    p_s = sub.add_parser("suite", help="named battery of checks")
    p_s.add_argument(
        "--preset", required=True, choices=sorted(_SMOKE) + ["full"],
        help="battery to run",
    )
    p_s.add_argument("--output-dir", default=".", help="directory for outputs")
    return parser


_COMMANDS = {
    "simulate": _cmd_simulate,
    "twin": _cmd_twin,
    "gronwall": _cmd_gronwall,
    "uniqueness": _cmd_uniqueness,
    "energy": _cmd_energy,
    "suite": _cmd_suite,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; normalize unknown input to 2
        return EXIT_CONFIG_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except SolverError as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return EXIT_SOLVER_ABORT


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
