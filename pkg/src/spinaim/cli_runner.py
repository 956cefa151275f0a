"""Command-line front end: solve, sweep, verify.

One executable with three modes.  The default mode solves a single
model and prints levels as CSV; --sweep varies one parameter over an
exact rational grid, one solve per grid point, in parallel; --verify
runs the built-in verification suites.

Coupling conventions follow the model family.  For the two
symmetric-mode models (jt, rashba) --kappa is the SQUARED coupling,
matching how their strong-coupling tables are indexed and admitting
irrational linear couplings exactly.  For the rotating-wave models
(jc, mjc) --kappa is the linear coupling.  All exact parameters accept
integers or fractions like 3/10; floats are rejected deliberately so a
value is never silently binarized.

Exit codes: 0 success, 1 unusable configuration (unknown model,
uncoupled request, malformed sweep), 2 numeric failure during a solve,
3 verification failure.

Energies are printed with repr, i.e. the shortest string that
round-trips the double; parsing the CSV back recovers bit-identical
values.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

from .aim_engine import Decoupled, NoRealRoots, solve_spectrum
from .exact_algebra import Rat, rat
from .model_catalog import (
    ComplexEnergy,
    closed_form_dirac,
    closed_form_mjc,
    rescaled_seed,
)
from .verify import SUITES, _worker_count, run_all

__all__ = ["RunConfig", "load_config", "save_config", "build_parser",
           "cmd_solve", "cmd_sweep", "cmd_verify", "main"]

_MODELS = ("jt", "rashba", "jc", "mjc", "dirac")
_AIM_MODELS = ("jt", "rashba", "jc")
_SWEEPABLE = ("kappa", "omega", "omega0", "z0", "k")

SOLVE_HEADER = ["level", "energy", "n_converged", "converged",
                "flagged_first_root"]
SWEEP_HEADER = ["sweep_value", "level", "energy", "converged"]


class UsageError(ValueError):
    """Configuration the tool refuses to run (exit code 1)."""


@dataclass(frozen=True)
class RunConfig:
    """Everything one solve needs.  Exact parameters stay strings."""

    model: str = "jt"
    kappa: str = "1"
    omega: str = "1"
    omega0: str = "0"
    k: str = "0"
    z0: str = "0"
    n_max: int = 14
    tol: float = 1e-6
    levels: int = 8
    which_delta: str = "d1"
    m_mass: str = "1"
    c: str = "1"
    omega_prime: str = "1"
    hbar: str = "1"


_INT_KEYS = {"n_max", "levels"}
_FLOAT_KEYS = {"tol"}


def load_config(path: str) -> dict:
    """Flat `key = value` file, # comments, into an override dict."""
    out: dict = {}
    valid = {f.name for f in fields(RunConfig)}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in valid:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            else:
                out[key] = value
    return out


def save_config(cfg: RunConfig, path: str) -> None:
    """Write a config file that load_config maps back onto cfg."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# solver configuration\n")
        for f in fields(RunConfig):
            value = getattr(cfg, f.name)
            rendered = repr(value) if f.name in _FLOAT_KEYS else str(value)
            fh.write(f"{f.name} = {rendered}\n")


def _validated(cfg: RunConfig) -> RunConfig:
    if cfg.model not in _MODELS:
        raise UsageError(f"unknown model {cfg.model!r}; choose from {_MODELS}")
    if cfg.which_delta not in ("d1", "d2", "both"):
        raise UsageError("which_delta must be d1, d2 or both")
    if cfg.n_max < 2:
        raise UsageError("n_max must be >= 2")
    if cfg.levels < 1:
        raise UsageError("levels must be >= 1")
    for name in ("kappa", "omega", "omega0", "k", "z0",
                 "m_mass", "c", "omega_prime", "hbar"):
        try:
            rat(getattr(cfg, name))
        except (ValueError, TypeError) as exc:
            raise UsageError(f"{name}: {exc}") from None
    return cfg


# ---------------------------------------------------------------------------
# solving


def _closed_form_rows(cfg: RunConfig) -> list[tuple]:
    """Level rows for the models with a usable closed form."""
    k = rat(cfg.k)
    energies: list[float] = []
    if cfg.model == "mjc":
        for n in range(1, cfg.levels + 1):
            try:
                lo, hi = closed_form_mjc(k, n, cfg.kappa, cfg.omega0)
            except ComplexEnergy:
                continue
            energies.extend((lo, hi))
    else:
        for n in range(1, cfg.levels + 1):
            for lv in closed_form_dirac(cfg.m_mass, cfg.c, cfg.omega_prime,
                                        cfg.hbar, k, n):
                if lv.is_real:
                    energies.append(lv.energy)
    if not energies:
        raise NoRealRoots("every closed-form branch is complex")
    energies.sort()
    return [(i, e, 0, True, False) for i, e in enumerate(energies[: cfg.levels])]


def _aim_rows(cfg: RunConfig) -> list[tuple]:
    kappa = rat(cfg.kappa)
    if kappa == 0:
        raise UsageError(
            "uncoupled system: the spectrum is the bare oscillator ladder; "
            "use the closed-form models or --verify instead")
    if cfg.model in ("jt", "rashba"):
        seed = rescaled_seed(cfg.model, cfg.kappa, cfg.omega0, cfg.k)
    else:
        seed = rescaled_seed("jc", kappa * kappa, cfg.omega0, cfg.k, cfg.omega)
    res = solve_spectrum(seed, rat(cfg.z0), cfg.n_max, cfg.tol, cfg.which_delta)
    rows = []
    shown = 0
    for lv in res.levels:
        if lv.index >= 0:
            if shown >= cfg.levels:
                continue
            shown += 1
        rows.append((lv.index, lv.energy, lv.n_converged, lv.converged,
                     lv.flagged))
    return rows


def solve_rows(cfg: RunConfig) -> list[tuple]:
    """(index, energy, n_converged, converged, flagged) per level."""
    if cfg.model in _AIM_MODELS:
        return _aim_rows(cfg)
    return _closed_form_rows(cfg)


def _bool_str(b: bool) -> str:
    return "true" if b else "false"


def _write_csv(rows: list[list[str]], out_path: str | None) -> None:
    fh = open(out_path, "w", newline="", encoding="utf-8") if out_path else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(rows)
    finally:
        if out_path:
            fh.close()


def cmd_solve(cfg: RunConfig, out_path: str | None) -> int:
    rows = [SOLVE_HEADER]
    for idx, energy, n_conv, converged, flagged in solve_rows(cfg):
        rows.append([str(idx), repr(energy),
                     "" if n_conv is None else str(n_conv),
                     _bool_str(converged), _bool_str(flagged)])
    _write_csv(rows, out_path)
    return 0


# ---------------------------------------------------------------------------
# sweeping


def _rational_grid(start: Rat, stop: Rat, steps: int) -> list[Rat]:
    step = (stop - start) / (steps - 1)
    return [start + i * step for i in range(steps)]


def _sweep_worker(args: tuple) -> tuple[float, list | None]:
    cfg_dict, param, value = args
    cfg = RunConfig(**cfg_dict)
    cfg = replace(cfg, **{param: value})
    try:
        rows = solve_rows(cfg)
    except (UsageError, NoRealRoots, Decoupled, ComplexEnergy):
        return float(rat(value)), None
    return float(rat(value)), [(r[0], r[1], r[3]) for r in rows if r[0] >= 0]


def cmd_sweep(cfg: RunConfig, spec: str, out_path: str | None) -> int:
    parts = spec.split(":")
    if len(parts) != 4:
        raise UsageError("--sweep expects param:start:stop:steps")
    param, start_s, stop_s, steps_s = parts
    if param not in _SWEEPABLE:
        raise UsageError(f"cannot sweep {param!r}; choose from {_SWEEPABLE}")
    try:
        start, stop, steps = rat(start_s), rat(stop_s), int(steps_s)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad sweep spec: {exc}") from None
    if steps < 2:
        raise UsageError("sweep needs at least 2 steps")
    if param == "omega" and cfg.model != "jc":
        raise UsageError("only the jc model has a tunable omega")

    cfg_dict = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    jobs = [(cfg_dict, param, str(v)) for v in _rational_grid(start, stop, steps)]
    workers = _worker_count(len(jobs))
    if workers == 1:
        results = [_sweep_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_worker, jobs))

    rows = [SWEEP_HEADER]
    for value, levels in results:
        if levels is None:
            rows.append([repr(value), "", "", "false"])
            continue
        for idx, energy, converged in levels:
            rows.append([repr(value), str(idx), repr(energy),
                         _bool_str(converged)])
    _write_csv(rows, out_path)
    return 0


# ---------------------------------------------------------------------------
# verifying


def cmd_verify(names: list[str]) -> int:
    for name in names:
        if name not in SUITES:
            raise UsageError(f"unknown suite {name!r}; choose from "
                             f"{tuple(SUITES)}")
    lines = run_all(names or None)
    failed = 0
    for line in lines:
        print(line.render())
        failed += 0 if line.ok else 1
    total = len(lines)
    print(f"{total - failed}/{total} checks passed")
    return 3 if failed else 0


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spinaim",
        description="Exact asymptotic iteration for spin-boson spectra.")
    p.add_argument("--model", choices=_MODELS,
                   help="model family (default jt)")
    p.add_argument("--kappa", help="coupling; squared for jt/rashba, "
                                   "linear for jc/mjc (exact rational)")
    p.add_argument("--omega", help="mode frequency for jc (exact rational)")
    p.add_argument("--omega0", help="level splitting (exact rational)")
    p.add_argument("--k", help="sector label, may be fractional")
    p.add_argument("--z0", help="quantization evaluation point")
    p.add_argument("--n-max", type=int, dest="n_max",
                   help="highest iteration order (default 14)")
    p.add_argument("--tol", type=float, help="trajectory convergence tolerance")
    p.add_argument("--levels", type=int, help="physical levels to print")
    p.add_argument("--which-delta", dest="which_delta",
                   choices=("d1", "d2", "both"),
                   help="quantization channel (default d1)")
    p.add_argument("--config", metavar="FILE", help="read defaults from FILE")
    p.add_argument("--save-config", metavar="FILE", dest="save_config",
                   help="write the effective configuration and exit")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="override any configuration key, repeatable")
    p.add_argument("--sweep", metavar="PARAM:START:STOP:STEPS",
                   help="sweep one parameter instead of a single solve")
    p.add_argument("--out", metavar="FILE", help="write CSV here, not stdout")
    p.add_argument("--verify", nargs="*", metavar="SUITE",
                   help="run verification suites (all when none named)")
    return p


def _effective_config(args: argparse.Namespace) -> RunConfig:
    overrides: dict = {}
    if args.config:
        overrides.update(load_config(args.config))
    for item in args.param:
        if "=" not in item:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        names = {f.name for f in fields(RunConfig)}
        if key not in names:
            raise UsageError(f"--param: unknown key {key!r}")
        if key in _INT_KEYS:
            overrides[key] = int(value)
        elif key in _FLOAT_KEYS:
            overrides[key] = float(value)
        else:
            overrides[key] = value.strip()
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = value
    return _validated(RunConfig(**overrides))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.verify is not None:
            return cmd_verify(args.verify)
        cfg = _effective_config(args)
        if args.save_config:
            save_config(cfg, args.save_config)
            return 0
        if args.sweep:
            return cmd_sweep(cfg, args.sweep, args.out)
        return cmd_solve(cfg, args.out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NoRealRoots, Decoupled, ComplexEnergy) as exc:
        print(f"solve failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
