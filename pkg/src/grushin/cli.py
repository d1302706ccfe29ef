"""Command-line front end: ``grushin <command> [flags]``.

Exit codes: 0 success, 1 numerical failure, 2 invalid configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass

import numpy as np

from .extensions import ConfigError, ExtensionSpec, Family, GrushinParams, negative_count
from .fibre_solver import ShootingError
from .scattering import coefficients, sweep, sweep_csv
from .spectra import (
    SpectrumConfig,
    assemble_spectrum,
    friedrichs_E0_bounds,
    friedrichs_fibre_ground,
    ground_state,
)
from .specfun import DomainError
from .verify import report_json, run_checks
from .zero_mode import NoSuchEigenvalue

__all__ = ["Sweep", "RunConfig", "parse_complex", "parse_sweep", "run", "main"]

COMMANDS = ("spectrum", "ground-state", "scatter", "bounds", "wavefunction", "verify")

_NUM = r"[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?"
_COMPLEX = re.compile(rf"^\s*([+-]?{_NUM})\s*(?:([+-])\s*({_NUM})?i)?\s*$")


def parse_complex(text: str, field_name: str = "a") -> complex:
    """Parse ``re+imi`` (``1+0i``, ``0-2i``, ``0.5+i``) or a plain real number."""
    m = _COMPLEX.match(text)
    if not m:
        raise ConfigError(field_name, f"expected re+imi such as 1+0i or 0-2i, got {text!r}")
    re_part = float(m.group(1))
    if m.group(2) is None:
        return complex(re_part, 0.0)
    im = float(m.group(3)) if m.group(3) else 1.0
    return complex(re_part, -im if m.group(2) == "-" else im)


@dataclass(frozen=True)
class Sweep:
    variable: str
    start: float
    stop: float
    count: int
    log: bool = False

    def __post_init__(self):
        flag = f"{self.variable}-sweep"
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError(flag, "start and stop must be finite")
        if self.count < 2:
            raise ConfigError(flag, f"count must be at least 2, got {self.count}")
        if self.log and not (self.start > 0 and self.stop > 0):
            raise ConfigError(flag, "a log sweep needs positive start and stop")

    def values(self) -> list[float]:
        if self.log:
            return [float(v) for v in np.logspace(math.log10(self.start), math.log10(self.stop), self.count)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]


def parse_sweep(text: str, variable: str) -> Sweep:
    """Parse ``start:stop:count[:log]``."""
    flag = f"{variable}-sweep"
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise ConfigError(flag, f"expected start:stop:count[:log], got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(flag, f"expected start:stop:count[:log], got {text!r}") from None
    return Sweep(variable, start, stop, count, len(parts) == 4)


@dataclass(frozen=True)
class RunConfig:
    command: str
    alpha: float | None = None
    extension: ExtensionSpec | None = None
    sweep: Sweep | None = None
    E: float | None = None
    E_max: float | None = None
    output: str = "-"
    fmt: str = "json"
    seed: int = 0
    numeric: bool = False
    which: int = 0
    points: int = 201
    x_max: float | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError("command", f"unknown command {self.command!r}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError("format", f"must be csv or json, got {self.fmt!r}")
        if self.alpha is not None:
            GrushinParams(self.alpha)
        if self.points < 2:
            raise ConfigError("points", f"must be at least 2, got {self.points}")

    def params(self) -> GrushinParams:
        if self.alpha is None:
            raise ConfigError("alpha", f"required for {self.command}")
        return GrushinParams(self.alpha)

    def spec(self) -> ExtensionSpec:
        if self.extension is None:
            raise ConfigError("family", f"required for {self.command}")
        return self.extension


# ----------------------------------------------------------------- output

def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


# --------------------------------------------------------------- commands

def _spectrum(cfg: RunConfig) -> str:
    params, spec = cfg.params(), cfg.spec()
    report = assemble_spectrum(spec, params, SpectrumConfig(E_max=cfg.E_max))
    if cfg.fmt == "json":
        body = {"alpha": params.alpha, "extension": spec.to_dict()}
        body.update(report.to_dict())
        body["closed_form_negative_count"] = negative_count(spec, params)
        return _json(body)
    rows = [("negative", lvl.E, lvl.mult, " ".join(map(str, lvl.modes))) for lvl in report.negative]
    rows += [("embedded", lvl.E, lvl.mult, " ".join(map(str, lvl.modes))) for lvl in report.embedded]
    return _csv(["kind", "E", "mult", "modes"], rows)


def _ground_state(cfg: RunConfig) -> str:
    params, spec = cfg.params(), cfg.spec()
    gs = ground_state(spec, params)
    if cfg.fmt == "json":
        return _json({"alpha": params.alpha, "extension": spec.to_dict(), "energy": gs.energy, "degeneracy": gs.degeneracy})
    return _csv(["energy", "degeneracy"], [(gs.energy, gs.degeneracy)])


def _wavefunction(cfg: RunConfig) -> str:
    params, spec = cfg.params(), cfg.spec()
    probe = ground_state(spec, params, x_grid=[1.0])
    E = -probe.energy
    half = (20.0 / math.sqrt(E)) if cfg.x_max is None else float(cfg.x_max)
    if not (math.isfinite(half) and half > 0):
        raise ConfigError("x-max", f"must be positive, got {cfg.x_max!r}")
    n = cfg.points // 2
    right = half * np.arange(1, n + 1) / n
    grid = np.concatenate([-right[::-1], right])
    gs = ground_state(spec, params, x_grid=grid)
    if not 0 <= cfg.which < len(gs.wavefunctions):
        raise ConfigError("which", f"ground state has {len(gs.wavefunctions)} basis function(s)")
    wave = gs.wavefunctions[cfg.which]
    if cfg.fmt == "csv":
        return wave.to_csv()
    return _json(
        {
            "alpha": params.alpha,
            "extension": spec.to_dict(),
            "energy": gs.energy,
            "x": wave.x_grid.tolist(),
            "re": wave.values.real.tolist(),
            "im": wave.values.imag.tolist(),
        }
    )


def _scatter(cfg: RunConfig) -> str:
    params, spec = cfg.params(), cfg.spec()
    if spec.family is not Family.IIa:
        raise ConfigError("family", "scattering is implemented for IIa couplings only")
    if cfg.sweep is not None:
        if cfg.sweep.variable != "E":
            raise ConfigError("alpha-sweep", "scatter sweeps energy; use --E-sweep")
        rows = sweep(params, spec.a, spec.gamma, cfg.sweep.values())
        if cfg.fmt == "csv":
            return sweep_csv(rows)
        return _json([r.to_dict() for r in rows])
    if cfg.E is None:
        raise ConfigError("E", "give --E or --E-sweep")
    c = coefficients(params, spec.a, spec.gamma, cfg.E)
    if cfg.fmt == "csv":
        return sweep_csv([c])
    return _json(c.to_dict())


def _bounds(cfg: RunConfig) -> str:
    if cfg.sweep is not None:
        if cfg.sweep.variable != "alpha":
            raise ConfigError("E-sweep", "bounds sweeps alpha; use --alpha-sweep")
        alphas = cfg.sweep.values()
    else:
        alphas = [cfg.params().alpha]
    rows = []
    for a in alphas:
        params = GrushinParams(a)
        lower, upper = friedrichs_E0_bounds(params)
        row = [params.alpha, lower, upper]
        if cfg.numeric:
            row.append(friedrichs_fibre_ground(params) if params.alpha > 0 else float("nan"))
        rows.append(row)
    header = ["alpha", "lower", "upper"] + (["numeric"] if cfg.numeric else [])
    if cfg.fmt == "csv":
        return _csv(header, rows)
    return _json([{h: (None if isinstance(v, float) and math.isnan(v) else v) for h, v in zip(header, r)} for r in rows])


def _verify(cfg: RunConfig) -> tuple[str, bool]:
    results = run_checks(cfg.seed)
    return report_json(cfg.seed, results), all(r.passed for r in results)


def run(cfg: RunConfig) -> int:
    """Execute one command and write its output; returns the exit code."""
    if cfg.command == "verify":
        text, ok = _verify(cfg)
        _emit(text, cfg.output)
        if not ok:
            sys.stderr.write("verify: a check failed, see the report\n")
        return 0 if ok else 1
    handler = {
        "spectrum": _spectrum,
        "ground-state": _ground_state,
        "scatter": _scatter,
        "bounds": _bounds,
        "wavefunction": _wavefunction,
    }[cfg.command]
    _emit(handler(cfg), cfg.output)
    return 0


# ---------------------------------------------------------------- parsing

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grushin", description="Spectra and scattering on Grushin cylinders.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--alpha", type=str, help="metric exponent in [0, 1)")
    p.add_argument("--family", type=str, help="F, IR, IL, IIa or III")
    p.add_argument("--gamma", type=str, help="real coupling for IR, IL, IIa")
    p.add_argument("--a", type=str, help="complex IIa coupling, written re+imi")
    p.add_argument("--Gamma", type=str, help="III matrix entries g1,g2,g3,g4")
    p.add_argument("--E", type=str, help="single energy for scatter")
    p.add_argument("--E-sweep", dest="E_sweep", type=str, help="start:stop:count[:log]")
    p.add_argument("--alpha-sweep", dest="alpha_sweep", type=str, help="start:stop:count[:log]")
    p.add_argument("--E-max", dest="E_max", type=str, help="cutoff for embedded levels")
    p.add_argument("--numeric", action="store_true", help="bounds: add the numeric Friedrichs level")
    p.add_argument("--which", type=int, default=0, help="wavefunction: basis index for a degenerate ground state")
    p.add_argument("--points", type=int, default=201, help="wavefunction: grid size")
    p.add_argument("--x-max", dest="x_max", type=str, help="wavefunction: half-width of the grid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-", help="output path, - for stdout")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    return p


def _real(text: str | None, field_name: str) -> float | None:
    if text is None:
        return None
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(field_name, f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(field_name, f"must be finite, got {text!r}")
    return v


def _extension(ns: argparse.Namespace) -> ExtensionSpec | None:
    family = ns.family
    if family is None and ns.command == "scatter":
        family = "IIa"
    if family is None:
        return None
    try:
        fam = Family(family)
    except ValueError:
        raise ConfigError("family", f"unknown family {family!r}; use F, IR, IL, IIa or III") from None
    if fam is Family.F:
        return ExtensionSpec.friedrichs()
    if fam is Family.III:
        if ns.Gamma is None:
            raise ConfigError("Gamma", "required for family III as g1,g2,g3,g4")
        parts = ns.Gamma.split(",")
        if len(parts) != 4:
            raise ConfigError("Gamma", f"expected four comma-separated numbers, got {ns.Gamma!r}")
        return ExtensionSpec.iii(*(_real(x, "Gamma") for x in parts))
    gamma = _real(ns.gamma, "gamma")
    if gamma is None:
        raise ConfigError("gamma", f"required for family {fam.value}")
    if fam is Family.IIa:
        if ns.a is None:
            raise ConfigError("a", "required for family IIa, written re+imi")
        return ExtensionSpec.iia(parse_complex(ns.a), gamma)
    return ExtensionSpec(fam, gamma=gamma)


# flags whose values may begin with "-" without looking like a plain number
_DASH_VALUE_FLAGS = ("--a", "--Gamma", "--E-sweep", "--alpha-sweep")


def _attach_dash_values(argv: list[str]) -> list[str]:
    """Rewrite ``--Gamma -1,0,0,-1`` as ``--Gamma=-1,0,0,-1`` for argparse."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _DASH_VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def config_from_args(argv: list[str]) -> RunConfig:
    ns = _parser().parse_args(_attach_dash_values(argv))
    if ns.E_sweep is not None and ns.alpha_sweep is not None:
        raise ConfigError("E-sweep", "give at most one of --E-sweep and --alpha-sweep")
    sw = None
    if ns.E_sweep is not None:
        sw = parse_sweep(ns.E_sweep, "E")
    elif ns.alpha_sweep is not None:
        sw = parse_sweep(ns.alpha_sweep, "alpha")
    fmt = ns.fmt
    if fmt is None:
        # tables default to csv, single records to json
        fmt = "csv" if sw is not None or ns.command == "wavefunction" else "json"
    return RunConfig(
        command=ns.command,
        alpha=_real(ns.alpha, "alpha"),
        extension=_extension(ns),
        sweep=sw,
        E=_real(ns.E, "E"),
        E_max=_real(ns.E_max, "E-max"),
        output=ns.output,
        fmt=fmt,
        seed=ns.seed,
        numeric=ns.numeric,
        which=ns.which,
        points=ns.points,
        x_max=_real(ns.x_max, "x-max"),
    )


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except (ShootingError, NoSuchEigenvalue, DomainError, ArithmeticError) as exc:
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
