"""Global spectra assembled from the fibres, ground states and Friedrichs bounds.

The operator on the cylinder is the direct sum of its fibres over k in Z.  The
k = 0 fibre is handled in closed form (``zero_mode``); every k != 0 fibre is
computed once for k > 0 and doubled, since k and -k give the same operator.
"""
from __future__ import annotations

import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .extensions import (
    ConfigError,
    ExtensionSpec,
    Family,
    GrushinParams,
    birman_parameter,
    hermitian_eigenvalues,
    is_nonnegative,
)
from .fibre_solver import DEFAULT, FibreProblem, ShootingError, SolverConfig, count_below, fibre_eigenvalues
from .specfun import bessel_k, gamma_real
from .zero_mode import zero_mode_eigenfunction, zero_mode_eigenvalues

__all__ = [
    "SpectralLevel",
    "SpectrumReport",
    "SpectrumConfig",
    "ManifoldWavefunction",
    "GroundState",
    "assemble_spectrum",
    "ground_state",
    "friedrichs_E0_bounds",
    "variational_upper",
    "variational_argmin",
    "friedrichs_fibre_ground",
    "to_manifold",
    "thread_count",
]

# energies closer than this (relative) are one level
_MERGE_RTOL = 1e-9
# fibre roots this close to 0 take their sign from the Birman parameter,
# whose number of negative eigenvalues equals the fibre's
_ZERO_WINDOW = 1e-9


def thread_count() -> int:
    """Worker threads for fibre sweeps, capped by GRUSHIN_THREADS."""
    default = os.cpu_count() or 1
    raw = os.environ.get("GRUSHIN_THREADS")
    if raw is None or raw.strip() == "":
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("GRUSHIN_THREADS", f"must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("GRUSHIN_THREADS", f"must be a positive integer, got {raw!r}")
    return n


# ------------------------------------------------------------------ report

@dataclass(frozen=True)
class SpectralLevel:
    E: float
    mult: int
    modes: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"E": self.E, "mult": self.mult, "modes": list(self.modes)}

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralLevel":
        return cls(float(d["E"]), int(d["mult"]), tuple(int(k) for k in d["modes"]))


@dataclass(frozen=True)
class SpectrumReport:
    """Negative and embedded eigenvalues; the essential spectrum is [0, inf)."""

    negative: tuple[SpectralLevel, ...]
    embedded: tuple[SpectralLevel, ...]
    E_max: float
    notes: tuple[str, ...] = ()
    essential: tuple[float, float] = (0.0, math.inf)

    def __post_init__(self):
        if any(not lvl.E < 0 for lvl in self.negative):
            raise ValueError("negative levels must lie below zero")
        if any(lvl.E < 0 for lvl in self.embedded):
            raise ValueError("embedded levels must be non-negative")
        for levels in (self.negative, self.embedded):
            if any(b.E < a.E for a, b in zip(levels, levels[1:])):
                raise ValueError("levels must be sorted ascending")

    @property
    def total_negative_count(self) -> int:
        return sum(lvl.mult for lvl in self.negative)

    def to_dict(self) -> dict:
        return {
            "essential": [self.essential[0], None],
            "negative": [lvl.to_dict() for lvl in self.negative],
            "embedded": [lvl.to_dict() for lvl in self.embedded],
            "total_negative_count": self.total_negative_count,
            "E_max": self.E_max,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumReport":
        lo, hi = d["essential"]
        return cls(
            negative=tuple(SpectralLevel.from_dict(x) for x in d["negative"]),
            embedded=tuple(SpectralLevel.from_dict(x) for x in d["embedded"]),
            E_max=float(d["E_max"]),
            notes=tuple(d.get("notes", ())),
            essential=(float(lo), math.inf if hi is None else float(hi)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SpectrumReport":
        return cls.from_dict(json.loads(text))


def _merge(entries: list[tuple[float, int, tuple[int, ...]]]) -> tuple[SpectralLevel, ...]:
    entries = sorted(entries, key=lambda e: e[0])
    out: list[list] = []
    for E, mult, modes in entries:
        if out and abs(E - out[-1][0]) <= _MERGE_RTOL * max(abs(E), abs(out[-1][0]), 1e-300):
            out[-1][1] += mult
            out[-1][2] = out[-1][2] | set(modes)
        else:
            out.append([E, mult, set(modes)])
    return tuple(SpectralLevel(E, m, tuple(sorted(ks))) for E, m, ks in out)


@dataclass(frozen=True)
class SpectrumConfig:
    """Controls for ``assemble_spectrum``.

    ``E_max=None`` means 25 (1 + alpha).  A fibre with more than
    ``max_levels`` eigenvalues below ``E_max`` lowers the embedded cutoff to
    the energy where it reaches that many, and the report notes the change.
    """

    E_max: float | None = None
    max_levels: int = 128
    solver: SolverConfig = DEFAULT
    threads: int | None = None

    def __post_init__(self):
        if self.E_max is not None:
            e = float(self.E_max)
            if not (math.isfinite(e) and e >= 0):
                raise ConfigError("E_max", f"must be finite and non-negative, got {self.E_max!r}")
        if int(self.max_levels) != self.max_levels or self.max_levels < 1:
            raise ConfigError("max_levels", f"must be a positive integer, got {self.max_levels!r}")
        if self.threads is not None and (int(self.threads) != self.threads or self.threads < 1):
            raise ConfigError("threads", f"must be a positive integer, got {self.threads!r}")


def _birman_negatives(spec: ExtensionSpec, params: GrushinParams, k: int) -> int:
    if spec.family is Family.F:
        return 0
    b = birman_parameter(spec, params, k)
    if b.scalar is not None:
        return int(b.scalar < 0)
    m = b.matrix
    return sum(int(v < 0) for v in hermitian_eigenvalues(m[0, 0].real, m[1, 1].real, m[0, 1]))


def _fibre_levels(spec, params, k, E_max, cfg) -> list[tuple[float, int, tuple[int, ...], bool]]:
    """Roots of fibre k as (E, 2, (-k, k), is_negative), counting both signs of k."""
    roots = fibre_eigenvalues(spec, FibreProblem(params.alpha, k), None, E_max, cfg)
    n_neg = _birman_negatives(spec, params, k)
    out = []
    for i, E in enumerate(roots):
        negative = i < n_neg if abs(E) <= _ZERO_WINDOW else E < 0
        if negative:
            # a root in [0, window] that the Birman count calls negative sits
            # within solver accuracy of 0 from below
            E = min(E, -sys.float_info.min)
        else:
            E = max(E, 0.0)
        out.append((E, 2, (-k, k), negative))
    return out


def _negative_modes(spec: ExtensionSpec, params: GrushinParams) -> list[int]:
    """k > 0 whose Birman parameter has a negative eigenvalue."""
    if spec.family is Family.F or is_nonnegative(spec):
        return []
    out = []
    k = 1
    while birman_parameter(spec, params, k).lowest() < 0:
        out.append(k)
        k += 1
    return out


def _safe_count(spec, problem, E, cfg) -> int | None:
    # None when the decaying solution cannot be resolved at this energy
    try:
        return count_below(spec, problem, E, cfg)
    except ShootingError:
        return None


def _level_cap(spec, problem, E_max, max_levels, cfg) -> float:
    """Largest E <= E_max with at most max_levels eigenvalues below it."""
    n = _safe_count(spec, problem, E_max, cfg)
    if n is not None and n <= max_levels:
        return E_max
    lo, hi = 0.0, E_max
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        n = _safe_count(spec, problem, mid, cfg)
        if n is not None and n <= max_levels:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-6 * hi:
            break
    return lo


def assemble_spectrum(spec: ExtensionSpec, params: GrushinParams, config: SpectrumConfig = SpectrumConfig()) -> SpectrumReport:
    """Negative eigenvalues, and for alpha > 0 embedded ones up to the cutoff.

    At alpha = 0 the k != 0 fibres have continuous spectrum above k^2, so only
    the negative part is reported.
    """
    alpha = params.alpha
    E_max = 25.0 * (1.0 + alpha) if config.E_max is None else float(config.E_max)
    cfg = config.solver
    threads = thread_count() if config.threads is None else config.threads
    notes: list[str] = []

    entries = [(E, m, (0,), True) for E, m in zero_mode_eigenvalues(spec, params)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        if alpha == 0.0:
            notes.append("alpha = 0: fibres k != 0 have continuous spectrum [k^2, inf); embedded levels not listed")
            modes = _negative_modes(spec, params)
            for levels in pool.map(lambda k: _fibre_levels(spec, params, k, _ZERO_WINDOW, cfg), modes):
                entries.extend(e for e in levels if e[3])
        else:
            # k = 1 carries the most levels; its cap bounds the others
            cap = _level_cap(spec, FibreProblem(alpha, 1), E_max, config.max_levels, cfg)
            if cap < E_max:
                notes.append(
                    f"embedded levels listed up to E = {cap:.17g} instead of {E_max:.17g}: "
                    f"fibre k = 1 holds more than {config.max_levels} levels below the requested cutoff"
                )
                E_max = cap
            # lowest fibre eigenvalues grow with |k|, so the first fibre with
            # nothing below E_max ends the sweep
            k = 1
            done = False
            while not done:
                batch = list(range(k, k + threads))
                counts = list(pool.map(lambda kk: count_below(spec, FibreProblem(alpha, kk), E_max, cfg), batch))
                active = []
                for kk, c in zip(batch, counts):
                    if c == 0:
                        done = True
                        break
                    active.append(kk)
                for levels in pool.map(lambda kk: _fibre_levels(spec, params, kk, E_max, cfg), active):
                    entries.extend(levels)
                k += threads

    negative = [e[:3] for e in entries if e[3]]
    embedded = [e[:3] for e in entries if not e[3]]
    return SpectrumReport(_merge(negative), _merge(embedded), E_max, tuple(notes))


# ------------------------------------------------------------ wavefunctions

@dataclass(frozen=True)
class ManifoldWavefunction:
    """Samples of a y-independent function f(x) on the cylinder (not normalized)."""

    alpha: float
    x_grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        x = np.asarray(self.x_grid, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if x.shape != v.shape or x.ndim != 1:
            raise ValueError("x_grid and values must be 1-d and of equal length")
        if not np.all(np.isfinite(v)):
            raise ValueError("wavefunction values must be finite")
        object.__setattr__(self, "x_grid", x)
        object.__setattr__(self, "values", v)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    def to_csv(self) -> str:
        import io

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["x", "re", "im"])
        for x, v in zip(self.x_grid, self.values):
            w.writerow([f"{x:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])
        return buf.getvalue()

    @classmethod
    def read_csv(cls, path, alpha: float) -> "ManifoldWavefunction":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if rows[0] != ["x", "re", "im"]:
            raise ValueError(f"unexpected header {rows[0]!r}")
        data = np.array([[float(c) for c in r] for r in rows[1:]])
        return cls(alpha, data[:, 0], data[:, 1] + 1j * data[:, 2])


def to_manifold(params: GrushinParams, fibre_values, x_grid) -> ManifoldWavefunction:
    """Map a zero-mode fibre function psi_0 to f(x) = |x|^(alpha/2) psi_0(x) / sqrt(2 pi)."""
    x = np.asarray(x_grid, dtype=float)
    psi = np.asarray(fibre_values, dtype=complex)
    if x.shape != psi.shape:
        raise ConfigError("fibre_values", "must match x_grid in length")
    weight = np.abs(x) ** (0.5 * params.alpha) / math.sqrt(2.0 * math.pi)
    return ManifoldWavefunction(params.alpha, x, weight * psi)


def _default_grid(E: float, points: int = 201) -> np.ndarray:
    # about 20 decay lengths on each side, skipping x = 0
    half = 20.0 / math.sqrt(E)
    h = half / (points // 2)
    right = h * np.arange(1, points // 2 + 1)
    return np.concatenate([-right[::-1], right])


def _zero_mode_samples(params: GrushinParams, E: float, B: complex, C: complex, x: np.ndarray) -> np.ndarray:
    root = math.sqrt(E)
    out = np.empty(x.shape, dtype=complex)
    for i, xi in enumerate(x):
        if xi == 0:
            raise ConfigError("x_grid", "must not contain the singular point x = 0")
        u = math.sqrt(abs(xi)) * bessel_k(params.nu, abs(xi) * root)
        out[i] = (B if xi < 0 else C) * u
    return out


@dataclass(frozen=True)
class GroundState:
    energy: float
    degeneracy: int
    wavefunctions: tuple[ManifoldWavefunction, ...]


def ground_state(spec: ExtensionSpec, params: GrushinParams, x_grid=None) -> GroundState:
    """Lowest eigenvalue, its degeneracy and the wavefunctions on the cylinder.

    The ground state lives in the k = 0 fibre.  For the degenerate III case
    the two returned functions are supported on x < 0 and x > 0 respectively.
    """
    levels = zero_mode_eigenvalues(spec, params)
    if not levels:
        field_name = {Family.F: "family", Family.III: "Gamma"}.get(spec.family, "gamma")
        raise ConfigError(field_name, f"{spec.family.value} extension with these parameters has no negative spectrum")
    energy, mult = levels[0]
    pair = zero_mode_eigenfunction(spec, params, 0)
    E = -energy
    x = _default_grid(E) if x_grid is None else np.asarray(x_grid, dtype=float)
    waves = tuple(to_manifold(params, _zero_mode_samples(params, E, B, C, x), x) for B, C in pair.basis)
    return GroundState(energy, mult, waves)


# --------------------------------------------------------- Friedrichs bounds

def friedrichs_E0_bounds(params: GrushinParams) -> tuple[float, float]:
    """Lower and upper bounds on the bottom of the Friedrichs k = +-1 fibres."""
    alpha = params.alpha
    p = 1.0 + alpha
    lower = p * ((2.0 + alpha) / 4.0) ** (alpha / p)
    # alpha^(alpha/p) -> 1 as alpha -> 0
    upper = (
        2.0 ** ((1.0 - alpha) / p)
        * p ** ((1.0 + 3.0 * alpha) / p)
        / (alpha ** (alpha / p) * gamma_real((3.0 + alpha) / p))
    )
    return lower, upper


def variational_upper(params: GrushinParams, b: float) -> float:
    """Rayleigh quotient of the trial function with width parameter b > 0."""
    b = float(b)
    if not (math.isfinite(b) and b > 0):
        raise ConfigError("b", f"must be positive, got {b!r}")
    alpha = params.alpha
    p = 1.0 + alpha
    return (
        2.0 ** ((1.0 - alpha) / p)
        * (1.0 + b * b * p * p)
        / (gamma_real((3.0 + alpha) / p) * b ** (2.0 * alpha / p))
    )


def variational_argmin(params: GrushinParams) -> float:
    """b minimizing ``variational_upper``; zero at alpha = 0 (a limit)."""
    return math.sqrt(params.alpha) / (1.0 + params.alpha)


def friedrichs_fibre_ground(params: GrushinParams, cfg: SolverConfig = DEFAULT) -> float:
    """Lowest eigenvalue of the Friedrichs k = 1 fibre, alpha > 0."""
    if params.alpha == 0.0:
        raise ConfigError("alpha", "at alpha = 0 the k = 1 fibre bottom is the edge of a continuum")
    _, upper = friedrichs_E0_bounds(params)
    roots = fibre_eigenvalues(ExtensionSpec.friedrichs(), FibreProblem(params.alpha, 1), None, 1.01 * upper, cfg)
    if not roots:
        raise ShootingError(f"no Friedrichs level below 1.01 x the upper bound at alpha={params.alpha}")
    return roots[0]
