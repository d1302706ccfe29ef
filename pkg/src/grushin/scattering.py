"""Stationary scattering through the singular circle for type-IIa couplings.

Only the k = 0 fibre scatters.  On each half-line the solutions at energy
E > 0 are u1(x) = sqrt(x) H1_nu(x sqrt(E)) and u2(x) = sqrt(x) H2_nu(x sqrt(E)),
nu = (1+alpha)/2, which behave as outgoing and incoming plane waves.

Transmission and reflection come from closed forms.  ``solve_amplitudes``
solves the boundary conditions as a plain 2x2 linear system and serves as an
independent cross-check.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .extensions import BoundaryTrace, ConfigError, ExtensionSpec, GrushinParams, boundary_residual
from .specfun import gamma_real, hankel

__all__ = [
    "Direction",
    "ScatteringAmplitudes",
    "ScatteringCoefficients",
    "solve_amplitudes",
    "amplitude_trace",
    "coefficients",
    "reflectionless_energy",
    "AsymptoticLimits",
    "asymptotic_limits",
    "probability_current",
    "generalized_eigenfunction",
    "sweep",
    "sweep_csv",
]


class Direction(str, enum.Enum):
    LEFT = "left-incident"  # wave comes in from x = -inf
    RIGHT = "right-incident"  # wave comes in from x = +inf


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Coefficients of A1 u1 + A2 u2 on the negative (minus) and positive (plus) side."""

    direction: Direction
    A1_minus: complex
    A1_plus: complex
    A2_minus: complex
    A2_plus: complex

    @property
    def transmitted(self) -> complex:
        return self.A1_minus if self.direction is Direction.RIGHT else self.A1_plus

    @property
    def reflected(self) -> complex:
        return self.A1_plus if self.direction is Direction.RIGHT else self.A1_minus


@dataclass(frozen=True)
class ScatteringCoefficients:
    E: float
    T: float
    R: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ScatteringCoefficients":
        return cls(float(d["E"]), float(d["T"]), float(d["R"]))

    @classmethod
    def from_json(cls, text: str) -> "ScatteringCoefficients":
        return cls.from_dict(json.loads(text))


def _check_energy(E: float) -> float:
    E = float(E)
    if not (math.isfinite(E) and E > 0):
        raise ConfigError("E", f"must be positive and finite, got {E!r}")
    return E


def _e_power(E: float, p: float) -> float:
    # E**p through logs, so E = 1e300 with p near 1 stays finite until it truly overflows
    return math.exp(p * math.log(E))


def _terms(params: GrushinParams, a: complex, gamma: float, E: float) -> tuple[complex, complex, complex]:
    """Energy term P, coupling term Q and denominator P (1+|a|^2) + Q."""
    alpha = params.alpha
    p_term = _e_power(E, params.nu) * gamma_real(0.5 * (1.0 - alpha))
    q_term = 1j * gamma * 2.0 ** (1.0 + alpha) * complex(
        math.cos(0.5 * math.pi * alpha), math.sin(0.5 * math.pi * alpha)
    ) * gamma_real(0.5 * (3.0 + alpha))
    den = p_term * (1.0 + abs(a) ** 2) + q_term
    if den == 0:
        raise ArithmeticError("scattering denominator vanished")
    return p_term, q_term, den


def coefficients(params: GrushinParams, a: complex, gamma: float, E: float) -> ScatteringCoefficients:
    """Transmission and reflection coefficients from the closed forms."""
    E = _check_energy(E)
    a = complex(a)
    p_term, q_term, den = _terms(params, a, float(gamma), E)
    phase = complex(math.cos(math.pi * params.alpha), math.sin(math.pi * params.alpha))
    t_amp = p_term * (1.0 + phase) * a.conjugate() / den
    r_amp = (p_term * (1.0 - abs(a) ** 2 * phase) + q_term) / den
    return ScatteringCoefficients(E, abs(t_amp) ** 2, abs(r_amp) ** 2)


def _trace_constants(params: GrushinParams, E: float) -> tuple[float, float]:
    """c0, c1 with g0 = i c0 (A2 - A1), g1 = c1 e^{-i pi alpha/2} (A1 + e^{i pi alpha} A2)."""
    nu = params.nu
    s = math.sin(nu * math.pi)
    root = _e_power(E, 0.5 * nu)
    c0 = 2.0**nu / (root * gamma_real(0.5 * (1.0 - params.alpha)) * s)
    c1 = root / (2.0**nu * gamma_real(0.5 * (3.0 + params.alpha)) * s)
    return c0, c1


def amplitude_trace(params: GrushinParams, amps: ScatteringAmplitudes, E: float) -> BoundaryTrace:
    """Boundary values (g0, g1) on both sides for the given amplitudes."""
    E = _check_energy(E)
    c0, c1 = _trace_constants(params, E)
    alpha = params.alpha
    half = complex(math.cos(0.5 * math.pi * alpha), -math.sin(0.5 * math.pi * alpha))
    full = complex(math.cos(math.pi * alpha), math.sin(math.pi * alpha))

    def side(A1, A2):
        return 1j * c0 * (A2 - A1), c1 * half * (A1 + full * A2)

    g0m, g1m = side(amps.A1_minus, amps.A2_minus)
    g0p, g1p = side(amps.A1_plus, amps.A2_plus)
    return BoundaryTrace(g0m, g0p, g1m, g1p)


def solve_amplitudes(
    params: GrushinParams, a: complex, gamma: float, E: float, direction: Direction = Direction.RIGHT
) -> ScatteringAmplitudes:
    """Outgoing amplitudes (A1-, A1+) for a unit incoming wave, by a linear solve.

    The boundary conditions are linear in the amplitudes; each column of the
    2x2 system is the residual of a unit amplitude, so the system is built
    from ``boundary_residual`` without any closed form.
    """
    E = _check_energy(E)
    direction = Direction(direction)
    spec = ExtensionSpec.iia(a, gamma)
    if direction is Direction.RIGHT:
        source = (0j, 1 + 0j)  # (A2-, A2+)
    else:
        source = (1 + 0j, 0j)

    def residual(A1m, A1p, A2m, A2p):
        amps = ScatteringAmplitudes(direction, A1m, A1p, A2m, A2p)
        return np.array(boundary_residual(spec, amplitude_trace(params, amps, E)), dtype=complex)

    rhs = -residual(0j, 0j, *source)
    cols = np.column_stack([residual(1 + 0j, 0j, 0j, 0j), residual(0j, 1 + 0j, 0j, 0j)])
    # equilibrate rows: the two conditions carry different powers of E
    scale = np.max(np.abs(cols), axis=1)
    scale[scale == 0] = 1.0
    A1m, A1p = np.linalg.solve(cols / scale[:, None], rhs / scale)
    return ScatteringAmplitudes(direction, complex(A1m), complex(A1p), *source)


def reflectionless_energy(params: GrushinParams, a: complex, gamma: float) -> float | None:
    """Energy with R = 0, which exists only for 0 < alpha, |a| = 1, gamma > 0."""
    alpha = params.alpha
    if not (alpha > 0 and gamma > 0 and abs(abs(complex(a)) - 1.0) <= 1e-12):
        return None
    base = (
        2.0 ** (1.0 + alpha)
        * gamma
        * gamma_real(0.5 * (3.0 + alpha))
        * math.sin(0.5 * math.pi * alpha)
        / (gamma_real(0.5 * (1.0 - alpha)) * (1.0 - math.cos(math.pi * alpha)))
    )
    return base ** (2.0 / (1.0 + alpha))


@dataclass(frozen=True)
class AsymptoticLimits:
    T_high: float
    R_high: float
    T_low: float
    R_low: float
    gamma_dependent_low: bool  # the low-energy pair holds only for gamma != 0


def asymptotic_limits(params: GrushinParams, a: complex) -> AsymptoticLimits:
    """Limits of T and R as E -> inf and, for gamma != 0, as E -> 0."""
    s = abs(complex(a)) ** 2
    c = math.cos(math.pi * params.alpha)
    den = (1.0 + s) ** 2
    return AsymptoticLimits(2.0 * s * (1.0 + c) / den, (1.0 + s * s - 2.0 * s * c) / den, 0.0, 1.0, True)


def probability_current(params: GrushinParams, trace: BoundaryTrace) -> tuple[float, float]:
    """One-sided limits (J-, J+) of the probability current at the singular point."""
    k = 2.0 * (1.0 + params.alpha)
    j_minus = -k * (complex(trace.g0_minus).conjugate() * trace.g1_minus).imag
    j_plus = k * (complex(trace.g0_plus).conjugate() * trace.g1_plus).imag
    return j_minus, j_plus


def generalized_eigenfunction(params: GrushinParams, amps: ScatteringAmplitudes, E: float, x: float) -> complex:
    """Value of the scattering state at x != 0."""
    E = _check_energy(E)
    x = float(x)
    if x == 0 or not math.isfinite(x):
        raise ConfigError("x", f"must be finite and nonzero, got {x!r}")
    A1, A2 = (amps.A1_minus, amps.A2_minus) if x < 0 else (amps.A1_plus, amps.A2_plus)
    r = abs(x)
    z = r * math.sqrt(E)
    h1 = hankel(1, params.nu, z)
    return math.sqrt(r) * (A1 * h1 + A2 * h1.conjugate())


def sweep(params: GrushinParams, a: complex, gamma: float, energies) -> list[ScatteringCoefficients]:
    """Coefficients over a list of energies, in the given order."""
    return [coefficients(params, a, gamma, E) for E in energies]


def sweep_csv(rows: list[ScatteringCoefficients]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["E", "T", "R"])
    for r in rows:
        w.writerow([f"{r.E:.17g}", f"{r.T:.17g}", f"{r.R:.17g}"])
    return buf.getvalue()
