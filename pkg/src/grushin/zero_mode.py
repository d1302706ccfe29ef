"""Closed-form negative spectrum of the k = 0 fibre.

Energies are reported with their sign (``energy < 0``); the decay rate enters
through ``E = -energy > 0`` in ``u_E(x) = sqrt(x) K_nu(x sqrt(E))``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .extensions import (
    BoundaryTrace,
    ConfigError,
    ExtensionSpec,
    Family,
    GrushinParams,
    hermitian_eigenvalues,
)
from .specfun import bessel_k, gamma_real

__all__ = [
    "ZeroModeEigenpair",
    "NoSuchEigenvalue",
    "zero_mode_eigenvalues",
    "zero_mode_eigenfunction",
    "evaluate_uE",
    "trace_of_general_solution",
    "decay_ratio",
]

log = logging.getLogger(__name__)

_DEGENERACY_RTOL = 1e-12


class NoSuchEigenvalue(LookupError):
    pass


@dataclass(frozen=True)
class ZeroModeEigenpair:
    """Energy and coefficient pairs (B, C) of B u_E(-x) + C u_E(x).

    ``basis`` holds one pair, or two for the degenerate III case.
    """

    energy: float
    basis: tuple[tuple[complex, complex], ...]

    def __post_init__(self):
        if not self.energy < 0:
            raise ValueError("zero-mode energies are negative")
        if not self.basis or any(b == 0 and c == 0 for b, c in self.basis):
            raise ValueError("coefficients must not vanish")

    @property
    def coefficients(self) -> tuple[complex, complex]:
        return self.basis[0]


def decay_ratio(params: GrushinParams, E: float) -> float:
    """g1/g0 of the decaying solution u_E, a negative number."""
    nu = params.nu
    return 2.0 ** (-1.0 - params.alpha) * gamma_real(-nu) / gamma_real(nu) * E**nu


def _energy_for_ratio(params: GrushinParams, m: float) -> float:
    # invert decay_ratio: m < 0 -> energy -E
    nu = params.nu
    e_pow = 2.0 ** (1.0 + params.alpha) * gamma_real(nu) / gamma_real(-nu) * m
    return -(e_pow ** (1.0 / nu))


def _is_degenerate_iii(spec: ExtensionSpec) -> bool:
    g1, g2, g3, g4 = spec.Gamma
    scale = max(abs(g1), abs(g4), 1e-300)
    return abs(g1 - g4) <= _DEGENERACY_RTOL * scale and math.hypot(g2, g3) <= _DEGENERACY_RTOL * scale


def _ratios(spec: ExtensionSpec) -> list[float]:
    """Boundary ratios g1/g0 that a zero-mode eigenfunction must realise."""
    fam = spec.family
    if fam is Family.F:
        return []
    if fam in (Family.IR, Family.IL):
        return [spec.gamma] if spec.gamma < 0 else []
    if fam is Family.IIa:
        return [spec.gamma / (1.0 + spec.abs_a_sq)] if spec.gamma < 0 else []
    g1, _, _, g4 = spec.Gamma
    lo, hi = hermitian_eigenvalues(g1, g4, spec.zeta)
    if _is_degenerate_iii(spec):
        return [g1, g1] if g1 < 0 else []
    if hi < 0:
        return [lo, hi]
    if lo < 0:
        log.debug("upper III branch ratio %r is not negative, no second level", hi)
        return [lo]
    return []


def zero_mode_eigenvalues(spec: ExtensionSpec, params: GrushinParams) -> list[tuple[float, int]]:
    """Negative eigenvalues of the k = 0 fibre as (energy, multiplicity), ascending."""
    ratios = _ratios(spec)
    if not ratios:
        return []
    mult = 2 if spec.family is Family.III and _is_degenerate_iii(spec) else 1
    levels = [(_energy_for_ratio(params, m), mult) for m in sorted(ratios)[: 3 - mult]]
    # a ratio within a few hundred ulp of zero gives an energy that underflows
    return [(e, m) for e, m in levels if e < 0]


def _iii_vector(spec: ExtensionSpec, branch: int) -> tuple[complex, complex]:
    g1, g2, g3, g4 = spec.Gamma
    root = math.hypot(g1 - g4, 2.0 * math.hypot(g2, g3))
    sgn = -1.0 if branch == 0 else 1.0
    diff = g1 - g4
    if diff * sgn < 0:
        # diff + sgn*root cancels; use (diff^2 - root^2) = -4|zeta|^2 instead
        b = complex(-4.0 * (g2 * g2 + g3 * g3) / (diff - sgn * root))
    else:
        b = complex(diff + sgn * root)
    c = 2.0 * complex(g2, -g3)
    if abs(b) + abs(c) <= 1e-14 * (abs(g1) + abs(g4) + root):
        # off-diagonal zero and the diagonal branch lands on the other entry
        lam = 0.5 * (g1 + g4 + sgn * root)
        b, c = complex(g2, g3), complex(lam - g1)
        if abs(b) + abs(c) == 0:
            b, c = 0j, 1 + 0j
    return b, c


def zero_mode_eigenfunction(spec: ExtensionSpec, params: GrushinParams, which: int = 0) -> ZeroModeEigenpair:
    """Coefficients of the ``which``-th zero-mode eigenfunction (0 = lowest)."""
    levels = zero_mode_eigenvalues(spec, params)
    if not 0 <= which < len(levels):
        raise NoSuchEigenvalue(f"no zero-mode eigenvalue with index {which} for {spec.family.value}")
    energy = levels[which][0]
    fam = spec.family
    if fam is Family.IR:
        basis = ((0j, 1 + 0j),)
    elif fam is Family.IL:
        basis = ((1 + 0j, 0j),)
    elif fam is Family.IIa:
        basis = ((1 + 0j, spec.a),)
    elif _is_degenerate_iii(spec):
        basis = ((1 + 0j, 0j), (0j, 1 + 0j))
    else:
        # two licensed levels use both branches, a single one the lower branch
        basis = (_iii_vector(spec, which),)
    return ZeroModeEigenpair(energy, basis)


def evaluate_uE(params: GrushinParams, E: float, x: float) -> float:
    """u_E(x) = sqrt(x) K_nu(x sqrt(E)) for x > 0."""
    if not E > 0:
        raise ConfigError("E", f"must be positive, got {E!r}")
    if not x > 0:
        raise ConfigError("x", f"must be positive, got {x!r}")
    return math.sqrt(x) * bessel_k(params.nu, x * math.sqrt(E))


def trace_of_general_solution(params: GrushinParams, E: float, B: complex, C: complex) -> BoundaryTrace:
    """Boundary values of B u_E(-x) (x < 0) + C u_E(x) (x > 0)."""
    if not E > 0:
        raise ConfigError("E", f"must be positive, got {E!r}")
    alpha, nu = params.alpha, params.nu
    q = E ** (0.5 * nu)
    c0 = 2.0 ** (-(1.0 - alpha) / 2.0) * gamma_real(nu) / q
    c1 = 2.0 ** (-(3.0 + alpha) / 2.0) * gamma_real(-nu) * q
    B, C = complex(B), complex(C)
    return BoundaryTrace(B * c0, C * c0, B * c1, C * c1)
