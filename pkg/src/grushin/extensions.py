"""Extension families, boundary conditions, Birman parameters and counting."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import gamma_real

__all__ = [
    "ConfigError",
    "GrushinParams",
    "Family",
    "ExtensionSpec",
    "BoundaryTrace",
    "BirmanParam",
    "custom_floor",
    "hermitian_eigenvalues",
    "boundary_residual",
    "birman_parameter",
    "is_nonnegative",
    "negative_count",
    "zero_mode_count",
]


class ConfigError(ValueError):
    """Invalid parameter; ``field`` names the offending input."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class GrushinParams:
    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (math.isfinite(a) and 0.0 <= a < 1.0):
            raise ConfigError("alpha", f"must lie in [0, 1), got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def nu(self) -> float:
        """Bessel order (1+alpha)/2 of the zero-mode equation."""
        return 0.5 * (1.0 + self.alpha)

    @property
    def inverse_square_coupling(self) -> float:
        return self.alpha * (2.0 + self.alpha) / 4.0


class Family(str, enum.Enum):
    F = "F"
    IR = "IR"
    IL = "IL"
    IIa = "IIa"
    III = "III"


def _finite(name: str, v: float) -> float:
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(name, f"must be finite, got {v!r}")
    return v


@dataclass(frozen=True)
class ExtensionSpec:
    """One self-adjoint realization.

    Only the fields used by ``family`` are meaningful: ``gamma`` for IR, IL
    and IIa, ``a`` for IIa, ``Gamma = (g1, g2, g3, g4)`` for III.
    """

    family: Family
    gamma: float = 0.0
    a: complex = 0j
    Gamma: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        try:
            fam = Family(self.family)
        except ValueError:
            raise ConfigError("family", f"unknown family {self.family!r}") from None
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "gamma", _finite("gamma", self.gamma))
        a = complex(self.a)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ConfigError("a", f"must be finite, got {self.a!r}")
        object.__setattr__(self, "a", a)
        if len(self.Gamma) != 4:
            raise ConfigError("Gamma", "needs four real entries")
        object.__setattr__(self, "Gamma", tuple(_finite("Gamma", g) for g in self.Gamma))

    # constructors
    @classmethod
    def friedrichs(cls) -> "ExtensionSpec":
        return cls(Family.F)

    @classmethod
    def ir(cls, gamma: float) -> "ExtensionSpec":
        return cls(Family.IR, gamma=gamma)

    @classmethod
    def il(cls, gamma: float) -> "ExtensionSpec":
        return cls(Family.IL, gamma=gamma)

    @classmethod
    def iia(cls, a: complex, gamma: float) -> "ExtensionSpec":
        return cls(Family.IIa, gamma=gamma, a=a)

    @classmethod
    def iii(cls, g1: float, g2: float, g3: float, g4: float) -> "ExtensionSpec":
        return cls(Family.III, Gamma=(g1, g2, g3, g4))

    @property
    def abs_a_sq(self) -> float:
        return self.a.real * self.a.real + self.a.imag * self.a.imag

    @property
    def zeta(self) -> complex:
        """Off-diagonal entry g2 + i g3 of the III matrix."""
        return complex(self.Gamma[1], self.Gamma[2])

    def gamma_matrix(self) -> np.ndarray:
        g1, g2, g3, g4 = self.Gamma
        return np.array([[g1, complex(g2, g3)], [complex(g2, -g3), g4]])

    # JSON
    def to_dict(self) -> dict:
        d: dict = {"family": self.family.value}
        if self.family in (Family.IR, Family.IL, Family.IIa):
            d["gamma"] = self.gamma
        if self.family is Family.IIa:
            d["a"] = [self.a.real, self.a.imag]
        if self.family is Family.III:
            d["Gamma"] = list(self.Gamma)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExtensionSpec":
        if "family" not in d:
            raise ConfigError("family", "missing")
        fam = d["family"]
        try:
            fam = Family(fam)
        except ValueError:
            raise ConfigError("family", f"unknown family {fam!r}") from None
        kw: dict = {}
        if fam in (Family.IR, Family.IL, Family.IIa):
            if "gamma" not in d:
                raise ConfigError("gamma", f"required for family {fam.value}")
            kw["gamma"] = d["gamma"]
        if fam is Family.IIa:
            a = d.get("a")
            if not (isinstance(a, (list, tuple)) and len(a) == 2):
                raise ConfigError("a", "expected [re, im]")
            kw["a"] = complex(float(a[0]), float(a[1]))
        if fam is Family.III:
            g = d.get("Gamma")
            if not (isinstance(g, (list, tuple)) and len(g) == 4):
                raise ConfigError("Gamma", "expected [g1, g2, g3, g4]")
            kw["Gamma"] = tuple(float(v) for v in g)
        return cls(fam, **kw)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ExtensionSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class BoundaryTrace:
    """Coefficients of |x|^(-alpha/2) (g0) and |x|^(1+alpha/2) (g1) on each side."""

    g0_minus: complex = 0j
    g0_plus: complex = 0j
    g1_minus: complex = 0j
    g1_plus: complex = 0j

    def __add__(self, other: "BoundaryTrace") -> "BoundaryTrace":
        return BoundaryTrace(
            self.g0_minus + other.g0_minus,
            self.g0_plus + other.g0_plus,
            self.g1_minus + other.g1_minus,
            self.g1_plus + other.g1_plus,
        )

    def scale(self, c: complex) -> "BoundaryTrace":
        return BoundaryTrace(c * self.g0_minus, c * self.g0_plus, c * self.g1_minus, c * self.g1_plus)

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.g0_minus, self.g0_plus, self.g1_minus, self.g1_plus)


@dataclass(frozen=True)
class BirmanParam:
    scalar: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    def lowest(self) -> float:
        if self.scalar is not None:
            return self.scalar
        m = self.matrix
        return hermitian_eigenvalues(m[0, 0].real, m[1, 1].real, m[0, 1])[0]


def custom_floor(x: float) -> int:
    """n with x in (n, n+1] for x > 0, and 0 for x <= 0."""
    x = float(x)
    if not math.isfinite(x):
        raise ConfigError("x", f"must be finite, got {x!r}")
    if x <= 0:
        return 0
    n = math.ceil(x)
    # a value within rounding of an integer n counts as sitting in (n-1, n]
    if n > 1 and abs(x - (n - 1)) <= 1e-12 * x:
        n -= 1
    return max(n - 1, 0)


def hermitian_eigenvalues(d1: float, d2: float, off: complex) -> tuple[float, float]:
    """Eigenvalues (low, high) of [[d1, off], [conj(off), d2]]."""
    off = complex(off)
    half_tr = 0.5 * (d1 + d2)
    root = math.hypot(0.5 * (d1 - d2), abs(off))
    return half_tr - root, half_tr + root


def boundary_residual(spec: ExtensionSpec, trace: BoundaryTrace) -> tuple[complex, complex]:
    """Left minus right side of the two defining boundary conditions."""
    g0m, g0p, g1m, g1p = trace.as_tuple()
    fam = spec.family
    if fam is Family.F:
        return (g0m, g0p)
    if fam is Family.IR:
        return (g0m, g1p - spec.gamma * g0p)
    if fam is Family.IL:
        return (g0p, g1m - spec.gamma * g0m)
    if fam is Family.IIa:
        a = spec.a
        return (g0p - a * g0m, g1m + a.conjugate() * g1p - spec.gamma * g0m)
    g1, _, _, g4 = spec.Gamma
    z = spec.zeta
    return (g1m - g1 * g0m - z * g0p, g1p - z.conjugate() * g0m - g4 * g0p)


def _birman_prefactor(alpha: float, k: int) -> float:
    p = 1.0 + alpha
    return (
        2.0 ** ((1.0 - alpha) / p)
        * p ** (2.0 * alpha / p)
        * abs(k) ** (2.0 / p)
        / gamma_real((1.0 - alpha) / p)
    )


def birman_parameter(spec: ExtensionSpec, params: GrushinParams, k: int) -> BirmanParam:
    """Birman parameter of the k-th fibre, k != 0."""
    if spec.family is Family.F:
        raise ConfigError("family", "the Friedrichs extension has no Birman parameter")
    if int(k) != k or k == 0:
        raise ConfigError("k", "needs a nonzero integer")
    k = int(k)
    alpha = params.alpha
    mu = _birman_prefactor(alpha, k)
    c = (1.0 + alpha) / abs(k)
    if spec.family in (Family.IR, Family.IL):
        return BirmanParam(scalar=mu * (1.0 + c * spec.gamma))
    if spec.family is Family.IIa:
        return BirmanParam(scalar=mu * (1.0 + c * spec.gamma / (1.0 + spec.abs_a_sq)))
    g1, g2, g3, g4 = spec.Gamma
    z = complex(g2, g3)
    m = mu * np.array([[1.0 + c * g1, c * z], [c * z.conjugate(), 1.0 + c * g4]])
    return BirmanParam(matrix=m)


def is_nonnegative(spec: ExtensionSpec) -> bool:
    fam = spec.family
    if fam is Family.F:
        return True
    if fam in (Family.IR, Family.IL, Family.IIa):
        return spec.gamma >= 0
    g1, g2, g3, g4 = spec.Gamma
    # positive semi-definite boundary matrix
    return g1 + g4 >= 0 and g1 * g4 >= g2 * g2 + g3 * g3


def zero_mode_count(spec: ExtensionSpec) -> int:
    """Number of negative eigenvalues of the k = 0 fibre (with multiplicity)."""
    fam = spec.family
    if fam is Family.F:
        return 0
    if fam in (Family.IR, Family.IL, Family.IIa):
        return 1 if spec.gamma < 0 else 0
    g1, g2, g3, g4 = spec.Gamma
    det = g1 * g4 - (g2 * g2 + g3 * g3)
    tr = g1 + g4
    if det > 0 and tr < 0:
        return 2
    if det < 0 or (det == 0 and tr < 0):
        return 1
    return 0


def negative_count(spec: ExtensionSpec, params: GrushinParams) -> int:
    """Total number of negative eigenvalues, counted with multiplicity."""
    p = 1.0 + params.alpha
    fam = spec.family
    if fam is Family.F:
        return 0
    if fam in (Family.IR, Family.IL):
        if spec.gamma >= 0:
            return 0
        return 2 * custom_floor(p * abs(spec.gamma)) + 1
    if fam is Family.IIa:
        if spec.gamma >= 0:
            return 0
        return 2 * custom_floor(p * abs(spec.gamma) / (1.0 + spec.abs_a_sq)) + 1
    g1, _, _, g4 = spec.Gamma
    lo, hi = hermitian_eigenvalues(g1, g4, spec.zeta)
    return 2 * custom_floor(-p * lo) + 2 * custom_floor(-p * hi) + zero_mode_count(spec)
