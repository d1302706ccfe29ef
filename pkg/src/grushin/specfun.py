"""Real-order Gamma and Bessel-type functions.

Orders live in (0, 3/2] and arguments are real and positive.  Three regimes:

* ascending series, summed with ``math.fsum`` (exactly rounded accumulation);
* trapezoidal quadrature of integral representations, which converges
  geometrically for analytic integrands and has no cancellation for K;
* Hankel's asymptotic expansions for large arguments.

Derivatives come from the standard order recurrences.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "DomainError",
    "PoleError",
    "gamma_real",
    "bessel_i",
    "bessel_k",
    "bessel_j",
    "bessel_y",
    "hankel",
    "bessel_i_prime",
    "bessel_k_prime",
]

# argument above which e^x overflows a double
_OVERFLOW_X = 700.0
# crossovers between regimes
_I_SERIES_MAX = 30.0
_K_SERIES_MAX = 0.5
_J_SERIES_MAX = 8.0
_J_ASYMPTOTIC_MIN = 40.0


class DomainError(ValueError):
    """Argument outside the supported domain."""


class PoleError(DomainError):
    """Gamma evaluated at a non-positive integer."""


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def gamma_real(x: float) -> float:
    """Gamma function for real ``x`` away from its poles."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma_real: non-finite argument {x!r}")
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma_real: pole at {x!r}")
    return math.gamma(x)


def _rgamma(x: float) -> float:
    # 1/Gamma, zero at the poles
    if _is_nonpositive_integer(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _check(nu: float, x: float, name: str) -> tuple[float, float]:
    nu, x = float(nu), float(x)
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"{name}: argument must be positive, got {x!r}")
    if not math.isfinite(nu):
        raise DomainError(f"{name}: non-finite order {nu!r}")
    return nu, x


# ---------------------------------------------------------------- series

def _ascending_series(nu: float, x: float, sign: float) -> float:
    """sum_m sign^m (x/2)^(2m+nu) / (m! Gamma(m+nu+1)), any real order."""
    half = 0.5 * x
    q = sign * half * half
    # start at the first term with a finite 1/Gamma
    m0 = 0
    while _is_nonpositive_integer(m0 + nu + 1.0):
        m0 += 1
    term = half ** (2 * m0 + nu) * _rgamma(m0 + nu + 1.0) / math.factorial(m0) * sign**m0
    terms = [term]
    biggest = abs(term)
    m = m0
    while True:
        m += 1
        term *= q / (m * (m + nu))
        terms.append(term)
        biggest = max(biggest, abs(term))
        if m > half + 2 and abs(term) <= 1e-18 * biggest:
            break
    return math.fsum(terms)


# ----------------------------------------------------------- asymptotics

def _hankel_coefficients(nu: float, x: float) -> list[float]:
    """a_k(nu)/x^k up to optimal truncation."""
    mu = 4.0 * nu * nu
    out = [1.0]
    k = 0
    while True:
        k += 1
        nxt = out[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if nxt == 0.0:
            break
        if abs(nxt) >= abs(out[-1]) or abs(nxt) < 1e-18:
            if abs(nxt) < abs(out[-1]):
                out.append(nxt)
            break
        out.append(nxt)
    return out


def _i_asymptotic(nu: float, x: float) -> float:
    c = _hankel_coefficients(nu, x)
    s = math.fsum(ck * (-1) ** k for k, ck in enumerate(c))
    return math.exp(x) / math.sqrt(2.0 * math.pi * x) * s


def _k_asymptotic(nu: float, x: float) -> float:
    c = _hankel_coefficients(nu, x)
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * math.fsum(c)


def _h1_asymptotic(nu: float, x: float) -> complex:
    c = _hankel_coefficients(nu, x)
    s = sum(ck * 1j**k for k, ck in enumerate(c))
    w = x - 0.5 * nu * math.pi - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * complex(math.cos(w), math.sin(w)) * s


# ------------------------------------------------------------ quadrature

def _k_quadrature(nu: float, x: float) -> float:
    # K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, trapezoid in t.
    # The step follows the peak width 1/sqrt(x) so the error stays ~e^-60.
    h = min(0.1, 0.25 / math.sqrt(x))
    t_end = math.acosh(1.0 + 750.0 / x) + 1.0
    t = np.arange(0.0, t_end + h, h)
    # -x (cosh t - 1), written to keep accuracy near t = 0
    expo = -2.0 * x * np.sinh(0.5 * t) ** 2
    f = np.exp(expo + nu * t) * 0.5 * (1.0 + np.exp(-2.0 * nu * t))
    f[0] *= 0.5
    return math.exp(-x) * h * math.fsum(f)


@lru_cache(maxsize=64)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _gl(f, a: float, b: float, n: int) -> float:
    z, w = _legendre(n)
    half = 0.5 * (b - a)
    return half * math.fsum(w * f(half * z + 0.5 * (a + b)))


def _jy_quadrature(nu: float, x: float) -> tuple[float, float]:
    """J_nu and Y_nu from their Schlaefli-type integrals (x >= 2 or so)."""
    n = int(1.2 * x) + 48
    j1 = _gl(lambda th: np.cos(x * np.sin(th) - nu * th), 0.0, math.pi, n) / math.pi
    y1 = _gl(lambda th: np.sin(x * np.sin(th) - nu * th), 0.0, math.pi, n) / math.pi
    t_end = math.asinh(60.0 / x) + 0.5
    s = math.sin(nu * math.pi)
    c = math.cos(nu * math.pi)
    j2 = _gl(lambda t: np.exp(-x * np.sinh(t) - nu * t), 0.0, t_end, 64)
    y2 = _gl(lambda t: (np.exp(nu * t) + np.exp(-nu * t) * c) * np.exp(-x * np.sinh(t)), 0.0, t_end, 64)
    return j1 - s / math.pi * j2, y1 - y2 / math.pi


# --------------------------------------------------------------- public

def bessel_i(nu: float, x: float) -> float:
    """Modified Bessel function of the first kind I_nu(x)."""
    nu, x = _check(nu, x, "bessel_i")
    if x > _OVERFLOW_X:
        raise OverflowError(f"bessel_i: e^x overflows for x={x!r}")
    if x <= _I_SERIES_MAX:
        return _ascending_series(nu, x, 1.0)
    return _i_asymptotic(nu, x)


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function of the second kind K_nu(x)."""
    nu, x = _check(nu, x, "bessel_k")
    nu = abs(nu)
    if x > _OVERFLOW_X:
        return _k_asymptotic(nu, x)
    s = math.sin(nu * math.pi)
    if x <= _K_SERIES_MAX and abs(s) > 0.1:
        return 0.5 * math.pi / s * (_ascending_series(-nu, x, 1.0) - _ascending_series(nu, x, 1.0))
    return _k_quadrature(nu, x)


def bessel_j(nu: float, x: float) -> float:
    """Bessel function of the first kind J_nu(x)."""
    nu, x = _check(nu, x, "bessel_j")
    if x <= _J_SERIES_MAX:
        return _ascending_series(nu, x, -1.0)
    if x >= _J_ASYMPTOTIC_MIN:
        return _h1_asymptotic(nu, x).real
    return _jy_quadrature(nu, x)[0]


def bessel_y(nu: float, x: float) -> float:
    """Bessel function of the second kind Y_nu(x), non-integer order."""
    nu, x = _check(nu, x, "bessel_y")
    if x <= _J_SERIES_MAX:
        s = math.sin(nu * math.pi)
        if s == 0.0:
            raise DomainError("bessel_y: integer orders are not supported")
        jp = _ascending_series(nu, x, -1.0)
        jm = _ascending_series(-nu, x, -1.0)
        return (jp * math.cos(nu * math.pi) - jm) / s
    if x >= _J_ASYMPTOTIC_MIN:
        return _h1_asymptotic(nu, x).imag
    return _jy_quadrature(nu, x)[1]


def hankel(kind: int, nu: float, x: float) -> complex:
    """Hankel function H^(1)_nu(x) or H^(2)_nu(x) for non-integer nu."""
    if kind not in (1, 2):
        raise DomainError(f"hankel: kind must be 1 or 2, got {kind!r}")
    nu, x = _check(nu, x, "hankel")
    s = math.sin(nu * math.pi)
    if nu == math.floor(nu) or abs(s) < 1e-12:
        raise DomainError("hankel: integer orders are not supported")
    if x <= _J_SERIES_MAX:
        jp = _ascending_series(nu, x, -1.0)
        jm = _ascending_series(-nu, x, -1.0)
        ph = complex(math.cos(nu * math.pi), -math.sin(nu * math.pi))
        h1 = 1j / s * (ph * jp - jm)
    elif x >= _J_ASYMPTOTIC_MIN:
        h1 = _h1_asymptotic(nu, x)
    else:
        j, y = _jy_quadrature(nu, x)
        h1 = complex(j, y)
    return h1 if kind == 1 else h1.conjugate()


def bessel_i_prime(nu: float, x: float) -> float:
    """I'_nu(x) = (I_{nu-1}(x) + I_{nu+1}(x)) / 2."""
    return 0.5 * (bessel_i(nu - 1.0, x) + bessel_i(nu + 1.0, x))


def bessel_k_prime(nu: float, x: float) -> float:
    """K'_nu(x) = -(K_{nu-1}(x) + K_{nu+1}(x)) / 2."""
    return -0.5 * (bessel_k(abs(nu - 1.0), x) + bessel_k(nu + 1.0, x))
