"""Independent reference computations used only by the tests.

None of these share code with the package: special functions come from
mpmath, and fibre traces from scipy's adaptive DOP853 applied to a
regularized first-order system.
"""
from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp, trapezoid
from scipy.optimize import brentq


def ivp_trace(alpha: float, k: int, E: float, x_out: float | None = None) -> tuple[float, float]:
    """(g0, g1) of the decaying solution, normalized to unit length, g0 sign kept.

    With p = x^(alpha/2) g and q = x^(-alpha) p', the boundary values are
    g0 = p(0) and g1 = q(0)/(1+alpha).  The substitution x = s^beta,
    beta = 1/(1-alpha), removes the x^(-alpha) singularity:

        dp/ds = beta s^(2alpha/(1-alpha)) q
        dq/ds = beta (k^2 s^(2alpha/(1-alpha)) - E) p
    """
    beta = 1.0 / (1.0 - alpha)
    e = 2.0 * alpha / (1.0 - alpha)
    c = alpha * (2.0 + alpha) / 4.0

    def kappa(x):
        return math.sqrt(k * k * x ** (2 * alpha) + c / x**2 - E)

    if x_out is None:
        lo = 0.05
        if E > 0 and alpha > 0:
            lo = max(lo, (E / k**2) ** (1 / (2 * alpha)))
        x_out = 2 * lo
        while True:
            xs = np.linspace(lo, x_out, 4000)
            v = k * k * xs ** (2 * alpha) + c / xs**2 - E
            if trapezoid(np.sqrt(np.clip(v, 0, None)), xs) > 32:
                break
            x_out *= 1.3
    g = 1.0
    gp = -kappa(x_out) * g
    p = x_out ** (alpha / 2) * g
    pp = 0.5 * alpha * x_out ** (alpha / 2 - 1) * g + x_out ** (alpha / 2) * gp
    q = x_out ** (-alpha) * pp

    def rhs(s, y):
        w = s**e if s > 0 else (1.0 if e == 0 else 0.0)
        return [beta * w * y[1], beta * (k * k * w - E) * y[0]]

    sol = solve_ivp(rhs, (x_out ** (1 / beta), 0.0), [p, q], method="DOP853", rtol=1e-13, atol=1e-300)
    g0, g1 = sol.y[0, -1], sol.y[1, -1] / (1 + alpha)
    r = math.hypot(g0, g1)
    return g0 / r, g1 / r


def ivp_eigenvalue(alpha: float, k: int, ratio: float, lo: float, hi: float) -> float:
    """Energy where g1/g0 of the decaying solution equals ``ratio``."""

    def f(E):
        g0, g1 = ivp_trace(alpha, k, E)
        return g1 - ratio * g0

    return brentq(f, lo, hi, xtol=1e-13)


def mp_gamma(x):
    return float(mp.gamma(x))


def mp_hankel_trace(alpha: float, E: float) -> tuple[complex, complex]:
    """(g0, g1) of u(x) = sqrt(x) H1_nu(x sqrt(E)), nu = (1+alpha)/2, x > 0.

    Fits g0 + g1 x^(1+alpha) to x^(alpha/2) u(x) at two tiny x in 300-digit
    arithmetic; the neglected terms are x^(1-alpha) relative to g1, so alpha
    should stay at or below 0.8.
    """
    with mp.workdps(300):
        a = mp.mpf(alpha)
        nu = (1 + a) / 2
        power = 1 + a

        def scaled(x):
            return mp.sqrt(x) * mp.hankel1(nu, x * mp.sqrt(E)) * x ** (a / 2)

        x1, x2 = mp.mpf("1e-120"), mp.mpf("1e-110")
        g1 = (scaled(x2) - scaled(x1)) / (x2**power - x1**power)
        g0 = scaled(x1) - g1 * x1**power
        return complex(g0), complex(g1)


def mp_amplitudes(alpha: float, a: complex, gamma: float, E: float, right_incident: bool) -> tuple[complex, complex]:
    """(A1-, A1+) for the IIa conditions g0+ = a g0-, g1- + conj(a) g1+ = gamma g0-.

    Each side carries A1 u + A2 conj(u); the incoming unit wave sits in A2 on
    the incident side.
    """
    g0, g1 = mp_hankel_trace(alpha, E)
    with mp.workdps(40):
        g0, g1, a = mp.mpc(g0), mp.mpc(g1), mp.mpc(a)
        c0, c1 = mp.conj(g0), mp.conj(g1)
        A2m, A2p = (0, 1) if right_incident else (1, 0)
        # unknowns A1m, A1p; rows are the two conditions
        m = mp.matrix([[-a * g0, g0], [g1 - gamma * g0, mp.conj(a) * g1]])
        rhs = mp.matrix([a * c0 * A2m - c0 * A2p, -(c1 * A2m - gamma * c0 * A2m + mp.conj(a) * c1 * A2p)])
        sol = mp.lu_solve(m, rhs)
        return complex(sol[0]), complex(sol[1])
