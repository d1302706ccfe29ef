"""Shooting solver for one fibre operator on the two half-lines.

The fibre operator is

    -g'' + (k^2 |x|^(2 alpha) + alpha (2 + alpha) / (4 x^2)) g = E g

on each half-line.  A solution that decays at infinity is integrated inward
with Numerov's method in the Liouville variable t = ln x, where
g = e^(t/2) w and

    w'' = Q(t) w,   Q = (1 + alpha)^2 / 4 + k^2 e^((2 + 2 alpha) t) - E e^(2t),

so a uniform t-step is a geometric mesh in x.  Near x = 0 the solution is fitted
to the two Frobenius solutions x^(-alpha/2)(1 + ...) and x^(1+alpha/2)(1 + ...),
whose coefficients are the boundary values (g0, g1).  Two runs with step h and
h/2 are Richardson-combined.

Both half-lines carry the same decaying solution, so every boundary condition
reduces to a homogeneous quadratic in (g0, g1).  Its linear factors are
conditions ``theta(E) = phi (mod pi)`` on the angle theta = atan2(g1, g0),
which increases monotonically with E.  Eigenvalues are bracketed by the
crossings of theta and refined with Brent's method.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from .extensions import BoundaryTrace, ConfigError, ExtensionSpec, boundary_residual

__all__ = [
    "ShootingError",
    "FibreProblem",
    "ShootingResult",
    "SolverConfig",
    "potential",
    "outer_boundary",
    "frobenius_basis",
    "shoot_inward",
    "trace_phase",
    "condition_angles",
    "fibre_eigenvalues",
    "count_below",
    "fibre_lower_bound",
    "birman_upper_bound_check",
    "dump_shooting_csv",
]

log = logging.getLogger(__name__)


class ShootingError(RuntimeError):
    """The shooting method cannot deliver a trustworthy answer."""


@dataclass(frozen=True)
class FibreProblem:
    alpha: float
    k: int

    def __post_init__(self):
        a = float(self.alpha)
        if not (math.isfinite(a) and 0.0 <= a < 1.0):
            raise ConfigError("alpha", f"must lie in [0, 1), got {self.alpha!r}")
        if int(self.k) != self.k:
            raise ConfigError("k", f"must be an integer, got {self.k!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "k", int(self.k))

    @property
    def coupling(self) -> float:
        return self.alpha * (2.0 + self.alpha) / 4.0

    def threshold(self) -> float:
        """Bottom of the continuum of this fibre (inf when the spectrum is discrete)."""
        if self.k == 0:
            return 0.0
        if self.alpha == 0.0:
            return float(self.k * self.k)
        return math.inf


@dataclass(frozen=True)
class SolverConfig:
    action: float = 25.0  # decay exponent between turning point and outer end
    step_scale: float = 0.05  # h * sqrt(max |Q|)
    max_step: float = 0.01
    max_outer: float = 5.0e3
    max_steps: int = 1_000_000  # coarse steps; the fine run takes twice as many
    fit_points: int = 41
    fit_tol: float = 1e-5
    richardson: bool = True


DEFAULT = SolverConfig()


@dataclass
class ShootingResult:
    E: float
    trace: BoundaryTrace
    g0: float
    g1: float
    fit_residual: float
    x_inner: float
    x_outer: float
    nodes: int
    grid: np.ndarray = field(repr=False)  # columns x, g(x), same scale as (g0, g1)

    @property
    def angle(self) -> float:
        """atan2(g1, g0) in (-pi, pi]."""
        return math.atan2(self.g1, self.g0)

    @property
    def phase(self) -> float:
        """Continuous, increasing phase atan(g1/g0) + pi * nodes."""
        if self.g0 == 0.0:
            return math.pi / 2 + math.pi * self.nodes
        return math.atan(self.g1 / self.g0) + math.pi * self.nodes


def potential(problem: FibreProblem, x: float) -> float:
    x = float(x)
    if x == 0.0:
        raise ConfigError("x", "the potential is singular at x = 0")
    ax = abs(x)
    return problem.k**2 * ax ** (2.0 * problem.alpha) + problem.coupling / (ax * ax)


def fibre_lower_bound(problem: FibreProblem) -> float:
    a = problem.alpha
    p = 1.0 + a
    return p * ((2.0 + a) / 4.0) ** (a / p) * abs(problem.k) ** (2.0 / p)


# ------------------------------------------------------------ Frobenius

def _frobenius_coefficients(alpha: float, k2: float, E: float, s: float, size: int) -> np.ndarray:
    # a[m, n] multiplies x^(s + 2m + (2+2alpha) n)
    r1, r2 = -0.5 * alpha, 1.0 + 0.5 * alpha
    a = np.zeros((size, size))
    a[0, 0] = 1.0
    for m in range(size):
        for n in range(size):
            if m == 0 and n == 0:
                continue
            q = s + 2.0 * m + (2.0 + 2.0 * alpha) * n
            acc = 0.0
            if n > 0:
                acc += k2 * a[m, n - 1]
            if m > 0:
                acc -= E * a[m - 1, n]
            a[m, n] = acc / ((q - r1) * (q - r2))
    return a


def frobenius_basis(alpha: float, k: int, E: float, x: np.ndarray, size: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """The solutions x^(-alpha/2)(1+...) and x^(1+alpha/2)(1+...) on x > 0."""
    x = np.asarray(x, dtype=float)
    k2 = float(k) ** 2
    out = []
    for s in (-0.5 * alpha, 1.0 + 0.5 * alpha):
        a = _frobenius_coefficients(alpha, k2, E, s, size)
        u = x * x
        v = x ** (2.0 + 2.0 * alpha)
        mpow = u[:, None] ** np.arange(size)[None, :]
        npow = v[:, None] ** np.arange(size)[None, :]
        series = np.einsum("im,mn,in->i", mpow, a, npow)
        tail = np.abs(mpow[:, -1] * a[-1, 0]) + np.abs(npow[:, -1] * a[0, -1])
        if np.any(tail > 1e-15 * np.abs(series)):
            raise ShootingError("Frobenius series not converged on the fit window")
        out.append(x**s * series)
    return out[0], out[1]


# -------------------------------------------------------------- Numerov

@numba.njit(cache=True, nogil=True)
def _numerov_inward(t0, h, n, alpha, k2, E, w_last, w_prev):
    # summed form: y = (1 - h^2 Q / 12) w, d_j = y_{j-1} - y_j, d_j = d_{j+1} + h^2 Q_j w_j;
    # accumulating first differences keeps round-off from growing like n^2
    w = np.empty(n + 1)
    c = 0.25 * (1.0 + alpha) ** 2
    h2 = h * h
    p = 2.0 + 2.0 * alpha
    t = t0 + n * h
    q_hi = c + k2 * math.exp(p * t) - E * math.exp(2.0 * t)
    t = t0 + (n - 1) * h
    q_j = c + k2 * math.exp(p * t) - E * math.exp(2.0 * t)
    w[n] = w_last
    w[n - 1] = w_prev
    y_j = (1.0 - h2 * q_j / 12.0) * w_prev
    d = y_j - (1.0 - h2 * q_hi / 12.0) * w_last
    comp = 0.0  # Kahan compensation for y
    for j in range(n - 1, 0, -1):
        d += h2 * q_j * w[j]
        # y_{j-1} = y_j + d with compensated addition
        inc = d - comp
        y_new = y_j + inc
        comp = (y_new - y_j) - inc
        y_j = y_new
        t = t0 + (j - 1) * h
        q_j = c + k2 * math.exp(p * t) - E * math.exp(2.0 * t)
        w[j - 1] = y_j / (1.0 - h2 * q_j / 12.0)
        if abs(w[j - 1]) > 1e200:
            for i in range(j - 1, n + 1):
                w[i] *= 1e-200
            y_j *= 1e-200
            d *= 1e-200
            comp *= 1e-200
    return w


def _q_of_x(problem: FibreProblem, E: float, x: np.ndarray) -> np.ndarray:
    a = problem.alpha
    return 0.25 * (1.0 + a) ** 2 + problem.k**2 * x ** (2.0 + 2.0 * a) - E * x * x


def _default_inner(problem: FibreProblem, E: float) -> float:
    # keep the fit window [x_in, 10 x_in] inside the fast-converging Frobenius zone
    x_in = 0.02
    if E != 0:
        x_in = min(x_in, 0.15 / math.sqrt(abs(E)))
    if problem.k != 0:
        x_in = min(x_in, 0.1 * (1.5 / abs(problem.k)) ** (1.0 / (1.0 + problem.alpha)))
    return x_in


def _action(problem: FibreProblem, E: float, x_from: float, x_to: float) -> float:
    xs = np.linspace(x_from, x_to, 2001)
    v = problem.k**2 * xs ** (2.0 * problem.alpha) + problem.coupling / xs**2 - E
    return float(trapezoid(np.sqrt(np.clip(v, 0.0, None)), xs))


def outer_boundary(problem: FibreProblem, E: float, x_start: float = 0.2, cfg: SolverConfig = DEFAULT) -> float:
    """Outer end where the decaying solution has gained ``cfg.action`` e-folds."""
    k2, a = problem.k**2, problem.alpha
    if E >= problem.threshold():
        raise ShootingError(f"E={E!r} is not below the continuum threshold {problem.threshold()!r}")
    if a == 0.0 or k2 == 0:
        kappa = math.sqrt(k2 - E)
        return max(cfg.action / kappa, x_start * 2.0)
    # largest turning point, ignoring the (positive) inverse-square term
    x_turn = (E / k2) ** (1.0 / (2.0 * a)) if E > 0 else 0.0
    lo = max(x_turn, x_start)
    x = 1.25 * lo
    while _action(problem, E, lo, x) < cfg.action:
        x *= 1.25
        if x > cfg.max_outer:
            raise ShootingError(
                f"outer boundary beyond {cfg.max_outer:g} for alpha={a}, k={problem.k}, E={E!r}"
            )
    return x


def _wkb_start(problem: FibreProblem, E: float, t_end: float, h: float) -> tuple[float, float]:
    x1, x0 = math.exp(t_end), math.exp(t_end - h)
    q1, q0 = _q_of_x(problem, E, np.array([x1, x0]))
    if q1 <= 0:
        raise ShootingError("outer boundary is not in the decaying regime")
    qm = _q_of_x(problem, E, np.array([math.exp(t_end - 0.5 * h)]))[0]
    return 1.0, math.exp(h * math.sqrt(max(qm, 0.0))) * (q1 / max(q0, 1e-300)) ** 0.25


def _single_run(problem, E, t_in, t_out, n, n_fit):
    h = (t_out - t_in) / n
    w_last, w_prev = _wkb_start(problem, E, t_out, h)
    w = _numerov_inward(t_in, h, n, problem.alpha, float(problem.k**2), float(E), w_last, w_prev)
    t = t_in + h * np.arange(n + 1)
    x = np.exp(t)
    g = np.exp(0.5 * t) * w
    xf, gf = x[: n_fit + 1], g[: n_fit + 1]
    p0, p1 = frobenius_basis(problem.alpha, problem.k, E, xf)
    scale0, scale1 = np.max(np.abs(p0)), np.max(np.abs(p1))
    A = np.column_stack([p0 / scale0, p1 / scale1])
    coef, *_ = np.linalg.lstsq(A, gf, rcond=None)
    resid = float(np.linalg.norm(A @ coef - gf) / np.linalg.norm(gf))
    return coef[0] / scale0, coef[1] / scale1, resid, x, g


def _count_nodes(g: np.ndarray, g0: float) -> int:
    # sign changes on the mesh, plus one inside (0, x_inner) when the
    # singular coefficient and the innermost sample disagree in sign
    s = np.sign(g)
    n = int(np.count_nonzero(s[:-1] * s[1:] < 0))
    if g0 != 0.0 and np.sign(g0) != s[0]:
        n += 1
    return n


def shoot_inward(
    problem: FibreProblem,
    E: float,
    x_outer: float | None = None,
    x_inner: float | None = None,
    cfg: SolverConfig = DEFAULT,
) -> ShootingResult:
    """Integrate the decaying solution inward and extract (g0, g1).

    The trace is normalized so that g0 = 1 when |g0| >= |g1|, and |g1| = 1
    otherwise (the Friedrichs-like case g0 ~ 0); the sign of the raw solution,
    positive at the outer end, is kept.
    """
    E = float(E)
    x_in = _default_inner(problem, E) if x_inner is None else float(x_inner)
    if not 0 < x_in <= 0.05:
        raise ConfigError("x_inner", f"must lie in (0, 0.05], got {x_inner!r}")
    x_out = outer_boundary(problem, E, 10.0 * x_in, cfg) if x_outer is None else float(x_outer)
    if x_out <= 10.0 * x_in:
        raise ConfigError("x_outer", "must exceed the fit window")
    if potential(problem, x_out) - E <= 0.0:
        raise ShootingError(f"x_outer={x_out!r} is not in the decaying regime (V <= E)")

    t_in, t_out = math.log(x_in), math.log(x_out)
    xs = np.exp(np.linspace(t_in, t_out, 4001))
    qmax = float(np.max(np.abs(_q_of_x(problem, E, xs))))
    h = min(cfg.max_step, cfg.step_scale / math.sqrt(qmax))
    # the fit window [x_in, 10 x_in] holds exactly fit_points coarse nodes
    m = cfg.fit_points - 1
    h = math.log(10.0) / (m * math.ceil(math.log(10.0) / (m * h)))
    n = int(math.ceil((t_out - t_in) / h))
    if n > cfg.max_steps:
        raise ShootingError(f"{n} steps needed at E={E!r}, above the limit of {cfg.max_steps}")
    t_out = t_in + n * h
    fine = _single_run(problem, E, t_in, t_out, 2 * n, 2 * m)
    if cfg.richardson:
        coarse = _single_run(problem, E, t_in, t_out, n, m)
        resid = max(coarse[2], fine[2])
    else:
        resid = fine[2]
    if resid > cfg.fit_tol:
        raise ShootingError(f"fit residual {resid:.3g} exceeds {cfg.fit_tol:g}")

    def unit(c0, c1):
        r = math.hypot(c0, c1)
        return c0 / r, c1 / r

    g0, g1 = unit(fine[0], fine[1])
    if cfg.richardson:
        c0, c1 = unit(coarse[0], coarse[1])
        g0, g1 = (16.0 * g0 - c0) / 15.0, (16.0 * g1 - c1) / 15.0
    norm = abs(g0) if abs(g0) >= abs(g1) else abs(g1)
    g0, g1 = g0 / norm, g1 / norm
    raw_scale = math.hypot(fine[0], fine[1]) * norm
    grid = np.column_stack([fine[3], fine[4] / raw_scale])
    # the node count must use the same g0 as the phase, else near g0 = 0
    # the two can disagree and the phase jumps by pi
    nodes = _count_nodes(fine[4], g0)
    trace = BoundaryTrace(complex(g0), complex(g0), complex(g1), complex(g1))
    return ShootingResult(E, trace, g0, g1, resid, x_in, x_out, nodes, grid)


def trace_phase(problem: FibreProblem, E: float, cfg: SolverConfig = DEFAULT) -> float:
    """Continuous phase of the decaying solution's trace; increases with E.

    It tends to -pi/2 as E -> -inf and passes pi/2 + j pi exactly at the
    Friedrichs levels (g0 = 0).
    """
    return shoot_inward(problem, E, cfg=cfg).phase


# ------------------------------------------------------ eigenvalue search

def condition_angles(spec: ExtensionSpec) -> list[tuple[float, int]]:
    """Angles phi in (-pi/2, pi/2] with multiplicities.

    With (B, C) scaling the decaying solution on the left and right half-line,
    the boundary conditions are singular exactly when the trace direction
    (g0, g1) = (cos theta, sin theta) satisfies theta = phi (mod pi) for one of
    the returned angles.
    """

    def det(g0: float, g1: float) -> complex:
        left = boundary_residual(spec, BoundaryTrace(g0, 0, g1, 0))
        right = boundary_residual(spec, BoundaryTrace(0, g0, 0, g1))
        return left[0] * right[1] - left[1] * right[0]

    c00, c11 = det(1.0, 0.0), det(0.0, 1.0)
    c01 = det(1.0, 1.0) - c00 - c11
    coeffs = np.array([c00, c01, c11], dtype=complex)
    big = coeffs[np.argmax(np.abs(coeffs))]
    if big == 0:
        raise ConfigError("spec", "boundary conditions are degenerate")
    coeffs = coeffs / big
    if np.max(np.abs(coeffs.imag)) > 1e-12:
        raise ConfigError("spec", "boundary form is not real; conditions not self-adjoint")
    c00, c01, c11 = coeffs.real
    tol = 1e-13
    angles: list[float] = []
    if abs(c11) <= tol:
        # g0 divides the form
        angles.append(math.pi / 2)
        angles.append(math.atan(-c00 / c01) if abs(c01) > tol else math.pi / 2)
    else:
        disc = c01 * c01 - 4.0 * c11 * c00
        if disc < -1e-12 * (c01 * c01 + abs(4.0 * c11 * c00)):
            raise ConfigError("spec", "boundary form has complex roots")
        root = math.sqrt(max(disc, 0.0))
        for r in ((-c01 - root) / (2.0 * c11), (-c01 + root) / (2.0 * c11)):
            angles.append(math.atan(r))
    angles.sort()
    out: list[tuple[float, int]] = []
    for phi in angles:
        if out and abs(out[-1][0] - phi) <= 1e-12:
            out[-1] = (out[-1][0], out[-1][1] + 1)
        else:
            out.append((phi, 1))
    return out


def _targets(phi: float, lo: float, hi: float) -> list[float]:
    """phi + j pi inside (lo, hi]."""
    j = math.floor((lo - phi) / math.pi)
    out = []
    while phi + j * math.pi <= hi:
        if phi + j * math.pi > lo:
            out.append(phi + j * math.pi)
        j += 1
    return out


def _check_window(problem: FibreProblem, E_max: float) -> None:
    thr = problem.threshold()
    if not E_max < thr:
        raise ConfigError(
            "E_max",
            f"must stay below the continuum threshold {thr!r} of fibre k={problem.k} at alpha={problem.alpha}",
        )


class _Phase:
    """Cached phase evaluations with bracket lookup."""

    def __init__(self, problem: FibreProblem, cfg: SolverConfig):
        self.problem, self.cfg = problem, cfg
        self.seen: dict[float, float] = {}

    def __call__(self, E: float) -> float:
        E = float(E)
        if E not in self.seen:
            self.seen[E] = trace_phase(self.problem, E, self.cfg)
        return self.seen[E]

    def bracket(self, target: float) -> tuple[float, float]:
        below = [E for E, th in self.seen.items() if th < target]
        above = [E for E, th in self.seen.items() if th >= target]
        return max(below), min(above)

    def go_below(self, target: float, start: float) -> None:
        E = min(start, -1.0)
        while self(E) >= target:
            E = 4.0 * E
            if E < -1e12:
                raise ShootingError("no energy found below every eigenvalue")


def fibre_eigenvalues(
    spec: ExtensionSpec,
    problem: FibreProblem,
    E_min: float | None,
    E_max: float,
    cfg: SolverConfig = DEFAULT,
    rtol: float = 1e-12,
) -> list[float]:
    """Eigenvalues in (E_min, E_max], ascending and repeated by multiplicity.

    ``E_min=None`` means no lower limit.  At alpha = 0, and for k = 0, the
    window must stay below the continuum threshold.
    """
    _check_window(problem, E_max)
    if E_min is not None and E_min >= E_max:
        return []
    phase = _Phase(problem, cfg)
    th_hi = phase(E_max)
    th_lo = -math.pi / 2 if E_min is None else phase(E_min)
    roots: list[float] = []
    for phi, mult in condition_angles(spec):
        for target in _targets(phi, th_lo, th_hi):
            if E_min is None:
                phase.go_below(target, E_max - 1.0)
            a, b = phase.bracket(target)
            if phase(b) == target:
                root = b
            else:
                root = brentq(lambda E: phase(E) - target, a, b, xtol=1e-14, rtol=max(rtol, 1e-15))
            roots.extend([root] * mult)
    roots.sort()
    return roots


def count_below(spec: ExtensionSpec, problem: FibreProblem, E: float, cfg: SolverConfig = DEFAULT) -> int:
    """Number of eigenvalues strictly below E, read off one phase evaluation."""
    _check_window(problem, E)
    th = trace_phase(problem, E, cfg)
    return sum(
        mult * sum(1 for t in _targets(phi, -math.pi / 2, th) if t < th)
        for phi, mult in condition_angles(spec)
    )


def birman_upper_bound_check(spec: ExtensionSpec, problem: FibreProblem, cfg: SolverConfig = DEFAULT) -> tuple[float, bool]:
    """Lowest Birman eigenvalue as a bound on the lowest negative fibre eigenvalue.

    Raises NoSuchEigenvalue when the Birman parameter is non-negative, since
    the fibre then has no negative eigenvalue to bound.
    """
    from .extensions import GrushinParams, birman_parameter
    from .zero_mode import NoSuchEigenvalue

    bound = birman_parameter(spec, GrushinParams(problem.alpha), problem.k).lowest()
    if bound >= 0:
        raise NoSuchEigenvalue(f"fibre k={problem.k} has no negative eigenvalue (Birman lowest {bound!r} >= 0)")
    top = min(0.0, problem.threshold()) if problem.threshold() < math.inf else 0.0
    neg = [e for e in fibre_eigenvalues(spec, problem, None, top - 1e-12, cfg) if e < 0]
    if not neg:
        raise ShootingError(f"no negative eigenvalue in fibre k={problem.k}")
    return bound, neg[0] <= bound


def dump_shooting_csv(result: ShootingResult, path) -> None:
    """Write the solution samples as CSV with columns x, value."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "value"])
        for x, v in result.grid:
            w.writerow([f"{x:.17g}", f"{v:.17g}"])
