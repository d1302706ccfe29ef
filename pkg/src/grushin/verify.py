"""Seeded invariant suites behind ``grushin verify``.

Every check draws its samples from one ``random.Random(seed)`` stream and
records only numbers derived from the computation, so the report is
byte-identical for a given seed.
"""
from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass

from .extensions import ExtensionSpec, GrushinParams, boundary_residual, custom_floor, negative_count
from .fibre_solver import FibreProblem, count_below
from .scattering import (
    Direction,
    amplitude_trace,
    coefficients,
    probability_current,
    solve_amplitudes,
)
from .spectra import friedrichs_E0_bounds, variational_argmin, variational_upper
from .specfun import bessel_i, bessel_i_prime, bessel_k, bessel_k_prime, hankel
from .zero_mode import trace_of_general_solution, zero_mode_eigenfunction

__all__ = ["CheckResult", "run_checks", "report_json"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    samples: int
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _wronskian(rng: random.Random, n: int) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        nu = rng.uniform(0.5, 1.0)
        x = 10 ** rng.uniform(-2, 1.3)
        w = bessel_i(nu, x) * bessel_k_prime(nu, x) - bessel_i_prime(nu, x) * bessel_k(nu, x)
        worst = max(worst, abs(w * x + 1.0))
    return CheckResult("specfun.wronskian", n, worst, 1e-10)


def _hankel_conjugation(rng: random.Random, n: int) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        nu = rng.uniform(0.5, 1.0)
        x = 10 ** rng.uniform(-3, 2)
        h1, h2 = hankel(1, nu, x), hankel(2, nu, x)
        worst = max(worst, abs(h2 - h1.conjugate()) / abs(h1))
    return CheckResult("specfun.hankel_conjugation", n, worst, 1e-14)


def _spec_round_trip(rng: random.Random, n: int) -> CheckResult:
    bad = 0
    for i in range(n):
        kind = i % 4
        g = rng.uniform(-5, 5)
        if kind == 0:
            spec = ExtensionSpec.ir(g)
        elif kind == 1:
            spec = ExtensionSpec.il(g)
        elif kind == 2:
            spec = ExtensionSpec.iia(complex(rng.uniform(-3, 3), rng.uniform(-3, 3)), g)
        else:
            spec = ExtensionSpec.iii(*(rng.uniform(-3, 3) for _ in range(4)))
        bad += ExtensionSpec.from_json(spec.to_json()) != spec
    return CheckResult("extensions.json_round_trip", n, float(bad), 0.0)


def _analytic_count(rng: random.Random, n: int) -> CheckResult:
    # at alpha = 0 the k-th fibre eigenvalue is k^2 - kappa^2 with kappa = -ratio
    bad = 0
    for _ in range(n):
        gamma = -rng.uniform(0.05, 6.0)
        a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        spec = ExtensionSpec.iia(a, gamma)
        kappa = -gamma / (1.0 + abs(a) ** 2)
        tally = 1 + 2 * sum(1 for k in range(1, 64) if k * k - kappa * kappa < 0)
        bad += tally != negative_count(spec, GrushinParams(0.0))
    return CheckResult("extensions.analytic_count", n, float(bad), 0.0)


def _custom_floor(rng: random.Random, n: int) -> CheckResult:
    bad = 0
    for _ in range(n):
        x = rng.uniform(-3, 30)
        m = custom_floor(x)
        bad += not (x <= 0 and m == 0 or m < x <= m + 1)
    return CheckResult("extensions.custom_floor", n, float(bad), 0.0)


def _zero_mode_residual(rng: random.Random, n: int) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        alpha = rng.uniform(0.0, 0.95)
        params = GrushinParams(alpha)
        spec = ExtensionSpec.iii(*(rng.uniform(-3, 1) for _ in range(4)))
        try:
            pair = zero_mode_eigenfunction(spec, params, 0)
        except LookupError:
            continue
        for B, C in pair.basis:
            tr = trace_of_general_solution(params, -pair.energy, B, C)
            size = max(abs(v) for v in tr.as_tuple())
            worst = max(worst, max(abs(r) for r in boundary_residual(spec, tr)) / size)
    return CheckResult("zero_mode.boundary_residual", n, worst, 1e-12)


def _fibre_count(rng: random.Random, n: int) -> CheckResult:
    bad = 0
    for _ in range(n):
        alpha = rng.choice((0.25, 0.5))
        gamma = -rng.uniform(0.3, 3.0)
        spec = ExtensionSpec.ir(gamma)
        params = GrushinParams(alpha)
        tally = 1
        k = 1
        while True:
            c = count_below(spec, FibreProblem(alpha, k), 0.0)
            if c == 0:
                break
            tally += 2 * c
            k += 1
        bad += tally != negative_count(spec, params)
    return CheckResult("fibre_solver.count_match", n, float(bad), 0.0)


def _bounds(rng: random.Random, n: int) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        params = GrushinParams(rng.uniform(0.01, 0.99))
        lower, upper = friedrichs_E0_bounds(params)
        b = variational_argmin(params)
        worst = max(worst, max(0.0, lower - upper), abs(variational_upper(params, b) - upper) / upper)
    return CheckResult("spectra.bounds_order_and_minimum", n, worst, 1e-12)


def _scattering(rng: random.Random, n: int) -> list[CheckResult]:
    unit = sym = cur = 0.0
    for _ in range(n):
        params = GrushinParams(rng.uniform(0.0, 0.95))
        a = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        gamma = rng.uniform(-5, 5)
        E = 10 ** rng.uniform(-3, 3)
        c = coefficients(params, a, gamma, E)
        unit = max(unit, abs(c.T + c.R - 1.0))
        for d in Direction:
            amps = solve_amplitudes(params, a, gamma, E, d)
            sym = max(sym, abs(abs(amps.transmitted) ** 2 - c.T), abs(abs(amps.reflected) ** 2 - c.R))
            jm, jp = probability_current(params, amplitude_trace(params, amps, E))
            cur = max(cur, abs(jm - jp) / max(abs(jm), 1.0))
    return [
        CheckResult("scattering.unitarity", n, unit, 1e-12),
        CheckResult("scattering.direction_symmetry", n, sym, 1e-12),
        CheckResult("scattering.current_conservation", n, cur, 1e-10),
    ]


def run_checks(seed: int, stop_on_failure: bool = True) -> list[CheckResult]:
    """Run the suites in a fixed order; stop after the first failing check."""
    rng = random.Random(seed)
    suites = [
        lambda: [_wronskian(rng, 200)],
        lambda: [_hankel_conjugation(rng, 200)],
        lambda: [_spec_round_trip(rng, 200)],
        lambda: [_analytic_count(rng, 200)],
        lambda: [_custom_floor(rng, 500)],
        lambda: [_zero_mode_residual(rng, 100)],
        lambda: [_fibre_count(rng, 4)],
        lambda: [_bounds(rng, 200)],
        lambda: _scattering(rng, 500),
    ]
    out: list[CheckResult] = []
    for suite in suites:
        for res in suite():
            out.append(res)
            if stop_on_failure and not res.passed:
                return out
    return out


def report_json(seed: int, results: list[CheckResult]) -> str:
    body = {
        "seed": seed,
        "passed": all(r.passed for r in results),
        "checks": [r.to_dict() for r in results],
    }
    failed = [r.name for r in results if not r.passed]
    if failed:
        body["first_failure"] = failed[0]
    return json.dumps(body, indent=2) + "\n"
