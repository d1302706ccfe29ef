"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test records a line "criterion N: PASS/FAIL <detail>" in ``RESULTS``;
the conftest prints them at the end of the run.  Run directly with
``python tests/test_acceptance.py``.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from grushin.extensions import ExtensionSpec, GrushinParams, birman_parameter, negative_count
from grushin.fibre_solver import FibreProblem, birman_upper_bound_check, count_below, fibre_eigenvalues, fibre_lower_bound
from grushin.scattering import (
    Direction,
    amplitude_trace,
    asymptotic_limits,
    coefficients,
    probability_current,
    reflectionless_energy,
    solve_amplitudes,
)
from grushin.specfun import (
    bessel_i,
    bessel_i_prime,
    bessel_j,
    bessel_k,
    bessel_k_prime,
    bessel_y,
    gamma_real,
    hankel,
)
from grushin.spectra import friedrichs_E0_bounds, friedrichs_fibre_ground, ground_state
from grushin.zero_mode import zero_mode_eigenvalues

RESULTS: dict[int, str] = {}

GAMMAS = (-0.4, -1.0, -1.5, -2.5)


def report(n, ok, detail):
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    assert ok, RESULTS[n]


def one_parameter_specs(gamma):
    return [
        ExtensionSpec.ir(gamma),
        ExtensionSpec.il(gamma),
        ExtensionSpec.iia(1, gamma),
        ExtensionSpec.iia(2j, gamma),
    ]


def counting_grid():
    specs = [s for g in GAMMAS for s in one_parameter_specs(g)]
    specs += [ExtensionSpec.iii(-1, 0, 0, -1), ExtensionSpec.iii(0, 1, 0, 0), ExtensionSpec.iii(-2, 0.5, 0.5, -1)]
    return [(alpha, spec) for alpha in (0.25, 0.5) for spec in specs]


def random_coupling(rng, radius):
    r = radius * math.sqrt(rng.uniform())
    t = rng.uniform(0, 2 * math.pi)
    return complex(r * math.cos(t), r * math.sin(t))


# ------------------------------------------------------------ scattering


def test_criterion_1_unitarity():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        alpha = rng.uniform(0, 0.95)
        a = random_coupling(rng, 3.0)
        gamma = rng.uniform(-5, 5)
        E = 10.0 ** rng.uniform(-3, 3)
        c = coefficients(GrushinParams(alpha), a, gamma, E)
        worst = max(worst, abs(c.T + c.R - 1))
    report(1, worst <= 1e-12, f"max |T+R-1| = {worst:.2e} over 1000 samples (tol 1e-12)")


def test_criterion_2_bridging_constancy():
    energies = np.geomspace(1e-3, 1e3, 61)
    worst = 0.0
    for alpha in np.linspace(0, 0.95, 20):
        want = (1 + math.cos(math.pi * alpha)) / 2
        for E in energies:
            worst = max(worst, abs(coefficients(GrushinParams(alpha), 1, 0.0, E).T - want))
    half = max(abs(coefficients(GrushinParams(0.5), 1, 0.0, E).T - 0.5) for E in energies)
    ok = worst <= 1e-12 and half <= 1e-12
    report(2, ok, f"max deviation {worst:.2e} over 20 alphas x 7 decades; at alpha=0.5 {half:.2e} (tol 1e-12)")


def test_criterion_3_reflectionless():
    params = GrushinParams(0.5)
    E = reflectionless_energy(params, 1, 1.0)
    R = coefficients(params, 1, 1.0, E).R
    empty = reflectionless_energy(GrushinParams(0), 1, 1.0) is None and all(
        reflectionless_energy(GrushinParams(alpha), 1, g) is None for alpha in (0.25, 0.5, 0.75) for g in (-0.5, -1.0, -3.0)
    )
    report(3, R <= 1e-10 and empty, f"E* = {E:.10f}, R(E*) = {R:.2e} (tol 1e-10); empty for alpha=0 or gamma<0: {empty}")


def test_criterion_4_energy_limits():
    rng = np.random.default_rng(4)
    worst_high = worst_low = 0.0
    for _ in range(50):
        alpha = rng.uniform(0, 0.95)
        a = random_coupling(rng, 3.0)
        gamma = rng.uniform(-5, 5)
        params = GrushinParams(alpha)
        worst_high = max(worst_high, abs(coefficients(params, a, gamma, 1e8).T - asymptotic_limits(params, a).T_high))
        # low-energy samples need gamma away from 0, since T(E) ~ E^(1+alpha) / gamma^2
        low_gamma = math.copysign(rng.uniform(0.1, 5), rng.uniform(-1, 1))
        worst_low = max(worst_low, coefficients(params, a, low_gamma, 1e-10).T)
    ok = worst_high <= 1e-3 and worst_low <= 1e-3
    report(4, ok, f"max |T(1e8)-T_high| = {worst_high:.2e}, max T(1e-10) = {worst_low:.2e} over 50 samples (tol 1e-3)")


# -------------------------------------------------------------- counting


def test_criterion_5_analytic_count():
    mismatches = []
    for gamma in GAMMAS:
        for spec in one_parameter_specs(gamma):
            a = spec.a if spec.family.value == "IIa" else 0
            kappa = -gamma / (1 + abs(a) ** 2)
            fibres = sum(1 for k in range(-10, 11) if k != 0 and k * k - kappa * kappa < 0)
            tally = 1 + fibres
            got = negative_count(spec, GrushinParams(0))
            if got != tally:
                mismatches.append((spec.family.value, gamma, got, tally))
    report(5, not mismatches, f"16 cases at alpha=0, mismatches: {mismatches}")


def fibre_tally(spec, alpha):
    # k = 0: every zero-mode level of the grid lies below -1e-2, so -1e-4 separates
    # them from the continuum edge; k and -k are unitarily equivalent
    tally = count_below(spec, FibreProblem(alpha, 0), -1e-4)
    return tally + 2 * sum(count_below(spec, FibreProblem(alpha, k), -1e-9) for k in range(1, 11))


def test_criterion_6_numeric_count():
    start = time.perf_counter()
    mismatches = []
    for alpha, spec in counting_grid():
        got, tally = negative_count(spec, GrushinParams(alpha)), fibre_tally(spec, alpha)
        if got != tally:
            mismatches.append((alpha, spec.to_json(), got, tally))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed <= 60
    report(6, ok, f"38 cases, mismatches: {mismatches}, {elapsed:.1f} s (limit 60 s)")


# ------------------------------------------------------------ ground state


def closed_form_ground(alpha, effective_gamma):
    # the decaying k = 0 solution has g1/g0 = c E^nu; the condition g1 = gamma g0 fixes E
    nu = (1 + alpha) / 2
    c = 2.0 ** (-1 - alpha) * gamma_real(-nu) / gamma_real(nu)
    return -((effective_gamma / c) ** (1 / nu))


def test_criterion_7_ground_states():
    params = GrushinParams(0)
    cases = [
        (ExtensionSpec.ir(-1), -1.0, 1, -1.0),
        (ExtensionSpec.iia(1, -1), -1.0 / 2, 1, -0.25),
        (ExtensionSpec.iii(-1, 0, 0, -1), -1.0, 2, -1.0),
    ]
    details, ok = [], True
    for spec, effective_gamma, degeneracy, expected in cases:
        closed = closed_form_ground(0.0, effective_gamma)
        gs = ground_state(spec, params)
        root = fibre_eigenvalues(spec, FibreProblem(0, 0), None, -1e-3)[0]
        good = (
            abs(closed - expected) <= 1e-12
            and abs(gs.energy - closed) <= 1e-12
            and gs.degeneracy == degeneracy
            and abs(root - closed) <= 1e-6
        )
        ok &= good
        details.append(f"{spec.family.value}: E={gs.energy:.15f} deg={gs.degeneracy} solver={root:.12f}")
    report(7, ok, "; ".join(details))


def test_criterion_8_friedrichs_bounds():
    rows, ok = [], True
    for alpha in np.round(np.arange(1, 10) / 10, 1):
        params = GrushinParams(alpha)
        lower, upper = friedrichs_E0_bounds(params)
        value = friedrichs_fibre_ground(params)
        ok &= lower <= value <= upper
        rows.append(f"{alpha}:{value:.6f}")
    limit = max(abs(b - 1) for alpha in (1e-12, 0.0) for b in friedrichs_E0_bounds(GrushinParams(alpha)))
    ok &= limit <= 1e-10
    report(8, ok, f"E0 in [lower, upper] at {', '.join(rows)}; bounds at alpha->0 within {limit:.1e} of 1 (tol 1e-10)")


def test_criterion_9_birman_bounds():
    checked, failures = 0, []
    for alpha, spec in counting_grid():
        params = GrushinParams(alpha)
        for k in range(1, 11):
            if birman_parameter(spec, params, k).lowest() >= 0:
                continue
            bound, holds = birman_upper_bound_check(spec, FibreProblem(alpha, k))
            checked += 1
            if not holds:
                failures.append((alpha, spec.to_json(), k, bound))
    report(9, checked > 0 and not failures, f"{checked} fibres with a negative level checked, failures: {failures}")


def lowest_level(spec, problem):
    top = 2.0 * fibre_lower_bound(problem)
    while True:
        levels = fibre_eigenvalues(spec, problem, None, top)
        if levels:
            return levels[0]
        top *= 1.5


def test_criterion_10_ordering():
    ok, rows = True, []
    for alpha in (0.25, 0.5):
        for name, spec in (("F", ExtensionSpec.friedrichs()), ("IIa(1,-3)", ExtensionSpec.iia(1, -3))):
            lows = [lowest_level(spec, FibreProblem(alpha, k)) for k in (1, 2, 3)]
            lows_negative_k = [lowest_level(spec, FibreProblem(alpha, -k)) for k in (1, 2, 3)]
            ok &= lows[0] < lows[1] < lows[2] and lows_negative_k[0] < lows_negative_k[1] < lows_negative_k[2]
            rows.append(f"{name}@{alpha}: " + " < ".join(f"{e:.6f}" for e in lows))
    report(10, ok, "; ".join(rows))


# ------------------------------------------------------ special functions


def u_hankel_expansion(alpha, E, x):
    # two leading terms of sqrt(x) H1_nu(x sqrt(E)) as x -> 0, nu = (1 + alpha)/2
    nu = (1 + alpha) / 2
    s = math.sin(nu * math.pi)
    lead = -1j * 2.0**nu / (E ** (nu / 2) * gamma_real(1 - nu) * s)
    second = 1j * E ** (nu / 2) * complex(math.cos(nu * math.pi), -s) / (2.0**nu * gamma_real(1 + nu) * s)
    return lead, second


def test_criterion_11_special_functions():
    rng = np.random.default_rng(11)
    wronskian = 0.0
    for _ in range(500):
        nu, x = rng.uniform(0, 3), 10.0 ** rng.uniform(-4, math.log10(40))
        w = bessel_i(nu, x) * bessel_k_prime(nu, x) - bessel_i_prime(nu, x) * bessel_k(nu, x)
        wronskian = max(wronskian, abs(w * x + 1.0))
    half = 0.0
    for x in (0.01, 0.1, 1.0, 2.0, 5.0, 20.0, 50.0):
        pairs = [
            (bessel_k(0.5, x), math.sqrt(math.pi / (2 * x)) * math.exp(-x)),
            (bessel_i(0.5, x), math.sqrt(2 / (math.pi * x)) * math.sinh(x)),
            (bessel_j(0.5, x), math.sqrt(2 / (math.pi * x)) * math.sin(x)),
            (bessel_y(0.5, x), -math.sqrt(2 / (math.pi * x)) * math.cos(x)),
        ]
        half = max(half, max(abs(got - want) / abs(want) for got, want in pairs))
    conjugation = 0.0
    for _ in range(500):
        nu, x = rng.uniform(0, 3), 10.0 ** rng.uniform(-4, math.log10(300))
        if abs(nu - round(nu)) < 1e-9:
            continue
        h1, h2 = hankel(1, nu, x), hankel(2, nu, x)
        conjugation = max(conjugation, abs(h2 - h1.conjugate()) / abs(h1))
    small_full = small_real = 0.0
    x = 1e-4
    for alpha in (0.0, 0.25, 0.5, 0.75, 0.9):
        for E in (0.5, 1.0, 4.0):
            u = math.sqrt(x) * hankel(1, (1 + alpha) / 2, x * math.sqrt(E))
            lead, second = u_hankel_expansion(alpha, E, x)
            two_term = lead * x ** (-alpha / 2) + second * x ** (1 + alpha / 2)
            small_full = max(small_full, abs(u - two_term) / abs(two_term))
            # the real part has no x^(-alpha/2) term and isolates the second coefficient
            small_real = max(small_real, abs(u.real / x ** (1 + alpha / 2) - second.real) / abs(second.real))
    ok = wronskian <= 1e-10 and half <= 1e-13 and conjugation <= 1e-14 and small_full <= 1e-6 and small_real <= 1e-6
    report(
        11,
        ok,
        f"Wronskian {wronskian:.1e} (1e-10), half-integer {half:.1e} (1e-13), "
        f"conjugation {conjugation:.1e} (1e-14), small-x value {small_full:.1e} and coefficient {small_real:.1e} (1e-6)",
    )


# ------------------------------------------------------------ conservation


def test_criterion_12_current_conservation():
    rng = np.random.default_rng(12)
    worst = 0.0
    for i in range(200):
        alpha = rng.uniform(0, 0.95)
        a = random_coupling(rng, 3.0)
        gamma = rng.uniform(-5, 5)
        E = 10.0 ** rng.uniform(-3, 3)
        params = GrushinParams(alpha)
        direction = Direction.RIGHT if i % 2 == 0 else Direction.LEFT
        amps = solve_amplitudes(params, a, gamma, E, direction)
        jm, jp = probability_current(params, amplitude_trace(params, amps, E))
        worst = max(worst, abs(jm - jp))
    report(12, worst <= 1e-10, f"max |J- - J+| = {worst:.2e} over 200 states (tol 1e-10)")


def test_criterion_13_verify_determinism(tmp_path):
    outputs = []
    for i in range(2):
        path = tmp_path / f"verify{i}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "grushin.cli", "verify", "--seed", "2024", "-o", str(path)],
            capture_output=True,
        )
        outputs.append(path.read_bytes() if proc.returncode == 0 else None)
    ok = outputs[0] is not None and outputs[0] == outputs[1]
    report(13, ok, f"two runs with seed 2024, {len(outputs[0] or b'')} bytes each, identical: {ok}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
