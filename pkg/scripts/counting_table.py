"""Compare the closed-form negative-eigenvalue count with a fibre-by-fibre tally.

Usage: python scripts/counting_table.py
"""

from grushin.extensions import ExtensionSpec, GrushinParams, negative_count
from grushin.fibre_solver import FibreProblem, count_below

SPECS = [
    ExtensionSpec.ir(-1.0),
    ExtensionSpec.ir(-2.5),
    ExtensionSpec.iia(1, -2.5),
    ExtensionSpec.iia(2j, -2.5),
    ExtensionSpec.iii(-1, 0, 0, -1),
    ExtensionSpec.iii(-2, 0.5, 0.5, -1),
]


def tally(spec: ExtensionSpec, alpha: float, k_max: int = 10) -> int:
    # zero-mode levels of these specs lie well below -1e-4; k and -k count alike
    total = count_below(spec, FibreProblem(alpha, 0), -1e-4)
    return total + 2 * sum(count_below(spec, FibreProblem(alpha, k), -1e-9) for k in range(1, k_max + 1))


def main() -> None:
    print(f"{'alpha':>6}  {'extension':<48} {'closed':>6} {'tally':>6}")
    for alpha in (0.0, 0.25, 0.5, 0.75):
        for spec in SPECS:
            closed = negative_count(spec, GrushinParams(alpha))
            counted = tally(spec, alpha)
            flag = "" if closed == counted else "  <- mismatch"
            print(f"{alpha:6.2f}  {spec.to_json():<48} {closed:6d} {counted:6d}{flag}")


if __name__ == "__main__":
    main()
