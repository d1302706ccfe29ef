"""Write transmission curves T(E) for a few couplings to a CSV file.

Usage: python scripts/transmission_curves.py [output.csv]
"""

import csv
import sys

import numpy as np

from grushin.extensions import GrushinParams
from grushin.scattering import coefficients, reflectionless_energy

CASES = [
    (0.5, 1.0, 0.0),
    (0.5, 1.0, 1.0),
    (0.5, 1.0, -1.0),
    (0.25, 2j, 0.5),
    (0.75, 0.5, 2.0),
]


def main(path: str = "transmission_curves.csv") -> None:
    energies = np.geomspace(1e-4, 1e4, 161)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["alpha", "a", "gamma", "E", "T", "R"])
        for alpha, a, gamma in CASES:
            params = GrushinParams(alpha)
            for E in energies:
                c = coefficients(params, a, gamma, float(E))
                out.writerow([alpha, a, gamma, f"{E:.17g}", f"{c.T:.17g}", f"{c.R:.17g}"])
            E_star = reflectionless_energy(params, a, gamma)
            if E_star is not None:
                print(f"alpha={alpha} a={a} gamma={gamma}: full transmission at E={E_star:.12g}")
    print(f"wrote {path}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
