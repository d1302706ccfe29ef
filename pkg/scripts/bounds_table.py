"""Print the Friedrichs k = 1 fibre bottom next to its lower and upper bounds.

Usage: python scripts/bounds_table.py [n_alpha]
"""

import sys

import numpy as np

from grushin.extensions import GrushinParams
from grushin.spectra import friedrichs_E0_bounds, friedrichs_fibre_ground


def main(n_alpha: int = 9) -> None:
    print(f"{'alpha':>6} {'lower':>12} {'numeric':>12} {'upper':>12}")
    for alpha in np.linspace(0.1, 0.9, n_alpha):
        params = GrushinParams(float(alpha))
        lower, upper = friedrichs_E0_bounds(params)
        value = friedrichs_fibre_ground(params)
        print(f"{alpha:6.3f} {lower:12.8f} {value:12.8f} {upper:12.8f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 9)
