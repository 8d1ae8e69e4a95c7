"""Calibration residuals of an exact solution versus a non-solution.

Lifts the affine family and the swapped pair (u, v) = (y, x) at random base
points for n = 3..6 and prints the Kaehler-form residual, the Im-det
residual, and the decomposition fit residual side by side.
"""

import sys

import numpy as np

from slfold.calibration import (
    decomposition_check,
    im_omega_residual,
    omega_residual,
    tangent_frame,
)
from slfold.embedding import lift_point
from slfold.errors import SlfoldError


def sweep(params, data, rng, count=200):
    worst = np.zeros(3)
    used = 0
    while used < count:
        x, y = rng.uniform(-2, 2, 2)
        u, v, partials = data(x, y)
        if v * v + y * y < 0.1:
            continue
        try:
            sample = lift_point(params, x, y, u, v)
            frame = tangent_frame(params, sample, *partials)
            fit = decomposition_check(params, frame)
        except SlfoldError:
            continue
        used += 1
        worst = np.maximum(
            worst, [omega_residual(frame), im_omega_residual(frame), fit.residual]
        )
    return worst


def main() -> int:
    rng = np.random.default_rng(42)
    alpha, beta, gamma = 0.8, -0.3, 1.1
    affine = lambda x, y: (alpha * x + beta, alpha * y + gamma, (alpha, 0.0, 0.0, alpha))
    swapped = lambda x, y: (y, x, (0.0, 1.0, 1.0, 0.0))

    print(f"{'n':>3} {'case':>10} {'omega':>10} {'im-det':>10} {'fit':>10}")
    for n in (3, 4, 5, 6):
        while True:
            a = rng.uniform(-2, 3, n - 1)
            if (a == a.min()).sum() == 1:
                break
        from slfold.branch import ReductionParams

        params = ReductionParams(n, tuple(a))
        for label, data in (("affine", affine), ("swapped", swapped)):
            w = sweep(params, data, rng)
            print(f"{n:>3} {label:>10} {w[0]:>10.2e} {w[1]:>10.2e} {w[2]:>10.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
