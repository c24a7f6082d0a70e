"""Convergence of the FMM with the interpolation order.

Runs the solver on a uniform cube of particles against the direct O(N^2)
summation and prints the relative l2 error for increasing 1D order L, once
in the Laplace limit (kappa = 0) and once in an oscillatory regime.  The
error should shrink geometrically, by roughly an order of magnitude per
added node.
"""

import numpy as np

from helmfmm import (
    Distribution,
    FmmConfig,
    HelmholtzKernel,
    compute_root_box,
    direct_sum,
    generate_distribution,
    random_charges,
    relative_errors,
    run_fmm,
)

N = 3000

points = generate_distribution(Distribution("uniform-cube", N, seed=0))
charges = random_charges(N, seed=1)
box = compute_root_box(points)

for kappa_d in (0.0, 16.0):
    kappa = kappa_d / box.side
    kernel = HelmholtzKernel(kappa=kappa, singularity_tol=1e-12 * box.side)
    reference = direct_sum(kernel, points, points, charges)

    print(f"\nkappa * D = {kappa_d:g}  (N = {N})")
    print(f"{'L':>3} {'rel l2 error':>14} {'ratio':>8}")
    previous = None
    for order in range(3, 9):
        config = FmmConfig(order=order, ncrit=64, kappa=kappa)
        potentials = run_fmm(points, points, charges, config)
        err = relative_errors(reference, potentials).rel_l2
        ratio = "" if previous is None else f"{err / previous:8.3f}"
        print(f"{order:>3} {err:14.3e} {ratio:>8}")
        previous = err
