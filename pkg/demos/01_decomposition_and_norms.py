"""Dyadic decomposition of a field and the norms built on it.

Run with ``python3 demos/01_decomposition_and_norms.py``.
"""
import math

import numpy as np

from lpkit import GridSpec, build_lp_family
from lpkit.corpus import CorpusSpec, generate
from lpkit.grid import lp_norm
from lpkit.lp_analysis import dyadic_block
from lpkit.norms import NormParams, besov_norm, compute_norm, triebel_norm
from lpkit.verify import Engine, check_scaling_covariance

grid = GridSpec(1, 64.0, 1024)
family = build_lp_family(grid, -4, 6)
print(f"grid: L={grid.extent}, N={grid.samples}, Nyquist={grid.nyquist:.2f}")
print(f"scales {family.jmin}..{family.jmax}, covered radii {family.covered_annulus}")
print(f"sum of squared multipliers deviates from 1 by {family.partition_residual():.1e}\n")

# A single random band-limited field, split into dyadic blocks.
f = generate(CorpusSpec("random_bandlimited", {"band": (0.25, 16.0), "count": 1}, seed=1),
             grid)[0]
print("per-scale L2 energy of the blocks q_j * f:")
for j in family.scales:
    e = lp_norm(dyadic_block(f, j, family), 2)
    print(f"  j={j:+d}  {e:9.4f}  {'#' * int(40 * e / lp_norm(f, 2))}")

# With alpha = 0 and p = q = 2 both norms reduce to the L2 norm.
p2 = NormParams(0, 2, 2)
print(f"\n||f||_2 = {lp_norm(f, 2):.12f}")
print(f"B^0_22  = {besov_norm(f, p2, family):.12f}")
print(f"F^0_22  = {triebel_norm(f, p2, family):.12f}")

# Smoothness weights push mass toward fine scales.
for alpha in (-1.0, 0.0, 1.0, 2.0):
    r = compute_norm("besov", f, NormParams(alpha, 2, 2), family)
    top = int(np.argmax(r.terms)) + family.jmin
    print(f"alpha={alpha:+.1f}: B-norm {r.value:10.4f}, dominant scale j={top:+d}")

# Dilating f by 2^k rescales the norm by exactly 2^{k(alpha - n/p)}.
fam = build_lp_family(grid, -2, 4)
print("\nscaling covariance, alpha=1, p=2 (predicted 2^{k/2}):")
for k in range(-2, 3):
    s = check_scaling_covariance(f, NormParams(1.0, 2, 2), Engine("besov", fam), k)
    print(f"  k={k:+d}: ratio {s.ratio:.12f}, predicted {s.predicted:.12f}")
assert math.isclose(s.ratio, s.predicted, rel_tol=1e-10)
