"""Rebuilding a field from a Poisson analysis via a Calderon pair.

Run with ``python3 demos/02_calderon_reconstruction.py``.
"""
import numpy as np

from lpkit import GridSpec, build_lp_family
from lpkit.grid import spatial_field
from lpkit.kernels import check_tauberian, make_fractional_poisson
from lpkit.lp_analysis import build_calderon_pair, reconstruct

grid = GridSpec(1, 64.0, 1024)
family = build_lp_family(grid, -4, 6)
psi = make_fractional_poisson(1, grid)

# The analysing kernel has symbol |xi| e^{-|xi|}; it is not band-limited,
# but it stays away from zero on a dyadic window, which is all the pair needs.
taub = check_tauberian(psi)
w = taub.witness[0]
print(f"Tauberian window [{w['a']:.3f}, {w['b']:.3f}], lower bound c0 = {w['c0']:.4f}")

pair = build_calderon_pair(psi, family)
info = pair.report()
print(f"eta_hat supported on {tuple(round(v, 3) for v in info['annulus'])}")
print(f"identity residual on the covered annulus: {info['identity_residual']:.1e}\n")

# Reconstruct a wave packet from the coarse part plus fine-scale corrections.
x = grid.axis
g = spatial_field(grid, np.exp(-x ** 2 / 8) * np.cos(2 * x))
print("relative L2 error of phi_k * g + sum_{k<j<=M} eta_j * psi_j * g, k = -4:")
for M in range(-3, 7):
    err = reconstruct(g, pair, -4, M).relative_error
    print(f"  M={M:+d}: {err:.3e}")
