"""Distortion along (1-t) f + t z, and the Jacobian floor of f + lambda z.

Run: python demos/homotopy_and_shift.py
"""

from qrlab.inject import bilipschitz_check, lambda_shift, shifted_map
from qrlab.mapdsl import Box, fixture
from qrlab.wirtinger import distortion_sweep, homotopy_distortion


def main():
    ts = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    for eps in (0.5, 1.0, 2.0):
        table = homotopy_distortion(fixture("branch", eps=eps), Box(-2, 2, -2, 2), ts, restrict=True)
        ks = ", ".join(f"{k:.4f}" for k in table.k)
        print(f"eps = {eps}: k(t) = [{ks}]  k(0.9)/k(0) = {table.k[-1] / table.k[0]:.4f}")

    m = fixture("branch", eps=1.0)
    box = Box(0.5, 1.5, -0.5, 0.5)
    lam = 0.1
    rep = lambda_shift(m, lam, box)
    g = shifted_map(m, lam)
    K = distortion_sweep(g, box, 128).K_hat * (1 + 1e-6)
    b = bilipschitz_check(g, lam, K, box)
    print(f"\nshift by {lam} z on {box.as_list()}: identity residual {rep.identity_residual:.1e}, "
          f"min J {rep.floor_min:.4f} >= {lam * lam}")
    print(f"pairwise ratio {b.min_ratio:.4f} >= lambda/sqrt(K) = {b.bound:.4f}: {b.passed}")


if __name__ == "__main__":
    main()
