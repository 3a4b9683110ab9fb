"""Potentials of rotated gradient fields and the convex/concave dichotomy.

Run: python demos/potential_dichotomy.py
"""

import numpy as np

from qrlab.mapdsl import fixture, single_piece
from qrlab.potential import dichotomy_scan, hessian_example_3d, reconstruct_potential


def main():
    pot = reconstruct_potential(fixture("iz"))
    z = np.array([0.3 + 0.4j, -0.5j, 0.8])
    print("psi for f = iz against -|z|^2/2 (gauge psi(0) = 0):")
    for zk, v in zip(z, pot(z)):
        print(f"  psi({zk}) = {v:+.12f}   exact {-abs(zk) ** 2 / 2:+.12f}")
    print(f"  closed-rectangle residual {pot.residual:.1e}")

    for formula in ("i*z", "-i*z", "conj(z)"):
        rep = dichotomy_scan(single_piece(formula, formula), anchors=20)
        print(f"dichotomy for f = {formula}: {rep.verdict}")

    rng = np.random.default_rng(7)
    s = hessian_example_3d(rng.normal(size=(1000, 3))).summary()
    print(f"\nthree-variable example over 1000 points: det D2psi >= {s['det_psi_min']:.6f}, "
          f"det D2u in [{s['det_u_min']:.4f}, {s['det_u_max']:.4f}], "
          f"worst |det D2u - closed form| = {s['formula_residual']:.1e}")


if __name__ == "__main__":
    main()
