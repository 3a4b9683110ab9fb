"""A piecewise-linear map that satisfies Re f_z >= M |Im f_z| and is still not injective.

Run: python demos/noninj_example.py
"""

from qrlab.index import certified_index
from qrlab.inject import find_collisions
from qrlab.mapdsl import Box, fixture, piece_consistency
from qrlab.wirtinger import cone, distortion_sweep


def main():
    for M in (1.0, 2.0):
        m = fixture("noninj", M=M)
        seam = piece_consistency(m, 1000).max_disagreement
        cone_rep = distortion_sweep(m, Box(0.05, 3, -3, 3), 128, predicate=cone(M))
        target = 1 - 8 * M * M
        ws = find_collisions(m, Box(0.1, 3, -5 * M - 1, 5 * M + 1), 256, image=target)
        print(f"M = {M}: seam mismatch {seam:.1e}, cone violations {cone_rep.violations}, "
              f"k_hat {cone_rep.k_hat:.4f}")
        for w in ws:
            print(f"  f({w.z1:.9f}) = f({w.z2:.9f}) = {w.image:.9f}")
        print(f"  local index at 2+0.3i: {certified_index(m, 2 + 0.3j)}")


if __name__ == "__main__":
    main()
