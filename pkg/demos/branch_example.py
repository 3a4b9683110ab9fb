"""The branch map: sharp distortion, its index at 0 and antipodal collisions.

Run: python demos/branch_example.py
"""

import numpy as np

from qrlab.index import index_radius_stability
from qrlab.inject import find_collisions
from qrlab.mapdsl import Box, branch_delta, fixture
from qrlab.wirtinger import distortion_sweep, re_fz_nonneg, sector


def main():
    for eps in (0.5, 1.0, 2.0):
        m = fixture("branch", eps=eps)
        rep = distortion_sweep(m, Box(-2, 2, -2, 2), 256, predicate=sector(eps))
        strict = distortion_sweep(m, Box(-2, 2, -2, 2), 128, predicate=re_fz_nonneg(), refine=False)
        print(f"eps = {eps}: delta = {branch_delta(eps):.6f}, k_hat = {rep.k_hat:.8f} "
              f"(1/sqrt(1+eps^2) = {1 / np.sqrt(1 + eps * eps):.8f}), "
              f"sector violations {rep.violations}, Re f_z >= 0 violations {strict.violations}")

    m = fixture("branch", eps=1.0)
    st = index_radius_stability(m, 0, [0.1, 0.05])
    print(f"\nindex at 0: {st.index} (stable over radii 0.1 and 0.05: {st.stable})")

    ws = find_collisions(m, Box(-1.5, 1.5, -1.5, 1.5), 128)
    antipodal = [w for w in ws if abs(w.z1 + w.z2) < 1e-6]
    print(f"{len(ws)} collision witnesses, {len(antipodal)} of the form (z, -z); for example")
    for w in antipodal[:3]:
        print(f"  f({w.z1:.6f}) = f({w.z2:.6f}) = {w.image:.6f}")

    # where does f(z) = f(-z) actually hold?
    delta = branch_delta(1.0)
    z = np.exp(1j * np.linspace(0, np.pi, 7))
    for zk in z:
        inside = abs(zk.real) <= delta * abs(zk.imag)
        print(f"  z = {zk:.3f}: |f(z) - f(-z)| = {abs(m.evaluate(zk) - m.evaluate(-zk)):.3e}"
              f"  (|re z| <= delta |im z|: {inside})")


if __name__ == "__main__":
    main()
