import numpy as np
import pytest

from qrlab.index import certified_index, default_radius, index_radius_stability, local_index
from qrlab.mapdsl import fixture, single_piece
from qrlab.wirtinger import gradient_field


def test_identity():
    assert local_index(fixture("identity"), 0).index == 1


def test_conj_cube():
    assert local_index(fixture("conj-power", n=3), 0).index == -3


def test_grad_field():
    field = gradient_field(fixture("grad2d"))
    st = index_radius_stability(field, 0, [0.3, 0.15])
    assert st.stable and st.index == -3


def test_square_radii():
    st = index_radius_stability(fixture("power", n=2), 0, [0.1, 0.05, 0.025])
    assert st.stable and [r.index for r in st.results] == [2, 2, 2]


def test_branch_index(branch1):
    st = index_radius_stability(branch1, 0, [0.1, 0.05])
    assert st.stable and st.index == 2


def test_noninj_regular_point(noninj1):
    assert certified_index(noninj1, 2 + 0.3j) == 1
    assert certified_index(noninj1, 0.5 + 2j) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_monomials(n):
    assert local_index(fixture("power", n=n), 0).index == n
    assert local_index(fixture("conj-power", n=n), 0).index == -n


def test_scalar_invariance():
    m = single_piece("scaled", "(2 - 3*i) * z^3")
    assert local_index(m, 0).index == 3


def test_product_additivity():
    assert local_index(single_piece("prod", "z^2 * (z^3 + z^4)"), 0).index == 5


def test_default_radius(noninj1):
    assert default_radius(fixture("identity"), 0) == 0.1
    assert default_radius(noninj1, 0.2) == pytest.approx(0.05)


@pytest.mark.parametrize("z0", [0.5 + 0.5j, -0.7 + 0.2j, 1.3 - 1.1j])
def test_quasiregular_index_at_least_one(branch1, z0):
    assert local_index(branch1, z0).index >= 1
