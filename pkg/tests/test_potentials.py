import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eset.potentials import PotentialSpec, F_eval, cutoff, f_eval, fhat_eval, fprime_eval

STD = PotentialSpec()
T1 = PotentialSpec("truncated_M1")


def test_examples():
    assert F_eval(0.0, STD) == 0.25
    assert F_eval(2.0, T1) == pytest.approx(1.0)
    assert F_eval(-1.0, T1) == 0.0
    assert f_eval(1.0, STD) == 0.0
    assert fhat_eval(0.5, PotentialSpec(S=2.0)) == pytest.approx(-1.375)


def test_lipschitz_constants():
    assert T1.L == 2 and T1.L2 == 6
    assert PotentialSpec("truncated", M_cut=2.0).L == 11
    assert np.isinf(STD.L)
    u = np.random.default_rng(0).uniform(-50, 50, 10**6)
    assert np.max(np.abs(fprime_eval(u, T1))) == pytest.approx(2.0, abs=1e-12)


def test_invalid_specs():
    with pytest.raises(ValueError):
        PotentialSpec("quartic")
    with pytest.raises(ValueError):
        PotentialSpec("truncated", M_cut=0.5)
    with pytest.raises(ValueError):
        PotentialSpec(S=-1)


@pytest.mark.parametrize("m", [1.0, 1.2, 2.0])
def test_continuity_at_branch_points(m):
    spec = PotentialSpec("truncated", M_cut=m)
    for b in (m, -m):
        lo, hi = np.nextafter(b, -np.inf), np.nextafter(b, np.inf)
        assert abs(F_eval(lo, spec) - F_eval(hi, spec)) <= 1e-13
        assert abs(f_eval(lo, spec) - f_eval(hi, spec)) <= 1e-13


@pytest.mark.parametrize("spec", [STD, T1, PotentialSpec("truncated", M_cut=1.5)])
def test_f_is_derivative_of_F(spec):
    u = np.random.default_rng(1).uniform(-3, 3, 400)
    if spec.truncated:
        u = u[np.abs(np.abs(u) - spec.M_cut) > 1e-3]
    h = 1e-6
    fd = (F_eval(u + h, spec) - F_eval(u - h, spec)) / (2 * h)
    assert np.max(np.abs(fd - f_eval(u, spec))) <= 1e-8 * max(1.0, np.max(np.abs(u)) ** 3)
    fd2 = (f_eval(u + h, spec) - f_eval(u - h, spec)) / (2 * h)
    assert np.max(np.abs(fd2 - fprime_eval(u, spec))) <= 1e-6 * max(1.0, np.max(np.abs(u)) ** 2)


def test_stabilized_split_is_concave_on_unit_interval():
    u = np.linspace(-1, 1, 1001)
    slope = fprime_eval(u, STD) - 2.0
    assert np.all(slope <= 1e-15)


def test_cutoff_examples():
    assert cutoff(1.3) == 1.0
    assert cutoff(-0.4) == -0.4


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
def test_cutoff_idempotent(values):
    v = np.array(values)
    once = cutoff(v)
    np.testing.assert_array_equal(cutoff(once), once)
    assert np.all(np.abs(once) <= 1)
