import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eset.diagnostics import (
    ConvergenceRow,
    ConvergenceTable,
    DiagnosticsRecord,
    energy,
    error_norms,
    fit_order,
    manufactured_exact,
    manufactured_reference,
    manufactured_solution,
    total_mass,
)
from eset.potentials import PotentialSpec, f_eval
from eset.spatial import make_space


def test_energy_of_constant_states():
    assert energy(make_space("dirichlet", 16), np.zeros(16), 0.05) == pytest.approx(10.0, rel=1e-14)
    s = make_space("neumann", 16)
    one = s.project(lambda x: 1.0 + 0 * x)
    assert abs(energy(s, one, 0.05)) <= 1e-20 + 1e-13


def test_energy_independent_of_quadrature_order():
    eps, M = 0.2, 64
    u = lambda x: np.tanh(x / (np.sqrt(2) * eps)) * (1 - x * x)
    a = make_space("dirichlet", M)
    b = make_space("dirichlet", M, quad_order=2 * M)
    assert energy(a, a.project(u), eps) == pytest.approx(energy(b, b.project(u), eps), abs=1e-11)


def test_total_mass_examples():
    s = make_space("neumann", 12)
    assert total_mass(s, s.project(lambda x: 0.3 + 0 * x)) == pytest.approx(0.6, abs=1e-14)
    assert abs(total_mass(s, s.project(lambda x: x))) <= 1e-14


@pytest.mark.parametrize("t", [0.0, 0.13, 0.32, 0.9])
def test_manufactured_boundary_values(t):
    u = manufactured_solution(np.array([-1.0, 1.0]), t, 0.05)[0]
    np.testing.assert_allclose(u, 0.0, atol=1e-15)
    ux = manufactured_solution(np.array([-1.0, 1.0]), t, 0.05, "neumann")[2]
    np.testing.assert_allclose(ux, 0.0, atol=1e-12)


def test_manufactured_origin_value():
    assert abs(manufactured_solution(0.0, 0.0, 0.05)[0]) <= 1e-15


def _fd_residual(x, t, eps, pot, bc, h=2e-4):
    u = lambda x, t: manufactured_solution(x, t, eps, bc)[0]
    # fourth-order central differences
    u_t = (-u(x, t + 2 * h) + 8 * u(x, t + h) - 8 * u(x, t - h) + u(x, t - 2 * h)) / (12 * h)
    u_xx = (-u(x + 2 * h, t) + 16 * u(x + h, t) - 30 * u(x, t) + 16 * u(x - h, t) - u(x - 2 * h, t)) / (12 * h * h)
    return u_t - eps * u_xx + f_eval(u(x, t), pot) / eps


@pytest.mark.parametrize("bc", ["dirichlet", "neumann"])
@pytest.mark.parametrize("pot", [PotentialSpec(), PotentialSpec("truncated_M1")])
def test_forcing_matches_finite_difference_residual(bc, pot):
    rng = np.random.default_rng(11)
    x, t = rng.uniform(-1, 1, 100), rng.uniform(0, 0.5, 100)
    eps = 0.05
    g = manufactured_reference(x, t, eps, pot, bc)[1]
    fd = _fd_residual(x, t, eps, pot, bc)
    assert np.max(np.abs(g - fd) / np.maximum(1.0, np.abs(g))) <= 1e-6


def test_manufactured_derivatives_consistent():
    x = np.linspace(-0.9, 0.9, 7)
    h = 1e-6
    for bc in ("dirichlet", "neumann"):
        u, _, ux, _ = manufactured_solution(x, 0.2, 0.3, bc)
        fd = (manufactured_solution(x + h, 0.2, 0.3, bc)[0] - manufactured_solution(x - h, 0.2, 0.3, bc)[0]) / (2 * h)
        np.testing.assert_allclose(ux, fd, atol=1e-8)


def test_unknown_boundary_condition():
    with pytest.raises(ValueError):
        manufactured_solution(0.0, 0.0, 0.1, "robin")


def test_projection_floor_and_symmetry():
    s = make_space("dirichlet", 255)
    eps, t = 0.05, 0.32
    c = s.project(lambda x: manufactured_solution(x, t, eps)[0])
    l2, h1 = error_norms(s, c, manufactured_exact(eps, t))
    assert l2 <= 1e-10
    other = s.random_field(3)
    assert error_norms(s, c, other) == error_norms(s, other, c)
    assert error_norms(s, manufactured_exact(eps, t), c) == (l2, h1)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_error_norms_symmetric_and_ordered(seed):
    s = make_space("neumann", 20)
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal(20), rng.standard_normal(20)
    l2, h1 = error_norms(s, a, b)
    assert (l2, h1) == error_norms(s, b, a)
    assert h1 >= l2 >= 0


def test_convergence_table_orders():
    taus = [0.04, 0.02, 0.01, 0.005]
    errs = [1e-2 * (t / 0.04) ** 4 for t in taus]
    table = ConvergenceTable("demo", [ConvergenceRow(t, e, e) for t, e in zip(taus, errs)]).fill_orders()
    assert np.isnan(table.rows[0].order)
    np.testing.assert_allclose([r.order for r in table.rows[1:]], 4.0, atol=1e-12)
    assert table.slope() == pytest.approx(4.0, abs=1e-12)


def test_fit_order_ignores_floor_and_failures():
    taus = [0.04, 0.02, 0.01, 0.005]
    assert fit_order(taus, [1e-4, 6.25e-6, 1e-12, np.nan]) == pytest.approx(4.0)
    assert np.isnan(fit_order(taus, [1e-4, np.nan, 1e-13, 1e-14]))


def test_blow_up_row_breaks_orders():
    rows = [ConvergenceRow(0.02, np.nan, np.nan, status="blow-up"), ConvergenceRow(0.01, 1e-3, 1e-2),
            ConvergenceRow(0.005, 6.25e-5, 1e-3)]
    table = ConvergenceTable("x", rows).fill_orders()
    assert np.isnan(table.rows[1].order) and table.rows[2].order == pytest.approx(4.0)


def test_record_row():
    rec = DiagnosticsRecord(1, 0.1, 2.0, 2.5, 0.0, 3, 0.01)
    assert list(rec.as_row()) == ["step", "time", "energy", "modified_energy", "mass", "picard_iters", "wall_time"]
