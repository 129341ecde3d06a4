import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from errors import ConvergenceError
from grid import GridSpec, gaussian_state, random_field, wavepacket_state
from scattering import (
    POTENTIAL_KINDS,
    Potential,
    PotentialSpec,
    apply_H,
    build_potential,
    builtin_potential,
    evolve,
    free_evolve,
    load_potential_spec,
    sandwich_identity_check,
    smallness_check,
    wave_operator,
)


@pytest.fixture(scope="module")
def scatter_grid():
    return GridSpec(n=2, M=32, L=16.0)


# ======================
# Potentials
# ======================

@pytest.mark.parametrize("kind", POTENTIAL_KINDS)
def test_potentials_are_self_adjoint(rep2, scatter_grid, kind):
    pot = build_potential(builtin_potential(kind, c=0.1, seed=3), rep2, scatter_grid)
    f = random_field(scatter_grid, 2, seed=1)
    g = random_field(scatter_grid, 2, seed=2)
    left = f.inner(apply_H(rep2, pot, g))
    right = apply_H(rep2, pot, f).inner(g)
    assert abs(left - right) < 1e-10
    assert np.isfinite(pot.decay_constant)


def test_decay_constants(rep2, scatter_grid):
    coulomb = build_potential(builtin_potential("coulomb2", c=0.05), rep2, scatter_grid)
    assert coulomb.decay_constant == pytest.approx(0.05, rel=1e-12)
    matrix = build_potential(builtin_potential("matrix", c=0.2, seed=7), rep2, scatter_grid)
    assert matrix.decay_constant == pytest.approx(0.2, rel=1e-10)
    well = build_potential(builtin_potential("well", c=1.0, radius=2.0), rep2, scatter_grid)
    assert np.all(well.site_norms[scatter_grid.radius >= 2.0] == 0)
    assert coulomb.scaled(2.0).decay_constant == pytest.approx(0.1, rel=1e-12)
    assert build_potential(builtin_potential("coulomb2", c=0.0), rep2, scatter_grid).is_zero


def test_potential_validation(rep2, rep3, scatter_grid, tmp_path):
    with pytest.raises(ValueError, match="Unknown potential"):
        builtin_potential("yukawa")
    with pytest.raises(ValueError):
        build_potential(builtin_potential("coulomb2"), rep3, scatter_grid)
    with pytest.raises(ValueError):
        build_potential(builtin_potential("well", radius=-1.0), rep2, scatter_grid)
    values = np.zeros(scatter_grid.shape + (2, 2), dtype=complex)
    values[..., 0, 1] = 1.0
    with pytest.raises(ValueError, match="self-adjoint"):
        Potential(PotentialSpec(), scatter_grid, values)
    with pytest.raises(ValueError):
        Potential(PotentialSpec(), scatter_grid, np.zeros((4, 4, 2, 2)))

    path = tmp_path / "pot.json"
    path.write_text('{"kind": "em", "c": 0.02, "params": {"a": 0.5}}', encoding="utf-8")
    spec = load_potential_spec(str(path))
    assert spec.kind == "em" and spec.params == {"a": 0.5}


# ======================
# Smallness and the sandwiched resolvent
# ======================

def test_smallness_of_a_weak_potential(rep2, scatter_grid):
    pot = build_potential(builtin_potential("coulomb2", c=0.05), rep2, scatter_grid)
    result = smallness_check(rep2, pot, [(0.0, 1.0), (1.5, 0.5)], tol=1e-8)
    assert len(result.samples) == 4
    assert {s.sign for s in result.samples} == {1, -1}
    assert result.sup < 1
    assert result.verdict
    assert result.sup == max(s.norm for s in result.samples)


@settings(max_examples=10, deadline=None)
@given(t=st.floats(min_value=0.1, max_value=10.0))
@example(t=3.0)
def test_smallness_is_linear_in_the_potential(rep2, scatter_grid, t):
    pot = build_potential(builtin_potential("coulomb2", c=0.05), rep2, scatter_grid)
    samples = [(0.0, 1.0), (1.5, 0.5)]
    base = smallness_check(rep2, pot, samples, tol=1e-10)
    scaled = smallness_check(rep2, pot.scaled(t), samples, tol=1e-10)
    assert scaled.sup == pytest.approx(t * base.sup, rel=1e-8)
    for a, b in zip(base.samples, scaled.samples):
        assert b.norm == pytest.approx(t * a.norm, rel=1e-8)


def test_zero_potential_is_trivially_small(rep2, scatter_grid):
    pot = build_potential(builtin_potential("coulomb2", c=0.0), rep2, scatter_grid)
    result = smallness_check(rep2, pot, [(0.0, 1.0), (1.5, 0.5)])
    assert result.sup == 0.0
    assert result.verdict and result.converged

    f = random_field(scatter_grid, 2, seed=4)
    sandwich = sandwich_identity_check(rep2, pot, 0.5, 1.0, f, depth=3)
    assert sandwich.smallness == 0.0
    assert sandwich.tail_bound == 0.0
    assert max(sandwich.residual_by_depth) < 1e-10


def test_smallness_validation(rep2, scatter_grid):
    pot = build_potential(builtin_potential("coulomb2"), rep2, scatter_grid)
    with pytest.raises(ValueError):
        smallness_check(rep2, pot, [])
    with pytest.raises(ValueError, match="floor"):
        smallness_check(rep2, pot, [(0.0, 0.01)])


def test_sandwich_identity(rep2, scatter_grid):
    pot = build_potential(builtin_potential("coulomb2", c=0.05), rep2, scatter_grid)
    f = random_field(scatter_grid, 2, seed=4)
    result = sandwich_identity_check(rep2, pot, 0.5, 1.0, f, depth=30)
    assert result.smallness < 1
    assert result.residual < 1e-6
    assert len(result.residual_by_depth) == 31
    assert result.residual_by_depth[0] > result.residual
    assert result.tail_bound < 1e-6


def test_sandwich_refuses_divergent_series(rep2, scatter_grid):
    pot = build_potential(builtin_potential("coulomb2"), rep2, scatter_grid)
    f = random_field(scatter_grid, 2)
    with pytest.raises(ConvergenceError):
        sandwich_identity_check(rep2, pot, 0.5, 1.0, f, smallness=1.5)


# ======================
# Propagation
# ======================

def test_free_evolution_is_a_group(rep2, scatter_grid):
    f = random_field(scatter_grid, 2, seed=5)
    twice = free_evolve(rep2, free_evolve(rep2, f, 0.4), 0.7)
    once = free_evolve(rep2, f, 1.1)
    assert (twice - once).norm() < 1e-12
    assert free_evolve(rep2, f, 2.0).norm() == pytest.approx(1.0, abs=1e-12)


def test_evolve_is_unitary_and_reversible(rep2, scatter_grid):
    pot = build_potential(builtin_potential("em", c=0.3), rep2, scatter_grid)
    f = gaussian_state(scatter_grid, rep2, width=1.5, momentum=[1.0, 0.0])
    forward = evolve(rep2, pot, f, 1.0, 0.05)
    assert forward.norm() == pytest.approx(1.0, abs=1e-10)
    back = evolve(rep2, pot, forward, -1.0, 0.05)
    assert (back - f).norm() < 1e-10


def test_evolve_without_potential_is_free(rep2, scatter_grid):
    f = gaussian_state(scatter_grid, rep2, width=1.5)
    assert (evolve(rep2, None, f, 0.8, 0.1) - free_evolve(rep2, f, 0.8)).norm() < 1e-12
    with pytest.raises(ValueError):
        evolve(rep2, None, f, 0.8, 0.0)


def test_strang_splitting_is_second_order(rep2, scatter_grid):
    pot = build_potential(builtin_potential("coulomb2", c=0.5), rep2, scatter_grid)
    f = gaussian_state(scatter_grid, rep2, width=1.5, momentum=[0.5, 0.0])
    reference = evolve(rep2, pot, f, 1.0, 0.0125)
    coarse = (evolve(rep2, pot, f, 1.0, 0.1) - reference).norm()
    fine = (evolve(rep2, pot, f, 1.0, 0.05) - reference).norm()
    assert coarse / fine > 3


# ======================
# Wave operators
# ======================

def test_wave_operator_tails_and_isometry(rep2):
    grid = GridSpec(n=2, M=128, L=64.0)
    pot = build_potential(builtin_potential("coulomb2", c=0.05), rep2, grid)
    psi = wavepacket_state(grid, rep2, [2.0, 0.0], width=3.0, band=1)
    state, report = wave_operator(rep2, pot, psi, [2, 4, 8, 16], dt=0.05)
    assert report.valid
    assert report.times == [2.0, 4.0, 8.0, 16.0]
    assert len(report.cauchy_tails) == 3
    assert all(b < a for a, b in zip(report.cauchy_tails, report.cauchy_tails[1:]))
    assert report.isometry_defect < 1e-3
    assert report.unitarity_drift < 1e-3
    assert state.norm() == pytest.approx(1.0, abs=1e-3)


def test_wave_operator_without_potential_is_the_identity(rep2):
    grid = GridSpec(n=2, M=64, L=32.0)
    pot = build_potential(builtin_potential("coulomb2", c=0.0), rep2, grid)
    psi = wavepacket_state(grid, rep2, [2.0, 0.0], width=2.0, band=1)
    state, report = wave_operator(rep2, pot, psi, [1, 2, 4], dt=0.1)
    assert report.valid
    assert (state - psi).norm() < 1e-12
    assert max(report.cauchy_tails) < 1e-12
    assert report.isometry_defect < 1e-12
    assert report.unitarity_drift < 1e-12
    assert report.intertwining_defect == 0.0


def test_wave_operator_flags_boundary_contact(rep2, scatter_grid, caplog):
    pot = build_potential(builtin_potential("coulomb2", c=0.05), rep2, scatter_grid)
    psi = wavepacket_state(scatter_grid, rep2, [2.0, 0.0], width=1.5, band=1)
    _, report = wave_operator(rep2, pot, psi, [4, 8], dt=0.1)
    assert not report.valid
    assert max(report.boundary_mass) > 1e-6
    assert "boundary layer" in caplog.text


def test_wave_operator_validation(rep2, scatter_grid):
    pot = build_potential(builtin_potential("coulomb2"), rep2, scatter_grid)
    psi = wavepacket_state(scatter_grid, rep2, [1.0, 0.0], width=1.5)
    with pytest.raises(ValueError):
        wave_operator(rep2, pot, psi, [1.0], dt=0.1, direction=0)
    with pytest.raises(ValueError):
        wave_operator(rep2, pot, psi, [], dt=0.1)
    with pytest.raises(ValueError):
        wave_operator(rep2, pot, psi, [-1.0, 1.0], dt=0.1)
