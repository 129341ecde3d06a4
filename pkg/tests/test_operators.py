import logging

import numpy as np
import pytest

from clifford import build_clifford
from errors import OutsideCoreError
from grid import GridSpec, SpinorField, gaussian_state, random_field, to_dual_position, to_momentum, wavepacket_state
from lap import weighted_resolvent_norm
from operators import (
    apply_A,
    apply_H0,
    apply_multiplier,
    apply_weight,
    build_first_order,
    commutator_Xm,
    conjugate_coefficient_fields,
    dense_matrix,
    dense_reference,
    operator_norm,
    parse_operator_chain,
    require_core,
    resolvent_identity_residual,
    section2_check,
    sinusoidal_coefficients,
    spectral_derivative,
    symbol_values,
)
from symbols.factory import SymbolFactory


def _close(a, b, tol):
    scale = max(1.0, float(np.max(np.abs(b))))
    return float(np.max(np.abs(a - b))) <= tol * scale


def test_H0_squared_is_minus_laplacian(rep2, small_grid):
    f = random_field(small_grid, 2, seed=1)
    twice = apply_H0(rep2, apply_H0(rep2, f))
    laplacian = spectral_derivative(spectral_derivative(f, 0), 0) + spectral_derivative(spectral_derivative(f, 1), 1)
    assert np.allclose(twice.values, laplacian.values, atol=1e-10)


def test_multipliers_keep_the_space_tag(rep2, small_grid):
    f = random_field(small_grid, 2, seed=2)
    fh = to_momentum(f)
    assert apply_H0(rep2, fh).space == fh.space
    assert np.allclose(to_momentum(apply_H0(rep2, f)).values, apply_H0(rep2, fh).values, atol=1e-10)


def test_scalar_multiplier_arrays(rep2, small_grid):
    f = random_field(small_grid, 2, seed=3)
    r2 = small_grid.momentum_radius ** 2
    direct = apply_multiplier(r2, f)
    via_symbol = apply_H0(rep2, apply_H0(rep2, f))
    assert np.allclose(direct.values, via_symbol.values, atol=1e-10)
    with pytest.raises(ValueError):
        apply_multiplier(np.ones((3, 3)), f)


def test_symbol_values_rejects_singular_symbols(rep2, small_grid):
    bad = np.full(small_grid.shape + (2, 2), np.nan)
    with pytest.raises(ValueError):
        symbol_values(bad, small_grid)


def test_H0_is_self_adjoint(rep2, small_grid):
    f, g = random_field(small_grid, 2, seed=4), random_field(small_grid, 2, seed=5)
    assert f.inner(apply_H0(rep2, g)) == pytest.approx(apply_H0(rep2, f).inner(g), abs=1e-12)


def test_weight_requires_position_space(small_grid):
    f = random_field(small_grid, 2)
    assert np.array_equal(apply_weight(f, 0).values, f.values)
    with pytest.raises(ValueError):
        apply_weight(to_momentum(f), 1)


def test_core_checks(rep2, cutoff, packet_grid, caplog):
    gaussian = gaussian_state(packet_grid, rep2, width=2.0)
    with pytest.raises(OutsideCoreError):
        require_core(gaussian, "test")
    with caplog.at_level(logging.WARNING):
        apply_A(rep2, cutoff, gaussian)
    assert "zero-mode coefficient" in caplog.text
    require_core(wavepacket_state(packet_grid, rep2, [np.pi, 0.0], width=2.0), "test")


def test_conjugate_operator_is_symmetric(rep2, cutoff, packet_grid):
    phi = wavepacket_state(packet_grid, rep2, [np.pi, 0.0], width=2.0, seed=1)
    psi = wavepacket_state(packet_grid, rep2, [0.0, np.pi], width=1.5, seed=2)
    left = apply_A(rep2, cutoff, phi).inner(psi)
    right = phi.inner(apply_A(rep2, cutoff, psi))
    assert abs(left - right) <= 1e-12 * max(1.0, abs(left))


def test_conjugate_operator_matches_first_order_form_on_dual_grid(rep2, cutoff):
    grid = GridSpec(n=2, M=128, L=64.0)
    psi = wavepacket_state(grid, rep2, [np.pi, 0.0], width=grid.L / np.sqrt(np.pi * grid.M))
    dual = grid.dual()
    op = build_first_order(dual, conjugate_coefficient_fields(rep2, cutoff, dual))
    direct = to_dual_position(apply_A(rep2, cutoff, psi))
    via_coefficients = op.apply(to_dual_position(psi))
    assert (direct - via_coefficients).norm() <= 1e-8 * direct.norm()


def test_dense_oracle(rep2, cutoff):
    grid = GridSpec(n=2, M=8, L=8.0)
    reference = dense_reference(rep2, cutoff, grid, lam=0.3, mu=1.0)
    h0 = dense_matrix(lambda f: apply_H0(rep2, f), grid, 2)
    b = dense_matrix(lambda f: apply_multiplier(SymbolFactory.get_symbol("B", rep2, cutoff), f), grid, 2)
    a = dense_matrix(lambda f: apply_A(rep2, cutoff, f), grid, 2)
    g_plus = dense_matrix(
        lambda f: apply_multiplier(SymbolFactory.get_symbol("G", rep2, cutoff, lam=0.3, mu=1.0), f), grid, 2)
    g_minus = dense_matrix(
        lambda f: apply_multiplier(SymbolFactory.get_symbol("G", rep2, cutoff, lam=0.3, mu=1.0, sign=-1), f), grid, 2)
    chain = parse_operator_chain("W(-1)*G(0.3,1)*W(-1)", rep2, cutoff)
    wgw = dense_matrix(chain.apply, grid, 2)
    assert _close(h0, reference["H0"], 1e-10)
    assert _close(b, reference["B"], 1e-10)
    assert _close(a, reference["A"], 1e-10)
    assert _close(g_plus, reference["G+"], 1e-10)
    assert _close(g_minus, reference["G-"], 1e-10)
    assert _close(wgw, reference["WGW"], 1e-10)
    assert _close(reference["G-"], reference["G+"].conj().T, 1e-10)


def test_first_order_operator_with_constant_coefficients(rep2, small_grid):
    coefficients = np.broadcast_to(rep2.alphas[:, None, None], (2,) + small_grid.shape + (2, 2))
    op = build_first_order(small_grid, coefficients)
    f = random_field(small_grid, 2, seed=6)
    assert np.allclose(op.apply(f).values, 2 * apply_H0(rep2, f).values, atol=1e-10)
    x_f, estimate = commutator_Xm(op, 5.0, f, estimate_norm=False)
    assert estimate is None
    assert x_f.norm() < 1e-10
    with pytest.raises(ValueError):
        commutator_Xm(op, 0.5, f)


def test_first_order_operator_validates_coefficients(small_grid):
    with pytest.raises(ValueError):
        build_first_order(small_grid, np.zeros((2, 4, 4, 2, 2)))
    bad = np.zeros((2,) + small_grid.shape + (2, 2))
    bad[0, 0, 0, 0, 0] = np.inf
    with pytest.raises(ValueError):
        build_first_order(small_grid, bad)


def test_resolvent_identity_for_Xm():
    grid = GridSpec(n=1, M=256, L=32.0)
    rep = build_clifford(1)
    op = build_first_order(grid, sinusoidal_coefficients(grid, rep, amplitude=0.5, wavenumber=1))
    g = gaussian_state(grid, rep, width=2.0, momentum=[1.0])
    for m in (1.0, 10.0, 100.0):
        assert resolvent_identity_residual(op, m, g) < 1e-9


def test_section2_check_small_grid():
    rep = build_clifford(1)
    grid = GridSpec(n=1, M=256, L=32.0)
    op = build_first_order(grid, sinusoidal_coefficients(grid, rep, amplitude=0.5, wavenumber=1))
    phi = gaussian_state(grid, rep, width=2.0, seed=1)
    psi = gaussian_state(grid, rep, width=1.5, center=[2.0], seed=2)
    report = section2_check(op, [1, 10, 100], phi, psi, amplitude=0.5, wavenumber=1, tol=1e-4, max_iter=3000)
    assert report.symmetry_defect < 1e-10
    assert all(e.antisymmetry_defect < 1e-10 for e in report.estimates)
    assert report.spread <= 1.5
    assert report.max_derivative_entry == pytest.approx(0.5 * 2 * np.pi / 32, rel=1e-6)
    with pytest.raises(ValueError):
        section2_check(op, [], phi, psi)


@pytest.mark.slow
def test_Xm_norms_stay_bounded_across_m():
    rep = build_clifford(1)
    grid = GridSpec(n=1, M=2048, L=128.0)
    op = build_first_order(grid, sinusoidal_coefficients(grid, rep, amplitude=0.5, wavenumber=1))
    phi = gaussian_state(grid, rep, width=8.0, seed=1)
    psi = gaussian_state(grid, rep, width=5.0, center=[8.0], seed=2)
    report = section2_check(op, [1, 10, 100, 1000], phi, psi, tol=1e-4, max_iter=5000)
    assert report.spread <= 1.5, [e.norm for e in report.estimates]


def test_operator_chain_norm_matches_sandwich(rep2, cutoff, small_grid):
    chain = parse_operator_chain("W(-1)*G(0,1)*W(-1)", rep2, cutoff)
    assert chain.label == "W(-1)*G(0,1)*W(-1)"
    by_chain = operator_norm(chain, small_grid, 2, tol=1e-8, max_iter=2000)
    direct = weighted_resolvent_norm(rep2, None, small_grid, 0.0, 1.0, tol=1e-8, max_iter=2000)
    assert by_chain.estimate == pytest.approx(direct.estimate, rel=1e-8)


@pytest.mark.parametrize("expr", ["", "W(-1)*", "G(0,1", "Zed(1)", "F(5)"])
def test_operator_chain_parse_errors(rep2, cutoff, small_grid, expr):
    with pytest.raises(ValueError):
        chain = parse_operator_chain(expr, rep2, cutoff)
        chain.apply(SpinorField(small_grid, np.ones(small_grid.shape + (2,))))
