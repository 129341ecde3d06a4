import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clifford import build_clifford, dirac_symbol
from grid import GridSpec
from operators import CutoffFunction
from symbols import SYMBOL_NAMES, MultiplierSymbol, get_symbol
from symbols.factory import SymbolFactory

LATTICE = GridSpec(n=2, M=8, L=6.0)


def test_registry_lists_every_symbol():
    assert SymbolFactory.get_available_symbols() == SYMBOL_NAMES
    for name in SYMBOL_NAMES:
        cls = get_symbol(name)
        assert issubclass(cls, MultiplierSymbol)
        assert cls.get_symbol_name() == name


def test_factory_errors(rep2, cutoff):
    with pytest.raises(ValueError, match="Unknown symbol"):
        SymbolFactory.get_symbol("Nope", rep2)
    with pytest.raises(ValueError, match="Missing parameters"):
        SymbolFactory.get_symbol("G", rep2, cutoff, lam=0.0)
    with pytest.raises(ValueError, match="Unknown parameters"):
        SymbolFactory.get_symbol("B", rep2, cutoff, power=2)
    with pytest.raises(ValueError, match="given twice"):
        SymbolFactory.get_symbol("G", rep2, cutoff, 0.0, 1.0, lam=0.0)
    with pytest.raises(ValueError):
        SymbolFactory.get_symbol("G", rep2, cutoff, lam=0.0, mu=-1.0)
    with pytest.raises(ValueError):
        SymbolFactory.get_symbol("Rm", rep2, m=0.5)


def test_cutoff_symbols_need_a_cutoff(rep2):
    symbol = SymbolFactory.get_symbol("B", rep2)
    with pytest.raises(ValueError, match="cutoff"):
        symbol.evaluate(LATTICE.momenta)


def test_positional_parameters(rep2, cutoff):
    by_position = SymbolFactory.get_symbol("G", rep2, cutoff, 0.5, 1.0)
    by_name = SymbolFactory.get_symbol("G", rep2, cutoff, lam=0.5, mu=1.0)
    p = LATTICE.momenta
    assert np.array_equal(by_position.evaluate(p), by_name.evaluate(p))


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.0, max_value=5.0))
def test_cutoff_shape(r):
    h = CutoffFunction()
    value = float(h(r))
    assert 0.0 <= value <= 1.0
    assert value >= min(r, 1.0) - 1e-15
    if r < 0.5:
        assert value == r
    if r >= 1.0:
        assert value == 1.0
    assert float(h.dh(r)) >= 0.0


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-6, max_value=5.0))
def test_inverse_square_root_of_cutoff_bound(r):
    eta = float(CutoffFunction().h(r))
    assert eta ** -0.5 <= np.sqrt(2) + r ** -0.5


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.52, max_value=0.98))
def test_cutoff_derivative_matches_difference_quotient(r):
    h = CutoffFunction()
    delta = 1e-6
    quotient = (h(r + delta) - h(r - delta)) / (2 * delta)
    assert float(h.dh(r)) == pytest.approx(float(quotient), abs=1e-5)


def test_cutoff_validates_transition():
    with pytest.raises(ValueError):
        CutoffFunction(inner=0.8, outer=0.6)
    with pytest.raises(ValueError):
        CutoffFunction(inner=0.5, outer=1.5)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=-8, max_value=8),
    st.floats(min_value=0.05, max_value=4),
    st.floats(min_value=0.0, max_value=0.9),
    st.sampled_from([1, -1]),
    st.floats(min_value=0.0, max_value=3.0),
)
def test_resolvent_inverts_shifted_operator(lam, mu, eps, sign, mass):
    rep = build_clifford(2)
    cutoff = CutoffFunction()
    params = dict(lam=lam, mu=mu, eps=eps, sign=sign, mass=mass)
    p = LATTICE.momenta
    g = SymbolFactory.get_symbol("G", rep, cutoff, **params).evaluate(p)
    t = SymbolFactory.get_symbol("T", rep, cutoff, **params).evaluate(p)
    assert np.allclose(g @ t, np.eye(2), atol=1e-9)
    flipped = SymbolFactory.get_symbol("G", rep, cutoff, **{**params, "sign": -sign})
    adjoint = SymbolFactory.get_symbol("G", rep, cutoff, **params).evaluate_adjoint(p)
    assert np.allclose(adjoint, np.conj(np.swapaxes(g, -1, -2)))
    assert np.allclose(adjoint, flipped.evaluate(p))


def test_free_propagator_is_unitary_group(rep3):
    grid = GridSpec(n=3, M=6, L=5.0)
    p = grid.momenta
    u = SymbolFactory.get_symbol("U0", rep3, t=0.7, mass=0.3).evaluate(p)
    v = SymbolFactory.get_symbol("U0", rep3, t=-0.7, mass=0.3).evaluate(p)
    w = SymbolFactory.get_symbol("U0", rep3, t=1.4, mass=0.3).evaluate(p)
    assert np.allclose(u @ np.conj(np.swapaxes(u, -1, -2)), np.eye(4), atol=1e-12)
    assert np.allclose(u @ v, np.eye(4), atol=1e-12)
    assert np.allclose(u @ u, w, atol=1e-12)
    at_rest = SymbolFactory.get_symbol("U0", rep3, t=2.0).evaluate(np.zeros((1, 3)))
    assert np.allclose(at_rest[0], np.eye(4))


def test_cutoff_family(rep2, cutoff):
    p = LATTICE.momenta
    r = LATTICE.momentum_radius
    b = SymbolFactory.get_symbol("B", rep2, cutoff).evaluate(p)
    half = SymbolFactory.get_symbol("Bpow", rep2, cutoff, power=0.5).evaluate(p)
    inverse = SymbolFactory.get_symbol("Bpow", rep2, cutoff, power=-1).evaluate(p)
    assert np.allclose(half @ half, b)
    nonzero = r > 0
    assert np.allclose((inverse @ b)[nonzero], np.eye(2))
    assert np.all(inverse[~nonzero] == 0)


def test_commutator_and_coefficient_symbols(rep2, cutoff):
    p = np.array([[0.3, 0.6], [0.9, -0.2], [2.0, 1.0]])
    r = np.linalg.norm(p, axis=-1)
    h0 = dirac_symbol(rep2, p)
    k = SymbolFactory.get_symbol("K", rep2, cutoff).evaluate(p)
    expected = -(cutoff.dh(r) / r)[:, None, None] * h0
    assert np.allclose(k, expected)
    total = sum(SymbolFactory.get_symbol("F", rep2, cutoff, j=j).evaluate(p) * p[:, j, None, None] for j in range(2))
    assert np.allclose(total, 0.5 * cutoff.eta(p)[:, None, None] * h0)


def test_regularizer_and_derivative(rep2):
    p = LATTICE.momenta
    rm = SymbolFactory.get_symbol("Rm", rep2, m=10).evaluate(p)
    assert np.all(rm[..., 0, 0] > 0) and np.all(rm[..., 0, 0] <= 1)
    d = SymbolFactory.get_symbol("D", rep2, j=1).evaluate(p)
    assert np.allclose(d[..., 0, 0], p[..., 1])
    inv_lap = SymbolFactory.get_symbol("invLap", rep2).evaluate(p)
    r = LATTICE.momentum_radius
    assert np.allclose((inv_lap[..., 0, 0] * r ** 2)[r > 0], 1.0)
    assert inv_lap[0, 0, 0, 0] == 0.0
