"""
Operators as FFT sandwiches

Every operator is a composition of momentum-space multipliers (symbols from
the registry in `symbols`) and position-space multiplications: H0, B, the
weights <x>^s, the conjugate operator A, the first-order operator
L = -i sum F_j d_j - i sum d_j F_j* and the regularizer R_m.

A dense-matrix oracle assembles the same operators from Kronecker products
of the lattice DFT matrix for tiny grids.
"""
import re
import logging
from functools import cached_property, reduce
from typing import Callable, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.linalg import block_diag
from scipy.special import expit

from clifford import CliffordRep
from errors import OutsideCoreError
from grid import GridSpec, SpinorField, MOMENTUM, POSITION, to_momentum, to_position
from helpers import NormEstimate, lanczos_norm, DEFAULT_TOL, DEFAULT_MAX_ITER
from symbols import MultiplierSymbol
from symbols.factory import SymbolFactory
from symbols.library.regularizer import regularizer

logger = logging.getLogger(__name__)

CORE_TOLERANCE = 1e-12


# ======================
# Cutoff
# ======================

class CutoffFunction(BaseModel):
    """
    h(r) = r on [0, inner), k(r) on [inner, outer), 1 on [outer, inf)

    k(r) = (1 - zeta(t)) r + zeta(t) with t = (r - inner)/(outer - inner) and
    zeta(t) = e^(-1/t) / (e^(-1/t) + e^(-1/(1-t))). Defaults give the
    transition on [1/2, 1).
    """
    model_config = ConfigDict(frozen=True)

    inner: float = Field(default=0.5, gt=0)
    outer: float = Field(default=1.0, le=1.0)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.inner < self.outer:
            raise ValueError(f"Need inner < outer, got {self.inner} >= {self.outer}")
        return self

    def _t(self, r: np.ndarray) -> np.ndarray:
        return (r - self.inner) / (self.outer - self.inner)

    @staticmethod
    def zeta(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        inside = (t > 0) & (t < 1)
        safe = np.where(inside, t, 0.5)
        value = expit(1.0 / (1.0 - safe) - 1.0 / safe)
        return np.where(inside, value, np.where(t >= 1, 1.0, 0.0))

    @staticmethod
    def dzeta(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        inside = (t > 0) & (t < 1)
        safe = np.where(inside, t, 0.5)
        z = CutoffFunction.zeta(safe)
        return np.where(inside, z * (1 - z) * (1 / safe ** 2 + 1 / (1 - safe) ** 2), 0.0)

    def h(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        z = self.zeta(self._t(r))
        transition = (1 - z) * r + z
        return np.where(r < self.inner, r, np.where(r >= self.outer, 1.0, transition))

    def dh(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        t = self._t(r)
        transition = (1 - self.zeta(t)) + self.dzeta(t) * (1 - r) / (self.outer - self.inner)
        return np.where(r < self.inner, 1.0, np.where(r >= self.outer, 0.0, transition))

    def eta(self, p) -> np.ndarray:
        """eta(p) = h(|p|)"""
        return self.h(np.linalg.norm(np.asarray(p, dtype=float), axis=-1))

    __call__ = h


# ======================
# Multipliers
# ======================

SymbolLike = Union[MultiplierSymbol, np.ndarray]


def _mode_apply(matrices: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...j->...i", matrices, vectors)


def symbol_values(sym: SymbolLike, grid: GridSpec, adjoint: bool = False) -> np.ndarray:
    """Symbol matrices at every lattice momentum (FFT order)"""
    if isinstance(sym, MultiplierSymbol):
        values = sym.evaluate_adjoint(grid.momenta) if adjoint else sym.evaluate(grid.momenta)
    else:
        values = np.asarray(sym)
        if adjoint:
            values = np.conj(values) if values.ndim == grid.n else np.conj(np.swapaxes(values, -1, -2))
    if not np.all(np.isfinite(values)):
        raise ValueError("Symbol is undefined at a lattice momentum")
    return values


def apply_multiplier(sym: SymbolLike, f: SpinorField, adjoint: bool = False) -> SpinorField:
    """
    Multiply every momentum coefficient vector by sym(p)

    Position fields are transformed, multiplied and transformed back; the
    result keeps the input's space tag. Arrays of shape grid.shape act as
    scalar symbols.
    """
    grid = f.grid
    values = symbol_values(sym, grid, adjoint)
    if values.shape == grid.shape:
        if f.space == MOMENTUM:
            return f.with_values(values[..., None] * f.values)
        return f.with_values(_fourier_scale(f.values, grid, values))
    if values.shape[:-2] != grid.shape:
        raise ValueError(f"Symbol array of shape {values.shape} does not fit grid {grid.shape}")
    if f.space == MOMENTUM:
        return f.with_values(_mode_apply(values, f.values))
    hat = np.fft.fftn(f.values, axes=grid.axes)
    return f.with_values(np.fft.ifftn(_mode_apply(values, hat), axes=grid.axes))


def _fourier_scale(values: np.ndarray, grid: GridSpec, factor: np.ndarray) -> np.ndarray:
    """Scalar multiplier on arrays with any trailing shape"""
    extra = values.ndim - grid.n
    factor = factor.reshape(grid.shape + (1,) * extra)
    return np.fft.ifftn(factor * np.fft.fftn(values, axes=grid.axes), axes=grid.axes)


def apply_H0(rep: CliffordRep, f: SpinorField, m: float = 0.0) -> SpinorField:
    return apply_multiplier(SymbolFactory.get_symbol("H0", rep, mass=m), f)


def apply_weight(f: SpinorField, s: float) -> SpinorField:
    """Pointwise multiplication by <x>^s"""
    if f.space != POSITION:
        raise ValueError("apply_weight needs a position-space field")
    if s == 0:
        return f.copy()
    return f.with_values(f.grid.bracket[..., None] ** s * f.values)


def position_multiply(f: SpinorField, j: int) -> SpinorField:
    """Q_j f"""
    f = to_position(f)
    return f.with_values(f.grid.positions[..., j, None] * f.values)


def spectral_derivative(f: SpinorField, j: int) -> SpinorField:
    """P_j f = -i d_j f"""
    grid = f.grid
    if f.space == MOMENTUM:
        return f.with_values(grid.momenta[..., j, None] * f.values)
    return f.with_values(_fourier_scale(f.values, grid, grid.momenta[..., j]))


def zero_mode_size(f: SpinorField) -> float:
    """Norm contribution of the p = 0 coefficient"""
    return float(np.linalg.norm(f.zero_mode()) * np.sqrt(f.grid.dp ** f.grid.n))


def warn_outside_core(f: SpinorField, label: str) -> float:
    size = zero_mode_size(f)
    if size > CORE_TOLERANCE:
        logger.warning(f"[Core] {label}: zero-mode coefficient {size:.3e} exceeds {CORE_TOLERANCE:g}")
    return size


def require_core(f: SpinorField, label: str) -> None:
    size = zero_mode_size(f)
    if size > CORE_TOLERANCE:
        raise OutsideCoreError(f"{label}: zero-mode coefficient {size:.3e} exceeds {CORE_TOLERANCE:g}")


# ======================
# Conjugate operator
# ======================

def conjugate_kernel(rep: CliffordRep, cutoff: CutoffFunction, grid: GridSpec) -> np.ndarray:
    """Symbol of H0 (-Laplacian)^(-1) eta(p), zero at p = 0"""
    p = grid.momenta
    h0 = SymbolFactory.get_symbol("H0", rep).evaluate(p)
    inv_lap = SymbolFactory.get_symbol("invLap", rep).evaluate(p)
    b = SymbolFactory.get_symbol("B", rep, cutoff).evaluate(p)
    return h0 @ inv_lap @ b


def apply_A(rep: CliffordRep, cutoff: CutoffFunction, f: SpinorField) -> SpinorField:
    """
    A = -1/2 [H0 S (P.Q) + (Q.P) S H0] with S = (-Laplacian)^(-1) eta(P)

    This is the position form of sum_j F_j(p) D_j + D_j F_j(p) with
    D_j = -i d/dp_j, so that i[A, H0] = B. Multiplier stages run in momentum
    space, the Q_j in position space. Inputs with a zero-mode coefficient
    are accepted with a warning.
    """
    warn_outside_core(f, "apply_A")
    kernel = conjugate_kernel(rep, cutoff, f.grid)
    x = to_position(f)
    n = f.grid.n

    pq = reduce(lambda acc, j: acc + spectral_derivative(position_multiply(x, j), j),
                range(1, n), spectral_derivative(position_multiply(x, 0), 0))
    first = apply_multiplier(kernel, pq)

    inner = apply_multiplier(kernel, x)
    second = reduce(lambda acc, j: acc + position_multiply(spectral_derivative(inner, j), j),
                    range(1, n), position_multiply(spectral_derivative(inner, 0), 0))

    result = -0.5 * (first + second)
    return result if f.space == POSITION else to_momentum(result)


def symbol_Fj(rep: CliffordRep, cutoff: CutoffFunction, j: int, p) -> np.ndarray:
    """F_j(p) = (alpha.p) p_j eta(p) / (2|p|^2), 0 at p = 0"""
    return SymbolFactory.get_symbol("F", rep, cutoff, j=j).evaluate(np.asarray(p, dtype=float))


def conjugate_coefficient_fields(rep: CliffordRep, cutoff: CutoffFunction, grid: GridSpec) -> np.ndarray:
    """F_j evaluated on the position lattice, shape (n,) + grid.shape + (N, N)"""
    return np.stack([symbol_Fj(rep, cutoff, j, grid.positions) for j in range(grid.n)])


# ======================
# First-order operators
# ======================

def _spectral_derivative_array(values: np.ndarray, grid: GridSpec, k: int) -> np.ndarray:
    return _fourier_scale(values, grid, grid.momenta[..., k])


class FirstOrderOperator:
    """L = sum_j F_j P_j + P_j F_j* with P_j = -i d_j and matrix-valued coefficient fields F_j"""

    def __init__(self, grid: GridSpec, coefficients):
        coefficients = np.asarray(coefficients, dtype=complex)
        n = grid.n
        if coefficients.ndim != n + 3 or coefficients.shape[: n + 1] != (n,) + grid.shape:
            raise ValueError(
                f"Coefficients of shape {coefficients.shape} do not match grid: expected ({n},) + {grid.shape} + (N, N)"
            )
        if coefficients.shape[-1] != coefficients.shape[-2]:
            raise ValueError("Coefficient matrices must be square")
        if not np.all(np.isfinite(coefficients)):
            raise ValueError("Coefficient fields must be bounded")
        self.grid = grid
        self.coefficients = coefficients
        self.adjoint_coefficients = np.conj(np.swapaxes(coefficients, -1, -2))

    @property
    def N(self) -> int:
        return self.coefficients.shape[-1]

    @cached_property
    def derivative_coefficients(self) -> np.ndarray:
        """d_k(F_j) = [P_k, F_j] as fields, shape (k, j) + grid.shape + (N, N)"""
        return np.stack([
            np.stack([_spectral_derivative_array(self.coefficients[j], self.grid, k) for j in range(self.grid.n)])
            for k in range(self.grid.n)
        ])

    @cached_property
    def derivative_adjoint_coefficients(self) -> np.ndarray:
        """d_k(F_j*)"""
        return np.stack([
            np.stack([_spectral_derivative_array(self.adjoint_coefficients[j], self.grid, k) for j in range(self.grid.n)])
            for k in range(self.grid.n)
        ])

    @property
    def max_entry(self) -> float:
        return float(np.max(np.abs(self.coefficients)))

    @property
    def max_derivative_entry(self) -> float:
        return float(np.max(np.abs(self.derivative_coefficients)))

    def apply(self, f: SpinorField) -> SpinorField:
        if f.grid.key != self.grid.key or f.N != self.N:
            raise ValueError("Field does not match the operator's grid or spinor size")
        x = to_position(f)
        out = np.zeros_like(x.values)
        for j in range(self.grid.n):
            out += _mode_apply(self.coefficients[j], spectral_derivative(x, j).values)
            out += spectral_derivative(x.with_values(_mode_apply(self.adjoint_coefficients[j], x.values)), j).values
        result = x.with_values(out)
        return result if f.space == POSITION else to_momentum(result)


def build_first_order(grid: GridSpec, coefficients) -> FirstOrderOperator:
    return FirstOrderOperator(grid, coefficients)


def apply_L(op: FirstOrderOperator, f: SpinorField) -> SpinorField:
    return op.apply(f)


def sinusoidal_coefficients(
    grid: GridSpec,
    rep: CliffordRep,
    amplitude: float = 0.5,
    wavenumber: int = 1,
    seed: Optional[int] = None,
) -> np.ndarray:
    """
    Smooth periodic coefficients F_j(x) = (1 + a sin(2 pi k x_j / L)) C_j

    C_j = alpha_j unless a seed is given, in which case C_j are random complex
    matrices (L stays symmetric either way).
    """
    x = grid.positions
    if seed is None:
        mats = [rep.alphas[j] for j in range(grid.n)]
    else:
        rng = np.random.default_rng(seed)
        mats = [rng.standard_normal((rep.N, rep.N)) + 1j * rng.standard_normal((rep.N, rep.N)) for _ in range(grid.n)]
    fields = []
    for j in range(grid.n):
        profile = 1.0 + amplitude * np.sin(2 * np.pi * wavenumber * x[..., j] / grid.L)
        fields.append(profile[..., None, None] * mats[j])
    return np.stack(fields)


def _regularizer_values(op: FirstOrderOperator, m: float) -> np.ndarray:
    """Scalar symbol of R_m on the lattice"""
    return regularizer(op.grid.momentum_radius, m)


def commutator_Xm(
    op: FirstOrderOperator,
    m: float,
    f: SpinorField,
    estimate_norm: bool = True,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
):
    """
    X_m f = (L R_m - R_m L) f, R_m = (1 + |p|^2/m)^(-1)

    Returns:
        (X_m f, NormEstimate for ||X_m|| or None)
    """
    if m < 1:
        raise ValueError(f"Regularizer index must be >= 1, got {m}")
    rm = _regularizer_values(op, m)

    def x_apply(g: SpinorField) -> SpinorField:
        return op.apply(apply_multiplier(rm, g)) - apply_multiplier(rm, op.apply(g))

    result = x_apply(to_position(f))
    if not estimate_norm:
        return result, None

    shape = op.grid.shape + (op.N,)
    # X_m is antisymmetric, so X_m* X_m = -X_m^2
    normal = lambda v: -x_apply(x_apply(SpinorField(op.grid, v))).values
    estimate = lanczos_norm(normal, shape, seed=seed, tol=tol, max_iter=max_iter, label=f"X_m m={m:g}")
    return result, estimate


def commutator_Xm_formula(op: FirstOrderOperator, m: float, g: SpinorField) -> SpinorField:
    """
    Right side of the resolvent identity for X_m in terms of d_k(F_j):

    (1/m) sum_jk [P_k R d_k(F_j) R P_j + R d_k(F_j) P_k R P_j]
      + (1/m) sum_jk [P_j R P_k d_k(F_j*) R + P_j R d_k(F_j*) P_k R]
    """
    rm = _regularizer_values(op, m)
    R = lambda h: apply_multiplier(rm, h)
    P = spectral_derivative
    mult = lambda coeff, h: h.with_values(_mode_apply(coeff, h.values))

    g = to_position(g)
    total = g.with_values(np.zeros_like(g.values))
    d, e = op.derivative_coefficients, op.derivative_adjoint_coefficients
    for j in range(op.grid.n):
        rpj = R(P(g, j))
        rg = R(g)
        for k in range(op.grid.n):
            total = total + P(R(mult(d[k, j], rpj)), k)
            total = total + R(mult(d[k, j], P(rpj, k)))
            total = total + P(R(P(mult(e[k, j], rg), k)), j)
            total = total + P(R(mult(e[k, j], P(rg, k))), j)
    return total * (1.0 / m)


def resolvent_identity_residual(op: FirstOrderOperator, m: float, g: SpinorField) -> float:
    """||X_m g - formula(g)|| / ||g||"""
    direct, _ = commutator_Xm(op, m, g, estimate_norm=False)
    return (direct - commutator_Xm_formula(op, m, g)).norm() / g.norm()


class XmEstimate(BaseModel):
    m: float
    norm: float
    iterations: int
    converged: bool
    antisymmetry_defect: float
    identity_residual: float


class Section2Report(BaseModel):
    grid: GridSpec
    amplitude: float
    wavenumber: int
    max_entry: float
    max_derivative_entry: float
    symmetry_defect: float
    estimates: list[XmEstimate]
    spread: float
    converged: bool


def section2_check(
    op: FirstOrderOperator,
    ms: Sequence[float],
    phi: SpinorField,
    psi: SpinorField,
    amplitude: float = 0.0,
    wavenumber: int = 0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
) -> Section2Report:
    """
    Symmetry of L, ||X_m|| across m, antisymmetry of X_m and the resolvent identity residual

    spread is max/min of the ||X_m|| estimates.
    """
    if not ms:
        raise ValueError("The m list is empty")
    symmetry = abs(op.apply(phi).inner(psi) - phi.inner(op.apply(psi))) / (phi.norm() * psi.norm())

    estimates = []
    for m in ms:
        x_psi, estimate = commutator_Xm(op, m, psi, estimate_norm=True, tol=tol, max_iter=max_iter, seed=seed)
        x_phi, _ = commutator_Xm(op, m, phi, estimate_norm=False)
        antisymmetry = abs(phi.inner(x_psi) + np.conj(psi.inner(x_phi))) / (phi.norm() * psi.norm())
        estimates.append(XmEstimate(
            m=float(m),
            norm=estimate.estimate,
            iterations=estimate.iterations,
            converged=estimate.converged,
            antisymmetry_defect=float(antisymmetry),
            identity_residual=resolvent_identity_residual(op, m, psi),
        ))
        logger.info(f"[Check] ||X_m|| ~ {estimate.estimate:.6g} for m={m:g}")

    norms = [e.norm for e in estimates]
    return Section2Report(
        grid=op.grid,
        amplitude=amplitude,
        wavenumber=wavenumber,
        max_entry=op.max_entry,
        max_derivative_entry=op.max_derivative_entry,
        symmetry_defect=float(symmetry),
        estimates=estimates,
        spread=max(norms) / min(norms) if min(norms) > 0 else float("inf"),
        converged=all(e.converged for e in estimates),
    )


# ======================
# Composition strings
# ======================

class _Factor:
    label = ""

    def apply(self, f: SpinorField) -> SpinorField:
        raise NotImplementedError

    def apply_adjoint(self, f: SpinorField) -> SpinorField:
        raise NotImplementedError


class _WeightFactor(_Factor):
    def __init__(self, s: float = -1.0):
        self.s = float(s)
        self.label = f"W({self.s:g})"

    def apply(self, f):
        return apply_weight(to_position(f), self.s)

    apply_adjoint = apply


class _PositionFactor(_Factor):
    def __init__(self, j: int):
        self.j = int(j)
        self.label = f"Q({self.j})"

    def apply(self, f):
        return position_multiply(f, self.j)

    apply_adjoint = apply


class _ConjugateFactor(_Factor):
    label = "A"

    def __init__(self, rep, cutoff):
        self.rep, self.cutoff = rep, cutoff

    def apply(self, f):
        return apply_A(self.rep, self.cutoff, f)

    apply_adjoint = apply


class _SymbolFactor(_Factor):
    def __init__(self, symbol: MultiplierSymbol, label: str):
        self.symbol = symbol
        self.label = label
        self._cache = {}

    def _values(self, grid: GridSpec, adjoint: bool) -> np.ndarray:
        key = (grid.key, adjoint)
        if key not in self._cache:
            self._cache[key] = symbol_values(self.symbol, grid, adjoint)
        return self._cache[key]

    def apply(self, f):
        return apply_multiplier(self._values(f.grid, False), f)

    def apply_adjoint(self, f):
        return apply_multiplier(self._values(f.grid, True), f)


class OperatorChain:
    """Product of factors, the rightmost acting first"""

    def __init__(self, factors: Sequence[_Factor]):
        if not factors:
            raise ValueError("Operator chain is empty")
        self.factors = list(factors)

    @property
    def label(self) -> str:
        return "*".join(factor.label for factor in self.factors)

    def apply(self, f: SpinorField) -> SpinorField:
        for factor in reversed(self.factors):
            f = factor.apply(f)
        return f

    def apply_adjoint(self, f: SpinorField) -> SpinorField:
        for factor in self.factors:
            f = factor.apply_adjoint(f)
        return f


_TOKEN = re.compile(r"^\s*([A-Za-z][A-Za-z0-9]*)\s*(?:\((.*)\))?\s*$")


def _parse_args(text: Optional[str]):
    args, kwargs = [], {}
    if not text or not text.strip():
        return args, kwargs
    for item in text.split(","):
        item = item.strip()
        if "=" in item:
            name, value = item.split("=", 1)
            kwargs[name.strip()] = float(value)
        else:
            args.append(float(item))
    return args, kwargs


def parse_operator_chain(expr: str, rep: CliffordRep, cutoff: CutoffFunction) -> OperatorChain:
    """
    Parse strings like "W(-1)*G(0,1)*W(-1)"

    W(s) is the weight <x>^s, Q(j) a coordinate, A the conjugate operator;
    every other name is looked up in the symbol registry with positional
    parameters in the order of get_param_names().
    """
    factors = []
    for token in expr.split("*"):
        match = _TOKEN.match(token)
        if not match:
            raise ValueError(f"Cannot parse operator factor {token!r}")
        name, arg_text = match.group(1), match.group(2)
        args, kwargs = _parse_args(arg_text)
        if name == "W":
            factors.append(_WeightFactor(*args, **kwargs))
        elif name == "Q":
            factors.append(_PositionFactor(*args, **kwargs))
        elif name == "A":
            factors.append(_ConjugateFactor(rep, cutoff))
        else:
            symbol = SymbolFactory.get_symbol(name, rep, cutoff, *args, **kwargs)
            factors.append(_SymbolFactor(symbol, token.strip()))
    return OperatorChain(factors)


def operator_norm(
    chain: OperatorChain,
    grid: GridSpec,
    N: int,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
) -> NormEstimate:
    normal = lambda v: to_position(chain.apply_adjoint(chain.apply(SpinorField(grid, v)))).values
    return lanczos_norm(normal, grid.shape + (N,), seed=seed, tol=tol, max_iter=max_iter, label=chain.label)


# ======================
# Dense oracle
# ======================

def dense_matrix(apply: Callable[[SpinorField], SpinorField], grid: GridSpec, N: int) -> np.ndarray:
    """Matrix of a position-space operator, columns from basis fields"""
    size = grid.sites * N
    columns = []
    for index in range(size):
        basis = np.zeros(size, dtype=complex)
        basis[index] = 1.0
        image = to_position(apply(SpinorField(grid, basis.reshape(grid.shape + (N,)))))
        columns.append(image.values.reshape(-1))
    return np.stack(columns, axis=1)


def dft_matrix(grid: GridSpec, N: int) -> np.ndarray:
    """Position values -> momentum coefficients, e^(-i p.x) with the lattice offset included"""
    x = -grid.L / 2 + grid.L * np.arange(grid.M) / grid.M
    p = 2 * np.pi / grid.L * np.fft.fftfreq(grid.M, d=1.0 / grid.M)
    axis = grid.dx / np.sqrt(2 * np.pi) * np.exp(-1j * np.outer(p, x))
    full = reduce(np.kron, [axis] * grid.n)
    return np.kron(full, np.eye(N))


def dense_multiplier(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    N = values.shape[-1]
    fourier = dft_matrix(grid, N)
    blocks = block_diag(*values.reshape(-1, N, N))
    return np.linalg.solve(fourier, blocks @ fourier)


def dense_reference(
    rep: CliffordRep,
    cutoff: CutoffFunction,
    grid: GridSpec,
    lam: float = 0.0,
    mu: float = 1.0,
) -> dict:
    """Explicit matrices of H0, B, A, G+, G-, <x>^-1 G+ <x>^-1 for oracle comparisons"""
    N = rep.N
    p = grid.momenta
    ident = np.eye(N)
    h0 = dense_multiplier(SymbolFactory.get_symbol("H0", rep).evaluate(p), grid)
    b = dense_multiplier(SymbolFactory.get_symbol("B", rep, cutoff).evaluate(p), grid)
    kernel = dense_multiplier(conjugate_kernel(rep, cutoff, grid), grid)

    coords = [np.kron(np.diag(grid.positions[..., j].reshape(-1)), ident) for j in range(grid.n)]
    momenta = [dense_multiplier(p[..., j, None, None] * ident, grid) for j in range(grid.n)]
    pq = sum(momenta[j] @ coords[j] for j in range(grid.n))
    qp = sum(coords[j] @ momenta[j] for j in range(grid.n))
    a = -0.5 * (kernel @ pq + qp @ kernel)

    g_plus = dense_multiplier(SymbolFactory.get_symbol("G", rep, cutoff, lam=lam, mu=mu, sign=1).evaluate(p), grid)
    g_minus = dense_multiplier(SymbolFactory.get_symbol("G", rep, cutoff, lam=lam, mu=mu, sign=-1).evaluate(p), grid)
    weight = np.kron(np.diag(1.0 / grid.bracket.reshape(-1)), ident)
    return {
        "H0": h0,
        "B": b,
        "A": a,
        "G+": g_plus,
        "G-": g_minus,
        "WGW": weight @ g_plus @ weight,
    }
