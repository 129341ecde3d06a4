"""
Perturbed Dirac operator H = H0 + V and time-domain scattering

Potentials are self-adjoint matrix fields with a certified decay constant
C such that ||V(x)|| <= C <x>^(-2) on every lattice site. The smallness
condition sup ||<Q> V G0 <Q>^(-1)|| < 1 is sampled on a finite (lam, mu)
set, the sandwiched resolvent of H is compared with its Neumann expansion,
and wave operators are approximated by e^(itH) e^(-itH0) psi with a
Strang split-step propagator.
"""
import json
import time
import logging
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field
from scipy.sparse.linalg import LinearOperator, gmres

from clifford import CliffordRep
from errors import ConvergenceError
from grid import GridSpec, SpinorField, POSITION, boundary_mass, to_momentum, to_position
from helpers import lanczos_norm, DEFAULT_TOL, DEFAULT_MAX_ITER
from lap import ResolventQuery, mu_min
from operators import apply_H0, apply_multiplier, symbol_values
from runner import run_rows
from symbols.factory import SymbolFactory

logger = logging.getLogger(__name__)

POTENTIAL_KINDS = ["coulomb2", "em", "matrix", "well"]
BOUNDARY_MASS_LIMIT = 1e-6


# ======================
# Potentials
# ======================

class PotentialSpec(BaseModel):
    """
    {kind, c, params}

    coulomb2: q = c <x>^(-2), V = q I
    em:       q = c <x>^(-2), A = c a (-x_2, x_1, 0, ...) <x>^(-3), V = q I - alpha.A
    matrix:   V = c <x>^(-2) W with W a random Hermitian matrix of norm 1 (params.seed)
    well:     V = c (1 - |x|^2/r^2)^2 I inside |x| < r (params.radius), 0 outside
    """
    kind: Literal["coulomb2", "em", "matrix", "well"] = "coulomb2"
    c: float = 0.05
    params: dict[str, float] = {}


def builtin_potential(name: str, c: float = 0.05, **params) -> PotentialSpec:
    if name not in POTENTIAL_KINDS:
        raise ValueError(f"Unknown potential: {name}")
    return PotentialSpec(kind=name, c=c, params=params)


def load_potential_spec(path: str) -> PotentialSpec:
    with open(path, "r", encoding="utf-8") as f:
        return PotentialSpec.model_validate(json.load(f))


class Potential:
    """A PotentialSpec evaluated on one grid"""

    def __init__(self, spec: PotentialSpec, grid: GridSpec, values: np.ndarray):
        values = np.asarray(values, dtype=complex)
        if values.shape[: grid.n] != grid.shape or values.ndim != grid.n + 2:
            raise ValueError(f"Potential values of shape {values.shape} do not fit grid {grid.shape}")
        defect = float(np.max(np.abs(values - np.conj(np.swapaxes(values, -1, -2)))))
        if defect > 1e-12:
            raise ValueError(f"Potential is not self-adjoint (defect {defect:.3e})")
        self.spec = spec
        self.grid = grid
        self.values = values

    @property
    def N(self) -> int:
        return self.values.shape[-1]

    @property
    def site_norms(self) -> np.ndarray:
        return np.max(np.abs(np.linalg.eigvalsh(self.values)), axis=-1)

    @property
    def decay_constant(self) -> float:
        """max over sites of ||V(x)|| <x>^2"""
        return float(np.max(self.site_norms * self.grid.bracket ** 2))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    def scaled(self, t: float) -> "Potential":
        spec = self.spec.model_copy(update={"c": self.spec.c * t})
        return Potential(spec, self.grid, t * self.values)

    def apply(self, f: SpinorField) -> SpinorField:
        """Pointwise V(x) f(x), result in f's space"""
        if f.grid.key != self.grid.key or f.N != self.N:
            raise ValueError("Field does not match the potential's grid or spinor size")
        x = to_position(f)
        result = x.with_values(np.einsum("...ij,...j->...i", self.values, x.values))
        return result if f.space == POSITION else to_momentum(result)


def build_potential(spec: PotentialSpec, rep: CliffordRep, grid: GridSpec) -> Potential:
    if rep.n != grid.n:
        raise ValueError(f"Representation is for n={rep.n}, grid has n={grid.n}")
    x = grid.positions
    bracket = grid.bracket
    envelope = spec.c * bracket ** -2.0
    ident = np.eye(rep.N)

    if spec.kind == "coulomb2":
        values = envelope[..., None, None] * ident
    elif spec.kind == "em":
        strength = spec.c * float(spec.params.get("a", 1.0))
        if grid.n == 1:
            field = [strength * bracket ** -2.0]
        else:
            rotation = strength * bracket ** -3.0
            field = [-rotation * x[..., 1], rotation * x[..., 0]] + [np.zeros(grid.shape)] * (grid.n - 2)
        vector = np.stack(field, axis=-1)
        values = envelope[..., None, None] * ident - np.tensordot(vector, rep.alphas, axes=([-1], [0]))
    elif spec.kind == "matrix":
        rng = np.random.default_rng(int(spec.params.get("seed", 0)))
        raw = rng.standard_normal((rep.N, rep.N)) + 1j * rng.standard_normal((rep.N, rep.N))
        hermitian = 0.5 * (raw + raw.conj().T)
        hermitian /= np.max(np.abs(np.linalg.eigvalsh(hermitian)))
        values = envelope[..., None, None] * hermitian
    else:
        radius = float(spec.params.get("radius", 2.0))
        if radius <= 0:
            raise ValueError(f"Well radius must be positive, got {radius}")
        profile = np.clip(1 - grid.radius ** 2 / radius ** 2, 0.0, None) ** 2
        values = (spec.c * profile)[..., None, None] * ident

    potential = Potential(spec, grid, values)
    logger.info(f"[Scatter] Built {spec.kind} potential, decay constant {potential.decay_constant:.4g}")
    return potential


def apply_H(rep: CliffordRep, pot: Potential, f: SpinorField, m: float = 0.0) -> SpinorField:
    """(H0(m) + V) f in f's space"""
    if f.grid.key != pot.grid.key:
        raise ValueError("Field and potential live on different grids")
    return apply_H0(rep, f, m) + pot.apply(f)


# ======================
# Smallness
# ======================

class SmallnessSample(BaseModel):
    lam: float
    mu: float
    sign: int
    norm: float
    iters: int
    converged: bool


class SmallnessResult(BaseModel):
    samples: list[SmallnessSample]
    sup: float
    verdict: bool
    converged: bool
    note: str = "finite sample: only the listed (lam, mu, sign) points are certified"


def _smallness_operator(rep: CliffordRep, pot: Potential, q: ResolventQuery):
    """(S, S*) on position arrays for S = <Q> V G0 <Q>^(-1)"""
    grid = pot.grid
    g = symbol_values(q.symbol(rep, None), grid)
    g_adj = np.conj(np.swapaxes(g, -1, -2))
    up = grid.bracket[..., None]
    down = 1.0 / up
    v = pot.values
    v_apply = lambda u: np.einsum("...ij,...j->...i", v, u)

    def forward(u: np.ndarray) -> np.ndarray:
        return up * v_apply(apply_multiplier(g, SpinorField(grid, down * u)).values)

    def backward(u: np.ndarray) -> np.ndarray:
        return down * apply_multiplier(g_adj, SpinorField(grid, v_apply(up * u))).values

    return forward, backward


def smallness_check(
    rep: CliffordRep,
    pot: Potential,
    samples: Sequence[tuple],
    signs: Sequence[int] = (1, -1),
    mass: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
    threads: Optional[int] = None,
    mu_min_factor: float = 1.0,
    force: bool = False,
) -> SmallnessResult:
    """sup over the sample of ||<Q> V G0(lam, +-mu) <Q>^(-1)||, verdict sup < 1"""
    if not samples:
        raise ValueError("The (lam, mu) sample is empty")
    if not np.isfinite(pot.decay_constant):
        raise ValueError("Potential has no finite decay certificate")
    floor = mu_min(pot.grid, mu_min_factor)
    below = [mu for _, mu in samples if mu < floor]
    if below and not force:
        raise ValueError(f"mu values {below} are below the box floor {floor:.4g}; pass force to sample anyway")

    shape = pot.grid.shape + (rep.N,)

    def row(item) -> SmallnessSample:
        lam, mu, sign = item
        forward, backward = _smallness_operator(rep, pot, ResolventQuery(lam=lam, mu=mu, sign=sign, mass=mass))
        result = lanczos_norm(lambda u: backward(forward(u)), shape, seed=seed, tol=tol, max_iter=max_iter,
                              label=f"smallness lam={lam:g} mu={mu:g}")
        return SmallnessSample(lam=lam, mu=mu, sign=sign, norm=result.estimate,
                               iters=result.iterations, converged=result.converged)

    items = [(float(lam), float(mu), int(sign)) for lam, mu in samples for sign in signs]
    rows = run_rows(row, items, threads=threads, label="Smallness")
    sup = max(r.norm for r in rows)
    logger.info(f"[Scatter] Smallness sup {sup:.6g} over {len(rows)} samples")
    return SmallnessResult(samples=rows, sup=sup, verdict=sup < 1, converged=all(r.converged for r in rows))


# ======================
# Sandwich identity
# ======================

class SandwichResult(BaseModel):
    lam: float
    mu: float
    sign: int
    depth: int
    residual: float
    residual_by_depth: list[float]
    smallness: float
    tail_bound: float
    solver_iterations: int


def sandwich_identity_check(
    rep: CliffordRep,
    pot: Potential,
    lam: float,
    mu: float,
    f: SpinorField,
    sign: int = 1,
    depth: int = 30,
    solver_tol: float = 1e-8,
    smallness: Optional[float] = None,
    mass: float = 0.0,
    seed: int = 0,
) -> SandwichResult:
    """
    <Q>^(-1) (H - z)^(-1) <Q>^(-1) f against <Q>^(-1) G0 <Q>^(-1) sum_k (-S)^k f

    S = <Q> V G0 <Q>^(-1) and z = lam +- i mu. The left side comes from GMRES
    on (H - z) u = <Q>^(-1) f preconditioned by G0. The relative residual is
    recorded after every Neumann term.

    Raises:
        ConvergenceError: If the smallness norm at z is >= 1 or GMRES fails
    """
    grid = pot.grid
    q = ResolventQuery(lam=lam, mu=mu, sign=sign, mass=mass)
    forward, backward = _smallness_operator(rep, pot, q)
    if smallness is None:
        smallness = lanczos_norm(lambda u: backward(forward(u)), grid.shape + (rep.N,), seed=seed,
                                 label="sandwich smallness").estimate
    if smallness >= 1:
        raise ConvergenceError(f"Neumann series diverges: smallness {smallness:.6g} >= 1 at z={lam}+{sign}i{mu}")

    start_time = time.time()
    f = to_position(f)
    down = 1.0 / grid.bracket[..., None]
    g = symbol_values(q.symbol(rep, None), grid)
    shape = f.values.shape
    size = f.values.size
    z = lam + sign * 1j * mu

    def shifted(u: np.ndarray) -> np.ndarray:
        field = SpinorField(grid, u.reshape(shape))
        return (apply_H(rep, pot, field, mass).values - z * field.values).reshape(-1)

    def free_resolvent(u: np.ndarray) -> np.ndarray:
        return apply_multiplier(g, SpinorField(grid, u.reshape(shape))).values.reshape(-1)

    system = LinearOperator((size, size), matvec=shifted, dtype=np.complex128)
    preconditioner = LinearOperator((size, size), matvec=free_resolvent, dtype=np.complex128)
    iterations = [0]

    def count(_):
        iterations[0] += 1

    rhs = (down * f.values).reshape(-1)
    solution, info = gmres(system, rhs, rtol=solver_tol, atol=0.0, M=preconditioner,
                           callback=count, callback_type="pr_norm")
    if info != 0:
        raise ConvergenceError(f"GMRES did not converge (info={info})")
    left = down * solution.reshape(shape)

    outer = lambda u: down * apply_multiplier(g, SpinorField(grid, down * u)).values
    term = f.values.copy()
    partial = term.copy()
    residuals = []
    left_norm = np.linalg.norm(left)
    for k in range(depth + 1):
        if k > 0:
            term = -forward(term)
            partial = partial + term
        residuals.append(float(np.linalg.norm(left - outer(partial)) / left_norm))

    duration = time.time() - start_time
    logger.info(f"[Scatter] Sandwich residual {residuals[-1]:.3e} at depth {depth} in {duration:.2f}s")
    return SandwichResult(
        lam=lam,
        mu=mu,
        sign=sign,
        depth=depth,
        residual=residuals[-1],
        residual_by_depth=residuals,
        smallness=float(smallness),
        tail_bound=float(smallness ** (depth + 1) / (1 - smallness)),
        solver_iterations=iterations[0],
    )


# ======================
# Propagation
# ======================

def free_evolve(rep: CliffordRep, f: SpinorField, t: float, mass: float = 0.0) -> SpinorField:
    """e^(-i t H0) f"""
    return apply_multiplier(SymbolFactory.get_symbol("U0", rep, t=t, mass=mass), f)


def _site_exponential(values: np.ndarray, tau: float) -> np.ndarray:
    """e^(-i tau V(x)) per site from a batched eigendecomposition"""
    energies, vectors = np.linalg.eigh(values)
    phases = np.exp(-1j * tau * energies)
    return np.einsum("...ik,...k,...jk->...ij", vectors, phases, vectors.conj())


def evolve(
    rep: CliffordRep,
    pot: Optional[Potential],
    f: SpinorField,
    t: float,
    dt: float,
    mass: float = 0.0,
) -> SpinorField:
    """
    e^(-i t H) f by Strang splitting

    The step count is ceil(|t|/dt) so negative t runs backward. Each step is
    a potential half step, an exact free step and a potential half step;
    adjacent half steps are merged.
    """
    if dt <= 0:
        raise ValueError(f"Time step must be positive, got {dt}")
    f = to_position(f)
    if pot is None or pot.is_zero or t == 0:
        return to_position(free_evolve(rep, f, t, mass))
    if pot.grid.key != f.grid.key:
        raise ValueError("Field and potential live on different grids")

    steps = int(np.ceil(abs(t) / dt))
    tau = t / steps
    kinetic = symbol_values(SymbolFactory.get_symbol("U0", rep, t=tau, mass=mass), f.grid)
    half = _site_exponential(pot.values, tau / 2)
    full = _site_exponential(pot.values, tau)
    site = lambda mats, u: np.einsum("...ij,...j->...i", mats, u)

    values = site(half, f.values)
    for k in range(steps):
        values = apply_multiplier(kinetic, SpinorField(f.grid, values)).values
        values = site(full if k < steps - 1 else half, values)
    return f.with_values(values)


# ======================
# Wave operators
# ======================

class ScatteringReport(BaseModel):
    potential: PotentialSpec
    grid: GridSpec
    direction: int
    dt: float
    times: list[float]
    cauchy_tails: list[float]
    isometry_defect: float = Field(ge=0)
    intertwining_defect: float = Field(ge=0)
    unitarity_drift: float = Field(ge=0)
    boundary_mass: list[float]
    valid: bool
    smallness_sup: Optional[float] = None
    smallness_samples: list[list[float]] = []


def wave_operator(
    rep: CliffordRep,
    pot: Potential,
    psi: SpinorField,
    times: Sequence[float],
    dt: float,
    direction: int = 1,
    mass: float = 0.0,
    threads: Optional[int] = None,
):
    """
    Omega(T) psi = e^(i d T H) e^(-i d T H0) psi for T in times, d = direction

    Returns:
        (Omega(T_max) psi, ScatteringReport). The report is marked invalid
        when the free packet puts more than 1e-6 of its mass within two
        cells of the box boundary at any T.
    """
    if direction not in (1, -1):
        raise ValueError(f"Direction must be +1 or -1, got {direction}")
    times = sorted(float(t) for t in times)
    if not times or times[0] <= 0:
        raise ValueError(f"Need positive times, got {times}")
    psi = to_position(psi)
    start_time = time.time()

    def omega(T: float):
        free = to_position(free_evolve(rep, psi, direction * T, mass))
        back = evolve(rep, pot, free, -direction * T, dt, mass)
        return free, back

    outputs = run_rows(omega, times, threads=threads, label="Scatter")
    frees = [free for free, _ in outputs]
    omegas = [back for _, back in outputs]

    tails = [(later - earlier).norm() for earlier, later in zip(omegas, omegas[1:])]
    isometry = abs(omegas[-1].norm() - psi.norm())
    h0_norm = apply_H0(rep, psi, mass).norm()
    intertwining = pot.apply(frees[-1]).norm() / h0_norm if h0_norm > 0 else 0.0
    drift = max(abs(back.norm() - psi.norm()) for back in omegas)
    masses = [boundary_mass(free) for free in frees]
    valid = max(masses) <= BOUNDARY_MASS_LIMIT
    if not valid:
        logger.warning(f"[Scatter] Packet reaches the boundary layer (mass {max(masses):.3e}); result invalid")

    duration = time.time() - start_time
    logger.info(f"[Scatter] Wave operator over T={times} in {duration:.2f}s, tails {[f'{t:.3e}' for t in tails]}")
    report = ScatteringReport(
        potential=pot.spec,
        grid=pot.grid,
        direction=direction,
        dt=dt,
        times=times,
        cauchy_tails=tails,
        isometry_defect=isometry,
        intertwining_defect=intertwining,
        unitarity_drift=drift,
        boundary_mass=masses,
        valid=valid,
    )
    return omegas[-1], report
