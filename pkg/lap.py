"""
Resolvents of the free Dirac operator and the limiting absorption checks

T(lam, mu, eps) = H0 - (lam +- i mu) -+ i eps B and G = T^(-1) act mode by
mode. The weighted sandwich <Q>^(-1) G <Q>^(-1) is measured by Lanczos
on S*S and scanned over (lam, mu); Kato ratios, the Kato-smoothness
integral and the Gronwall bound used for the eps -> 0 limit live here too.
"""
import time
import logging
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.integrate import cumulative_trapezoid, nquad, solve_ivp, trapezoid

from clifford import CliffordRep, dirac_symbol
from grid import GridSpec, SpinorField, gaussian_state, to_momentum, to_position, weighted_norm
from helpers import NormEstimate, lanczos_norm, loglog_slope, DEFAULT_TOL, DEFAULT_MAX_ITER
from operators import CutoffFunction, apply_multiplier, require_core, symbol_values
from runner import run_rows
from symbols.factory import SymbolFactory

logger = logging.getLogger(__name__)

DEFAULT_MUS = [1.0, 0.5, 0.25]


# ======================
# Resolvent queries
# ======================

class ResolventQuery(BaseModel):
    """One point (lam, mu, eps, sign, mass) of the resolvent family"""
    model_config = ConfigDict(frozen=True)

    lam: float
    mu: float = Field(gt=0)
    eps: float = Field(default=0.0, ge=0, lt=1)
    sign: int = 1
    mass: float = Field(default=0.0, ge=0)

    @field_validator("sign")
    @classmethod
    def _sign(cls, value: int) -> int:
        if value not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {value}")
        return value

    def flipped(self) -> "ResolventQuery":
        return self.model_copy(update={"sign": -self.sign})

    def with_eps(self, eps: float) -> "ResolventQuery":
        return ResolventQuery(**{**self.model_dump(), "eps": eps})

    def symbol(self, rep: CliffordRep, cutoff: Optional[CutoffFunction], name: str = "G"):
        return SymbolFactory.get_symbol(name, rep, cutoff, **self.model_dump())


def resolvent_G(rep: CliffordRep, cutoff: Optional[CutoffFunction], q: ResolventQuery, f: SpinorField) -> SpinorField:
    return apply_multiplier(q.symbol(rep, cutoff), f)


def apply_T(rep: CliffordRep, cutoff: Optional[CutoffFunction], q: ResolventQuery, f: SpinorField) -> SpinorField:
    return apply_multiplier(q.symbol(rep, cutoff, name="T"), f)


def F_eps(rep: CliffordRep, cutoff: Optional[CutoffFunction], q: ResolventQuery, psi: SpinorField) -> complex:
    """<psi, G psi>"""
    return psi.inner(resolvent_G(rep, cutoff, q, psi))


def F_eps_derivative(rep: CliffordRep, cutoff: CutoffFunction, q: ResolventQuery, psi: SpinorField) -> complex:
    """d/d eps <psi, G psi> = +-i <psi, G B G psi>"""
    g_psi = resolvent_G(rep, cutoff, q, psi)
    bg_psi = apply_multiplier(SymbolFactory.get_symbol("B", rep, cutoff), g_psi)
    return q.sign * 1j * psi.inner(resolvent_G(rep, cutoff, q, bg_psi))


def F_eps_finite_difference(
    rep: CliffordRep,
    cutoff: CutoffFunction,
    q: ResolventQuery,
    psi: SpinorField,
    step: float = 1e-4,
) -> complex:
    """Central difference of F in eps"""
    if not 0 < step <= q.eps or q.eps + step >= 1:
        raise ValueError(f"Step {step} does not fit inside [0, 1) around eps={q.eps}")
    upper = F_eps(rep, cutoff, q.with_eps(q.eps + step), psi)
    lower = F_eps(rep, cutoff, q.with_eps(q.eps - step), psi)
    return (upper - lower) / (2 * step)


# ======================
# Weighted norms
# ======================

def _sandwich_normal(g: np.ndarray, grid: GridSpec, weight: float):
    """v -> S* S v for S = <x>^s G <x>^s with G given by its mode matrices"""
    w = grid.bracket[..., None] ** weight
    g_adj = np.conj(np.swapaxes(g, -1, -2))

    def normal(v: np.ndarray) -> np.ndarray:
        u = apply_multiplier(g, SpinorField(grid, w * v)).values
        u = apply_multiplier(g_adj, SpinorField(grid, w * w * u)).values
        return w * u

    return normal


def weighted_resolvent_norm(
    rep: CliffordRep,
    cutoff: Optional[CutoffFunction],
    grid: GridSpec,
    lam: float,
    mu: float,
    sign: int = 1,
    mass: float = 0.0,
    weight: float = -1.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
) -> NormEstimate:
    """
    ||<Q>^s G0(lam, mu) <Q>^s|| by Lanczos on S*S

    weight=-1 is the sandwich of the limiting absorption bound; weight=0
    gives the plain resolvent norm, which mode_resolvent_max computes exactly.
    """
    q = ResolventQuery(lam=lam, mu=mu, sign=sign, mass=mass)
    g = symbol_values(q.symbol(rep, cutoff), grid)
    normal = _sandwich_normal(g, grid, weight)
    return lanczos_norm(normal, grid.shape + (rep.N,), seed=seed, tol=tol, max_iter=max_iter,
                        label=f"sandwich lam={lam:g} mu={mu:g}")


def mode_resolvent_max(grid: GridSpec, lam: float, mu: float, mass: float = 0.0) -> float:
    """max over lattice modes and both bands of 1/|+-sqrt(|p|^2 + m^2) - lam -+ i mu|"""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    energy = np.sqrt(grid.momentum_radius ** 2 + mass ** 2)
    upper = 1.0 / np.abs(energy - lam - 1j * mu)
    lower = 1.0 / np.abs(-energy - lam - 1j * mu)
    return float(max(upper.max(), lower.max()))


def mu_min(grid: GridSpec, factor: float = 1.0) -> float:
    """Smallest mu a scan accepts: factor * (2 pi / L), the box level spacing"""
    return factor * grid.dp


def spectrum_radius(grid: GridSpec, mass: float = 0.0) -> float:
    return float(np.sqrt(grid.momentum_radius.max() ** 2 + mass ** 2))


def default_lambdas(grid: GridSpec, count: int = 33, margin: float = 2.0, mass: float = 0.0) -> list[float]:
    """count points spanning the lattice spectrum [-spectrum_radius, spectrum_radius] plus margin"""
    edge = spectrum_radius(grid, mass) + margin
    return [float(v) for v in np.linspace(-edge, edge, count)]


# ======================
# LAP scan
# ======================

LAP_SCAN_HEADER = ["lambda", "mu", "weighted_norm", "unweighted_norm", "iters", "converged"]


class LapScanRow(BaseModel):
    lam: float
    mu: float
    weighted_norm: float
    unweighted_norm: float
    iters: int
    converged: bool


class LapScanResult(BaseModel):
    """Rows in input order (mu outer, lam inner) plus the summary of the scan"""
    grid: GridSpec
    seed: int
    tol: float
    sign: int
    mass: float
    rows: list[LapScanRow]
    sup_weighted: float
    weighted_exponent: Optional[float] = None
    unweighted_exponent: Optional[float] = None
    converged: bool

    def csv_rows(self) -> list[list]:
        return [[r.lam, r.mu, r.weighted_norm, r.unweighted_norm, r.iters, r.converged] for r in self.rows]

    def rows_at(self, mu: float) -> list[LapScanRow]:
        return [row for row in self.rows if row.mu == mu]

    def weighted_spread(self, mu: float) -> float:
        """sup/min of the weighted norm over lam at fixed mu"""
        values = [row.weighted_norm for row in self.rows_at(mu)]
        return max(values) / min(values)


def _growth_exponents(rows: Sequence[LapScanRow], grid: GridSpec, mass: float):
    mus = sorted({row.mu for row in rows})
    if len(mus) < 2:
        return None, None
    inside = spectrum_radius(grid, mass)
    weighted, unweighted, kept = [], [], []
    for mu in mus:
        at_mu = [row for row in rows if row.mu == mu]
        in_spectrum = [row.unweighted_norm for row in at_mu if abs(row.lam) <= inside]
        weighted.append(max(row.weighted_norm for row in at_mu))
        if in_spectrum:
            unweighted.append(max(in_spectrum))
            kept.append(mu)
    weighted_exponent = loglog_slope([1 / mu for mu in mus], weighted)
    unweighted_exponent = loglog_slope([1 / mu for mu in kept], unweighted) if len(kept) >= 2 else None
    return weighted_exponent, unweighted_exponent


def lap_scan(
    rep: CliffordRep,
    cutoff: Optional[CutoffFunction],
    grid: GridSpec,
    lambdas: Sequence[float],
    mus: Sequence[float],
    sign: int = 1,
    mass: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
    threads: Optional[int] = None,
    mu_min_factor: float = 1.0,
    force: bool = False,
    progress: bool = False,
) -> LapScanResult:
    """
    Weighted and unweighted resolvent norms on the (lam, mu) product

    Raises:
        ValueError: On empty lists or mu below the box floor without force
    """
    lambdas = [float(lam) for lam in lambdas]
    mus = [float(mu) for mu in mus]
    if not lambdas:
        raise ValueError("The lambda list is empty")
    if not mus:
        raise ValueError("The mu list is empty")
    if any(mu <= 0 for mu in mus):
        raise ValueError(f"Every mu must be positive, got {mus}")
    floor = mu_min(grid, mu_min_factor)
    below = [mu for mu in mus if mu < floor]
    if below and not force:
        raise ValueError(f"mu values {below} are below the box floor {floor:.4g}; pass force to scan anyway")
    if below:
        logger.warning(f"[Scan] Scanning mu {below} below the box floor {floor:.4g}")

    start_time = time.time()

    def row(pair) -> LapScanRow:
        lam, mu = pair
        result = weighted_resolvent_norm(rep, cutoff, grid, lam, mu, sign=sign, mass=mass,
                                         tol=tol, max_iter=max_iter, seed=seed)
        return LapScanRow(
            lam=lam,
            mu=mu,
            weighted_norm=result.estimate,
            unweighted_norm=mode_resolvent_max(grid, lam, mu, mass),
            iters=result.iterations,
            converged=result.converged,
        )

    pairs = [(lam, mu) for mu in mus for lam in lambdas]
    rows = run_rows(row, pairs, threads=threads, label="Scan", progress=progress)
    weighted_exponent, unweighted_exponent = _growth_exponents(rows, grid, mass)

    result = LapScanResult(
        grid=grid,
        seed=seed,
        tol=tol,
        sign=sign,
        mass=mass,
        rows=rows,
        sup_weighted=max(row.weighted_norm for row in rows),
        weighted_exponent=weighted_exponent,
        unweighted_exponent=unweighted_exponent,
        converged=all(row.converged for row in rows),
    )
    duration = time.time() - start_time
    logger.info(f"[Scan] {len(rows)} rows in {duration:.2f}s, sup weighted norm {result.sup_weighted:.6g}")
    if not result.converged:
        logger.warning(f"[Scan] {sum(not r.converged for r in rows)} rows did not converge")
    return result


# ======================
# Duality norm
# ======================

class DualityReport(BaseModel):
    lam: float
    mu: float
    norm: float
    numerical_radius: float
    phases: int
    holds: bool


def duality_norm_check(
    rep: CliffordRep,
    cutoff: Optional[CutoffFunction],
    grid: GridSpec,
    lam: float,
    mu: float,
    sign: int = 1,
    mass: float = 0.0,
    phases: int = 8,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
) -> DualityReport:
    """
    Compare ||S|| with the numerical radius sup |<phi, S phi>| / ||phi||^2

    The radius is taken as the max over a phase grid of ||Re(e^(i theta) S)||,
    a lower bound within a factor cos(pi/phases); w <= ||S|| <= 2w always.
    """
    if phases < 3:
        raise ValueError(f"Need at least 3 phases, got {phases}")
    q = ResolventQuery(lam=lam, mu=mu, sign=sign, mass=mass)
    g = symbol_values(q.symbol(rep, cutoff), grid)
    g_adj = np.conj(np.swapaxes(g, -1, -2))
    w = grid.bracket[..., None] ** -1.0
    shape = grid.shape + (rep.N,)

    norm = lanczos_norm(_sandwich_normal(g, grid, -1.0), shape, seed=seed, tol=tol, max_iter=max_iter,
                        label="duality norm").estimate

    radius = 0.0
    for theta in np.linspace(0, np.pi, phases, endpoint=False):
        rotation = np.exp(1j * theta)

        def real_part(v: np.ndarray) -> np.ndarray:
            forward = apply_multiplier(g, SpinorField(grid, w * v)).values
            backward = apply_multiplier(g_adj, SpinorField(grid, w * v)).values
            return 0.5 * w * (rotation * forward + np.conj(rotation) * backward)

        estimate = lanczos_norm(lambda v: real_part(real_part(v)), shape, seed=seed, tol=tol,
                                max_iter=max_iter, label=f"Re(e^i{theta:.2f} S)").estimate
        radius = max(radius, estimate)

    holds = radius <= norm * (1 + 10 * tol) and norm <= 4 * radius
    return DualityReport(lam=lam, mu=mu, norm=norm, numerical_radius=radius, phases=phases, holds=holds)


# ======================
# Kato smoothness
# ======================

class KatoSmoothResult(BaseModel):
    eps: list[float]
    values: list[float]
    max_value: float
    lam_min: float
    lam_max: float
    step: float
    covers_spectrum: bool
    monotone: bool
    growth_ratio: float


def kato_smooth_integrand(
    rep: CliffordRep,
    f: SpinorField,
    lam: float,
    eps: float,
    mass: float = 0.0,
) -> float:
    """||<Q>^(-1) G0(lam, +eps) f||^2 + ||<Q>^(-1) G0(lam, -eps) f||^2"""
    grid = f.grid
    hat = np.fft.fftn(to_position(f).values, axes=grid.axes)
    return _integrand_from_hat(rep, grid, hat, lam, eps, mass)


def _integrand_from_hat(rep, grid, hat, lam, eps, mass, h=None, energy2=None) -> float:
    if h is None:
        h = dirac_symbol(rep, grid.momenta, mass)
        energy2 = grid.momentum_radius ** 2 + mass ** 2
    w = grid.bracket[..., None] ** -1.0
    total = 0.0
    for sign in (1, -1):
        shift = lam + sign * 1j * eps
        numerator = h + shift * np.eye(rep.N)
        values = np.einsum("...ij,...j->...i", numerator, hat) / (energy2 - shift ** 2)[..., None]
        position = np.fft.ifftn(values, axes=grid.axes)
        total += float(np.sum(np.abs(w * position) ** 2))
    return total * grid.dx ** grid.n


def kato_smooth_integral(
    rep: CliffordRep,
    f: SpinorField,
    eps_list: Sequence[float],
    lam_range: Optional[tuple] = None,
    step: Optional[float] = None,
    mass: float = 0.0,
    margin: float = 2.0,
) -> KatoSmoothResult:
    """
    (1/4 pi^2) int dlam [||<Q>^(-1) G0^+ f||^2 + ||<Q>^(-1) G0^- f||^2] per eps, trapezoid rule

    The default range is the lattice spectrum plus margin on each side and the
    default step a quarter of the smallest eps.
    """
    eps_list = [float(eps) for eps in eps_list]
    if not eps_list or any(eps <= 0 for eps in eps_list):
        raise ValueError(f"Need a nonempty list of positive eps, got {eps_list}")
    if abs(f.norm() - 1.0) > 1e-8:
        raise ValueError(f"Kato-smoothness integral needs ||f|| = 1, got {f.norm():.6g}")
    grid = f.grid
    edge = spectrum_radius(grid, mass)
    if lam_range is None:
        lam_range = (-(edge + margin), edge + margin)
    lam_min, lam_max = float(lam_range[0]), float(lam_range[1])
    if not lam_min < lam_max:
        raise ValueError(f"Empty lambda range {lam_range}")
    covers = lam_min <= -(edge + margin) and lam_max >= edge + margin
    if not covers:
        logger.warning(f"[Kato] Range [{lam_min:g}, {lam_max:g}] does not cover the spectrum +- {margin:g}")
    step = float(step) if step is not None else min(eps_list) / 4
    if step <= 0:
        raise ValueError(f"Quadrature step must be positive, got {step}")

    start_time = time.time()
    count = int(np.ceil((lam_max - lam_min) / step)) + 1
    lams = np.linspace(lam_min, lam_max, count)
    hat = np.fft.fftn(to_position(f).values, axes=grid.axes)
    h = dirac_symbol(rep, grid.momenta, mass)
    energy2 = grid.momentum_radius ** 2 + mass ** 2

    values = []
    for eps in eps_list:
        samples = [_integrand_from_hat(rep, grid, hat, lam, eps, mass, h, energy2) for lam in lams]
        values.append(float(trapezoid(samples, lams) / (4 * np.pi ** 2)))

    order = np.argsort(eps_list)[::-1]
    ordered = [values[i] for i in order]
    monotone = all(b >= a * (1 - 1e-6) for a, b in zip(ordered, ordered[1:]))
    duration = time.time() - start_time
    logger.info(f"[Kato] Smoothness integral over {count} points for {len(eps_list)} eps in {duration:.2f}s")
    return KatoSmoothResult(
        eps=eps_list,
        values=values,
        max_value=max(values),
        lam_min=lam_min,
        lam_max=lam_max,
        step=float(lams[1] - lams[0]),
        covers_spectrum=covers,
        monotone=monotone,
        growth_ratio=max(values) / min(values),
    )


# ======================
# Kato ratio
# ======================

def _cell_average_by_faces(n: int, dx: float) -> float:
    """Cell average of |x|^(-1) from the pyramids over the 2n faces of the cell"""
    a = dx / 2
    integrand = lambda *y: 1.0 / np.sqrt(a ** 2 + sum(t * t for t in y))
    face, _ = nquad(integrand, [[0.0, a]] * (n - 1))
    face *= 2 ** (n - 1)
    return 2 * n * a / (n - 1) * face / dx ** n


def cell_average_inverse_radius(n: int, dx: float) -> float:
    """Mean of |x|^(-1) over the lattice cell [-dx/2, dx/2]^n"""
    if n < 2:
        raise ValueError("|x|^(-1) is not integrable at the origin in one dimension")
    if n == 2:
        return float(4 * np.log(1 + np.sqrt(2)) / dx)
    if n == 3:
        return float(3 * (np.log(2 + np.sqrt(3)) - np.pi / 6) / dx)
    return float(_cell_average_by_faces(n, dx))


def kato_ratio(grid: GridSpec, f: SpinorField, variant: str = "kato") -> float:
    """
    int |p| |f_hat|^2 dp / int |x|^(-1) |f|^2 dx on the lattice

    variant="bracket" uses <p> in place of |p|. The site x = 0 carries the
    cell average of |x|^(-1).
    """
    if variant not in ("kato", "bracket"):
        raise ValueError(f"Unknown Kato variant: {variant}")
    if grid.n < 2:
        raise ValueError("Kato ratios need n >= 2")
    x = to_position(f)
    if x.norm() == 0:
        raise ValueError("Kato ratio of the zero field")
    hat = to_momentum(x)
    r = grid.momentum_radius
    multiplier = r if variant == "kato" else np.sqrt(1 + r ** 2)
    numerator = np.sum(multiplier * np.sum(np.abs(hat.values) ** 2, axis=-1)) * hat.weight

    radius = grid.radius
    inverse = np.where(radius > 0, 1.0 / np.where(radius > 0, radius, 1.0),
                       cell_average_inverse_radius(grid.n, grid.dx))
    denominator = np.sum(inverse * np.sum(np.abs(x.values) ** 2, axis=-1)) * x.weight
    return float(numerator / denominator)


class KatoEstimate(BaseModel):
    grid: GridSpec
    variant: str
    family: list[str]
    ratios: list[float]
    running_min: list[float]
    minimum: float


def kato_trial_family(grid: GridSpec, rep: CliffordRep, count: int = 50, seed: int = 0) -> list:
    """(description, field) pairs: Gaussians of varied width, offset and momentum"""
    if count < 1:
        raise ValueError(f"Family size must be positive, got {count}")
    rng = np.random.default_rng(seed)
    widths = np.geomspace(3 * grid.dx, grid.L / 12, count)
    family = []
    for k, width in enumerate(widths):
        center = rng.uniform(-grid.L / 16, grid.L / 16, grid.n)
        momentum = rng.uniform(-grid.nyquist / 4, grid.nyquist / 4, grid.n)
        field = gaussian_state(grid, rep, float(width), center=center, momentum=momentum, seed=seed + k)
        label = f"gaussian w={width:.4g} x0={np.round(center, 3).tolist()} p0={np.round(momentum, 3).tolist()}"
        family.append((label, field))
    return family


def kato_scan(grid: GridSpec, trials: Sequence, variant: str = "kato") -> KatoEstimate:
    if not trials:
        raise ValueError("Empty Kato trial family")
    labels, ratios, running = [], [], []
    for label, field in trials:
        ratio = kato_ratio(grid, field, variant)
        labels.append(label)
        ratios.append(ratio)
        running.append(min(ratio, running[-1]) if running else ratio)
    logger.info(f"[Kato] {len(ratios)} trials, minimum ratio {running[-1]:.6g}")
    return KatoEstimate(grid=grid, variant=variant, family=labels, ratios=ratios,
                        running_min=running, minimum=running[-1])


def kato_constant_C1(kato_min: float) -> float:
    """sqrt(2) + K^(-1/2): bounds ||B^(-1/2) psi|| by ||<x>^(1/2) psi||"""
    if kato_min <= 0:
        raise ValueError(f"Kato constant must be positive, got {kato_min}")
    return float(np.sqrt(2) + kato_min ** -0.5)


class InverseCutoffReport(BaseModel):
    lhs: float
    rhs: float
    c1: float
    holds: bool


def inverse_cutoff_check(
    rep: CliffordRep,
    cutoff: CutoffFunction,
    psi: SpinorField,
    kato_min: float,
) -> InverseCutoffReport:
    """||B^(-1/2) psi|| <= C1 ||<x>^(1/2) psi|| with C1 = sqrt(2) + K^(-1/2)"""
    require_core(psi, "inverse_cutoff_check")
    c1 = kato_constant_C1(kato_min)
    lhs = apply_multiplier(SymbolFactory.get_symbol("Bpow", rep, cutoff, power=-0.5), psi).norm()
    rhs = c1 * weighted_norm(to_position(psi), 0.5)
    return InverseCutoffReport(lhs=lhs, rhs=rhs, c1=c1, holds=lhs <= rhs)


# ======================
# Gronwall
# ======================

class GronwallResult(BaseModel):
    omega: float
    theta: float
    lambdas: list[float]
    bound: list[float]
    hypothesis_holds: Optional[bool] = None
    conclusion_holds: Optional[bool] = None
    max_hypothesis_violation: Optional[float] = None
    max_conclusion_violation: Optional[float] = None


def _tail_integral(values: np.ndarray, lambdas: np.ndarray) -> np.ndarray:
    """int_lam^b values, sampled at every lambda"""
    running = cumulative_trapezoid(values, lambdas, initial=0.0)
    return running[-1] - running


def gronwall_bound(
    omega: float,
    theta: float,
    phi: Sequence[float],
    psi: Sequence[float],
    lambdas: Sequence[float],
    f: Optional[Sequence[float]] = None,
    rtol: float = 1e-6,
) -> GronwallResult:
    """
    Closed-form bound for f(lam) <= omega + int_lam^b [phi f^theta + psi f]:

    f(lam) <= e^(int_lam^b psi) [omega^(1-theta)
              + (1-theta) int_lam^b phi(s) e^((theta-1) int_s^b psi)]^(1/(1-theta))

    With f given, the hypothesis and the conclusion are both checked on the
    sample grid, with violations measured relative to max(1, max bound).
    """
    if not 0 <= theta < 1:
        raise ValueError(f"theta must lie in [0, 1), got {theta}")
    if omega < 0:
        raise ValueError(f"omega must be nonnegative, got {omega}")
    lambdas = np.asarray(lambdas, dtype=float)
    phi, psi = np.asarray(phi, dtype=float), np.asarray(psi, dtype=float)
    if lambdas.ndim != 1 or lambdas.size < 2 or np.any(np.diff(lambdas) <= 0):
        raise ValueError("Sample points must be a strictly increasing list of at least two values")
    if phi.shape != lambdas.shape or psi.shape != lambdas.shape:
        raise ValueError("phi and psi must be sampled on the same points as lambda")
    if np.any(phi < 0) or np.any(psi < 0):
        raise ValueError("phi and psi must be nonnegative")

    psi_tail = _tail_integral(psi, lambdas)
    inner = _tail_integral(phi * np.exp((theta - 1) * psi_tail), lambdas)
    bound = np.exp(psi_tail) * (omega ** (1 - theta) + (1 - theta) * inner) ** (1 / (1 - theta))

    result = GronwallResult(omega=omega, theta=theta, lambdas=lambdas.tolist(), bound=bound.tolist())
    if f is None:
        return result

    f = np.asarray(f, dtype=float)
    if f.shape != lambdas.shape or np.any(f < 0):
        raise ValueError("f must be nonnegative and sampled on the same points as lambda")
    scale = max(1.0, float(bound.max()))
    hypothesis_rhs = omega + _tail_integral(phi * f ** theta + psi * f, lambdas)
    hypothesis_gap = float(np.max(f - hypothesis_rhs)) / scale
    conclusion_gap = float(np.max(f - bound)) / scale
    return result.model_copy(update={
        "hypothesis_holds": hypothesis_gap <= rtol,
        "conclusion_holds": conclusion_gap <= rtol,
        "max_hypothesis_violation": max(hypothesis_gap, 0.0),
        "max_conclusion_violation": max(conclusion_gap, 0.0),
    })


class GronwallInstance(BaseModel):
    omega: float
    theta: float
    scale: float
    lambdas: list[float]
    phi: list[float]
    psi: list[float]
    f: list[float]


def synthetic_gronwall_instance(seed: int, interval: tuple = (0.0, 1.0), samples: int = 2001) -> GronwallInstance:
    """
    Random instance meeting the hypothesis

    g solves g' = -(phi g^theta + psi g), g(b) = omega, so g meets the
    hypothesis with equality; f = c g with c in [0.5, 1] still meets it.
    """
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError(f"Empty interval {interval}")
    rng = np.random.default_rng(seed)
    omega = float(rng.uniform(0.1, 2.0))
    theta = float(rng.uniform(0.0, 0.9))
    scale = float(rng.uniform(0.5, 1.0))
    lambdas = np.linspace(a, b, samples)

    def profile():
        base, amp = rng.uniform(0.0, 1.0, 2)
        freq, phase = rng.uniform(1.0, 6.0), rng.uniform(0.0, np.pi)
        return lambda t: base + amp * np.sin(freq * t + phase) ** 2

    phi_fn, psi_fn = profile(), profile()
    rhs = lambda t, g: -(phi_fn(t) * np.maximum(g, 0.0) ** theta + psi_fn(t) * g)
    solution = solve_ivp(rhs, (b, a), [omega], t_eval=lambdas[::-1], method="DOP853", rtol=1e-11, atol=1e-13)
    if not solution.success:
        raise RuntimeError(f"Forward construction failed: {solution.message}")
    g = solution.y[0][::-1]
    return GronwallInstance(
        omega=omega,
        theta=theta,
        scale=scale,
        lambdas=lambdas.tolist(),
        phi=phi_fn(lambdas).tolist(),
        psi=psi_fn(lambdas).tolist(),
        f=(scale * g).tolist(),
    )
