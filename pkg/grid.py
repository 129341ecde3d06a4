"""
Periodic spectral grids and spinor fields

Position lattice x_j = -L/2 + L*k/M, momentum lattice p_j = (2*pi/L)*m with
m in {-M/2, ..., M/2-1}. Momentum arrays are kept in FFT order. The transform
is f_hat(p) = (2*pi)^(-n/2) * sum_x dx^n e^(-i p.x) f(x), which is unitary
between the position norm (weight dx^n) and the momentum norm (weight dp^n).
"""
import json
import logging
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from clifford import CliffordRep, dirac_symbol

logger = logging.getLogger(__name__)

POSITION = "position"
MOMENTUM = "momentum"
SPACES = (POSITION, MOMENTUM)


class GridSpec(BaseModel):
    """n-dimensional periodic box of side L with M points per axis"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    M: int = Field(ge=2)
    L: float = Field(gt=0)

    @field_validator("M")
    @classmethod
    def _even(cls, value: int) -> int:
        if value % 2:
            raise ValueError(f"M must be even, got {value}")
        return value

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """'2,64,32' -> GridSpec(n=2, M=64, L=32)"""
        parts = [part.strip() for part in str(text).split(",")]
        if len(parts) != 3:
            raise ValueError(f"Grid must look like n,M,L, got {text!r}")
        return cls(n=int(parts[0]), M=int(parts[1]), L=float(parts[2]))

    @property
    def key(self) -> tuple:
        return (self.n, self.M, float(self.L))

    @property
    def shape(self) -> tuple:
        return (self.M,) * self.n

    @property
    def axes(self) -> tuple:
        return tuple(range(self.n))

    @property
    def sites(self) -> int:
        return self.M ** self.n

    @property
    def dx(self) -> float:
        return self.L / self.M

    @property
    def dp(self) -> float:
        return 2 * np.pi / self.L

    @property
    def nyquist(self) -> float:
        """Largest momentum radius covered on every axis"""
        return np.pi * self.M / self.L

    @property
    def positions(self) -> np.ndarray:
        """Coordinates, shape grid.shape + (n,)"""
        return _positions(*self.key)

    @property
    def momenta(self) -> np.ndarray:
        """Momenta in FFT order, shape grid.shape + (n,)"""
        return _momenta(*self.key)

    @property
    def radius(self) -> np.ndarray:
        return _radius(*self.key)

    @property
    def momentum_radius(self) -> np.ndarray:
        return _momentum_radius(*self.key)

    @property
    def bracket(self) -> np.ndarray:
        """<x> = (1 + |x|^2)^(1/2) on the position lattice"""
        return np.sqrt(1.0 + self.radius ** 2)

    @property
    def phase(self) -> np.ndarray:
        """(-1)^(m_1+...+m_n) in FFT order, from the -L/2 lattice offset"""
        return _phase(*self.key)

    def dual(self) -> "GridSpec":
        """Grid whose position lattice is this grid's momentum lattice"""
        return GridSpec(n=self.n, M=self.M, L=2 * np.pi * self.M / self.L)

    def refined(self, factor: int = 2) -> "GridSpec":
        """Box and point count scaled together (same spacing, larger box)"""
        return GridSpec(n=self.n, M=self.M * factor, L=self.L * factor)


@lru_cache(maxsize=16)
def _axis_positions(M: int, L: float) -> np.ndarray:
    return -L / 2 + L * np.arange(M) / M


@lru_cache(maxsize=16)
def _axis_momenta(M: int, L: float) -> np.ndarray:
    return 2 * np.pi / L * np.fft.fftfreq(M, d=1.0 / M)


def _mesh(axis: np.ndarray, n: int) -> np.ndarray:
    mesh = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1)
    mesh.setflags(write=False)
    return mesh


@lru_cache(maxsize=16)
def _positions(n: int, M: int, L: float) -> np.ndarray:
    return _mesh(_axis_positions(M, L), n)


@lru_cache(maxsize=16)
def _momenta(n: int, M: int, L: float) -> np.ndarray:
    return _mesh(_axis_momenta(M, L), n)


@lru_cache(maxsize=16)
def _radius(n: int, M: int, L: float) -> np.ndarray:
    return np.linalg.norm(_positions(n, M, L), axis=-1)


@lru_cache(maxsize=16)
def _momentum_radius(n: int, M: int, L: float) -> np.ndarray:
    return np.linalg.norm(_momenta(n, M, L), axis=-1)


@lru_cache(maxsize=16)
def _phase(n: int, M: int, L: float) -> np.ndarray:
    m = np.rint(_momenta(n, M, L) * L / (2 * np.pi)).astype(int)
    return np.where(m.sum(axis=-1) % 2 == 0, 1.0, -1.0)


class SpinorField:
    """N-component complex field on a grid, tagged with its representation space"""

    def __init__(self, grid: GridSpec, values, space: str = POSITION):
        if space not in SPACES:
            raise ValueError(f"Unknown space tag: {space}")
        values = np.asarray(values, dtype=complex)
        if values.ndim != grid.n + 1 or values.shape[:-1] != grid.shape:
            raise ValueError(f"Values of shape {values.shape} do not fit grid {grid.shape} x N")
        self.grid = grid
        self.values = values
        self.space = space

    @property
    def N(self) -> int:
        return self.values.shape[-1]

    @property
    def weight(self) -> float:
        """Quadrature weight of one site in this space"""
        return (self.grid.dx if self.space == POSITION else self.grid.dp) ** self.grid.n

    def with_values(self, values) -> "SpinorField":
        return SpinorField(self.grid, values, self.space)

    def copy(self) -> "SpinorField":
        return self.with_values(self.values.copy())

    def inner(self, other: "SpinorField") -> complex:
        """<self, other>, antilinear in self"""
        self._check_compatible(other)
        return complex(np.vdot(self.values, other.values) * self.weight)

    def norm(self) -> float:
        return float(np.sqrt(self.weight) * np.linalg.norm(self.values))

    def normalized(self) -> "SpinorField":
        norm = self.norm()
        if norm == 0:
            raise ValueError("Cannot normalize the zero field")
        return self.with_values(self.values / norm)

    def zero_mode(self) -> np.ndarray:
        """Momentum coefficient vector at p = 0"""
        values = to_momentum(self).values
        return values[(0,) * self.grid.n]

    def _check_compatible(self, other: "SpinorField"):
        if other.grid.key != self.grid.key or other.space != self.space:
            raise ValueError("Fields live on different grids or spaces")

    def __add__(self, other: "SpinorField") -> "SpinorField":
        self._check_compatible(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        self._check_compatible(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar) -> "SpinorField":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpinorField":
        return self.with_values(-self.values)

    def __repr__(self) -> str:
        return f"SpinorField(grid={self.grid.key}, N={self.N}, space={self.space})"


def zeros(grid: GridSpec, N: int, space: str = POSITION) -> SpinorField:
    return SpinorField(grid, np.zeros(grid.shape + (N,), dtype=complex), space)


def _scale(grid: GridSpec) -> float:
    return (grid.dx / np.sqrt(2 * np.pi)) ** grid.n


def transform(field: SpinorField) -> SpinorField:
    """Unitary Fourier transform, toggling the space tag; component-wise over spinor indices"""
    grid = field.grid
    phase = grid.phase[..., None]
    if field.space == POSITION:
        values = _scale(grid) * phase * np.fft.fftn(field.values, axes=grid.axes)
        return SpinorField(grid, values, MOMENTUM)
    values = np.fft.ifftn(field.values * phase, axes=grid.axes) / _scale(grid)
    return SpinorField(grid, values, POSITION)


def to_momentum(field: SpinorField) -> SpinorField:
    return field if field.space == MOMENTUM else transform(field)


def to_position(field: SpinorField) -> SpinorField:
    return field if field.space == POSITION else transform(field)


def to_dual_position(field: SpinorField) -> SpinorField:
    """Momentum coefficients viewed as a position field on grid.dual()"""
    values = np.fft.fftshift(to_momentum(field).values, axes=field.grid.axes)
    return SpinorField(field.grid.dual(), values, POSITION)


def weighted_norm(field: SpinorField, s: float) -> float:
    """||<x>^s f||, the L^2_s norm"""
    if field.space != POSITION:
        raise ValueError("weighted_norm needs a position-space field")
    weighted = field.grid.bracket[..., None] ** s * field.values
    return float(np.sqrt(field.weight) * np.linalg.norm(weighted))


def boundary_mass(field: SpinorField, layers: int = 2) -> float:
    """Fraction of ||f||^2 on sites within `layers` cells of the box boundary"""
    field = to_position(field)
    grid = field.grid
    edge = grid.L / 2 - layers * grid.dx
    near = np.any(np.abs(grid.positions) >= edge - 1e-12, axis=-1)
    density = np.sum(np.abs(field.values) ** 2, axis=-1)
    total = density.sum()
    return float(density[near].sum() / total) if total > 0 else 0.0


def parity(field: SpinorField) -> SpinorField:
    """f(x) -> f(-x) on the periodic lattice"""
    field = to_position(field)
    axes = field.grid.axes
    values = np.roll(np.flip(field.values, axis=axes), 1, axis=axes)
    return field.with_values(values)


def _random_spinor(rng: np.random.Generator, N: int) -> np.ndarray:
    v = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return v / np.linalg.norm(v)


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """0 for t <= 0, 1 for t >= 1, C-infinity in between"""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    rise = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    fall = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return rise / (rise + fall)


def annulus_profile(grid: GridSpec, pmin: float, pmax: float) -> np.ndarray:
    """
    Radial momentum profile supported in pmin <= |p| <= pmax

    A Gaussian centred in the annulus with width w = sqrt(h / (L/2)), h the
    half width, so that its value at the annulus edges and its position
    envelope e^(-w^2 |x|^2 / 2) at the box boundary are both e^(-h L / 4).
    A narrow smooth step at each edge makes the support exact.
    """
    half = (pmax - pmin) / 2
    center = (pmin + pmax) / 2
    width = np.sqrt(half / (grid.L / 2))
    r = grid.momentum_radius
    ramp = half / 32
    window = _smooth_step((r - pmin) / ramp) * _smooth_step((pmax - r) / ramp)
    return np.exp(-(r - center) ** 2 / (2 * width ** 2)) * window


def annulus_state(grid: GridSpec, rep: CliffordRep, pmin: float, pmax: float, seed: int = 0) -> SpinorField:
    """
    Normalized field whose momentum coefficients live in pmin <= |p| <= pmax

    The profile is annulus_profile() times a random polynomial of degree <= 2
    in p/|p|, independently for each spinor component. Position tails at the
    box boundary fall off like e^(-(pmax - pmin) L / 8).
    """
    if not 0 < pmin < pmax < grid.nyquist:
        raise ValueError(f"Need 0 < pmin < pmax < {grid.nyquist:.4g}, got pmin={pmin}, pmax={pmax}")
    r = grid.momentum_radius
    if not np.any((r > pmin) & (r < pmax)):
        raise ValueError(f"No lattice momenta inside the annulus [{pmin}, {pmax}]")
    profile = annulus_profile(grid, pmin, pmax)

    rng = np.random.default_rng(seed)
    direction = grid.momenta / np.where(r > 0, r, 1.0)[..., None]
    N, n = rep.N, grid.n
    c0 = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    c1 = rng.standard_normal((n, N)) + 1j * rng.standard_normal((n, N))
    c2 = rng.standard_normal((n, n, N)) + 1j * rng.standard_normal((n, n, N))
    poly = (
        c0
        + np.einsum("...j,jc->...c", direction, c1)
        + np.einsum("...j,...k,jkc->...c", direction, direction, c2)
    )
    values = profile[..., None] * poly
    field = SpinorField(grid, values, MOMENTUM)
    return to_position(field).normalized()


def gaussian_state(
    grid: GridSpec,
    rep: CliffordRep,
    width: float,
    center: Optional[Sequence[float]] = None,
    momentum: Optional[Sequence[float]] = None,
    spinor: Optional[Sequence[complex]] = None,
    seed: int = 0,
) -> SpinorField:
    """Normalized e^(i p0.x) e^(-|x-x0|^2/(2 w^2)) v on the position lattice"""
    if width <= 0:
        raise ValueError(f"Width must be positive, got {width}")
    x = grid.positions
    x0 = np.zeros(grid.n) if center is None else np.asarray(center, dtype=float)
    p0 = np.zeros(grid.n) if momentum is None else np.asarray(momentum, dtype=float)
    if spinor is None:
        v = _random_spinor(np.random.default_rng(seed), rep.N)
    else:
        v = np.asarray(spinor, dtype=complex)
    envelope = np.exp(-np.sum((x - x0) ** 2, axis=-1) / (2 * width ** 2) + 1j * (x @ p0))
    return SpinorField(grid, envelope[..., None] * v, POSITION).normalized()


def band_cutoff(r: np.ndarray, scale: float) -> np.ndarray:
    """
    (1 - e^(-r^2 / (2 scale^2)))^3

    Times alpha.p/|p| this vanishes like |p|^6 at p = 0, so the position
    kernel of the damped band projector decays like |x|^(-n-6).
    """
    return (1.0 - np.exp(-np.asarray(r, dtype=float) ** 2 / (2 * scale ** 2))) ** 3


def wavepacket_state(
    grid: GridSpec,
    rep: CliffordRep,
    momentum: Sequence[float],
    width: float,
    center: Optional[Sequence[float]] = None,
    band: Optional[int] = None,
    spinor: Optional[Sequence[complex]] = None,
    seed: int = 0,
) -> SpinorField:
    """
    Gaussian packet with its zero-mode coefficient removed, optionally projected on one energy band

    With band=+1 (-1) every mode is projected by (I + (-) alpha.p/|p|)/2 so the
    packet moves along (against) p/|p| at unit speed. The projector jumps at
    p = 0, so it is damped by band_cutoff() there.
    """
    packet = to_momentum(gaussian_state(grid, rep, width, center, momentum, spinor, seed))
    values = packet.values.copy()
    values[(0,) * grid.n] = 0.0
    if band is not None:
        if band not in (1, -1):
            raise ValueError(f"Band must be +1 or -1, got {band}")
        r = grid.momentum_radius
        unit = dirac_symbol(rep, grid.momenta) / np.where(r > 0, r, 1.0)[..., None, None]
        projector = 0.5 * (np.eye(rep.N) + band * unit)
        scale = max(float(np.linalg.norm(momentum)) / 4, grid.dp)
        projector = band_cutoff(r, scale)[..., None, None] * projector
        values = np.einsum("...ij,...j->...i", projector, values)
        values[(0,) * grid.n] = 0.0
    return to_position(packet.with_values(values)).normalized()


def shell_state(
    grid: GridSpec,
    rep: CliffordRep,
    radius: float,
    width: float,
    spinor: Optional[Sequence[complex]] = None,
    seed: int = 0,
) -> SpinorField:
    """Momentum profile e^(-(|p| - radius)^2 / (2 width^2)) v, zero mode removed"""
    if radius <= 0 or width <= 0:
        raise ValueError(f"Shell radius and width must be positive, got {radius}, {width}")
    if radius >= grid.nyquist:
        raise ValueError(f"Shell radius {radius} is beyond the grid radius {grid.nyquist:.4g}")
    if spinor is None:
        v = _random_spinor(np.random.default_rng(seed), rep.N)
    else:
        v = np.asarray(spinor, dtype=complex)
    profile = np.exp(-(grid.momentum_radius - radius) ** 2 / (2 * width ** 2))
    profile[(0,) * grid.n] = 0.0
    return to_position(SpinorField(grid, profile[..., None] * v, MOMENTUM)).normalized()


def random_field(grid: GridSpec, N: int, seed: int = 0) -> SpinorField:
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(grid.shape + (N,)) + 1j * rng.standard_normal(grid.shape + (N,))
    return SpinorField(grid, values, POSITION).normalized()


def save_field(field: SpinorField, path: str) -> str:
    """JSON header {n, M, L, N, space} followed by row-major [re, im] values"""
    flat = field.values.reshape(-1)
    payload = {
        "n": field.grid.n,
        "M": field.grid.M,
        "L": field.grid.L,
        "N": field.N,
        "space": field.space,
        "values": [[float(z.real), float(z.imag)] for z in flat],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f)
    return path


def load_field(path: str) -> SpinorField:
    with open(path, "r", encoding="utf-8") as f:
        payload = json.load(f)
    grid = GridSpec(n=payload["n"], M=payload["M"], L=payload["L"])
    raw = np.asarray(payload["values"], dtype=float)
    values = (raw[:, 0] + 1j * raw[:, 1]).reshape(grid.shape + (int(payload["N"]),))
    return SpinorField(grid, values, payload["space"])
