"""
Residual checks for the commutator identities of the conjugate operator

i[A, H0] = B and i[B, A] = K B in strong and bilinear form, the lower bound
||T psi|| >= mu ||psi|| with T* = T(-sign), and the weighted invariance
estimate for G. Every check returns a ResidualReport; refine() repeats a
check on grids with doubled box and point count.
"""
import time
import logging
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, Field

from clifford import CliffordRep
from grid import GridSpec, SpinorField, random_field, to_position, weighted_norm
from lap import (
    ResolventQuery,
    F_eps,
    apply_T,
    resolvent_G,
    kato_constant_C1,
    kato_scan,
    kato_trial_family,
)
from operators import CutoffFunction, apply_A, apply_H0, apply_multiplier, require_core
from symbols.factory import SymbolFactory

logger = logging.getLogger(__name__)

IDENTITIES = ["AH0", "BA", "Tbound", "invariance"]


class RefinementPoint(BaseModel):
    M: int
    L: float
    absolute: float
    relative: float


class ResidualReport(BaseModel):
    identity: str
    grid: GridSpec
    state: str
    absolute: float = Field(ge=0)
    relative: float = Field(ge=0)
    refinement: list[RefinementPoint] = []
    extras: dict[str, float] = {}
    tolerance: Optional[float] = None

    @property
    def passed(self) -> Optional[bool]:
        if self.tolerance is None:
            return None
        return self.relative <= self.tolerance


def _describe(psi: SpinorField, label: Optional[str]) -> str:
    return label or f"field on {psi.grid.key}, N={psi.N}"


# ======================
# Strong-form identities
# ======================

def check_AH0(
    rep: CliffordRep,
    cutoff: CutoffFunction,
    psi: SpinorField,
    label: Optional[str] = None,
) -> ResidualReport:
    """||i(A H0 - H0 A) psi - B psi|| / ||psi||"""
    require_core(psi, "check_AH0")
    start_time = time.time()
    psi = to_position(psi)
    lhs = 1j * (apply_A(rep, cutoff, apply_H0(rep, psi)) - apply_H0(rep, apply_A(rep, cutoff, psi)))
    rhs = apply_multiplier(SymbolFactory.get_symbol("B", rep, cutoff), psi)
    absolute = (lhs - rhs).norm()
    duration = time.time() - start_time
    logger.info(f"[Check] AH0 residual {absolute:.3e} in {duration:.2f}s")
    return ResidualReport(
        identity="AH0",
        grid=psi.grid,
        state=_describe(psi, label),
        absolute=absolute,
        relative=absolute / psi.norm(),
    )


def check_BA(
    rep: CliffordRep,
    cutoff: CutoffFunction,
    psi: SpinorField,
    label: Optional[str] = None,
) -> ResidualReport:
    """||i(B A - A B) psi - K B psi|| / ||psi||, with ||[K, B] psi|| as an extra"""
    require_core(psi, "check_BA")
    start_time = time.time()
    psi = to_position(psi)
    B = SymbolFactory.get_symbol("B", rep, cutoff)
    K = SymbolFactory.get_symbol("K", rep, cutoff)
    lhs = 1j * (apply_multiplier(B, apply_A(rep, cutoff, psi)) - apply_A(rep, cutoff, apply_multiplier(B, psi)))
    b_psi = apply_multiplier(B, psi)
    rhs = apply_multiplier(K, b_psi)
    commutator = (rhs - apply_multiplier(B, apply_multiplier(K, psi))).norm()
    absolute = (lhs - rhs).norm()
    duration = time.time() - start_time
    logger.info(f"[Check] BA residual {absolute:.3e}, [K,B] {commutator:.3e} in {duration:.2f}s")
    return ResidualReport(
        identity="BA",
        grid=psi.grid,
        state=_describe(psi, label),
        absolute=absolute,
        relative=absolute / psi.norm(),
        extras={"KB_commutator": commutator},
    )


# ======================
# Bilinear forms
# ======================

def check_AH0_form(rep: CliffordRep, cutoff: CutoffFunction, psi1: SpinorField, psi2: SpinorField) -> ResidualReport:
    """(psi1, B psi2) = (i H0 psi1, A psi2) - (i A psi1, H0 psi2)"""
    require_core(psi1, "check_AH0_form")
    require_core(psi2, "check_AH0_form")
    psi1, psi2 = to_position(psi1), to_position(psi2)
    lhs = psi1.inner(apply_multiplier(SymbolFactory.get_symbol("B", rep, cutoff), psi2))
    rhs = (1j * apply_H0(rep, psi1)).inner(apply_A(rep, cutoff, psi2)) \
        - (1j * apply_A(rep, cutoff, psi1)).inner(apply_H0(rep, psi2))
    absolute = abs(lhs - rhs)
    return ResidualReport(
        identity="AH0_form",
        grid=psi1.grid,
        state="pair",
        absolute=absolute,
        relative=absolute / (psi1.norm() * psi2.norm()),
    )


def check_BA_form(rep: CliffordRep, cutoff: CutoffFunction, psi1: SpinorField, psi2: SpinorField) -> ResidualReport:
    """(psi1, K B psi2) = (i A psi1, B psi2) - (i B psi1, A psi2)"""
    require_core(psi1, "check_BA_form")
    require_core(psi2, "check_BA_form")
    psi1, psi2 = to_position(psi1), to_position(psi2)
    B = SymbolFactory.get_symbol("B", rep, cutoff)
    K = SymbolFactory.get_symbol("K", rep, cutoff)
    lhs = psi1.inner(apply_multiplier(K, apply_multiplier(B, psi2)))
    rhs = (1j * apply_A(rep, cutoff, psi1)).inner(apply_multiplier(B, psi2)) \
        - (1j * apply_multiplier(B, psi1)).inner(apply_A(rep, cutoff, psi2))
    absolute = abs(lhs - rhs)
    return ResidualReport(
        identity="BA_form",
        grid=psi1.grid,
        state="pair",
        absolute=absolute,
        relative=absolute / (psi1.norm() * psi2.norm()),
    )


# ======================
# Resolvent structure
# ======================

def check_T_bounds(
    rep: CliffordRep,
    cutoff: Optional[CutoffFunction],
    q: ResolventQuery,
    grid: GridSpec,
    trials: int = 20,
    seed: int = 0,
) -> ResidualReport:
    """
    min over random trials of ||T psi|| / ||psi|| against mu, and T* = T(-sign)

    absolute is the violation max(0, mu - min ratio); the adjoint defect is
    max |<T phi, psi> - <phi, T(-sign) psi>| over the trial pairs.
    """
    if trials < 1:
        raise ValueError(f"Need at least one trial, got {trials}")
    min_ratio, adjoint_defect = np.inf, 0.0
    flipped = q.flipped()
    for k in range(trials):
        psi = random_field(grid, rep.N, seed=seed + 2 * k)
        phi = random_field(grid, rep.N, seed=seed + 2 * k + 1)
        min_ratio = min(min_ratio, apply_T(rep, cutoff, q, psi).norm() / psi.norm())
        left = apply_T(rep, cutoff, q, phi).inner(psi)
        right = phi.inner(apply_T(rep, cutoff, flipped, psi))
        adjoint_defect = max(adjoint_defect, abs(left - right) / max(abs(left), 1.0))
    violation = max(0.0, q.mu - min_ratio)
    logger.info(f"[Check] Tbound min ratio {min_ratio:.6g} vs mu {q.mu:g}, adjoint defect {adjoint_defect:.3e}")
    return ResidualReport(
        identity="Tbound",
        grid=grid,
        state=f"{trials} random fields, seed {seed}",
        absolute=violation,
        relative=violation / q.mu,
        extras={"min_ratio": float(min_ratio), "margin": float(min_ratio - q.mu), "adjoint_defect": adjoint_defect},
    )


def check_invariance(
    rep: CliffordRep,
    cutoff: CutoffFunction,
    q: ResolventQuery,
    psi: SpinorField,
    c1: Optional[float] = None,
    label: Optional[str] = None,
) -> ResidualReport:
    """
    ||<x> G psi|| / ||<x> psi|| and the bound ||B^(1/2) G psi|| <= C1 eps^(-1) ||<x>^(1/2) psi||

    C1 defaults to sqrt(2) + K^(-1/2) with K from a small Kato scan on the
    field's grid. absolute is the violation of the bound, relative the
    fraction of the bound used. The sharper eps^(-1) ||B^(-1/2) psi|| and
    the margin of eps ||B^(1/2) G psi||^2 <= |F| are reported as extras.
    """
    if q.eps == 0:
        raise ValueError("The weighted invariance bound needs eps > 0")
    require_core(psi, "check_invariance")
    psi = to_position(psi)
    grid = psi.grid
    if c1 is None:
        estimate = kato_scan(grid, kato_trial_family(grid, rep, count=10))
        c1 = kato_constant_C1(estimate.minimum)

    g_psi = to_position(resolvent_G(rep, cutoff, q, psi))
    ratio = weighted_norm(g_psi, 1.0) / weighted_norm(psi, 1.0)

    half = SymbolFactory.get_symbol("Bpow", rep, cutoff, power=0.5)
    inverse_half = SymbolFactory.get_symbol("Bpow", rep, cutoff, power=-0.5)
    lhs = apply_multiplier(half, g_psi).norm()
    rhs = c1 / q.eps * weighted_norm(psi, 0.5)
    sharp = apply_multiplier(inverse_half, psi).norm() / q.eps
    f_margin = abs(F_eps(rep, cutoff, q, psi)) - q.eps * lhs ** 2

    violation = max(0.0, lhs - rhs)
    logger.info(f"[Check] invariance ratio {ratio:.6g}, bound {lhs:.6g} <= {rhs:.6g}")
    return ResidualReport(
        identity="invariance",
        grid=grid,
        state=_describe(psi, label),
        absolute=violation,
        relative=lhs / rhs,
        extras={
            "weighted_ratio": float(ratio),
            "lhs": float(lhs),
            "rhs": float(rhs),
            "sharp_rhs": float(sharp),
            "c1": float(c1),
            "F_margin": float(f_margin),
        },
    )


# ======================
# Refinement
# ======================

def refine(
    build_report: Callable[[GridSpec], ResidualReport],
    grid: GridSpec,
    levels: int = 2,
) -> ResidualReport:
    """
    Run a check on grid, grid.refined(2), ... (levels grids in total)

    build_report must construct its own test state on each grid so the state
    keeps the same spectral content. The report of the first grid is returned
    with the whole series attached in increasing M order.
    """
    if levels < 1:
        raise ValueError(f"Need at least one refinement level, got {levels}")
    reports = []
    current = grid
    for _ in range(levels):
        reports.append(build_report(current))
        current = current.refined(2)
    series = [
        RefinementPoint(M=r.grid.M, L=r.grid.L, absolute=r.absolute, relative=r.relative)
        for r in reports
    ]
    logger.info(f"[Check] {reports[0].identity} refinement series "
                f"{[f'{p.relative:.3e}' for p in series]}")
    return reports[0].model_copy(update={"refinement": series})
