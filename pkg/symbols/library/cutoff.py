"""
Symbols built from the cutoff eta(p) = h(|p|)
"""
import numpy as np

from clifford import dirac_symbol
from ..base import MultiplierSymbol


def _safe_inverse(r: np.ndarray, power: float) -> np.ndarray:
    """r^(-power) with the value at r = 0 set to 0"""
    return np.where(r > 0, np.where(r > 0, r, 1.0) ** (-power), 0.0)


class CutoffSymbol(MultiplierSymbol):
    """B = eta(-i grad)"""

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        return self._scalar(self._require_cutoff().eta(p))

    def adjoint(self):
        return self

    @classmethod
    def get_symbol_name(cls) -> str:
        return "B"

    @classmethod
    def get_param_names(cls) -> list[str]:
        return []


class CutoffPowerSymbol(MultiplierSymbol):
    """B^s; for s < 0 the modes where eta vanishes are set to 0"""
    zero_mode = "zero"

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        power = float(self.params["power"])
        eta = self._require_cutoff().eta(p)
        if power >= 0:
            return self._scalar(eta ** power)
        return self._scalar(_safe_inverse(eta, -power))

    def adjoint(self):
        return self

    @classmethod
    def get_symbol_name(cls) -> str:
        return "Bpow"

    @classmethod
    def get_param_names(cls) -> list[str]:
        return ["power"]

    @classmethod
    def get_required_params(cls) -> list[str]:
        return ["power"]


class CommutatorSymbol(MultiplierSymbol):
    """K(p) = -(alpha.p) |p|^(-1) h'(|p|), so that i[B, A] = K B"""
    zero_mode = "zero"

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        r = self._radius(p)
        slope = self._require_cutoff().dh(r)
        factor = -slope * _safe_inverse(r, 1.0)
        return factor[..., None, None] * dirac_symbol(self.rep, p)

    def adjoint(self):
        return self

    @classmethod
    def get_symbol_name(cls) -> str:
        return "K"

    @classmethod
    def get_param_names(cls) -> list[str]:
        return []


class InverseLaplacianSymbol(MultiplierSymbol):
    """(-Laplacian)^(-1) = |p|^(-2)"""
    zero_mode = "zero"

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        return self._scalar(_safe_inverse(self._radius(p), 2.0))

    def adjoint(self):
        return self

    @classmethod
    def get_symbol_name(cls) -> str:
        return "invLap"

    @classmethod
    def get_param_names(cls) -> list[str]:
        return []


class ConjugateCoefficientSymbol(MultiplierSymbol):
    """F_j(p) = (alpha.p) p_j eta(p) / (2 |p|^2)"""
    zero_mode = "zero"

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        j = int(self.params["j"])
        if not 0 <= j < self.rep.n:
            raise ValueError(f"Axis index {j} out of range for n={self.rep.n}")
        r = self._radius(p)
        factor = 0.5 * p[..., j] * self._require_cutoff().eta(p) * _safe_inverse(r, 2.0)
        return factor[..., None, None] * dirac_symbol(self.rep, p)

    def adjoint(self):
        return self

    @classmethod
    def get_symbol_name(cls) -> str:
        return "F"

    @classmethod
    def get_param_names(cls) -> list[str]:
        return ["j"]

    @classmethod
    def get_required_params(cls) -> list[str]:
        return ["j"]
