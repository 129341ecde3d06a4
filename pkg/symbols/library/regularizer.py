"""
Derivative and regularizer symbols
"""
import numpy as np

from ..base import MultiplierSymbol


def regularizer(r: np.ndarray, m: float) -> np.ndarray:
    """(1 + r^2/m)^(-1)"""
    return 1.0 / (1.0 + np.asarray(r, dtype=float) ** 2 / m)


class DerivativeSymbol(MultiplierSymbol):
    """P_j = -i d/dx_j, symbol p_j"""

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        j = int(self.params["j"])
        if not 0 <= j < p.shape[-1]:
            raise ValueError(f"Axis index {j} out of range for n={p.shape[-1]}")
        return self._scalar(p[..., j])

    def adjoint(self):
        return self

    @classmethod
    def get_symbol_name(cls) -> str:
        return "D"

    @classmethod
    def get_param_names(cls) -> list[str]:
        return ["j"]

    @classmethod
    def get_required_params(cls) -> list[str]:
        return ["j"]


class RegularizerSymbol(MultiplierSymbol):
    """R_m = (I - Laplacian/m)^(-1), symbol (1 + |p|^2/m)^(-1)"""

    def __init__(self, rep, cutoff=None, **params):
        super().__init__(rep, cutoff, **params)
        if float(self.params["m"]) < 1:
            raise ValueError(f"Regularizer index must be >= 1, got {self.params['m']}")

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        m = float(self.params["m"])
        return self._scalar(regularizer(self._radius(p), m))

    def adjoint(self):
        return self

    @classmethod
    def get_symbol_name(cls) -> str:
        return "Rm"

    @classmethod
    def get_param_names(cls) -> list[str]:
        return ["m"]

    @classmethod
    def get_required_params(cls) -> list[str]:
        return ["m"]
