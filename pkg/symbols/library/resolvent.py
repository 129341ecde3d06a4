"""
T = H0 - (lam +- i mu) -+ i eps B and its inverse G, mode by mode
"""
import numpy as np

from clifford import dirac_symbol
from ..base import MultiplierSymbol


class _ShiftedBase(MultiplierSymbol):

    def __init__(self, rep, cutoff=None, **params):
        super().__init__(rep, cutoff, **params)
        mu = float(self.params["mu"])
        eps = float(self.params.get("eps", 0.0))
        sign = int(self.params.get("sign", 1))
        if mu <= 0:
            raise ValueError(f"mu must be positive, got {mu}")
        if not 0 <= eps < 1:
            raise ValueError(f"eps must lie in [0, 1), got {eps}")
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        if float(self.params.get("mass", 0.0)) < 0:
            raise ValueError(f"Mass must be nonnegative, got {self.params['mass']}")

    def _shift(self, p: np.ndarray) -> np.ndarray:
        """w(p) = lam +- i (mu + eps eta(p))"""
        lam = float(self.params["lam"])
        mu = float(self.params["mu"])
        eps = float(self.params.get("eps", 0.0))
        sign = int(self.params.get("sign", 1))
        damping = mu + (eps * self._require_cutoff().eta(p) if eps else 0.0)
        return lam + sign * 1j * damping * np.ones(p.shape[:-1])

    def _flipped(self):
        params = dict(self.params)
        params["sign"] = -int(self.params.get("sign", 1))
        return type(self)(self.rep, self.cutoff, **params)

    def adjoint(self):
        return self._flipped()

    @classmethod
    def get_param_names(cls) -> list[str]:
        return ["lam", "mu", "eps", "sign", "mass"]

    @classmethod
    def get_required_params(cls) -> list[str]:
        return ["lam", "mu"]


class ShiftedDiracSymbol(_ShiftedBase):
    """T(p) = alpha.p + m beta - w(p) I"""

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        mass = float(self.params.get("mass", 0.0))
        return dirac_symbol(self.rep, p, mass) - self._scalar(self._shift(p))

    @classmethod
    def get_symbol_name(cls) -> str:
        return "T"


class ResolventSymbol(_ShiftedBase):
    """G(p) = (alpha.p + m beta + w I) / (|p|^2 + m^2 - w^2); Im w != 0 keeps it regular"""

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        mass = float(self.params.get("mass", 0.0))
        w = self._shift(p)
        denominator = self._radius(p) ** 2 + mass ** 2 - w ** 2
        numerator = dirac_symbol(self.rep, p, mass) + self._scalar(w)
        return numerator / denominator[..., None, None]

    @classmethod
    def get_symbol_name(cls) -> str:
        return "G"
