"""
Free Dirac symbol and its propagator
"""
import numpy as np

from clifford import dirac_symbol
from ..base import MultiplierSymbol


class DiracSymbol(MultiplierSymbol):
    """alpha.p + m*beta"""

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        return dirac_symbol(self.rep, p, self.params.get("mass", 0.0))

    def adjoint(self):
        return self

    @classmethod
    def get_symbol_name(cls) -> str:
        return "H0"

    @classmethod
    def get_param_names(cls) -> list[str]:
        return ["mass"]


class FreePropagatorSymbol(MultiplierSymbol):
    """exp(-i t (alpha.p + m*beta)) = cos(wt) I - i sin(wt)/w (alpha.p + m*beta), w = (|p|^2+m^2)^(1/2)"""

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        t = float(self.params["t"])
        mass = float(self.params.get("mass", 0.0))
        omega = np.sqrt(self._radius(p) ** 2 + mass ** 2)
        # sin(wt)/w, finite at w = 0
        sinc = t * np.sinc(omega * t / np.pi)
        return self._scalar(np.cos(omega * t)) - 1j * sinc[..., None, None] * dirac_symbol(self.rep, p, mass)

    def adjoint(self):
        return FreePropagatorSymbol(self.rep, self.cutoff, t=-float(self.params["t"]), mass=self.params.get("mass", 0.0))

    @classmethod
    def get_symbol_name(cls) -> str:
        return "U0"

    @classmethod
    def get_param_names(cls) -> list[str]:
        return ["t", "mass"]

    @classmethod
    def get_required_params(cls) -> list[str]:
        return ["t"]
