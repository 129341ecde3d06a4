"""
Base interface for Fourier-multiplier symbols
"""
from abc import ABC, abstractmethod
from typing import Any, Optional

import numpy as np


class MultiplierSymbol(ABC):
    """Base class for momentum-space symbols p -> N x N matrix"""

    # "evaluated": the formula is regular at p = 0; "zero": the value at p = 0 is set to 0
    zero_mode = "evaluated"

    def __init__(self, rep, cutoff=None, **params: Any):
        missing = [name for name in self.get_required_params() if name not in params]
        if missing:
            raise ValueError(f"Missing parameters for {self.get_symbol_name()}: {', '.join(missing)}")
        unknown = [name for name in params if name not in self.get_param_names()]
        if unknown:
            raise ValueError(f"Unknown parameters for {self.get_symbol_name()}: {', '.join(unknown)}")
        self.rep = rep
        self.cutoff = cutoff
        self.params = params

    @abstractmethod
    def evaluate(self, p: np.ndarray) -> np.ndarray:
        """
        Evaluate the symbol

        Args:
            p: Momenta with trailing axis of length n

        Returns:
            Array of shape p.shape[:-1] + (N, N)
        """
        pass

    def adjoint(self) -> Optional["MultiplierSymbol"]:
        """Symbol of the adjoint operator; None means the conjugate transpose of evaluate()"""
        return None

    def evaluate_adjoint(self, p: np.ndarray) -> np.ndarray:
        other = self.adjoint()
        if other is not None:
            return other.evaluate(p)
        return np.conj(np.swapaxes(self.evaluate(p), -1, -2))

    def _scalar(self, values: np.ndarray) -> np.ndarray:
        """Broadcast a scalar symbol to values * I_N"""
        return values[..., None, None] * np.eye(self.rep.N)

    def _radius(self, p: np.ndarray) -> np.ndarray:
        return np.linalg.norm(p, axis=-1)

    def _require_cutoff(self):
        if self.cutoff is None:
            raise ValueError(f"Symbol {self.get_symbol_name()} needs a cutoff function")
        return self.cutoff

    @classmethod
    @abstractmethod
    def get_symbol_name(cls) -> str:
        """Get the registry name of the symbol"""
        pass

    @classmethod
    @abstractmethod
    def get_param_names(cls) -> list[str]:
        """All parameter names, in positional order for composition strings"""
        pass

    @classmethod
    def get_required_params(cls) -> list[str]:
        """Parameters without defaults"""
        return []
