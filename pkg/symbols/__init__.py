"""
Symbol module for the Dirac LAP bench
Provides the interface and implementations of Fourier-multiplier symbols
"""

from .base import MultiplierSymbol

SYMBOL_NAMES = ["H0", "U0", "B", "Bpow", "K", "invLap", "F", "D", "Rm", "G", "T"]


# Use lazy imports so operators can import the registry without a cycle
def get_symbol(symbol_name: str):
    """Lazy import of symbol classes"""
    if symbol_name == "H0":
        from .library.dirac import DiracSymbol
        return DiracSymbol
    elif symbol_name == "U0":
        from .library.dirac import FreePropagatorSymbol
        return FreePropagatorSymbol
    elif symbol_name == "B":
        from .library.cutoff import CutoffSymbol
        return CutoffSymbol
    elif symbol_name == "Bpow":
        from .library.cutoff import CutoffPowerSymbol
        return CutoffPowerSymbol
    elif symbol_name == "K":
        from .library.cutoff import CommutatorSymbol
        return CommutatorSymbol
    elif symbol_name == "invLap":
        from .library.cutoff import InverseLaplacianSymbol
        return InverseLaplacianSymbol
    elif symbol_name == "F":
        from .library.cutoff import ConjugateCoefficientSymbol
        return ConjugateCoefficientSymbol
    elif symbol_name == "D":
        from .library.regularizer import DerivativeSymbol
        return DerivativeSymbol
    elif symbol_name == "Rm":
        from .library.regularizer import RegularizerSymbol
        return RegularizerSymbol
    elif symbol_name == "G":
        from .library.resolvent import ResolventSymbol
        return ResolventSymbol
    elif symbol_name == "T":
        from .library.resolvent import ShiftedDiracSymbol
        return ShiftedDiracSymbol
    else:
        raise ValueError(f"Unknown symbol: {symbol_name}")

__all__ = ['MultiplierSymbol', 'get_symbol', 'SYMBOL_NAMES']
