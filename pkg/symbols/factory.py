"""
Factory for creating symbol instances
"""
import logging

from .base import MultiplierSymbol
from . import get_symbol, SYMBOL_NAMES

logger = logging.getLogger(__name__)


class SymbolFactory:
    """Factory for creating multiplier symbols"""

    @classmethod
    def get_symbol(cls, symbol_name: str, rep, cutoff=None, *args, **params) -> MultiplierSymbol:
        """
        Get a symbol instance

        Args:
            symbol_name: Registry name of the symbol
            rep: Clifford representation
            cutoff: Cutoff function, for symbols built from eta
            *args: Parameters in the order of get_param_names()
            **params: Named parameters

        Returns:
            MultiplierSymbol instance

        Raises:
            ValueError: If the symbol is unknown or its parameters are wrong
        """
        try:
            symbol_class = get_symbol(symbol_name)

            names = symbol_class.get_param_names()
            if len(args) > len(names):
                raise ValueError(f"{symbol_name} takes at most {len(names)} parameters, got {len(args)}")
            for name, value in zip(names, args):
                if name in params:
                    raise ValueError(f"Parameter {name} given twice")
                params[name] = value

            return symbol_class(rep, cutoff, **params)

        except Exception as e:
            raise ValueError(f"Failed to get symbol '{symbol_name}': {str(e)}")

    @classmethod
    def get_available_symbols(cls) -> list[str]:
        """Get list of registered symbol names"""
        return list(SYMBOL_NAMES)
