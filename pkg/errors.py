"""
Exception types shared by the verification modules
"""


class OutsideCoreError(ValueError):
    """Raised when a field with a nonzero zero-mode coefficient is passed where the core class is required"""


class ConvergenceError(RuntimeError):
    """Raised when an iterative inverse cannot be trusted (divergent Neumann series, failed Krylov solve)"""
