"""
Clifford representations for the Dirac symbol

Builds n+1 anticommuting self-adjoint N x N matrices (alpha_1..alpha_n, beta)
with N = 2^floor((n+1)/2) by the Pauli tensor recursion, checks the
anticommutation relations exactly and evaluates alpha.p + m*beta.
"""
import json
import logging
from typing import Sequence, Union

import numpy as np
from pydantic import BaseModel

logger = logging.getLogger(__name__)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def representation_size(n: int) -> int:
    return 2 ** ((n + 1) // 2)


class CliffordRep:
    """Immutable set of Clifford generators; index n (0-based) is beta"""

    def __init__(self, n: int, matrices: Sequence[np.ndarray]):
        if n < 1:
            raise ValueError(f"Dimension must be >= 1, got {n}")
        mats = [np.array(m, dtype=complex) for m in matrices]
        if len(mats) != n + 1:
            raise ValueError(f"Expected {n + 1} matrices for n={n}, got {len(mats)}")
        size = representation_size(n)
        for m in mats:
            if m.shape != (size, size):
                raise ValueError(f"Matrix shape {m.shape} does not match N={size}")
            m.setflags(write=False)
        self.n = n
        self.N = size
        self._matrices = tuple(mats)
        stacked = np.stack(mats)
        stacked.setflags(write=False)
        self._stacked = stacked

    @property
    def matrices(self) -> tuple:
        return self._matrices

    @property
    def alphas(self) -> np.ndarray:
        """The n spatial generators stacked as (n, N, N)"""
        return self._stacked[: self.n]

    @property
    def beta(self) -> np.ndarray:
        return self._stacked[self.n]

    def conjugated(self, unitary: np.ndarray) -> "CliffordRep":
        """Equivalent representation U alpha U*"""
        u = np.asarray(unitary, dtype=complex)
        if not np.allclose(u @ u.conj().T, np.eye(self.N), atol=1e-12):
            raise ValueError("Conjugating matrix is not unitary")
        return CliffordRep(self.n, [u @ m @ u.conj().T for m in self._matrices])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "N": self.N,
            "matrices": [
                [[[float(z.real), float(z.imag)] for z in row] for row in m]
                for m in self._matrices
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CliffordRep":
        mats = [
            np.array([[complex(re, im) for re, im in row] for row in m])
            for m in data["matrices"]
        ]
        rep = cls(int(data["n"]), mats)
        if "N" in data and int(data["N"]) != rep.N:
            raise ValueError(f"Declared N={data['N']} does not match matrices (N={rep.N})")
        return rep

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __repr__(self) -> str:
        return f"CliffordRep(n={self.n}, N={self.N})"


def _generators(count: int) -> list:
    """Pauli tensor recursion: an odd count at size 2^k doubles to the next even count"""
    gens = [np.ones((1, 1), dtype=complex)]
    while len(gens) < count:
        if len(gens) % 2 == 1:
            size = gens[0].shape[0]
            gens = [np.kron(g, SIGMA_X) for g in gens] + [np.kron(np.eye(size), SIGMA_Y)]
        else:
            size = gens[0].shape[0] // 2
            gens = gens + [np.kron(np.eye(size), SIGMA_Z)]
    return gens[:count]


def build_clifford(n: int) -> CliffordRep:
    """
    Build the standard representation for spatial dimension n

    Args:
        n: Spatial dimension (>= 1)

    Returns:
        CliffordRep with N = 2^floor((n+1)/2)
    """
    if n < 1:
        raise ValueError(f"Dimension must be >= 1, got {n}")
    return CliffordRep(n, _generators(n + 1))


class CliffordReport(BaseModel):
    n: int
    N: int
    self_adjoint: dict[str, float]
    anticommutators: dict[str, float]
    max_deviation: float
    passed: bool


def verify_clifford(rep: Union[CliffordRep, Sequence[np.ndarray]]) -> CliffordReport:
    """
    Maximum entry deviation of every relation a_j a_k + a_k a_j = 2 delta_jk I

    Accepts a CliffordRep or a bare sequence of matrices. Keys use 1-based
    generator indices, the last index being beta.
    """
    if isinstance(rep, CliffordRep):
        mats, n = list(rep.matrices), rep.n
    else:
        mats = [np.asarray(m, dtype=complex) for m in rep]
        n = len(mats) - 1
    size = mats[0].shape[0]
    ident = np.eye(size)

    anticomm = lambda a, b: a @ b + b @ a
    self_adjoint = {
        str(j + 1): float(np.max(np.abs(m - m.conj().T))) for j, m in enumerate(mats)
    }
    relations = {}
    for j in range(len(mats)):
        for k in range(j, len(mats)):
            target = 2 * ident if j == k else 0 * ident
            relations[f"{j + 1},{k + 1}"] = float(np.max(np.abs(anticomm(mats[j], mats[k]) - target)))

    worst = max(list(self_adjoint.values()) + list(relations.values()))
    report = CliffordReport(
        n=max(n, 0),
        N=size,
        self_adjoint=self_adjoint,
        anticommutators=relations,
        max_deviation=worst,
        passed=worst == 0.0,
    )
    if not report.passed:
        logger.warning(f"[Clifford] Relations violated, max deviation {worst:.3e}")
    return report


def dirac_symbol(rep: CliffordRep, p, m: float = 0.0) -> np.ndarray:
    """
    Evaluate alpha.p + m*beta

    Args:
        rep: Clifford representation
        p: Momentum with trailing axis of length n (any leading shape)
        m: Mass (>= 0)

    Returns:
        Array of shape p.shape[:-1] + (N, N)
    """
    if m < 0:
        raise ValueError(f"Mass must be nonnegative, got {m}")
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != rep.n:
        raise ValueError(f"Momentum has {p.shape[-1]} components, representation expects {rep.n}")
    sym = np.tensordot(p, rep.alphas, axes=([-1], [0]))
    if m:
        sym = sym + m * rep.beta
    return sym


if __name__ == "__main__":
    for dim in range(1, 6):
        r = build_clifford(dim)
        print(r, "passed:", verify_clifford(r).passed)
