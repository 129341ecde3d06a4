import os
import csv
import json
import time
import logging
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

logger = logging.getLogger(__name__)

TOOLKIT_NAME = "dirac-lap-bench"
TOOLKIT_VERSION = "0.1.0"

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 500


class NormEstimate(BaseModel):
    """Largest singular value of S from a Lanczos solve on S*S"""
    estimate: float
    iterations: int
    converged: bool
    rayleigh_imag: float = 0.0


def lanczos_norm(
    apply_normal: Callable[[np.ndarray], np.ndarray],
    shape: Sequence[int],
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    label: str = "",
) -> NormEstimate:
    """
    Largest singular value of S from ARPACK's implicitly restarted Lanczos on S*S

    Args:
        apply_normal: v -> S*(S v) on complex arrays of the given shape
        shape: Array shape of the operator's argument
        seed: Seed of the random complex starting vector
        tol: Relative accuracy of the top Ritz value
        max_iter: Cap on Lanczos restarts; the best Ritz value is returned flagged when hit

    Returns:
        NormEstimate with estimate = sqrt of the top eigenvalue of S*S and
        iterations = number of applications of S*S
    """
    shape = tuple(shape)
    size = int(np.prod(shape))
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    v0 /= np.linalg.norm(v0)
    calls = 0

    def matvec(x: np.ndarray) -> np.ndarray:
        nonlocal calls
        calls += 1
        return np.asarray(apply_normal(np.asarray(x).reshape(shape)), dtype=complex).reshape(-1)

    start_time = time.time()
    if np.linalg.norm(matvec(v0)) == 0.0:
        return NormEstimate(estimate=0.0, iterations=calls, converged=True)

    converged = True
    if size < 3:
        dense = np.column_stack([matvec(column) for column in np.eye(size, dtype=complex)])
        values, vectors = np.linalg.eigh((dense + dense.conj().T) / 2)
    else:
        operator = LinearOperator((size, size), matvec=matvec, rmatvec=matvec, dtype=complex)
        try:
            values, vectors = eigsh(operator, k=1, which="LA", v0=v0, tol=tol, maxiter=max_iter)
        except ArpackNoConvergence as e:
            converged = False
            values, vectors = e.eigenvalues, e.eigenvectors
            if len(values) == 0:
                values, vectors = np.array([np.vdot(v0, matvec(v0))]), v0[:, None]

    top = int(np.argmax(np.real(values)))
    vector = vectors[:, top] / np.linalg.norm(vectors[:, top])
    rayleigh = np.vdot(vector, matvec(vector))
    estimate = float(np.sqrt(max(float(np.real(values[top])), 0.0)))
    if not converged:
        logger.warning(f"[Lanczos] {label} did not converge in {max_iter} restarts (estimate {estimate:.6g})")
    else:
        logger.debug(f"[Lanczos] {label} converged after {calls} products in {time.time() - start_time:.2f}s")
    return NormEstimate(estimate=estimate, iterations=calls, converged=converged,
                        rayleigh_imag=float(abs(rayleigh.imag)))


def loglog_slope(x: Iterable[float], y: Iterable[float]) -> float:
    """Least-squares slope of log y against log x"""
    x, y = np.asarray(list(x), dtype=float), np.asarray(list(y), dtype=float)
    if x.size < 2:
        raise ValueError("Need at least two points to fit a growth exponent")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def parse_float_list(text: str) -> list[float]:
    """'1,0.5,0.25' -> [1.0, 0.5, 0.25]"""
    items = [item.strip() for item in str(text).split(",") if item.strip()]
    return [float(item) for item in items]


def parse_range(text: str) -> list[float]:
    """'a:b:k' -> k evenly spaced points from a to b; plain lists are passed through"""
    if ":" not in str(text):
        return parse_float_list(text)
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ValueError(f"Range must look like a:b:k, got {text!r}")
    a, b, k = float(parts[0]), float(parts[1]), int(parts[2])
    if k < 0:
        raise ValueError(f"Point count must be nonnegative, got {k}")
    return [float(v) for v in np.linspace(a, b, k)]


def output_dir(override: Optional[str] = None) -> str:
    path = override or os.getenv("DIRAC_LAP_OUTPUT_DIR", "runs")
    os.makedirs(path, exist_ok=True)
    return path


def write_json(path: str, payload) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
    logger.info(f"[Artifact] Wrote {path}")
    return path


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    logger.info(f"[Artifact] Wrote {path}")
    return path


def toolkit_stamp() -> dict:
    return {"toolkit": TOOLKIT_NAME, "version": TOOLKIT_VERSION}
