"""Manager contact networks: validation, connectivity, leading eigenpairs,
hearing matrices, and diffusion centrality.

The network is a dense n-by-n matrix w with entries in [0, 1]; w[i, j] is the
relative probability that manager i speaks to manager j.  Centrality over a
horizon T sums the walk counts of length 1..T, so it is computed by repeated
multiply-accumulate rather than through an eigendecomposition: that stays
exact on non-diagonalizable matrices and T is small in practice.

All operations are pure functions over immutable inputs and are safe to call
concurrently.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    EntryRangeError,
    HorizonError,
    ZeroMatrixError,
)

__all__ = [
    "ManagerNetwork",
    "EigenPair",
    "CentralityReport",
    "validate_network",
    "strongly_connected",
    "leading_eigenpair",
    "hearing_matrix",
    "diffusion_centrality",
    "centrality_report",
    "generate_random_network",
    "read_network_csv",
    "write_network_csv",
]

# Consecutive iterations without residual improvement before the power
# iteration is declared stalled (periodic / non-primitive input).
_STALL_LIMIT = 50


@dataclass(frozen=True)
class ManagerNetwork:
    """Validated weighted directed contact network over ``n`` managers.

    Diagonal self-weights are accepted by validation (their meaning is
    self-communication) but the random generator always zeroes them.
    """

    n: int
    w: np.ndarray


@dataclass(frozen=True)
class EigenPair:
    """Leading eigenvalue and unit-1-norm nonnegative eigenvector."""

    eigenvalue: float
    eigenvector: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True)
class CentralityReport:
    """Hearing matrix over horizon ``T`` plus its row sums (centrality)."""

    T: int
    hearing: np.ndarray
    centrality: np.ndarray


def validate_network(raw) -> ManagerNetwork:
    """Validate a square matrix of contact weights and freeze it.

    Raises DimensionError for non-square or empty input and EntryRangeError
    for entries outside [0, 1] or non-finite values.
    """
    try:
        w = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise EntryRangeError(f"network entries must be real numbers: {exc}") from None
    if w.ndim != 2:
        raise DimensionError(f"network must be a 2-d matrix, got ndim={w.ndim}")
    if w.shape[0] != w.shape[1]:
        raise DimensionError(f"network must be square, got shape {w.shape}")
    if w.shape[0] < 1:
        raise DimensionError("network needs at least one node")
    bad = ~np.isfinite(w) | (w < 0.0) | (w > 1.0)
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        raise EntryRangeError(
            f"entry w[{i},{j}]={w[i, j]!r} outside [0, 1] or non-finite"
        )
    w.setflags(write=False)
    return ManagerNetwork(n=w.shape[0], w=w)


def strongly_connected(net: ManagerNetwork) -> bool:
    """True iff every node reaches every other along positive-weight edges.

    Uses one forward and one backward reachability sweep from node 0.
    """
    adj = net.w > 0.0
    return _reaches_all(adj, 0) and _reaches_all(adj.T, 0)


def _reaches_all(adj: np.ndarray, start: int) -> bool:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        i = stack.pop()
        for j in np.nonzero(adj[i] & ~seen)[0]:
            seen[j] = True
            stack.append(int(j))
    return bool(seen.all())


def leading_eigenpair(net: ManagerNetwork, tol: float = 1e-10,
                      max_iter: int = 10000) -> EigenPair:
    """Leading eigenpair by power iteration from the uniform vector.

    The all-ones start (scaled to unit 1-norm) is nonnegative, which
    guarantees convergence to the Perron pair for primitive matrices.  The
    iterate stays nonnegative exactly, and is renormalized to unit 1-norm
    each sweep.  Periodic matrices oscillate instead of converging; that is
    detected as a residual that stops improving and reported as
    ConvergenceError carrying the best iterate seen.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w = net.w
    if not w.any():
        raise ZeroMatrixError("leading eigenpair undefined for the zero matrix")
    v = np.full(net.n, 1.0 / net.n)
    best_residual = np.inf
    best = None
    stale = 0
    for k in range(1, max_iter + 1):
        wv = w @ v
        lam = float(wv.sum())  # 1-norm of a nonnegative vector
        residual = float(np.max(np.abs(wv - lam * v)))
        if residual < best_residual:
            best_residual = residual
            best = (lam, v, k)
            stale = 0
        else:
            stale += 1
        if residual <= tol:
            return EigenPair(eigenvalue=lam, eigenvector=v,
                             iterations=k, residual=residual)
        if stale >= _STALL_LIMIT:
            lam_b, v_b, k_b = best
            raise ConvergenceError(
                f"power iteration stalled after {k} sweeps "
                f"(best residual {best_residual:.3e}); "
                "the matrix may be periodic (non-primitive)",
                eigenvalue=lam_b, eigenvector=v_b,
                residual=best_residual, iterations=k_b)
        v = wv / lam
    lam_b, v_b, k_b = best
    raise ConvergenceError(
        f"power iteration did not reach tol={tol:g} within {max_iter} sweeps "
        f"(best residual {best_residual:.3e})",
        eigenvalue=lam_b, eigenvector=v_b,
        residual=best_residual, iterations=k_b)


def hearing_matrix(net: ManagerNetwork, T: int) -> np.ndarray:
    """Sum of the walk-count matrices w^t for t = 1..T.

    Entry (i, j) is the expected number of times, within T periods, that
    manager j hears an item originating from manager i.  Computed by
    repeated multiply-accumulate; raises the builtin OverflowError with the
    failing term index if an entry leaves the finite float range.
    """
    if int(T) != T or T < 1:
        raise HorizonError(f"horizon must be an integer >= 1, got {T!r}")
    w = net.w
    power = w.copy()
    total = w.copy()
    with np.errstate(over="ignore"):
        for t in range(2, int(T) + 1):
            power = power @ w
            if not np.isfinite(power).all():
                raise OverflowError(
                    f"hearing matrix left the finite float range at term t={t}")
            total += power
    return total


def diffusion_centrality(net: ManagerNetwork, T: int) -> np.ndarray:
    """Row sums of the hearing matrix: expected total hearings per source."""
    return hearing_matrix(net, T).sum(axis=1)


def centrality_report(net: ManagerNetwork, T: int) -> CentralityReport:
    """Hearing matrix and its row sums bundled together."""
    hearing = hearing_matrix(net, T)
    return CentralityReport(T=int(T), hearing=hearing,
                            centrality=hearing.sum(axis=1))


def generate_random_network(n: int, density: float, seed: int) -> ManagerNetwork:
    """Random network: each off-diagonal entry is independently nonzero with
    probability ``density``, with weight uniform on (0, 1].  The diagonal is
    zero.  Deterministic for fixed (n, density, seed)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    gate = rng.random((n, n))
    weights = 1.0 - rng.random((n, n))  # uniform on (0, 1]
    w = np.where(gate < density, weights, 0.0)
    np.fill_diagonal(w, 0.0)
    return validate_network(w)


def read_network_csv(path) -> ManagerNetwork:
    """Read a headerless n-by-n CSV weight matrix; rejects ragged rows."""
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise EntryRangeError(f"line {lineno}: {exc}") from None
            if len(rows[-1]) != len(rows[0]):
                raise DimensionError(
                    f"line {lineno}: ragged row of width {len(rows[-1])}, "
                    f"expected {len(rows[0])}")
    return validate_network(rows)


def write_network_csv(path, net: ManagerNetwork) -> None:
    """Write a network as headerless CSV with round-trip float precision."""
    lines = [",".join(repr(float(x)) for x in row) for row in net.w]
    Path(path).write_text("\n".join(lines) + "\n")
