"""Classical random-walk baselines: Markov and maximal-entropy transitions and a
damped power-iteration anomaly scorer."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import ScoreReport, inverse_scores
from .errors import InputError
from .graph import Graph, principal_eigenpair


class TransitionKind(str, Enum):
    PLAIN = "plain"
    MERW = "merw"


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic; ``entries[i, j]`` is the probability of stepping ``i -> j``."""

    entries: np.ndarray
    kind: TransitionKind = TransitionKind.PLAIN


def transition_matrix(g: Graph) -> TransitionMatrix:
    deg = g.out_degrees()
    dangling = np.flatnonzero(deg <= 0)
    if dangling.size:
        raise InputError(f"nodes without outgoing edges: {dangling.tolist()}")
    return TransitionMatrix(g.weights / deg[:, None])


def merw_transition(g: Graph) -> TransitionMatrix:
    """``p_ij = a_ij xi_j / (chi xi_i)`` from the principal eigenpair of ``A``."""
    chi, xi = principal_eigenpair(g)
    if chi <= 0:
        raise InputError("maximal-entropy walk needs at least one edge")
    p = g.weights * xi[None, :] / (chi * xi[:, None])
    return TransitionMatrix(p, TransitionKind.MERW)


def damped_step(pi: np.ndarray, p: np.ndarray, damping: float) -> np.ndarray:
    v = damping / len(pi) + (1 - damping) * (p.T @ pi)
    return v / np.abs(v).sum()


def classical_anomaly_score(
    g: Graph, damping: float = 0.0, tol: float = 0.05, max_iter: int = 10000
) -> ScoreReport:
    """Inverse of the damped power-iteration fixed point of ``A D^-1``.

    Iteration starts uniform and stops when successive iterates differ by less
    than ``tol`` in L1.  Running out of iterations is recorded in the report,
    not raised.
    """
    if not 0 <= damping <= 1:
        raise InputError("damping must lie in [0, 1]")
    if not tol > 0:
        raise InputError("tol must be positive")
    if max_iter < 1:
        raise InputError("max_iter must be >= 1")
    p = transition_matrix(g).entries
    n = g.n
    pi = np.full(n, 1 / n)
    converged = False
    iterations = 0
    while iterations < max_iter:
        nxt = damped_step(pi, p, damping)
        iterations += 1
        delta = np.abs(nxt - pi).sum()
        pi = nxt
        if delta < tol:
            converged = True
            break
    meta = {
        "damping": damping,
        "tol": tol,
        "iterations": iterations,
        "converged": converged,
    }
    return ScoreReport("classical", pi, inverse_scores(pi), np.empty((0, n)), None, g.labels, meta)
