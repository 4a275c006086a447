"""Coined discrete-time walks on weighted graphs.

The walk lives on position (x) coin.  Every node gets a coin register of size
``d_max``; basis state ``(i, j)`` sits at index ``i * d_max + j`` and, for
``j < d_i``, points along the arc to ``v(i, j)``, the ``j``-th neighbour of
``i`` in ascending index order.  Directions ``j >= d_i`` are dead: the coin
acts as identity there and the shift holds them in place, so they never pick
up amplitude from a state that starts outside them.

Two shifts are offered.  ``"flip-flop"`` sends ``(i, j)`` to ``(v, j')``
where ``j'`` is the slot of ``i`` in ``v``'s list; it is a permutation on any
reversible graph.  ``"moving"`` keeps the coin label, ``(i, j) -> (v(i, j), j)``,
which is a permutation only when the labels form a consistent edge
colouring; otherwise the resulting operator is flagged non-unitary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import ScoreReport, WalkConfig
from .ctqw import MatrixSteps, run_walk
from .errors import InputError, NumericalError
from .graph import Graph
from .spectral import hermitian_function, operator_norm, unitarity_defect

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12
SHIFTS = ("flip-flop", "moving")


def grover_coin(d: int) -> np.ndarray:
    """``2/d J - I``."""
    if d < 1:
        raise InputError("coin dimension must be >= 1")
    return 2.0 / d * np.ones((d, d), dtype=complex) - np.eye(d)


@dataclass(frozen=True)
class CoinedSpace:
    n: int
    d_max: int
    arcs: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, g: Graph) -> CoinedSpace:
        support = g.weights > 0
        if not np.array_equal(support, support.T):
            raise InputError(
                "coined walk needs a reversible graph (every arc paired with its reverse); "
                "score non-reversible digraphs with the Hermitian-adjacency walk instead"
            )
        arcs = tuple(tuple(g.neighbors(i)) for i in range(g.n))
        isolated = [i for i, a in enumerate(arcs) if not a]
        if isolated:
            raise InputError(f"coined walk needs every node to have an edge; isolated: {isolated}")
        return cls(g.n, max(len(a) for a in arcs), arcs)

    @property
    def dim(self) -> int:
        return self.n * self.d_max

    def index(self, i: int, j: int) -> int:
        return i * self.d_max + j


def coin_state(g: Graph, i: int, d_max: int | None = None) -> np.ndarray:
    """``|s_i>``: square roots of ``i``'s edge weights, normalized, zero-padded to ``d_max``."""
    nbrs = g.neighbors(i)
    if not nbrs:
        raise InputError(f"node {i} is isolated")
    d_max = len(nbrs) if d_max is None else d_max
    s = np.zeros(d_max, dtype=complex)
    w = g.weights[i, nbrs]
    s[: len(nbrs)] = np.sqrt(w) / np.sqrt(w.sum())
    return s


def weighted_coin(g: Graph, i: int, d_max: int | None = None) -> np.ndarray:
    """Reflection ``2|s_i><s_i| - 1`` on the live directions, identity on dead ones."""
    s = coin_state(g, i, d_max)
    live = len(g.neighbors(i))
    c = np.eye(len(s), dtype=complex)
    sl = s[:live]
    c[:live, :live] = 2 * np.outer(sl, sl.conj()) - np.eye(live)
    return c


@dataclass(frozen=True, eq=False)
class WalkOperator:
    entries: np.ndarray
    scale: float = 1.0
    unitary: bool = field(init=False)
    hermitian: bool = field(init=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "unitary", unitarity_defect(m) <= UNITARY_TOL)
        herm = float(np.max(np.abs(m - m.conj().T))) <= HERMITIAN_TOL
        object.__setattr__(self, "hermitian", herm)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def shift_operator(space: CoinedSpace, shift: str = "flip-flop") -> np.ndarray:
    if shift not in SHIFTS:
        raise InputError(f"unknown shift {shift!r}; choose from {SHIFTS}")
    s = np.zeros((space.dim, space.dim), dtype=complex)
    for i, nbrs in enumerate(space.arcs):
        for j in range(space.d_max):
            src = space.index(i, j)
            if j >= len(nbrs):
                s[src, src] = 1.0
                continue
            v = nbrs[j]
            jj = space.arcs[v].index(i) if shift == "flip-flop" else j
            s[space.index(v, jj), src] += 1.0
    return s


def coin_operator(g: Graph, space: CoinedSpace) -> np.ndarray:
    c = np.zeros((space.dim, space.dim), dtype=complex)
    d = space.d_max
    for i in range(space.n):
        c[i * d : (i + 1) * d, i * d : (i + 1) * d] = weighted_coin(g, i, d)
    return c


def coined_walk_operator(g: Graph, shift: str = "flip-flop") -> WalkOperator:
    space = CoinedSpace.of(g)
    return WalkOperator(shift_operator(space, shift) @ coin_operator(g, space))


def rescale_contraction(op: WalkOperator) -> WalkOperator:
    """Shrink a Hermitian operator just inside the unit ball so it can be embedded."""
    norm = operator_norm(op.entries)
    if norm == 0:
        return op
    factor = 1.0 / (norm * (1 + 1e-12))
    return WalkOperator(op.entries * factor, scale=op.scale * factor)


def unitarize(op: WalkOperator) -> WalkOperator:
    """Embed a Hermitian contraction ``U`` in ``[[U, R], [R', -U^dagger]]``.

    ``R = sqrt(1 - U U^dagger)`` and ``R' = sqrt(1 - U^dagger U)``.  The sign on
    the lower-right block is what makes the embedding unitary: with ``+U^dagger``
    the off-diagonal blocks of ``M^dagger M`` come out as ``2 U R``.
    """
    if not op.hermitian:
        raise InputError("unitarize needs a Hermitian operator")
    u = op.entries
    if operator_norm(u) > 1 + 1e-12:
        raise InputError("operator norm exceeds 1; rescale first")
    n = u.shape[0]
    eye = np.eye(n)

    def root(m):
        return hermitian_function(m, lambda lam: np.sqrt(np.clip(lam, 0, None)))

    ud = u.conj().T
    top_right = root(eye - u @ ud)
    bottom_left = root(eye - ud @ u)
    return WalkOperator(np.block([[u, top_right], [bottom_left, -ud]]), scale=op.scale)


def postselect(out: np.ndarray) -> tuple[np.ndarray, float]:
    """Project onto the ancilla-0 half; returns the renormalized state and its probability."""
    out = np.asarray(out, dtype=complex)
    if out.ndim != 1 or out.shape[0] % 2:
        raise InputError("post-selection needs a state of even length")
    top = out[: out.shape[0] // 2]
    prob = float(np.vdot(top, top).real)
    if prob <= 0:
        raise NumericalError("post-selection failed: ancilla-0 branch has zero amplitude")
    return top / np.sqrt(prob), prob


class _PostselectedSteps:
    def __init__(self, embedded: np.ndarray):
        self._u = embedded

    def __call__(self, psi, k):
        pad = np.zeros_like(psi)
        for _ in range(k):
            psi, _ = postselect(self._u @ np.concatenate([psi, pad]))
        return psi


def score_walk_operator(
    op: WalkOperator, g: Graph, cfg: WalkConfig, *, workers=None, metadata=None
) -> ScoreReport:
    """Run the scoring loop with a coined operator, measuring positions only.

    A non-unitary Hermitian operator is rescaled, embedded and post-selected
    after every step.
    """
    space = CoinedSpace.of(g)
    if op.dim != space.dim:
        raise InputError(f"operator dimension {op.dim} does not match coined space {space.dim}")
    meta = dict(metadata or {}, coin_start="s_v", unitarized=not op.unitary)
    if op.unitary:
        advance = MatrixSteps(op.entries)
    elif op.hermitian:
        scaled = rescale_contraction(op)
        embedded = unitarize(scaled)
        if not embedded.unitary:
            raise NumericalError("unitarization did not produce a unitary operator")
        advance = _PostselectedSteps(embedded.entries)
        meta["scale"] = scaled.scale
    else:
        raise NumericalError("walk operator is neither unitary nor Hermitian; cannot unitarize")

    coins = np.array([coin_state(g, i, space.d_max) for i in range(space.n)])

    def marginal(psi):
        return (np.abs(psi.reshape(space.n, space.d_max)) ** 2).sum(axis=1)

    def encode(p):
        p = np.clip(np.asarray(p, dtype=float), 0, None)
        return (np.sqrt(p / p.sum())[:, None] * coins).ravel()

    start = encode(np.full(space.n, 1 / space.n))
    traj = run_walk(advance, start, cfg, marginal=marginal, encode=encode, workers=workers)
    return ScoreReport.from_probabilities("coined-dtqw", traj.rows, cfg, g.labels, meta)


def dtqw_anomaly_score(
    g: Graph, cfg: WalkConfig, *, shift: str = "flip-flop", workers=None
) -> ScoreReport:
    op = coined_walk_operator(g, shift)
    return score_walk_operator(op, g, cfg, workers=workers, metadata={"shift": shift})
