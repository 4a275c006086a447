"""Chunked continuous-time walks and the anomaly scores built on them.

The scoring loop runs outer steps ``i = 1..t``.  Step ``i`` applies the walk
unitary ``i`` times, split into chunks of at most ``walks`` applications.
Between chunks the state is either handed over intact (``RestartPolicy.EXACT``)
or measured and re-prepared from the measured frequencies with nonnegative
amplitudes (``RestartPolicy.REENCODE``), which is what a depth-limited
device can do.  Row ``i`` of the result is the distribution measured at the
end of step ``i``; the averaged row is the visiting probability and its
entrywise inverse is the anomaly score.

Exact chaining gives ``U^i psi0`` regardless of ``walks``; re-encoding
discards phases and in general does not.
"""

from __future__ import annotations

import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
import scipy.linalg

from .config import RestartPolicy, ScoreReport, StartPolicy, WalkConfig
from .errors import InputError, ResonanceWarning
from .graph import Graph, GeneratorMatrix, hermitian_adjacency
from .spectral import UnitaryOperator, hamiltonian_step

PHASE_TOL = 1e-8


def uniform_state(n: int) -> np.ndarray:
    return np.full(n, 1 / np.sqrt(n), dtype=complex)


def step_rng(seed: int, step: int) -> np.random.Generator:
    """Independent generator for outer step ``step``; identical however steps are scheduled."""
    return np.random.default_rng([seed, step])


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_frequencies(probs: np.ndarray, shots: int, rng=None) -> np.ndarray:
    """Exact probabilities for ``shots == 0``, else multinomial counts / shots."""
    probs = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    probs = probs / probs.sum()
    if shots == 0:
        return probs
    counts = _as_rng(rng).multinomial(shots, probs)
    return counts / shots


def measure_frequencies(psi: np.ndarray, shots: int, rng=None) -> np.ndarray:
    if shots < 0:
        raise InputError("shots must be nonnegative")
    return sample_frequencies(np.abs(np.asarray(psi)) ** 2, shots, rng)


def amplitude_encode(p: np.ndarray) -> np.ndarray:
    """State with nonnegative real amplitudes ``sqrt(p)``."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    amps = np.sqrt(p / p.sum())
    return (amps / np.linalg.norm(amps)).astype(complex)


class MatrixSteps:
    """Memoized ``U^k`` for the chunk sizes a run needs."""

    def __init__(self, u: np.ndarray):
        self._u = u
        self._cache: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def __call__(self, psi: np.ndarray, k: int) -> np.ndarray:
        m = self._cache.get(k)
        if m is None:
            m = np.linalg.matrix_power(self._u, k)
            with self._lock:
                self._cache[k] = m
        return m @ psi


def _chunks(steps: int, walks: int):
    remaining = steps
    while remaining > 0:
        k = min(walks, remaining)
        remaining -= k
        yield k, remaining


def _evolve(psi, steps, cfg: WalkConfig, rng, advance, marginal, encode):
    """Run one outer step; returns the final state and the distribution recorded for it."""
    probs = None
    for k, _ in _chunks(steps, cfg.walks):
        psi = advance(psi, k)
        if cfg.restart is RestartPolicy.REENCODE:
            probs = sample_frequencies(marginal(psi), cfg.shots, rng)
            psi = encode(probs)
    if probs is None:
        probs = sample_frequencies(marginal(psi), cfg.shots, rng)
    return psi, probs


def _squared(psi):
    return np.abs(psi) ** 2


def evolve_chunked(
    U: UnitaryOperator, psi0: np.ndarray, steps: int, cfg: WalkConfig, rng=None
) -> np.ndarray:
    """Apply ``U`` ``steps`` times in chunks of at most ``cfg.walks``.

    Under ``REENCODE`` every chunk ends with a measurement (``cfg.shots``
    samples, or the exact distribution when 0) and a fresh amplitude encoding.
    """
    if steps < 1:
        raise InputError("steps must be >= 1")
    rng = step_rng(cfg.seed, steps) if rng is None else _as_rng(rng)
    psi, _ = _evolve(
        np.asarray(psi0, dtype=complex), steps, cfg, rng, MatrixSteps(U.entries), _squared,
        amplitude_encode,
    )
    return psi


class Trajectory(NamedTuple):
    rows: np.ndarray  # (t, n) recorded distributions
    states: list  # state at the end of every outer step


def run_walk(
    advance: Callable,
    start: np.ndarray,
    cfg: WalkConfig,
    *,
    marginal: Callable = _squared,
    encode: Callable = amplitude_encode,
    workers: int | None = None,
) -> Trajectory:
    """The outer scoring loop, shared by the continuous and coined walks.

    ``advance(psi, k)`` applies ``k`` walk steps, ``marginal`` maps a state to
    the node distribution that gets measured, and ``encode`` prepares a state
    from a node distribution (used for restarts and carried starts).
    """

    def one(i, psi0):
        return _evolve(psi0, i, cfg, step_rng(cfg.seed, i), advance, marginal, encode)

    steps = range(1, cfg.steps + 1)
    if cfg.start is StartPolicy.FRESH:
        if workers and workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda i: one(i, start), steps))
        else:
            results = [one(i, start) for i in steps]
    else:
        results = []
        psi0 = start
        for i in steps:
            psi, probs = one(i, psi0)
            results.append((psi, probs))
            psi0 = encode(probs)
    return Trajectory(np.array([p for _, p in results]), [s for s, _ in results])


def walk_trajectory(B: GeneratorMatrix, cfg: WalkConfig, workers: int | None = None) -> Trajectory:
    U = hamiltonian_step(B, cfg.gamma)
    return run_walk(MatrixSteps(U.entries), uniform_state(U.n), cfg, workers=workers)


def ctqw_anomaly_score(
    B: GeneratorMatrix, cfg: WalkConfig, *, labels=(), workers: int | None = None
) -> ScoreReport:
    """Anomaly scores from the chunked walk generated by ``B``, started uniform."""
    if not isinstance(B, GeneratorMatrix):
        raise InputError("expected a GeneratorMatrix")
    if B.n < 2:
        raise InputError("scoring needs at least two nodes")
    traj = walk_trajectory(B, cfg, workers)
    meta = {}
    if B.kind.alpha is not None:
        meta["alpha"] = [B.kind.alpha.real, B.kind.alpha.imag]
    return ScoreReport.from_probabilities(B.kind.label, traj.rows, cfg, labels, meta)


def asymmetric_anomaly_score(g: Graph, alpha: complex, cfg: WalkConfig, **kwargs) -> ScoreReport:
    """Score a directed graph through its Hermitian adjacency matrix."""
    return ctqw_anomaly_score(hermitian_adjacency(g, alpha), cfg, labels=g.labels, **kwargs)


# ------------------------------------------------------ limiting behaviour


def _cluster_phases(phases: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group indices whose phases agree within ``tol`` on the circle."""
    phases = np.mod(phases, 2 * np.pi)
    order = np.argsort(phases)
    groups = [[order[0]]]
    for a, b in zip(order[:-1], order[1:]):
        if phases[b] - phases[a] <= tol:
            groups[-1].append(b)
        else:
            groups.append([b])
    if len(groups) > 1 and phases[order[0]] + 2 * np.pi - phases[order[-1]] <= tol:
        groups[0] = groups.pop() + groups[0]
    return [np.array(g) for g in groups]


def eigenprojectors(U: UnitaryOperator, tol: float = PHASE_TOL) -> list[np.ndarray]:
    """Orthogonal projectors onto the eigenspaces of ``U``, eigenvalues merged within ``tol``."""
    if U.spectrum is not None:
        vecs = U.spectrum.eigenvectors
        lam = U.spectrum.eigenvalues
        groups = _cluster_phases(-U.gamma * lam, tol)
        for grp in groups:
            if U.gamma * (lam[grp].max() - lam[grp].min()) > np.pi:
                warnings.warn(
                    f"resonance: generator eigenvalues {sorted(set(np.round(lam[grp], 9)))} "
                    f"share one walk phase at gamma={U.gamma!r}",
                    ResonanceWarning,
                    stacklevel=3,
                )
                break
    else:
        # U is normal, so its complex Schur form is diagonal with unitary Schur vectors.
        tri, vecs = scipy.linalg.schur(U.entries, output="complex")
        groups = _cluster_phases(np.angle(np.diag(tri)), tol)
    return [vecs[:, grp] @ vecs[:, grp].conj().T for grp in groups]


def limiting_distribution(U: UnitaryOperator, psi0: np.ndarray) -> np.ndarray:
    """Long-run time average of ``|<j|U^s|psi0>|^2``."""
    psi0 = np.asarray(psi0, dtype=complex)
    pi = sum(np.abs(P @ psi0) ** 2 for P in eigenprojectors(U))
    return pi / np.linalg.norm(psi0) ** 2


def limiting_matrix(U: UnitaryOperator) -> np.ndarray:
    """Column ``k`` is the limiting distribution from basis state ``k``."""
    return sum(np.abs(P) ** 2 for P in eigenprojectors(U))


def running_averages(U: UnitaryOperator, t_max: int) -> np.ndarray:
    """``out[t-1][j, k]`` = mean over ``s < t`` of ``|<j|U^s|k>|^2``."""
    n = U.n
    m = np.eye(n, dtype=complex)
    acc = np.zeros((n, n))
    out = np.empty((t_max, n, n))
    for t in range(1, t_max + 1):
        acc += np.abs(m) ** 2
        out[t - 1] = acc / t
        m = U.entries @ m
    return out


def _settling_time(ok: np.ndarray) -> int | None:
    """Smallest ``t`` (1-based) with ``ok`` true from ``t`` through the end."""
    if not ok[-1]:
        return None
    bad = np.flatnonzero(~ok)
    return 1 if bad.size == 0 else int(bad[-1]) + 2


def estimate_mixing_time(U: UnitaryOperator, eps: float, t_max: int) -> int | None:
    """First time after which every basis start's average stays within ``eps`` in total variation.

    ``None`` when the threshold is not reached by ``t_max``.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    pi = limiting_matrix(U)
    avgs = running_averages(U, t_max)
    tv = 0.5 * np.abs(avgs - pi[None]).sum(axis=1).max(axis=1)
    return _settling_time(tv < eps)


@dataclass(frozen=True)
class SamplingTime:
    time: int | None
    skipped: list  # (start, subset) pairs whose limiting mass is zero


def estimate_sampling_time(
    U: UnitaryOperator, eps: float, subsets, t_max: int
) -> SamplingTime:
    """Like the mixing time, but with relative error on the mass of each listed node set."""
    if not eps > 0:
        raise InputError("eps must be positive")
    n = U.n
    subsets = [sorted(set(int(j) for j in x)) for x in subsets] or [[j] for j in range(n)]
    for x in subsets:
        if not x:
            raise InputError("subsets must be nonempty")
        if x[0] < 0 or x[-1] >= n:
            raise InputError("subset node out of range")
    pi = limiting_matrix(U)
    avgs = running_averages(U, t_max)
    ok = np.ones(t_max, dtype=bool)
    skipped = []
    for x in subsets:
        pi_x = pi[x].sum(axis=0)
        avg_x = avgs[:, x, :].sum(axis=1)
        for k in range(n):
            if pi_x[k] <= 1e-15:
                skipped.append((k, tuple(x)))
                continue
            ok &= np.abs(pi_x[k] - avg_x[:, k]) < eps * pi_x[k]
    return SamplingTime(_settling_time(ok), skipped)
