"""Hermitian eigendecomposition, walk unitaries by spectral synthesis, and two
numerical bound checks on walk propagators.

Every exponential here goes through ``eigh``: generators are Hermitian by
construction, so ``V diag(exp(-i*theta*lam)) V^dagger`` is unitary up to the
orthonormality of ``V`` rather than up to a truncation error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .graph import Graph, GeneratorMatrix, HERMITIAN_TOL

UNITARY_TOL = 1e-10
BOUND_SLACK = 1e-9


def _hermitian_entries(B) -> np.ndarray:
    if isinstance(B, GeneratorMatrix):
        return B.entries
    m = np.asarray(B, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError("expected a square matrix")
    if m.size and np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise InputError("matrix is not Hermitian")
    return m


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending real eigenvalues; column ``k`` of ``eigenvectors`` pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def synthesize(self, values) -> np.ndarray:
        """``V diag(values) V^dagger``."""
        v = self.eigenvectors
        return (v * np.asarray(values)) @ v.conj().T


def eigendecompose(B) -> EigenSystem:
    vals, vecs = np.linalg.eigh(_hermitian_entries(B))
    return EigenSystem(vals, vecs)


def hermitian_function(B, f) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    es = eigendecompose(B)
    return es.synthesize(f(es.eigenvalues))


def propagator(B, theta: float) -> np.ndarray:
    """``exp(-i * theta * B)``."""
    es = eigendecompose(B)
    return es.synthesize(np.exp(-1j * theta * es.eigenvalues))


def unitarity_defect(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0]), 2))


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    """A walk unitary, optionally remembering the generator spectrum it came from."""

    entries: np.ndarray
    provenance: str = ""
    spectrum: EigenSystem | None = field(default=None, repr=False)
    gamma: float | None = None

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError("operator must be square")
        defect = unitarity_defect(m)
        if defect > UNITARY_TOL:
            raise InputError(f"operator is not unitary (||U^dagger U - I|| = {defect:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def power(self, k: int) -> np.ndarray:
        return np.linalg.matrix_power(self.entries, k)

    @classmethod
    def identity(cls, n: int) -> UnitaryOperator:
        return cls(np.eye(n), provenance="identity")


def hamiltonian_step(B, gamma: float) -> UnitaryOperator:
    """One walk step ``exp(-i * gamma * B)``."""
    if not gamma > 0:
        raise InputError(f"gamma must be positive, got {gamma!r}")
    es = eigendecompose(B)
    u = es.synthesize(np.exp(-1j * gamma * es.eigenvalues))
    label = B.kind.label if isinstance(B, GeneratorMatrix) else "matrix"
    return UnitaryOperator(u, provenance=f"exp(-i*{gamma!r}*{label})", spectrum=es, gamma=gamma)


def operator_norm(m) -> float:
    """Spectral norm (largest singular value)."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0.0
    if np.array_equal(m, m.conj().T):
        return float(np.max(np.abs(np.linalg.eigvalsh(m))))
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    holds: bool
    reading: str = ""

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "reading": self.reading}


def check_gamma_bound(B, gamma0: float, gamma1: float, t: int, eps: float) -> BoundReport:
    """Compare ``||H(gamma0,t) - H(gamma1,t)||`` against ``t (gamma0-gamma1) ||B|| ||H(eps,t)||``.

    ``gamma0 == gamma1`` is accepted (both sides vanish).
    """
    if not (0 < gamma1 <= gamma0 < eps / 2):
        raise InputError(
            f"need 0 < gamma1 <= gamma0 < eps/2, got gamma1={gamma1}, gamma0={gamma0}, eps={eps}"
        )
    if t < 1 or int(t) != t:
        raise InputError("t must be a positive integer")
    es = eigendecompose(B)
    lam = es.eigenvalues
    diff = es.synthesize(np.exp(-1j * gamma0 * t * lam) - np.exp(-1j * gamma1 * t * lam))
    lhs = operator_norm(diff)
    h_eps = es.synthesize(np.exp(-1j * eps * t * lam))
    rhs = t * (gamma0 - gamma1) * operator_norm(_hermitian_entries(B)) * np.linalg.norm(h_eps, 2)
    return BoundReport(lhs, float(rhs), bool(lhs <= rhs + BOUND_SLACK), "spectral-norm")


def check_laplacian_adjacency_bound(g: Graph, gamma: float, t: int) -> BoundReport:
    """How far the Laplacian walk is from the walk generated by ``-A``.

    The ``sin`` term is read as ``sin(gamma t A)`` by spectral synthesis on
    the Hermitian matrix ``gamma t A``; the report's ``reading`` says so.
    """
    if not g.symmetric:
        raise InputError("Laplacian/adjacency bound needs an undirected graph")
    if not gamma > 0 or t < 1:
        raise InputError("need gamma > 0 and t >= 1")
    a = g.weights
    d = np.diag(g.out_degrees())
    theta = gamma * t
    lhs = operator_norm(propagator(d - a, theta) - propagator(-a, theta))
    nd = theta * operator_norm(d)
    na = theta * operator_norm(a)
    sin_term = operator_norm(hermitian_function(theta * a, np.sin))
    rhs = nd * np.exp(nd) * np.exp(na) + 2 * sin_term
    return BoundReport(lhs, float(rhs), bool(lhs <= rhs + BOUND_SLACK), "sin(gamma*t*A) spectral")
