"""Comparing score reports and tracing spectra and energies along a walk."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .config import ScoreReport, WalkConfig
from .ctqw import walk_trajectory
from .errors import InputError
from .graph import GeneratorMatrix
from .spectral import eigendecompose

SMOOTH = 1e-12


def _smoothed(p, smooth):
    p = np.maximum(np.asarray(p, dtype=float), smooth)
    return p / p.sum()


def kl_divergence(p, q, smooth: float = SMOOTH) -> float:
    """``sum p log(p/q)`` (natural log) after flooring both at ``smooth`` and renormalizing."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise InputError(f"length mismatch: {p.shape} vs {q.shape}")
    if smooth < 0:
        raise InputError("smooth must be nonnegative")
    p, q = _smoothed(p, smooth), _smoothed(q, smooth)
    mask = p > 0
    with np.errstate(divide="ignore"):
        return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def sym_kl(p, q, smooth: float = SMOOTH) -> float:
    return (kl_divergence(p, q, smooth) + kl_divergence(q, p, smooth)) / 2


@dataclass(frozen=True, eq=False)
class ComparisonTable:
    method_names: tuple[str, ...]
    values: np.ndarray

    def to_dict(self) -> dict:
        return {
            "methods": list(self.method_names),
            "sym_kl": [[float(v) for v in row] for row in self.values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method_a", "method_b", "sym_kl"])
        k = len(self.method_names)
        for a in range(k):
            for b in range(a + 1, k):
                w.writerow([self.method_names[a], self.method_names[b], repr(float(self.values[a, b]))])
        return buf.getvalue()


def comparison_table(
    reports: list[ScoreReport], smooth: float = SMOOTH, names=None
) -> ComparisonTable:
    """Pairwise symmetric KL between the reports' averaged probabilities."""
    if not reports:
        raise InputError("need at least one report")
    n = reports[0].n
    if any(r.n != n for r in reports):
        raise InputError(f"reports cover different node counts: {[r.n for r in reports]}")
    names = tuple(names) if names is not None else tuple(r.generator for r in reports)
    k = len(reports)
    values = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            values[a, b] = values[b, a] = sym_kl(
                reports[a].averaged_probs, reports[b].averaged_probs, smooth
            )
    return ComparisonTable(names, values)


@dataclass(frozen=True, eq=False)
class SpectrumEnergyTrace:
    """Per step ``i``: lowest eigenvalues of ``gamma * i * B`` and ``<psi_i|B|psi_i>``."""

    steps: np.ndarray
    eigenvalues: np.ndarray  # (t, min(5, n)), ascending per row
    energy: np.ndarray
    energy_definition: str = "<psi|B|psi>"
    eigenvalue_definition: str = "lowest eigenvalues of gamma*step*B"

    def to_dict(self) -> dict:
        return {
            "energy_definition": self.energy_definition,
            "eigenvalue_definition": self.eigenvalue_definition,
            "records": [
                {"step": int(s), "eigenvalues": [float(v) for v in ev], "energy": float(e)}
                for s, ev, e in zip(self.steps, self.eigenvalues, self.energy)
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        k = self.eigenvalues.shape[1]
        w.writerow(["step", *[f"eig{j}" for j in range(k)], "energy"])
        for s, ev, e in zip(self.steps, self.eigenvalues, self.energy):
            w.writerow([int(s), *[repr(float(v)) for v in ev], repr(float(e))])
        return buf.getvalue()


def energy(B: GeneratorMatrix, psi: np.ndarray) -> float:
    return float(np.vdot(psi, B.entries @ psi).real)


def spectrum_energy_trace(B: GeneratorMatrix, cfg: WalkConfig, count: int = 5) -> SpectrumEnergyTrace:
    lam = eigendecompose(B).eigenvalues[:count]
    steps = np.arange(1, cfg.steps + 1)
    traj = walk_trajectory(B, cfg)
    return SpectrumEnergyTrace(
        steps,
        cfg.gamma * steps[:, None] * lam[None, :],
        np.array([energy(B, psi) for psi in traj.states]),
    )
