"""Compare walks on a seeded directed graph: Hermitian adjacency for a few
phases alpha, the symmetrized average, and the damped classical baseline.

    python scripts/directed_experiment.py --n 8 --seed 2024
"""

from __future__ import annotations

import argparse

import numpy as np

from qwalk import (
    WalkConfig,
    asymmetric_anomaly_score,
    build_generator,
    classical_anomaly_score,
    comparison_table,
    ctqw_anomaly_score,
)
from qwalk.cli import generate_graph


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--edge-prob", type=float, default=0.35)
    ap.add_argument("--steps", type=int, default=20)
    ap.add_argument("--shots", type=int, default=10000)
    ap.add_argument("--walk-seed", type=int, default=11)
    args = ap.parse_args()

    g, _ = generate_graph(args.n, True, args.edge_prob, args.seed)
    cfg = WalkConfig.sampled(steps=args.steps, walks=args.steps, shots=args.shots, seed=args.walk_seed)
    reports = {}
    for phase in (0.5, 0.25, 0.0):
        alpha = np.exp(1j * np.pi * phase)
        reports[f"alpha=exp({phase:.2f}*pi*i)"] = asymmetric_anomaly_score(g, alpha, cfg)
    reports["symmetrized"] = ctqw_anomaly_score(build_generator(g, "symmetrized-average"), cfg)
    for d in (0.0, 0.1):
        reports[f"classical d={d}"] = classical_anomaly_score(g, damping=d)

    table = comparison_table(list(reports.values()), names=list(reports))
    print(table.to_csv(), end="")
    print("\nnode," + ",".join(reports))
    for j, label in enumerate(g.labels):
        print(label + "," + ",".join(f"{r.scores[j]:.4f}" for r in reports.values()))


if __name__ == "__main__":
    main()
