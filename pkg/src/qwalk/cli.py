"""``qwalk`` command line: generate graphs, score them, compare and diagnose runs.

Exit codes: 0 success, 2 input error, 3 numerical failure.  Errors are also
written to stderr as one JSON object.  Every JSON output is deterministic for
fixed inputs; when ``--out`` is given a run manifest is written next to it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import warnings

import numpy as np

from . import __version__
from .analysis import comparison_table, spectrum_energy_trace
from .classical import classical_anomaly_score
from .config import DEFAULT_GAMMA, DEFAULT_SHOTS, DEFAULT_STEPS, DEFAULT_WALKS, ScoreReport, WalkConfig
from .ctqw import (
    ctqw_anomaly_score,
    estimate_mixing_time,
    estimate_sampling_time,
    limiting_distribution,
    limiting_matrix,
    uniform_state,
)
from .dtqw import SHIFTS, dtqw_anomaly_score
from .errors import InputError, NumericalError, ResonanceWarning
from .graph import (
    ADJACENCY,
    LAPLACIAN,
    MEA,
    Graph,
    GeneratorKind,
    build_generator,
    dump_graph,
    load_graph,
    symmetrized_average,
)
from .spectral import check_gamma_bound, check_laplacian_adjacency_bound, hamiltonian_step

METHODS = ("ctqw-adjacency", "ctqw-laplacian", "ctqw-mea", "ctqw-hermadj", "dtqw", "classical")
CTQW_METHODS = METHODS[:4]


def _default_seed() -> int:
    raw = os.environ.get("QWALK_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"QWALK_SEED must be an integer, got {raw!r}") from None


# ----------------------------------------------------------------- helpers


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph_arg(args) -> tuple[Graph, str]:
    raw = _read_bytes(args.graph)
    fmt = "edge-list-csv" if args.graph.endswith((".csv", ".txt")) else "graph-json"
    g = load_graph(raw.decode("utf-8"), fmt, directed=args.directed)
    return g, hashlib.sha256(raw).hexdigest()


def _walk_config(args) -> WalkConfig:
    return WalkConfig(
        gamma=args.gamma,
        steps=args.steps,
        walks=args.walks,
        shots=0 if args.exact else args.shots,
        seed=args.seed,
        start=args.start,
        restart=args.restart,
    )


def _generator(g: Graph, args):
    method = args.method
    if method == "ctqw-adjacency":
        if getattr(args, "symmetrize", False):
            return symmetrized_average(g)
        if not g.symmetric:
            raise InputError(
                "ctqw-adjacency needs an undirected graph; use --method ctqw-hermadj for "
                "directed graphs (or --symmetrize to average reciprocal weights)"
            )
        return build_generator(g, ADJACENCY)
    if method == "ctqw-laplacian":
        return build_generator(g, LAPLACIAN)
    if method == "ctqw-mea":
        return build_generator(g, MEA)
    if method == "ctqw-hermadj":
        alpha = complex(args.alpha_imag[0], args.alpha_imag[1])
        return build_generator(g, GeneratorKind.hermitian(alpha))
    raise InputError(f"method {method} has no continuous-time generator")


def _emit(args, text: str, manifest: dict):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    target = args.manifest or (args.out + ".manifest.json" if args.out else None)
    if target:
        manifest = dict(manifest, tool_version=__version__)
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _manifest(args, config: dict, digest, argv) -> dict:
    return {
        "command": args.command,
        "argv": list(argv),
        "config": config,
        "input_digest": digest,
        "seed": getattr(args, "seed", None),
    }


# ---------------------------------------------------------------- commands


def generate_graph(n: int, directed: bool, edge_probability: float, seed: int, max_attempts: int = 1000):
    """Seeded random topology with uniform(0, 1) weights, redrawn until connected.

    Undirected graphs must be connected, directed ones strongly connected.
    Returns the graph and the number of draws used.
    """
    if n < 2:
        raise InputError("n must be >= 2")
    if not 0 < edge_probability <= 1:
        raise InputError("edge probability must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    tiny = np.nextafter(0.0, 1.0)
    for attempt in range(1, max_attempts + 1):
        present = rng.random((n, n)) < edge_probability
        weights = rng.uniform(tiny, 1.0, size=(n, n))
        w = np.where(present, weights, 0.0)
        np.fill_diagonal(w, 0.0)
        if not directed:
            w = np.triu(w, 1)
            w = w + w.T
        g = Graph(w, directed=directed)
        if g.is_strongly_connected() if directed else g.is_connected():
            return g, attempt
    raise InputError(f"no connected graph after {max_attempts} draws; raise --edge-prob")


def cmd_gen_graph(args, argv):
    g, attempts = generate_graph(args.n, args.directed, args.edge_prob, args.seed, args.max_attempts)
    print(f"gen-graph: connected draw after {attempts} attempt(s)", file=sys.stderr)
    config = {"n": args.n, "directed": args.directed, "edge_probability": args.edge_prob,
              "attempts": attempts}
    _emit(args, dump_graph(g), _manifest(args, config, None, argv))


def score_graph(g: Graph, args) -> ScoreReport:
    """Dispatch one scoring method on ``g`` with CLI-style arguments."""
    if args.pad_pow2 and args.method not in CTQW_METHODS:
        raise InputError("--pad-pow2 applies only to the continuous-time methods")
    target = g.padded_pow2() if args.pad_pow2 else g
    if args.method == "classical":
        report = classical_anomaly_score(target, args.damping, args.tol, args.max_iter)
        if not report.metadata["converged"]:
            print("classical: did not converge within --max-iter", file=sys.stderr)
    elif args.method == "dtqw":
        report = dtqw_anomaly_score(target, _walk_config(args), shift=args.shift, workers=args.workers)
    else:
        report = ctqw_anomaly_score(
            _generator(target, args), _walk_config(args), labels=target.labels, workers=args.workers
        )
    return report.restricted(g.n)


def _resolved_config(args) -> dict:
    if args.method == "classical":
        return {"method": args.method, "damping": args.damping, "tol": args.tol,
                "max_iter": args.max_iter, "pad_pow2": args.pad_pow2}
    cfg = dict(_walk_config(args).to_dict(), method=args.method, pad_pow2=args.pad_pow2)
    if args.method == "ctqw-hermadj":
        cfg["alpha"] = list(args.alpha_imag)
    if args.method == "dtqw":
        cfg["shift"] = args.shift
    if args.method == "ctqw-adjacency":
        cfg["symmetrize"] = args.symmetrize
    return cfg


def cmd_score(args, argv):
    g, digest = _load_graph_arg(args)
    report = score_graph(g, args)
    _emit(args, report.to_json(), _manifest(args, _resolved_config(args), digest, argv))


def cmd_compare(args, argv):
    if len(args.reports) < 2:
        raise InputError("compare needs at least two reports")
    raws = [_read_bytes(p) for p in args.reports]
    reports = [ScoreReport.from_json(r.decode("utf-8")) for r in raws]
    names = args.names.split(",") if args.names else [os.path.basename(p) for p in args.reports]
    if len(names) != len(reports):
        raise InputError("--names must give one name per report")
    table = comparison_table(reports, args.smooth, names)
    if args.format == "csv":
        text = table.to_csv()
    else:
        labels = reports[0].labels or tuple(str(i) for i in range(reports[0].n))
        nodes = [
            {"label": lab, **{nm: ("inf" if np.isinf(r.scores[i]) else float(r.scores[i]))
                              for nm, r in zip(names, reports)}}
            for i, lab in enumerate(labels)
        ]
        text = json.dumps({"table": table.to_dict(), "scores": nodes}) + "\n"
    digests = [hashlib.sha256(r).hexdigest() for r in raws]
    _emit(args, text, _manifest(args, {"smooth": args.smooth, "names": names}, digests, argv))


def cmd_diagnose(args, argv):
    g, digest = _load_graph_arg(args)
    B = _generator(g, args)
    cfg = _walk_config(args)
    trace = spectrum_energy_trace(B, cfg)
    gamma0 = args.gamma0 if args.gamma0 is not None else cfg.gamma
    gamma1 = args.gamma1 if args.gamma1 is not None else cfg.gamma / 2
    eps = args.epsilon if args.epsilon is not None else 4 * cfg.gamma
    bound_t = args.bound_steps or cfg.steps
    out = {
        "generator": B.kind.label,
        "trace": trace.to_dict(),
        "gamma_bound": check_gamma_bound(B, gamma0, gamma1, bound_t, eps).to_dict(),
        "laplacian_adjacency_bound": (
            check_laplacian_adjacency_bound(g, cfg.gamma, bound_t).to_dict() if g.symmetric else None
        ),
    }
    if args.trace_csv:
        with open(args.trace_csv, "w", encoding="utf-8") as fh:
            fh.write(trace.to_csv())
    config = dict(cfg.to_dict(), method=args.method, gamma0=gamma0, gamma1=gamma1,
                  epsilon=eps, bound_steps=bound_t)
    _emit(args, json.dumps(out) + "\n", _manifest(args, config, digest, argv))


def _unitary(args):
    g, digest = _load_graph_arg(args)
    if args.method not in CTQW_METHODS:
        raise InputError(f"{args.command} supports only {', '.join(CTQW_METHODS)}")
    B = _generator(g, args)
    return g, B, hamiltonian_step(B, args.gamma), digest


def cmd_oracle(args, argv):
    g, B, U, digest = _unitary(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ResonanceWarning)
        uniform = limiting_distribution(U, uniform_state(U.n))
        basis = limiting_matrix(U)
    resonant = any(issubclass(w.category, ResonanceWarning) for w in caught)
    out = {
        "generator": B.kind.label,
        "gamma": args.gamma,
        "labels": list(g.labels),
        "resonance": resonant,
        "uniform_start": [float(p) for p in uniform],
        "basis_starts": [[float(p) for p in basis[:, k]] for k in range(U.n)],
    }
    config = {"method": args.method, "gamma": args.gamma}
    _emit(args, json.dumps(out) + "\n", _manifest(args, config, digest, argv))


def cmd_mixing(args, argv):
    g, B, U, digest = _unitary(args)
    subsets = [[int(x) for x in s.split(",")] for s in args.subset]
    mixing = estimate_mixing_time(U, args.epsilon, args.tmax)
    sampling = estimate_sampling_time(U, args.epsilon, subsets, args.tmax)
    out = {
        "generator": B.kind.label,
        "gamma": args.gamma,
        "epsilon": args.epsilon,
        "t_max": args.tmax,
        "mixing_time": mixing,
        "sampling_time": sampling.time,
        "sampling_skipped": [[k, list(x)] for k, x in sampling.skipped],
    }
    config = {"method": args.method, "gamma": args.gamma, "epsilon": args.epsilon,
              "t_max": args.tmax, "subsets": subsets}
    _emit(args, json.dumps(out) + "\n", _manifest(args, config, digest, argv))


# ------------------------------------------------------------------ parser


def _add_output(p):
    p.add_argument("--out", help="write the primary output here instead of stdout")
    p.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")


def _add_graph(p, methods=METHODS):
    p.add_argument("--graph", required=True, help="graph-json, or edge list with .csv/.txt suffix")
    p.add_argument("--directed", action="store_true", help="edge-list input is directed")
    p.add_argument("--method", required=True, choices=methods)
    p.add_argument("--alpha-imag", nargs=2, type=float, default=(0.0, 1.0), metavar=("RE", "IM"),
                   help="alpha = RE + IM*i for ctqw-hermadj (default: i)")
    p.add_argument("--symmetrize", action="store_true",
                   help="ctqw-adjacency on a digraph: use (A + A^T)/2")


def _add_walk(p, seed):
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    p.add_argument("--walks", type=int, default=DEFAULT_WALKS, help="max walk applications per chunk")
    p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    p.add_argument("--exact", action="store_true", help="exact probabilities (shots = 0)")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--start", choices=("fresh", "carry"), default="fresh")
    p.add_argument("--restart", choices=("exact", "reencode"), default="reencode")
    p.add_argument("--workers", type=int, default=None)


class _Parser(argparse.ArgumentParser):
    """Usage errors become ``InputError`` so they share the JSON error path."""

    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    seed = _default_seed()
    parser = _Parser(prog="qwalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="seeded random weighted graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--edge-prob", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--max-attempts", type=int, default=1000)
    _add_output(p)
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("score", help="per-node anomaly scores")
    _add_graph(p)
    _add_walk(p, seed)
    p.add_argument("--damping", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--shift", choices=SHIFTS, default="flip-flop")
    p.add_argument("--pad-pow2", action="store_true",
                   help="pad with isolated nodes to a power of two (dropped from the report)")
    _add_output(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("compare", help="pairwise symmetric KL between reports")
    p.add_argument("reports", nargs="+")
    p.add_argument("--names", help="comma-separated method names (default: file names)")
    p.add_argument("--smooth", type=float, default=1e-12)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_output(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("diagnose", help="spectrum/energy trace and bound checks")
    _add_graph(p, CTQW_METHODS)
    _add_walk(p, seed)
    p.add_argument("--gamma0", type=float)
    p.add_argument("--gamma1", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--bound-steps", type=int)
    p.add_argument("--trace-csv", help="also write the trace as CSV")
    _add_output(p)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("oracle", help="limiting distributions of the walk")
    _add_graph(p, CTQW_METHODS)
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    _add_output(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("mixing", help="mixing and sampling time estimates")
    _add_graph(p, CTQW_METHODS)
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--tmax", type=int, default=1000)
    p.add_argument("--subset", action="append", default=[], help="comma-separated node set")
    _add_output(p)
    p.set_defaults(func=cmd_mixing)
    return parser


def _fail(exc: Exception, code: int) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        args.func(args, argv)
    except InputError as exc:
        return _fail(exc, 2)
    except (NumericalError, np.linalg.LinAlgError) as exc:
        return _fail(exc, 3)
    return 0


if __name__ == "__main__":
    sys.exit(main())
