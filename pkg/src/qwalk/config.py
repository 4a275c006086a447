"""Walk configuration and the score report every scorer returns."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .errors import InputError

DEFAULT_GAMMA = 1 / (2 * math.sqrt(13))
DEFAULT_STEPS = 40
DEFAULT_WALKS = 4
DEFAULT_SHOTS = 30000


class StartPolicy(str, Enum):
    """Where each outer step of the scoring loop starts."""

    FRESH = "fresh"  # uniform superposition every step
    CARRY = "carry"  # previous step's re-encoded output distribution


class RestartPolicy(str, Enum):
    """What happens to the state between chunks of at most ``walks`` steps."""

    EXACT = "exact"  # carry the statevector intact
    REENCODE = "reencode"  # measure, then amplitude-encode the frequencies


@dataclass(frozen=True)
class WalkConfig:
    gamma: float = DEFAULT_GAMMA
    steps: int = DEFAULT_STEPS
    walks: int = DEFAULT_WALKS
    shots: int = 0
    seed: int = 0
    start: StartPolicy = StartPolicy.FRESH
    restart: RestartPolicy = RestartPolicy.EXACT

    def __post_init__(self):
        object.__setattr__(self, "start", StartPolicy(self.start))
        object.__setattr__(self, "restart", RestartPolicy(self.restart))
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise InputError(f"gamma must be positive, got {self.gamma!r}")
        for name in ("steps", "walks"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise InputError(f"{name} must be a positive integer, got {value!r}")
        if int(self.shots) != self.shots or self.shots < 0:
            raise InputError(f"shots must be a nonnegative integer, got {self.shots!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")

    @classmethod
    def sampled(cls, **overrides) -> WalkConfig:
        """30000 shots per measurement and re-encoded restarts between chunks."""
        base = dict(shots=DEFAULT_SHOTS, restart=RestartPolicy.REENCODE)
        base.update(overrides)
        return cls(**base)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["start"] = self.start.value
        d["restart"] = self.restart.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> WalkConfig:
        return cls(**d)


def inverse_scores(probs: np.ndarray) -> np.ndarray:
    """Entrywise ``1/p`` with ``+inf`` exactly where ``p == 0``."""
    probs = np.asarray(probs, dtype=float)
    out = np.full(probs.shape, np.inf)
    nz = probs > 0
    out[nz] = 1.0 / probs[nz]
    return out


def _encode_float(x: float):
    return "inf" if x == math.inf else float(x)


def _decode_float(x) -> float:
    return math.inf if x == "inf" else float(x)


@dataclass(frozen=True, eq=False)
class ScoreReport:
    """Per-node averaged visiting probabilities and their inverses (anomaly scores)."""

    generator: str
    averaged_probs: np.ndarray
    scores: np.ndarray
    per_step_probs: np.ndarray
    config: WalkConfig | None = None
    labels: tuple[str, ...] = ()
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_probabilities(cls, generator, per_step_probs, config=None, labels=(), metadata=None):
        rows = np.asarray(per_step_probs, dtype=float)
        avg = rows.mean(axis=0)
        return cls(generator, avg, inverse_scores(avg), rows, config, tuple(labels), metadata or {})

    @property
    def n(self) -> int:
        return len(self.averaged_probs)

    def restricted(self, k: int) -> ScoreReport:
        """Keep only the first ``k`` nodes, renormalizing the probabilities."""
        if k == self.n:
            return self
        rows = self.per_step_probs[:, :k]
        rows = rows / rows.sum(axis=1, keepdims=True)
        avg = rows.mean(axis=0)
        meta = dict(self.metadata, padded_nodes=self.n - k)
        return ScoreReport(
            self.generator, avg, inverse_scores(avg), rows, self.config, self.labels[:k], meta
        )

    def to_dict(self) -> dict:
        return {
            "generator": self.generator,
            "config": self.config.to_dict() if self.config else None,
            "labels": list(self.labels),
            "averaged_probs": [float(p) for p in self.averaged_probs],
            "scores": [_encode_float(s) for s in self.scores],
            "per_step_probs": [[float(p) for p in row] for row in self.per_step_probs],
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> ScoreReport:
        try:
            avg = np.array(d["averaged_probs"], dtype=float)
            rows = np.array(d.get("per_step_probs", []), dtype=float).reshape(-1, len(avg))
            return cls(
                generator=d["generator"],
                averaged_probs=avg,
                scores=np.array([_decode_float(s) for s in d["scores"]]),
                per_step_probs=rows,
                config=WalkConfig.from_dict(d["config"]) if d.get("config") else None,
                labels=tuple(d.get("labels", ())),
                metadata=d.get("metadata", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed score report: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> ScoreReport:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid report JSON: {exc}") from None
