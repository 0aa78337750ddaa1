"""Loss/gradient sources that drive the learners.

Each stream yields one StreamEvent per round through ``event(t, x_t)``; the
adaptive streams inspect the point the learner just played before choosing
the loss, so the driver loop must follow select -> reveal -> incur -> update.
Streams are single-consumer iterators; two instances built with the same
seed replay the same sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import as_point


@dataclass
class StreamEvent:
    """Round-t subgradient plus the evaluable loss used for regret accounting."""

    t: int
    g: np.ndarray
    loss_at: "callable"


class ParseError(ValueError):
    """Malformed svmlight input; carries line and column context."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", col {column})" if column is not None else ")")
        super().__init__(message + where)
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# The one-dimensional L1 adversary
# ---------------------------------------------------------------------------

def l1_adversary_next(x_t: float, t: int, G: float, lam: float) -> float:
    """Adaptive 1-D gradient: -(G + lam)/2 on round one, then -G or +G by sign of x_t."""
    if t < 1:
        raise ValueError(f"round index must be >= 1, got {t}")
    if t == 1:
        return -0.5 * (G + lam)
    return float(G) if x_t > 0 else -float(G)


class L1AdversaryStream:
    """Drives the 1-D oscillation example; requires lam < G."""

    def __init__(self, G: float, lam: float):
        if not (0 <= lam < G):
            raise ValueError(f"need 0 <= lam < G, got lam={lam}, G={G}")
        self.G = float(G)
        self.lam = float(lam)
        self.dim = 1

    def event(self, t: int, x_t) -> StreamEvent:
        x = as_point(x_t, dim=1)
        g = np.array([l1_adversary_next(float(x[0]), t, self.G, self.lam)])
        return StreamEvent(t=t, g=g, loss_at=lambda y, g=g: float(g @ as_point(y, dim=1)))


class ReplayStream:
    """Re-emits a recorded gradient sequence as linear losses."""

    def __init__(self, grads):
        self.grads = [as_point(g) for g in grads]
        self.dim = self.grads[0].size if self.grads else 1

    def event(self, t: int, x_t) -> StreamEvent:
        g = self.grads[t - 1]
        return StreamEvent(t=t, g=g, loss_at=lambda y, g=g: float(g @ as_point(y, dim=g.size)))


# ---------------------------------------------------------------------------
# Random linear losses
# ---------------------------------------------------------------------------

class RandomLinearStream:
    """Seeded linear losses with every gradient rescaled to the declared cap.

    ``norm="l2"`` caps the Euclidean norm at G; ``norm="sup"`` caps the
    max-magnitude coordinate.  Deterministic per seed.
    """

    def __init__(self, seed: int, n: int, G: float, norm: str = "l2"):
        if n < 1:
            raise ValueError(f"dimension must be >= 1, got {n}")
        if not (np.isfinite(G) and G > 0):
            raise ValueError(f"gradient cap must be > 0, got {G}")
        if norm not in ("l2", "sup"):
            raise ValueError(f"norm must be 'l2' or 'sup', got {norm!r}")
        self.dim = int(n)
        self.G = float(G)
        self.norm = norm
        self._rng = np.random.default_rng(seed)

    def event(self, t: int, x_t) -> StreamEvent:
        g = self._rng.standard_normal(self.dim)
        scale = np.linalg.norm(g) if self.norm == "l2" else np.max(np.abs(g))
        g = g * (self.G / scale) if scale > 0 else np.zeros(self.dim)
        return StreamEvent(t=t, g=g, loss_at=lambda y, g=g: float(g @ as_point(y, dim=g.size)))


# ---------------------------------------------------------------------------
# Strongly convex quadratic losses
# ---------------------------------------------------------------------------

class StronglyConvexQuadraticStream:
    """f_t(x) = ||x - c_t||^2 / 2 with random centers inside a ball.

    Unit strong convexity; with x_1 = 0 every iterate of the 1/t-rate
    gradient learner stays inside the center ball, so gradients are capped
    by 2 * center_radius.
    """

    def __init__(self, seed: int, n: int, center_radius: float = 1.0):
        if center_radius <= 0:
            raise ValueError("center radius must be > 0")
        self.dim = int(n)
        self.center_radius = float(center_radius)
        self.gradient_cap = 2.0 * float(center_radius)
        self._rng = np.random.default_rng(seed)
        self.centers: list[np.ndarray] = []

    def event(self, t: int, x_t) -> StreamEvent:
        c = self._rng.standard_normal(self.dim)
        nrm = np.linalg.norm(c)
        if nrm > 0:
            c *= self._rng.uniform(0.0, self.center_radius) / nrm
        self.centers.append(c)
        x = as_point(x_t, dim=self.dim)
        g = x - c
        return StreamEvent(
            t=t, g=g,
            loss_at=lambda y, c=c: 0.5 * float(np.sum((as_point(y, dim=c.size) - c) ** 2)))

    def best_fixed_point(self) -> np.ndarray:
        """Hindsight minimizer of the cumulative loss: the mean center."""
        if not self.centers:
            raise ValueError("no rounds played yet")
        return np.mean(self.centers, axis=0)


# ---------------------------------------------------------------------------
# Online logistic regression
# ---------------------------------------------------------------------------

def logistic_loss(x, a, y) -> float:
    """Negative log-likelihood of label y under p = sigmoid(a . x), stably."""
    z = float(np.dot(as_point(a), as_point(x)))
    return float(np.logaddexp(0.0, -z) + (1.0 - y) * z)


def logistic_example_gradient(x, a, y) -> np.ndarray:
    """(sigmoid(a . x) - y) * a."""
    x = as_point(x)
    a = as_point(a, dim=x.size)
    z = float(np.dot(a, x))
    if z >= 0:
        p = 1.0 / (1.0 + math.exp(-z))
    else:
        e = math.exp(z)
        p = e / (1.0 + e)
    return (p - float(y)) * a


class LogisticStream:
    """Streams (feature, label) examples as logistic losses."""

    def __init__(self, examples, dim: int):
        self.examples = list(examples)
        self.dim = int(dim)

    @classmethod
    def synthetic(cls, seed: int, n: int, T: int, density: float = 0.3,
                  true_nonzeros: int | None = None) -> "LogisticStream":
        """Sparse random features, labels drawn from a sparse ground-truth model."""
        rng = np.random.default_rng(seed)
        k = true_nonzeros if true_nonzeros is not None else max(1, n // 5)
        w = np.zeros(n)
        support = rng.choice(n, size=min(k, n), replace=False)
        w[support] = rng.normal(0.0, 2.0, size=support.size)
        examples = []
        for _ in range(T):
            a = rng.standard_normal(n) * (rng.random(n) < density)
            p = 1.0 / (1.0 + np.exp(-float(a @ w)))
            y = int(rng.random() < p)
            examples.append((a, y))
        return cls(examples, n)

    def event(self, t: int, x_t) -> StreamEvent:
        a, y = self.examples[t - 1]
        a = as_point(a, dim=self.dim)
        g = logistic_example_gradient(x_t, a, y)
        return StreamEvent(
            t=t, g=g,
            loss_at=lambda x, a=a, y=y: logistic_loss(x, a, y))


# ---------------------------------------------------------------------------
# svmlight text format
# ---------------------------------------------------------------------------

def parse_svmlight(line: str) -> tuple[int, dict[int, float]]:
    """Parse one svmlight line: ``label idx:val idx:val ... [# comment]``.

    Labels {0,1} or {-1,+1} (mapped to {0,1}); indices are 1-based and must
    be strictly increasing.
    """
    payload = line.split("#", 1)[0]
    tokens = payload.split()
    if not tokens:
        raise ParseError("empty svmlight line", line=1, column=1)

    def col(tok):
        return payload.index(tok) + 1

    raw_label = tokens[0]
    try:
        lab = float(raw_label)
    except ValueError:
        raise ParseError(f"bad label {raw_label!r}", line=1, column=col(raw_label)) from None
    if lab in (1.0,):
        label = 1
    elif lab in (0.0, -1.0):
        label = 0
    else:
        raise ParseError(f"label must be 0/1 or -1/+1, got {raw_label}", line=1, column=col(raw_label))

    features: dict[int, float] = {}
    prev_idx = 0
    for tok in tokens[1:]:
        if ":" not in tok:
            raise ParseError(f"malformed feature token {tok!r}", line=1, column=col(tok))
        idx_s, val_s = tok.split(":", 1)
        try:
            idx = int(idx_s)
            val = float(val_s)
        except ValueError:
            raise ParseError(f"malformed feature token {tok!r}", line=1, column=col(tok)) from None
        if idx < 1:
            raise ParseError(f"feature index must be >= 1, got {idx}", line=1, column=col(tok))
        if idx <= prev_idx:
            raise ParseError(f"feature indices must be strictly increasing, got {idx} after {prev_idx}",
                             line=1, column=col(tok))
        if not np.isfinite(val):
            raise ParseError(f"non-finite feature value in {tok!r}", line=1, column=col(tok))
        features[idx] = val
        prev_idx = idx
    return label, features


def serialize_svmlight(label: int, features: dict[int, float]) -> str:
    """Canonical svmlight line: 0/1 label, sorted 1-based indices, %.17g values."""
    if label not in (0, 1):
        raise ValueError(f"label must be 0 or 1, got {label}")
    parts = [str(label)]
    for idx in sorted(features):
        parts.append(f"{idx}:{features[idx]:.17g}")
    return " ".join(parts)


def load_svmlight(lines, dim: int | None = None):
    """Parse an iterable of lines into (dense feature array, label) pairs."""
    parsed = []
    max_idx = 0
    for lineno, line in enumerate(lines, start=1):
        if not line.split("#", 1)[0].strip():
            continue
        try:
            label, feats = parse_svmlight(line)
        except ParseError as err:
            raise ParseError(str(err.args[0]).split(" (line")[0], line=lineno, column=err.column) from None
        parsed.append((label, feats))
        if feats:
            max_idx = max(max_idx, max(feats))
    n = dim if dim is not None else max_idx
    examples = []
    for label, feats in parsed:
        a = np.zeros(max(n, 1))
        for idx, val in feats.items():
            if idx > n:
                raise ParseError(f"feature index {idx} exceeds dimension {n}")
            a[idx - 1] = val
        examples.append((a, label))
    return examples, max(n, 1)
