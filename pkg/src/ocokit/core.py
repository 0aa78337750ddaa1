"""Shared domain types for online convex optimization learners.

Feasible sets, learning-rate schedules, composite penalties, quadratic and
entropic regularizers, and the closed-form scalar solvers every learner is
built from.  All functions here are pure; instances of the small classes are
immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import math

import numpy as np

# Centralized tolerances: closed form vs. numeric oracle, state/trajectory
# equivalence, and exact algebraic identities.
TOL_ORACLE = 1e-6
TOL_STATE = 1e-8
TOL_ALGEBRA = 1e-12


class UnsupportedCombination(ValueError):
    """A learner/regularizer/feasible-set pairing with no closed-form update."""


class InvariantViolation(RuntimeError):
    """A schedule or state invariant (e.g. non-increasing learning rate) failed."""


class ConsistencyError(RuntimeError):
    """An internal cross-check (e.g. a subgradient optimality residual) failed."""


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Validate and densify a coordinate vector: 1-D, finite, dim >= 1."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a 1-D point with dim >= 1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point has non-finite coordinates")
    if dim is not None and arr.size != dim:
        raise ValueError(f"expected dim {dim}, got {arr.size}")
    return arr


# ---------------------------------------------------------------------------
# Feasible sets
# ---------------------------------------------------------------------------

class FeasibleSet:
    """Unconstrained space, L2 ball, coordinate box, or probability simplex.

    Supplies Euclidean projection and the minimizer of a linear objective
    over the set (used for hindsight comparators).
    """

    UNCONSTRAINED = "unconstrained"
    L2_BALL = "l2-ball"
    BOX = "box"
    SIMPLEX = "simplex"

    def __init__(self, kind: str, radius: float | None = None):
        if kind not in (self.UNCONSTRAINED, self.L2_BALL, self.BOX, self.SIMPLEX):
            raise ValueError(f"unknown feasible-set kind {kind!r}")
        if kind in (self.L2_BALL, self.BOX):
            if radius is None or not np.isfinite(radius) or radius <= 0:
                raise ValueError(f"{kind} requires a strictly positive radius")
        self.kind = kind
        self.radius = float(radius) if radius is not None else None

    @classmethod
    def unconstrained(cls) -> "FeasibleSet":
        return cls(cls.UNCONSTRAINED)

    @classmethod
    def l2_ball(cls, radius: float) -> "FeasibleSet":
        return cls(cls.L2_BALL, radius)

    @classmethod
    def box(cls, half_width: float) -> "FeasibleSet":
        return cls(cls.BOX, half_width)

    @classmethod
    def simplex(cls) -> "FeasibleSet":
        return cls(cls.SIMPLEX)

    def project(self, v) -> np.ndarray:
        """Euclidean projection of v onto the set."""
        v = as_point(v)
        if self.kind == self.UNCONSTRAINED:
            return v
        if self.kind == self.L2_BALL:
            return project_l2_ball(v, self.radius)
        if self.kind == self.BOX:
            return clamp_box(v, self.radius)
        return project_simplex(v)

    def linear_minimizer(self, g) -> np.ndarray:
        """argmin of g . x over the set (minimum-norm choice on ties)."""
        g = as_point(g)
        if self.kind == self.UNCONSTRAINED:
            raise ValueError("linear objective is unbounded below on an unconstrained set")
        if self.kind == self.L2_BALL:
            nrm = float(np.linalg.norm(g))
            if nrm == 0.0:
                return np.zeros_like(g)
            return -self.radius * g / nrm
        if self.kind == self.BOX:
            return -self.radius * np.sign(g)
        out = np.zeros_like(g)
        out[int(np.argmin(g))] = 1.0
        return out

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_point(x)
        if self.kind == self.UNCONSTRAINED:
            return True
        if self.kind == self.L2_BALL:
            return float(np.linalg.norm(x)) <= self.radius * (1.0 + tol)
        if self.kind == self.BOX:
            return bool(np.all(np.abs(x) <= self.radius * (1.0 + tol)))
        return bool(np.all(x >= -tol)) and abs(float(x.sum()) - 1.0) <= tol

    def __repr__(self):
        if self.radius is None:
            return f"FeasibleSet({self.kind})"
        return f"FeasibleSet({self.kind}, radius={self.radius})"


# ---------------------------------------------------------------------------
# Learning-rate schedules
# ---------------------------------------------------------------------------

class LearningRateSchedule:
    """Defines eta_t through its inverse 1/eta_t (= cumulative curvature).

    ``inverse_rate(t, sq_sum)`` returns 1/eta_t; the convention 1/eta = 0
    encodes an infinite learning rate (zero accumulated curvature).  Rates
    must be non-increasing in t so every sigma_t = 1/eta_t - 1/eta_{t-1}
    is nonnegative.
    """

    per_coordinate = False

    def inverse_rate(self, t: int, sq_sum=0.0):
        raise NotImplementedError


class ConstantRate(LearningRateSchedule):
    def __init__(self, eta: float):
        if not (np.isfinite(eta) and eta > 0):
            raise ValueError(f"constant rate requires eta > 0, got {eta}")
        self.eta = float(eta)

    def inverse_rate(self, t, sq_sum=0.0):
        return 1.0 / self.eta

    def __repr__(self):
        return f"ConstantRate(eta={self.eta})"


class InverseSqrtRate(LearningRateSchedule):
    """eta_t = scale / sqrt(t + shift) with shift in {0, 1}.

    shift=0 gives an infinite rate at t=0 (no round-zero curvature).
    """

    def __init__(self, scale: float, shift: int = 0):
        if not (np.isfinite(scale) and scale > 0):
            raise ValueError(f"scale must be > 0, got {scale}")
        if shift not in (0, 1):
            raise ValueError(f"shift must be 0 or 1, got {shift}")
        self.scale = float(scale)
        self.shift = int(shift)

    def inverse_rate(self, t, sq_sum=0.0):
        return math.sqrt(t + self.shift) / self.scale

    def __repr__(self):
        return f"InverseSqrtRate(scale={self.scale}, shift={self.shift})"


class InverseLinearRate(LearningRateSchedule):
    """eta_t = 1/t, the rate for losses with unit strong convexity."""

    def inverse_rate(self, t, sq_sum=0.0):
        return float(t)

    def __repr__(self):
        return "InverseLinearRate()"


class AdaGradRate(LearningRateSchedule):
    """Per-coordinate eta_{t,i} = scale / sqrt(offset^2 + sum_s g_{s,i}^2).

    A zero denominator encodes an infinite rate (inverse_rate returns 0 for
    that coordinate); step solvers fall back to their tie-break there.
    """

    per_coordinate = True

    def __init__(self, scale: float, offset: float = 0.0):
        if not (np.isfinite(scale) and scale > 0):
            raise ValueError(f"scale must be > 0, got {scale}")
        if not (np.isfinite(offset) and offset >= 0):
            raise ValueError(f"offset must be >= 0, got {offset}")
        self.scale = float(scale)
        self.offset = float(offset)

    def inverse_rate(self, t, sq_sum=0.0):
        return np.sqrt(self.offset ** 2 + np.asarray(sq_sum, dtype=float)) / self.scale

    def __repr__(self):
        return f"AdaGradRate(scale={self.scale}, offset={self.offset})"


def schedule_sigma(sched: LearningRateSchedule, t: int, sq_now=0.0, sq_prev=0.0):
    """Incremental curvature sigma_t = 1/eta_t - 1/eta_{t-1} (sigma_0 = 1/eta_0).

    ``sq_now``/``sq_prev`` are the per-coordinate squared-gradient sums
    through rounds t and t-1 (ignored by non-adaptive schedules).  Raises
    InvariantViolation if the schedule's rate increased.
    """
    if t < 0:
        raise ValueError(f"round index must be >= 0, got {t}")
    if t == 0:
        return sched.inverse_rate(0, sq_now)
    sigma = np.asarray(sched.inverse_rate(t, sq_now)) - np.asarray(sched.inverse_rate(t - 1, sq_prev))
    if np.any(sigma < -TOL_ALGEBRA):
        raise InvariantViolation(f"learning rate increased at t={t} (sigma={sigma})")
    return np.maximum(sigma, 0.0) if sigma.ndim else max(float(sigma), 0.0)


# ---------------------------------------------------------------------------
# Composite penalties
# ---------------------------------------------------------------------------

class CompositePenalty:
    """Weight lambda and round schedule alpha_t for a non-smooth penalty term.

    alpha_t must be non-increasing: every round (alpha_t = 1), first round
    only (alpha_1 = 1, then 0), or zero.
    """

    ALL_ROUNDS = "all-rounds"
    FIRST_ROUND_ONLY = "first-round-only"
    ZERO = "zero"

    def __init__(self, lam: float, alpha_schedule: str = ALL_ROUNDS):
        if not (np.isfinite(lam) and lam >= 0):
            raise ValueError(f"penalty weight must be >= 0, got {lam}")
        if alpha_schedule not in (self.ALL_ROUNDS, self.FIRST_ROUND_ONLY, self.ZERO):
            raise ValueError(f"unknown alpha schedule {alpha_schedule!r}")
        self.lam = float(lam)
        self.alpha_schedule = alpha_schedule

    def alpha(self, t: int) -> float:
        if t < 1:
            raise ValueError("alpha_t is defined for t >= 1")
        if self.alpha_schedule == self.ALL_ROUNDS:
            return 1.0
        if self.alpha_schedule == self.FIRST_ROUND_ONLY:
            return 1.0 if t == 1 else 0.0
        return 0.0

    def cum_alpha(self, t: int) -> float:
        """alpha_{1:t}."""
        if self.alpha_schedule == self.ALL_ROUNDS:
            return float(t)
        if self.alpha_schedule == self.FIRST_ROUND_ONLY:
            return 1.0 if t >= 1 else 0.0
        return 0.0

    def __repr__(self):
        return f"CompositePenalty(lam={self.lam}, {self.alpha_schedule})"


# ---------------------------------------------------------------------------
# Regularizers and Bregman divergences
# ---------------------------------------------------------------------------

class RegularizerSpec:
    """Snapshot of an accumulated regularizer r_{0:t}.

    Quadratic-diagonal: r(x) = sum_i w_i x_i^2 / 2 (per-coordinate weights),
    centered at the origin or proximally at the current iterate.  Entropic:
    r(x) = w (log n + sum_i x_i log x_i) on the probability simplex.
    """

    QUADRATIC = "quadratic-diagonal"
    ENTROPIC = "entropic"

    CENTERED = "centered"
    PROXIMAL = "proximal"

    def __init__(self, kind, weights, centering=CENTERED):
        if kind not in (self.QUADRATIC, self.ENTROPIC):
            raise ValueError(f"unknown regularizer kind {kind!r}")
        if centering not in (self.CENTERED, self.PROXIMAL):
            raise ValueError(f"unknown centering {centering!r}")
        if kind == self.QUADRATIC:
            weights = np.atleast_1d(np.asarray(weights, dtype=float))
            if np.any(weights < 0) or not np.all(np.isfinite(weights)):
                raise ValueError("quadratic weights must be finite and >= 0")
        else:
            weights = float(weights)
            if not (np.isfinite(weights) and weights >= 0):
                raise ValueError("entropic weight must be finite and >= 0")
        self.kind = kind
        self.weights = weights
        self.centering = centering

    @classmethod
    def quadratic_diagonal(cls, weights, centering=CENTERED) -> "RegularizerSpec":
        return cls(cls.QUADRATIC, weights, centering)

    @classmethod
    def entropic(cls, weight: float) -> "RegularizerSpec":
        return cls(cls.ENTROPIC, weight)


def negative_entropy(x) -> float:
    """log n + sum_i x_i log x_i with the convention 0 log 0 = 0."""
    x = as_point(x)
    if np.any(x < 0):
        raise ValueError("negative entropy requires nonnegative coordinates")
    pos = x[x > 0]
    return float(math.log(x.size) + np.sum(pos * np.log(pos)))


def bregman_divergence(reg: RegularizerSpec, u, v) -> float:
    """r(u) - r(v) - grad r(v) . (u - v); nonnegative for convex r.

    For quadratic-diagonal r this is sum_i w_i (u_i - v_i)^2 / 2.  For the
    entropic form it is w * sum_i [u_i log(u_i/v_i) - u_i + v_i], which
    reduces to w * KL(u || v) when u and v both sum to one; v must be
    strictly positive.
    """
    u = as_point(u)
    v = as_point(v, dim=u.size)
    if reg.kind == RegularizerSpec.QUADRATIC:
        w = np.broadcast_to(reg.weights, u.shape)
        return float(0.5 * np.sum(w * (u - v) ** 2))
    if np.any(v <= 0):
        raise ValueError("entropic divergence requires strictly positive v")
    if np.any(u < 0):
        raise ValueError("entropic divergence requires nonnegative u")
    terms = np.where(u > 0, u * np.log(np.where(u > 0, u, 1.0) / v), 0.0)
    return float(reg.weights * (np.sum(terms) - u.sum() + v.sum()))


# ---------------------------------------------------------------------------
# Closed-form single-step solvers
# ---------------------------------------------------------------------------

def soft_threshold_argmin(b: float, lam: float, a: float) -> float:
    """argmin_x  b*x + lam*|x| + (a/2) x^2.

    Zero iff |b| <= lam, otherwise -(b - sign(b) lam)/a.
    """
    if not (np.isfinite(b) and np.isfinite(lam) and np.isfinite(a)):
        raise ValueError("soft threshold requires finite arguments")
    if a <= 0:
        raise ValueError(f"quadratic coefficient must be > 0, got {a}")
    if lam < 0:
        raise ValueError(f"l1 weight must be >= 0, got {lam}")
    if abs(b) <= lam:
        return 0.0
    return -(b - math.copysign(lam, b)) / a


def project_l2_ball(v, radius: float) -> np.ndarray:
    """Radial projection onto the ball of the given radius."""
    v = as_point(v)
    if not (np.isfinite(radius) and radius > 0):
        raise ValueError(f"radius must be > 0, got {radius}")
    nrm = float(np.linalg.norm(v))
    if nrm <= radius:
        return v.copy()
    return v * (radius / nrm)


def project_l2_ball_weighted(u, weights, radius: float) -> np.ndarray:
    """argmin of sum_i w_i (x_i - u_i)^2 subject to ||x||_2 <= radius.

    Coordinates with w_i = 0 are pinned to 0 (minimum-norm tie-break).
    Solved by bisection on the multiplier mu in x_i = w_i u_i / (w_i + mu).
    """
    u = as_point(u)
    w = np.broadcast_to(np.asarray(weights, dtype=float), u.shape)
    if np.any(w < 0):
        raise ValueError("weights must be >= 0")
    x = np.where(w > 0, u, 0.0)
    if float(np.linalg.norm(x)) <= radius:
        return x
    lo, hi = 0.0, float(np.max(w))
    while np.linalg.norm(np.where(w > 0, w * u / (w + hi), 0.0)) > radius:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.linalg.norm(np.where(w > 0, w * u / (w + mid), 0.0)) > radius:
            lo = mid
        else:
            hi = mid
    x = np.where(w > 0, w * u / (w + hi), 0.0)
    nrm = float(np.linalg.norm(x))
    if nrm > radius:
        x *= radius / nrm
    return x


def clamp_box(v, half_width: float) -> np.ndarray:
    """Per-coordinate clamp to [-half_width, half_width]."""
    v = as_point(v)
    if not (np.isfinite(half_width) and half_width > 0):
        raise ValueError(f"half width must be > 0, got {half_width}")
    return np.clip(v, -half_width, half_width)


def softmax_simplex(z) -> np.ndarray:
    """exp(z_i) / sum_j exp(z_j), computed with max subtraction."""
    z = as_point(z)
    e = np.exp(z - z.max())
    return e / e.sum()


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort based)."""
    v = as_point(v)
    srt = np.sort(v)[::-1]
    css = np.cumsum(srt) - 1.0
    idx = np.arange(1, v.size + 1)
    cond = srt - css / idx > 0
    rho = int(np.nonzero(cond)[0][-1])
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)
