"""Adaptive mirror descent and its exact FTRL reformulation.

MirrorDescent carries only the current point plus schedule scalars; MdAsFtrl
carries gradient and penalty-subgradient accumulators and recenters its
incremental regularizers at its own iterates.  The two are deliberately
independent implementations: their round-by-round agreement is a checked
property, not a shared code path.  The lazy/greedy projection families show
where the one-step and accumulated formulations stop being equivalent.
"""

from __future__ import annotations

import math

import numpy as np

from .core import (
    AdaGradRate,
    CompositePenalty,
    ConsistencyError,
    ConstantRate,
    FeasibleSet,
    LearningRateSchedule,
    UnsupportedCombination,
    as_point,
    clamp_box,
    project_l2_ball,
    project_l2_ball_weighted,
    soft_threshold_argmin,
    softmax_simplex,
)
from .learners import DualAveraging, _broadcast_inv

QUADRATIC = "quadratic"
ENTROPIC = "entropic"


def extract_psi_subgradient(x_prev, x_next, g, cum_weights, alpha_lam: float,
                            residual_tol: float = 1e-9) -> np.ndarray:
    """Recover the L1-penalty subgradient the mirror step implicitly used.

    Coordinate-wise: -alpha_lam where x_next < 0, +alpha_lam where > 0, and
    cum_weights * x_prev - g on exact zeros.  Validates membership in
    [-alpha_lam, alpha_lam] and the step's optimality residual
    g + g_psi + cum_weights (x_next - x_prev) = 0.
    """
    x_prev = as_point(x_prev)
    x_next = as_point(x_next, dim=x_prev.size)
    g = as_point(g, dim=x_prev.size)
    w = np.broadcast_to(np.asarray(cum_weights, dtype=float), x_prev.shape)
    if alpha_lam < 0:
        raise ValueError(f"penalty weight must be >= 0, got {alpha_lam}")
    g_psi = np.where(x_next > 0, alpha_lam,
                     np.where(x_next < 0, -alpha_lam, w * x_prev - g))
    if np.any(np.abs(g_psi) > alpha_lam + 1e-12):
        raise ConsistencyError(
            f"extracted subgradient leaves [-{alpha_lam}, {alpha_lam}]: {g_psi}")
    residual = g + g_psi + w * (x_next - x_prev)
    if np.max(np.abs(residual)) > residual_tol:
        raise ConsistencyError(f"optimality residual too large: {residual}")
    return g_psi


class MirrorDescent:
    """x_{t+1} = argmin g_t . x + alpha_t psi(x) + B_t(x, x_t).

    B_t is the divergence of the accumulated regularizer: quadratic-diagonal
    (closed form via per-coordinate soft thresholding, optionally clamped to
    a box, or projected for an indicator penalty) or entropic on the simplex
    (multiplicative-weights softmax).  State is the current point plus the
    scalars needed to evaluate the accumulated curvature.
    """

    def __init__(self, dim: int, schedule: LearningRateSchedule, lam: float = 0.0,
                 feasible_set: FeasibleSet | None = None, regularizer: str = QUADRATIC,
                 g_inf: float | None = None):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        feasible_set = feasible_set or FeasibleSet.unconstrained()
        if regularizer == ENTROPIC:
            if feasible_set.kind != FeasibleSet.SIMPLEX:
                raise UnsupportedCombination("entropic mirror descent runs on the simplex")
            if lam != 0.0:
                raise UnsupportedCombination("no closed form for entropic + L1")
            if dim < 2 or g_inf is None or g_inf <= 0:
                raise ValueError("entropic mirror descent needs dim >= 2 and g_inf > 0")
        elif regularizer == QUADRATIC:
            if feasible_set.kind == FeasibleSet.SIMPLEX:
                raise UnsupportedCombination("use the entropic regularizer on the simplex")
            if feasible_set.kind == FeasibleSet.L2_BALL and lam > 0:
                raise UnsupportedCombination("no closed form for ball + L1")
        else:
            raise ValueError(f"unknown regularizer {regularizer!r}")
        self.dim = int(dim)
        self.schedule = schedule
        self.penalty = CompositePenalty(lam, CompositePenalty.ALL_ROUNDS)
        self.feasible_set = feasible_set
        self.regularizer = regularizer
        self.g_inf = g_inf
        self.t = 0
        self.sq_sum = np.zeros(dim)
        self.sup_sq_sum = 0.0
        if regularizer == ENTROPIC:
            self.x = np.full(dim, 1.0 / dim)
        else:
            self.x = feasible_set.project(np.zeros(dim))
        self.cum_weights = _broadcast_inv(schedule.inverse_rate(0, self.sq_sum), dim)

    def step(self, g) -> np.ndarray:
        g = as_point(g, dim=self.dim)
        self.t += 1
        if self.regularizer == ENTROPIC:
            return self._entropic_step(g)
        return self._quadratic_step(g)

    def _entropic_step(self, g) -> np.ndarray:
        self.sup_sq_sum += float(np.max(np.abs(g))) ** 2
        inv = math.sqrt(self.g_inf ** 2 + self.sup_sq_sum) / math.sqrt(math.log(self.dim))
        self.cum_weights = np.full(self.dim, inv)
        # multiplicative weights: x_i ∝ x_i exp(-eta g_i)
        logits = np.log(self.x) - g / inv
        self.x = softmax_simplex(logits)
        return self.x

    def _quadratic_step(self, g) -> np.ndarray:
        self.sq_sum = self.sq_sum + g * g
        w = _broadcast_inv(self.schedule.inverse_rate(self.t, self.sq_sum), self.dim)
        self.cum_weights = w
        alpha_lam = self.penalty.alpha(self.t) * self.penalty.lam
        x_prev = self.x
        if self.feasible_set.kind == FeasibleSet.L2_BALL:
            u = np.where(w > 0, x_prev - g / np.where(w > 0, w, 1.0), 0.0)
            if isinstance(self.schedule, AdaGradRate):
                self.x = project_l2_ball_weighted(u, w, self.feasible_set.radius)
            else:
                self.x = project_l2_ball(u, self.feasible_set.radius)
            return self.x
        x = np.empty(self.dim)
        for i in range(self.dim):
            b = g[i] - w[i] * x_prev[i]
            if w[i] > 0:
                x[i] = soft_threshold_argmin(b, alpha_lam, w[i])
            elif abs(b) <= alpha_lam:
                x[i] = 0.0
            else:
                raise UnsupportedCombination(
                    "coordinate with no accumulated curvature and active gradient")
        if self.feasible_set.kind == FeasibleSet.BOX:
            x = clamp_box(x, self.feasible_set.radius)
        self.x = x
        return self.x

    def extract_last_psi_subgradient(self, x_prev, g) -> np.ndarray:
        return extract_psi_subgradient(
            x_prev, self.x, g, self.cum_weights,
            self.penalty.alpha(self.t) * self.penalty.lam)

    # Hooks shared with the native learners so the driver can record traces.
    reg_kind = "proximal"

    @property
    def last_inv_rate(self) -> np.ndarray:
        return self.cum_weights

    def penalty_cum_weight(self) -> float:
        return self.penalty.cum_alpha(self.t) * self.penalty.lam


class MdAsFtrl:
    """The mirror-descent update rewritten as a proximally recentered FTRL.

    Accumulates g_{1:t}, the penalty subgradients g_psi_{1:t-1} extracted at
    its own iterates, and the recentering sum of sigma_s x_s, then solves
        argmin (g_{1:t} + g_psi_{1:t-1} - sum_s sigma_s x_s) . x
               + alpha_t lam ||x||_1 + sigma_{0:t} ||x||^2 / 2
    per coordinate.  Supports the unconstrained quadratic + L1 family.
    """

    def __init__(self, dim: int, schedule: LearningRateSchedule, lam: float = 0.0):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.dim = int(dim)
        self.schedule = schedule
        self.penalty = CompositePenalty(lam, CompositePenalty.ALL_ROUNDS)
        self.t = 0
        self.g_sum = np.zeros(dim)
        self.g_psi_sum = np.zeros(dim)
        self.last_g_psi = np.zeros(dim)
        self.adj_sum = np.zeros(dim)
        self.sq_sum = np.zeros(dim)
        self.x = np.zeros(dim)
        self.cum_weights = _broadcast_inv(schedule.inverse_rate(0, self.sq_sum), dim)

    def step(self, g) -> np.ndarray:
        g = as_point(g, dim=self.dim)
        self.t += 1
        x_prev = self.x
        prev_w = self.cum_weights
        self.g_sum = self.g_sum + g
        self.sq_sum = self.sq_sum + g * g
        w = _broadcast_inv(self.schedule.inverse_rate(self.t, self.sq_sum), self.dim)
        sigma = np.maximum(w - prev_w, 0.0)
        self.adj_sum = self.adj_sum + sigma * x_prev
        self.cum_weights = w
        alpha_lam = self.penalty.alpha(self.t) * self.penalty.lam
        b = self.g_sum + self.g_psi_sum - self.adj_sum
        x = np.empty(self.dim)
        for i in range(self.dim):
            if w[i] > 0:
                x[i] = soft_threshold_argmin(b[i], alpha_lam, w[i])
            elif abs(b[i]) <= alpha_lam:
                x[i] = 0.0
            else:
                raise UnsupportedCombination(
                    "coordinate with no accumulated curvature and active linear term")
        self.x = x
        # fold this round's penalty subgradient into the linearized history
        self.last_g_psi = extract_psi_subgradient(x_prev, x, g, w, alpha_lam)
        self.g_psi_sum = self.g_psi_sum + self.last_g_psi
        return self.x

    def global_residual(self) -> float:
        """Max-norm residual of g_{1:t} + g_psi_{1:t} + grad r^B_{0:t}(x).

        The accumulated penalty subgradients stand in for the penalty's
        subdifferential, so the full sum must vanish at the iterate.
        """
        if self.t < 1:
            return 0.0
        grad = self.g_sum + self.g_psi_sum + self.cum_weights * self.x - self.adj_sum
        return float(np.max(np.abs(grad)))


# ---------------------------------------------------------------------------
# Lazy vs greedy projection families (constant rate, quadratic regularizer)
# ---------------------------------------------------------------------------

class LazyProjection:
    """Projects the accumulated unconstrained solution once per round.

    Variants are bookkeeping styles of the same family: "projection" keeps
    g_{1:t} and projects -eta g_{1:t}; "explicit" keeps the dual point theta
    and maps it through the regularizer's conjugate gradient; "ftrl" defers
    to the gradient-sum learner with the set folded into the regularizer.
    """

    VARIANTS = ("projection", "explicit", "ftrl")

    def __init__(self, eta: float, feasible_set: FeasibleSet, variant: str = "projection"):
        if variant not in self.VARIANTS:
            raise ValueError(f"variant must be one of {self.VARIANTS}, got {variant!r}")
        if feasible_set.kind not in (FeasibleSet.L2_BALL, FeasibleSet.BOX):
            raise UnsupportedCombination("projection families need a ball or box set")
        if eta <= 0:
            raise ValueError(f"rate must be > 0, got {eta}")
        self.eta = float(eta)
        self.feasible_set = feasible_set
        self.variant = variant
        self.t = 0
        self._g_sum = None
        self._theta = None
        self._inner = None
        self.x = None

    def _ensure_dim(self, g):
        if self._g_sum is None:
            dim = g.size
            self._g_sum = np.zeros(dim)
            self._theta = np.zeros(dim)
            self._inner = DualAveraging(dim, ConstantRate(self.eta), self.feasible_set)
            self.x = np.zeros(dim)

    def step(self, g) -> np.ndarray:
        g = as_point(g)
        self._ensure_dim(g)
        self.t += 1
        if self.variant == "ftrl":
            self.x = self._inner.step(g)
            return self.x
        if self.variant == "explicit":
            self._theta = self._theta - g
            self.x = self.feasible_set.project(self.eta * self._theta)
            return self.x
        self._g_sum = self._g_sum + g
        self.x = self.feasible_set.project(-self.eta * self._g_sum)
        return self.x


class GreedyProjection:
    """Projects after every step, from the previous projected point.

    "projection" is the two-step update Proj(x_t - eta g_t); "explicit"
    keeps the dual point theta = grad r(x_t) - g_t; "implicit" solves the
    one-step divergence problem; "ftrl" runs the accumulated objective with
    the set's indicator linearized through extracted subgradients.  The
    family is not equivalent to the lazy one once projections bind.
    """

    VARIANTS = ("projection", "explicit", "implicit", "ftrl")

    def __init__(self, eta: float, feasible_set: FeasibleSet, variant: str = "projection"):
        if variant not in self.VARIANTS:
            raise ValueError(f"variant must be one of {self.VARIANTS}, got {variant!r}")
        if feasible_set.kind not in (FeasibleSet.L2_BALL, FeasibleSet.BOX):
            raise UnsupportedCombination("projection families need a ball or box set")
        if eta <= 0:
            raise ValueError(f"rate must be > 0, got {eta}")
        self.eta = float(eta)
        self.feasible_set = feasible_set
        self.variant = variant
        self.t = 0
        self._accum = None  # g_{1:t} + g_psi_{1:t-1} for the ftrl variant
        self._inner = None
        self.x = None

    def _ensure_dim(self, g):
        if self.x is None:
            dim = g.size
            self.x = np.zeros(dim)
            self._accum = np.zeros(dim)
            self._inner = MirrorDescent(dim, ConstantRate(self.eta),
                                        feasible_set=self.feasible_set)

    def step(self, g) -> np.ndarray:
        g = as_point(g)
        self._ensure_dim(g)
        self.t += 1
        if self.variant == "implicit":
            self.x = self._inner.step(g)
            return self.x
        if self.variant == "ftrl":
            self._accum = self._accum + g
            x_next = self.feasible_set.project(-self.eta * self._accum)
            # indicator subgradient that keeps the accumulated optimality exact
            g_ind = -self._accum - x_next / self.eta
            self._accum = self._accum + g_ind
            self.x = x_next
            return self.x
        # projection and explicit differ only in which dual point they keep
        if self.variant == "explicit":
            theta = self.x / self.eta - g
            self.x = self.feasible_set.project(self.eta * theta)
            return self.x
        self.x = self.feasible_set.project(self.x - self.eta * g)
        return self.x
