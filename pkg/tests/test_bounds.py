import math

import numpy as np
import pytest

from ocokit.bounds import (
    BoundRule,
    RegretRecord,
    best_comparator,
    bound_curve,
    bound_value,
    cumulative_regret,
    strong_ftrl_decomposition,
)
from ocokit.core import ConstantRate, FeasibleSet, InverseSqrtRate
from ocokit.driver import run_rounds
from ocokit.learners import BoundConfig, DualAveraging, FtrlProximal
from ocokit.streams import RandomLinearStream


@pytest.mark.parametrize("losses,comp,expected", [
    ((1.0, 1.0), (0.0, 0.0), (1.0, 2.0)),
    ((0.5, -0.5), (0.5, -0.5), (0.0, 0.0)),
    ((3.0, -1.0), (1.0, 1.0), (2.0, 0.0)),
])
def test_cumulative_regret(losses, comp, expected):
    assert np.allclose(cumulative_regret(losses, comp), expected)


def test_cumulative_regret_length_mismatch():
    with pytest.raises(ValueError):
        cumulative_regret([1.0], [1.0, 2.0])


def test_best_comparator_rules():
    grads = np.array([[2.0, -3.0, 0.0]])
    assert np.allclose(best_comparator(grads, FeasibleSet.box(1.0)), [-1, 1, 0])
    grads = np.array([[1.0, 2.0], [2.0, 2.0]])
    assert np.allclose(best_comparator(grads, FeasibleSet.l2_ball(2.0)), [-1.2, -1.6])
    grads = np.array([[5.0, 1.0, 2.0]])
    assert np.allclose(best_comparator(grads, FeasibleSet.simplex()), [0, 1, 0])
    with pytest.raises(ValueError):
        best_comparator(grads, FeasibleSet.unconstrained())


def test_closed_form_bound_values():
    cfg = BoundConfig(R=1.0, G=1.0, R_inf=1.0, n=2)
    grads = np.zeros((100, 1))
    star = np.array([1.0])
    assert bound_value(BoundRule.DA_CLOSED_FORM, cfg, grads, 100, x_star=star) == \
        pytest.approx(math.sqrt(2) * 10, abs=1e-9)
    assert bound_value(BoundRule.PROX_CLOSED_FORM, cfg, grads, 100) == \
        pytest.approx(2 * math.sqrt(2) * 10, abs=1e-9)
    grads2 = np.array([[3.0], [4.0]])
    assert bound_value(BoundRule.ADAGRAD_PER_COORD, cfg, grads2, 2) == \
        pytest.approx(10 * math.sqrt(2), abs=1e-12)
    assert bound_value(BoundRule.STRONGLY_CONVEX_LOG, cfg, grads, 1) == pytest.approx(0.5)


def test_missing_config_field_is_an_error():
    with pytest.raises(ValueError):
        bound_value(BoundRule.DA_CLOSED_FORM, BoundConfig(), np.zeros((3, 1)), 2)


def test_entropic_bound_cap():
    cfg = BoundConfig(G_inf=1.0, n=4)
    grads = np.ones((10, 4))
    for t in range(1, 11):
        value = bound_value(BoundRule.ENTROPIC, cfg, grads, t)
        assert value <= 2.0 * math.sqrt(t * math.log(4)) + 1e-12


def test_bound_curves_are_monotone():
    rng = np.random.default_rng(0)
    learner = FtrlProximal(2, InverseSqrtRate(math.sqrt(2), shift=0), FeasibleSet.l2_ball(1.0))
    stream = RandomLinearStream(1, 2, 1.0)
    result = run_rounds(learner, stream, 40, BoundRule.PROX_CLOSED_FORM,
                        BoundConfig(R=1.0, G=1.0), FeasibleSet.l2_ball(1.0))
    for rule in (BoundRule.FTRL_PROXIMAL, BoundRule.WEAK_PROXIMAL):
        curve = bound_curve(rule, BoundConfig(), result.trace.grads,
                            x_star=result.x_star, trace=result.trace)
        assert np.all(np.diff(curve) >= -1e-9)
    assert np.all(np.diff(result.record.bound) >= -1e-9)


def test_bound_value_indexes_the_curve():
    rng = np.random.default_rng(1)
    grads = rng.normal(size=(20, 3))
    cfg = BoundConfig(R_inf=1.0)
    curve = bound_curve(BoundRule.ADAGRAD_PER_COORD, cfg, grads)
    for t in (1, 7, 20):
        assert bound_value(BoundRule.ADAGRAD_PER_COORD, cfg, grads, t) == \
            pytest.approx(curve[t - 1], abs=1e-12)


def test_weak_bound_dominates_sharp_bound():
    learner = FtrlProximal(2, InverseSqrtRate(math.sqrt(2), shift=0), FeasibleSet.l2_ball(1.0))
    stream = RandomLinearStream(2, 2, 1.0)
    result = run_rounds(learner, stream, 30, BoundRule.PROX_CLOSED_FORM,
                        BoundConfig(R=1.0, G=1.0), FeasibleSet.l2_ball(1.0))
    sharp = bound_curve(BoundRule.FTRL_PROXIMAL, BoundConfig(), result.trace.grads,
                        x_star=result.x_star, trace=result.trace)
    weak = bound_curve(BoundRule.WEAK_PROXIMAL, BoundConfig(), result.trace.grads,
                       x_star=result.x_star, trace=result.trace)
    assert np.all(weak > sharp)  # strict: every round has a nonzero gradient


def test_strong_ftrl_decomposition_single_round_example():
    # r_0 = x^2/2 (eta = 1), f_1(x) = x: x_2 = -1, r_{0:1}(x*) at x* = -1 is 1/2,
    # the stability term is 1/2, so the bound is 1 and equals the regret.
    def objective(t, x):
        return float(x[0] + 0.5 * x[0] ** 2)

    value = strong_ftrl_decomposition(objective, [0.0],
                                      [np.array([0.0]), np.array([-1.0])],
                                      np.array([-1.0]), reg_total_at_comparator=0.5)
    assert value == pytest.approx(1.0, abs=1e-12)
    regret = 0.0 - (-1.0)
    assert value >= regret - 1e-12


def test_strong_ftrl_decomposition_zero_gradients():
    def objective(t, x):
        return float(0.5 * x[0] ** 2)

    value = strong_ftrl_decomposition(objective, [0.0, 0.0],
                                      [np.zeros(1)] * 3, np.zeros(1),
                                      reg_total_at_comparator=0.0)
    assert value == pytest.approx(0.0, abs=1e-15)


def test_strong_ftrl_decomposition_iterate_count_mismatch():
    with pytest.raises(ValueError):
        strong_ftrl_decomposition(lambda t, x: 0.0, [0.0], [np.zeros(1)], np.zeros(1), 0.0)


def test_decomposition_dominates_regret_on_random_runs():
    for seed in range(10):
        learner = DualAveraging(3, InverseSqrtRate(1.0 / math.sqrt(2), shift=1))
        stream = RandomLinearStream(seed, 3, 1.0)
        result = run_rounds(learner, stream, 50, BoundRule.DA_CLOSED_FORM,
                            BoundConfig(R=1.0, G=1.0), FeasibleSet.l2_ball(1.0))
        assert result.decomposition_ok
        assert np.all(result.record.cum_regret <= result.record.strong_ftrl_rhs + 1e-9)


def test_regret_record_validates_prefix_sums():
    with pytest.raises(ValueError):
        RegretRecord(loss=np.array([1.0]), comp_loss=np.array([0.0]),
                     cum_regret=np.array([2.0]), bound=np.array([3.0]),
                     strong_ftrl_rhs=np.array([3.0]))
    with pytest.raises(ValueError):
        RegretRecord(loss=np.array([1.0, 2.0]), comp_loss=np.array([0.0]),
                     cum_regret=np.array([1.0]), bound=np.array([3.0]),
                     strong_ftrl_rhs=np.array([3.0]))


def test_per_coordinate_bound_dominates_fixed_rate_under_uniform_caps():
    from ocokit import suites

    result = suites.suite_percoord_dominance(n_streams=50)
    assert result.passed, result.failures


def test_composite_bound_holds_for_the_accumulated_penalty_learner():
    from ocokit.learners import FtrlCompositeL1

    for seed in range(8):
        learner = FtrlCompositeL1(3, ConstantRate(0.2), 0.1)
        stream = RandomLinearStream(seed, 3, 1.0)
        result = run_rounds(learner, stream, 40, BoundRule.COMPOSITE,
                            BoundConfig(R=1.0, G=1.0), FeasibleSet.l2_ball(1.0))
        assert result.bound_ok
        assert result.decomposition_ok
