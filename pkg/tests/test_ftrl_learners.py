import math
import numpy as np
import pytest


def _drive(learner, grads, hints=None):
    T, d = grads.shape
    for t in range(T):
        hint = None if hints is None else hints[t]
        learner.play(hint)
        learner.submit(grads[t])
    return learner.finalize()


def _stream_instances(num=50, seed=0):
    rng = np.random.default_rng(seed)
    for idx in range(num):
        d = [2, 3, 5][idx % 3]
        D = [0, 1, 3][(idx // 3) % 3]
        T = int(rng.integers(1, 41))
        grads = rng.normal(size=(T, d))
        hints = rng.normal(size=(T, d))
        yield d, D, T, grads, hints


def test_delayed_ftrl_is_undelayed_ftrl_with_a_bad_hint():
    from delayed_oco.ftrl_learners import ODAFTRL, oftrl_with_bad_hint
    for d, D, T, grads, hints in _stream_instances():
        learner = ODAFTRL(d, schedule=D, tuning='constant', lam=1.0)
        history = _drive(learner, grads, hints)
        undelayed = oftrl_with_bad_hint(grads, hints, 1.0, schedule=D)
        assert np.abs(history.plays - undelayed).max() <= 1e-9


def test_perfect_hints_reproduce_undelayed_plays():
    from delayed_oco.ftrl_learners import ODAFTRL, oftrl_plays
    from delayed_oco.util.util_algo import window_sum
    rng = np.random.default_rng(3)
    T, d, D = 25, 3, 2
    grads = rng.normal(size=(T, d))
    items = list(grads)
    # the delayed learner sees the missing window plus the next gradient
    hints = np.array([window_sum(items, max(t - D - 1, 0), t) for t in range(1, T + 1)])
    history = _drive(ODAFTRL(d, schedule=D, tuning='constant', lam=0.7), grads, hints)
    oracle_hints = np.array(grads)
    plays = oftrl_plays(grads, oracle_hints, 0.7)
    assert np.abs(history.plays - plays).max() <= 1e-9


def test_adahedged_internals():
    from delayed_oco.ftrl_learners import ODAFTRL
    rng = np.random.default_rng(4)
    for idx in range(30):
        d = int(rng.integers(2, 7))
        D = [0, 1, 3][idx % 3]
        T = int(rng.integers(5, 80))
        grads = rng.normal(size=(T, d))
        hints = rng.normal(scale=0.5, size=(T, d)) if idx % 2 else None
        learner = ODAFTRL(d, schedule=D, tuning='adahedged')
        history = _drive(learner, grads, hints)
        deltas = history.deltas
        assert len(deltas) == T
        assert np.all(deltas >= 0)
        for delta, lam, a, b in zip(deltas, history.lambdas, history.a_terms, history.b_terms):
            limit = a if lam == 0 else min(b / lam, a)
            assert delta <= limit + 1e-9 * max(1.0, limit)
        assert np.all(np.diff(history.lambdas) >= 0)
        total = learner._delta_total[-1]
        lam_final = learner.lam_at(T + D + 1)
        assert math.isclose(learner.alpha * lam_final, total, rel_tol=1e-12, abs_tol=1e-15)
        assert math.isclose(total, float(np.sum(deltas)), rel_tol=1e-12, abs_tol=1e-15)


def test_adahedged_with_perfect_hints_keeps_lambda_zero():
    from delayed_oco.ftrl_learners import ODAFTRL
    from delayed_oco.util.util_algo import window_sum
    rng = np.random.default_rng(5)
    for D in [0, 1, 3]:
        T, d = 60, 4
        grads = rng.normal(size=(T, d))
        items = list(grads)
        hints = np.array([window_sum(items, max(t - D - 1, 0), t, d=d)
                          for t in range(1, T + 1)])
        learner = ODAFTRL(d, schedule=D, tuning='adahedged')
        history = _drive(learner, grads, hints)
        assert np.all(history.lambdas == 0)
        assert np.all(history.deltas == 0)


def test_constant_tuning_keeps_lambda():
    from delayed_oco.ftrl_learners import ODAFTRL
    rng = np.random.default_rng(6)
    grads = rng.normal(size=(10, 3))
    history = _drive(ODAFTRL(3, schedule=1, tuning='constant', lam=2.5), grads)
    assert history.lambdas.tolist() == [2.5] * 10


def test_dub_first_update():
    from delayed_oco.ftrl_learners import ODAFTRL
    learner = ODAFTRL(2, schedule=0, tuning='dub', alpha=1.0)
    # x = ||h - g||_inf = 2.25 and y = ||g||_inf = 0.5 give a = 1 and b = 1
    learner.play([2.75, 0.])
    learner.submit([0.5, 0.])
    assert learner.a_terms == [1.0]
    assert learner.b_terms == [1.0]
    assert abs(learner.lam_at(2) - math.sqrt(3)) < 1e-12
    assert np.all(np.diff(_drive(ODAFTRL(3, 2, tuning='dub'),
                                 np.random.default_rng(0).normal(size=(40, 3))).lambdas) >= 0)


def test_zero_lambda_play_is_the_argmax_vertex():
    from delayed_oco.ftrl_learners import ODAFTRL
    learner = ODAFTRL(3, schedule=0, tuning='adahedged')
    assert learner.play([1., 2., 0.]).tolist() == [0.0, 0.0, 1.0]
    learner2 = ODAFTRL(3, schedule=0, tuning='constant', lam=1.0)
    assert np.allclose(learner2.play(), [1 / 3] * 3)


def test_explicit_schedule_is_bit_identical_to_constant_delay():
    from delayed_oco.core import DelaySchedule
    from delayed_oco.ftrl_learners import ODAFTRL
    rng = np.random.default_rng(7)
    T, d = 30, 3
    grads = rng.normal(size=(T, d))
    for tuning in ['constant', 'dub', 'adahedged']:
        for D in [0, 2]:
            table = DelaySchedule.explicit([t + D for t in range(1, T + 1)])
            a = _drive(ODAFTRL(d, D, tuning=tuning), grads)
            b = _drive(ODAFTRL(d, table, tuning=tuning), grads)
            assert np.array_equal(a.plays, b.plays)
            assert np.array_equal(a.lambdas, b.lambdas)


def test_adahedged_delta_examples():
    from delayed_oco.ftrl_learners import adahedged_delta
    # zero weight: the play gap <g_prefix, w> - min g_prefix is the smallest term
    delta = adahedged_delta([0., 1.], [0., 0.], [0., 0.], [1., 2.], [0., 2.], 0.0)
    assert delta == 1.0
    # a gradient of zero makes the linearized gap zero
    assert adahedged_delta([0., 1.], [5., 5.], [0., 0.], [1., 2.], [0., 0.], 0.0) == 0.0
    # a hint equal to the missing window leaves no gap to pay for
    rng = np.random.default_rng(9)
    for _ in range(20):
        d = 4
        w = rng.dirichlet(np.ones(d))
        window = rng.normal(size=d)
        prefix = rng.normal(size=d)
        g = rng.normal(size=d)
        delta = adahedged_delta(w, window, window, prefix, g, float(rng.uniform(0.1, 2)))
        assert 0.0 <= delta <= 1e-12


def test_dub_lambda_matches_the_envelope():
    from delayed_oco.bounds import dub_envelope
    from delayed_oco.core import DelaySchedule
    from delayed_oco.ftrl_learners import ODAFTRL
    rng = np.random.default_rng(10)
    schedules = [0, 1, 3] * 10 + [DelaySchedule.explicit([1, 4, 4, 6, 9, 9, 9, 10, 12, 12])]
    for schedule in schedules:
        d, T = 3, 10
        grads = rng.normal(size=(T, d))
        hints = rng.normal(scale=0.5, size=(T, d))
        learner = ODAFTRL(d, schedule=schedule, tuning='dub')
        history = _drive(learner, grads, hints)
        for t in range(T):
            expected = dub_envelope(history.a_terms, history.b_terms, learner.alpha,
                                    learner.schedule, t)
            assert abs(learner.lam_at(t + 1) - expected) <= 1e-12 * max(1.0, expected)
            assert history.lambdas[t] == learner.lam_at(t + 1)


def test_protocol_errors():
    from delayed_oco.core import InvalidInputError, ProtocolError
    from delayed_oco.ftrl_learners import ODAFTRL
    learner = ODAFTRL(2, schedule=0, tuning='constant')
    with pytest.raises(ProtocolError):
        learner.submit([0., 0.])
    learner.play()
    with pytest.raises(ProtocolError):
        # round 2 needs the feedback of round 1
        learner.play()
    with pytest.raises(InvalidInputError):
        learner.submit([0., 0., 0.])
    learner.submit([1., 0.])
    with pytest.raises(ProtocolError):
        learner.submit([1., 0.])
    with pytest.raises(ProtocolError):
        learner.receive([1., 0.], 3)
    with pytest.raises(InvalidInputError):
        ODAFTRL(2, tuning='nope')
    with pytest.raises(InvalidInputError):
        ODAFTRL(2, tuning='constant', lam=-1)
    with pytest.raises(InvalidInputError):
        ODAFTRL(2, tuning='dub', alpha=0)


def test_feedback_never_reaches_a_play_early():
    """
    Plays must not change when only feedback that is still hidden changes.
    """
    from delayed_oco.ftrl_learners import ODAFTRL
    rng = np.random.default_rng(8)
    T, d, D = 20, 3, 3
    grads = rng.normal(size=(T, d))
    base = _drive(ODAFTRL(d, D, tuning='adahedged'), grads)
    for t in range(1, T + 1):
        perturbed = grads.copy()
        perturbed[t - 1:] += rng.normal(size=(T - t + 1, d))
        other = _drive(ODAFTRL(d, D, tuning='adahedged'), perturbed)
        # rounds up to t + D cannot see g_t
        stop = min(t + D, T)
        assert np.array_equal(base.plays[:stop], other.plays[:stop])
