import numpy as np
import pytest


def _drive(learner, grads, hints=None):
    for t in range(len(grads)):
        learner.play(None if hints is None else hints[t])
        learner.submit(grads[t])
    return learner.finalize()


def test_plays_do_not_depend_on_lambda():
    from delayed_oco.omd_learners import DORM, DORMPlus
    rng = np.random.default_rng(0)
    for idx in range(20):
        d = int(rng.integers(2, 6))
        D = [0, 1, 3][idx % 3]
        q = [2.0, 3.0][idx % 2]
        T = int(rng.integers(5, 40))
        grads = rng.normal(size=(T, d))
        hints = rng.normal(scale=0.3, size=(T, d))
        for cls in [DORM, DORMPlus]:
            plays = [_drive(cls(d, D, q=q, lam=lam), grads, hints).plays
                     for lam in [0.1, 1.0, 10.0]]
            assert np.abs(plays[0] - plays[1]).max() <= 1e-9
            assert np.abs(plays[2] - plays[1]).max() <= 1e-9


def test_undelayed_dorm_is_regret_matching():
    from delayed_oco.omd_learners import DORM
    rng = np.random.default_rng(1)
    for _ in range(10):
        d = 4
        grads = rng.uniform(0, 1, size=(50, d))
        learner = DORM(d, 0, q=2, lam=1.0)
        cum = np.zeros(d)
        for g in grads:
            w = learner.play()
            pos = np.maximum(cum, 0)
            expected = pos / pos.sum() if pos.sum() > 0 else np.full(d, 1.0 / d)
            assert np.array_equal(w, expected)
            learner.submit(g)
            cum = cum + (np.dot(g, w) - g)


def test_undelayed_dormplus_is_regret_matching_plus():
    from delayed_oco.omd_learners import DORMPlus
    rng = np.random.default_rng(2)
    for _ in range(10):
        d = 3
        grads = rng.uniform(0, 1, size=(50, d))
        learner = DORMPlus(d, 0, q=2, lam=1.0)
        Q = np.zeros(d)
        for g in grads:
            w = learner.play()
            expected = Q / Q.sum() if Q.sum() > 0 else np.full(d, 1.0 / d)
            assert np.array_equal(w, expected)
            learner.submit(g)
            Q = np.maximum(Q + (np.dot(g, w) - g), 0)


def test_delayed_omd_is_undelayed_omd_with_a_bad_hint():
    from delayed_oco.omd_learners import doomd_orthant_iterates, soomd_with_bad_hint
    rng = np.random.default_rng(3)
    for idx in range(50):
        d = [2, 3, 5][idx % 3]
        D = [0, 1, 3][(idx // 3) % 3]
        q = [2.0, 3.0][idx % 2]
        T = int(rng.integers(1, 41))
        grads = rng.normal(size=(T, d))
        hints = rng.normal(size=(T, d))
        a = doomd_orthant_iterates(grads, hints, 1.0, q, schedule=D)
        b = soomd_with_bad_hint(grads, hints, 1.0, q, schedule=D)
        scale = max(1.0, float(np.abs(a).max()))
        assert np.abs(a - b).max() <= 1e-9 * scale


def test_dormplus_is_delayed_omd_on_negated_regrets():
    from delayed_oco.omd_learners import DORMPlus, doomd_orthant_iterates
    rng = np.random.default_rng(4)
    for D in [0, 1, 3]:
        T, d = 30, 3
        grads = rng.normal(size=(T, d))
        hints = rng.normal(scale=0.5, size=(T, d))
        history = _drive(DORMPlus(d, D, q=3.0), grads, hints)
        iterates = doomd_orthant_iterates(-history.regrets, -history.hints, 1.0, 3.0, schedule=D)
        scale = max(1.0, float(np.abs(iterates).max()))
        assert np.abs(history.iterates - iterates).max() <= 1e-9 * scale


def test_first_play_and_all_negative_regrets_are_uniform():
    from delayed_oco.omd_learners import DORM, DORMPlus
    for cls in [DORM, DORMPlus]:
        learner = cls(3, 0)
        assert learner.play().tolist() == [1 / 3] * 3
        # every expert is worse than the uniform play would suggest
        learner.submit([1., 1., 1.])
        assert np.allclose(learner.play([-1., -1., -1.]), [1 / 3] * 3)


def test_explicit_schedule_is_bit_identical_to_constant_delay():
    from delayed_oco.core import DelaySchedule
    from delayed_oco.omd_learners import DORM, DORMPlus
    rng = np.random.default_rng(5)
    T, d = 25, 4
    grads = rng.normal(size=(T, d))
    for cls in [DORM, DORMPlus]:
        for D in [0, 3]:
            table = DelaySchedule.explicit([t + D for t in range(1, T + 1)])
            a = _drive(cls(d, D), grads)
            b = _drive(cls(d, table), grads)
            assert np.array_equal(a.plays, b.plays)


def test_replicated_copies_are_isolated():
    from delayed_oco.omd_learners import DORMPlus, replicate
    rng = np.random.default_rng(6)
    d = 3
    for D in [0, 1, 3]:
        T = 37
        grads = rng.normal(size=(T, d))
        learner = replicate(lambda: DORMPlus(d, 0), D)
        history = _drive(learner, grads)
        assert sum(copy.t for copy in learner.copies) == T
        for idx, copy in enumerate(learner.copies):
            solo = _drive(DORMPlus(d, 0), grads[idx::D + 1])
            assert np.array_equal(copy.history().plays, solo.plays)
            assert np.array_equal(history.plays[idx::D + 1], solo.plays)
        assert len(history.copies) == D + 1


def test_replicated_hint_frame_is_the_next_copy():
    from delayed_oco.omd_learners import DORMPlus, replicate
    learner = replicate(lambda: DORMPlus(2, 0), 2)
    frames = []
    for t in range(1, 7):
        frames.append(learner.copies.index(learner.hint_frame()))
        learner.play()
        learner.submit([0., 1.])
    assert frames == [0, 1, 2, 0, 1, 2]


def test_regret_matcher_validation():
    from delayed_oco.base_learner import Learner
    from delayed_oco.core import DelaySchedule, InvalidInputError
    from delayed_oco.omd_learners import DORM, DORMPlus, ReplicatedLearner, replicate
    with pytest.raises(InvalidInputError):
        DORM(2, 0, lam=0)
    with pytest.raises(InvalidInputError):
        DORMPlus(2, 0, q=1.5)
    with pytest.raises(InvalidInputError):
        replicate(lambda: DORMPlus(2, 0), -1)
    with pytest.raises(InvalidInputError):
        ReplicatedLearner([DORMPlus(2, 0)], 1)
    with pytest.raises(InvalidInputError):
        ReplicatedLearner([DORMPlus(2, 1), DORMPlus(2, 1)], 1)
    with pytest.raises(InvalidInputError):
        Learner.create('replicated-dormplus', d=2, schedule=DelaySchedule.explicit([1, 3, 3]))
