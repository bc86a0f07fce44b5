import numpy as np
import pytest


def test_rmse_loss_is_convex_on_the_simplex():
    from delayed_oco.envlab import RmseEnvironment
    env = RmseEnvironment.from_spec(dict(d=4, G=50, T=10, seed=0))
    rng = np.random.default_rng(0)
    for t in range(1, 11):
        for _ in range(20):
            w1, w2 = rng.dirichlet(np.ones(4), size=2)
            a = float(rng.uniform())
            mix = a * w1 + (1 - a) * w2
            lhs = env.loss_and_subgradient(t, mix)[0]
            rhs = a * env.loss_and_subgradient(t, w1)[0] + (1 - a) * env.loss_and_subgradient(t, w2)[0]
            assert lhs <= rhs + 1e-12


def test_rmse_subgradient_matches_finite_differences():
    from delayed_oco.envlab import rmse_loss_and_subgradient
    rng = np.random.default_rng(1)
    eps = 1e-6
    for _ in range(50):
        G, d = 20, 3
        X = rng.normal(size=(G, d))
        y = rng.normal(size=G)
        w = rng.dirichlet(np.ones(d))
        _, g = rmse_loss_and_subgradient(X, y, w)
        numeric = np.zeros(d)
        for i in range(d):
            step = np.zeros(d)
            step[i] = eps
            # the loss extends to all of R^d, so off-simplex steps are fine
            hi = rmse_loss_and_subgradient(X, y, w + step)[0]
            lo = rmse_loss_and_subgradient(X, y, w - step)[0]
            numeric[i] = (hi - lo) / (2 * eps)
        assert np.abs(g - numeric).max() <= 1e-5 * max(1.0, np.abs(numeric).max())


def test_streams_are_deterministic_in_the_seed():
    from delayed_oco.envlab import RmseEnvironment, generate_stream
    spec = dict(generator='iid-gaussian', d=3, T=20, seed=7)
    assert np.array_equal(generate_stream(spec), generate_stream(spec))
    assert not np.array_equal(generate_stream(spec), generate_stream({**spec, 'seed': 8}))
    a = RmseEnvironment.from_spec(dict(d=2, G=10, T=3, seed=4))
    b = RmseEnvironment.from_spec(dict(d=2, G=10, T=3, seed=4))
    assert np.array_equal(a.X, b.X) and np.array_equal(a.Y, b.Y)


def test_generators():
    from delayed_oco.envlab import generate_stream
    stream = generate_stream(dict(generator='switching-best-expert', d=3, T=9, segment=2, sigma=0, gap=2))
    assert stream.argmin(axis=1).tolist() == [0, 0, 1, 1, 2, 2, 0, 0, 1]
    assert set(np.unique(stream).tolist()) == {0.0, 2.0}
    stream = generate_stream(dict(generator='iid-gaussian', d=2, T=2000, mu=[1, -1], sigma=0.1))
    assert np.allclose(stream.mean(axis=0), [1, -1], atol=0.02)
    noisy = generate_stream(dict(generator='fixed-best', d=3, T=500, sigma=0.3, gap=1, seed=2))
    assert int(noisy.sum(axis=0).argmin()) == 0


def test_regret_record_matches_a_brute_force_oracle():
    from delayed_oco.envlab import best_competitor_regret
    rng = np.random.default_rng(3)
    for _ in range(20):
        T, d = 15, 4
        losses = rng.normal(size=(T, d))
        plays = rng.dirichlet(np.ones(d), size=T)
        record = best_competitor_regret(losses, plays=plays)
        learner_total = sum(float(np.dot(losses[t], plays[t])) for t in range(T))
        oracle = [learner_total - sum(losses[t, i] for t in range(T)) for i in range(d)]
        assert np.allclose(record.per_vertex, oracle, atol=1e-12)
        assert abs(record.best - max(oracle)) < 1e-12
        assert record.best_index == int(np.argmax(oracle))
        info = record.to_dict()
        assert set(info) == {'cum_loss', 'regret_best', 'best_expert', 'regret_per_vertex'}


def test_dominant_profile_ranks_the_first_model_best():
    from delayed_oco.envlab import RmseEnvSpec, RmseEnvironment
    spec = RmseEnvSpec(d=4, G=100, T=50, seed=5)
    bias, noise = spec.skill()
    assert noise[0] == 1.0 and np.all(noise[1:] > 1.0)
    env = RmseEnvironment.from_spec(spec)
    totals = np.sum([env.expert_losses(t) for t in range(1, 51)], axis=0)
    assert int(totals.argmin()) == 0
    uniform = RmseEnvSpec(d=3, profile='uniform').skill()
    assert uniform[1].tolist() == [1.0, 1.0, 1.0]
    explicit = RmseEnvSpec(d=2, profile='explicit', bias='[0, 1]', noise=0.5).skill()
    assert explicit[0].tolist() == [0.0, 1.0]
    assert explicit[1].tolist() == [0.5, 0.5]


def test_make_environment_overrides_and_kinds():
    from delayed_oco.envlab import (LinearEnvironment, LinearStreamSpec,
                                    RmseEnvironment, make_environment)
    env = make_environment({'generator': 'fixed-best', 'd': 5}, d=2, T=4, seed=None)
    assert isinstance(env, LinearEnvironment)
    assert (env.T, env.d) == (4, 2)
    env = make_environment({'kind': 'rmse', 'G': 7}, d=3, T=2)
    assert isinstance(env, RmseEnvironment)
    assert (env.T, env.G, env.d) == (2, 7, 3)
    env = make_environment(LinearStreamSpec(d=2, T=3))
    assert env.grads.shape == (3, 2)
    # unknown fields are dropped with a warning
    env = make_environment({'generator': 'fixed-best', 'unused': 1}, d=2, T=2)
    assert env.d == 2


def test_stream_csv_layout():
    import pandas as pd
    import ubelt as ub
    from delayed_oco.envlab import dump_stream_csv, generate_stream
    dpath = ub.Path.appdir('delayed_oco/tests/test_envlab').ensuredir()
    stream = generate_stream(dict(d=3, T=5, seed=1))
    fpath = dump_stream_csv(stream, dpath / 'stream.csv')
    table = pd.read_csv(fpath)
    assert table.columns.tolist() == ['t', 'coord_0', 'coord_1', 'coord_2']
    assert np.allclose(table[['coord_0', 'coord_1', 'coord_2']].to_numpy(), stream, rtol=1e-11)


def test_environment_errors():
    from delayed_oco.core import IncompleteHistoryError, InvalidInputError
    from delayed_oco.envlab import (LinearEnvironment, LinearStreamSpec,
                                    RmseEnvSpec, best_competitor_regret,
                                    make_environment, rmse_loss_and_subgradient)
    with pytest.raises(InvalidInputError):
        LinearStreamSpec(sigma=-1)
    with pytest.raises(InvalidInputError):
        LinearStreamSpec(T=0)
    with pytest.raises(InvalidInputError):
        RmseEnvSpec(G=0)
    with pytest.raises(InvalidInputError):
        RmseEnvSpec(profile='explicit').skill()
    with pytest.raises(InvalidInputError):
        make_environment({'kind': 'weather'})
    with pytest.raises(InvalidInputError):
        rmse_loss_and_subgradient(np.zeros((3, 2)), np.zeros(4), [0.5, 0.5])
    env = LinearEnvironment(np.zeros((2, 2)))
    with pytest.raises(InvalidInputError):
        env.loss_and_subgradient(3, [0.5, 0.5])
    with pytest.raises(InvalidInputError):
        env.loss_and_subgradient(1, [1.0])
    with pytest.raises(IncompleteHistoryError):
        best_competitor_regret(np.zeros((3, 2)), plays=np.zeros((2, 2)))
    with pytest.raises(InvalidInputError):
        best_competitor_regret(np.zeros((3, 2)))
