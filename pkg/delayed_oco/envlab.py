"""
Synthetic loss environments.

Two kinds of environments drive the learners:

* ``linear``: losses ``<g_t, w>`` on the simplex from a seeded generator
  (iid gaussian, a fixed best expert, or a best expert that switches every
  segment);
* ``rmse``: an ensembling task where each of the ``d`` experts is a noisy
  forecast of a ``G``-dimensional target and the loss of a mixture is its
  root mean squared error.

Both expose ``loss_and_subgradient(t, w)`` for the protocol loop and
``expert_losses(t)`` for regret against each individual expert.

Example:
    >>> from delayed_oco.envlab import make_environment
    >>> env = make_environment({'kind': 'linear', 'generator': 'fixed-best',
    >>>                         'd': 2, 'T': 3, 'sigma': 0, 'gap': 1})
    >>> env.loss_and_subgradient(1, [0.5, 0.5])
    (0.5, array([0., 1.]))
"""
import logging
import math
import numpy as np
import scriptconfig as scfg
import ubelt as ub

from delayed_oco.core import (IncompleteHistoryError, InvalidInputError,
                              coerce_vector)

logger = logging.getLogger(__name__)

GENERATORS = ('iid-gaussian', 'switching-best-expert', 'fixed-best')
SKILL_PROFILES = ('dominant', 'uniform', 'explicit')


class LinearStreamSpec(scfg.DataConfig):
    """
    Parameters of a linear loss stream.
    """
    d = scfg.Value(3, help='number of experts')
    T = scfg.Value(100, help='number of rounds')
    generator = scfg.Value('iid-gaussian', choices=list(GENERATORS), help='the loss generator')
    mu = scfg.Value(0.0, help='mean of the iid-gaussian generator, a scalar or a list of d values')
    sigma = scfg.Value(1.0, help='standard deviation of the additive noise')
    gap = scfg.Value(1.0, help='loss gap between the best expert and the others')
    segment = scfg.Value(50, help='rounds per segment of the switching generator')
    seed = scfg.Value(0, help='random seed')

    def __post_init__(config):
        from delayed_oco.util.util_yaml import Yaml
        if isinstance(config['mu'], str):
            config['mu'] = Yaml.coerce(config['mu'])
        if int(config['T']) < 1:
            raise InvalidInputError(f'T={config["T"]} must be at least 1')
        if int(config['d']) < 1:
            raise InvalidInputError(f'd={config["d"]} must be at least 1')
        if float(config['sigma']) < 0:
            raise InvalidInputError(f'sigma={config["sigma"]} must be nonnegative')
        if float(config['gap']) < 0:
            raise InvalidInputError(f'gap={config["gap"]} must be nonnegative')
        if int(config['segment']) < 1:
            raise InvalidInputError(f'segment={config["segment"]} must be at least 1')
        if config['generator'] not in GENERATORS:
            raise InvalidInputError(f'generator={config["generator"]!r} must be one of {GENERATORS}')


class RmseEnvSpec(scfg.DataConfig):
    """
    Parameters of the synthetic forecast-ensembling environment.
    """
    d = scfg.Value(3, help='number of input models')
    G = scfg.Value(100, help='number of gridpoints per round')
    T = scfg.Value(100, help='number of rounds')
    profile = scfg.Value('dominant', choices=list(SKILL_PROFILES), help=ub.paragraph(
        '''
        Model skill profile. "dominant" makes model 0 accurate and the others
        noisier, "uniform" gives every model the same noise, "explicit" reads
        the bias and noise lists.
        '''))
    bias = scfg.Value(None, help='per-model additive bias (explicit profile)')
    noise = scfg.Value(None, help='per-model noise level (explicit profile)')
    signal = scfg.Value(1.0, help='standard deviation of the target field')
    seed = scfg.Value(0, help='random seed')

    def __post_init__(config):
        from delayed_oco.util.util_yaml import Yaml
        for key in ['bias', 'noise']:
            if isinstance(config[key], str):
                config[key] = Yaml.coerce(config[key])
        if int(config['G']) < 1:
            raise InvalidInputError(f'G={config["G"]} must be at least 1')
        if int(config['T']) < 1:
            raise InvalidInputError(f'T={config["T"]} must be at least 1')
        if int(config['d']) < 1:
            raise InvalidInputError(f'd={config["d"]} must be at least 1')
        if config['profile'] not in SKILL_PROFILES:
            raise InvalidInputError(f'profile={config["profile"]!r} must be one of {SKILL_PROFILES}')

    def skill(config):
        """
        Returns:
            Tuple[np.ndarray, np.ndarray]: per-model bias and noise level
        """
        d = int(config['d'])
        if config['profile'] == 'dominant':
            bias = np.zeros(d)
            noise = np.ones(d)
            if d > 1:
                noise[1:] = np.linspace(1.2, 1.3, d - 1)
        elif config['profile'] == 'uniform':
            bias = np.zeros(d)
            noise = np.ones(d)
        else:
            if config['bias'] is None or config['noise'] is None:
                raise InvalidInputError('the explicit profile needs bias and noise lists')
            bias = np.broadcast_to(np.asarray(config['bias'], dtype=float), (d,)).copy()
            noise = np.broadcast_to(np.asarray(config['noise'], dtype=float), (d,)).copy()
        if np.any(noise < 0):
            raise InvalidInputError('model noise levels must be nonnegative')
        return bias, noise


def generate_stream(spec):
    """
    Draw the ``(T, d)`` loss vectors of a linear stream.

    Args:
        spec (LinearStreamSpec | dict): stream parameters

    Returns:
        np.ndarray

    Example:
        >>> from delayed_oco.envlab import generate_stream
        >>> generate_stream(dict(generator='fixed-best', d=2, T=2, sigma=0, gap=1)).tolist()
        [[0.0, 1.0], [0.0, 1.0]]
        >>> stream = generate_stream(dict(generator='switching-best-expert', d=2, T=4, segment=2, sigma=0))
        >>> stream.argmin(axis=1).tolist()
        [0, 0, 1, 1]
    """
    if not isinstance(spec, LinearStreamSpec):
        spec = LinearStreamSpec(**spec)
    d = int(spec['d'])
    T = int(spec['T'])
    sigma = float(spec['sigma'])
    gap = float(spec['gap'])
    rng = np.random.default_rng(spec['seed'])
    noise = rng.normal(0.0, 1.0, size=(T, d))
    generator = spec['generator']
    if generator == 'iid-gaussian':
        mu = np.broadcast_to(np.asarray(spec['mu'], dtype=float), (d,))
        return mu[None, :] + sigma * noise
    if generator == 'fixed-best':
        best = np.zeros(T, dtype=int)
    else:
        best = (np.arange(T) // int(spec['segment'])) % d
    base = np.full((T, d), gap)
    base[np.arange(T), best] = 0.0
    if sigma == 0:
        return base
    return base + sigma * noise


def rmse_loss_and_subgradient(X, y, w):
    """
    Loss ``||y - X w||_2 / sqrt(G)`` and one of its subgradients.

    Args:
        X (np.ndarray): ``(G, d)`` model forecasts
        y (np.ndarray): ``(G,)`` target
        w (ArrayLike): simplex weights

    Returns:
        Tuple[float, np.ndarray]

    Example:
        >>> from delayed_oco.envlab import rmse_loss_and_subgradient
        >>> loss, g = rmse_loss_and_subgradient(np.array([[1., 3.]]), np.array([2.]), [1., 0.])
        >>> loss, g.tolist()
        (1.0, [-1.0, -3.0])
        >>> rmse_loss_and_subgradient(np.array([[1., 3.]]), np.array([2.]), [.5, .5])[1].tolist()
        [0.0, 0.0]
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise InvalidInputError(f'shape mismatch between X {X.shape} and y {y.shape}')
    w = coerce_vector(w, d=X.shape[1], name='w')
    G = X.shape[0]
    residual = X @ w - y
    norm = float(np.linalg.norm(residual))
    if norm == 0:
        return 0.0, np.zeros(X.shape[1])
    loss = norm / math.sqrt(G)
    g = X.T @ residual / (math.sqrt(G) * norm)
    return float(loss), g


class LinearEnvironment(ub.NiceRepr):
    """
    Linear losses ``<g_t, w>`` from a precomputed stream.
    """
    kind = 'linear'

    def __init__(self, grads):
        grads = np.asarray(grads, dtype=float)
        if grads.ndim != 2:
            raise InvalidInputError(f'expected a (T, d) stream, got shape {grads.shape}')
        self.grads = grads
        self.T, self.d = grads.shape

    def __nice__(self):
        return f'T={self.T}, d={self.d}'

    @classmethod
    def from_spec(cls, spec):
        return cls(generate_stream(spec))

    def _check_round(self, t):
        if not 1 <= t <= self.T:
            raise InvalidInputError(f'round {t} is outside 1..{self.T}')

    def loss_and_subgradient(self, t, w):
        self._check_round(t)
        w = coerce_vector(w, d=self.d, name='w')
        g = self.grads[t - 1].copy()
        return float(np.dot(g, w)), g

    def expert_losses(self, t):
        self._check_round(t)
        return self.grads[t - 1].copy()


class RmseEnvironment(ub.NiceRepr):
    """
    Forecast ensembling with RMSE loss on synthetic data.

    Each round draws a target field ``y_t`` with ``G`` gridpoints, and model
    ``i`` forecasts ``y_t + bias_i + noise_i * eps``.

    Example:
        >>> from delayed_oco.envlab import RmseEnvironment
        >>> env = RmseEnvironment.from_spec(dict(d=3, G=400, T=5, seed=1))
        >>> losses = np.array([env.expert_losses(t) for t in range(1, 6)])
        >>> bool(np.all(losses[:, 0] < losses[:, 1:].min(axis=1)))
        True
    """
    kind = 'rmse'

    def __init__(self, X, Y):
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        if X.ndim != 3 or Y.shape != X.shape[:2]:
            raise InvalidInputError(f'expected X (T, G, d) and Y (T, G), got {X.shape} and {Y.shape}')
        self.X = X
        self.Y = Y
        self.T, self.G, self.d = X.shape

    def __nice__(self):
        return f'T={self.T}, G={self.G}, d={self.d}'

    @classmethod
    def from_spec(cls, spec):
        if not isinstance(spec, RmseEnvSpec):
            spec = RmseEnvSpec(**spec)
        T, G, d = int(spec['T']), int(spec['G']), int(spec['d'])
        bias, noise = spec.skill()
        rng = np.random.default_rng(spec['seed'])
        Y = rng.normal(0.0, float(spec['signal']), size=(T, G))
        eps = rng.normal(0.0, 1.0, size=(T, G, d))
        X = Y[:, :, None] + bias[None, None, :] + noise[None, None, :] * eps
        return cls(X, Y)

    def _check_round(self, t):
        if not 1 <= t <= self.T:
            raise InvalidInputError(f'round {t} is outside 1..{self.T}')

    def loss_and_subgradient(self, t, w):
        self._check_round(t)
        return rmse_loss_and_subgradient(self.X[t - 1], self.Y[t - 1], w)

    def expert_losses(self, t):
        self._check_round(t)
        residual = self.X[t - 1] - self.Y[t - 1][:, None]
        return np.sqrt(np.mean(residual ** 2, axis=0))


def make_environment(spec, **overrides):
    """
    Build an environment from a spec dictionary with a ``kind`` key.

    Args:
        spec (dict | LinearStreamSpec | RmseEnvSpec): environment parameters;
            ``kind`` is 'linear' (default) or 'rmse'
        **overrides: fields that replace the spec's (e.g. d, T, seed)

    Returns:
        LinearEnvironment | RmseEnvironment
    """
    if isinstance(spec, RmseEnvSpec):
        data, kind = spec.to_dict(), 'rmse'
    elif isinstance(spec, LinearStreamSpec):
        data, kind = spec.to_dict(), 'linear'
    else:
        data = dict(spec or {})
        kind = data.pop('kind', 'linear')
    data.update({k: v for k, v in overrides.items() if v is not None})
    if kind == 'linear':
        fields = set(LinearStreamSpec.__default__)
        env = LinearEnvironment.from_spec(LinearStreamSpec(**ub.udict(data) & fields))
    elif kind == 'rmse':
        fields = set(RmseEnvSpec.__default__)
        env = RmseEnvironment.from_spec(RmseEnvSpec(**ub.udict(data) & fields))
    else:
        raise InvalidInputError(f'unknown environment kind {kind!r}, expected linear or rmse')
    unused = set(data) - fields
    if unused:
        logger.warning('ignoring environment fields %s', sorted(unused))
    return env


def dump_stream_csv(stream, fpath):
    """
    Write a ``(T, d)`` stream as CSV with header ``t,coord_0..coord_{d-1}``.

    Example:
        >>> from delayed_oco.envlab import dump_stream_csv
        >>> dpath = ub.Path.appdir('delayed_oco/tests/envlab').ensuredir()
        >>> fpath = dump_stream_csv(np.eye(2), dpath / 'stream.csv')
        >>> print(fpath.read_text().strip())
        t,coord_0,coord_1
        1,1,0
        2,0,1
    """
    import pandas as pd
    stream = np.asarray(stream, dtype=float)
    d = stream.shape[1]
    table = pd.DataFrame(stream, columns=[f'coord_{i}' for i in range(d)])
    table.insert(0, 't', np.arange(1, len(stream) + 1))
    fpath = ub.Path(fpath)
    table.to_csv(fpath, index=False, float_format='%.12g')
    return fpath


class RegretRecord(ub.NiceRepr):
    """
    Cumulative regret of a run against every expert.

    Attributes:
        cum_loss (float): total loss of the learner
        expert_cum_loss (np.ndarray): total loss of each expert
        per_vertex (np.ndarray): regret against each expert
        best (float): regret against the best expert in hindsight
        best_index (int): that expert
    """

    def __init__(self, cum_loss, expert_cum_loss):
        self.cum_loss = float(cum_loss)
        self.expert_cum_loss = np.asarray(expert_cum_loss, dtype=float)
        self.per_vertex = self.cum_loss - self.expert_cum_loss
        self.best_index = int(np.argmin(self.expert_cum_loss))
        self.best = float(self.per_vertex[self.best_index])

    def __nice__(self):
        return f'best={self.best:.6g}, expert={self.best_index}'

    def to_dict(self):
        return {
            'cum_loss': self.cum_loss,
            'regret_best': self.best,
            'best_expert': self.best_index,
            'regret_per_vertex': self.per_vertex.tolist(),
        }


def best_competitor_regret(expert_losses, plays=None, learner_losses=None):
    """
    Regret against every vertex of the simplex.

    Args:
        expert_losses (ArrayLike): ``(T, d)`` loss of each expert per round
        plays (ArrayLike | None): ``(T, d)`` plays; with linear losses the
            learner's loss is ``<expert_losses[t], plays[t]>``
        learner_losses (ArrayLike | None): ``(T,)`` realized learner losses,
            used instead of the plays for nonlinear losses

    Returns:
        RegretRecord

    Example:
        >>> from delayed_oco.envlab import best_competitor_regret
        >>> record = best_competitor_regret([[1., 0.], [1., 0.]], plays=[[.5, .5], [0., 1.]])
        >>> record.per_vertex.tolist(), record.best
        ([-1.5, 0.5], 0.5)
    """
    expert_losses = np.asarray(expert_losses, dtype=float)
    if expert_losses.ndim != 2:
        raise InvalidInputError('expert_losses must be a (T, d) array')
    T = expert_losses.shape[0]
    if learner_losses is None:
        if plays is None:
            raise InvalidInputError('need either the plays or the learner losses')
        plays = np.asarray(plays, dtype=float)
        if plays.shape != expert_losses.shape:
            raise IncompleteHistoryError(
                f'plays have shape {plays.shape}, expected {expert_losses.shape}')
        learner_losses = [float(np.dot(expert_losses[t], plays[t])) for t in range(T)]
    learner_losses = np.asarray(learner_losses, dtype=float)
    if learner_losses.shape != (T,):
        raise IncompleteHistoryError(f'expected {T} learner losses, got {learner_losses.shape}')
    cum_loss = 0.0
    for value in learner_losses:
        cum_loss += value
    return RegretRecord(cum_loss, expert_losses.sum(axis=0))
