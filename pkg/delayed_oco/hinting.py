"""
Optimistic hints for the unobserved window of gradients (or regrets).

A hint for round t estimates the sum over the rounds ``s = last(t)+1 .. t``
whose feedback is missing when round t plays. The constant strategies guess
each missing ``g_s`` from revealed feedback:

* ``recent_g``: the most recently revealed gradient;
* ``prev_g``: the gradient one window length before ``s``;
* ``mean_g``: a scaled running mean of everything revealed;
* ``none``: zero.

The :class:`AdaptiveHinter` learns a convex combination of several such
columns with an undelayed-by-construction DORM+ (``q = 2``) over the columns,
driven by the hinting loss ``scale * ||H w - target||_q``.

Example:
    >>> from delayed_oco.hinting import constant_hint
    >>> grads = [np.array([1., 0.]), np.array([0., 2.])]
    >>> # D = 1, round 4: g_1, g_2 revealed, g_3 and g_4 missing
    >>> constant_hint('recent_g', grads, 4, 1).tolist()
    [0.0, 4.0]
    >>> constant_hint('prev_g', grads, 4, 1).tolist()
    [1.0, 2.0]
"""
import logging
import math
import numpy as np

from delayed_oco.base_learner import LearnerHistory
from delayed_oco.closed_forms import pnorm_subgradient
from delayed_oco.core import (DelaySchedule, InvalidInputError, ProtocolError,
                              coerce_vector, instantaneous_regret)
from delayed_oco.omd_learners import dormplus_step
from delayed_oco.util.util_algo import window_sum

logger = logging.getLogger(__name__)

HINT_STRATEGIES = ('recent_g', 'prev_g', 'mean_g', 'none')
MEAN_MODES = ('verbatim', 'plain')


def _guess(strategy, grads, s, k, lag, d, mean_mode):
    """
    The per-round guess of the missing gradient ``g_s`` given ``k`` revealed.
    """
    if strategy == 'none' or k == 0:
        return np.zeros(d)
    if strategy == 'recent_g':
        return grads[k - 1]
    if strategy == 'prev_g':
        src = s - lag
        return grads[src - 1] if src >= 1 else np.zeros(d)
    if strategy == 'mean_g':
        total = window_sum(grads, 0, k, d=d)
        if mean_mode == 'verbatim':
            return (lag / k) * total
        return total / k
    raise InvalidInputError(f'unknown hint strategy {strategy!r}, '
                            f'expected one of {HINT_STRATEGIES}')


def constant_hint(strategy, grads, t, schedule, d=None, space='gradient',
                  plays=None, mean_mode='verbatim'):
    """
    Build the hint of round ``t`` from a constant strategy.

    Args:
        strategy (str): one of :data:`HINT_STRATEGIES`
        grads (List[ArrayLike]): revealed gradients, ``grads[s - 1]`` is
            round s; at least ``last(t)`` of them
        t (int): the round being played
        schedule (int | DelaySchedule): delays
        d (int | None): dimension, required when nothing is revealed
        space (str): 'gradient' sums the guesses; 'regret' turns each guess
            into a pseudo-regret ``<g~_s, w_s> - g~_s`` using the plays, with
            ``w_{t-1}`` standing in for the unknown ``w_t``
        plays (List[ArrayLike] | None): plays of rounds ``1 .. t - 1``,
            required for the regret space
        mean_mode (str): 'verbatim' scales the mean by the window length,
            'plain' uses the mean itself

    Returns:
        np.ndarray

    Example:
        >>> from delayed_oco.hinting import constant_hint
        >>> constant_hint('none', [], 1, 0, d=3).tolist()
        [0.0, 0.0, 0.0]
        >>> grads = [np.array([2., 0.]), np.array([0., 2.])]
        >>> constant_hint('mean_g', grads, 3, 0).tolist()
        [1.0, 1.0]
        >>> plays = [np.array([.5, .5]), np.array([1., 0.])]
        >>> constant_hint('recent_g', grads, 3, 0, space='regret', plays=plays).tolist()
        [0.0, -2.0]
    """
    if t < 1:
        raise InvalidInputError(f'rounds start at 1, got t={t}')
    if strategy not in HINT_STRATEGIES:
        raise InvalidInputError(f'unknown hint strategy {strategy!r}, '
                                f'expected one of {HINT_STRATEGIES}')
    if mean_mode not in MEAN_MODES:
        raise InvalidInputError(f'mean_mode={mean_mode!r} must be one of {MEAN_MODES}')
    schedule = DelaySchedule.coerce(schedule)
    if d is None:
        if not len(grads):
            raise InvalidInputError('d is required when no gradient is revealed')
        d = len(grads[0])
    k = schedule.num_observable(t)
    if len(grads) < k:
        raise InvalidInputError(f'round {t} needs {k} revealed gradients, got {len(grads)}')
    lag = t - k
    grads = [np.asarray(g, dtype=float) for g in grads[:k]]
    hint = np.zeros(d)
    if space == 'gradient':
        for s in range(k + 1, t + 1):
            hint = hint + _guess(strategy, grads, s, k, lag, d, mean_mode)
        return hint
    if space != 'regret':
        raise InvalidInputError(f'space={space!r} must be gradient or regret')
    if plays is None or len(plays) < t - 1:
        raise InvalidInputError('regret-space hints need the plays of every earlier round')
    for s in range(k + 1, t + 1):
        guess = _guess(strategy, grads, s, k, lag, d, mean_mode)
        if s < t:
            w_s = np.asarray(plays[s - 1], dtype=float)
        elif t > 1:
            w_s = np.asarray(plays[t - 2], dtype=float)
        else:
            w_s = np.zeros(d)
        hint = hint + (np.dot(guess, w_s) - guess)
    return hint


def hint_matrix(strategies, frame, mean_mode='verbatim'):
    """
    The ``(d, m)`` matrix of constant-strategy hints for the next round of a
    learner, one column per strategy, computed in the learner's own frame.

    Args:
        strategies (List[str]): column strategies
        frame (Learner): usually ``learner.hint_frame()``
        mean_mode (str): see :func:`constant_hint`

    Returns:
        np.ndarray

    Example:
        >>> from delayed_oco.base_learner import Learner
        >>> from delayed_oco.hinting import hint_matrix
        >>> learner = Learner.create('adahedged', d=2, schedule=0)
        >>> _ = learner.play()
        >>> learner.submit([1., 3.])
        >>> hint_matrix(['recent_g', 'none'], learner).tolist()
        [[1.0, 0.0], [3.0, 0.0]]
    """
    if not len(strategies):
        raise InvalidInputError('a hint matrix needs at least one strategy')
    t = frame.t + 1
    columns = [
        constant_hint(strategy, frame.revealed, t, frame.schedule, d=frame.d,
                      space=frame.space, plays=frame.plays, mean_mode=mean_mode)
        for strategy in strategies
    ]
    return np.stack(columns, axis=1)


def _check_loss_inputs(omega, H, target):
    H = np.asarray(H, dtype=float)
    if H.ndim != 2:
        raise InvalidInputError(f'H must be a (d, m) matrix, got shape {H.shape}')
    d, m = H.shape
    omega = coerce_vector(omega, d=m, name='omega')
    target = coerce_vector(target, d=d, name='target')
    return omega, H, target


def hinting_loss(omega, H, target, scale, q_norm=2.0):
    """
    ``scale * ||H omega - target||_q``, convex in ``omega``.

    Example:
        >>> from delayed_oco.hinting import hinting_loss
        >>> hinting_loss([1, 0], np.eye(2), [0, 0], 1.0)
        1.0
        >>> hinting_loss([1, 0], np.eye(2), [1, 0], 3.0)
        0.0
    """
    omega, H, target = _check_loss_inputs(omega, H, target)
    scale = float(scale)
    if scale < 0:
        raise InvalidInputError(f'scale={scale} must be nonnegative')
    return float(scale * np.linalg.norm(H @ omega - target, ord=float(q_norm)))


def hinting_loss_subgradient(omega, H, target, scale, q_norm=2.0):
    """
    A subgradient of :func:`hinting_loss` with respect to ``omega``.

    Example:
        >>> from delayed_oco.hinting import hinting_loss_subgradient
        >>> hinting_loss_subgradient([1, 0], np.eye(2), [0, 0], 1.0).tolist()
        [1.0, 0.0]
        >>> hinting_loss_subgradient([.5, .5], np.eye(2), [.5, .5], 1.0).tolist()
        [0.0, 0.0]
    """
    omega, H, target = _check_loss_inputs(omega, H, target)
    return float(scale) * (H.T @ pnorm_subgradient(H @ omega - target, float(q_norm)))


class AdaptiveHinter:
    """
    Learns to combine hint columns with DORM+ (``q = 2``, no meta-hints).

    Call :func:`hint` once per round with the round's hint matrix, then
    :func:`observe` the meta-feedback of earlier rounds, in round order,
    whenever its target and scale become available.

    Args:
        strategies (List[str]): the constant strategy of each column
        q_norm (float): norm of the hinting loss
        mean_mode (str): see :func:`constant_hint`

    Example:
        >>> from delayed_oco.hinting import AdaptiveHinter
        >>> hinter = AdaptiveHinter(['recent_g', 'none'])
        >>> H = np.array([[1., 0.], [0., 0.]])
        >>> hinter.hint(H).tolist()
        [0.5, 0.0]
        >>> hinter.observe(1, target=[1., 0.], scale=1.0)
        >>> hinter.hint(H).tolist()
        [1.0, 0.0]
    """

    def __init__(self, strategies, q_norm=2.0, mean_mode='verbatim'):
        strategies = list(strategies)
        if not strategies:
            raise InvalidInputError('the hinter needs at least one strategy')
        for strategy in strategies:
            if strategy not in HINT_STRATEGIES:
                raise InvalidInputError(f'unknown hint strategy {strategy!r}')
        self.strategies = strategies
        self.m = len(strategies)
        self.q_norm = float(q_norm)
        self.mean_mode = mean_mode
        self.omega_tilde = np.zeros(self.m)
        self.omegas = []
        self.matrices = []
        self.meta_last = []
        self.gammas = []
        self.rhos = []
        self.losses = []
        self.column_losses = []
        self._applied = 0

    @property
    def num_observed(self):
        return len(self.rhos)

    def matrix(self, frame):
        return hint_matrix(self.strategies, frame, mean_mode=self.mean_mode)

    def hint(self, H):
        """
        Advance the meta learner and return ``H omega_t``.
        """
        H = np.asarray(H, dtype=float)
        if H.ndim != 2 or H.shape[1] != self.m:
            raise InvalidInputError(f'expected a (d, {self.m}) hint matrix, got {H.shape}')
        block = window_sum(self.rhos, self._applied, len(self.rhos), d=self.m)
        zero = np.zeros(self.m)
        self.omega_tilde, omega = dormplus_step(self.omega_tilde, block, zero, zero)
        self._applied = len(self.rhos)
        self.meta_last.append(self._applied)
        self.omegas.append(omega)
        self.matrices.append(H)
        return H @ omega

    def observe(self, s, target, scale):
        """
        Feed the target and loss scale of round ``s``.
        """
        expected = self.num_observed + 1
        if s != expected:
            raise ProtocolError(f'meta-feedback for round {s} arrived, but {expected} is next')
        if s > len(self.omegas):
            raise ProtocolError(f'meta-feedback for round {s} arrived before its hint')
        H = self.matrices[s - 1]
        omega = self.omegas[s - 1]
        gamma = hinting_loss_subgradient(omega, H, target, scale, self.q_norm)
        self.gammas.append(gamma)
        self.rhos.append(instantaneous_regret(gamma, omega))
        self.losses.append(hinting_loss(omega, H, target, scale, self.q_norm))
        self.column_losses.append(np.array([
            hinting_loss(np.eye(self.m)[i], H, target, scale, self.q_norm)
            for i in range(self.m)]))

    def column_regret(self):
        """
        Realized hinting-loss regret against each fixed column.
        """
        if not self.losses:
            return np.zeros(self.m)
        return float(np.sum(self.losses)) - np.sum(self.column_losses, axis=0)

    def linearized_column_regret(self):
        return window_sum(self.rhos, 0, len(self.rhos), d=self.m)

    def history(self):
        T = len(self.omegas)
        last = list(self.meta_last) + ([self.meta_last[-1]] if self.meta_last else [0])
        return LearnerHistory(
            'hinter', self.m, T=T,
            plays=np.array(self.omegas).reshape(T, self.m),
            gammas=np.array(self.gammas).reshape(len(self.gammas), self.m),
            rhos=np.array(self.rhos).reshape(len(self.rhos), self.m),
            losses=np.array(self.losses, dtype=float),
            last=np.array(last, dtype=int),
            strategies=list(self.strategies),
        )


class GradientAdapter:
    """
    Meta-feedback for gradient-space learners: the target is the gradient
    window of round s and the scale is ``||g_s||_inf``.
    """
    q_norm = math.inf

    def num_available(self, learner):
        return len(learner.revealed)

    def feedback(self, learner, s):
        k = learner.schedule.num_observable(s)
        target = window_sum(learner.revealed, k, s, d=learner.d)
        scale = float(np.max(np.abs(learner.revealed[s - 1])))
        return target, scale


class DormAdapter:
    """
    Meta-feedback for DORM: the regret window of round s scaled by
    ``||r_s||_q``.
    """

    def __init__(self, q):
        self.q_norm = float(q)

    def num_available(self, learner):
        return len(learner.regrets)

    def feedback(self, learner, s):
        k = learner.schedule.num_observable(s)
        target = window_sum(learner.regrets, k, s, d=learner.d)
        scale = float(np.linalg.norm(learner.regrets[s - 1], ord=self.q_norm))
        return target, scale


class DormPlusAdapter(DormAdapter):
    """
    Meta-feedback for DORM+: the scale ``||r-block + h_{s+1} - h_s||_q`` needs
    the next hint, so round s is available one round after it is revealed.
    At the end of the run the terminal hint is the realized window.
    """

    def num_available(self, learner, final=False):
        if final:
            return len(learner.regrets)
        return max(min(len(learner.regrets), learner.t - 1), 0)

    def feedback(self, learner, s):
        sched = learner.schedule
        d = learner.d
        k_s = sched.num_observable(s)
        k_next = sched.num_observable(s + 1)
        target = window_sum(learner.regrets, k_s, s, d=d)
        block = window_sum(learner.regrets, k_s, k_next, d=d)
        if s < learner.t:
            h_next = learner.hints[s]
        else:
            h_next = window_sum(learner.regrets, k_next, s, d=d)
        drift = block + h_next - learner.hints[s - 1]
        scale = float(np.linalg.norm(drift, ord=self.q_norm))
        return target, scale


def make_adapter(learner):
    """
    Pick the meta-feedback adapter for a learner.

    Example:
        >>> from delayed_oco.base_learner import Learner
        >>> from delayed_oco.hinting import make_adapter
        >>> type(make_adapter(Learner.create('dub', d=2))).__name__
        'GradientAdapter'
        >>> make_adapter(Learner.create('dormplus', d=3, q=2)).q_norm
        2.0
    """
    if learner.hint_frame() is not learner:
        raise InvalidInputError(f'{learner.kind} learners do not support a learned hinter')
    if learner.space == 'gradient':
        return GradientAdapter()
    if learner.kind == 'dorm':
        return DormAdapter(learner.q)
    if learner.kind == 'dormplus':
        return DormPlusAdapter(learner.q)
    raise InvalidInputError(f'no hint adapter for learner kind {learner.kind!r}')


def sync_feedback(hinter, adapter, learner, final=False):
    """
    Observe every meta round the learner's feedback makes available.
    """
    if final and isinstance(adapter, DormPlusAdapter):
        available = adapter.num_available(learner, final=True)
    else:
        available = adapter.num_available(learner)
    available = min(available, len(hinter.omegas))
    while hinter.num_observed < available:
        s = hinter.num_observed + 1
        target, scale = adapter.feedback(learner, s)
        hinter.observe(s, target, scale)
