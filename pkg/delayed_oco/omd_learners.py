"""
Regret matching learners on the nonnegative orthant.

DORM plays proportionally to ``((r[1..last(t)] + h_t) / lam)_+^(q-1)`` and
DORM+ keeps an orthant iterate updated by the mirror step
``w~ <- (w~^(p-1) + v / lam)_+^(q-1)`` with
``v = r[last(t-1)+1 .. last(t)] + h_t - h_{t-1}``. Both normalize their
iterate onto the simplex (zero maps to uniform), which makes the plays
independent of ``lam``. With no delay, ``q = 2`` and zero hints they are
exactly regret matching and regret matching+.

The generic orthant steps used by the reductions between delayed and
undelayed optimistic mirror descent live here as well, together with the
replication wrapper that runs ``D + 1`` undelayed copies in rotation.

Example:
    >>> from delayed_oco.omd_learners import DORMPlus
    >>> learner = DORMPlus(d=2, schedule=0)
    >>> learner.play().tolist()
    [0.5, 0.5]
    >>> learner.submit([0., 1.])
    >>> learner.play().tolist()
    [1.0, 0.0]
"""
import logging
import numpy as np
import ubelt as ub

from delayed_oco.base_learner import Learner
from delayed_oco.closed_forms import PNormConfig, orthant_power
from delayed_oco.core import (DelaySchedule, InvalidInputError, ProtocolError,
                              coerce_vector, simplex_normalize)
from delayed_oco.util.util_algo import window_sum

logger = logging.getLogger(__name__)


def _check_lam(lam):
    lam = 1.0 if lam is None else float(lam)
    if not lam > 0 or not np.isfinite(lam):
        raise InvalidInputError(f'lambda={lam} must be finite and positive')
    return lam


def orthant_step(w_tilde, v, lam, q):
    """
    The mirror step ``(w~^(p-1) + v / lam)_+^(q-1)`` of ``(1/p) ||w||_p^p``.

    Example:
        >>> from delayed_oco.omd_learners import orthant_step
        >>> orthant_step(np.zeros(2), np.array([1., -2.]), 1.0, 2.0).tolist()
        [1.0, 0.0]
    """
    cfg = PNormConfig.coerce(q)
    base = orthant_power(w_tilde, cfg.p - 1) + v / lam
    return orthant_power(np.maximum(base, 0), cfg.q - 1)


def dorm_play(r_prefix, h_next, lam=1.0, q=2.0):
    """
    The DORM iterate and play from the observed regret prefix and a hint.

    Args:
        r_prefix (ArrayLike): ``r[1 .. last(t)]``
        h_next (ArrayLike): regret-space hint for the round being played
        lam (float): scale, the play does not depend on it
        q (float): dual exponent

    Returns:
        Tuple[np.ndarray, np.ndarray]: orthant iterate and simplex play

    Example:
        >>> from delayed_oco.omd_learners import dorm_play
        >>> w_tilde, w = dorm_play([2., -1.], [0., 0.])
        >>> w.tolist()
        [1.0, 0.0]
        >>> dorm_play([-1., -1.], [0., -1.])[1].tolist()
        [0.5, 0.5]
    """
    r_prefix = coerce_vector(r_prefix, name='r_prefix')
    h_next = coerce_vector(h_next, d=len(r_prefix), name='h_next')
    lam = _check_lam(lam)
    cfg = PNormConfig.coerce(q)
    w_tilde = orthant_power(np.maximum((r_prefix + h_next) / lam, 0), cfg.q - 1)
    return w_tilde, simplex_normalize(w_tilde)


def dormplus_step(w_tilde, r_delayed, h_t, h_next, lam=1.0, q=2.0):
    """
    One DORM+ update of the orthant iterate and its normalized play.

    Args:
        w_tilde (ArrayLike): current orthant iterate (zero initially)
        r_delayed (ArrayLike): the regret block revealed since the last step
        h_t (ArrayLike): the previous hint (zero initially)
        h_next (ArrayLike): the hint of the round being played
        lam (float): scale, the play does not depend on it
        q (float): dual exponent

    Returns:
        Tuple[np.ndarray, np.ndarray]: next orthant iterate and simplex play

    Example:
        >>> from delayed_oco.omd_learners import dormplus_step
        >>> w_tilde, w = dormplus_step([0., 0.], [1., -2.], [0., 0.], [0., 0.])
        >>> w_tilde.tolist(), w.tolist()
        ([1.0, 0.0], [1.0, 0.0])
    """
    r_delayed = coerce_vector(r_delayed, name='r_delayed')
    d = len(r_delayed)
    w_tilde = coerce_vector(w_tilde, d=d, name='w_tilde')
    if np.any(w_tilde < 0):
        raise InvalidInputError('the orthant iterate must be nonnegative')
    h_t = coerce_vector(h_t, d=d, name='h_t')
    h_next = coerce_vector(h_next, d=d, name='h_next')
    lam = _check_lam(lam)
    w_next = orthant_step(w_tilde, r_delayed + h_next - h_t, lam, q)
    return w_next, simplex_normalize(w_next)


def soomd_orthant_step(w_tilde, g_t, g_hint, g_hint_next, lam, q):
    """
    Undelayed optimistic mirror descent on the orthant with loss ``g_t``,
    previous hint ``g_hint`` and next hint ``g_hint_next``.

    Feeding the negated regrets as losses gives exactly the DORM+ update.

    Example:
        >>> from delayed_oco.omd_learners import soomd_orthant_step
        >>> w = np.array([0.5, 2.0])
        >>> zero = np.zeros(2)
        >>> soomd_orthant_step(w, zero, zero, zero, 1.0, 3.0).round(12).tolist()
        [0.5, 2.0]
    """
    w_tilde = np.asarray(w_tilde, dtype=float)
    if np.any(w_tilde < 0):
        raise InvalidInputError('the orthant iterate must be nonnegative')
    lam = _check_lam(lam)
    v = -(np.asarray(g_t, dtype=float) + np.asarray(g_hint_next, dtype=float)
          - np.asarray(g_hint, dtype=float))
    return orthant_step(w_tilde, v, lam, q)


def doomd_orthant_iterates(grads, hints, lam, q, schedule=0):
    """
    Orthant iterates of delayed optimistic mirror descent on linear losses.

    Round t steps with the loss block ``g[last(t-1)+1 .. last(t)]`` that was
    revealed since the previous round and the hint change ``h_t - h_{t-1}``.

    Args:
        grads (ArrayLike): ``(T, d)`` losses
        hints (ArrayLike): ``(T, d)`` hints for the unobserved window
        lam (float): scale
        q (float): dual exponent
        schedule (int | DelaySchedule): delays

    Returns:
        np.ndarray: ``(T, d)`` iterates ``w~_1 .. w~_T``
    """
    schedule = DelaySchedule.coerce(schedule)
    grads = np.asarray(grads, dtype=float)
    hints = np.asarray(hints, dtype=float)
    T, d = grads.shape
    items = list(grads)
    lam = _check_lam(lam)
    w_tilde = np.zeros(d)
    h_prev = np.zeros(d)
    iterates = np.zeros((T, d))
    k_prev = 0
    for t in range(1, T + 1):
        k = schedule.num_observable(t)
        block = window_sum(items, k_prev, k, d=d)
        w_tilde = orthant_step(w_tilde, -(block + hints[t - 1] - h_prev), lam, q)
        iterates[t - 1] = w_tilde
        h_prev = hints[t - 1]
        k_prev = k
    return iterates


def soomd_with_bad_hint(grads, hints, lam, q, schedule=0):
    """
    Undelayed optimistic mirror descent fed ``h_t - g[last(t)+1 .. t-1]`` as
    the one-step hint of round t. Its iterates match
    :func:`doomd_orthant_iterates` on the same stream.

    Returns:
        np.ndarray: ``(T, d)`` iterates

    Example:
        >>> from delayed_oco.omd_learners import soomd_with_bad_hint, doomd_orthant_iterates
        >>> rng = np.random.default_rng(1)
        >>> grads = rng.normal(size=(12, 3))
        >>> hints = rng.normal(size=(12, 3))
        >>> a = soomd_with_bad_hint(grads, hints, 1.0, 2.0, schedule=2)
        >>> b = doomd_orthant_iterates(grads, hints, 1.0, 2.0, schedule=2)
        >>> float(np.abs(a - b).max()) < 1e-9
        True
    """
    schedule = DelaySchedule.coerce(schedule)
    grads = np.asarray(grads, dtype=float)
    hints = np.asarray(hints, dtype=float)
    T, d = grads.shape
    items = list(grads)
    w_tilde = np.zeros(d)
    iterates = np.zeros((T, d))
    g_prev = np.zeros(d)
    hint_prev = np.zeros(d)
    for t in range(1, T + 1):
        k = schedule.num_observable(t)
        hint = hints[t - 1] - window_sum(items, k, t - 1, d=d)
        w_tilde = soomd_orthant_step(w_tilde, g_prev, hint_prev, hint, lam, q)
        iterates[t - 1] = w_tilde
        g_prev = grads[t - 1]
        hint_prev = hint
    return iterates


class _RegretMatcher(Learner):
    space = 'regret'

    def __init__(self, d, schedule=0, q=None, lam=None):
        super().__init__(d, schedule)
        self.pnorm = PNormConfig.coerce(q, d=self.d)
        self.lam = _check_lam(lam)
        self.iterates = []

    @property
    def q(self):
        return self.pnorm.q

    def _receive(self, s, g):
        pass

    def _history_extras(self):
        return {
            'q': self.q,
            'lam': self.lam,
            'iterates': np.array(self.iterates).reshape(len(self.iterates), self.d),
        }


class DORM(_RegretMatcher):
    """
    Delayed optimistic regret matching.

    Args:
        d (int): number of experts
        schedule (int | DelaySchedule): delays
        q (float | None): dual exponent, default ``q_opt(d)``
        lam (float | None): scale, default 1
    """
    kind = 'dorm'

    def __init__(self, d, schedule=0, q=None, lam=None):
        super().__init__(d, schedule, q=q, lam=lam)
        self.regret_prefix = [np.zeros(self.d)]

    def _play(self, hint):
        k = self.schedule.num_observable(self.t)
        w_tilde, w = dorm_play(self.regret_prefix[k], hint, self.lam, self.q)
        self.iterates.append(w_tilde)
        self.lambdas.append(self.lam)
        return w

    def _receive(self, s, g):
        self.regret_prefix.append(self.regret_prefix[-1] + self.regrets[s - 1])


class DORMPlus(_RegretMatcher):
    """
    Delayed optimistic regret matching+.

    Args:
        d (int): number of experts
        schedule (int | DelaySchedule): delays
        q (float | None): dual exponent, default ``q_opt(d)``
        lam (float | None): scale, default 1
    """
    kind = 'dormplus'

    def __init__(self, d, schedule=0, q=None, lam=None):
        super().__init__(d, schedule, q=q, lam=lam)
        self.w_tilde = np.zeros(self.d)
        self._applied = 0

    def _play(self, hint):
        k = self.schedule.num_observable(self.t)
        block = window_sum(self.regrets, self._applied, k, d=self.d)
        h_prev = self.hints[-1] if self.hints else np.zeros(self.d)
        self.w_tilde, w = dormplus_step(self.w_tilde, block, h_prev, hint,
                                        self.lam, self.q)
        self._applied = k
        self.iterates.append(self.w_tilde)
        self.lambdas.append(self.lam)
        return w


class ReplicatedLearner(Learner):
    """
    Runs ``D + 1`` independent undelayed learners that take turns.

    Round t is served by copy ``(t - 1) mod (D + 1)``. The feedback of a
    round is forwarded to the copy that played it when the delay schedule
    reveals it, which always happens before that copy's next turn.
    """
    kind = 'replicated-dormplus'
    space = 'regret'

    def __init__(self, copies, delay):
        copies = list(copies)
        if len(copies) != delay + 1:
            raise InvalidInputError(f'need {delay + 1} copies for delay {delay}, got {len(copies)}')
        d = copies[0].d
        for copy in copies:
            if copy.d != d:
                raise InvalidInputError('every copy must have the same dimension')
            if copy.schedule.num_observable(2) != 1 or copy.t != 0:
                raise InvalidInputError('copies must be fresh undelayed learners')
        super().__init__(d, DelaySchedule.constant(delay))
        self.copies = copies
        self.space = copies[0].space
        self.kind = f'replicated-{copies[0].kind}'

    def copy_index(self, t):
        return (t - 1) % len(self.copies)

    def hint_frame(self):
        return self.copies[self.copy_index(self.t + 1)]

    def _play(self, hint):
        copy = self.copies[self.copy_index(self.t)]
        w = copy.play(hint)
        self.lambdas.append(copy.lambdas[-1] if copy.lambdas else np.nan)
        return w

    def _receive(self, s, g):
        copy = self.copies[self.copy_index(s)]
        local = (s - 1) // len(self.copies) + 1
        if local != len(copy.revealed) + 1:
            raise ProtocolError(f'copy {self.copy_index(s)} expected its round '
                                f'{len(copy.revealed) + 1}, got {local}')
        copy.receive(g, local)

    def _history_extras(self):
        return {
            'copies': [copy.history() for copy in self.copies],
            'q': getattr(self.copies[0], 'q', None),
        }


def replicate(base_factory, D):
    """
    Wrap ``D + 1`` fresh undelayed learners into a delay-``D`` learner.

    Args:
        base_factory (Callable[[], Learner]): builds one undelayed learner
        D (int): constant delay

    Returns:
        ReplicatedLearner

    Example:
        >>> from delayed_oco.omd_learners import replicate, DORMPlus
        >>> learner = replicate(lambda: DORMPlus(d=2), 3)
        >>> for t in range(1, 27):
        >>>     _ = learner.play()
        >>>     learner.submit([0., 1.])
        >>> [copy.t for copy in learner.copies]
        [7, 7, 6, 6]
    """
    D = int(D)
    if D < 0:
        raise InvalidInputError(f'D={D} must be nonnegative')
    copies = [base_factory() for _ in range(D + 1)]
    logger.debug('replicating %s over %d copies', ub.urepr(copies[0], nl=0), D + 1)
    return ReplicatedLearner(copies, D)
