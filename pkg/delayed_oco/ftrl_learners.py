"""
Optimistic delayed adaptive FTRL over the simplex with an entropic regularizer.

Round t plays ``argmin_w lam_t psi(w) + <g[1..last(t)] + h_t, w>``, which has
the softmax closed form :func:`negentropy_argmin`. Three tunings choose
``lam_t``:

* ``constant``: a fixed weight;
* ``dub``: the delayed upper bound built from the per-round ``a_t`` and
  ``b_t`` bound terms;
* ``adahedged``: the running sum of the realized objective gaps ``delta_t``.

Both adaptive tunings only use feedback observable at play time, so they work
unchanged for variable delay schedules.

Example:
    >>> from delayed_oco.ftrl_learners import ODAFTRL
    >>> learner = ODAFTRL(d=2, schedule=0, tuning='dub', alpha=1.0)
    >>> learner.play().tolist()
    [0.5, 0.5]
    >>> learner.submit([1., -1.])
    >>> # a_1 = 2 and b_1 = 0.5, so lambda_2 = sqrt(4 + 1)
    >>> round(learner.lam_at(2) ** 2, 12)
    5.0
"""
import logging
import math
import numpy as np

from delayed_oco.base_learner import Learner
from delayed_oco.bounds import ftrl_bound_terms
from delayed_oco.closed_forms import WEIGHT_FLOOR, negentropy_argmin
from delayed_oco.core import DelaySchedule, InvalidInputError, coerce_vector
from delayed_oco.util.util_algo import window_sum

logger = logging.getLogger(__name__)

TUNINGS = ('constant', 'dub', 'adahedged')


def default_alpha(d):
    """
    ``sup_u psi(u) = ln d``, the recommended scale (1 when ``d = 1``).
    """
    return math.log(d) if d >= 2 else 1.0


def _gap_from_play(w, x, lam):
    """
    ``lam ln sum_j w_j exp(x_j / lam) - <x, w>`` shifted by the max of ``x``
    over the support of ``w``.
    """
    support = w > WEIGHT_FLOOR
    shift = x[support].max()
    inner = np.sum(w[support] * np.exp((x[support] - shift) / lam))
    return float(lam * math.log(inner) + shift - np.dot(x, w))


def adahedged_delta(w_t, h_t, g_window, g_prefix, g_t, lam_t):
    """
    The objective gap ``delta_t`` that drives the adahedged tuning.

    ``delta_t = max(min(delta1, delta2, delta3), 0)`` where ``delta1`` is the
    gap of the actual play, ``delta2`` the linearized gap against the
    unhinted minimizer, and ``delta3`` the gap of an auxiliary hint moved
    toward the observed window by ``sigma = min(||g_t|| / ||x||, 1)``.

    Args:
        w_t (ArrayLike): the play of round t
        h_t (ArrayLike): the hint of round t
        g_window (ArrayLike): ``g[last(t)+1 .. t]``
        g_prefix (ArrayLike): ``g[1 .. t]``
        g_t (ArrayLike): the gradient of round t
        lam_t (float): the weight used to play ``w_t``

    Returns:
        float

    Example:
        >>> from delayed_oco.ftrl_learners import adahedged_delta
        >>> adahedged_delta([0., 1.], [0., 0.], [0., 0.], [1., 2.], [0., 0.], 0.0)
        0.0
        >>> # with a perfect hint every gap vanishes
        >>> g = np.array([1., 0., 2.])
        >>> w = negentropy_argmin(-(g + g), 0.5)
        >>> adahedged_delta(w, g, g, 2 * g, g, 0.5) < 1e-12
        True
    """
    g_t = coerce_vector(g_t, name='g_t')
    d = len(g_t)
    w_t = coerce_vector(w_t, d=d, name='w_t')
    h_t = coerce_vector(h_t, d=d, name='h_t')
    g_window = coerce_vector(g_window, d=d, name='g_window')
    g_prefix = coerce_vector(g_prefix, d=d, name='g_prefix')
    lam = float(lam_t)
    x = h_t - g_window
    x_norm = float(np.max(np.abs(x)))
    sigma = 1.0 if x_norm == 0 else min(float(np.max(np.abs(g_t))) / x_norm, 1.0)
    x_hat = sigma * x
    w_bar = negentropy_argmin(-g_prefix, lam)
    w_hat = negentropy_argmin(-(g_prefix + x_hat), lam)
    delta2 = float(np.dot(g_t, w_t - w_bar))
    if lam > 0:
        delta1 = _gap_from_play(w_t, x, lam)
        delta3 = _gap_from_play(w_hat, x_hat, lam) + float(np.dot(g_t, w_t - w_hat))
    else:
        best = float(g_prefix.min())
        delta1 = float(np.dot(g_prefix, w_t)) - best
        delta3 = float(np.dot(g_prefix, w_hat)) - best + float(np.dot(g_t, w_t - w_hat))
    return max(min(delta1, delta2, delta3), 0.0)


class ODAFTRL(Learner):
    """
    Optimistic delayed adaptive FTRL with the negative entropy regularizer.

    Args:
        d (int): number of experts
        schedule (int | DelaySchedule): feedback delays
        tuning (str): 'constant', 'dub' or 'adahedged'
        lam (float | None): weight of the constant tuning, default 1
        alpha (float | str | None): scale of the adaptive tunings, default
            ``ln d``
    """

    def __init__(self, d, schedule=0, tuning='adahedged', lam=None, alpha=None):
        super().__init__(d, schedule)
        if tuning not in TUNINGS:
            raise InvalidInputError(f'tuning={tuning!r} must be one of {TUNINGS}')
        self.tuning = tuning
        self.kind = 'odaftrl-const' if tuning == 'constant' else tuning
        if lam is None:
            lam = 1.0
        lam = float(lam)
        if not (lam >= 0 and math.isfinite(lam)):
            raise InvalidInputError(f'lambda={lam} must be finite and nonnegative')
        if alpha is None or alpha == 'auto':
            alpha = default_alpha(self.d)
        alpha = float(alpha)
        if not (alpha > 0 and math.isfinite(alpha)):
            raise InvalidInputError(f'alpha={alpha} must be positive')
        self.lam = lam
        self.alpha = alpha
        self.prefix = [np.zeros(self.d)]
        self.a_terms = []
        self.b_terms = []
        self.deltas = []
        # indexed by the number of revealed rounds
        self._delta_total = [0.0]
        self._dub_radicand = [0.0]
        self._dub_amax = [0.0]

    def lam_at(self, t):
        """
        The regularization weight of round ``t`` from the feedback observable
        when it plays.
        """
        if self.tuning == 'constant':
            return self.lam
        k = self.schedule.num_observable(t)
        if self.tuning == 'adahedged':
            return self._delta_total[k] / self.alpha
        return (2.0 * self._dub_amax[k] + math.sqrt(self._dub_radicand[k])) / self.alpha

    def _play(self, hint):
        k = self.schedule.num_observable(self.t)
        lam = self.lam_at(self.t)
        w = negentropy_argmin(-(self.prefix[k] + hint), lam)
        self.lambdas.append(lam)
        return w

    def _receive(self, s, g):
        self.prefix.append(self.prefix[-1] + g)
        k_s = self.schedule.num_observable(s)
        w_s = self.plays[s - 1]
        h_s = self.hints[s - 1]
        lam_s = self.lambdas[s - 1]
        window = window_sum(self.revealed, k_s, s, d=self.d)
        terms = ftrl_bound_terms(h_s, window, g)
        self.a_terms.append(terms.a)
        self.b_terms.append(terms.b)
        if self.tuning == 'adahedged':
            delta = adahedged_delta(w_s, h_s, window, self.prefix[s], g, lam_s)
        else:
            delta = 0.0
        self.deltas.append(delta)
        self._delta_total.append(self._delta_total[-1] + delta)
        self._dub_radicand.append(
            self._dub_radicand[-1] + terms.a ** 2 + 2 * self.alpha * terms.b)
        if s == 1:
            self._dub_amax.append(0.0)
        else:
            # the window ending at s - 1 closes once round s is revealed
            j = s - 1
            start = self.schedule.num_observable(j + 1)
            window_a = sum(self.a_terms[start:j])
            self._dub_amax.append(max(self._dub_amax[-1], window_a))

    def _history_extras(self):
        return {
            'tuning': self.tuning,
            'alpha': self.alpha,
            'lam': self.lam,
            'deltas': np.array(self.deltas, dtype=float),
            'a_terms': np.array(self.a_terms, dtype=float),
            'b_terms': np.array(self.b_terms, dtype=float),
        }


def oftrl_plays(grads, hints, lam):
    """
    Undelayed optimistic FTRL: ``w_t = argmin lam psi + <g[1..t-1] + h_t, w>``.

    Args:
        grads (ArrayLike): ``(T, d)`` loss subgradients
        hints (ArrayLike): ``(T, d)`` one-step hints
        lam (float): constant regularization weight

    Returns:
        np.ndarray: ``(T, d)`` plays
    """
    grads = np.asarray(grads, dtype=float)
    hints = np.asarray(hints, dtype=float)
    T, d = grads.shape
    plays = np.zeros((T, d))
    total = np.zeros(d)
    for t in range(T):
        plays[t] = negentropy_argmin(-(total + hints[t]), lam)
        total = total + grads[t]
    return plays


def oftrl_with_bad_hint(grads, hints, lam, schedule=0):
    """
    Undelayed optimistic FTRL fed the hint ``h_t - g[last(t)+1 .. t-1]``.

    With full access to the stream, the gradients a delayed learner has not
    seen yet are folded into its hint; the plays match the delayed learner.

    Args:
        grads (ArrayLike): ``(T, d)`` loss subgradients
        hints (ArrayLike): ``(T, d)`` hints given to the delayed learner
        lam (float): constant regularization weight
        schedule (int | DelaySchedule): the delayed learner's schedule

    Returns:
        np.ndarray: ``(T, d)`` plays

    Example:
        >>> from delayed_oco.ftrl_learners import oftrl_with_bad_hint, oftrl_plays
        >>> rng = np.random.default_rng(0)
        >>> grads = rng.normal(size=(6, 3))
        >>> zeros = np.zeros_like(grads)
        >>> np.allclose(oftrl_with_bad_hint(grads, zeros, 1.0, 0), oftrl_plays(grads, zeros, 1.0))
        True
    """
    schedule = DelaySchedule.coerce(schedule)
    grads = np.asarray(grads, dtype=float)
    hints = np.asarray(hints, dtype=float)
    T, d = grads.shape
    items = list(grads)
    bad_hints = np.zeros((T, d))
    for t in range(1, T + 1):
        k = schedule.num_observable(t)
        bad_hints[t - 1] = hints[t - 1] - window_sum(items, k, t - 1, d=d)
    return oftrl_plays(grads, bad_hints, lam)
