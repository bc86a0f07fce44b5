"""
Regret-bound quantities evaluated at runtime.

Each learner's guarantee is a right-hand side built from per-round terms: an
``a_t`` term (diameter times the smaller of hint error and gradient norm) and
a huber ``b_t`` term. :func:`regret_certificate` assembles these from a
complete :class:`delayed_oco.base_learner.LearnerHistory` so measured regret
can be compared against them.

Conventions used throughout:

* entropic learners measure gradients in the l-infinity norm and use a
  simplex diameter of 2;
* orthant learners measure regrets in the l-q norm and divide the squared
  terms by ``p - 1``;
* empty windows, sums and maxima are zero, and ``x_s = 0`` for ``s <= 0``.

Example:
    >>> from delayed_oco.bounds import huber, ftrl_bound_terms
    >>> huber(3, 1), huber(2, 5)
    (2.5, 2.0)
    >>> ftrl_bound_terms([0, 0], [1, -1], [1, -1])
    BoundTerms(a=2.0, b=0.5)
"""
import logging
import math
from typing import NamedTuple
import numpy as np

from delayed_oco.core import (DelaySchedule, IncompleteHistoryError,
                              InvalidInputError, coerce_vector)
from delayed_oco.closed_forms import negentropy, PNormConfig
from delayed_oco.util.util_algo import window_sum, window_sums

logger = logging.getLogger(__name__)

FTRL_KINDS = ('odaftrl-const', 'dub', 'adahedged')
DORM_KINDS = ('dorm', 'dormplus')
CERTIFICATE_FORMS = ('theorem', 'tight', 'log2')

#: diameter of the simplex under the l1 norm
SIMPLEX_DIAMETER = 2.0


class BoundTerms(NamedTuple):
    a: float
    b: float


class HintBoundTerms(NamedTuple):
    xi: float
    zeta: float


def huber(x, y):
    """
    ``0.5 x^2 - 0.5 max(x - y, 0)^2`` for nonnegative ``x`` and ``y``.

    Example:
        >>> from delayed_oco.bounds import huber
        >>> huber(0, 4), huber(4, 0)
        (0.0, 0.0)
    """
    x = float(x)
    y = float(y)
    if x < 0 or y < 0 or not (math.isfinite(x) and math.isfinite(y)):
        raise InvalidInputError(f'huber needs finite nonnegative inputs, got x={x}, y={y}')
    if x <= y:
        return 0.5 * x * x
    # equals 0.5 x^2 - 0.5 (x - y)^2 without the cancellation
    return y * (x - 0.5 * y)


def _norm(v, norm):
    return float(np.linalg.norm(v, ord=norm))


def _coerce_norm(norm):
    if norm in ('inf', 'infinity', None):
        return math.inf
    norm = float(norm)
    if norm < 1:
        raise InvalidInputError(f'norm index {norm} must be at least 1')
    return norm


def ftrl_bound_terms(h_t, g_window, g_t, dual_norm=math.inf, diameter=SIMPLEX_DIAMETER):
    """
    Args:
        h_t (ArrayLike): hint played with round t
        g_window (ArrayLike): sum of the gradients unobserved at play time,
            including ``g_t``
        g_t (ArrayLike): the gradient of round t
        dual_norm (float | str): norm index for the dual measurements
        diameter (float): diameter of the action set

    Returns:
        BoundTerms
    """
    g_t = coerce_vector(g_t, name='g_t')
    h_t = coerce_vector(h_t, d=len(g_t), name='h_t')
    g_window = coerce_vector(g_window, d=len(g_t), name='g_window')
    if not diameter > 0:
        raise InvalidInputError(f'diameter={diameter} must be positive')
    norm = _coerce_norm(dual_norm)
    x = _norm(h_t - g_window, norm)
    y = _norm(g_t, norm)
    return BoundTerms(a=float(diameter * min(x, y)), b=huber(x, y))


def dorm_bound_term(h_t, r_window, r_t=None, drift=None, c=math.inf, variant='dorm'):
    """
    The raw huber term of the regret-matching learners, measured in ``l_c``.

    Args:
        h_t (ArrayLike): regret-space hint of round t
        r_window (ArrayLike): sum of the regrets unobserved at play time,
            including ``r_t``
        r_t (ArrayLike | None): regret of round t (``variant='dorm'``)
        drift (ArrayLike | None): the newly revealed regret block plus
            ``h_{t+1} - h_t`` (``variant='dormplus'``)
        c (float): norm index in ``[2, inf]``
        variant (str): 'dorm' or 'dormplus'

    Example:
        >>> from delayed_oco.bounds import dorm_bound_term
        >>> dorm_bound_term([0, 0], [1, -1], r_t=[1, -1])
        0.5
        >>> dorm_bound_term([0, 0], [1, -1], drift=[0, 0], variant='dormplus')
        0.0
    """
    r_window = coerce_vector(r_window, name='r_window')
    h_t = coerce_vector(h_t, d=len(r_window), name='h_t')
    c = _coerce_norm(c)
    if c < 2:
        raise InvalidInputError(f'norm index c={c} must be in [2, inf]')
    if variant == 'dorm':
        if r_t is None:
            raise InvalidInputError('the dorm variant needs r_t')
        other = coerce_vector(r_t, d=len(r_window), name='r_t')
    elif variant == 'dormplus':
        if drift is None:
            raise InvalidInputError('the dormplus variant needs drift')
        other = coerce_vector(drift, d=len(r_window), name='drift')
    else:
        raise InvalidInputError(f'unknown variant={variant!r}')
    return huber(_norm(h_t - r_window, c), _norm(other, c))


def _last_array(delay, T):
    """
    ``last(t)`` (0 when nothing is observable) for ``t = 1 .. T + 1``.

    ``delay`` may be a constant delay, a :class:`DelaySchedule`, or an
    explicit sequence of these values.
    """
    if isinstance(delay, (list, tuple, np.ndarray)):
        last = np.asarray(delay, dtype=int)
        if len(last) < T + 1:
            raise IncompleteHistoryError(
                f'need last(t) for t=1..{T + 1}, got {len(last)} values')
        return last
    return DelaySchedule.coerce(delay).last_array(T)


def dub_envelope(a_hist, b_hist, alpha, delay, t):
    """
    The regularization weight ``lambda_{t+1}`` of the delayed upper bound
    tuning, from per-round ``a`` and ``b`` histories.

    ``lambda_{t+1} = (2 / alpha) max_{j <= k - 1} a[last(j+1)+1 .. j]
    + (1 / alpha) sqrt(sum_{i <= k} a_i^2 + 2 alpha b_i)`` with
    ``k = last(t + 1)``.

    Example:
        >>> from delayed_oco.bounds import dub_envelope
        >>> round(dub_envelope([1], [1], 1.0, 0, 1) ** 2, 12)
        3.0
        >>> dub_envelope([1, 2], [1, 0], 1.0, 1, 3) == 2 + np.sqrt(7)
        True
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise InvalidInputError(f'alpha={alpha} must be positive')
    if t < 0:
        raise InvalidInputError(f't={t} must be nonnegative')
    last = _last_array(delay, t + 1)
    k = int(last[t]) if t >= 0 else 0
    a_hist = np.asarray(a_hist, dtype=float)
    b_hist = np.asarray(b_hist, dtype=float)
    if len(a_hist) < k or len(b_hist) < k:
        raise IncompleteHistoryError(f'need a, b histories for rounds 1..{k}')
    if np.any(a_hist[:k] < 0) or np.any(b_hist[:k] < 0):
        raise InvalidInputError('a and b histories must be nonnegative')
    amax = 0.0
    for j in range(1, k):
        amax = max(amax, _window_total(a_hist, int(last[j]), j))
    radicand = float(np.sum(a_hist[:k] ** 2 + 2 * alpha * b_hist[:k]))
    return (2.0 * amax + math.sqrt(radicand)) / alpha


def _window_total(values, start, stop):
    """
    ``values[start + 1 .. stop]`` (1-indexed) summed in round order.
    """
    total = 0.0
    for s in range(max(start, 0) + 1, stop + 1):
        total += values[s - 1]
    return total


def hint_bound_terms(gamma_hist, delay, t):
    """
    The hint learner's ``xi_t`` and ``zeta_t`` from meta-subgradient norms.

    With ``W(t)`` the meta rounds unobserved at round t and ``B(t)`` the
    block revealed right after it:
    ``xi_t = 4 |W| sum_W ||gamma_s||^2`` and
    ``zeta_t = 4 (sum_B ||gamma_s||) (sum_W ||gamma_s||)`` in the l-infinity
    norm, with ``gamma_s = 0`` for ``s <= 0``.

    Args:
        gamma_hist (Sequence[ArrayLike]): ``gamma_hist[s - 1]`` is the
            meta-subgradient of meta round s
        delay (int | DelaySchedule | Sequence[int]): the meta feedback delay
        t (int): round index

    Example:
        >>> from delayed_oco.bounds import hint_bound_terms
        >>> hint_bound_terms([[1., 0.]], 0, 1)
        HintBoundTerms(xi=4.0, zeta=4.0)
        >>> hint_bound_terms([[1., 0.], [0., 2.]], 1, 2)
        HintBoundTerms(xi=40.0, zeta=12.0)
    """
    if t < 1:
        raise InvalidInputError(f't={t} must be at least 1')
    if len(gamma_hist) < t:
        raise IncompleteHistoryError(f'need meta-subgradients for rounds 1..{t}')
    if isinstance(delay, (int, np.integer)) and not isinstance(delay, bool):
        # windows reach back before round 1, where gamma is zero
        D = int(delay)
        window = list(range(t - D, t + 1))
        block = [t - D]
    else:
        last = _last_array(delay, t)
        window = list(range(int(last[t - 1]) + 1, t + 1))
        block = list(range(int(last[t - 1]) + 1, int(last[t]) + 1))
    norms = {s: (_norm(gamma_hist[s - 1], math.inf) if s >= 1 else 0.0)
             for s in set(window) | set(block)}
    win_total = sum(norms[s] for s in window)
    block_total = sum(norms[s] for s in block)
    xi = 4.0 * len(window) * sum(norms[s] ** 2 for s in window)
    zeta = 4.0 * block_total * win_total
    return HintBoundTerms(xi=float(xi), zeta=float(zeta))


def _check_complete(history):
    T = history.T
    if len(history.grads) < T or len(history.plays) < T or len(history.hints) < T:
        raise IncompleteHistoryError(
            f'{history.kind} history has {len(history.grads)} revealed gradients '
            f'for {T} rounds; finalize the learner first')
    if len(history.last) < T + 1:
        raise IncompleteHistoryError('history is missing last(t) for t = T + 1')


def ftrl_terms(history):
    """
    Per-round ``a_t`` and ``b_t`` of an entropic learner.

    Returns:
        BoundTerms: with ``(T,)`` arrays as fields
    """
    _check_complete(history)
    T = history.T
    grads = list(history.grads)
    a = np.zeros(T)
    b = np.zeros(T)
    for t in range(1, T + 1):
        window = window_sum(grads, int(history.last[t - 1]), t, d=history.d)
        terms = ftrl_bound_terms(history.hints[t - 1], window, grads[t - 1])
        a[t - 1] = terms.a
        b[t - 1] = terms.b
    return BoundTerms(a=a, b=b)


def dorm_terms(history, variant=None, norm=None):
    """
    Per-round ``a_t`` and raw huber ``b_t`` of a regret-matching learner,
    measured in its own ``l_q`` norm unless ``norm`` is given.

    For the DORM+ variant the final round uses the terminal hint
    ``h_{T+1} = r[last(T+1)+1 .. T]``, which makes its term
    ``0.5 ||h_T - r[last(T)+1 .. T]||^2``.

    Returns:
        BoundTerms: with ``(T,)`` arrays as fields
    """
    _check_complete(history)
    if variant is None:
        variant = history.kind
    if norm is None:
        norm = PNormConfig.coerce(history.q).q
    T = history.T
    d = history.d
    regrets = list(history.regrets)
    hints = list(history.hints)
    last = history.last
    a = np.zeros(T)
    b = np.zeros(T)
    for t in range(1, T + 1):
        r_window = window_sum(regrets, int(last[t - 1]), t, d=d)
        h_t = hints[t - 1]
        if variant == 'dorm':
            r_t, drift = regrets[t - 1], None
            other = r_t
        else:
            block = window_sum(regrets, int(last[t - 1]), int(last[t]), d=d)
            if t < T:
                h_next = hints[t]
            else:
                h_next = window_sum(regrets, int(last[t]), T, d=d)
            r_t, drift = None, block + h_next - h_t
            other = drift
        a[t - 1] = SIMPLEX_DIAMETER * min(_norm(h_t - r_window, norm), _norm(other, norm))
        b[t - 1] = dorm_bound_term(h_t, r_window, r_t=r_t, drift=drift, c=norm,
                                   variant=variant)
    return BoundTerms(a=a, b=b)


def per_round_terms(history):
    """
    ``a_t`` and ``b_t`` for any learner history (used for reporting).
    """
    if history.kind in FTRL_KINDS:
        return ftrl_terms(history)
    if history.kind in DORM_KINDS:
        return dorm_terms(history)
    if history.kind == 'replicated-dormplus':
        T = history.T
        a = np.zeros(T)
        b = np.zeros(T)
        period = len(history.copies)
        for idx, copy in enumerate(history.copies):
            terms = dorm_terms(copy)
            a[idx::period] = terms.a
            b[idx::period] = terms.b
        return BoundTerms(a=a, b=b)
    raise InvalidInputError(f'no bound terms for learner kind {history.kind!r}')


def linearized_regret(history, u):
    """
    ``sum_t <g_t, w_t - u>`` over a complete history.

    Example:
        >>> from delayed_oco.bounds import linearized_regret
        >>> hist = _Namespace(dict(T=2, plays=[[.5, .5], [1., 0.]], grads=[[1., 0.], [0., 1.]]))
        >>> linearized_regret(hist, [0, 1])
        -0.5
    """
    T = history.T
    if T == 0:
        return 0.0
    if len(history.grads) < T:
        raise IncompleteHistoryError('regret needs every gradient revealed')
    grads = np.asarray(history.grads[:T], dtype=float)
    plays = np.asarray(history.plays[:T], dtype=float)
    u = np.asarray(u, dtype=float)
    return float(np.sum(grads * plays) - np.sum(grads @ u))


class _Namespace:
    def __init__(self, data):
        self.__dict__.update(data)


def _coerce_competitor(u, d):
    u = coerce_vector(u, d=d, name='u')
    if np.any(u < 0) or abs(u.sum() - 1) > 1e-9:
        raise InvalidInputError('the competitor u must lie in the simplex')
    return u


def regret_certificate(kind, history, u, form='theorem'):
    """
    Upper bound on ``Regret_T(u)`` for a learner kind and complete history.

    Args:
        kind (str): learner kind, see :data:`delayed_oco.base_learner.LEARNER_KINDS`
        history (LearnerHistory): complete (finalized) history
        u (ArrayLike): competitor in the simplex
        form (str): 'theorem' for the learner's headline bound, 'tight' for
            ``lambda_T psi(u) + sum_t min(b_t / lambda_t, a_t)`` (entropic
            learners), 'log2' for ``2 sqrt((2 log2(d) - 1) sum_t b_{t,inf})``, the
            regret-matching bound at ``q = q_opt(d)`` written with the
            l_inf terms. The factor 2 comes from carrying
            ``d^(2/q) (q - 1) <= 2 (2 log2(d) - 1)`` through the infimum
            over lambda, so it always dominates the 'theorem' form

    Returns:
        float
    """
    if form not in CERTIFICATE_FORMS:
        raise InvalidInputError(f'unknown certificate form {form!r}')
    if history.T == 0:
        return 0.0
    u = _coerce_competitor(u, history.d)
    if kind == 'replicated-dormplus':
        return float(sum(regret_certificate('dormplus', copy, u, form=form)
                         for copy in history.copies if copy.T > 0))
    _check_complete(history)
    if kind in FTRL_KINDS:
        return _ftrl_certificate(kind, history, u, form)
    if kind in DORM_KINDS:
        return _dorm_certificate(kind, history, u, form)
    raise InvalidInputError(f'no certificate for learner kind {kind!r}')


def _ftrl_certificate(kind, history, u, form):
    psi = negentropy(u)
    terms = ftrl_terms(history)
    a, b = terms.a, terms.b
    lambdas = np.asarray(history.lambdas, dtype=float)
    if form == 'log2':
        raise InvalidInputError('the log2 form applies to regret-matching learners')
    if form == 'tight' or kind == 'odaftrl-const':
        total = lambdas[-1] * psi
        for t in range(len(a)):
            lam = lambdas[t]
            total += a[t] if lam == 0 else min(b[t] / lam, a[t])
        return float(total)
    alpha = float(history.alpha)
    T = history.T
    # windows ending strictly before each round, for both tunings
    windows = window_sums(a, history.last[1:T + 1])[:T - 1]
    window_max = max(windows.tolist(), default=0.0)
    root = math.sqrt(float(np.sum(a ** 2 + 2 * alpha * b)))
    return float((psi / alpha + 1.0) * (2.0 * window_max + root))


def _dorm_certificate(kind, history, u, form):
    cfg = PNormConfig.coerce(history.q)
    d = history.d
    if form == 'log2':
        if d < 2:
            return 0.0
        inf_terms = dorm_terms(history, variant=kind, norm=math.inf)
        const = max(2.0 * math.log2(d) - 1.0, 0.0)
        # inf over lambda gives sqrt(2 (q - 1) ||u||_p^2 sum b_q), and
        # d^(2/q) (q - 1) <= 2 (2 log2 d - 1) at q_opt, hence the factor 2
        return float(2.0 * math.sqrt(const * float(np.sum(inf_terms.b))))
    if form == 'tight':
        raise InvalidInputError('the tight form applies to entropic learners')
    terms = dorm_terms(history, variant=kind)
    unorm = _norm(u, cfg.p)
    return float(math.sqrt(2.0 * unorm ** 2 * float(np.sum(terms.b)) / (cfg.p - 1.0)))


def hint_certificate(history, form='theorem'):
    """
    Upper bound on the hint learner's regret against any single column.

    Args:
        history (LearnerHistory): a finalized :class:`AdaptiveHinter` history
            with ``rhos``, ``gammas`` and ``last`` (meta delays)
        form (str): 'theorem' sums the l2 huber terms of the meta regrets;
            'interpretable' uses ``min(xi_t / 2, zeta_t)`` (``xi_T / 2`` at
            the final round) scaled by the number of columns

    Example:
        >>> from delayed_oco.bounds import hint_certificate
        >>> hist = _Namespace(dict(T=0))
        >>> hint_certificate(hist)
        0.0
    """
    T = history.T
    if T == 0:
        return 0.0
    if len(history.rhos) < T:
        raise IncompleteHistoryError('hint certificate needs every meta regret')
    m = len(history.rhos[0])
    last = np.asarray(history.last, dtype=int)
    if form == 'theorem':
        rhos = list(history.rhos)
        total = 0.0
        for t in range(1, T + 1):
            window = window_sum(rhos, int(last[t - 1]), t, d=m)
            x = _norm(window, 2)
            if t < T:
                block = window_sum(rhos, int(last[t - 1]), int(last[t]), d=m)
                total += huber(x, _norm(block, 2))
            else:
                total += 0.5 * x * x
        return float(math.sqrt(2.0 * total))
    if form == 'interpretable':
        total = 0.0
        for t in range(1, T + 1):
            terms = hint_bound_terms(history.gammas, last, t)
            if t < T:
                total += min(terms.xi / 2.0, terms.zeta)
            else:
                total += terms.xi / 2.0
        return float(math.sqrt(2.0 * m * total))
    raise InvalidInputError(f'unknown hint certificate form {form!r}')
