"""
Closed-form minimizers and conjugates for the two regularizers used by the
learners: negative entropy on the simplex, and half the squared p-norm on the
nonnegative orthant.

The entropic pieces subtract the coordinate max before exponentiating, so
shifting ``theta`` by an exactly representable constant leaves the play
bit-identical.

Example:
    >>> from delayed_oco.closed_forms import negentropy_argmin, negentropy_conjugate
    >>> import numpy as np
    >>> negentropy_argmin([np.log(2), 0], 1.0).round(6).tolist()
    [0.666667, 0.333333]
    >>> negentropy_argmin([3, 1, 3], 0).tolist()
    [0.5, 0.0, 0.5]
    >>> round(negentropy_conjugate([1, 1], 1.0), 12)
    1.0
"""
import math
from typing import NamedTuple
import numpy as np
from scipy import special

from delayed_oco.core import InvalidInputError, coerce_vector

#: weights at or below this are treated as exactly zero
WEIGHT_FLOOR = 1e-300


class PNormConfig(NamedTuple):
    """
    Exponent pair of the orthant regularizer ``0.5 * ||w||_p ** 2``.

    Example:
        >>> from delayed_oco.closed_forms import PNormConfig
        >>> PNormConfig.coerce(3).p
        1.5
        >>> PNormConfig.coerce(None, d=6)
        PNormConfig(q=2.0)
    """
    q: float

    @property
    def p(self):
        return self.q / (self.q - 1.0)

    @classmethod
    def coerce(cls, q, d=None):
        if isinstance(q, cls):
            return q
        if q is None or q == 'auto':
            if d is None:
                raise InvalidInputError('q="auto" needs the number of experts d')
            q = q_opt(d) if d >= 2 else 2.0
        try:
            q = float(q)
        except (TypeError, ValueError):
            raise InvalidInputError(f'q={q!r} must be a real number >= 2')
        if not math.isfinite(q) or q < 2:
            raise InvalidInputError(f'q={q} must be a finite real number >= 2')
        return cls(q)


def _check_lambda(lam):
    lam = float(lam)
    if not (lam >= 0) or not math.isfinite(lam):
        raise InvalidInputError(f'lambda={lam} must be finite and nonnegative')
    return lam


def negentropy(w):
    """
    ``sum_j w_j ln w_j + ln d`` with ``0 ln 0 = 0``; zero at uniform.

    Example:
        >>> from delayed_oco.closed_forms import negentropy
        >>> negentropy([0.5, 0.5])
        0.0
        >>> round(negentropy([1, 0, 0]), 12) == round(np.log(3), 12)
        True
    """
    w = np.asarray(w, dtype=float)
    return float(special.xlogy(w, w).sum() + math.log(len(w)))


def negentropy_argmin(theta, lam):
    """
    Minimizer over the simplex of ``lam * psi(w) - <theta, w>``.

    Args:
        theta (ArrayLike): negated linear coefficient
        lam (float): regularization weight, zero selects the argmax set

    Returns:
        np.ndarray: simplex weights
    """
    theta = coerce_vector(theta, name='theta')
    lam = _check_lambda(lam)
    top = theta.max()
    if lam == 0:
        mask = (theta == top).astype(float)
        return mask / mask.sum()
    return special.softmax((theta - top) / lam)


def negentropy_conjugate(theta, lam):
    """
    Value of ``max_w <theta, w> - lam * psi(w)`` over the simplex.

    Example:
        >>> from delayed_oco.closed_forms import negentropy_conjugate
        >>> round(negentropy_conjugate([0, 0, 0], 2.0), 12)
        0.0
        >>> negentropy_conjugate([5, -1], 0)
        5.0
    """
    theta = coerce_vector(theta, name='theta')
    lam = _check_lambda(lam)
    top = theta.max()
    if lam == 0:
        return float(top)
    shifted = special.logsumexp((theta - top) / lam)
    return float(lam * (shifted - math.log(len(theta))) + top)


def orthant_power(x, exponent):
    """
    Elementwise ``x ** exponent`` for ``x >= 0`` with ``0`` mapping to ``0``.

    An exponent of exactly one returns the input values unchanged.

    Example:
        >>> from delayed_oco.closed_forms import orthant_power
        >>> orthant_power(np.array([0., 4.]), 0.5).tolist()
        [0.0, 2.0]
    """
    x = np.asarray(x, dtype=float)
    if exponent == 1:
        return x.copy()
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.power(x[pos], exponent)
    return out


def pnorm_orthant_argmin(v, q):
    """
    Minimizer over the nonnegative orthant of ``0.5 ||w||_p^2 - <w, v>``.

    Args:
        v (ArrayLike): linear coefficient
        q (float | PNormConfig): dual exponent, q >= 2

    Returns:
        np.ndarray

    Example:
        >>> from delayed_oco.closed_forms import pnorm_orthant_argmin
        >>> pnorm_orthant_argmin([1, -1], 2).tolist()
        [1.0, 0.0]
        >>> pnorm_orthant_argmin([-1, -2], 3).tolist()
        [0.0, 0.0]
        >>> pnorm_orthant_argmin([3, 4], 2).tolist()
        [3.0, 4.0]
    """
    cfg = PNormConfig.coerce(q)
    v = coerce_vector(v, name='v')
    vpos = np.maximum(v, 0)
    if not np.any(vpos > 0):
        return np.zeros_like(v)
    if cfg.q == 2:
        return vpos
    # rescale so the norm cannot underflow
    scale = vpos.max()
    unit = vpos / scale
    norm = np.linalg.norm(unit, ord=cfg.q)
    return orthant_power(unit / norm, cfg.q - 1) * (norm * scale)


def pnorm_subgradient(w, p):
    """
    A subgradient of ``||w||_p`` for ``p`` in ``[1, inf]``.

    The ``p = inf`` case picks the lowest index among the max-magnitude
    coordinates.

    Example:
        >>> from delayed_oco.closed_forms import pnorm_subgradient
        >>> pnorm_subgradient([0, 0], 2).tolist()
        [0.0, 0.0]
        >>> pnorm_subgradient([3, 4], 2).tolist()
        [0.6, 0.8]
        >>> pnorm_subgradient([2, -5], float('inf')).tolist()
        [0.0, -1.0]
    """
    w = coerce_vector(w, name='w')
    p = float(p)
    if p < 1:
        raise InvalidInputError(f'p={p} must be at least 1')
    out = np.zeros_like(w)
    if not np.any(w != 0):
        return out
    if math.isinf(p):
        k = int(np.argmax(np.abs(w)))
        out[k] = np.sign(w[k])
        return out
    unit = np.abs(w) / np.abs(w).max()
    norm = np.linalg.norm(unit, ord=p)
    return orthant_power(unit / norm, p - 1) * np.sign(w)


def q_opt(d):
    """
    The q >= 2 minimizing ``d ** (2 / q) * (q - 1)``.

    The interior stationary point solves ``q ** 2 = c (q - 1)`` with
    ``c = 2 ln d``; it exists only for ``c >= 4`` and otherwise q = 2.

    Example:
        >>> from delayed_oco.closed_forms import q_opt
        >>> q_opt(2), q_opt(6)
        (2.0, 2.0)
        >>> round(q_opt(1000), 2)
        12.73
    """
    if d < 2 or int(d) != d:
        raise InvalidInputError(f'q_opt needs an integer d >= 2, got {d}')
    c = 2.0 * math.log(d)
    if c <= 4:
        return 2.0
    return max(2.0, 0.5 * (c + math.sqrt(c * c - 4.0 * c)))
