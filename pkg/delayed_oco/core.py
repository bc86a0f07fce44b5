"""
Shared vector primitives and delayed-feedback bookkeeping.

Rounds are 1-indexed. A :class:`DelaySchedule` says at the end of which
round each subgradient becomes observable, and a :class:`FeedbackQueue`
buffers submitted subgradients until then.

Example:
    >>> from delayed_oco.core import DelaySchedule, FeedbackQueue
    >>> sched = DelaySchedule.constant(2)
    >>> sched.last(5), sched.first(2), sched.last(2)
    (2, 5, None)
    >>> queue = FeedbackQueue(sched, d=2)
    >>> for t in range(1, 5):
    >>>     queue.push(t, [t, 0])
    >>>     delivered = queue.pop_due(t)
    >>>     print(t, [s for s, _ in delivered])
    1 []
    2 []
    3 [1]
    4 [2]
    >>> queue.revealed_prefix.tolist()
    [3.0, 0.0]
"""
import bisect
import math
import os
import numpy as np
import ubelt as ub


class InvalidInputError(ValueError):
    ...


class ProtocolError(RuntimeError):
    ...


class IncompleteHistoryError(ValueError):
    ...


def coerce_vector(values, d=None, name='vector'):
    """
    Validate a real vector of length ``d`` with finite entries.

    Args:
        values (ArrayLike): the candidate vector
        d (int | None): required length
        name (str): used in error messages

    Returns:
        np.ndarray: a float64 copy

    Example:
        >>> from delayed_oco.core import coerce_vector
        >>> coerce_vector([1, 2], d=2).tolist()
        [1.0, 2.0]
        >>> import pytest
        >>> with pytest.raises(InvalidInputError):
        ...     coerce_vector([1, 2], d=3, name='g')
        >>> with pytest.raises(InvalidInputError):
        ...     coerce_vector([1, float('nan')])
    """
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as ex:
        raise InvalidInputError(f'{name} is not a real vector: {ex}')
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise InvalidInputError(f'{name} must be a non-empty 1d vector, got shape {arr.shape}')
    if d is not None and arr.shape[0] != d:
        raise InvalidInputError(f'{name} has length {arr.shape[0]}, expected d={d}')
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f'{name} has non-finite entries')
    return arr


def simplex_normalize(w_tilde):
    """
    Map a nonnegative vector onto the simplex; the zero vector maps to uniform.

    Args:
        w_tilde (ArrayLike): nonnegative finite entries

    Returns:
        np.ndarray: simplex weights

    Example:
        >>> from delayed_oco.core import simplex_normalize
        >>> simplex_normalize([2, 0]).tolist()
        [1.0, 0.0]
        >>> simplex_normalize([0, 0, 0]).round(6).tolist()
        [0.333333, 0.333333, 0.333333]
        >>> simplex_normalize([1, 1, 2]).tolist()
        [0.25, 0.25, 0.5]
    """
    w_tilde = coerce_vector(w_tilde, name='w_tilde')
    if np.any(w_tilde < 0):
        raise InvalidInputError('w_tilde has negative entries')
    total = w_tilde.sum()
    if total > 0:
        return w_tilde / total
    return np.full(len(w_tilde), 1.0 / len(w_tilde))


def instantaneous_regret(g, w):
    """
    The vector ``1 <g, w> - g`` of per-expert advantages over the play.

    Args:
        g (ArrayLike): loss subgradient
        w (ArrayLike): simplex play

    Returns:
        np.ndarray

    Example:
        >>> from delayed_oco.core import instantaneous_regret
        >>> instantaneous_regret([1, 0], [0.5, 0.5]).tolist()
        [-0.5, 0.5]
    """
    g = coerce_vector(g, name='g')
    w = coerce_vector(w, d=len(g), name='w')
    return np.dot(g, w) - g


class DelaySchedule(ub.NiceRepr):
    """
    Reveal times of the per-round subgradients.

    ``reveal_time(t)`` is the round at whose end ``g_t`` becomes observable
    (``None`` when it never is). ``last(t)`` is the largest ``s`` such that
    the whole prefix ``g_1 .. g_s`` is observable before round ``t`` plays,
    and ``first(t)`` is the first round that can see ``g_1 .. g_t``.

    Explicit tables must be prefix observable: reveal times are at least
    the round index, nondecreasing, and once a round is never revealed no
    later round is revealed either.

    Example:
        >>> from delayed_oco.core import DelaySchedule
        >>> sched = DelaySchedule.explicit([1, 3, 3, None])
        >>> [sched.last(t) for t in range(1, 6)]
        [None, 1, 1, 3, 3]
        >>> [sched.first(t) for t in range(1, 5)]
        [2, 4, 4, None]
        >>> print(sched)
        <DelaySchedule(explicit, T=4)>
    """

    def __init__(self, delay=None, reveal=None):
        if (delay is None) == (reveal is None):
            raise InvalidInputError('Specify exactly one of delay or reveal')
        self.delay = None
        self.reveal = None
        self._keys = None
        if delay is not None:
            if isinstance(delay, float) and not float(delay).is_integer():
                raise InvalidInputError(f'delay={delay} must be an integer')
            delay = int(delay)
            if delay < 0:
                raise InvalidInputError(f'delay={delay} must be nonnegative')
            self.delay = delay
        else:
            self.reveal = tuple(self._validate_reveal(reveal))
            self._keys = [math.inf if r is None else r for r in self.reveal]

    @staticmethod
    def _validate_reveal(reveal):
        prev = 0
        seen_never = False
        for t, r in enumerate(reveal, start=1):
            if r is None or (isinstance(r, float) and math.isnan(r)):
                seen_never = True
                yield None
                continue
            if isinstance(r, float) and not r.is_integer():
                raise InvalidInputError(f'reveal time of round {t} must be an integer, got {r}')
            r = int(r)
            if seen_never:
                raise InvalidInputError(
                    f'round {t} is revealed at {r} but an earlier round is '
                    'never revealed; schedules must be prefix observable')
            if r < t:
                raise InvalidInputError(
                    f'round {t} cannot be revealed before it is played (reveal={r})')
            if r < prev:
                raise InvalidInputError(
                    f'round {t} is revealed at {r}, before round {t - 1} (reveal={prev}); '
                    'schedules must be prefix observable')
            prev = r
            yield r

    def __nice__(self):
        if self.is_constant:
            return f'D={self.delay}'
        return f'explicit, T={len(self.reveal)}'

    @classmethod
    def constant(cls, delay):
        return cls(delay=delay)

    @classmethod
    def explicit(cls, reveal):
        return cls(reveal=list(reveal))

    @classmethod
    def from_csv(cls, fpath):
        """
        Read a ``t,reveal_time`` table. Empty reveal times mean never revealed.

        Example:
            >>> from delayed_oco.core import DelaySchedule
            >>> import ubelt as ub
            >>> dpath = ub.Path.appdir('delayed_oco/tests/core').ensuredir()
            >>> fpath = dpath / 'sched.csv'
            >>> DelaySchedule.explicit([2, 2, 4, None]).dump_csv(fpath)
            >>> print(fpath.read_text())
            t,reveal_time
            1,2
            2,2
            3,4
            4,
            >>> DelaySchedule.from_csv(fpath).reveal
            (2, 2, 4, None)
        """
        import pandas as pd
        fpath = ub.Path(fpath)
        if not fpath.exists():
            raise InvalidInputError(f'schedule file {fpath} does not exist')
        table = pd.read_csv(fpath)
        missing = {'t', 'reveal_time'} - set(table.columns)
        if missing:
            raise InvalidInputError(f'schedule file {fpath} is missing columns {sorted(missing)}')
        table = table.sort_values('t')
        expected = list(range(1, len(table) + 1))
        if table['t'].astype(int).tolist() != expected:
            raise InvalidInputError(f'schedule file {fpath} must list rounds 1..{len(table)} once each')
        reveal = [None if pd.isna(r) else int(r) for r in table['reveal_time']]
        return cls.explicit(reveal)

    def dump_csv(self, fpath, T=None):
        import pandas as pd
        if T is None:
            if self.is_constant:
                raise InvalidInputError('T is required to dump a constant schedule')
            T = len(self.reveal)
        reveal = [self.reveal_time(t) for t in range(1, T + 1)]
        table = pd.DataFrame({
            't': np.arange(1, T + 1),
            'reveal_time': pd.array(reveal, dtype='Int64'),
        })
        table.to_csv(fpath, index=False)

    @classmethod
    def coerce(cls, data):
        """
        Args:
            data (DelaySchedule | int | str | PathLike | List[int | None]):
                a constant delay, a schedule CSV path, or an explicit table

        Example:
            >>> from delayed_oco.core import DelaySchedule
            >>> DelaySchedule.coerce(3)
            <DelaySchedule(D=3)>
            >>> DelaySchedule.coerce('1')
            <DelaySchedule(D=1)>
            >>> DelaySchedule.coerce([1, 2, 3])
            <DelaySchedule(explicit, T=3)>
        """
        if isinstance(data, cls):
            return data
        if isinstance(data, (bool, np.bool_)):
            raise InvalidInputError(f'cannot coerce {data!r} into a delay schedule')
        if isinstance(data, (int, np.integer, float)):
            return cls.constant(data)
        if isinstance(data, str) and data.strip().lstrip('-').isdigit():
            return cls.constant(int(data.strip()))
        if isinstance(data, (str, os.PathLike)):
            return cls.from_csv(data)
        if isinstance(data, (list, tuple, np.ndarray)):
            return cls.explicit(data)
        raise InvalidInputError(f'cannot coerce {data!r} into a delay schedule')

    @property
    def is_constant(self):
        return self.delay is not None

    @property
    def horizon(self):
        return None if self.is_constant else len(self.reveal)

    def reveal_time(self, t):
        if t < 1:
            raise InvalidInputError(f'rounds start at 1, got t={t}')
        if self.is_constant:
            return t + self.delay
        if t > len(self.reveal):
            return None
        return self.reveal[t - 1]

    def last(self, t):
        """
        Largest s with g_1..g_s observable before round t plays, or None.
        """
        if t < 1:
            raise InvalidInputError(f'rounds start at 1, got t={t}')
        if self.is_constant:
            s = t - self.delay - 1
        else:
            s = bisect.bisect_left(self._keys, t)
        return s if s > 0 else None

    def num_observable(self, t):
        """
        Like :func:`last` but 0 when nothing is observable.
        """
        return self.last(t) or 0

    def first(self, t):
        """
        The first round that plays with g_1..g_t observable, or None.
        """
        if t < 1:
            raise InvalidInputError(f'rounds start at 1, got t={t}')
        if self.is_constant:
            return t + self.delay + 1
        reveal = self.reveal_time(t)
        return None if reveal is None else reveal + 1

    def last_array(self, T):
        """
        Returns:
            np.ndarray: ``num_observable(t)`` for ``t = 1 .. T + 1``
        """
        return np.array([self.num_observable(t) for t in range(1, T + 2)], dtype=int)


class FeedbackQueue(ub.NiceRepr):
    """
    Buffers submitted subgradients until the schedule reveals them.

    Each subgradient is delivered exactly once, in round order, at the end of
    its reveal round; ``revealed_prefix`` is the sum of everything delivered.
    """

    def __init__(self, schedule, d):
        self.schedule = DelaySchedule.coerce(schedule)
        self.d = d
        self.pending = []
        self.revealed_prefix = np.zeros(d)
        self.num_revealed = 0
        self.num_pushed = 0

    def __nice__(self):
        return f'pending={len(self.pending)}, revealed={self.num_revealed}'

    def __len__(self):
        return len(self.pending)

    def push(self, t, g):
        if t != self.num_pushed + 1:
            raise ProtocolError(
                f'feedback for round {t} submitted, but round {self.num_pushed + 1} is next')
        g = coerce_vector(g, d=self.d, name='g')
        self.pending.append((t, g))
        self.num_pushed = t

    def pop_due(self, t):
        """
        Deliver every pending subgradient revealed by the end of round ``t``.

        Returns:
            List[Tuple[int, np.ndarray]]
        """
        due = self.schedule.num_observable(t + 1)
        delivered = []
        while self.pending and self.pending[0][0] <= due:
            delivered.append(self._deliver())
        return delivered

    def flush(self):
        """
        Deliver everything still pending, used once the run is over.
        """
        delivered = []
        while self.pending:
            delivered.append(self._deliver())
        return delivered

    def _deliver(self):
        s, g = self.pending.pop(0)
        self.revealed_prefix = self.revealed_prefix + g
        self.num_revealed = s
        return s, g
