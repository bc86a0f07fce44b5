"""
The round protocol shared by every learner.

Each round the driver asks for a play given a hint, then submits the round's
loss subgradient. The learner's :class:`FeedbackQueue` holds submitted
subgradients until the delay schedule reveals them, at which point they are
passed to :func:`Learner.receive` in round order.

Example:
    >>> from delayed_oco.base_learner import Learner
    >>> learner = Learner.create('adahedged', d=3, schedule=1)
    >>> w1 = learner.play()
    >>> learner.submit([1., 0., 0.])
    >>> w2 = learner.play()
    >>> learner.submit([1., 0., 0.])
    >>> len(learner.revealed)
    1
    >>> history = learner.finalize()
    >>> print(history)
    <LearnerHistory(adahedged, d=3, T=2)>
"""
import logging
import numpy as np
import ubelt as ub

from delayed_oco.core import (DelaySchedule, FeedbackQueue, InvalidInputError,
                              ProtocolError, coerce_vector,
                              instantaneous_regret)

logger = logging.getLogger(__name__)

LEARNER_KINDS = ('dorm', 'dormplus', 'adahedged', 'dub', 'odaftrl-const',
                 'replicated-dormplus')


class UnknownLearnerError(KeyError):
    ...


class LearnerHistory(ub.NiceRepr):
    """
    A read-only record of a run, sufficient to evaluate regret and bounds.

    Attributes:
        kind (str): learner kind
        d (int): number of experts
        T (int): rounds played
        plays (np.ndarray): ``(T, d)`` plays
        hints (np.ndarray): ``(T, d)`` hints in the learner's space
        grads (np.ndarray): ``(n, d)`` revealed loss subgradients
        regrets (np.ndarray): ``(n, d)`` instantaneous regrets
        lambdas (np.ndarray): ``(T,)`` regularization weights used per play
        last (np.ndarray): ``last(t)`` for ``t = 1 .. T + 1`` (0 for none)
    """

    def __init__(self, kind, d, **kwargs):
        self.kind = kind
        self.d = d
        self.__dict__.update(kwargs)

    def __nice__(self):
        return f'{self.kind}, d={self.d}, T={self.T}'

    @property
    def complete(self):
        return len(self.grads) == self.T


class Learner(ub.NiceRepr):
    """
    Base class for a learner over the simplex.

    Subclasses implement ``_play(hint)`` returning simplex weights and
    ``_receive(s, g)`` for the in-order delivery of round ``s``'s feedback.
    """
    kind = None
    space = 'gradient'

    def __init__(self, d, schedule=0):
        if int(d) != d or d < 1:
            raise InvalidInputError(f'd={d} must be a positive integer')
        self.d = int(d)
        self.schedule = DelaySchedule.coerce(schedule)
        self.queue = FeedbackQueue(self.schedule, self.d)
        self.t = 0
        self.plays = []
        self.hints = []
        self.lambdas = []
        self.revealed = []
        self.regrets = []

    def __nice__(self):
        return f'{self.kind}, d={self.d}, t={self.t}, {self.schedule}'

    @classmethod
    def available_kinds(cls):
        return list(LEARNER_KINDS)

    @classmethod
    def create(cls, kind='adahedged', d=2, schedule=0, **kwargs):
        """
        Main entry point to create a learner

        Args:
            kind (str): one of :data:`LEARNER_KINDS`
            d (int): number of experts
            schedule (int | DelaySchedule): feedback delays
            **kwargs:
                q (float | None): dual exponent of the regret-matching learners
                lam (float | None): regularization weight (constant tuning,
                    and the unused scale of the regret-matching learners)
                alpha (float | None): scale of the adaptive tunings

        Example:
            >>> from delayed_oco.base_learner import Learner
            >>> for kind in Learner.available_kinds():
            >>>     print(Learner.create(kind, d=2, schedule=1))
            <DORM(dorm, d=2, t=0, D=1)>
            <DORMPlus(dormplus, d=2, t=0, D=1)>
            <ODAFTRL(adahedged, d=2, t=0, D=1)>
            <ODAFTRL(dub, d=2, t=0, D=1)>
            <ODAFTRL(odaftrl-const, d=2, t=0, D=1)>
            <ReplicatedLearner(replicated-dormplus, d=2, t=0, D=1)>
        """
        kwargs = ub.udict(kwargs)
        if kind in {'odaftrl-const', 'dub', 'adahedged'}:
            from delayed_oco import ftrl_learners
            tuning = {'odaftrl-const': 'constant'}.get(kind, kind)
            self = ftrl_learners.ODAFTRL(d, schedule, tuning=tuning,
                                         **(kwargs & {'lam', 'alpha'}))
        elif kind == 'dorm':
            from delayed_oco import omd_learners
            self = omd_learners.DORM(d, schedule, **(kwargs & {'q', 'lam'}))
        elif kind == 'dormplus':
            from delayed_oco import omd_learners
            self = omd_learners.DORMPlus(d, schedule, **(kwargs & {'q', 'lam'}))
        elif kind == 'replicated-dormplus':
            from delayed_oco import omd_learners
            copykw = kwargs & {'q', 'lam'}
            schedule = DelaySchedule.coerce(schedule)
            if not schedule.is_constant:
                raise InvalidInputError('replicated learners need a constant delay')
            self = omd_learners.replicate(
                lambda: omd_learners.DORMPlus(d, 0, **copykw), schedule.delay)
        else:
            raise UnknownLearnerError(kind)
        return self

    def hint_frame(self):
        """
        The learner whose history defines the hint of the next round.
        """
        return self

    def play(self, hint=None):
        """
        Advance to the next round and return its play.

        Args:
            hint (ArrayLike | None): the optimistic hint, zero when None

        Returns:
            np.ndarray: simplex weights
        """
        if hint is None:
            hint = np.zeros(self.d)
        else:
            hint = coerce_vector(hint, d=self.d, name='hint')
        needed = self.schedule.num_observable(self.t + 1)
        if needed > len(self.revealed):
            raise ProtocolError(
                f'round {self.t + 1} needs feedback through round {needed}, '
                f'but only {len(self.revealed)} rounds were revealed')
        self.t += 1
        w = self._play(hint)
        self.plays.append(w)
        self.hints.append(hint)
        return w

    def submit(self, g):
        """
        Hand over the loss subgradient of the current round.

        Anything the schedule reveals by the end of this round is delivered
        to :func:`receive` before returning.
        """
        if self.t == 0 or self.queue.num_pushed != self.t - 1:
            raise ProtocolError('submit must follow exactly one play')
        self.queue.push(self.t, g)
        for s, g_s in self.queue.pop_due(self.t):
            self.receive(g_s, s)

    def receive(self, g, s=None):
        """
        Deliver the feedback of round ``s``, which must be the next one.
        """
        expected = len(self.revealed) + 1
        if s is None:
            s = expected
        if s != expected:
            raise ProtocolError(
                f'feedback for round {s} arrived, but round {expected} is next')
        if s > self.t:
            raise ProtocolError(f'feedback for round {s} arrived before it was played')
        g = coerce_vector(g, d=self.d, name='g')
        self.revealed.append(g)
        self.regrets.append(instantaneous_regret(g, self.plays[s - 1]))
        logger.debug('%s received round %d at round %d', self.kind, s, self.t)
        self._receive(s, g)

    def finalize(self):
        """
        Reveal all remaining feedback and return the run history.

        Returns:
            LearnerHistory
        """
        for s, g_s in self.queue.flush():
            self.receive(g_s, s)
        return self.history()

    def history(self):
        T = self.t
        d = self.d
        history = LearnerHistory(
            self.kind, d, T=T,
            plays=np.array(self.plays).reshape(T, d),
            hints=np.array(self.hints).reshape(T, d),
            grads=np.array(self.revealed).reshape(len(self.revealed), d),
            regrets=np.array(self.regrets).reshape(len(self.regrets), d),
            lambdas=np.array(self.lambdas, dtype=float),
            last=self.schedule.last_array(T),
            space=self.space,
        )
        history.__dict__.update(self._history_extras())
        return history

    def _history_extras(self):
        return {}

    def _play(self, hint):
        raise NotImplementedError

    def _receive(self, s, g):
        raise NotImplementedError
