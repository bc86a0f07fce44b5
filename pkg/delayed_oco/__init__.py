r"""
Delayed Optimistic Online Learning
==================================

The delayed_oco module implements online learners over the probability
simplex that play with delayed feedback and optimistic hints: optimistic
delayed adaptive FTRL with constant, DUB and AdaHedgeD tunings, the
tuning-free regret matching learners DORM and DORM+, a replication baseline,
and a learned hinter that combines several hint strategies. Every run
produces a regret certificate computed from its own history.

The following examples show how to use the delayed_oco API in Python. For
the command line see :mod:`delayed_oco.main`.


Example:
    >>> # The available kinds classmethod lists every learner
    >>> import delayed_oco
    >>> print(delayed_oco.Learner.available_kinds())
    ['dorm', 'dormplus', 'adahedged', 'dub', 'odaftrl-const', 'replicated-dormplus']

Example:
    >>> # The protocol is the same for every learner: ask for a play given a
    >>> # hint, then hand over the loss subgradient. The delay schedule
    >>> # decides when each subgradient reaches the learner.
    >>> import delayed_oco
    >>> import numpy as np
    >>> learner = delayed_oco.Learner.create('adahedged', d=3, schedule=2)
    >>> rng = np.random.default_rng(0)
    >>> for t in range(50):
    >>>     w = learner.play(hint=None)
    >>>     learner.submit(rng.normal(size=3))
    >>> history = learner.finalize()
    >>> regret = delayed_oco.linearized_regret(history, [1, 0, 0])
    >>> bound = delayed_oco.regret_certificate('adahedged', history, [1, 0, 0])
    >>> bool(regret <= bound)
    True
"""

__mkinit__ = """
mkinit -m delayed_oco
"""
__version__ = '0.1.0'


__submodules__ = {
    'core': ['DelaySchedule', 'FeedbackQueue'],
    'base_learner': ['Learner'],
    'bounds': ['regret_certificate', 'linearized_regret', 'hint_certificate'],
    'hinting': ['AdaptiveHinter'],
    'experiment': ['ExperimentConfig', 'run_experiment'],
}
from delayed_oco import core
from delayed_oco import base_learner
from delayed_oco import bounds
from delayed_oco import hinting
from delayed_oco import experiment

from delayed_oco.core import (DelaySchedule, FeedbackQueue,)
from delayed_oco.base_learner import (Learner,)
from delayed_oco.bounds import (hint_certificate, linearized_regret,
                                regret_certificate,)
from delayed_oco.hinting import (AdaptiveHinter,)
from delayed_oco.experiment import (ExperimentConfig, run_experiment,)

__all__ = ['AdaptiveHinter', 'DelaySchedule', 'ExperimentConfig',
           'FeedbackQueue', 'Learner', 'base_learner', 'bounds', 'core',
           'experiment', 'hint_certificate', 'hinting', 'linearized_regret',
           'regret_certificate', 'run_experiment']
