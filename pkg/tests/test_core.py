import pytest


def test_constant_schedule_bookkeeping():
    from delayed_oco.core import DelaySchedule
    sched = DelaySchedule.constant(2)
    assert [sched.last(t) for t in range(1, 6)] == [None, None, None, 1, 2]
    assert [sched.num_observable(t) for t in range(1, 6)] == [0, 0, 0, 1, 2]
    assert sched.first(2) == 5
    assert sched.reveal_time(4) == 6
    assert sched.last_array(3).tolist() == [0, 0, 0, 1]


def test_explicit_table_matches_constant_delay():
    from delayed_oco.core import DelaySchedule
    T = 12
    for D in [0, 1, 3]:
        const = DelaySchedule.constant(D)
        table = DelaySchedule.explicit([t + D for t in range(1, T + 1)])
        assert const.last_array(T).tolist() == table.last_array(T).tolist()
        for t in range(1, T + 1):
            assert const.first(t) == table.first(t)


def test_explicit_schedule_validation():
    from delayed_oco.core import DelaySchedule, InvalidInputError
    with pytest.raises(InvalidInputError):
        DelaySchedule.explicit([1, 1])
    with pytest.raises(InvalidInputError):
        DelaySchedule.explicit([3, 2, 4])
    with pytest.raises(InvalidInputError):
        DelaySchedule.explicit([1, None, 5])
    with pytest.raises(InvalidInputError):
        DelaySchedule.constant(-1)
    with pytest.raises(InvalidInputError):
        DelaySchedule(delay=1, reveal=[1])


def test_schedule_csv_roundtrip():
    import ubelt as ub
    from delayed_oco.core import DelaySchedule, InvalidInputError
    dpath = ub.Path.appdir('delayed_oco/tests/test_core').ensuredir()
    fpath = dpath / 'schedule.csv'
    sched = DelaySchedule.explicit([1, 4, 4, 6, None, None])
    sched.dump_csv(fpath)
    recon = DelaySchedule.coerce(fpath)
    assert recon.reveal == sched.reveal
    assert recon.last_array(6).tolist() == sched.last_array(6).tolist()

    bad_fpath = dpath / 'bad_schedule.csv'
    bad_fpath.write_text('t,reveal_time\n1,1\n3,3\n')
    with pytest.raises(InvalidInputError):
        DelaySchedule.from_csv(bad_fpath)
    with pytest.raises(InvalidInputError):
        DelaySchedule.from_csv(dpath / 'does_not_exist.csv')


def test_rounds_past_the_table_are_never_revealed():
    from delayed_oco.core import DelaySchedule
    sched = DelaySchedule.explicit([1, 2])
    assert sched.reveal_time(5) is None
    assert sched.last(10) == 2


def test_feedback_queue_delivers_in_order_once():
    import numpy as np
    from delayed_oco.core import DelaySchedule, FeedbackQueue
    sched = DelaySchedule.explicit([2, 2, 5, 5, 5])
    queue = FeedbackQueue(sched, d=1)
    delivered = {}
    for t in range(1, 6):
        queue.push(t, [float(t)])
        delivered[t] = [s for s, _ in queue.pop_due(t)]
    assert delivered == {1: [], 2: [1, 2], 3: [], 4: [], 5: [3, 4, 5]}
    assert len(queue) == 0
    assert np.allclose(queue.revealed_prefix, [15.0])


def test_feedback_queue_rejects_out_of_order_push():
    from delayed_oco.core import FeedbackQueue, ProtocolError
    queue = FeedbackQueue(1, d=2)
    queue.push(1, [0., 0.])
    with pytest.raises(ProtocolError):
        queue.push(3, [0., 0.])


def test_feedback_queue_flush():
    from delayed_oco.core import FeedbackQueue
    queue = FeedbackQueue(10, d=1)
    for t in range(1, 4):
        queue.push(t, [1.0])
        assert queue.pop_due(t) == []
    assert [s for s, _ in queue.flush()] == [1, 2, 3]
    assert queue.num_revealed == 3


def test_vector_primitives():
    import numpy as np
    from delayed_oco.core import (InvalidInputError, coerce_vector,
                                  instantaneous_regret, simplex_normalize)
    assert simplex_normalize([0., 0.]).tolist() == [0.5, 0.5]
    with pytest.raises(InvalidInputError):
        simplex_normalize([1., -1.])
    with pytest.raises(InvalidInputError):
        coerce_vector([[1., 2.]])
    with pytest.raises(InvalidInputError):
        coerce_vector([np.inf])
    w = np.array([0.25, 0.75])
    r = instantaneous_regret([1., 3.], w)
    # the play has zero instantaneous regret against itself
    assert abs(np.dot(r, w)) < 1e-12
