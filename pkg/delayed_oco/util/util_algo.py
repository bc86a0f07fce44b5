"""
Small array helpers for windowed sums over round-indexed histories.

Rounds are 1-indexed everywhere in this package, so ``items[s - 1]`` holds
the value for round ``s``.
"""
import numpy as np


def window_sum(items, start, stop, d=None):
    """
    Sum the round-indexed vectors for rounds ``start + 1 .. stop``.

    The accumulation starts from an explicit zero vector and adds the items
    in round order, so a single-item window returns that item bit-exactly.

    Args:
        items (List[np.ndarray]): ``items[s - 1]`` is the vector for round s
        start (int): rounds strictly after this one are included
        stop (int): last round included
        d (int | None): dimension, required when ``items`` is empty

    Returns:
        np.ndarray

    Example:
        >>> from delayed_oco.util.util_algo import window_sum
        >>> items = [np.array([1., 0.]), np.array([2., 1.]), np.array([4., 3.])]
        >>> window_sum(items, 1, 3).tolist()
        [6.0, 4.0]
        >>> window_sum(items, 2, 2).tolist()
        [0.0, 0.0]
        >>> window_sum([], -1, 0, d=3).tolist()
        [0.0, 0.0, 0.0]
    """
    if d is None:
        d = len(items[0])
    total = np.zeros(d)
    for s in range(max(start, 0) + 1, stop + 1):
        total = total + items[s - 1]
    return total


def prefix_sums(rows):
    """
    Prefix sums of a ``(T, d)`` array with a leading zero row.

    Args:
        rows (np.ndarray): per-round vectors

    Returns:
        np.ndarray: ``(T + 1, d)`` array where row ``k`` is the sum of the
        first ``k`` rows.

    Example:
        >>> from delayed_oco.util.util_algo import prefix_sums
        >>> prefix_sums(np.array([[1., 2.], [3., 4.]])).tolist()
        [[0.0, 0.0], [1.0, 2.0], [4.0, 6.0]]
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 1:
        rows = rows[:, None]
    out = np.zeros((rows.shape[0] + 1,) + rows.shape[1:])
    np.cumsum(rows, axis=0, out=out[1:])
    return out


def window_sums(values, last):
    """
    Windowed sums ``values[last[t] + 1 : t]`` for every round ``t``.

    Args:
        values (np.ndarray): ``(T,)`` or ``(T, d)`` per-round values
        last (Sequence[int]): ``last[t - 1]`` is the index after which the
            window of round ``t`` starts (0 when nothing is excluded).

    Returns:
        np.ndarray: same shape as ``values``

    Example:
        >>> from delayed_oco.util.util_algo import window_sums
        >>> window_sums(np.array([1., 2., 4., 8.]), [0, 0, 1, 2]).tolist()
        [1.0, 3.0, 6.0, 12.0]
    """
    values = np.asarray(values, dtype=float)
    squeeze = values.ndim == 1
    cums = prefix_sums(values)
    T = values.shape[0]
    stops = np.arange(1, T + 1)
    starts = np.asarray(last[:T], dtype=int)
    out = cums[stops] - cums[starts]
    if squeeze:
        out = out[:, 0]
    return out
