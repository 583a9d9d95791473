"""Order-d differencing of a tensor-slice sequence and its exact inverse.

Sequences are arrays whose last axis indexes time. Differencing retains the
first slice at every level (``heads``) so the whole input can be rebuilt
bit-for-bit, and the last slice at every level (``tails``) so newly predicted
differences can be integrated back to the original scale one step at a time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DifferencedSeries",
    "difference",
    "reconstruct",
    "invert_last",
    "extend",
    "push_observed",
]


@dataclass(frozen=True)
class DifferencedSeries:
    """Result of order-``order`` differencing of a slice sequence.

    ``slices`` holds the level-``order`` differences (last axis = time, length
    ``L - order``). ``heads[k]`` / ``tails[k]`` are the first / last slice of
    the level-``k`` sequence for ``k = 0..order-1``.
    """

    order: int
    slices: np.ndarray
    heads: tuple[np.ndarray, ...]
    tails: tuple[np.ndarray, ...]

    @property
    def slice_shape(self) -> tuple[int, ...]:
        return self.slices.shape[:-1]


def difference(s: np.ndarray, d: int) -> DifferencedSeries:
    """Apply first differences along the last axis of ``s``, ``d`` times."""
    s = np.asarray(s, dtype=np.float64)
    if d < 0:
        raise ValueError(f"differencing order must be >= 0, got {d}")
    if s.shape[-1] <= d:
        raise ValueError(
            f"sequence of length {s.shape[-1]} too short for order-{d} differencing"
        )
    heads = []
    tails = []
    level = s
    for _ in range(d):
        heads.append(level[..., 0].copy())
        tails.append(level[..., -1].copy())
        level = np.diff(level, axis=-1)
    return DifferencedSeries(
        order=d, slices=level.copy(), heads=tuple(heads), tails=tuple(tails)
    )


def reconstruct(ds: DifferencedSeries) -> np.ndarray:
    """Rebuild the original sequence exactly from differences and heads."""
    level = ds.slices
    for head in reversed(ds.heads):
        level = np.concatenate(
            [head[..., None], head[..., None] + np.cumsum(level, axis=-1)], axis=-1
        )
    return level


def invert_last(ds: DifferencedSeries, predicted: np.ndarray) -> np.ndarray:
    """Integrate one predicted order-d difference back to the original scale.

    Uses the stored tail value at each level; equivalent to appending
    ``predicted`` at level d and cumulatively summing upward.
    """
    predicted = np.asarray(predicted, dtype=np.float64)
    if predicted.shape != ds.slice_shape:
        raise ValueError(
            f"predicted slice shape {predicted.shape} != {ds.slice_shape}"
        )
    value = predicted
    for tail in reversed(ds.tails):
        value = tail + value
    return value


def extend(ds: DifferencedSeries, predicted: np.ndarray) -> tuple[DifferencedSeries, np.ndarray]:
    """Append a predicted order-d difference; return the new state and the
    restored original-scale slice."""
    value = np.asarray(predicted, dtype=np.float64)
    if value.shape != ds.slice_shape:
        raise ValueError(f"predicted slice shape {value.shape} != {ds.slice_shape}")
    new_tails = list(ds.tails)
    for k in range(ds.order - 1, -1, -1):
        value = ds.tails[k] + value
        new_tails[k] = value
    return (
        DifferencedSeries(
            order=ds.order,
            slices=np.concatenate([ds.slices, predicted[..., None]], axis=-1),
            heads=ds.heads,
            tails=tuple(new_tails),
        ),
        value,
    )


def push_observed(ds: DifferencedSeries, observed: np.ndarray) -> tuple[DifferencedSeries, np.ndarray]:
    """Append an observed original-scale slice; return the new state and the
    induced order-d difference."""
    value = np.asarray(observed, dtype=np.float64)
    if value.shape != ds.slice_shape:
        raise ValueError(f"observed slice shape {value.shape} != {ds.slice_shape}")
    new_tails = list(ds.tails)
    for k in range(ds.order):
        prev_tail = ds.tails[k]
        new_tails[k] = value
        value = value - prev_tail
    return (
        DifferencedSeries(
            order=ds.order,
            slices=np.concatenate([ds.slices, value[..., None]], axis=-1),
            heads=ds.heads,
            tails=tuple(new_tails),
        ),
        value,
    )
