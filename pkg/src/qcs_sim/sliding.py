"""Centered sliding-window minimum with argmin tracking.

Implements the classic block-decomposition trick (prefix minima within
blocks combined with suffix minima) so a window of any width costs O(n)
regardless of size. Windows are truncated at the array edges, matching the
holdover semantics of a finite simulation day.
"""
from __future__ import annotations

import numpy as np


def _running_min_argmin(x: np.ndarray, reverse: bool) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative min and achieving index along the last axis of blocks."""
    if reverse:
        x = x[..., ::-1]
    m = np.minimum.accumulate(x, axis=-1)
    idx_local = np.arange(x.shape[-1])
    hit = x <= m  # positions where the running min was (re)set
    arg = np.maximum.accumulate(np.where(hit, idx_local, -1), axis=-1)
    if reverse:
        n = x.shape[-1]
        return m[..., ::-1], (n - 1 - arg)[..., ::-1]
    return m, arg


def rolling_min_argmin(x: np.ndarray, half_width: int) -> tuple[np.ndarray, np.ndarray]:
    """Windowed minimum of ``x`` over [i - half_width, i + half_width].

    Works on the last axis of any-dimensional input. Returns (values, index)
    where ``index`` is the position in the original array achieving the
    minimum (ties broken deterministically). Windows are clipped at the
    edges; an all-inf window yields +inf with index clamped into range.
    """
    x = np.asarray(x, dtype=float)
    if half_width < 0:
        raise ValueError("half_width must be >= 0")
    n = x.shape[-1]
    if n == 0:
        return x.copy(), np.zeros_like(x, dtype=np.int64)
    if half_width == 0:
        idx = np.broadcast_to(np.arange(n), x.shape).copy()
        return x.copy(), idx
    w = 2 * half_width + 1
    pad_tail = (-(n + 2 * half_width)) % w
    shape_pad = x.shape[:-1] + (n + 2 * half_width + pad_tail,)
    xp = np.full(shape_pad, np.inf)
    xp[..., half_width : half_width + n] = x
    blocks = xp.reshape(x.shape[:-1] + (-1, w))
    pref_m, pref_a = _running_min_argmin(blocks, reverse=False)
    suff_m, suff_a = _running_min_argmin(blocks, reverse=True)
    # Map block-local argmins back to padded coordinates.
    base = (np.arange(blocks.shape[-2]) * w)[:, None]
    pref_m = pref_m.reshape(shape_pad)
    suff_m = suff_m.reshape(shape_pad)
    pref_a = (pref_a + base).reshape(shape_pad)
    suff_a = (suff_a + base).reshape(shape_pad)
    lo = np.arange(n)  # window start in padded coordinates
    hi = lo + w - 1
    take_suffix = suff_m[..., lo] <= pref_m[..., hi]
    vals = np.where(take_suffix, suff_m[..., lo], pref_m[..., hi])
    args = np.where(take_suffix, suff_a[..., lo], pref_a[..., hi]) - half_width
    args = np.clip(args, 0, n - 1)
    return vals, args.astype(np.int64)


def rolling_any(mask: np.ndarray, half_width: int) -> np.ndarray:
    """True where any element of ``mask`` is True within the centered window."""
    mask = np.asarray(mask, dtype=bool)
    vals, _ = rolling_min_argmin(np.where(mask, 0.0, 1.0), half_width)
    return vals < 0.5
