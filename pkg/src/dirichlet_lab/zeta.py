"""Euler-Maclaurin evaluation of the Riemann zeta function.

Validated envelope: 1/2 < Re s <= 4, |Im s| <= 1e4, where the relative error
stays below 1e-10.  Outside that strip (but still Re s > 0) values are
computed and an AccuracyWarning is emitted.
"""

import math
import warnings

import numpy as np

from .errors import AccuracyWarning, PreconditionError

__all__ = ["zeta_eval", "zeta_values"]

# B_{2k} / (2k)! for k = 1..5; the correction terms of the summation formula.
_BERN = (
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
)

# Elementwise work arrays are capped at this many entries; the block split
# depends only on the input length, never on the worker count.
_INNER_BLOCK = 4_000_000


def _partial_power_sum(s: np.ndarray, N: int) -> np.ndarray:
    """Sum of n^{-s} for n = 1..N, vectorized over the array s."""
    out = np.zeros(s.shape, dtype=np.complex128)
    if N < 1:
        return out
    blk = max(1, _INNER_BLOCK // max(1, s.size))
    n0 = 1
    while n0 <= N:
        n1 = min(N, n0 + blk - 1)
        logs = np.log(np.arange(n0, n1 + 1, dtype=np.float64))
        out += np.exp(-logs[:, None] * s[None, :]).sum(axis=0)
        n0 = n1 + 1
    return out


def zeta_values(s, N=None) -> np.ndarray:
    """zeta at every point of the complex array s.

    The truncation point defaults to max(32, ceil(max |Im s|)), which keeps
    the correction series convergent throughout the validated strip.

    Raises:
        PreconditionError: some Re s <= 0, or s = 1 (the pole).
    """
    arr = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if arr.size == 0:
        return arr.copy()
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("zeta argument must be finite")
    if np.any(arr.real <= 0.0):
        raise PreconditionError("zeta evaluation requires Re s > 0")
    if np.any(np.abs(arr - 1.0) < 1e-12):
        raise PreconditionError("zeta has a pole at s = 1")
    if (
        np.any(arr.real <= 0.5)
        or np.any(arr.real > 4.0)
        or np.any(np.abs(arr.imag) > 1e4)
    ):
        warnings.warn("accuracy not guaranteed", AccuracyWarning, stacklevel=2)
    if N is None:
        N = max(32, int(math.ceil(np.abs(arr.imag).max())))
    N = int(N)

    out = _partial_power_sum(arr, N)
    logN = math.log(N)
    pow_1ms = np.exp((1.0 - arr) * logN)  # N^{1-s}
    out += pow_1ms / (arr - 1.0)
    out -= 0.5 * pow_1ms / N
    rising = arr.copy()  # s (s+1) ... (s+2k-2), built incrementally
    for k, c in enumerate(_BERN, start=1):
        out += c * rising * pow_1ms * math.exp(-2.0 * k * logN)
        rising = rising * (arr + (2 * k - 1)) * (arr + 2 * k)
    return out


def zeta_eval(s, N=None) -> complex:
    """zeta(s) for a single complex point."""
    return complex(zeta_values(np.asarray([s], dtype=np.complex128), N=N)[0])
