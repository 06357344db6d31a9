"""Pointwise evaluation of Dirichlet series: truncated sums, smooth-number
truncations with certified tails, torus twists, and squared-coefficient
(tail) norms.
"""

import math

import numpy as np

from .coefficients import ExplicitSource, SeriesSpec
from .errors import NumericalError, PreconditionError
from .parallel import neumaier_sum, neumaier_sum_complex
from .primes import SmoothSet, primes_up_to, smooth_enumerate
from .zeta import zeta_values

__all__ = [
    "default_evaluator",
    "eval_array",
    "partial_eval",
    "smooth_truncation_eval",
    "tail_norm",
    "twisted_eval",
]

# Summation proceeds in fixed index blocks; block sums are combined with
# compensated accumulation so totals are reproducible bit for bit.
_SUM_BLOCK = 65536

# Elementwise outer products (indices x evaluation points) are capped at this
# many entries.
_OUTER_BLOCK = 4_000_000

_LOCAL_SUM_CAP = 400


def partial_eval(spec: SeriesSpec, s: complex, N: int) -> complex:
    """Sum of a_n n^{-s} for n <= N, ascending with compensated accumulation."""
    if N < 1:
        raise PreconditionError("partial_eval requires N >= 1")
    s = complex(s)
    a = spec.coeffs.dense(int(N))
    blocks = []
    n0 = 1
    while n0 <= N:
        n1 = min(N, n0 + _SUM_BLOCK - 1)
        ns = np.arange(n0, n1 + 1, dtype=np.float64)
        terms = a[n0 : n1 + 1] * np.exp(-s * np.log(ns))
        blocks.append(complex(np.sum(terms)))
        n0 = n1 + 1
    return neumaier_sum_complex(blocks)


def _explicit_support(src: ExplicitSource):
    idx = np.asarray([n for n, _ in src.entries], dtype=np.int64)
    val = np.asarray([a for _, a in src.entries], dtype=np.complex128)
    return idx, val


class PolynomialEvaluator:
    """Vectorized evaluator for a finite Dirichlet polynomial."""

    def __init__(self, indices, values):
        self.indices = np.asarray(indices, dtype=np.float64)
        self.values = np.asarray(values, dtype=np.complex128)
        self._logs = np.log(self.indices)

    def __call__(self, s):
        arr = np.atleast_1d(np.asarray(s, dtype=np.complex128))
        # Overflow to inf is fine here; callers guard non-finite values.
        with np.errstate(over="ignore", invalid="ignore"):
            terms = self.values[:, None] * np.exp(
                -self._logs[:, None] * arr[None, :]
            )
            out = terms.sum(axis=0)
        if np.isscalar(s) or np.asarray(s).ndim == 0:
            return complex(out[0])
        return out


class TruncatedEvaluator:
    """Evaluator that sums the first N coefficients of a series."""

    def __init__(self, spec: SeriesSpec, N: int):
        if N < 1:
            raise PreconditionError("truncation length must be >= 1")
        self.N = int(N)
        self.coeffs = spec.coeffs.dense(self.N)
        self._logs = np.log(np.arange(1, self.N + 1, dtype=np.float64))

    def __call__(self, s):
        arr = np.atleast_1d(np.asarray(s, dtype=np.complex128))
        out = np.zeros(arr.shape, dtype=np.complex128)
        blk = max(1, _OUTER_BLOCK // max(1, arr.size))
        lo = 0
        with np.errstate(over="ignore", invalid="ignore"):
            while lo < self.N:
                hi = min(self.N, lo + blk)
                block = self.coeffs[lo + 1 : hi + 1, None] * np.exp(
                    -self._logs[lo:hi, None] * arr[None, :]
                )
                out += block.sum(axis=0)
                lo = hi
        if np.isscalar(s) or np.asarray(s).ndim == 0:
            return complex(out[0])
        return out


def default_evaluator(spec: SeriesSpec, N: int = 100_000):
    """An s -> f(s) callable for the series, vectorized over arrays.

    The builtin zeta series gets the summation-formula evaluator; finite
    explicit series are evaluated exactly; everything else is truncated at N.
    """
    if spec.label == "zeta" and spec.has_pole_at_one:
        return zeta_values
    if isinstance(spec.coeffs, ExplicitSource):
        idx, val = _explicit_support(spec.coeffs)
        if idx.size == 0:
            return lambda s: np.zeros(np.atleast_1d(s).shape, dtype=np.complex128)
        return PolynomialEvaluator(idx, val)
    return TruncatedEvaluator(spec, N)


def eval_array(evaluator, s: np.ndarray) -> np.ndarray:
    """Vectorized evaluation with scalar fallback; failures name the point."""
    s = np.asarray(s, dtype=np.complex128)
    try:
        out = np.asarray(evaluator(s), dtype=np.complex128)
        if out.shape == s.shape:
            return out
    except (PreconditionError, NumericalError):
        raise
    except Exception as exc:
        _raise_at_offender(evaluator, s, exc)
    # Shape mismatch: fall back to scalar calls.
    vals = np.empty(s.shape, dtype=np.complex128)
    for i, z in enumerate(s):
        try:
            vals[i] = complex(np.asarray(evaluator(z)).ravel()[0])
        except Exception as exc:
            raise NumericalError(
                "evaluator failed at t = %r: %s" % (float(z.imag), exc)
            ) from exc
    return vals


def _raise_at_offender(evaluator, s: np.ndarray, exc: Exception):
    for z in s:
        try:
            evaluator(np.asarray([z], dtype=np.complex128))
        except Exception:
            raise NumericalError(
                "evaluator failed at t = %r: %s" % (float(z.imag), exc)
            ) from exc
    raise NumericalError("evaluator failed: %s" % exc) from exc


# ---------------------------------------------------------------------------
# Squared-coefficient norms


def tail_norm(spec: SeriesSpec, sigma: float, N: int):
    """(partial, bound): sum of |a_n|^2 n^{-2 sigma} to N plus a certified
    bound on the rest.

    Explicit series get the exact finite remainder.  Unit-bounded sources use
    the integral comparison N^{1-2s}/(2s-1); other multiplicative sources get
    a shifted-exponent bound through their Euler factors.
    """
    if N < 1:
        raise PreconditionError("tail_norm requires N >= 1")
    src = spec.coeffs
    if isinstance(src, ExplicitSource):
        idx, val = _explicit_support(src)
        sq = np.abs(val) ** 2 * np.asarray(idx, dtype=np.float64) ** (-2.0 * sigma)
        partial = neumaier_sum(sq[idx <= N])
        rest = neumaier_sum(sq[idx > N])
        return partial, rest
    if 2.0 * sigma <= 1.0:
        raise PreconditionError(
            "tail norm diverges: need 2 sigma > 1 for this source"
        )
    a = src.dense(int(N))
    blocks = []
    n0 = 1
    while n0 <= N:
        n1 = min(N, n0 + _SUM_BLOCK - 1)
        ns = np.arange(n0, n1 + 1, dtype=np.float64)
        blocks.append(
            float(np.sum(np.abs(a[n0 : n1 + 1]) ** 2 * ns ** (-2.0 * sigma)))
        )
        n0 = n1 + 1
    partial = neumaier_sum(blocks)
    if src.unit_bounded:
        bound = N ** (1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0)
        return partial, bound
    bound = _rankin_square_tail(src, sigma, N)
    return partial, bound


def _rankin_square_tail(src, sigma: float, N: int) -> float:
    """Bound on sum_{n>N} |a_n|^2 n^{-2 sigma} via a shifted exponent.

    Uses sum_{n>N} g(n) n^{-2s} <= N^{beta-2s} sum_n g(n) n^{-beta} with
    1 < beta < 2s, the latter bounded through Euler factors: exact local sums
    for p <= P and a geometric envelope g(p^e) <= G^e beyond.
    """
    G = max(1.0, float(src.square_growth_base))
    best = math.inf
    lo, hi = 1.0, 2.0 * sigma
    for frac in (0.25, 0.4, 0.5, 0.6, 0.75):
        beta = lo + frac * (hi - lo)
        P = max(100, int(math.ceil((2.0 * G) ** (1.0 / beta))))
        log_prod = 0.0
        try:
            for p in primes_up_to(P):
                log_prod += math.log(_local_square_sum(src, int(p), beta))
        except NumericalError:
            continue
        # Primes beyond P: each factor <= 1 + 2 G p^{-beta}, log-summed
        # against the integral envelope (valid once G P^{-beta} <= 1/2).
        log_prod += 2.0 * G * P ** (1.0 - beta) / (beta - 1.0)
        cand = math.exp((beta - 2.0 * sigma) * math.log(N) + log_prod)
        best = min(best, cand)
    if not math.isfinite(best):
        raise NumericalError("divergence detected in tail norm")
    return best


def _local_square_sum(src, p: int, beta: float) -> float:
    """sum_e |a_{p^e}|^2 p^{-beta e}, with a divergence guard."""
    x = float(p) ** (-beta)
    total = 1.0
    term_prev = 1.0
    grow = 0
    for e in range(1, _LOCAL_SUM_CAP + 1):
        term = abs(src.prime_power(p, e)) ** 2 * x**e
        total += term
        if term > term_prev:
            grow += 1
            if grow >= 8:
                raise NumericalError("divergence detected in tail norm")
        else:
            grow = 0
        if term < 1e-18 * total:
            return total
        term_prev = term
    raise NumericalError("divergence detected in tail norm")


# ---------------------------------------------------------------------------
# Smooth truncations and torus twists


def _smooth_coefficients(spec: SeriesSpec, sm: SmoothSet) -> np.ndarray:
    """a_n for every member of the smooth set, via per-prime tables."""
    src = spec.coeffs
    if isinstance(src, ExplicitSource):
        out = np.zeros(len(sm), dtype=np.complex128)
        idx, val = _explicit_support(src)
        pos = np.searchsorted(sm.members, idx)
        for j, n in enumerate(idx):
            k = pos[j]
            if k < len(sm) and sm.members[k] == n:
                out[k] = val[j]
        return out
    out = np.ones(len(sm), dtype=np.complex128)
    for i, p in enumerate(sm.primes):
        col = sm.exponents[:, i].astype(np.int64)
        emax = int(col.max()) if len(col) else 0
        table = np.asarray(
            [src.prime_power(int(p), e) for e in range(emax + 1)],
            dtype=np.complex128,
        )
        out *= table[col]
    return out


def _phase_for(theta, sm: SmoothSet) -> np.ndarray:
    """exp(-2 pi i sum_p alpha_p theta_p) per member, from exponent vectors."""
    coords = np.asarray(theta.coords, dtype=np.float64)
    if coords.size < len(sm.primes):
        missing = int(sm.primes[coords.size])
        raise PreconditionError(
            "theta lacks a coordinate for prime %d" % missing
        )
    dot = np.zeros(len(sm), dtype=np.float64)
    for i in range(len(sm.primes)):
        dot += sm.exponents[:, i].astype(np.float64) * coords[i]
    return np.exp(-2j * math.pi * dot)


def _smooth_sum(spec: SeriesSpec, s: complex, sm: SmoothSet, phase=None) -> complex:
    coeffs = _smooth_coefficients(spec, sm)
    if phase is not None:
        coeffs = coeffs * phase
    logs = np.log(sm.members.astype(np.float64))
    blocks = []
    lo = 0
    while lo < len(sm):
        hi = min(len(sm), lo + _SUM_BLOCK)
        blocks.append(
            complex(np.sum(coeffs[lo:hi] * np.exp(-complex(s) * logs[lo:hi])))
        )
        lo = hi
    return neumaier_sum_complex(blocks)


def _rankin_smooth_tail(spec: SeriesSpec, sigma: float, r: int, M: int, beta=None):
    """Bound on the omitted smooth tail sum_{n in N(r), n > M} |a_n| n^{-sigma}.

    The local factors sum |a_{p^e}| p^{-e beta} over the finitely many primes
    p <= r; the pulled-out power is M^{beta - sigma}.
    """
    src = spec.coeffs
    if beta is None:
        if not math.isfinite(spec.sigma_m):
            beta = sigma - 1.0
        else:
            beta = 0.5 * (sigma + spec.sigma_m)
    if beta >= sigma:
        raise PreconditionError("Rankin exponent must satisfy beta < sigma")
    log_prod = 0.0
    for p in [int(q) for q in primes_up_to(r)]:
        x = float(p) ** (-beta)
        total = 1.0
        term_prev = 1.0
        grow = 0
        for e in range(1, _LOCAL_SUM_CAP + 1):
            term = abs(src.prime_power(p, e)) * x**e
            total += term
            if term > term_prev:
                grow += 1
                if grow >= 8:
                    raise PreconditionError("series not in J at this σ")
            else:
                grow = 0
            if term < 1e-18 * total:
                break
            term_prev = term
        else:
            raise PreconditionError("series not in J at this σ")
        log_prod += math.log(total)
    return math.exp((beta - sigma) * math.log(M) + log_prod)


def _euler_product(spec: SeriesSpec, s: complex, r: int) -> complex:
    """prod over p <= r of sum_e a_{p^e} p^{-e s} (the full local series)."""
    src = spec.coeffs
    out = 1.0 + 0j
    for p in [int(q) for q in primes_up_to(r)]:
        x = float(p) ** (-complex(s))
        factor = 1.0 + 0j
        term = 1.0 + 0j
        prev = 1.0
        grow = 0
        for e in range(1, _LOCAL_SUM_CAP + 1):
            term = src.prime_power(p, e) * x**e
            factor += term
            mag = abs(term)
            if mag > prev:
                grow += 1
                if grow >= 8:
                    raise NumericalError("Euler factor diverges at p = %d" % p)
            else:
                grow = 0
            if mag < 1e-18 * max(abs(factor), 1e-300):
                break
            prev = mag
        else:
            raise NumericalError("Euler factor diverges at p = %d" % p)
        out *= factor
    return out


def smooth_truncation_eval(spec: SeriesSpec, s: complex, k: int, M=None):
    """(value, tail_bound) for the series restricted to 2^k-smooth indices.

    With a finite cutoff M the value is the exact sum over members <= M and
    the bound covers the omitted smooth tail (Rankin for multiplicative
    sources, the exact remainder for explicit ones).  With M = None a
    multiplicative series is evaluated as the finite Euler product over
    p <= 2^k, which carries no truncation tail at all.

    Raises:
        PreconditionError: Re s <= sigma_m, or a divergent local factor
            ("series not in J at this σ").
    """
    if k < 1:
        raise PreconditionError("smooth truncation requires k >= 1")
    if k > 24:
        raise PreconditionError("smooth truncation capped at k <= 24")
    s = complex(s)
    if s.real <= spec.sigma_m:
        raise PreconditionError("Re s must exceed sigma_m")
    r = 2**k
    src = spec.coeffs
    if M is None:
        if isinstance(src, ExplicitSource):
            idx, val = _explicit_support(src)
            total = 0j
            for n, a in zip(idx, val):
                if _is_smooth(int(n), r):
                    total += a * float(n) ** (-s)
            return total, 0.0
        return _euler_product(spec, s, r), 0.0
    M = int(M)
    if M < 1:
        raise PreconditionError("cutoff M must be >= 1")
    sm = smooth_enumerate(r, M)
    value = _smooth_sum(spec, s, sm)
    if isinstance(src, ExplicitSource):
        idx, val = _explicit_support(src)
        rest = 0.0
        for n, a in zip(idx, val):
            if n > M and _is_smooth(int(n), r):
                rest += abs(a) * float(n) ** (-s.real)
        return value, rest
    return value, _rankin_smooth_tail(spec, s.real, r, M)


def _is_smooth(n: int, r: int) -> bool:
    m = n
    for p in [int(q) for q in primes_up_to(r)]:
        while m % p == 0:
            m //= p
    return m == 1


def twisted_eval(spec: SeriesSpec, theta, s: complex, k: int, M: int) -> complex:
    """Smooth truncation with each term twisted by the torus phase
    exp(-2 pi i sum alpha_p theta_p) where n factors as prod p^{alpha_p}.

    theta must carry a coordinate for every prime <= 2^k, ordered by prime.
    """
    if k < 1:
        raise PreconditionError("twisted evaluation requires k >= 1")
    s = complex(s)
    if s.real <= spec.sigma_m:
        raise PreconditionError("Re s must exceed sigma_m")
    if M is None or int(M) < 1:
        raise PreconditionError("twisted evaluation needs a finite cutoff M")
    sm = smooth_enumerate(2**k, int(M))
    phase = _phase_for(theta, sm)
    return _smooth_sum(spec, s, sm, phase=phase)
