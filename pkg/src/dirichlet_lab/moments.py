"""Mean values of |f(sigma+it)|^{2k}: quadrature estimates, exact polynomial
means, divisor-sum targets, shell disc distances, and max-modulus scans.
"""

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import ExplicitSource, SeriesSpec
from .convolution import convolution_power
from .errors import NumericalError, PreconditionError
from .parallel import map_chunks, neumaier_sum
from .primes import primes_up_to, smooth_enumerate
from .series import (
    _phase_for,
    _smooth_coefficients,
    default_evaluator,
    eval_array,
    tail_norm,
)
from .zeta import zeta_eval

__all__ = [
    "MomentReport",
    "OrderScanReport",
    "QuadratureConfig",
    "estimate_moment",
    "lindelof_product",
    "lindelof_target",
    "order_scan",
    "polynomial_mean_exact",
    "shell_disc_distance",
    "shell_sum_bound",
    "theoretical_target",
]

# Quadrature nodes are processed in fixed windows of this many grid points;
# the split depends only on the grid, so totals are worker-count independent.
_NODE_CHUNK = 20000

# Elementwise outer products are capped at this many entries.
_OUTER_BLOCK = 4_000_000

# Internal cutoff for shell sums; large enough that members beyond it are
# negligible at the sigma ranges these diagnostics run at.
_SHELL_CUTOFF = 1_000_000


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite-rule parameters; parallel_chunks caps the worker count
    (chunk boundaries themselves are fixed by the grid)."""

    step: float = 0.01
    rule: str = "simpson"
    parallel_chunks: int = 1

    def __post_init__(self):
        if self.step <= 0:
            raise PreconditionError("quadrature step must be positive")
        if self.rule not in ("simpson", "trapezoid"):
            raise PreconditionError("rule must be simpson or trapezoid")
        if int(self.parallel_chunks) < 1:
            raise PreconditionError("parallel_chunks must be >= 1")


@dataclass(frozen=True)
class MomentReport:
    """Result of one mean-value experiment over t in [0, T]."""

    sigma: float
    k: int
    T: float
    step: float
    estimate: float
    target: float = None
    rel_error: float = None
    rule: str = "simpson"
    window: str = "0..T"


@dataclass(frozen=True)
class OrderScanReport:
    """Running maxima of |f| and the fitted log-log growth slope."""

    sigma: float
    points: tuple  # ((T, max |f| for |t| <= T), ...)
    slope: float


def _simpson_weights(idx: np.ndarray, npts: int) -> np.ndarray:
    w = np.where(idx % 2 == 1, 4.0, 2.0)
    w[idx == 0] = 1.0
    w[idx == npts] = 1.0
    return w


def _trapezoid_weights(idx: np.ndarray, npts: int) -> np.ndarray:
    w = np.ones(idx.shape, dtype=np.float64)
    w[idx == 0] = 0.5
    w[idx == npts] = 0.5
    return w


def estimate_moment(
    spec: SeriesSpec,
    sigma: float,
    k: int,
    T: float,
    cfg: QuadratureConfig = None,
    evaluator=None,
    threads=None,
) -> MomentReport:
    """Composite quadrature of |f(sigma+it)|^{2k} over [0, T], divided by T.

    Node chunks evaluate concurrently; chunk partials are combined in fixed
    order with compensated accumulation, so the estimate is bit-identical for
    every worker count.
    """
    if sigma <= spec.sigma_m:
        raise PreconditionError("sigma must exceed sigma_m of the series")
    if T <= 0:
        raise PreconditionError("moment horizon T must be positive")
    if int(k) < 1:
        raise PreconditionError("moment half-power k must be >= 1")
    k = int(k)
    cfg = cfg if cfg is not None else QuadratureConfig()
    if spec.label == "zeta" and cfg.step > 0.05:
        raise PreconditionError("step must be <= 0.05 for zeta integrands")
    if evaluator is None:
        evaluator = default_evaluator(spec)
    npts = int(round(T / cfg.step))
    if npts < 2:
        raise PreconditionError("horizon shorter than two quadrature steps")
    if cfg.rule == "simpson" and npts % 2 == 1:
        npts += 1
    h = T / npts
    weight_fn = (
        _simpson_weights if cfg.rule == "simpson" else _trapezoid_weights
    )
    spans = [
        (lo, min(lo + _NODE_CHUNK, npts + 1))
        for lo in range(0, npts + 1, _NODE_CHUNK)
    ]

    def work(span):
        lo, hi = span
        idx = np.arange(lo, hi, dtype=np.int64)
        s = np.full(hi - lo, sigma, dtype=np.complex128)
        s += 1j * (idx.astype(np.float64) * h)
        vals = eval_array(evaluator, s)
        powers = np.abs(vals) ** (2 * k)
        return float(np.sum(weight_fn(idx, npts) * powers))

    requested = threads if threads is not None else cfg.parallel_chunks
    partials = map_chunks(work, spans, threads=requested)
    total = neumaier_sum(partials)
    integral = total * (h / 3.0 if cfg.rule == "simpson" else h)
    estimate = integral / T
    target = theoretical_target(spec, sigma, k)
    rel = abs(estimate - target) / target if target else None
    return MomentReport(
        sigma=float(sigma),
        k=k,
        T=float(T),
        step=h,
        estimate=estimate,
        target=target,
        rel_error=rel,
        rule=cfg.rule,
    )


def theoretical_target(spec: SeriesSpec, sigma: float, k: int):
    """Known limit of the 2k-th mean, when one exists at desk scale.

    zeta: zeta(2s) for k=1 and zeta(2s)^4/zeta(4s) for k=2.  Finite explicit
    series: the exact polynomial mean of the k-th convolution power.  None
    otherwise.
    """
    if spec.label == "zeta" and spec.has_pole_at_one:
        if abs(2.0 * sigma - 1.0) < 1e-9 or abs(4.0 * sigma - 1.0) < 1e-9:
            return None
        if k == 1:
            return float(zeta_eval(2.0 * sigma).real)
        if k == 2:
            z2 = zeta_eval(2.0 * sigma).real
            z4 = zeta_eval(4.0 * sigma).real
            return float(z2**4 / z4)
        return None
    if isinstance(spec.coeffs, ExplicitSource):
        m = spec.coeffs.max_index()
        if m**k > 2_000_000:
            return None
        dense = spec.coeffs.dense(m)
        powered = convolution_power(dense, k, N=m**k)
        return polynomial_mean_exact(powered, sigma)
    return None


def polynomial_mean_exact(coeffs, sigma: float) -> float:
    """Exact large-T mean of |sum a_n n^{-sigma-it}|^2: sum |a_n|^2 n^{-2 sigma}.

    coeffs is a 1-based dense array (index 0 ignored).
    """
    arr = np.asarray(coeffs, dtype=np.complex128)
    if arr.ndim != 1 or arr.size < 2:
        raise PreconditionError("coefficient arrays are 1-based with length >= 2")
    ns = np.arange(1, arr.size, dtype=np.float64)
    return float(neumaier_sum(np.abs(arr[1:]) ** 2 * ns ** (-2.0 * sigma)))


# ---------------------------------------------------------------------------
# Divisor-sum targets


def _tau_table(k: int, N: int) -> np.ndarray:
    ones = np.ones(N + 1, dtype=np.complex128)
    ones[0] = 0.0
    return convolution_power(ones, k, N=N).real


def lindelof_target(k: int, sigma: float, N: int, guard: float = 0.35) -> float:
    """Partial sum of tau_k(n)^2 n^{-2 sigma} to N, certified by a tail bound.

    Raises:
        PreconditionError: k outside 1..6 or 2 sigma <= 1.
        NumericalError: the tail bound exceeds guard * partial ("increase N").
    """
    if not 1 <= int(k) <= 6:
        raise PreconditionError("divisor order k must be in 1..6")
    if 2.0 * sigma <= 1.0:
        raise PreconditionError("need 2 sigma > 1 for the divisor sum")
    k = int(k)
    if N < 2:
        raise PreconditionError("need N >= 2")
    tau = _tau_table(k, int(N))
    ns = np.arange(1, int(N) + 1, dtype=np.float64)
    partial = float(neumaier_sum(tau[1:] ** 2 * ns ** (-2.0 * sigma)))
    bound = _lindelof_tail_bound(k, sigma, int(N))
    if bound > guard * partial:
        raise NumericalError("increase N")
    return partial


def _lindelof_tail_bound(k: int, sigma: float, N: int) -> float:
    """Upper bound on sum_{n>N} tau_k(n)^2 n^{-2 sigma}, by exponent shifting.

    For each trial beta in (1, 2 sigma): N^{beta-2s} times an upper enclosure
    of sum_n tau_k(n)^2 n^{-beta} (exact Euler factors to P, geometric
    envelope tau_k(p^e)^2 <= (k^2)^e beyond).
    """
    G = float(k * k)
    width = 2.0 * sigma - 1.0
    best = math.inf
    for frac in (0.2, 0.35, 0.5, 0.65, 0.8):
        beta = 1.0 + frac * width
        P = max(1000, int(math.ceil((2.0 * G) ** (1.0 / beta))))
        log_prod = 0.0
        for p in primes_up_to(P):
            x = float(p) ** (-beta)
            total = 1.0
            term = 1.0
            for e in range(1, 400):
                term = float(math.comb(e + k - 1, k - 1)) ** 2 * x**e
                total += term
                if term < 1e-18 * total:
                    break
            log_prod += math.log(total)
        log_prod += 2.0 * G * P ** (1.0 - beta) / (beta - 1.0)
        best = min(best, math.exp((beta - 2.0 * sigma) * math.log(N) + log_prod))
    return best


def lindelof_product(k: int, sigma: float) -> float:
    """The limit value via zeta identities (k = 1, 2 only).

    k=1: zeta(2s).  k=2: zeta(2s)^4 / zeta(4s), the classical divisor-square
    identity.
    """
    if 2.0 * sigma <= 1.0:
        raise PreconditionError("need 2 sigma > 1 for the divisor sum")
    if k == 1:
        return float(zeta_eval(2.0 * sigma).real)
    if k == 2:
        return float(zeta_eval(2.0 * sigma).real ** 4 / zeta_eval(4.0 * sigma).real)
    raise PreconditionError("closed forms available for k = 1, 2 only")


# ---------------------------------------------------------------------------
# Shell disc distances (consecutive smooth truncations on a disc)


def _disc_lattice(r_disc: float, grid: int):
    """Midpoint lattice of the square [-r, r]^2 masked to the disc."""
    cell = 2.0 * r_disc / grid
    centers = -r_disc + (np.arange(grid, dtype=np.float64) + 0.5) * cell
    X, Y = np.meshgrid(centers, centers)
    mask = X**2 + Y**2 <= r_disc**2
    return (X[mask] + 1j * Y[mask]).ravel(), cell * cell


def shell_disc_distance(
    spec: SeriesSpec,
    theta,
    sigma: float,
    k: int,
    r_disc: float,
    grid: int = 64,
    cutoff: int = _SHELL_CUTOFF,
    threads=None,
) -> float:
    """Disc integral of |g_k - g_{k-1}| around sigma, by the midpoint rule.

    g_k is the 2^k-smooth truncation (twisted by theta when given); the
    difference is supported on indices whose largest prime factor lies in
    (2^{k-1}, 2^k].  Indices are cut off at `cutoff` internally.

    Raises:
        PreconditionError: grid < 16 or sigma - r_disc <= sigma_m.
    """
    if grid < 16:
        raise PreconditionError("disc grid must be >= 16")
    if k < 1:
        raise PreconditionError("shell index k must be >= 1")
    if sigma - r_disc <= spec.sigma_m:
        raise PreconditionError("disc must stay right of sigma_m")
    sm = smooth_enumerate(2**k, int(cutoff))
    lpf = (
        (sm.exponents > 0) * sm.primes[None, :].astype(np.int64)
    ).max(axis=1)
    shell = lpf > 2 ** (k - 1)
    if not shell.any():
        return 0.0
    coeffs = _smooth_coefficients(spec, sm)
    if theta is not None:
        coeffs = coeffs * _phase_for(theta, sm)
    coeffs = coeffs[shell]
    logs = np.log(sm.members[shell].astype(np.float64))
    points, cell_area = _disc_lattice(r_disc, grid)
    s_vals = sigma + points

    spans = []
    blk = max(1, _OUTER_BLOCK // max(1, s_vals.size))
    lo = 0
    while lo < logs.size:
        spans.append((lo, min(logs.size, lo + blk)))
        lo += blk

    def work(span):
        a, b = span
        return (
            coeffs[a:b, None] * np.exp(-logs[a:b, None] * s_vals[None, :])
        ).sum(axis=0)

    partial_rows = map_chunks(work, spans, threads=threads)
    total = np.zeros(s_vals.shape, dtype=np.complex128)
    for row in partial_rows:
        total += row
    return float(np.sum(np.abs(total)) * cell_area)


def shell_sum_bound(spec: SeriesSpec, sigma: float, r_disc: float, K: int) -> float:
    """Closed-form cap on the partial sums of shell disc distances.

    pi r^2 (1 + sum_{k<=K} 2^{-(k-1) delta/10})^{1/2} C^{1/2}, where
    delta = (sigma - r_disc) - sigma_m and C bounds the squared-coefficient
    norm a quarter-delta above sigma_m.
    """
    alpha = sigma - r_disc
    delta = alpha - spec.sigma_m
    if delta <= 0:
        raise PreconditionError("disc must stay right of sigma_m")
    value, bound = tail_norm(spec, spec.sigma_m + delta / 4.0, 100_000)
    C = value + bound
    geo = sum(2.0 ** (-(k - 1) * delta / 10.0) for k in range(1, K + 1))
    return math.pi * r_disc**2 * math.sqrt(1.0 + geo) * math.sqrt(C)


# ---------------------------------------------------------------------------
# Max-modulus order scans


def order_scan(
    spec: SeriesSpec,
    sigma: float,
    T_list,
    evaluator=None,
    cfg: QuadratureConfig = None,
    threads=None,
) -> OrderScanReport:
    """Running maxima of |f(sigma+it)| over |t| <= T for each horizon.

    Reports the least-squares slope of log max against log T; the slope is a
    scan observation, never a statement about the true growth order.
    """
    if sigma <= spec.sigma_m:
        raise PreconditionError("sigma must exceed sigma_m of the series")
    horizons = sorted(float(T) for T in T_list)
    if not horizons or horizons[0] <= 0:
        raise PreconditionError("order scan needs positive horizons")
    cfg = cfg if cfg is not None else QuadratureConfig(step=0.05)
    if spec.label == "zeta" and cfg.step > 0.05:
        raise PreconditionError("step must be <= 0.05 for zeta integrands")
    if evaluator is None:
        evaluator = default_evaluator(spec)
    h = cfg.step
    nmax = int(math.ceil(horizons[-1] / h))
    spans = [
        (lo, min(lo + _NODE_CHUNK, nmax + 1))
        for lo in range(0, nmax + 1, _NODE_CHUNK)
    ]

    def work(span):
        lo, hi = span
        ts = np.arange(lo, hi, dtype=np.float64) * h
        # Conjugate halves scanned explicitly; no symmetry assumed.
        mags_pos = np.abs(eval_array(evaluator, sigma + 1j * ts))
        mags_neg = np.abs(eval_array(evaluator, sigma - 1j * ts))
        out = []
        for T in horizons:
            m = ts <= T + 1e-12
            out.append(max(mags_pos[m].max(), mags_neg[m].max()) if m.any() else 0.0)
        return out

    rows = map_chunks(work, spans, threads=threads)
    maxima = [max(row[i] for row in rows) for i in range(len(horizons))]
    xs = np.log(np.asarray(horizons))
    ys = np.log(np.asarray(maxima))
    xbar = xs.mean()
    ybar = ys.mean()
    denom = float(((xs - xbar) ** 2).sum())
    slope = float(((xs - xbar) * (ys - ybar)).sum() / denom) if denom > 0 else 0.0
    return OrderScanReport(
        sigma=float(sigma),
        points=tuple(zip(horizons, (float(m) for m in maxima))),
        slope=slope,
    )
