"""Argument-principle zero machinery: winding counts, rectangle scans with
Newton refinement, density tables, recurrence experiments, and mollifier
tail decay.
"""

import math
from dataclasses import dataclass

import numpy as np

from .convolution import mollifier_coefficients
from .errors import NumericalError, PreconditionError
from .moments import _disc_lattice
from .parallel import map_chunks, neumaier_sum
from .series import eval_array

__all__ = [
    "Rectangle",
    "RecurrenceReport",
    "ZeroRecord",
    "density_table",
    "mollifier_tail_decay",
    "recurrence_scan",
    "rouche_verify",
    "winding_count",
    "winding_on_circle",
    "zero_scan",
]

_REFINE_ROUNDS = 48
_MAX_BOUNDARY_POINTS = 6_000_000

# Recurrence t-grids are processed in fixed windows of this many grid points.
_T_CHUNK = 2000

# Boundary samples used when recomputing circle minima.
_RING_SAMPLES = 4096


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned region sigma_lo <= Re s <= sigma_hi, t_lo <= Im s <= t_hi."""

    sigma_lo: float
    sigma_hi: float
    t_lo: float
    t_hi: float

    def __post_init__(self):
        if not (self.sigma_lo < self.sigma_hi and self.t_lo < self.t_hi):
            raise PreconditionError("rectangle requires sigma_lo < sigma_hi, t_lo < t_hi")

    def expanded(self, margin: float) -> "Rectangle":
        return Rectangle(
            self.sigma_lo - margin,
            self.sigma_hi + margin,
            self.t_lo - margin,
            self.t_hi + margin,
        )


@dataclass(frozen=True)
class ZeroRecord:
    location: complex
    winding_confirmed: bool
    refinement_residual: float


@dataclass(frozen=True)
class RecurrenceReport:
    """Recurrence-scan outcome: times t_j where the disc integral of
    |f(s+it) - f(s)| drops under the acceptance threshold."""

    s0: complex
    r: float
    m0: float
    T: float
    t_step: float
    threshold: float
    hits: tuple  # t_j values, pairwise separated by >= 1
    hit_integrals: tuple
    lower_bound_rate: float


# ---------------------------------------------------------------------------
# Winding engine


def _polyline_winding(f, pts: np.ndarray) -> int:
    """Winding number of f along a closed polyline (pts[-1] == pts[0]).

    Segments are bisected until every step has a phase jump under pi/2 and a
    magnitude change under a tenth of the local |f|, which rules out phase
    aliasing across near-zero passes.
    """
    vals = eval_array(f, pts)
    for _ in range(_REFINE_ROUNDS):
        if not np.all(np.isfinite(vals)):
            raise NumericalError("evaluator returned a non-finite boundary value")
        mags = np.abs(vals)
        scale = float(mags.max())
        if scale == 0.0 or float(mags.min()) <= 1e-12 * scale:
            raise NumericalError("zero near boundary; perturb rectangle")
        dphi = np.angle(vals[1:] / vals[:-1])
        mag_jump = np.abs(vals[1:] - vals[:-1]) > 0.1 * np.minimum(
            mags[1:], mags[:-1]
        )
        need = (np.abs(dphi) >= 0.5 * math.pi) | mag_jump
        idx = np.flatnonzero(need)
        if idx.size == 0:
            total = float(np.sum(dphi)) / (2.0 * math.pi)
            nearest = round(total)
            if abs(total - nearest) > 0.25:
                raise NumericalError("winding number failed to stabilize")
            return int(nearest)
        if pts.size + idx.size > _MAX_BOUNDARY_POINTS:
            raise NumericalError("zero near boundary; perturb rectangle")
        mids = 0.5 * (pts[idx] + pts[idx + 1])
        vals = np.insert(vals, idx + 1, eval_array(f, mids))
        pts = np.insert(pts, idx + 1, mids)
    raise NumericalError("zero near boundary; perturb rectangle")


def _edge_points(z0: complex, z1: complex, step: float) -> np.ndarray:
    n = max(2, int(math.ceil(abs(z1 - z0) / step)) + 1)
    return np.linspace(z0, z1, n)[:-1]


def _rect_boundary(rect: Rectangle, step: float) -> np.ndarray:
    c1 = complex(rect.sigma_lo, rect.t_lo)
    c2 = complex(rect.sigma_hi, rect.t_lo)
    c3 = complex(rect.sigma_hi, rect.t_hi)
    c4 = complex(rect.sigma_lo, rect.t_hi)
    parts = [
        _edge_points(c1, c2, step),
        _edge_points(c2, c3, step),
        _edge_points(c3, c4, step),
        _edge_points(c4, c1, step),
        np.asarray([c1]),
    ]
    return np.concatenate(parts)


def winding_count(f, rect: Rectangle, boundary_step: float = 0.01) -> int:
    """Zeros minus poles of f inside the rectangle, by boundary phase change.

    Raises:
        NumericalError: boundary passes too close to a zero ("zero near
            boundary; perturb rectangle") or the phase does not stabilize.
    """
    if boundary_step <= 0:
        raise PreconditionError("boundary step must be positive")
    return _polyline_winding(f, _rect_boundary(rect, boundary_step))


def winding_on_circle(f, center: complex, radius: float, samples: int = 256) -> int:
    """Winding of f along the inscribed polygon of a circle."""
    if radius <= 0:
        raise PreconditionError("circle radius must be positive")
    ang = np.linspace(0.0, 2.0 * math.pi, max(16, samples) + 1)
    pts = center + radius * np.exp(1j * ang)
    pts[-1] = pts[0]
    return _polyline_winding(f, pts)


# ---------------------------------------------------------------------------
# Zero scanning


def _eval_scalar(f, z: complex) -> complex:
    return complex(eval_array(f, np.asarray([z], dtype=np.complex128))[0])


def _newton_refine(f, z0: complex, tol: float, max_iter: int = 50, h: float = 1e-6):
    z = complex(z0)
    try:
        fz = _eval_scalar(f, z)
        for _ in range(max_iter):
            if abs(fz) <= tol:
                return z, abs(fz), True
            df = (_eval_scalar(f, z + h) - _eval_scalar(f, z - h)) / (2.0 * h)
            if df == 0 or not np.isfinite(df):
                return z, abs(fz), False
            z = z - fz / df
            if not np.isfinite(z):
                return z0, abs(_eval_scalar(f, z0)), False
            fz = _eval_scalar(f, z)
    except (PreconditionError, NumericalError):
        # An iterate escaped the evaluator's domain: not converged.
        return complex(z0), math.inf, False
    return z, abs(fz), abs(fz) <= tol


def _confirm_circle(f, z: complex, radius: float = 1e-3) -> int:
    try:
        return winding_on_circle(f, z, radius, samples=128)
    except NumericalError:
        return 0


def zero_scan(f, rect: Rectangle, tol: float = 1e-10, boundary_step: float = 0.01):
    """All zeros of f in the rectangle as ZeroRecord entries.

    Subdivides until each cell holds winding one, then refines by Newton
    iteration from the cell center and re-verifies each zero on a small
    circle.  A boundary that passes through a zero is pushed outward in 1e-3
    steps (up to three times), which can only adopt zeros sitting on the
    original edge, never lose interior ones.  Cells whose refinement fails
    are returned with winding_confirmed False rather than dropped.
    """
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")
    cur = rect
    last_exc = None
    w = None
    for attempt in range(4):
        try:
            w = winding_count(f, cur, boundary_step)
            break
        except NumericalError as exc:
            last_exc = exc
            cur = cur.expanded(1e-3)
    if w is None:
        raise last_exc
    if w < 0:
        raise NumericalError("negative winding; the region contains poles")
    records = _scan_cell(f, cur, w, tol, boundary_step)
    records.sort(key=lambda rec: (rec.location.imag, rec.location.real))
    return records


def _cell_contains(cell: Rectangle, z: complex, margin: float) -> bool:
    return (
        cell.sigma_lo - margin <= z.real <= cell.sigma_hi + margin
        and cell.t_lo - margin <= z.imag <= cell.t_hi + margin
    )


def _scan_cell(f, cell: Rectangle, w: int, tol: float, step: float):
    if w == 0:
        return []
    width = cell.sigma_hi - cell.sigma_lo
    height = cell.t_hi - cell.t_lo
    tiny = max(width, height) < 1e-6
    if w == 1 or tiny:
        center = complex(
            0.5 * (cell.sigma_lo + cell.sigma_hi), 0.5 * (cell.t_lo + cell.t_hi)
        )
        z, residual, ok = _newton_refine(f, center, tol)
        margin = 0.1 * max(width, height)
        if ok and _cell_contains(cell, z, margin):
            confirmed = _confirm_circle(f, z) >= 1 and residual <= 1e-8
            rec = ZeroRecord(
                location=z, winding_confirmed=confirmed, refinement_residual=residual
            )
            return [rec] * w
        if tiny:
            return [
                ZeroRecord(
                    location=z, winding_confirmed=False, refinement_residual=residual
                )
            ] * w
    # Split the longer axis; nudge the cut if it lands on a zero.
    vertical = height >= width
    base = 0.5 * (cell.t_lo + cell.t_hi) if vertical else 0.5 * (
        cell.sigma_lo + cell.sigma_hi
    )
    last_exc = None
    for shift in (0.0, 1e-3, -1e-3, 2e-3):
        cut = base + shift
        if vertical:
            if not cell.t_lo < cut < cell.t_hi:
                continue
            first = Rectangle(cell.sigma_lo, cell.sigma_hi, cell.t_lo, cut)
            second = Rectangle(cell.sigma_lo, cell.sigma_hi, cut, cell.t_hi)
        else:
            if not cell.sigma_lo < cut < cell.sigma_hi:
                continue
            first = Rectangle(cell.sigma_lo, cut, cell.t_lo, cell.t_hi)
            second = Rectangle(cut, cell.sigma_hi, cell.t_lo, cell.t_hi)
        try:
            w1 = winding_count(f, first, step)
            w2 = winding_count(f, second, step)
        except NumericalError as exc:
            last_exc = exc
            continue
        if w1 + w2 != w:
            last_exc = NumericalError(
                "winding split %d + %d does not match parent %d" % (w1, w2, w)
            )
            continue
        return _scan_cell(f, first, w1, tol, step) + _scan_cell(
            f, second, w2, tol, step
        )
    raise last_exc if last_exc is not None else NumericalError(
        "could not place a zero-free cut"
    )


def density_table(
    f,
    sigma_list,
    T: float,
    sigma_hi: float = 1.2,
    boundary_step: float = 0.01,
    exclude_origin: bool = False,
):
    """Rows (sigma, T, count) of zeros with Re s > sigma and 0 <= Im s <= T.

    The window starts a hair below t = 0 so ladder zeros on the real axis are
    counted; evaluators with a pole at s = 1 set exclude_origin to start just
    above it instead.  On a boundary failure the sigma edges are shifted by
    1e-3 steps, up to three retries.
    """
    if T <= 0:
        raise PreconditionError("density horizon T must be positive")
    t_lo = 1e-3 if exclude_origin else -1e-3
    rows = []
    for sigma in sigma_list:
        sigma = float(sigma)
        if sigma >= sigma_hi:
            raise PreconditionError("sigma must be below sigma_hi")
        last_exc = None
        count = None
        for delta in (0.0, 1e-3, -1e-3, 2e-3):
            rect = Rectangle(sigma + delta, sigma_hi + delta, t_lo, float(T))
            try:
                count = winding_count(f, rect, boundary_step)
                break
            except NumericalError as exc:
                last_exc = exc
        if count is None:
            raise last_exc
        rows.append((sigma, float(T), int(count)))
    return rows


# ---------------------------------------------------------------------------
# Recurrence experiment


def recurrence_scan(
    f,
    s0: complex,
    r: float,
    T: float,
    t_step: float,
    grid: int = 64,
    threads=None,
) -> RecurrenceReport:
    """Scan t in [-T, T] for near-recurrences of f around a seed zero.

    A time t qualifies when the disc integral of |f(s+it) - f(s)| over
    |s - s0| <= r is at most 0.2 pi r^2 m0, with m0 the sampled minimum of
    |f| on the disc boundary.  Within each unit t-interval only the smallest
    integral is kept, and hits are thinned to pairwise separation >= 1.
    Times with |t| < 1 are excluded as trivial self-recurrences.
    """
    if r <= 0 or T <= 0 or t_step <= 0:
        raise PreconditionError("recurrence scan needs positive r, T, t_step")
    s0 = complex(s0)
    seed_mag = abs(_eval_scalar(f, s0))
    if seed_mag > 1e-8:
        raise PreconditionError(
            "seed is not a zero: |f(s0)| = %.3e exceeds 1e-8" % seed_mag
        )
    isolation = winding_on_circle(f, s0, 1.5 * r, samples=1024)
    if isolation != 1:
        raise PreconditionError(
            "seed disc is not isolating: winding %d on |s - s0| = 3r/2" % isolation
        )
    ang = np.arange(_RING_SAMPLES, dtype=np.float64) * (2.0 * math.pi / _RING_SAMPLES)
    ring = s0 + r * np.exp(1j * ang)
    ring_mags = np.abs(eval_array(f, ring))
    m0 = float(ring_mags.min())
    if m0 <= 1e-12 * float(ring_mags.max()):
        raise PreconditionError("m0 vanishes on the seed circle")
    threshold = 0.2 * math.pi * r * r * m0

    offsets, cell_area = _disc_lattice(r, grid)
    base = eval_array(f, s0 + offsets)
    n_steps = int(round(T / t_step))
    idx = np.arange(-n_steps, n_steps + 1, dtype=np.int64)
    ts = idx.astype(np.float64) * t_step
    ts = ts[np.abs(ts) >= 1.0]  # drop the trivial self-recurrence window
    spans = [
        (lo, min(lo + _T_CHUNK, ts.size)) for lo in range(0, ts.size, _T_CHUNK)
    ]

    def work(span):
        lo, hi = span
        tt = ts[lo:hi]
        pts = (s0 + offsets)[None, :] + 1j * tt[:, None]
        vals = eval_array(f, pts.ravel()).reshape(tt.size, offsets.size)
        return np.abs(vals - base[None, :]).sum(axis=1) * cell_area

    integrals = np.concatenate(map_chunks(work, spans, threads=threads))

    hit_mask = integrals <= threshold
    selected = {}
    for t, integral in zip(
        (float(x) for x in ts[hit_mask]), (float(x) for x in integrals[hit_mask])
    ):
        cell = math.floor(t)
        held = selected.get(cell)
        if held is None or (integral, t) < held:
            selected[cell] = (integral, t)
    ordered = sorted((t, integral) for integral, t in selected.values())
    thinned = []
    for t, integral in ordered:
        if thinned and t - thinned[-1][0] < 1.0:
            if integral < thinned[-1][1]:
                thinned[-1] = (t, integral)
        else:
            thinned.append((t, integral))
    return RecurrenceReport(
        s0=s0,
        r=float(r),
        m0=m0,
        T=float(T),
        t_step=float(t_step),
        threshold=threshold,
        hits=tuple(t for t, _ in thinned),
        hit_integrals=tuple(i for _, i in thinned),
        lower_bound_rate=len(thinned) / (2.0 * float(T)),
    )


def rouche_verify(
    f, s0: complex, t_j: float, r: float, m0: float, boundary_step: float = None
) -> bool:
    """True when the shifted function stays within 0.8 m0 of f on the seed
    circle AND the shifted disc demonstrably contains a zero.

    m0 is recomputed from the boundary; the passed value is advisory only.
    """
    if r <= 0:
        raise PreconditionError("disc radius must be positive")
    s0 = complex(s0)
    if boundary_step is None:
        samples = _RING_SAMPLES
    else:
        samples = max(256, int(math.ceil(2.0 * math.pi * r / boundary_step)))
    ang = np.arange(samples, dtype=np.float64) * (2.0 * math.pi / samples)
    ring = s0 + r * np.exp(1j * ang)
    f_ring = eval_array(f, ring)
    m0_measured = float(np.abs(f_ring).min())
    diff = float(np.abs(eval_array(f, ring + 1j * float(t_j)) - f_ring).max())
    if not diff <= 0.8 * m0_measured:
        return False
    try:
        inner = winding_on_circle(f, s0 + 1j * float(t_j), r, samples=1024)
    except NumericalError:
        return False
    return inner >= 1


# ---------------------------------------------------------------------------
# Mollifier tail decay


def mollifier_tail_decay(a, b, sigma: float, X_list, N: int):
    """For each X: the squared-coefficient tail of the mollified series,
    sum over X < n <= N of |d_n|^2 n^{-2 sigma}.

    The cut beyond N is covered by a geometric octave model: the last octave
    (N/2, N] is extrapolated by the ratio q = 2^{1-2 sigma}, which tracks the
    n^{-2 sigma} falloff of the summand.

    Raises:
        NumericalError: the extrapolated remainder exceeds 10% of the partial
            value ("increase N").
    """
    if sigma <= 0.5:
        raise PreconditionError("need sigma > 1/2 for the remainder model")
    if int(N) < 2:
        raise PreconditionError("need N >= 2")
    N = int(N)
    q = 2.0 ** (1.0 - 2.0 * sigma)
    out = []
    for X in X_list:
        X = int(X)
        if X >= N:
            out.append((X, 0.0))
            continue
        d = mollifier_coefficients(a, b, X, N)
        ns = np.arange(X + 1, N + 1, dtype=np.float64)
        sq = np.abs(d[X + 1 :]) ** 2 * ns ** (-2.0 * sigma)
        tail = float(neumaier_sum(sq))
        octave_start = max(X, N // 2)
        octave = float(neumaier_sum(sq[octave_start - X :]))
        remainder = octave * q / (1.0 - q)
        if remainder > 0.1 * tail:
            raise NumericalError("increase N")
        out.append((X, tail))
    return out
