"""Coefficient sources for Dirichlet series and the builtin catalogue.

A source answers two questions: the coefficient a_n for a single index, and a
dense 1-based array of coefficients up to N.  Multiplicative sources are
defined by their prime-power rule a_{p^e} and evaluated through factorization;
explicit sources carry a finite table.  Coefficient files use a small JSON
schema (see load_source).
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .primes import factorize, primes_up_to

__all__ = [
    "CoefficientSource",
    "ExplicitSource",
    "MultiplicativeSource",
    "SeriesSpec",
    "builtin_series",
    "load_source",
    "series_descriptor",
]


class CoefficientSource:
    """Interface shared by all coefficient sources."""

    multiplicative = False
    # Upper bound G with |a_{p^e}|^2 <= G^e, used by tail estimates.
    square_growth_base = 1.0
    # True when |a_n| <= 1 for all n (tightest tail bounds apply).
    unit_bounded = True

    def value(self, n: int) -> complex:
        raise NotImplementedError

    def dense(self, limit: int) -> np.ndarray:
        """Coefficients a_1..a_limit as a complex array indexed 1..limit.

        Index 0 is present and zero so that arr[n] is a_n.
        """
        raise NotImplementedError

    def prime_power(self, p: int, e: int) -> complex:
        raise PreconditionError("source is not multiplicative")


@dataclass(frozen=True)
class ExplicitSource(CoefficientSource):
    """Finite coefficient table; unlisted indices are zero."""

    entries: tuple  # ((n, complex), ...) with n ascending and unique

    def __post_init__(self):
        seen = set()
        for n, _ in self.entries:
            if n < 1:
                raise PreconditionError("explicit indices start at n = 1")
            if n in seen:
                raise PreconditionError("duplicate explicit index %d" % n)
            seen.add(n)

    @staticmethod
    def from_pairs(pairs) -> "ExplicitSource":
        items = sorted(((int(n), complex(a)) for n, a in pairs), key=lambda e: e[0])
        return ExplicitSource(entries=tuple(items))

    def value(self, n: int) -> complex:
        for m, a in self.entries:
            if m == n:
                return a
        return 0j

    def dense(self, limit: int) -> np.ndarray:
        arr = np.zeros(limit + 1, dtype=np.complex128)
        for n, a in self.entries:
            if n <= limit:
                arr[n] = a
        return arr

    def support(self) -> np.ndarray:
        return np.asarray([n for n, _ in self.entries], dtype=np.int64)

    def max_index(self) -> int:
        return max((n for n, _ in self.entries), default=1)


@dataclass(frozen=True)
class MultiplicativeSource(CoefficientSource):
    """Source defined by a prime-power rule a_{p^e}, with a_1 = 1."""

    rule: object  # callable (p, e) -> complex
    square_growth_base: float = 1.0
    unit_bounded: bool = True
    multiplicative: bool = field(default=True, init=False)

    def prime_power(self, p: int, e: int) -> complex:
        if e == 0:
            return 1.0 + 0j
        return complex(self.rule(p, e))

    def value(self, n: int) -> complex:
        if n == 1:
            return 1.0 + 0j
        out = 1.0 + 0j
        for p, e in factorize(n):
            out *= self.prime_power(p, e)
            if out == 0:
                return 0j
        return out

    def dense(self, limit: int) -> np.ndarray:
        # Smallest-prime-factor decomposition; one pass, no per-n factorize.
        arr = np.zeros(limit + 1, dtype=np.complex128)
        if limit >= 1:
            arr[1] = 1.0
        spf = _smallest_prime_factor(limit)
        for n in range(2, limit + 1):
            p = int(spf[n])
            m = n
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            arr[n] = arr[m] * self.prime_power(p, e)
        return arr


def _smallest_prime_factor(limit: int) -> np.ndarray:
    spf = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, int(math.isqrt(limit)) + 1):
        if spf[p] == p:
            sl = spf[p * p :: p]
            sl[sl == np.arange(p * p, limit + 1, p)] = p
    return spf


@dataclass(frozen=True)
class SeriesSpec:
    """A Dirichlet series: coefficients plus its convergence abscissas.

    sigma_m bounds the half plane where the squared-coefficient sums
    converge; sigma_a is the abscissa of absolute convergence.
    """

    coeffs: CoefficientSource
    sigma_m: float
    sigma_a: float
    label: str = "series"
    has_pole_at_one: bool = False

    def __post_init__(self):
        if self.sigma_m > self.sigma_a:
            raise PreconditionError("sigma_m must not exceed sigma_a")


def coefficient(spec: SeriesSpec, n: int) -> complex:
    """The coefficient a_n of the series."""
    if n < 1:
        raise PreconditionError("coefficient index must be >= 1")
    return spec.coeffs.value(int(n))


# ---------------------------------------------------------------------------
# Builtin catalogue


def _moebius_dense(limit: int) -> np.ndarray:
    mu = np.ones(limit + 1, dtype=np.float64)
    mu[0] = 0.0
    for p in primes_up_to(limit):
        p = int(p)
        mu[p::p] *= -1.0
        if p * p <= limit:
            mu[p * p :: p * p] = 0.0
    return mu.astype(np.complex128)


class _ZetaSource(MultiplicativeSource):
    def dense(self, limit: int) -> np.ndarray:
        arr = np.ones(limit + 1, dtype=np.complex128)
        arr[0] = 0.0
        return arr


class _MoebiusSource(MultiplicativeSource):
    def dense(self, limit: int) -> np.ndarray:
        return _moebius_dense(limit)


def _primitive_root(p: int) -> int:
    if p == 2:
        return 1
    phi = p - 1
    fac = [f for f, _ in factorize(phi)]
    for g in range(2, p):
        if all(pow(g, phi // f, p) != 1 for f in fac):
            return g
    raise PreconditionError("no primitive root found")  # unreachable for prime p


def _character_table(modulus: int, index: int) -> np.ndarray:
    """Values chi(0..modulus-1) for the index-th character mod `modulus`.

    Characters are enumerated by mixed-radix digits over the cyclic
    components of the unit group: odd prime powers are cyclic, 4 is cyclic
    of order 2, and 2^a with a >= 3 splits as {+-1} x <3>.
    """
    if modulus == 1:
        if index != 0:
            raise PreconditionError("character index must lie in [0, 1)")
        return np.ones(1, dtype=np.complex128)
    # Per prime power: (q, residue -> exponent tuple, component orders).
    comps = []
    for p, a in factorize(modulus):
        q = p**a
        if p == 2:
            if a == 1:
                comps.append((q, {1: ()}, ()))
            elif a == 2:
                comps.append((q, {1: (0,), 3: (1,)}, (2,)))
            else:
                emap = {}
                half = q // 4
                for s in range(2):
                    for k in range(half):
                        r = pow(3, k, q)
                        if s:
                            r = q - r
                        emap[r] = (s, k)
                comps.append((q, emap, (2, half)))
        else:
            phi_q = q - q // p
            g = _primitive_root(p)
            if a > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            emap = {}
            x = 1
            for k in range(phi_q):
                emap[x] = (k,)
                x = (x * g) % q
            comps.append((q, emap, (phi_q,)))
    orders = [d for _, _, ords in comps for d in ords]
    phi = 1
    for d in orders:
        phi *= d
    if not 0 <= index < phi:
        raise PreconditionError("character index must lie in [0, %d)" % phi)
    # Mixed-radix digits of the index pick one root of unity per component.
    digits = []
    rem = index
    for d in orders:
        digits.append(rem % d)
        rem //= d

    values = np.zeros(modulus, dtype=np.complex128)
    for n in range(modulus):
        if math.gcd(n, modulus) != 1:
            continue
        phase = 0.0
        pos = 0
        for q, emap, ords in comps:
            exps = emap[n % q]
            for exp, order in zip(exps, ords):
                phase += digits[pos] * exp / order
                pos += 1
        values[n] = np.exp(2j * math.pi * phase)
    return values


@dataclass(frozen=True)
class _CharacterSource(CoefficientSource):
    modulus: int
    index: int
    table: tuple

    multiplicative = True
    square_growth_base = 1.0
    unit_bounded = True

    def prime_power(self, p: int, e: int) -> complex:
        return self.value(pow(p, e, self.modulus) if e else 1)

    def value(self, n: int) -> complex:
        return complex(self.table[n % self.modulus])

    def dense(self, limit: int) -> np.ndarray:
        base = np.asarray(self.table, dtype=np.complex128)
        reps = limit // self.modulus + 1
        return np.concatenate(
            [[0.0], np.tile(base, reps)[1 : limit + 1]]
        ).astype(np.complex128)


def _divisor_rule(k: int):
    def rule(p, e):
        return float(math.comb(e + k - 1, k - 1))

    return rule


def builtin_series(name: str) -> SeriesSpec:
    """Builtin series by name.

    Names: zeta, moebius, eta-factor, divisor_<k>, character_<modulus>_<index>.
    The eta-factor series is the two-term polynomial 1 - 2^{1-s}, the standard
    fixture with the closed-form zero ladder at 1 + 2 pi i k / log 2.
    """
    name = name.strip()
    if name == "zeta":
        return SeriesSpec(
            coeffs=_ZetaSource(rule=lambda p, e: 1.0),
            sigma_m=0.5,
            sigma_a=1.0,
            label="zeta",
            has_pole_at_one=True,
        )
    if name == "moebius":
        return SeriesSpec(
            coeffs=_MoebiusSource(rule=lambda p, e: -1.0 if e == 1 else 0.0),
            sigma_m=0.5,
            sigma_a=1.0,
            label="moebius",
        )
    if name == "eta-factor":
        return SeriesSpec(
            coeffs=ExplicitSource.from_pairs([(1, 1.0), (2, -2.0)]),
            sigma_m=float("-inf"),
            sigma_a=float("-inf"),
            label="eta-factor",
        )
    if name.startswith("divisor_"):
        try:
            k = int(name.split("_", 1)[1])
        except ValueError:
            raise PreconditionError("bad divisor order in %r" % name) from None
        if k < 1:
            raise PreconditionError("divisor order must be >= 1")
        return SeriesSpec(
            coeffs=MultiplicativeSource(
                rule=_divisor_rule(k),
                square_growth_base=float(k * k),
                unit_bounded=(k == 1),
            ),
            sigma_m=0.5,
            sigma_a=1.0,
            label=name,
        )
    if name.startswith("character_"):
        parts = name.split("_")
        if len(parts) != 3:
            raise PreconditionError(
                "character name must be character_<modulus>_<index>"
            )
        modulus, index = int(parts[1]), int(parts[2])
        if modulus < 1:
            raise PreconditionError("character modulus must be >= 1")
        table = tuple(_character_table(modulus, index))
        return SeriesSpec(
            coeffs=_CharacterSource(modulus=modulus, index=index, table=table),
            sigma_m=0.5,
            sigma_a=1.0,
            label=name,
        )
    raise PreconditionError("unknown builtin series %r" % name)


# ---------------------------------------------------------------------------
# Coefficient files

_DEFAULT_MULT_ABSCISSAS = (0.5, 1.0)


def load_source(obj) -> SeriesSpec:
    """Build a SeriesSpec from a coefficient file path, JSON text, or dict.

    Schema:
      {"kind": "explicit", "coeffs": [[n, re, im], ...]}
      {"kind": "multiplicative", "prime_powers": [[p, e, re, im], ...]}
      {"kind": "builtin", "name": "zeta"}
    Optional keys "sigma_m", "sigma_a", "label" override the defaults.
    Unlisted explicit indices and unlisted prime powers are zero.
    """
    if isinstance(obj, str):
        try:
            with open(obj, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise PreconditionError("cannot read coefficient file: %s" % exc)
        except json.JSONDecodeError as exc:
            raise PreconditionError("bad coefficient JSON: %s" % exc)
    else:
        data = obj
    if not isinstance(data, dict) or "kind" not in data:
        raise PreconditionError("coefficient JSON must be an object with 'kind'")
    kind = data["kind"]
    label = data.get("label", "file-series")
    if kind == "builtin":
        return builtin_series(data["name"])
    if kind == "explicit":
        pairs = [(int(n), complex(re, im)) for n, re, im in data["coeffs"]]
        src = ExplicitSource.from_pairs(pairs)
        return SeriesSpec(
            coeffs=src,
            sigma_m=float(data.get("sigma_m", float("-inf"))),
            sigma_a=float(data.get("sigma_a", float("-inf"))),
            label=label,
        )
    if kind == "multiplicative":
        table = {}
        for p, e, re, im in data["prime_powers"]:
            p, e = int(p), int(e)
            if e < 1:
                raise PreconditionError("prime powers need exponent >= 1")
            table[(p, e)] = complex(re, im)
        growth = max(
            [abs(v) ** (2.0 / e) for (p, e), v in table.items() if v != 0],
            default=1.0,
        )

        def rule(p, e, _table=table):
            return _table.get((int(p), int(e)), 0j)

        src = MultiplicativeSource(
            rule=rule,
            square_growth_base=max(1.0, growth),
            unit_bounded=all(abs(v) <= 1.0 for v in table.values()),
        )
        sm, sa = _DEFAULT_MULT_ABSCISSAS
        return SeriesSpec(
            coeffs=src,
            sigma_m=float(data.get("sigma_m", sm)),
            sigma_a=float(data.get("sigma_a", sa)),
            label=label,
        )
    raise PreconditionError("unknown coefficient kind %r" % kind)


def series_descriptor(spec: SeriesSpec) -> dict:
    """Replayable description of a series for embedding in output documents."""
    return {
        "label": spec.label,
        "sigma_m": spec.sigma_m if math.isfinite(spec.sigma_m) else None,
        "sigma_a": spec.sigma_a if math.isfinite(spec.sigma_a) else None,
    }
