import math

import numpy as np
import pytest

import dirichlet_lab.primes as primes_mod
from dirichlet_lab import (
    NumericalError,
    PreconditionError,
    factorize,
    first_primes,
    log_frequencies,
    smooth_enumerate,
)
from dirichlet_lab.primes import primes_up_to


def test_primes_up_to_30():
    np.testing.assert_array_equal(
        primes_up_to(30), [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    )


def test_primes_up_to_edge_cases():
    assert primes_up_to(1).size == 0
    np.testing.assert_array_equal(primes_up_to(2), [2])


def test_first_primes_thousandth():
    ps = first_primes(1000)
    assert len(ps) == 1000
    assert ps[-1] == 7919
    assert ps[0] == 2


def test_log_frequencies_values():
    lam = log_frequencies(3)
    expect = [math.log(p) / (2 * math.pi) for p in (2, 3, 5)]
    np.testing.assert_allclose(lam, expect, rtol=1e-15)


def test_factorize_basic():
    assert factorize(1) == []
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert factorize(97) == [(97, 1)]
    # large prime cofactor above the sieve range
    assert factorize(2 * 999983) == [(2, 1), (999983, 1)]
    assert factorize(10**12) == [(2, 12), (5, 12)]


def test_factorize_rejects_out_of_range():
    with pytest.raises(PreconditionError):
        factorize(0)
    with pytest.raises(PreconditionError, match="n too large"):
        factorize(10**12 + 1)


def test_smooth_powers_of_two():
    sm = smooth_enumerate(2, 16)
    np.testing.assert_array_equal(sm.members, [1, 2, 4, 8, 16])
    np.testing.assert_array_equal(sm.exponents[:, 0], [0, 1, 2, 3, 4])


def test_smooth_matches_brute_force():
    # independent route: divide out small primes directly
    def is_smooth(n, r):
        for p in (2, 3, 5, 7):
            if p > r:
                break
            while n % p == 0:
                n //= p
        return n == 1

    sm = smooth_enumerate(7, 500)
    expect = [n for n in range(1, 501) if is_smooth(n, 7)]
    np.testing.assert_array_equal(sm.members, expect)


def test_smooth_exponents_reconstruct_members():
    sm = smooth_enumerate(12, 10_000)
    rebuilt = np.ones(len(sm), dtype=np.int64)
    for i, p in enumerate(sm.primes):
        rebuilt *= np.int64(p) ** sm.exponents[:, i].astype(np.int64)
    np.testing.assert_array_equal(rebuilt, sm.members)
    assert sm.members[0] == 1
    assert np.all(np.diff(sm.members) > 0)


def test_smooth_argument_validation():
    with pytest.raises(PreconditionError):
        smooth_enumerate(1, 100)
    with pytest.raises(PreconditionError):
        smooth_enumerate(2, 0)


def test_smooth_cap_trips(monkeypatch):
    monkeypatch.setattr(primes_mod, "_MAX_SMOOTH_MEMBERS", 500)
    with pytest.raises(NumericalError, match="desk-scale cap"):
        smooth_enumerate(30, 999_983)  # uncached argument pair
