import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from triprime.errors import PreconditionError, ResourceError
from triprime.sieve import (
    PrimeStream, check_brun_titchmarsh, check_dusart, class_spectrum, coprime_prime_count,
    count_primes_in_progression, prime_pi, primes_up_to,
)

from conftest import naive_primes


def test_primes_up_to_small():
    assert list(primes_up_to(10)) == [2, 3, 5, 7]
    assert len(primes_up_to(100).to_array()) == 25
    assert list(primes_up_to(1)) == []
    assert list(primes_up_to(2)) == [2]


def test_million_matches_naive_sieve():
    got = primes_up_to(10**6).to_array()
    assert len(got) == 78498
    assert got.tolist() == naive_primes(10**6)


@given(st.integers(0, 20000), st.sampled_from([1, 2, 7, 64, 1000]))
@settings(max_examples=60)
def test_small_segments_match_naive(n, seg):
    stream = PrimeStream(n, segment_size=seg)
    out = list(stream)
    assert out == naive_primes(n)
    assert all(a < b for a, b in zip(out, out[1:]))


def test_limit_cap():
    with pytest.raises(ResourceError):
        primes_up_to(10**10 + 1)


def test_memory_cap_env(monkeypatch):
    monkeypatch.setenv("TRIPRIME_SIEVE_MEMORY", "1000")
    with pytest.raises(ResourceError):
        primes_up_to(10**7).to_array()


def test_prime_pi_floor_convention():
    assert prime_pi(10) == 4
    assert prime_pi(10.99) == 4
    assert prime_pi(11) == 5
    assert prime_pi(1) == 0


def test_dusart_examples():
    assert check_dusart(5393).satisfied
    assert check_dusart(10**6).satisfied
    with pytest.raises(PreconditionError):
        check_dusart(5392.999)


def test_dusart_threshold_is_sharp_nearby():
    # the inequality does fail just below the threshold
    x = 5392
    assert prime_pi(x) < x / (math.log(x) - 1)


def test_coprime_prime_count_examples():
    assert coprime_prime_count(20, 10)[0] == 6
    assert coprime_prime_count(10, 1)[0] == 4
    count, report = coprime_prime_count(10**5, 6)
    assert count == 9592 - 2 and report.satisfied
    assert coprime_prime_count(100, 6)[1] is None


def test_brun_titchmarsh_examples():
    r = check_brun_titchmarsh(0, 100, 3, 1)
    assert r.computed == 11 and r.satisfied
    assert r.bound == pytest.approx(2 * 100 / (2 * math.log(100 / 3)))
    assert r.bound == pytest.approx(28.5, abs=0.1)
    assert check_brun_titchmarsh(0, 2, 1, 0).satisfied
    with pytest.raises(PreconditionError):
        check_brun_titchmarsh(0, 5, 5, 1)


@given(st.integers(0, 5000), st.integers(2, 5000), st.data())
@settings(max_examples=200)
def test_progression_count_matches_naive(y, x, data):
    q = data.draw(st.integers(1, x - 1))
    a = data.draw(st.integers(0, q - 1).filter(lambda a: math.gcd(a, q) == 1))
    expected = sum(1 for p in naive_primes(y + x) if p > y and p % q == a)
    assert count_primes_in_progression(y, x, q, a) == expected
    assert check_brun_titchmarsh(y, x, q, a).satisfied


def test_class_spectrum_examples():
    assert class_spectrum(19, 10).nonempty.residues() == [1, 3, 7, 9]
    assert class_spectrum(2, 3).nonempty.residues() == [2]
    assert class_spectrum(29, 7).nonempty.is_full()
    assert class_spectrum(28, 7).nonempty.residues() == [2, 3, 4, 5, 6]


def test_class_spectrum_counts_and_monotonicity():
    rng = random.Random(1)
    for _ in range(200):
        q = rng.randint(1, 300)
        X = rng.randint(2, 5000)
        spec = class_spectrum(X, q)
        assert spec.total == coprime_prime_count(X, q)[0]
        expected = {}
        for p in naive_primes(X):
            if math.gcd(p, q) == 1:
                expected[p % q] = expected.get(p % q, 0) + 1
        assert {a: spec.count(a) for a in expected} == expected
        assert sorted(expected) == spec.nonempty.residues()
        bigger = class_spectrum(X + rng.randint(0, 3000), q)
        assert spec.nonempty.issubset(bigger.nonempty)
