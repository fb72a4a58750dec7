"""Segmented prime generation and the Brun-Titchmarsh / Dusart counting checks."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .arith import euler_phi, prime_divisors, unit_group
from .errors import PreconditionError, ResourceError
from .reports import FLOAT_SLACK, BoundReport
from .sumsets import ClassSet

DUSART_THRESHOLD = 5393
DEFAULT_SEGMENT = 2**20  # odd entries per segment
MAX_LIMIT = 10**10
MEMORY_ENV = "TRIPRIME_SIEVE_MEMORY"
DEFAULT_MEMORY_CAP = 1 << 30


def memory_cap() -> int:
    """Sieve memory cap in bytes, read from ``TRIPRIME_SIEVE_MEMORY``."""
    raw = os.environ.get(MEMORY_ENV)
    if not raw:
        return DEFAULT_MEMORY_CAP
    try:
        value = int(float(raw))
    except ValueError:
        raise ResourceError(f"{MEMORY_ENV}={raw!r} is not a byte count") from None
    if value <= 0:
        raise ResourceError(f"{MEMORY_ENV} must be positive")
    return value


def _estimate_prime_count(n: int) -> int:
    if n < 17:
        return 6
    return int(1.26 * n / math.log(n)) + 1


def _check_limit(n: int, segment_size: int, materialize: bool) -> None:
    if n > MAX_LIMIT:
        raise ResourceError(f"sieve limit {n} exceeds the maximum {MAX_LIMIT}")
    need = min(segment_size, n // 2 + 1) + 8 * _estimate_prime_count(math.isqrt(n) + 1)
    if materialize:
        need += 8 * _estimate_prime_count(n)
    cap = memory_cap()
    if need > cap:
        raise ResourceError(f"sieving to {n} needs ~{need} bytes, cap is {cap}")


def simple_sieve(n: int) -> np.ndarray:
    """All primes <= n from an unsegmented sieve; only used for small n."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    mask[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if mask[p]:
            mask[p * p :: 2 * p] = False
    return np.flatnonzero(mask).astype(np.int64)


@lru_cache(maxsize=16)
def _segment(low: int, high: int) -> np.ndarray:
    """Odd primes in [low, high) with ``low`` odd, sieving by odd base primes."""
    base = _base_primes(1 << (math.isqrt(high) + 1).bit_length())
    count = (high - low + 1) // 2
    mask = np.ones(count, dtype=bool)
    for p in base[1:].tolist():
        pp = p * p
        if pp >= high:
            break
        start = max(pp, -(-low // p) * p)
        if start % 2 == 0:
            start += p
        if start < high:
            mask[(start - low) // 2 :: p] = False
    if low == 1:
        mask[0] = False
    out = low + 2 * np.flatnonzero(mask).astype(np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def _base_primes(limit: int) -> np.ndarray:
    return simple_sieve(limit)


@dataclass
class PrimeStream:
    """Iterates over the primes ``<= limit`` in increasing order, one segment at a time."""

    limit: int
    segment_size: int = DEFAULT_SEGMENT

    def __post_init__(self):
        if self.limit < 0:
            raise ValueError("limit must be non-negative")
        if self.segment_size < 1:
            raise ValueError("segment size must be positive")
        _check_limit(self.limit, self.segment_size, materialize=False)

    def segments(self) -> Iterator[np.ndarray]:
        n = self.limit
        if n < 2:
            return
        yield np.array([2], dtype=np.int64)
        span = 2 * self.segment_size
        low = 1
        while low <= n:
            high = min(low + span, n + 1)
            seg = _segment(low, high)
            if len(seg):
                yield seg
            low += span

    def __iter__(self) -> Iterator[int]:
        for seg in self.segments():
            yield from seg.tolist()

    def to_array(self) -> np.ndarray:
        _check_limit(self.limit, self.segment_size, materialize=True)
        parts = list(self.segments())
        if not parts:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(parts)


def primes_up_to(n: int, segment_size: int = DEFAULT_SEGMENT) -> PrimeStream:
    return PrimeStream(int(n), segment_size)


class _PrimeCache:
    """Keeps the largest prime table built so far and serves prefixes of it."""

    def __init__(self):
        self.limit = -1
        self.primes = np.empty(0, dtype=np.int64)

    def get(self, n: int) -> np.ndarray:
        n = int(n)
        # the cap applies to the request whether or not the table is already warm
        _check_limit(n, DEFAULT_SEGMENT, materialize=True)
        if n > self.limit:
            target = max(n, min(2 * self.limit, MAX_LIMIT), 1 << 16)
            try:
                arr = primes_up_to(target).to_array()
            except ResourceError:
                target = n
                arr = primes_up_to(target).to_array()
            arr.setflags(write=False)
            self.limit, self.primes = target, arr
        return self.primes[: np.searchsorted(self.primes, n, side="right")]


_cache = _PrimeCache()


def prime_array(n: int) -> np.ndarray:
    """Read-only array of all primes <= n (served from a shared cache)."""
    return _cache.get(n)


def prime_pi(x: float) -> int:
    """pi(x), with pi of a real x taken as pi(floor(x))."""
    n = math.floor(x)
    if n < 2:
        return 0
    return len(prime_array(n))


def prime_pi_many(xs) -> np.ndarray:
    xs = np.floor(np.asarray(xs, dtype=np.float64)).astype(np.int64)
    if xs.size == 0:
        return np.empty(0, dtype=np.int64)
    primes = prime_array(max(int(xs.max()), 2))
    return np.searchsorted(primes, xs, side="right").astype(np.int64)


def check_dusart(x: float) -> BoundReport:
    if x < DUSART_THRESHOLD:
        raise PreconditionError(f"Dusart's bound is stated for x >= {DUSART_THRESHOLD}, got {x}")
    bound = x / (math.log(x) - 1.0)
    return BoundReport.compare("pi(x) >= x/(log x - 1)", prime_pi(x), ">=", bound, slack=FLOAT_SLACK, x=x)


def coprime_prime_count(X: int, q: int):
    """Number of primes <= X coprime to q, with a report against X/log X.

    The report is ``None`` when X < 5393, where no bound is claimed.
    """
    if q < 1:
        raise ValueError("q must be positive")
    count = prime_pi(X) - sum(1 for p in prime_divisors(q) if p <= X) if q > 1 else prime_pi(X)
    report = None
    if X >= DUSART_THRESHOLD:
        report = BoundReport.compare(
            "pi_q(X) >= X/log X", count, ">=", X / math.log(X), slack=FLOAT_SLACK, X=X, q=q
        )
    return count, report


def count_primes_in_progression(y: int, x: int, q: int, a: int) -> int:
    """#{p prime : y < p <= y + x, p = a (mod q)}."""
    primes = prime_array(y + x)
    window = primes[np.searchsorted(primes, y, side="right"):]
    if q == 1:
        return len(window)
    return int(np.count_nonzero(window % q == a % q))


def brun_titchmarsh_bound(x: int, q: int) -> float:
    return 2.0 * x / (euler_phi(q) * math.log(x / q))


def check_brun_titchmarsh(y: int, x: int, q: int, a: int) -> BoundReport:
    if not 1 <= q < x:
        raise PreconditionError(f"Brun-Titchmarsh needs 1 <= q < x, got q={q}, x={x}")
    if y < 0:
        raise PreconditionError("y must be non-negative")
    if math.gcd(a, q) != 1:
        raise PreconditionError(f"a={a} is not coprime to q={q}")
    count = count_primes_in_progression(y, x, q, a)
    return BoundReport.compare(
        "primes in (y, y+x] with p = a mod q <= 2x/(phi(q) log(x/q))",
        count, "<=", brun_titchmarsh_bound(x, q), slack=FLOAT_SLACK, y=y, x=x, q=q, a=a % q,
    )


@dataclass(frozen=True)
class ClassSpectrum:
    q: int
    X: int
    counts: np.ndarray  # per unit-group index
    nonempty: ClassSet

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def count(self, a: int) -> int:
        return int(self.counts[unit_group(self.q).index(a)])


def class_spectrum(X: int, q: int) -> ClassSpectrum:
    """Per-class prime counts for primes <= X coprime to q."""
    if q < 1:
        raise ValueError("q must be positive")
    G = unit_group(q)
    primes = prime_array(max(int(X), 1))
    idx = G.index_of[primes % q]
    counts = np.bincount(idx[idx >= 0], minlength=G.phi).astype(np.int64)
    counts.setflags(write=False)
    return ClassSpectrum(q, int(X), counts, ClassSet(G, counts > 0))
