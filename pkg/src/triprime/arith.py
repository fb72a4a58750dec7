"""Exact integer arithmetic: factorization, Euler phi, Jacobi symbol, unit groups, f0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .reports import FLOAT_SLACK, BoundReport

MAX_FACTOR_INPUT = 2**63
# Above this group order exponent vectors are computed by discrete logs on demand.
EXPONENT_TABLE_LIMIT = 2**20

F0_CONSTANT = 3.32

_WHEEL_INCREMENTS = (4, 2, 4, 2, 4, 6, 2, 6)  # mod-30 wheel starting at 7


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.factors)

    def value(self) -> int:
        return math.prod(p**e for p, e in self.factors)


def _trial_divisors() -> Iterator[int]:
    yield 2
    yield 3
    yield 5
    d = 7
    while True:
        for inc in _WHEEL_INCREMENTS:
            yield d
            d += inc


@lru_cache(maxsize=65536)
def factor(n: int) -> Factorization:
    """Factor ``n`` by trial division over a mod-30 wheel."""
    n = int(n)
    if n < 1:
        raise ValueError(f"factor() needs a positive integer, got {n}")
    if n > MAX_FACTOR_INPUT:
        raise ValueError(f"factor() is limited to n <= 2**63, got {n}")
    out = []
    m = n
    for d in _trial_divisors():
        if d * d > m:
            break
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
    if m > 1:
        out.append((m, 1))
    return Factorization(n, tuple(out))


def prime_divisors(n: int) -> tuple[int, ...]:
    return factor(n).primes


def is_prime(n: int) -> bool:
    return n >= 2 and factor(n).factors == ((n, 1),)


def euler_phi(n: int) -> int:
    result = n
    for p in prime_divisors(n):
        result -= result // p
    return result


def f0(q: int) -> float:
    """Product of (1 - 1/sqrt(p))^-1 over the primes p dividing q."""
    if q < 2:
        raise ValueError(f"f0 requires q >= 2, got {q}")
    return math.prod(1.0 / (1.0 - 1.0 / math.sqrt(p)) for p in prime_divisors(q))


def check_f0_bound(q: int) -> BoundReport:
    value = f0(q)
    return BoundReport.compare(
        "f0(q) <= 3.32*sqrt(q)", value, "<=", F0_CONSTANT * math.sqrt(q), slack=FLOAT_SLACK, q=q
    )


def _naive_prime_mask(n: int) -> np.ndarray:
    mask = np.ones(n + 1, dtype=bool)
    mask[: min(2, n + 1)] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return mask


def phi_table(n: int) -> np.ndarray:
    """Euler phi of 0..n as an int64 array (entry 0 is 0)."""
    phi = np.arange(n + 1, dtype=np.int64)
    for p in np.flatnonzero(_naive_prime_mask(n)):
        phi[p::p] -= phi[p::p] // p
    return phi


def f0_table(n: int) -> np.ndarray:
    """f0 of 0..n (entries 0 and 1 are 1.0), built by sieving over primes."""
    out = np.ones(n + 1, dtype=np.float64)
    for p in np.flatnonzero(_naive_prime_mask(n)):
        out[p::p] *= 1.0 / (1.0 - 1.0 / math.sqrt(p))
    return out


def jacobi(a: int, n: int) -> int:
    if n < 1 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def primitive_root(p: int) -> int:
    """Least primitive root modulo an odd prime ``p``."""
    if p == 2:
        return 1
    order = p - 1
    cofactors = [order // r for r in prime_divisors(order)]
    for g in range(2, p):
        if all(pow(g, c, p) != 1 for c in cofactors):
            return g
    raise ArithmeticError(f"no primitive root found mod {p}")


def discrete_log(h: int, g: int, order: int, m: int) -> int:
    """Solve g**x == h (mod m) with 0 <= x < order by baby-step giant-step."""
    h %= m
    step = math.isqrt(order) + 1
    table = {}
    cur = 1
    for j in range(step):
        table.setdefault(cur, j)
        cur = cur * g % m
    giant = pow(g, -step, m)
    cur = h
    for i in range(step + 1):
        j = table.get(cur)
        if j is not None:
            x = (i * step + j) % order
            if pow(g, x, m) == h:
                return x
        cur = cur * giant % m
    raise ValueError(f"{h} is not a power of {g} modulo {m}")


@dataclass(frozen=True)
class _Component:
    modulus: int  # prime power p**k
    base: int  # generator modulo ``modulus`` (for "sign" this is -1)
    order: int
    kind: str  # "cyclic", "sign" (the -1 factor at 2**k) or "five"


def _crt_lift(g: int, m: int, q: int) -> int:
    """x with x = g (mod m) and x = 1 (mod q/m)."""
    rest = q // m
    if rest == 1:
        return g % m
    return (1 + (g - 1) * rest * pow(rest, -1, m)) % q


def _components(q: int) -> list[_Component]:
    comps = []
    for p, k in factor(q).factors if q > 1 else ():
        m = p**k
        if p == 2:
            if k == 2:
                comps.append(_Component(m, -1, 2, "sign"))
            elif k >= 3:
                comps.append(_Component(m, -1, 2, "sign"))
                comps.append(_Component(m, 5, 2 ** (k - 2), "five"))
            continue
        g = primitive_root(p)
        if k >= 2 and pow(g, p - 1, p * p) == 1:
            g += p
        comps.append(_Component(m, g, m - m // p, "cyclic"))
    return comps


class UnitGroup:
    """The multiplicative group of residues modulo ``q`` coprime to ``q``.

    Elements are addressed by their index in the sorted list of units, so a
    subset is a boolean vector of length ``phi``. Each unit also has a unique
    exponent vector with respect to ``generators``.
    """

    def __init__(self, q: int, exponent_table_limit: int = EXPONENT_TABLE_LIMIT):
        if q < 1:
            raise ValueError(f"modulus must be >= 1, got {q}")
        self.q = q
        self._components = _components(q)
        self.generators = tuple(
            (_crt_lift(c.base, c.modulus, q), c.order) for c in self._components
        )
        self.phi = euler_phi(q)
        residues = np.arange(q, dtype=np.int64)
        self.units = residues[np.gcd(residues, q) == 1]
        self.units.setflags(write=False)
        index_of = np.full(q, -1, dtype=np.int64)
        index_of[self.units] = np.arange(self.phi)
        index_of.setflags(write=False)
        self.index_of = index_of
        self.identity = int(index_of[1 % q])
        self.key = ("units", q)
        self._exp_table = None
        if self.phi <= exponent_table_limit:
            self._exp_table = self._build_exponent_table()

    def __repr__(self):
        return f"UnitGroup(q={self.q}, generators={list(self.generators)})"

    @property
    def order(self) -> int:
        return self.phi

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(o for _, o in self.generators)

    def _build_exponent_table(self) -> np.ndarray:
        q = self.q
        elems = np.array([1 % q], dtype=np.int64)
        exps = np.zeros((1, 0), dtype=np.int64)
        for g, order in self.generators:
            powers = np.empty(order, dtype=np.int64)
            cur = 1 % q
            for k in range(order):
                powers[k] = cur
                cur = cur * g % q
            elems = (elems[:, None] * powers[None, :] % q).ravel()
            exps = np.concatenate(
                [np.repeat(exps, order, axis=0), np.tile(np.arange(order), len(exps))[:, None]],
                axis=1,
            )
        table = np.empty((self.phi, len(self.generators)), dtype=np.int64)
        table[self.index_of[elems]] = exps
        table.setflags(write=False)
        return table

    def is_unit(self, n: int) -> bool:
        return math.gcd(n, self.q) == 1

    def index(self, n: int) -> int:
        i = int(self.index_of[n % self.q])
        if i < 0:
            raise ValueError(f"{n} is not invertible modulo {self.q}")
        return i

    def residue(self, i: int) -> int:
        return int(self.units[i])

    def exponents(self, n: int) -> tuple[int, ...]:
        """Exponent vector of the unit ``n`` with respect to ``generators``."""
        i = self.index(n)
        if self._exp_table is not None:
            return tuple(int(e) for e in self._exp_table[i])
        return self._exponents_by_dlog(n)

    def _exponents_by_dlog(self, n: int) -> tuple[int, ...]:
        out = []
        for c in self._components:
            r = n % c.modulus
            if c.kind == "sign":
                out.append(1 if r % 4 == 3 else 0)
            elif c.kind == "five":
                if r % 4 == 3:
                    r = c.modulus - r
                out.append(discrete_log(r, 5, c.order, c.modulus))
            else:
                out.append(discrete_log(r, c.base, c.order, c.modulus))
        return tuple(out)

    def exponent_matrix(self) -> np.ndarray:
        """Exponent vectors of all units in index order, shape ``(phi, len(generators))``."""
        if self._exp_table is not None:
            return self._exp_table
        return np.array([self._exponents_by_dlog(int(u)) for u in self.units], dtype=np.int64).reshape(
            self.phi, len(self.generators)
        )

    def element(self, exps) -> int:
        x = 1 % self.q
        for (g, _), e in zip(self.generators, exps):
            x = x * pow(g, int(e), self.q) % self.q
        return x

    def mul_index(self, i: int, j: int) -> int:
        return int(self.index_of[self.units[i] * self.units[j] % self.q])

    def inverse_index(self, i: int) -> int:
        if self.q == 1:
            return 0
        return self.index(pow(int(self.units[i]), -1, self.q))

    def translation(self, i: int) -> np.ndarray:
        """Index permutation ``j -> index(u_i * u_j)``."""
        return self.index_of[self.units * self.units[i] % self.q]

    def labels(self, indices) -> list[int]:
        return [int(self.units[i]) for i in indices]


@lru_cache(maxsize=256)
def unit_group(q: int) -> UnitGroup:
    return UnitGroup(q)
