"""Real Dirichlet characters, character sums and certified values of L(1, chi)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import euler_phi, f0, unit_group
from .errors import PrincipalCharacterError, ResourceError, TheoremViolation
from .reports import FLOAT_SLACK, BoundReport
from .sieve import prime_array

DEFAULT_TERM_CAP = 10**7
_U = 2.0**-53  # unit roundoff of binary64

# Primes = 1 (mod q) for q = 2..14 as published. Each is valid, but the least
# such prime for q = 12 is 13, not 37.
LEAST_PRIME_ONE_MOD_Q = {2: 3, 3: 7, 4: 5, 5: 11, 6: 7, 7: 29, 8: 17, 9: 19,
                         10: 11, 11: 23, 12: 37, 13: 53, 14: 29}


class QuadraticCharacter:
    """A character modulo q with values in {-1, 0, 1}.

    It is fixed by a sign per unit-group generator; ``cid`` has bit i set when
    generator i is sent to -1.
    """

    def __init__(self, q: int, signs: tuple[int, ...]):
        G = unit_group(q)
        if len(signs) != len(G.generators):
            raise ValueError(f"need {len(G.generators)} signs for q={q}")
        for s, (_, order) in zip(signs, G.generators):
            if s not in (1, -1):
                raise ValueError("signs must be +1 or -1")
            if s == -1 and order % 2:
                raise ValueError("an odd-order generator cannot map to -1")
        self.q = q
        self.signs = tuple(signs)
        self.cid = sum(1 << i for i, s in enumerate(signs) if s == -1)
        self.principal = self.cid == 0
        flips = np.array([s == -1 for s in signs], dtype=np.int64)
        parity = (G.exponent_matrix() @ flips) % 2 if len(signs) else np.zeros(G.phi, dtype=np.int64)
        table = np.zeros(q, dtype=np.int8)
        table[G.units] = np.where(parity == 1, -1, 1)
        table.setflags(write=False)
        self.table = table

    def __call__(self, n: int) -> int:
        return int(self.table[n % self.q])

    def __repr__(self):
        return f"QuadraticCharacter(q={self.q}, cid={self.cid})"

    def __eq__(self, other):
        if not isinstance(other, QuadraticCharacter):
            return NotImplemented
        return self.q == other.q and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.q, self.table.tobytes()))

    @property
    def label(self) -> str:
        return f"{self.q}.{self.cid}"

    @property
    def phi(self) -> int:
        return euler_phi(self.q)

    def values(self, n: np.ndarray) -> np.ndarray:
        return self.table[np.asarray(n) % self.q].astype(np.int64)

    def kernel_residues(self) -> list[int]:
        return [int(r) for r in np.flatnonzero(self.table == 1)]


@lru_cache(maxsize=512)
def real_characters(q: int) -> tuple[QuadraticCharacter, ...]:
    """All characters mod q whose square is principal, principal first."""
    G = unit_group(q)
    even = [i for i, (_, order) in enumerate(G.generators) if order % 2 == 0]
    out = []
    for mask in range(1 << len(even)):
        signs = [1] * len(G.generators)
        for bit, i in enumerate(even):
            if mask >> bit & 1:
                signs[i] = -1
        out.append(QuadraticCharacter(q, tuple(signs)))
    out.sort(key=lambda c: c.cid)
    return tuple(out)


def nonprincipal_real_characters(q: int) -> tuple[QuadraticCharacter, ...]:
    return tuple(c for c in real_characters(q) if not c.principal)


def char_eval(chi: QuadraticCharacter, n: int) -> int:
    return chi(n)


def _require_nonprincipal(chi: QuadraticCharacter) -> None:
    if chi.principal:
        raise PrincipalCharacterError(f"{chi!r} is principal")


def prefix_sums(chi: QuadraticCharacter) -> np.ndarray:
    """S(t) = sum_{1 <= n <= t} chi(n) for t = 0..q."""
    vals = chi.table.astype(np.int64)
    return np.concatenate([[0], np.cumsum(np.roll(vals, -1))])


def char_sum(chi: QuadraticCharacter, lo: int, hi: int) -> int:
    """Exact sum of chi(n) over lo <= n <= hi (0 when hi < lo)."""
    if hi < lo:
        return 0
    S = prefix_sums(chi)
    q = chi.q
    # whole periods contribute nothing for a non-principal character
    full = 0 if not chi.principal else int(S[q])
    def upto(t):
        return int(S[t % q]) + (t // q) * full
    return upto(hi) - upto(lo - 1)


def interval_char_sum(chi: QuadraticCharacter, lo: int, hi: int):
    _require_nonprincipal(chi)
    if lo > hi:
        raise ValueError("empty interval")
    total = char_sum(chi, lo, hi)
    # phi(q) is even for q >= 3, the only moduli with non-principal characters
    report = BoundReport.compare(
        "|sum chi(n)| <= phi(q)/2", abs(total), "<=", chi.phi // 2,
        character=chi.label, lo=lo, hi=hi, sum=total,
    )
    return total, report


@dataclass(frozen=True)
class CertifiedValue:
    lo: float
    hi: float
    terms: int = 0

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "CertifiedValue") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


def _down(x: Fraction) -> float:
    f = float(x)
    return f if Fraction(f) <= x else math.nextafter(f, -math.inf)


def _up(x: Fraction) -> float:
    f = float(x)
    return f if Fraction(f) >= x else math.nextafter(f, math.inf)


class _LSeries:
    """Partial sums of sum chi(d)/d along the ladder N_j = q * 2**j.

    Each ladder point yields two enclosures of L(1, chi): the plain tail bound
    phi(q)/(2N), and a second-order one that adds the exact mean-value term
    c/(N+1) and bounds what is left by M2/((N+1)(N+2)).
    """

    def __init__(self, chi: QuadraticCharacter):
        q = chi.q
        self.chi = chi
        self.q = q
        self.phi = chi.phi
        S = prefix_sums(chi)[1:]  # S(1)..S(q), S(q) = 0
        total = int(S.sum())
        self.mean = Fraction(total, q)
        # q * V(j) = q * sum_{t<=j} S(t) - j * total, exact integers
        qV = q * np.cumsum(S) - np.arange(1, q + 1) * total
        self.m2 = Fraction(int(np.abs(qV).max()), q)
        self.N = 0
        self.partial = Fraction(0)
        self.harmonic_bound = 0.0  # upper bound for sum of 1/d over summed terms
        self.rounding = Fraction(0)
        self.lo = -math.inf
        self.hi = math.inf

    def advance(self) -> None:
        start = self.N + 1
        end = self.q if self.N == 0 else 2 * self.N
        d = np.arange(start, end + 1, dtype=np.int64)
        terms = self.chi.values(d) / d.astype(np.float64)
        seg = math.fsum(terms.tolist())
        self.partial += Fraction(seg)
        h = 1.0 / start + math.log(end / start)
        self.harmonic_bound += h
        # each quotient carries <= u/d error, fsum adds <= u|seg|; doubled for margin
        self.rounding += Fraction(2 * _U) * (Fraction(h) + abs(Fraction(seg)))
        self.N = end
        N = Fraction(end)
        r1 = Fraction(self.phi, 2) / N + self.rounding
        c1 = self.partial
        r2 = self.m2 / ((N + 1) * (N + 2)) + self.rounding
        c2 = self.partial + self.mean / (N + 1)
        lo = max(c1 - r1, c2 - r2)
        hi = min(c1 + r1, c2 + r2)
        self.lo = max(self.lo, _down(lo))
        self.hi = min(self.hi, _up(hi))

    def value(self) -> CertifiedValue:
        return CertifiedValue(self.lo, self.hi, self.N)


def l_one_certified(chi: QuadraticCharacter, tolerance: float, max_terms: int = DEFAULT_TERM_CAP) -> CertifiedValue:
    """An interval of width <= ``tolerance`` guaranteed to contain L(1, chi)."""
    _require_nonprincipal(chi)
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    series = _LSeries(chi)
    while True:
        nxt = chi.q if series.N == 0 else 2 * series.N
        if nxt > max_terms:
            raise ResourceError(
                f"L(1, {chi.label}) to width {tolerance} needs more than {max_terms} terms"
            )
        series.advance()
        if series.hi - series.lo <= tolerance:
            return series.value()


def gelfond_lower_bound(q: int) -> float:
    phi = euler_phi(q)
    return math.pi / (4 * phi) - math.pi / phi**2


def check_gelfond(chi: QuadraticCharacter, tolerance: float = 1e-6, max_terms: int = DEFAULT_TERM_CAP) -> BoundReport:
    """Compare a certified lower end of L(1, chi) with pi/(4 phi) - pi/phi^2.

    The interval is tightened tenfold until the comparison is decided; when the
    term cap is hit first the report is inconclusive.
    """
    _require_nonprincipal(chi)
    bound = gelfond_lower_bound(chi.q)
    name = "L(1,chi) >= pi/(4 phi(q)) - pi/phi(q)^2"
    tol = tolerance
    while True:
        try:
            L = l_one_certified(chi, tol, max_terms)
        except ResourceError:
            return BoundReport.inconclusive(name, None, ">=", bound, character=chi.label, tolerance=tol)
        detail = dict(character=chi.label, lo=L.lo, hi=L.hi, terms=L.terms)
        if L.lo >= bound + FLOAT_SLACK:
            return BoundReport.compare(name, L.lo, ">=", bound, slack=FLOAT_SLACK, **detail)
        if L.hi < bound - FLOAT_SLACK:
            return BoundReport.compare(name, L.hi, ">=", bound, slack=FLOAT_SLACK, **detail)
        tol /= 10


def divisor_sums(chi: QuadraticCharacter, n: int) -> np.ndarray:
    """(1 * chi)(m) = sum_{d | m} chi(d) for m = 0..n (entry 0 unused)."""
    out = np.zeros(n + 1, dtype=np.int64)
    if n < 1:
        return out
    vals = chi.values(np.arange(n + 1))
    r = math.isqrt(n)
    for d in range(1, r + 1):
        out[d::d] += vals[d]
    # pairs (d, k) with d > r, so k = m/d < n/r
    for k in range(1, n // (r + 1) + 1):
        hi = n // k
        if hi <= r:
            break
        ds = np.arange(r + 1, hi + 1)
        out[k * ds] += vals[ds]
    return out


def hyperbola_sum(chi: QuadraticCharacter, x: int) -> int:
    """sum_{d <= x} chi(d) * floor(x/d)."""
    d = np.arange(1, x + 1, dtype=np.int64)
    return int((chi.values(d) * (x // d)).sum())


def has_kernel_prime_upto(chi: QuadraticCharacter, x: int) -> bool:
    primes = prime_array(max(x, 2))
    primes = primes[primes <= x]
    return bool(np.any(chi.values(primes) == 1))


def divisor_sum_check(chi: QuadraticCharacter, x: int) -> list[BoundReport]:
    """Compare sum_{n<=x} (1*chi)(n) computed two ways, plus its square and Pintz bounds."""
    _require_nonprincipal(chi)
    if x < 1:
        raise ValueError("x must be positive")
    direct = int(divisor_sums(chi, x)[1:].sum())
    hyper = hyperbola_sum(chi, x)
    root = math.isqrt(x)
    squares = sum(1 for m in range(1, root + 1) if math.gcd(m, chi.q) == 1)
    ctx = dict(character=chi.label, x=x)
    reports = [
        BoundReport.compare("sum (1*chi)(n) == sum chi(d) floor(x/d)", direct, "==", hyper, **ctx),
        BoundReport.compare("sum (1*chi)(n) >= #{m <= sqrt x : (m,q)=1}", direct, ">=", squares, **ctx),
    ]
    if not has_kernel_prime_upto(chi, x):
        reports.append(BoundReport.compare(
            "sum (1*chi)(n) <= sqrt(x) f0(q)", direct, "<=", math.sqrt(x) * f0(chi.q),
            slack=FLOAT_SLACK, **ctx,
        ))
    return reports


def _series_tail(alpha: float, N: int) -> float:
    """Upper bound for sum_{n > N} 2 sqrt(n) exp(-n alpha), using (1*chi)(n) <= d(n) <= 2 sqrt(n)."""
    ratio = math.sqrt(1 + 1 / (N + 1)) * math.exp(-alpha)
    if ratio >= 1:
        return math.inf
    return 2 * math.sqrt(N + 1) * math.exp(-(N + 1) * alpha) / (1 - ratio) * (1 + 1e-12)


def gelfond_series_check(chi: QuadraticCharacter, alpha: float, max_terms: int = DEFAULT_TERM_CAP) -> BoundReport:
    """Check 1 + sum_{n>=1} (1*chi)(n) exp(-n alpha) >= sqrt(pi)/(2 sqrt(alpha))."""
    _require_nonprincipal(chi)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    rhs = math.sqrt(math.pi) / (2 * math.sqrt(alpha))
    name = "1 + S(alpha) >= sqrt(pi)/(2 sqrt(alpha))"
    want = math.ceil((60 + math.log1p(1 / alpha)) / alpha)
    N = min(want, max_terms)
    n = np.arange(1, N + 1, dtype=np.float64)
    r = divisor_sums(chi, N)[1:]
    partial = math.fsum((r * np.exp(-alpha * n)).tolist())
    # terms are non-negative; 1e-12 relative covers exp and summation rounding
    lower = 1 + partial * (1 - 1e-12)
    upper = 1 + partial * (1 + 1e-12) + _series_tail(alpha, N)
    detail = dict(character=chi.label, alpha=alpha, terms=N, lower=lower)
    if lower >= rhs + FLOAT_SLACK:
        return BoundReport.compare(name, lower, ">=", rhs, slack=FLOAT_SLACK, **detail)
    if upper < rhs - FLOAT_SLACK:
        return BoundReport.compare(name, upper, ">=", rhs, slack=FLOAT_SLACK, **detail)
    return BoundReport.inconclusive(name, lower, ">=", rhs, **detail)


@dataclass(frozen=True)
class KernelPrimeResult:
    q: int
    character: str
    prime: int
    bound: int
    within_bound: bool


def least_kernel_prime(chi: QuadraticCharacter, search_cap: int | None = None) -> KernelPrimeResult:
    """Least prime p with chi(p) = 1, searched up to q**4 (or ``search_cap``)."""
    _require_nonprincipal(chi)
    q = chi.q
    if q < 3:
        raise ValueError("least_kernel_prime needs q >= 3")
    bound = q**4
    cap = bound if search_cap is None else min(search_cap, bound)
    limit = min(1 << 12, cap)
    while True:
        primes = prime_array(limit)
        hits = np.flatnonzero(chi.values(primes) == 1)
        if len(hits):
            p = int(primes[hits[0]])
            return KernelPrimeResult(q, chi.label, p, bound, p <= bound)
        if limit >= cap:
            if cap == bound:
                raise TheoremViolation(f"no prime p <= q^4 with chi(p) = 1 for {chi!r}")
            raise ResourceError(f"no kernel prime for {chi!r} below the search cap {cap}")
        limit = min(4 * limit, cap)


def least_prime_one_mod_q(q: int) -> int:
    if q < 2:
        raise ValueError("q must be >= 2")
    limit = 1 << 10
    while True:
        primes = prime_array(limit)
        hits = primes[primes % q == 1]
        if len(hits):
            return int(hits[0])
        limit *= 4
