"""End-to-end checks that every unit mod q is a product of three primes below a threshold."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .arith import euler_phi, is_prime, unit_group
from .errors import NotCoveredError, PreconditionError, ResourceError, TheoremViolation
from .reports import BoundReport
from .sieve import DUSART_THRESHOLD, MAX_LIMIT, class_spectrum, prime_array, primes_up_to
from .sumsets import DENSITY_THRESHOLD, ClassSet, product_set, translate_bits

# (q, p): coverage mod q is claimed once x >= p**3
PAPER_TABLE = ((2, 3), (3, 7), (4, 5), (5, 19), (6, 11), (7, 29), (8, 23), (9, 23), (10, 19))
VACUITY_X = 29**3 - 1
CROSS_CHECK_EVERY = 64


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for integers n >= 0, k >= 1."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)  # over-estimate
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def theorem_prime_bound(q: int) -> int:
    """floor(q ** (16/3)), the largest P with P**3 <= q**16."""
    return iroot(q**16, 3)


@dataclass(frozen=True)
class Witness:
    q: int
    a: int
    primes: tuple[int, int, int]
    P: int

    @property
    def product(self) -> int:
        return math.prod(self.primes)

    def as_dict(self) -> dict:
        return {"a": self.a, "primes": list(self.primes), "product": self.product}

    def flat(self) -> str:
        return "*".join(str(p) for p in self.primes)


def validate_witness(w: Witness, strict: bool = False, distinct: bool = False) -> bool:
    """Re-check a witness from scratch, independent of how it was found."""
    p = w.primes
    if len(p) != 3 or list(p) != sorted(p):
        return False
    if distinct and len(set(p)) != 3:
        return False
    for x in p:
        if not is_prime(x) or math.gcd(x, w.q) != 1:
            return False
        if x > w.P or (strict and x >= w.P):
            return False
    return w.product % w.q == w.a % w.q


@dataclass
class CoverageResult:
    q: int
    P: int
    covered: bool
    missing: ClassSet
    witnesses: dict[int, Witness] | None = None
    strict: bool = False
    distinct: bool = False

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "P": self.P,
            "covered": self.covered,
            "missing": self.missing.residues(),
            "witnesses": [w.as_dict() for w in (self.witnesses or {}).values()],
            "bound_checks": [],
        }


def _effective_limit(P: int, strict: bool) -> int:
    return P - 1 if strict else P


def _class_candidates(q: int, X: int, per_class: int) -> list[list[int]]:
    """For every unit index, the first ``per_class`` primes <= X in that class."""
    G = unit_group(q)
    out: list[list[int]] = [[] for _ in range(G.phi)]
    if X < 2:
        return out
    for p in prime_array(X).tolist():
        i = int(G.index_of[p % q])
        if i >= 0 and len(out[i]) < per_class:
            out[i].append(p)
    return out


def distinct_triple_products(counts: np.ndarray, group) -> ClassSet:
    """Classes of p1*p2*p3 with distinct primes, given the number of primes in each class.

    Enumerates class multisets {a <= b <= r} and keeps those whose
    multiplicities the per-class prime counts can supply.
    """
    c = np.minimum(np.asarray(counts), 3)
    idx = np.flatnonzero(c)
    out = np.zeros(group.order, dtype=bool)
    for i, a in enumerate(idx.tolist()):
        for j in range(i, len(idx)):
            b = int(idx[j])
            if a == b and c[a] < 2:
                continue
            rest = idx[j:]
            need = 1 + (rest == a) + (rest == b)
            ok = rest[c[rest] >= need]
            out[group.translation(group.mul_index(a, b))[ok]] = True
    return ClassSet(group, out)


def _find_witness(q, a, X, P, candidates, AA, distinct):
    G = unit_group(q)
    b = G.index(a)
    flat = sorted((p, i) for i, ps in enumerate(candidates) for p in ps)
    for n1, (p1, i1) in enumerate(flat):
        t1 = G.mul_index(b, G.inverse_index(i1))
        if AA is not None and not AA.bits[t1]:
            continue
        for p2, i2 in flat[n1 + (1 if distinct else 0):]:
            i3 = G.mul_index(t1, G.inverse_index(i2))
            for p3 in candidates[i3]:
                if p3 > p2 or (p3 == p2 and not distinct):
                    return Witness(q, a % q, (p1, p2, p3), P)
    return None


def coverage(q: int, P: int, with_witnesses: bool = False, strict: bool = False,
             distinct: bool = False) -> CoverageResult:
    """Is every unit mod q a product of three primes p <= P coprime to q?

    ``strict`` uses p < P instead; ``distinct`` requires three different primes.
    """
    if q < 1 or P < 2:
        raise ValueError("coverage needs q >= 1 and P >= 2")
    X = _effective_limit(P, strict)
    spec = class_spectrum(max(X, 1), q)
    A = spec.nonempty
    if distinct:
        AAA = distinct_triple_products(spec.counts, A.group)
        AA = None
    else:
        AA = product_set(A, A)
        AAA = product_set(AA, A)
    missing = AAA.complement()
    result = CoverageResult(q, P, len(missing) == 0, missing, strict=strict, distinct=distinct)
    if with_witnesses:
        cands = _class_candidates(q, X, 3 if distinct else 1)
        result.witnesses = {}
        for r in AAA.residues():
            w = _find_witness(q, r, X, P, cands, AA, distinct)
            if w is None:
                raise TheoremViolation(f"class {r} mod {q} is covered but no witness was found")
            result.witnesses[r] = w
    return result


def witness(q: int, P: int, a: int, strict: bool = False, distinct: bool = False) -> Witness:
    """Least (p1, p2, p3) in lexicographic order with p1 p2 p3 = a (mod q)."""
    if math.gcd(a, q) != 1:
        raise ValueError(f"{a} is not invertible mod {q}")
    X = _effective_limit(P, strict)
    spec = class_spectrum(max(X, 1), q)
    A = spec.nonempty
    if distinct:
        AAA = distinct_triple_products(spec.counts, A.group)
        AA = None
    else:
        AA = product_set(A, A)
        AAA = product_set(AA, A)
    if a not in AAA:
        raise NotCoveredError(q, P, a % q, AAA.complement().residues())
    w = _find_witness(q, a, X, P, _class_candidates(q, X, 3 if distinct else 1), AA, distinct)
    if w is None:
        raise TheoremViolation(f"class {a} mod {q} is covered but no witness was found")
    return w


@dataclass
class ScanRecord:
    q: int
    p_min: int
    previous_prime: int | None
    theorem_bound: int
    classes_used: int
    witnesses: dict[int, Witness] | None = None
    distinct: bool = False
    cross_checks: int = 0

    @property
    def x_min_inclusive(self) -> int:
        """Least x with coverage by primes <= x^(1/3)."""
        return self.p_min**3

    @property
    def x_min_strict(self) -> int:
        """Least integer x with coverage by primes < x^(1/3)."""
        return self.p_min**3 + 1

    @property
    def margin(self) -> float:
        return self.p_min / self.theorem_bound

    def bound_checks(self) -> list[BoundReport]:
        q16 = self.q**16
        return [
            BoundReport.compare("P_min^3 <= q^16", self.x_min_inclusive, "<=", q16, q=self.q),
            BoundReport.compare("P_min^3 + 1 <= q^16", self.x_min_strict, "<=", q16, q=self.q),
        ]

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "P_min": self.p_min,
            "covered": True,
            "missing": [],
            "witnesses": [w.as_dict() for w in (self.witnesses or {}).values()],
            "bound_checks": [r.as_dict() for r in self.bound_checks()],
            "previous_prime": self.previous_prime,
            "x_min_inclusive": self.x_min_inclusive,
            "x_min_strict": self.x_min_strict,
            "theorem_bound": self.theorem_bound,
            "margin": self.margin,
        }


class _IncrementalCover:
    """A, AA, AAA maintained under insertion of new classes into A."""

    def __init__(self, group):
        self.G = group
        n = group.order
        self.A = np.zeros(n, dtype=bool)
        self.AA = np.zeros(n, dtype=bool)
        self.AAA = np.zeros(n, dtype=bool)
        self.steps = 0
        self.cross_checks = 0

    def add(self, c: int) -> bool:
        if self.A[c]:
            return False
        G = self.G
        self.A[c] = True
        self.AA |= translate_bits(G, self.A, c)
        self.AAA |= translate_bits(G, self.AA, c)
        self.steps += 1
        if self.steps % CROSS_CHECK_EVERY == 0:
            self.verify()
        return True

    def verify(self) -> None:
        A = ClassSet(self.G, self.A)
        AA = product_set(A, A)
        AAA = product_set(AA, A)
        if not (np.array_equal(AA.bits, self.AA) and np.array_equal(AAA.bits, self.AAA)):
            raise TheoremViolation(f"incremental product sets diverged mod {self.G.key}")
        self.cross_checks += 1

    def covered(self) -> bool:
        return bool(self.AAA.all())


class _IncrementalDistinct:
    """Distinct-prime variant: D1, D2, D3 hold classes of products of 1, 2, 3 distinct primes."""

    def __init__(self, group):
        self.G = group
        n = group.order
        self.counts = np.zeros(n, dtype=np.int64)
        self.D1 = np.zeros(n, dtype=bool)
        self.D2 = np.zeros(n, dtype=bool)
        self.D3 = np.zeros(n, dtype=bool)
        self.steps = 0
        self.cross_checks = 0

    def add(self, c: int) -> bool:
        if self.counts[c] >= 3:
            return False
        G = self.G
        self.D3 |= translate_bits(G, self.D2, c)
        self.D2 |= translate_bits(G, self.D1, c)
        self.D1[c] = True
        self.counts[c] += 1
        self.steps += 1
        if self.steps % CROSS_CHECK_EVERY == 0:
            self.verify()
        return True

    def verify(self) -> None:
        if not np.array_equal(distinct_triple_products(self.counts, self.G).bits, self.D3):
            raise TheoremViolation("incremental distinct products diverged")
        self.cross_checks += 1

    def covered(self) -> bool:
        return bool(self.D3.all())


def minimal_prime_threshold(q: int, with_witnesses: bool = False, distinct: bool = False,
                            prime_cap: int | None = None) -> ScanRecord:
    """Smallest prime P such that primes <= P cover every unit mod q by triple products."""
    if q < 2:
        raise ValueError("minimal_prime_threshold needs q >= 2")
    G = unit_group(q)
    bound = theorem_prime_bound(q)
    cap = min(bound, MAX_LIMIT if prime_cap is None else prime_cap)
    state = (_IncrementalDistinct if distinct else _IncrementalCover)(G)
    previous = None
    used = 0
    for p in _stream(cap):
        c = int(G.index_of[p % q])
        if c >= 0 and state.add(c):
            used += 1
            if state.covered():
                state.verify()
                rec = ScanRecord(q, p, previous, bound, used, distinct=distinct,
                                 cross_checks=state.cross_checks)
                if with_witnesses:
                    rec.witnesses = coverage(q, p, with_witnesses=True, distinct=distinct).witnesses
                return rec
        previous = p
    if cap == bound:
        raise TheoremViolation(f"q={q}: no coverage with primes <= floor(q^(16/3)) = {bound}")
    raise ResourceError(f"q={q}: sieve cap {cap} reached before coverage")


def _stream(cap: int) -> Iterable[int]:
    # small prefix from the shared cache, then a segmented stream for the rest
    head = min(cap, 1 << 16)
    yield from prime_array(head).tolist()
    if cap > head:
        for seg in primes_up_to(cap).segments():
            yield from seg[seg > head].tolist()


def scan(q_lo: int, q_hi: int, **kwargs) -> list[ScanRecord]:
    return [minimal_prime_threshold(q, **kwargs) for q in range(q_lo, q_hi + 1)]


def small_case_table() -> list[BoundReport]:
    """Sufficiency of each published row, alongside the measured minimal prime."""
    reports = []
    for q, p in PAPER_TABLE:
        cov = coverage(q, p)
        rec = minimal_prime_threshold(q)
        ok = cov.covered and rec.p_min <= p
        reports.append(BoundReport(
            f"q={q}: covered by primes <= {p} (x >= {p}^3)", rec.p_min, p, "<=", ok,
            detail={"q": q, "covered_at_table_value": cov.covered, "x_table": p**3,
                    "P_min": rec.p_min, "x_min": rec.x_min_inclusive},
        ))
    return reports


def vacuity_check(x: int = VACUITY_X) -> BoundReport:
    """Below 29^3 the condition q <= x^(1/16) forces q = 1, i.e. x < 2^16."""
    return BoundReport.compare("x < 2^16 (so x^(1/16) < 2)", x, "<", 2**16, iroot16=iroot(x, 16))


def density_check(q: int, X: int, waive_regime: bool = False) -> BoundReport:
    """|A| >= ceil(13/32 * phi(q)) for the set A of classes holding a prime <= X."""
    if not waive_regime:
        if X < DUSART_THRESHOLD:
            raise PreconditionError(f"X={X} < {DUSART_THRESHOLD}")
        if q**16 > X**3:
            raise PreconditionError(f"q={q} exceeds X^(3/16) for X={X}")
    phi = euler_phi(q)
    need = math.ceil(DENSITY_THRESHOLD * phi)
    size = len(class_spectrum(X, q).nonempty)
    return BoundReport.compare(
        "|A| >= 13/32 phi(q)", size, ">=", need, q=q, X=X, phi=phi,
        density=str(Fraction(size, phi)),
    )
