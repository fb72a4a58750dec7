import math

import pytest

ACCEPTANCE_LINES = []


def naive_primes(n):
    """Plain list-based sieve, independent of the package's segmented sieve."""
    if n < 2:
        return []
    flags = [True] * (n + 1)
    flags[0] = flags[1] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            for m in range(p * p, n + 1, p):
                flags[m] = False
    return [i for i, f in enumerate(flags) if f]


def brute_product(q, A, B):
    return {a * b % q for a in A for b in B}


def units(q):
    return [a for a in range(q) if math.gcd(a, q) == 1] if q > 1 else [0]


def brute_triple_cover(q, P):
    """Residues of p1*p2*p3 over primes p <= P coprime to q (repetition allowed)."""
    ps = {p % q for p in naive_primes(P) if math.gcd(p, q) == 1}
    pairs = brute_product(q, ps, ps)
    return brute_product(q, pairs, ps)


@pytest.fixture
def record_acceptance():
    def record(number, title, ok, detail=""):
        ACCEPTANCE_LINES.append((number, f"[{'PASS' if ok else 'FAIL'}] AC{number:02d} {title}" + (f" ({detail})" if detail else "")))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
