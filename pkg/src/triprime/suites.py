"""Seeded property sweeps over the lemmas, shared by the CLI and the test-suite."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .arith import F0_CONSTANT, euler_phi, f0_table, phi_table, prime_divisors, unit_group
from .characters import nonprincipal_real_characters, prefix_sums
from .reports import FLOAT_SLACK, BoundReport
from .sieve import DUSART_THRESHOLD, check_brun_titchmarsh, prime_array
from .sumsets import ClassSet, CyclicGroup, kneser_check

# q <= 30 with phi(q) <= 8 as published; 14, 16 and 18 are missing from it
PUBLISHED_PHI_EXCEPTIONS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20, 24, 30)


@dataclass
class SuiteResult:
    name: str
    cases: int
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def report(self) -> BoundReport:
        return BoundReport.compare(
            f"{self.name}: violations", len(self.failures), "==", 0,
            cases=self.cases, first_failures=self.failures[:5], **self.stats,
        )

    def as_dict(self) -> dict:
        return {"suite": self.name, "cases": self.cases, "failures": len(self.failures),
                "bound_checks": [self.report().as_dict()]}


def f0_suite(limit: int = 10**6) -> SuiteResult:
    q = np.arange(limit + 1, dtype=np.float64)
    vals = f0_table(limit)
    ok = vals[2:] <= F0_CONSTANT * np.sqrt(q[2:]) - FLOAT_SLACK
    bad = (np.flatnonzero(~ok) + 2).tolist()
    ratio = vals[2:] / np.sqrt(q[2:])
    worst = int(np.argmax(ratio)) + 2
    return SuiteResult("f0(q) <= 3.32 sqrt(q)", limit - 1, bad,
                       {"worst_q": worst, "worst_ratio": float(ratio[worst - 2])})


def phi_suite(limit: int = 10**4) -> SuiteResult:
    phi = phi_table(limit)
    small = [int(n) for n in range(1, min(limit, 30) + 1) if phi[n] <= 8]
    bad = [int(n) for n in np.flatnonzero(phi[31:] <= 8) + 31]
    unlisted = sorted(set(small) - set(PUBLISHED_PHI_EXCEPTIONS))
    return SuiteResult("phi(q) > 8 for q >= 31", limit, bad,
                       {"exceptions": small, "unlisted_exceptions": unlisted})


def boundchi_suite(q_max: int = 300) -> SuiteResult:
    """Every subinterval of [1, q] for every non-principal real character mod q <= q_max."""
    cases, bad = 0, []
    for q in range(3, q_max + 1):
        phi = euler_phi(q)
        for chi in nonprincipal_real_characters(q):
            S = prefix_sums(chi)
            # sum over lo..hi is S[hi] - S[lo-1] for 0 <= lo-1 < hi <= q
            hi, before = np.tril_indices(q + 1, k=-1)
            sub = S[hi] - S[before]
            cases += len(sub)
            worst = int(np.abs(sub).max())
            if 2 * worst > phi:
                bad.append((q, chi.cid, worst))
    return SuiteResult("|sum_{n in I} chi(n)| <= phi(q)/2", cases, bad)


def bt_suite(samples: int = 10**4, seed: int = 0, x_max: int = 10**6, y_max: int = 10**6) -> SuiteResult:
    rng = random.Random(seed)
    prime_array(x_max + y_max)
    bad = []
    worst = 0.0
    for _ in range(samples):
        x = rng.randint(2, x_max)
        q = min(x - 1, max(1, int(math.exp(rng.uniform(0, math.log(x))))))
        y = rng.randint(0, y_max)
        a = rng.randrange(q) if q > 1 else 0
        while math.gcd(a, q) != 1:
            a = rng.randrange(q)
        r = check_brun_titchmarsh(y, x, q, a)
        worst = max(worst, r.computed / r.bound)
        if not r.satisfied:
            bad.append((y, x, q, a))
    return SuiteResult("Brun-Titchmarsh", samples, bad, {"max_count_over_bound": worst})


def dusart_suite(x_max: int = 10**6, samples: int = 1000, sample_max: int = 10**8,
                 seed: int = 0, moduli=(2, 6, 30, 210)) -> SuiteResult:
    rng = random.Random(seed)
    primes = prime_array(max(x_max, sample_max))
    grid = np.arange(DUSART_THRESHOLD, x_max + 1, dtype=np.int64)
    sampled = np.array(sorted(rng.uniform(DUSART_THRESHOLD, sample_max) for _ in range(samples)))
    xs = np.concatenate([grid.astype(np.float64), sampled])
    pi = np.searchsorted(primes, np.floor(xs).astype(np.int64), side="right")
    logs = np.log(xs)
    bad = [("pi", float(x)) for x in xs[pi < xs / (logs - 1) + FLOAT_SLACK]]
    for q in moduli:
        small = sum(1 for p in prime_divisors(q) if p <= DUSART_THRESHOLD)
        pi_q = pi - small
        bad += [(f"pi_{q}", float(x)) for x in xs[pi_q < xs / logs + FLOAT_SLACK]]
    return SuiteResult("Dusart lower bounds", len(xs) * (1 + len(moduli)), bad)


def _random_subset(rng: random.Random, n: int) -> list[int]:
    k = rng.randint(1, n)
    return rng.sample(range(n), k)


def kneser_suite(samples: int = 10**4, seed: int = 0, max_mod: int = 60) -> SuiteResult:
    rng = random.Random(seed)
    bad = []
    for i in range(samples):
        if i % 2:
            G = unit_group(rng.randint(1, max_mod))
        else:
            G = CyclicGroup(rng.randint(1, max_mod))
        A = ClassSet.from_indices(G, _random_subset(rng, G.order))
        B = ClassSet.from_indices(G, _random_subset(rng, G.order))
        r = kneser_check(A, B)
        if not r.satisfied:
            bad.append((G.key, A.residues(), B.residues()))
    return SuiteResult("Kneser", samples, bad)


SUITES = {
    "f0": f0_suite,
    "phi": phi_suite,
    "boundchi": boundchi_suite,
    "bt": bt_suite,
    "dusart": dusart_suite,
    "kneser": kneser_suite,
}
