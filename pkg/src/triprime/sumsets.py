"""Product sets in finite abelian groups: class sets, stabilizers, Kneser's bound.

A group here is anything exposing ``key``, ``order``, ``identity``,
``translation(i)``, ``inverse_index(i)`` and ``labels(indices)``; in practice
:class:`triprime.arith.UnitGroup` and the additive :class:`CyclicGroup` used
in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import HypothesisFailure, ModulusMismatchError, PreconditionError, TheoremViolation
from .reports import BoundReport

DENSITY_THRESHOLD = Fraction(13, 32)
PRODUCT_DENSITY_TARGET = Fraction(7, 10)


class CyclicGroup:
    """Z/nZ under addition, element ``i`` stored at index ``i``."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("cyclic group order must be positive")
        self.n = n
        self.key = ("cyclic", n)
        self.order = n
        self.identity = 0
        self._arange = np.arange(n, dtype=np.int64)

    def __repr__(self):
        return f"CyclicGroup({self.n})"

    def index(self, x: int) -> int:
        return x % self.n

    def translation(self, i: int) -> np.ndarray:
        return (self._arange + i) % self.n

    def mul_index(self, i: int, j: int) -> int:
        return (i + j) % self.n

    def inverse_index(self, i: int) -> int:
        return (-i) % self.n

    def labels(self, indices) -> list[int]:
        return [int(i) for i in indices]


def _modulus(group) -> int:
    return group.key[1]


class ClassSet:
    """Immutable subset of a finite abelian group, stored as a boolean vector over element indices."""

    __slots__ = ("group", "bits")

    def __init__(self, group, bits):
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (group.order,):
            raise ValueError(f"bit vector of shape {bits.shape} for a group of order {group.order}")
        if bits.flags.writeable:
            bits = bits.copy()
            bits.setflags(write=False)
        self.group = group
        self.bits = bits

    @classmethod
    def from_residues(cls, group, residues) -> "ClassSet":
        bits = np.zeros(group.order, dtype=bool)
        for r in residues:
            bits[group.index(int(r))] = True
        return cls(group, bits)

    @classmethod
    def from_indices(cls, group, indices) -> "ClassSet":
        bits = np.zeros(group.order, dtype=bool)
        bits[np.asarray(list(indices), dtype=np.int64)] = True
        return cls(group, bits)

    @classmethod
    def full(cls, group) -> "ClassSet":
        return cls(group, np.ones(group.order, dtype=bool))

    @classmethod
    def empty(cls, group) -> "ClassSet":
        return cls(group, np.zeros(group.order, dtype=bool))

    @property
    def modulus(self) -> int:
        return _modulus(self.group)

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def residues(self) -> list[int]:
        return self.group.labels(self.indices)

    def __len__(self) -> int:
        return int(np.count_nonzero(self.bits))

    cardinality = property(__len__)

    def __contains__(self, residue: int) -> bool:
        try:
            i = self.group.index(int(residue))
        except ValueError:
            return False
        return bool(self.bits[i])

    def __iter__(self):
        return iter(self.residues())

    def _check(self, other: "ClassSet") -> None:
        if self.group.key != other.group.key:
            raise ModulusMismatchError(f"{self.group.key} vs {other.group.key}")

    def __eq__(self, other):
        if not isinstance(other, ClassSet):
            return NotImplemented
        return self.group.key == other.group.key and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.group.key, self.bits.tobytes()))

    def __or__(self, other):
        self._check(other)
        return ClassSet(self.group, self.bits | other.bits)

    def __and__(self, other):
        self._check(other)
        return ClassSet(self.group, self.bits & other.bits)

    def __sub__(self, other):
        self._check(other)
        return ClassSet(self.group, self.bits & ~other.bits)

    def complement(self) -> "ClassSet":
        return ClassSet(self.group, ~self.bits)

    def issubset(self, other: "ClassSet") -> bool:
        self._check(other)
        return not np.any(self.bits & ~other.bits)

    def is_full(self) -> bool:
        return bool(self.bits.all())

    def translate(self, i: int) -> "ClassSet":
        """The translate ``g_i * S`` where ``g_i`` is the element with index ``i``."""
        return ClassSet(self.group, translate_bits(self.group, self.bits, i))

    def inverse(self) -> "ClassSet":
        inv = [self.group.inverse_index(int(i)) for i in self.indices]
        return ClassSet.from_indices(self.group, inv)

    def __repr__(self):
        shown = self.residues()
        if len(shown) > 12:
            shown = shown[:12] + ["..."]
        return f"ClassSet({self.group.key[0]} {self.modulus}: {shown})"


def translate_bits(group, bits: np.ndarray, i: int) -> np.ndarray:
    # (g_i S)[j] = S[g_i^{-1} g_j]
    return bits[group.translation(group.inverse_index(i))]


def product_set(A: ClassSet, B: ClassSet) -> ClassSet:
    """{ab : a in A, b in B}, as a union of translates of the larger set."""
    A._check(B)
    if len(A) > len(B):
        A, B = B, A
    out = np.zeros(A.group.order, dtype=bool)
    for i in A.indices.tolist():
        out |= translate_bits(A.group, B.bits, i)
    return ClassSet(A.group, out)


@dataclass(frozen=True)
class Subgroup:
    elements: ClassSet
    index: int

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def modulus(self) -> int:
        return self.elements.modulus

    def cosets_met(self, S: ClassSet) -> int:
        """Number of cosets of this subgroup that meet ``S``."""
        return len(product_set(S, self.elements)) // self.order


def is_subgroup(S: ClassSet) -> bool:
    G = S.group
    if not S.bits[G.identity]:
        return False
    if product_set(S, S) != S:
        return False
    return S.inverse() == S


def stabilizer(S: ClassSet) -> Subgroup:
    """H = {h : hS = S}. Candidates are restricted to S * s0^-1 for one s0 in S."""
    if len(S) == 0:
        raise ValueError("stabilizer of the empty set is not considered")
    G = S.group
    s0_inv = G.inverse_index(int(S.indices[0]))
    keep = []
    for x in S.indices.tolist():
        h = G.mul_index(x, s0_inv)
        if np.array_equal(translate_bits(G, S.bits, h), S.bits):
            keep.append(h)
    H = ClassSet.from_indices(G, keep)
    if not is_subgroup(H):
        raise TheoremViolation(f"stabilizer computed for {S!r} is not a subgroup")
    if G.order % len(H):
        raise TheoremViolation("stabilizer order does not divide the group order")
    return Subgroup(H, G.order // len(H))


def generated_subgroup(A: ClassSet) -> ClassSet:
    G = A.group
    cur = A | ClassSet.from_indices(G, [G.identity])
    while True:
        nxt = product_set(cur, cur)
        if nxt == cur:
            return cur
        cur = nxt


def generates(A: ClassSet) -> bool:
    return generated_subgroup(A).is_full()


def kneser_check(A: ClassSet, B: ClassSet) -> BoundReport:
    if len(A) == 0 or len(B) == 0:
        raise ValueError("Kneser's inequality needs non-empty sets")
    AB = product_set(A, B)
    H = stabilizer(AB)
    AH = product_set(A, H.elements)
    BH = product_set(B, H.elements)
    rhs = len(AH) + len(BH) - H.order
    return BoundReport.compare(
        "|AB| >= |AH| + |BH| - |H|", len(AB), ">=", rhs,
        modulus=A.modulus, H_order=H.order, AH=len(AH), BH=len(BH),
    )


def index_case_fraction(index: int, density: Fraction) -> tuple[Fraction, str]:
    """Guaranteed lower bound for |AA|/|G| when the stabilizer of AA has the given index.

    ``density`` is |A|/|G| and must be at least 13/32. Indices 1 to 3 force
    AA = G (index 2 only under the extra kernel hypothesis, checked by the
    caller). Index 4 gives 3/4 from two covered cosets. From index 5 on,
    Kneser gives (2*ceil(Y*density) - 1)/Y.
    """
    density = Fraction(density)
    if density < DENSITY_THRESHOLD:
        raise PreconditionError(f"density {density} is below 13/32")
    Y = int(index)
    if Y < 1:
        raise ValueError("index must be positive")
    if Y <= 3:
        return Fraction(1), f"index {Y}"
    if Y == 4:
        return Fraction(3, 4), "index 4"
    cosets = math.ceil(Y * density)
    frac = min(Fraction(1), Fraction(2 * cosets - 1, Y))
    if frac < PRODUCT_DENSITY_TARGET:
        raise TheoremViolation(f"index {Y} with density {density} gives only {frac}")
    return frac, "index >= 5"


def case_analysis_lower_bound(A: ClassSet) -> tuple[Fraction, str]:
    """Lower bound on |AA|/|G| reproduced from the stabilizer-index case split.

    Requires |A| >= 13/32 |G| and that A generates G. When the stabilizer of
    AA has index 2, AA must meet both cosets of the stabilizer; this is
    checked on the data and :class:`HypothesisFailure` is raised otherwise.
    """
    G = A.group
    density = Fraction(len(A), G.order)
    if density < DENSITY_THRESHOLD:
        raise PreconditionError(f"|A|/|G| = {density} < 13/32")
    if not generates(A):
        raise PreconditionError("A does not generate the group")
    AA = product_set(A, A)
    H = stabilizer(AA)
    if H.index == 2:
        in_kernel = bool(np.any(AA.bits & H.elements.bits))
        off_kernel = bool(np.any(AA.bits & ~H.elements.bits))
        if not (in_kernel and off_kernel):
            raise HypothesisFailure(
                "stabilizer of AA has index 2 but AA misses a coset of the kernel"
            )
    return index_case_fraction(H.index, density)
