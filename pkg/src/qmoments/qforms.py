"""Primitive reduced positive-definite binary quadratic forms.

Enumerates the reduced triples (a,b,c), b^2 - 4ac = d < 0, whose |d| falls
in a block, pairing b with -b (cos is even in b, so both contribute equally
downstream).  The loop order is a outer, b inner, c innermost:

    1 <= a <= sqrt(hi/3),   0 <= b <= a,   (b^2+lo)/4a < c <= (b^2+hi)/4a,

with c clamped to c >= a, the b = -a representative dropped, and (a,c,b<0)
at a = c dropped (those are the non-reduced endpoint triples).  A triple is
weighted 2 exactly when 0 < b < a < c, i.e. when it stands for the pair
(b, -b); the exceptional shapes b = 0, b = a, c = a are unpaired.

Primitivity gcd(a,b,c) = 1 is tested as gcd(gcd(a,b), c mod gcd(a,b)) with
gcd(a,b) hoisted out of the c loop and at most one Euclidean run per residue
class of c mod gcd(a,b), cached inside the c loop.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .discriminants import NEGATIVE, Block


@dataclass(frozen=True)
class ReducedForm:
    a: int
    b: int
    c: int
    d: int
    weight: int

    def __post_init__(self):
        ok = (-self.a < self.b <= self.a < self.c) or (
            0 <= self.b <= self.a == self.c
        )
        if not ok or self.a <= 0 or self.c <= 0:
            raise ValueError(f"not reduced: ({self.a},{self.b},{self.c})")
        if self.d != self.b * self.b - 4 * self.a * self.c or self.d >= 0:
            raise ValueError("discriminant mismatch")
        paired = 0 < self.b < self.a < self.c
        if self.weight != (2 if paired else 1):
            raise ValueError("wrong pairing weight")


@dataclass
class TripleCounts:
    total: int  # |A(X)|: all reduced triples, b and -b counted separately
    primitive: int  # |A'(X)|: the gcd(a,b,c) = 1 subset
    weighted: int  # paired visits of primitive triples (about primitive/2)


@njit(cache=True)
def _gcd64(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _amax(hi):
    a = int(math.sqrt(hi / 3.0))
    while 3 * (a + 1) * (a + 1) <= hi:
        a += 1
    while a > 0 and 3 * a * a > hi:
        a -= 1
    return a


@njit(cache=True)
def _weights_per_d(lo, hi, reverse_c):
    """Visitor weights accumulated per |d|; wsum[j] covers |d| = lo+1+j.

    For fundamental d this equals the class number h(d); for any d it is
    the number of primitive reduced forms of discriminant d (with b, -b
    counted separately).
    """
    wsum = np.zeros(hi - lo, dtype=np.int64)
    amax = _amax(hi)
    gcache = np.zeros(amax + 2, dtype=np.int64)
    for a in range(1, amax + 1):
        fa = 4 * a
        for b in range(0, a + 1):
            clo = (b * b + lo) // fa + 1
            if clo < a:
                clo = a
            chi = (b * b + hi) // fa
            if chi < clo:
                continue
            g = a if b == 0 else _gcd64(a, b)
            if g > 1:
                for r in range(g):
                    gcache[r] = 0
            cstart, cstop, cstep = (clo, chi + 1, 1)
            if reverse_c:
                cstart, cstop, cstep = (chi, clo - 1, -1)
            for c in range(cstart, cstop, cstep):
                if g > 1:
                    r = c % g
                    gv = gcache[r]
                    if gv == 0:
                        gv = _gcd64(g, r)
                        gcache[r] = gv
                    if gv > 1:
                        continue
                w = 2 if (0 < b < a < c) else 1
                wsum[fa * c - b * b - lo - 1] += w
    return wsum


@njit(cache=True)
def _count_triples(x):
    total = 0
    primitive = 0
    weighted = 0
    amax = _amax(x)
    gcache = np.zeros(amax + 2, dtype=np.int64)
    for a in range(1, amax + 1):
        fa = 4 * a
        for b in range(0, a + 1):
            clo = a  # b <= a forces b^2/4a < a, so the reduction bound binds
            chi = (b * b + x) // fa
            if chi < clo:
                continue
            g = a if b == 0 else _gcd64(a, b)
            if g > 1:
                for r in range(g):
                    gcache[r] = 0
            for c in range(clo, chi + 1):
                w = 2 if (0 < b < a < c) else 1
                total += w
                if g > 1:
                    r = c % g
                    gv = gcache[r]
                    if gv == 0:
                        gv = _gcd64(g, r)
                        gcache[r] = gv
                    if gv > 1:
                        continue
                primitive += w
                weighted += 1
    return total, primitive, weighted


@njit(cache=True)
def _gcd_call_counts(lo, hi):
    """(outer gcd(a,b) calls, cached residue-class gcd calls) for one block."""
    outer = 0
    inner = 0
    amax = _amax(hi)
    gcache = np.zeros(amax + 2, dtype=np.int64)
    for a in range(1, amax + 1):
        fa = 4 * a
        for b in range(0, a + 1):
            clo = (b * b + lo) // fa + 1
            if clo < a:
                clo = a
            chi = (b * b + hi) // fa
            if chi < clo:
                continue
            g = a if b == 0 else _gcd64(a, b)
            outer += 1
            if g > 1:
                for r in range(g):
                    gcache[r] = 0
                for c in range(clo, chi + 1):
                    r = c % g
                    if gcache[r] == 0:
                        gcache[r] = _gcd64(g, r)
                        inner += 1
    return outer, inner


@njit(cache=True)
def _class_number(absd):
    h = 0
    amax = _amax(absd)
    for a in range(1, amax + 1):
        fa = 4 * a
        for b in range(absd & 1, a + 1, 2):
            num = b * b + absd
            if num % fa:
                continue
            c = num // fa
            if c < a:
                continue
            g = _gcd64(a if b == 0 else _gcd64(a, b), c)
            if g != 1:
                continue
            h += 2 if (0 < b < a < c) else 1
    return h


def iter_forms(block: Block):
    """Yield every primitive reduced form with |d| in the block, loop order
    a outer / b inner / c innermost."""
    lo, hi = block.lo, block.hi
    amax = _amax(hi)
    for a in range(1, amax + 1):
        fa = 4 * a
        for b in range(0, a + 1):
            clo = max((b * b + lo) // fa + 1, a)
            chi = (b * b + hi) // fa
            if chi < clo:
                continue
            g = a if b == 0 else math.gcd(a, b)
            gcache = {}
            for c in range(clo, chi + 1):
                if g > 1:
                    r = c % g
                    gv = gcache.get(r)
                    if gv is None:
                        gv = math.gcd(g, r)
                        gcache[r] = gv
                    if gv > 1:
                        continue
                w = 2 if 0 < b < a < c else 1
                yield ReducedForm(a, b, c, b * b - fa * c, w)


def enumerate_block(block: Block, visitor) -> None:
    """Invoke visitor(form) once per primitive reduced form in the block."""
    if block.sign != NEGATIVE:
        raise ValueError("forms exist for negative discriminants only")
    for form in iter_forms(block):
        visitor(form)


def weights_per_discriminant(block: Block, reverse_c: bool = False) -> np.ndarray:
    """Summed visitor weights indexed by |d| - lo - 1 (fused kernel)."""
    if block.sign != NEGATIVE:
        raise ValueError("forms exist for negative discriminants only")
    return _weights_per_d(block.lo, block.hi, reverse_c)


def class_number(d: int) -> int:
    """h(d): reduced primitive forms of discriminant d, weights summed."""
    from .discriminants import is_fundamental

    if d >= 0:
        raise ValueError("class numbers here require d < 0")
    if not is_fundamental(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    return int(_class_number(-d))


def count_triples(X: int) -> TripleCounts:
    """Exact |A(X)|, |A'(X)| and the paired visit count, by enumeration."""
    if X < 4:
        raise ValueError("no triples below X = 4")
    total, primitive, weighted = _count_triples(X)
    return TripleCounts(int(total), int(primitive), int(weighted))


def gcd_call_counts(block: Block):
    """Euclidean-call counters for one block (cost-model instrumentation)."""
    outer, inner = _gcd_call_counts(block.lo, block.hi)
    return int(outer), int(inner)
