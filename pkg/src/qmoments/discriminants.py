"""Block-wise sieve for fundamental discriminants.

A fundamental discriminant d is either d = 1 mod 4 and squarefree, or
d = 4m with m = 2,3 mod 4 and m squarefree (d = 0, 1 excluded).  The sieve
marks, for every |d| in a block (lo, hi], whether d of the requested sign
is fundamental.  Cost is O(hi - lo) per block because sum(1/k^2) converges.
"""

import math
from dataclasses import dataclass

import numpy as np

NEGATIVE = -1
POSITIVE = 1


@dataclass(frozen=True)
class Block:
    """Half-open range of |d| values (lo, hi] with a sign attached."""

    lo: int
    hi: int
    sign: int

    def __post_init__(self):
        if not 0 <= self.lo < self.hi:
            raise ValueError(f"need 0 <= lo < hi, got ({self.lo}, {self.hi}]")
        if self.sign not in (NEGATIVE, POSITIVE):
            raise ValueError("sign must be +1 or -1")

    def __len__(self):
        return self.hi - self.lo

    def discriminants(self):
        """All |d| in the block, ascending."""
        return np.arange(self.lo + 1, self.hi + 1, dtype=np.int64)


@dataclass
class FundamentalFlags:
    """Bit table: flags[j] is True iff sign*(lo+1+j) is fundamental."""

    block: Block
    flags: np.ndarray

    def count(self) -> int:
        return int(np.count_nonzero(self.flags))

    def discriminants(self) -> np.ndarray:
        """The fundamental d in the block (signed), increasing |d|."""
        absd = self.block.lo + 1 + np.nonzero(self.flags)[0].astype(np.int64)
        return self.block.sign * absd

    def tobytes(self) -> bytes:
        """0/1 byte stream, for diffing in test harnesses."""
        return self.flags.astype(np.uint8).tobytes()


def squarefree_flags(lo: int, hi: int) -> np.ndarray:
    """Squarefree marks for the integers lo+1 .. hi.

    Sieves by k^2 for every k >= 2 (composite k are redundant but harmless;
    the work is sum over k of (hi-lo)/k^2 = O(hi-lo)).
    """
    n = hi - lo
    flags = np.ones(n, dtype=bool)
    k = 2
    while k * k <= hi:
        k2 = k * k
        start = (lo // k2 + 1) * k2  # first multiple of k2 above lo
        flags[start - lo - 1 :: k2] = False
        k += 1
    return flags


def sieve_block(block: Block) -> FundamentalFlags:
    """Mark the fundamental discriminants of the block's sign in (lo, hi]."""
    lo, hi = block.lo, block.hi
    out = np.zeros(hi - lo, dtype=bool)

    # Family d = 1 mod 4, d squarefree.  For d < 0 this means |d| = 3 mod 4.
    sf = squarefree_flags(lo, hi)
    v = np.arange(lo + 1, hi + 1)
    res = 1 if block.sign == POSITIVE else 3
    mask = (v & 3) == res
    out[mask] = sf[mask]
    if block.sign == POSITIVE and lo < 1 <= hi:
        out[1 - lo - 1] = False  # d = 1 is excluded

    # Family d = 4m, m = 2,3 mod 4 squarefree.  With m = sign*|m|, for
    # d < 0 the condition becomes |m| = 1,2 mod 4.
    mlo, mhi = lo // 4, hi // 4
    if mhi > mlo:
        sfm = squarefree_flags(mlo, mhi)
        m = np.arange(mlo + 1, mhi + 1)
        r = m & 3
        if block.sign == POSITIVE:
            ok = (r == 2) | (r == 3)
        else:
            ok = (r == 1) | (r == 2)
        ok &= sfm
        out[4 * m - lo - 1] = ok
    return FundamentalFlags(block, out)


def _is_squarefree(n: int) -> bool:
    if n % 4 == 0 or n % 9 == 0:
        return False
    if n % (25) == 0 or n % 49 == 0:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1 if k == 2 else 2  # 2, 3, 5, 7, ... odd steps suffice
    return True


def is_fundamental(d: int) -> bool:
    """Trial-division reference test; the sieve's oracle in the test suite."""
    if d == 0:
        raise ValueError("d = 0 has no attached quadratic field")
    if d == 1:
        return False
    if d % 4 == 1:
        return _is_squarefree(abs(d))
    if d % 4 == 0:
        m = d // 4
        if m % 4 in (2, 3):
            return _is_squarefree(abs(m))
    return False


def blocks(x_max: int, block_len: int, sign: int):
    """Tile (0, x_max] with blocks of equal length."""
    if x_max % block_len != 0:
        raise ValueError("block length must divide x_max")
    return [
        Block(i * block_len, (i + 1) * block_len, sign)
        for i in range(x_max // block_len)
    ]


def sieve_op_count(lo: int, hi: int) -> int:
    """Number of sieve marks for a block; proxy for the O(hi-lo) cost bound."""
    ops = 0
    k = 2
    while k * k <= hi:
        k2 = k * k
        start = (lo // k2 + 1) * k2
        if start <= hi:
            ops += (hi - start) // k2 + 1
        k += 1
    mlo, mhi = lo // 4, hi // 4
    k = 2
    while k * k <= mhi:
        k2 = k * k
        start = (mlo // k2 + 1) * k2
        if start <= mhi:
            ops += (mhi - start) // k2 + 1
        k += 1
    return ops


def fundamental_count_brute(x_max: int, sign: int) -> int:
    """Per-integer reference count of fundamental d with 0 < sign*d <= x_max."""
    return sum(1 for v in range(2, x_max + 1) if is_fundamental(sign * v))
