import math
import random

import numpy as np
import pytest

from qmoments.discriminants import (
    NEGATIVE,
    POSITIVE,
    Block,
    blocks,
    fundamental_count_brute,
    is_fundamental,
    sieve_block,
    sieve_op_count,
    squarefree_flags,
)


def flagged(block):
    ff = sieve_block(block)
    return sorted(int(v) for v in np.nonzero(ff.flags)[0] + block.lo + 1)


def test_first_block_negative():
    # -3 = 1 mod 4 squarefree; -4 = 4*(-1), -1 = 3 mod 4; -7 = 1 mod 4;
    # -8 = 4*(-2), -2 = 2 mod 4.
    assert flagged(Block(0, 8, NEGATIVE)) == [3, 4, 7, 8]


def test_first_block_positive():
    # 5 = 1 mod 4 squarefree; 8 = 4*2, 2 = 2 mod 4; d = 1 excluded.
    assert flagged(Block(0, 8, POSITIVE)) == [5, 8]


def test_is_fundamental_examples():
    assert not is_fundamental(1)
    assert is_fundamental(-23)
    assert is_fundamental(12)  # 12 = 4*3, 3 = 3 mod 4
    assert not is_fundamental(9)  # square
    with pytest.raises(ValueError):
        is_fundamental(0)


def test_sieve_matches_reference_pointwise():
    rng = random.Random(1810)
    cases = [Block(0, 512, NEGATIVE), Block(0, 512, POSITIVE)]
    for _ in range(12):
        lo = rng.randrange(0, 2_000_000)
        n = rng.randrange(16, 700)
        cases.append(Block(lo, lo + n, rng.choice([NEGATIVE, POSITIVE])))
    for blk in cases:
        ff = sieve_block(blk)
        for j, v in enumerate(range(blk.lo + 1, blk.hi + 1)):
            assert ff.flags[j] == is_fundamental(blk.sign * v), (blk, v)


def test_density_one_million():
    # Frozen from fundamental_count_brute(10**6, -1); the density of
    # fundamental discriminants per sign tends to 3/pi^2.
    expected_neg = 303968
    n = sum(sieve_block(b).count() for b in blocks(10**6, 10**5, NEGATIVE))
    assert n == expected_neg
    assert abs(n / (3 / math.pi**2 * 10**6) - 1) < 0.002


def test_brute_force_count_small_agrees_with_sieve():
    for sign in (NEGATIVE, POSITIVE):
        brute = fundamental_count_brute(3000, sign)
        sieved = sum(sieve_block(b).count() for b in blocks(3000, 1500, sign))
        assert brute == sieved


def test_divisible_by_16_or_9_never_fundamental():
    for blk in (Block(0, 4000, NEGATIVE), Block(10**7, 10**7 + 4000, POSITIVE)):
        ff = sieve_block(blk)
        v = blk.discriminants()
        assert not ff.flags[(v % 16 == 0)].any()
        assert not ff.flags[(v % 9 == 0)].any()


def test_blocks_tile_without_overlap():
    bs = blocks(10**6, 10**5, NEGATIVE)
    assert bs[0].lo == 0 and bs[-1].hi == 10**6
    for left, right in zip(bs, bs[1:]):
        assert left.hi == right.lo
        assert len(left) == 10**5


def test_sieve_cost_linear_in_block_size():
    # Summed mark counts across blocks up to X stay proportional to X.
    per_x = []
    for x in (10**5, 10**6):
        ops = sum(sieve_op_count(b.lo, b.hi) for b in blocks(x, 10**4, NEGATIVE))
        per_x.append(ops / x)
    assert per_x[1] / per_x[0] < 1.5


def test_squarefree_flags_block_boundaries():
    full = squarefree_flags(0, 10_000)
    split = np.concatenate([squarefree_flags(i, i + 1000) for i in range(0, 10_000, 1000)])
    assert np.array_equal(full, split)


def test_block_validation():
    with pytest.raises(ValueError):
        Block(5, 5, NEGATIVE)
    with pytest.raises(ValueError):
        Block(0, 10, 2)
    with pytest.raises(ValueError):
        blocks(10**6, 3**5, NEGATIVE)
