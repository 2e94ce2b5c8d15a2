import math
import random

import gmpy2
import numpy as np
import pytest

from qmoments import lpos
from qmoments.discriminants import POSITIVE, Block, sieve_block
from qmoments.specfun import g_table


def test_kronecker_trivial_cases():
    for d in (-1000, -23, -1, 2, 5, 999):
        assert lpos.kronecker(d, 1) == 1
    assert lpos.kronecker(5, 5) == 0
    assert lpos.kronecker(-23, 2) == 1  # -23 = 1 mod 8
    with pytest.raises(ValueError):
        lpos.kronecker(3, 0)


def test_kronecker_euler_criterion():
    # (d|p) = d^((p-1)/2) mod p for odd primes p
    rng = random.Random(11)
    for p in (3, 5, 7, 11, 13, 101, 997):
        for _ in range(40):
            d = rng.randrange(-10**6, 10**6)
            e = pow(d % p, (p - 1) // 2, p)
            want = 0 if e == 0 else (1 if e == 1 else -1)
            assert lpos.kronecker(d, p) == want, (d, p)


def test_kronecker_full_table_d_minus_23():
    want = {n: gmpy2.kronecker(-23, n) for n in range(1, 11)}
    got = {n: lpos.kronecker(-23, n) for n in range(1, 11)}
    assert got == want


def test_kronecker_multiplicative_and_vs_gmpy2():
    rng = random.Random(23)
    for _ in range(400):
        d = rng.randrange(-10**9, 10**9)
        m = rng.randrange(1, 5000)
        n = rng.randrange(1, 5000)
        assert lpos.kronecker(d, m) == gmpy2.kronecker(d, m)
        assert lpos.kronecker(d, m * n) == lpos.kronecker(d, m) * lpos.kronecker(d, n)


def test_char_table_periods_and_lookup():
    assert lpos.build_char_table(1).period == 1
    assert lpos.build_char_table(1).values.tolist() == [1]
    t2 = lpos.build_char_table(2)
    assert t2.period == 16  # odd 2-valuation -> 8n
    t4 = lpos.build_char_table(4)
    assert t4.period == 4  # even valuation -> n
    t9 = lpos.build_char_table(9)
    assert t9.period == 9
    # chi_d(9) = chi_d(3)^2 in {0, 1}
    for d in range(200):
        v = t9.lookup(d)
        assert v == lpos.kronecker(d, 3) ** 2
        assert v in (0, 1)
    # table lookups match direct evaluation on random fundamental d
    blk = Block(10**6, 10**6 + 10**4, POSITIVE)
    ds = sieve_block(blk).discriminants()
    rng = random.Random(5)
    for n in (2, 3, 12, 100, 255):
        tab = lpos.build_char_table(n, blk)
        for d in rng.sample(list(ds), 100):
            assert tab.lookup(int(d)) == lpos.kronecker(int(d), n)


def test_small_values_against_slow_oracle():
    res = lpos.lvalues_pos_block(Block(0, 64, POSITIVE))
    for want_d in (5, 8):
        got = res.L[res.d == want_d][0]
        ref = lpos.oracle_afe_pos(want_d, digits=30)
        assert abs(got - float(ref)) < 1e-12
        slow = lpos.oracle_afe_pos(want_d, digits=40)
        assert abs(got - float(slow)) < 1e-12


def test_block_against_dd_oracle():
    blk = Block(0, 20_000, POSITIVE)
    res = lpos.lvalues_pos_block(blk)
    want = lpos.oracle_pos_batch(res.d, digits=25)
    assert np.max(np.abs(res.L - want)) < 1e-10


def test_large_block_against_dd_oracle():
    blk = Block(10**6 - 2000, 10**6, POSITIVE)
    res = lpos.lvalues_pos_block(blk)
    want = lpos.oracle_pos_batch(res.d, digits=25)
    assert np.max(np.abs(res.L - want)) < 1e-10


def test_term_bound_f_below_two_over_sqrt_t():
    # f(t) = 2 (pi/d)^(1/4) G(1/4, pi t^2/d) / Gamma(1/4) < 2 t^(-1/2)
    tab = g_table()
    from qmoments.specfun import g_fast

    for d in (5, 1009, 99_997):
        for t in (1, 2, 5, 17, 120):
            w = math.pi * t * t / d
            if w > 37:
                continue
            f = 2 * (math.pi / d) ** 0.25 * g_fast(w, tab) / lpos.GAMMA_QUARTER
            assert f < 2 / math.sqrt(t)


def test_truncation_stability_doubling_N():
    # N -> 2N corresponds to digits -> 4*digits; terms past the exp(-37)
    # cutoff are exactly zero so the values move by < 1e-12
    blk = Block(5_000, 9_000, POSITIVE)
    a = lvalues = lpos.lvalues_pos_block(blk, digits=16)
    b = lpos.lvalues_pos_block(blk, digits=64)
    assert np.max(np.abs(a.L - b.L)) < 1e-12


def _pos_block_reference_d_outer(block, digits):
    """d outer / n inner, ascending n per record; must match the production
    n-outer loop bit for bit."""
    from qmoments.specfun import _INV_POCH, _g_eval

    tab = g_table()
    flags = sieve_block(block).flags
    nmax = int(math.ceil(math.sqrt(block.hi / math.pi * lpos.LN10 * digits)))
    out_d, out_L = [], []
    for j in np.nonzero(flags)[0]:
        d = block.lo + 1 + int(j)
        acc = 0.0
        for n in range(1, nmax + 1):
            dmin = int(math.ceil(math.pi * n * n / (lpos.LN10 * digits)))
            if d < dmin:
                continue
            chi = lpos.kronecker(d, n)
            if chi == 0:
                continue
            g = float(_g_eval(math.pi * n * n / d, tab.x0, tab.step, tab.coeffs, _INV_POCH))
            acc = acc + g if chi == 1 else acc - g
        out_d.append(d)
        out_L.append(2.0 * (math.pi / d) ** 0.25 / lpos.GAMMA_QUARTER * acc)
    return np.array(out_d), np.array(out_L)


def test_loop_order_equivalence_bit_exact():
    blk = Block(300, 700, POSITIVE)
    res = lpos.lvalues_pos_block(blk, digits=16)
    ref_d, ref_L = _pos_block_reference_d_outer(blk, 16)
    assert np.array_equal(res.d, ref_d)
    assert np.array_equal(res.L, ref_L)  # identical floats, not just close


def test_partial_sums_stay_small():
    rng = random.Random(31)
    ds = []
    blk = Block(0, 10**4, POSITIVE)
    ds += [int(d) for d in sieve_block(blk).discriminants()[::97]]
    big = Block(10**6 - 10**4, 10**6, POSITIVE)
    ds += [int(d) for d in rng.sample(list(sieve_block(big).discriminants()), 40)]
    worst = max(lpos.max_partial_sum(d) for d in ds)
    assert worst < 50


def test_tail_estimate_behaviour():
    d = 10**6
    n_rule = math.ceil(math.sqrt(d / math.pi * lpos.LN10 * 16))
    at_rule = lpos.tail_estimate(d, n_rule)
    assert at_rule < 1e-14  # the tail is no bigger than a term's scale
    assert lpos.tail_estimate(d, 2 * n_rule) < 1e-40
    # N = sqrt(d) is badly under-truncated and the estimate must flag it
    assert lpos.tail_estimate(d, math.isqrt(d)) > 1e-4
    with pytest.raises(ValueError):
        lpos.tail_estimate(d, 0)
