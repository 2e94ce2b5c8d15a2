import math
import random

import mpmath as mp
import numpy as np
import pytest

from qmoments import lneg
from qmoments.discriminants import NEGATIVE, POSITIVE, Block, sieve_block
from qmoments.qforms import ReducedForm, class_number, iter_forms


@pytest.fixture(scope="module")
def first_block():
    return lneg.lvalues_neg_block(Block(0, 4000, NEGATIVE))


def test_smallest_values_match_oracle(first_block):
    res = first_block
    assert res.d[0] == -3 and res.d[1] == -4
    for i, d in ((0, -3), (1, -4)):
        ref = lneg.oracle_afe_neg(d, digits=25)
        assert abs(res.L[i] - ref) < 1e-12
        assert res.L[i] > 0
    slow = lneg.oracle_afe_neg(-3, digits=45)
    assert abs(res.L[0] - float(slow)) < 1e-12


def test_block_values_positive_and_finite(first_block):
    assert np.isfinite(first_block.L).all()
    assert (first_block.L >= 0).all()  # nonnegative in all observed data


def test_epstein_z_half_for_principal_form():
    # d = -4, form (1,0,1): all cosines are 1
    zref = lneg.epstein_z_half_reference(1, 0, 1, dps=35)
    zfast = lneg.form_contribution(ReducedForm(1, 0, 1, -4, 1))
    assert abs(zfast - float(zref)) < 1e-13
    # and the closed leading term dominates: check the manual formula
    manual = 2 * (lneg.EULER_GAMMA + math.log(2.0 / (8 * math.pi)))
    assert abs(zfast - manual) < 0.02  # K-Bessel tail is small but present


def test_form_contribution_large_d_leading_term_only():
    # |d| = 10^4, a = 1: the K argument pi*sqrt(|d|) > 37, so Z(1/2) equals
    # the closed leading term to 1e-15
    form = ReducedForm(1, 0, 2500, -10**4, 1)
    want = 2 * (lneg.EULER_GAMMA + math.log(math.sqrt(10**4) / (8 * math.pi)))
    assert abs(lneg.form_contribution(form) - want) < 1e-15


def test_weights_reproduce_class_numbers(first_block):
    # replacing Z(1/2) by 1 per form must reproduce h(d)
    blk = Block(0, 4000, NEGATIVE)
    acc = {}
    for f in iter_forms(blk):
        acc[f.d] = acc.get(f.d, 0) + f.weight
    flags = sieve_block(blk)
    for d in flags.discriminants()[::17]:
        assert acc[int(d)] == class_number(int(d))


def test_cross_method_small_range(first_block):
    res = first_block
    want = lneg.oracle_neg_batch(res.d, digits=25)
    assert np.max(np.abs(res.L - want)) < 1e-10


def test_cross_method_large_block():
    blk = Block(10**6 - 2000, 10**6, NEGATIVE)
    res = lneg.lvalues_neg_block(blk)
    assert np.isfinite(res.L).all()
    want = lneg.oracle_neg_batch(res.d, digits=25)
    assert np.max(np.abs(res.L - want)) < 1e-10


def test_oracle_truncation_stability():
    # doubling the truncation point changes nothing at working precision
    with mp.workdps(40):
        for d in (-3, -23, -9999 - 4):  # -10003 = 1 mod 4, squarefree
            base = lneg.oracle_afe_neg(d, digits=25)
            slow = lneg.oracle_afe_neg(d, digits=32)  # longer sum, more digits
            assert abs(base - float(slow)) < 1e-18 * max(1.0, abs(base)) + 1e-20


def test_oracle_rejects_bad_d():
    with pytest.raises(ValueError):
        lneg.oracle_afe_neg(5)
    with pytest.raises(ValueError):
        lneg.oracle_afe_neg(-9)  # not fundamental
    with pytest.raises(ValueError):
        lneg.lvalues_neg_block(Block(0, 10, POSITIVE))


def test_character_vanishes_on_common_factor():
    # chi_d(n) = 0 whenever gcd(n, d) > 1: those oracle terms contribute 0
    from qmoments.lpos import kronecker

    d = -23
    for n in (23, 46, 23 * 5):
        assert kronecker(d, n) == 0


def test_order_independence_a_vs_c_sorted():
    blk = Block(2000, 3000, NEGATIVE)
    forms = list(iter_forms(blk))
    by_a = {}
    for f in forms:  # generation order: a outer
        by_a[f.d] = by_a.get(f.d, 0.0) + lneg.form_contribution(f)
    by_c = {}
    for f in sorted(forms, key=lambda f: (f.c, f.a, abs(f.b))):
        by_c[f.d] = by_c.get(f.d, 0.0) + lneg.form_contribution(f)
    worst = max(abs(by_a[d] - by_c[d]) for d in by_a)
    assert worst < 1e-12


def test_block_kernel_matches_per_form_sum():
    blk = Block(500, 900, NEGATIVE)
    res = lneg.lvalues_neg_block(blk)
    acc = {}
    logd = {}
    for f in iter_forms(blk):
        absd = -f.d
        logd.setdefault(absd, math.log(float(blk.lo + 1 + (absd - blk.lo - 1))))
        acc[f.d] = acc.get(f.d, 0.0) + lneg.form_contribution(f, logd[absd])
    for d, L in zip(res.d, res.L):
        omega = 6.0 if d == -3 else (4.0 if d == -4 else 2.0)
        want = acc[int(d)] / (omega * lneg.ZETA_HALF)
        assert abs(L - want) < 1e-13 * max(1.0, abs(want))
