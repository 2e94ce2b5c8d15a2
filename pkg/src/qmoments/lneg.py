"""L(1/2, chi_d) for negative fundamental discriminants.

The Dedekind zeta factorization zeta_K(s) = zeta(s) L(s, chi_d) turns the
central value into a finite sum of Epstein zeta values over the h(d)
reduced forms of discriminant d.  At s = 1/2 the Chowla-Selberg expansion
collapses to

    Z(1/2) = (2/sqrt(a)) (gamma + log(sqrt(|d|)/(8 pi a)))
           + (8/sqrt(a)) sum_{n>=1} sigma_0(n) cos(pi n b/a) K_0(pi n sqrt(|d|)/a)

and, accumulating weight * Z(1/2) over the forms of each d in a block,

    L(1/2, chi_d) = (sum of contributions) / (omega(d) * zeta(1/2)),

omega = 6, 4, 2 for d = -3, -4, below -4.  Since a <= sqrt(|d|/3), the
K-Bessel argument is at least pi sqrt(3) and at most six terms survive the
exp(-37) cutoff.  Contributions land on every |d| the form loop produces;
non-fundamental targets are simply dropped at output (branch-free inner
loop, as in the flag-array design).
"""

import math
from dataclasses import dataclass

import gmpy2
import mpmath as mp
import numpy as np
from numba import njit

from . import _dd
from .discriminants import NEGATIVE, Block, sieve_block
from .lpos import _kron, BlockResult
from .qforms import ReducedForm, _amax, _gcd64
from .specfun import _k0_eval, k0_table

EULER_GAMMA = 0.5772156649015328606
ZETA_HALF = -1.46035450880958681  # zeta(1/2), 17 significant digits
LN10 = 2.302585092994046

# sigma_0(n) for n = 1..7 (index 0 unused)
_SIGMA0 = np.array([0.0, 1.0, 2.0, 2.0, 3.0, 2.0, 4.0, 2.0])


@njit(cache=True)
def _neg_block(lo, hi, k0x0, k0step, k0coef):
    rec = np.empty((hi - lo, 2), dtype=np.float64)
    for j in range(hi - lo):
        rec[j, 0] = 0.0
        rec[j, 1] = math.log(lo + 1.0 + j)
    amax = _amax(hi)
    gcache = np.zeros(amax + 2, dtype=np.int64)
    trips = 0
    for a in range(1, amax + 1):
        fa = 4 * a
        inv_sqa = 1.0 / math.sqrt(a)
        lead0 = 2.0 * inv_sqa * (EULER_GAMMA - math.log(8.0 * math.pi * a))
        kpref = 8.0 * inv_sqa
        pi_over_a = math.pi / a
        for b in range(0, a + 1):
            clo = (b * b + lo) // fa + 1
            if clo < a:
                clo = a
            chi_ = (b * b + hi) // fa
            if chi_ < clo:
                continue
            g = a if b == 0 else _gcd64(a, b)
            cosb = math.cos(math.pi * b / a)
            if g > 1:
                for r in range(g):
                    gcache[r] = 0
            for c in range(clo, chi_ + 1):
                if g > 1:
                    r = c % g
                    gv = gcache[r]
                    if gv == 0:
                        gv = _gcd64(g, r)
                        gcache[r] = gv
                    if gv > 1:
                        continue
                trips += 1
                absd = fa * c - b * b
                j = absd - lo - 1
                z = lead0 + inv_sqa * rec[j, 1]
                x1 = pi_over_a * math.sqrt(absd)
                if x1 <= 37.0:
                    nk = int(37.0 / x1) + 1  # one guard term past the cutoff
                    if nk > 7:
                        nk = 7
                    ksum = 0.0
                    cprev = 1.0
                    ccur = cosb
                    xn = x1
                    for n in range(1, nk + 1):
                        if xn > 37.0:
                            break
                        ksum += _SIGMA0[n] * ccur * _k0_eval(xn, k0x0, k0step, k0coef)
                        xn += x1
                        cnext = 2.0 * cosb * ccur - cprev
                        cprev = ccur
                        ccur = cnext
                    z += kpref * ksum
                w = 2.0 if (0 < b and b < a and a < c) else 1.0
                rec[j, 0] += w * z
    return rec, trips


def lvalues_neg_block(block: Block) -> BlockResult:
    """Central values for every fundamental d < 0 with |d| in the block."""
    if block.sign != NEGATIVE:
        raise ValueError("negative-sign blocks only")
    flags = sieve_block(block).flags
    tab = k0_table()
    rec, trips = _neg_block(block.lo, block.hi, tab.x0, tab.step, tab.coeffs)
    idx = np.nonzero(flags)[0]
    absd = block.lo + 1 + idx.astype(np.int64)
    omega = np.where(absd == 3, 6.0, np.where(absd == 4, 4.0, 2.0))
    L = rec[idx, 0] / (omega * ZETA_HALF)
    return BlockResult(-absd, L, int(trips))


def form_contribution(form: ReducedForm, log_absd: float | None = None) -> float:
    """weight * Z(1/2) for one reduced form, exactly as the block kernel
    accumulates it."""
    tab = k0_table()
    a, b = form.a, form.b
    absd = -form.d
    if log_absd is None:
        log_absd = math.log(absd)
    inv_sqa = 1.0 / math.sqrt(a)
    z = 2.0 * inv_sqa * (EULER_GAMMA - math.log(8.0 * math.pi * a)) + inv_sqa * log_absd
    x1 = math.pi / a * math.sqrt(absd)
    if x1 <= 37.0:
        nk = min(7, int(37.0 / x1) + 1)
        cosb = math.cos(math.pi * b / a)
        ksum = 0.0
        cprev, ccur = 1.0, cosb
        xn = x1
        for n in range(1, nk + 1):
            if xn > 37.0:
                break
            ksum += _SIGMA0[n] * ccur * _k0_eval(xn, tab.x0, tab.step, tab.coeffs)
            xn += x1
            cprev, ccur = ccur, 2.0 * cosb * ccur - cprev
        z += 8.0 * inv_sqa * ksum
    return form.weight * z


def epstein_z_half_reference(a: int, b: int, c: int, dps: int = 30):
    """Z(1/2) for one form from the full K-Bessel expansion at high
    precision (mpmath besselk, generous truncation); test oracle."""
    with mp.workdps(dps):
        absd = mp.mpf(4 * a * c - b * b)
        lead = 2 / mp.sqrt(a) * (mp.euler + mp.log(mp.sqrt(absd) / (8 * mp.pi * a)))
        s = mp.mpf(0)
        n = 1
        while True:
            x = mp.pi * n * mp.sqrt(absd) / a
            if x > (dps + 8) * mp.log(10):
                break
            sig = mp.mpf(len([k for k in range(1, n + 1) if n % k == 0]))
            s += sig * mp.cos(mp.pi * n * b / a) * mp.besselk(0, x)
            n += 1
        return lead + 8 / mp.sqrt(a) * s


# ---------------------------------------------------------------------------
# smooth-AFE oracle (the paper's own cross check for d < 0)


@njit(cache=True)
def _oracle_neg_batch(absds, digits, zhi, zlo, inv_poch, ighi, iglo):
    out = np.empty(absds.shape[0], dtype=np.float64)
    wcut = (digits + 8.0) * LN10
    for i in range(absds.shape[0]):
        absd = absds[i]
        nmax = 2 * int(math.ceil(math.sqrt(absd / math.pi * LN10 * digits)))
        shi, slo = 0.0, 0.0
        for n in range(1, nmax + 1):
            whi, wlo = _dd.dd_mul_f(_dd.PI_HI, _dd.PI_LO, float(n) * float(n))
            whi, wlo = _dd.dd_div_f(whi, wlo, float(absd))
            if whi > wcut:
                break
            chi = _kron(-absd, n)
            if chi == 0:
                continue
            rhi, rlo = _dd.gamma_ratio(zhi, zlo, whi, wlo, inv_poch, ighi, iglo)
            qhi, qlo = _dd.dd_sqrt(float(n), 0.0)
            rhi, rlo = _dd.dd_div(rhi, rlo, qhi, qlo)
            if chi < 0:
                rhi, rlo = -rhi, -rlo
            shi, slo = _dd.dd_add(shi, slo, rhi, rlo)
        out[i] = 2.0 * shi + 2.0 * slo
    return out


_Z34 = _dd.gamma_ratio_constants(3, 4)


def oracle_neg_batch(ds, digits: int = 25) -> np.ndarray:
    """Double-double (~31 digit) smooth-AFE oracle for arrays of d < 0."""
    if digits > 30:
        raise ValueError("the double-double oracle carries about 31 digits")
    ds = np.asarray(ds, dtype=np.int64)
    if (ds >= 0).any():
        raise ValueError("negative discriminants expected")
    zhi, zlo, inv_poch, ighi, iglo = _Z34
    return _oracle_neg_batch(-ds, digits, zhi, zlo, inv_poch, ighi, iglo)


def oracle_afe_neg(d: int, digits: int = 25):
    """L(1/2, chi_d) = 2 sum chi_d(n) n^(-1/2) Gamma(3/4, pi n^2/|d|)/Gamma(3/4),
    truncated per the Digits rule with the truncation point doubled.

    Returns float via the double-double kernel for digits <= 30, else
    gmpy2.mpfr at 3.4*digits bits.
    """
    from .discriminants import is_fundamental

    if d >= 0 or not is_fundamental(d):
        raise ValueError(f"{d} is not a negative fundamental discriminant")
    if digits <= 30:
        return float(oracle_neg_batch(np.array([d]), digits)[0])
    absd = -d
    with gmpy2.context(precision=int(digits * 3.4) + 16):
        threequarters = gmpy2.mpfr(3) / 4
        gamma34 = gmpy2.gamma(threequarters)
        pi = gmpy2.const_pi()
        nmax = 2 * math.ceil(math.sqrt(absd / math.pi * LN10 * digits))
        s = gmpy2.mpfr(0)
        wcut = (digits + 10) * LN10
        for n in range(1, nmax + 1):
            w = pi * n * n / absd
            if w > wcut:
                break
            chi = gmpy2.kronecker(d, n)
            if chi == 0:
                continue
            term = gmpy2.gamma_inc(threequarters, w) / (gamma34 * gmpy2.sqrt(n))
            s += term if chi > 0 else -term
        return 2 * s
