"""Double-double arithmetic (~31 significant digits) for numba kernels.

The multiprecision AFE oracles have to run over ~10^7 incomplete-gamma
evaluations on a single core, which rules out mpfr/mpmath call overhead.
A double-double value is an unevaluated sum hi + lo with |lo| <= ulp(hi)/2;
the classic error-free transforms (Dekker/Knuth) make +,*,/ exact to about
106 bits.  Nothing here may ever be compiled with fastmath.
"""

import math

import mpmath as mp
import numpy as np
from numba import njit

_SPLIT = 134217729.0  # 2^27 + 1


def dd_const(value, dps: int = 40):
    """(hi, lo) split of a constant, via mpmath."""
    with mp.workdps(dps):
        v = mp.mpf(value)
        hi = float(v)
        lo = float(v - hi)
    return hi, lo


_LN2_HI, _LN2_LO = 0.6931471805599453, 2.3190468138462996e-17


@njit(cache=True)
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True)
def _quick_sum(a, b):
    s = a + b
    return s, b - (s - a)


@njit(cache=True)
def _two_prod(a, b):
    p = a * b
    at = _SPLIT * a
    ahi = at - (at - a)
    alo = a - ahi
    bt = _SPLIT * b
    bhi = bt - (bt - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


@njit(cache=True)
def dd_add(ahi, alo, bhi, blo):
    s1, s2 = _two_sum(ahi, bhi)
    t1, t2 = _two_sum(alo, blo)
    s2 += t1
    s1, s2 = _quick_sum(s1, s2)
    s2 += t2
    return _quick_sum(s1, s2)


@njit(cache=True)
def dd_mul(ahi, alo, bhi, blo):
    p1, p2 = _two_prod(ahi, bhi)
    p2 += ahi * blo + alo * bhi
    return _quick_sum(p1, p2)


@njit(cache=True)
def dd_mul_f(ahi, alo, b):
    p1, p2 = _two_prod(ahi, b)
    p2 += alo * b
    return _quick_sum(p1, p2)


@njit(cache=True)
def dd_div(ahi, alo, bhi, blo):
    q1 = ahi / bhi
    thi, tlo = dd_mul_f(bhi, blo, q1)
    rhi, rlo = dd_add(ahi, alo, -thi, -tlo)
    q2 = rhi / bhi
    thi, tlo = dd_mul_f(bhi, blo, q2)
    rhi, rlo = dd_add(rhi, rlo, -thi, -tlo)
    q3 = rhi / bhi
    q1, q2 = _quick_sum(q1, q2)
    return dd_add(q1, q2, q3, 0.0)


@njit(cache=True)
def dd_div_f(ahi, alo, b):
    return dd_div(ahi, alo, b, 0.0)


@njit(cache=True)
def dd_sqrt(ahi, alo):
    if ahi == 0.0:
        return 0.0, 0.0
    y = math.sqrt(ahi)
    qhi, qlo = dd_div(ahi, alo, y, 0.0)
    shi, slo = dd_add(qhi, qlo, y, 0.0)
    return shi * 0.5, slo * 0.5


@njit(cache=True)
def dd_exp(ahi, alo):
    if ahi > 709.0:
        return math.inf, 0.0
    if ahi < -709.0:
        return 0.0, 0.0
    m = int(round(ahi / _LN2_HI))
    thi, tlo = dd_mul_f(_LN2_HI, _LN2_LO, float(m))
    rhi, rlo = dd_add(ahi, alo, -thi, -tlo)
    rhi *= 0.001953125  # exact scaling by 2^-9
    rlo *= 0.001953125
    # exp(r) - 1 on |r| <= ln2/2/512
    shi, slo = rhi, rlo
    phi, plo = rhi, rlo
    for k in range(2, 12):
        phi, plo = dd_mul(phi, plo, rhi, rlo)
        phi, plo = dd_div_f(phi, plo, float(k))
        shi, slo = dd_add(shi, slo, phi, plo)
    for _ in range(9):  # (1+s) <- (1+s)^2
        t1, t2 = dd_mul(shi, slo, shi, slo)
        shi, slo = dd_add(2.0 * shi, 2.0 * slo, t1, t2)
    ehi, elo = dd_add(shi, slo, 1.0, 0.0)
    return math.ldexp(ehi, m), math.ldexp(elo, m)


@njit(cache=True)
def dd_log(ahi, alo):
    t = math.log(ahi)
    ehi, elo = dd_exp(-t, 0.0)
    phi, plo = dd_mul(ahi, alo, ehi, elo)
    dhi, dlo = dd_add(phi, plo, -1.0, 0.0)
    return dd_add(dhi, dlo, t, 0.0)


@njit(cache=True)
def dd_powf(ahi, alo, phi, plo):
    """a^p for a > 0."""
    lhi, llo = dd_log(ahi, alo)
    mhi, mlo = dd_mul(lhi, llo, phi, plo)
    return dd_exp(mhi, mlo)


# ---------------------------------------------------------------------------
# normalized upper incomplete gamma ratio Gamma(z, w) / Gamma(z)


@njit(cache=True)
def _gamma_ratio_series(zhi, zlo, whi, wlo, inv_poch, inv_gamma_hi, inv_gamma_lo):
    """1 - w^z e^-w (sum_j w^j/(z)_{j+1}) / Gamma(z), accurate for w <= 4."""
    shi, slo = inv_poch[0, 0], inv_poch[0, 1]
    thi, tlo = 1.0, 0.0
    for j in range(1, inv_poch.shape[0]):
        thi, tlo = dd_mul(thi, tlo, whi, wlo)
        phi, plo = dd_mul(thi, tlo, inv_poch[j, 0], inv_poch[j, 1])
        shi, slo = dd_add(shi, slo, phi, plo)
    ehi, elo = dd_exp(-whi, -wlo)
    shi, slo = dd_mul(shi, slo, ehi, elo)
    phi, plo = dd_powf(whi, wlo, zhi, zlo)
    shi, slo = dd_mul(shi, slo, phi, plo)
    shi, slo = dd_mul(shi, slo, inv_gamma_hi, inv_gamma_lo)
    return dd_add(1.0, 0.0, -shi, -slo)


@njit(cache=True)
def _gamma_ratio_cf(zhi, zlo, whi, wlo, inv_gamma_hi, inv_gamma_lo):
    """e^-w w^z / (cf * Gamma(z)) by the even Legendre continued fraction,
    modified Lentz; for w > 4."""
    b0hi, b0lo = dd_add(whi, wlo, 1.0 - zhi, -zlo)
    fhi, flo = b0hi, b0lo
    chi_, clo_ = b0hi, b0lo
    dhi, dlo = 0.0, 0.0
    for i in range(1, 300):
        fi = float(i)
        imz_hi, imz_lo = dd_add(fi, 0.0, -zhi, -zlo)  # i - z
        ahi, alo = dd_mul_f(imz_hi, imz_lo, -fi)  # a_i = -i (i - z)
        bhi, blo = dd_add(whi, wlo, 2.0 * fi + 1.0 - zhi, -zlo)
        # D = 1/(b + a*D)
        thi, tlo = dd_mul(ahi, alo, dhi, dlo)
        thi, tlo = dd_add(bhi, blo, thi, tlo)
        if thi == 0.0:
            thi = 1e-300
        dhi, dlo = dd_div(1.0, 0.0, thi, tlo)
        # C = b + a/C
        thi, tlo = dd_div(ahi, alo, chi_, clo_)
        chi_, clo_ = dd_add(bhi, blo, thi, tlo)
        if chi_ == 0.0:
            chi_ = 1e-300
        ghi, glo = dd_mul(chi_, clo_, dhi, dlo)
        fhi, flo = dd_mul(fhi, flo, ghi, glo)
        if abs(ghi - 1.0) + abs(glo) < 1e-33:
            break
    ehi, elo = dd_exp(-whi, -wlo)
    phi, plo = dd_powf(whi, wlo, zhi, zlo)
    nhi, nlo = dd_mul(ehi, elo, phi, plo)
    nhi, nlo = dd_div(nhi, nlo, fhi, flo)
    return dd_mul(nhi, nlo, inv_gamma_hi, inv_gamma_lo)


@njit(cache=True)
def gamma_ratio(zhi, zlo, whi, wlo, inv_poch, inv_gamma_hi, inv_gamma_lo):
    """Gamma(z, w)/Gamma(z) in double-double, z in (0, 1), w > 0."""
    if whi <= 4.0:
        return _gamma_ratio_series(zhi, zlo, whi, wlo, inv_poch, inv_gamma_hi, inv_gamma_lo)
    return _gamma_ratio_cf(zhi, zlo, whi, wlo, inv_gamma_hi, inv_gamma_lo)


def gamma_ratio_constants(z_num: int, z_den: int = 4, terms: int = 56):
    """(z, inv_poch array, 1/Gamma(z)) in double-double for z = z_num/z_den."""
    with mp.workdps(45):
        z = mp.mpf(z_num) / z_den
        inv_poch = np.empty((terms, 2), dtype=np.float64)
        poch = z
        for j in range(terms):
            v = 1 / poch
            inv_poch[j, 0] = float(v)
            inv_poch[j, 1] = float(v - mp.mpf(inv_poch[j, 0]))
            poch *= z + j + 1
        ig = 1 / mp.gamma(z)
        ighi = float(ig)
        iglo = float(ig - ighi)
        zhi = float(z)
        zlo = float(z - zhi)
    return zhi, zlo, inv_poch, ighi, iglo


PI_HI, PI_LO = 3.141592653589793, 1.2246467991473532e-16
LN10_HI, LN10_LO = 2.302585092994046, -2.1707562233822494e-16
