"""L(1/2, chi_d) for positive fundamental discriminants.

Smooth approximate functional equation:

    L(1/2, chi_d) = 2 (pi/d)^(1/4) / Gamma(1/4) * sum_{n <= N(d)} chi_d(n) G(1/4, pi n^2/d)

with N(d) = sqrt(d ln(10) Digits / pi); terms beyond N(d) are below the
working precision and the (conjectural) square-root cancellation of the
character sums keeps the ignored tail at the same scale as one term.

The n loop runs outside and the d loop inside: chi_d(n) is periodic in d
with period n or 8n (according to whether the 2-adic valuation of n is even
or odd), so one Kronecker evaluation per residue class serves the whole
block.  The inner d loop starts at the first d with N(d) >= n.
"""

import math
from dataclasses import dataclass

import gmpy2
import numpy as np
from numba import njit

from . import _dd
from .discriminants import POSITIVE, Block, sieve_block
from .specfun import _INV_POCH, _g_eval, g_table

GAMMA_QUARTER = 3.6256099082219083119
LN10 = 2.302585092994046


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d|n) for n >= 1, by extracting powers of two and
    quadratic reciprocity."""
    if n < 1:
        raise ValueError("n must be positive")
    return int(_kron(d, n))


@njit(cache=True)
def _kron(d, n):
    if n == 1:
        return 1
    k = 1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if d % 2 == 0:
            return 0
        if v & 1:
            r = d % 8
            if r == 3 or r == 5:
                k = -1
    d = d % n  # Jacobi (d|n) for odd n > 0 only depends on d mod n
    while d != 0:
        while d % 2 == 0:
            d //= 2
            r = n % 8
            if r == 3 or r == 5:
                k = -k
        d, n = n, d
        if d % 4 == 3 and n % 4 == 3:
            k = -k
        d = d % n
    if n == 1:
        return k
    return 0


@dataclass
class CharTable:
    n: int
    period: int
    values: np.ndarray  # int8, chi_d(n) indexed by d mod period

    def lookup(self, d: int) -> int:
        return int(self.values[d % self.period])


@njit(cache=True)
def _char_values(n):
    m = n
    v = 0
    while m % 2 == 0:
        m //= 2
        v += 1
    period = n if v % 2 == 0 else 8 * n
    vals = np.empty(period, dtype=np.int8)
    for r in range(period):
        vals[r] = _kron(r, n)
    return vals


def build_char_table(n: int, block: Block | None = None) -> CharTable:
    """chi_d(n) for every residue class of d; block is accepted for parity
    with the engine call sites but the table depends on n alone."""
    if n < 1:
        raise ValueError("n must be positive")
    vals = _char_values(n)
    return CharTable(n, len(vals), vals)


def n_max(hi: int, digits: int) -> int:
    return math.ceil(math.sqrt(hi / math.pi * LN10 * digits))


@njit(cache=True)
def _pos_block(lo, hi, flags, digits, gw0, gstep, gcoef, inv_poch):
    acc = np.zeros(hi - lo, dtype=np.float64)
    nmax = int(math.ceil(math.sqrt(hi / math.pi * LN10 * digits)))
    trips = 0
    for n in range(1, nmax + 1):
        vals = _char_values(n)
        period = vals.shape[0]
        # d with N(d) >= n
        dmin = int(math.ceil(math.pi * n * n / (LN10 * digits)))
        if dmin < lo + 1:
            dmin = lo + 1
        pin2 = math.pi * n * n
        for d in range(dmin, hi + 1):
            trips += 1
            j = d - lo - 1
            if not flags[j]:
                continue
            chi = vals[d % period]
            if chi == 0:
                continue
            g = _g_eval(pin2 / d, gw0, gstep, gcoef, inv_poch)
            if chi == 1:
                acc[j] += g
            else:
                acc[j] -= g
    return acc, trips


@dataclass
class BlockResult:
    d: np.ndarray  # signed discriminants, increasing |d|
    L: np.ndarray  # central values
    trips: int  # inner-loop trip count


@njit(cache=True)
def _pos_finalize(ds, acc, idx):
    # scalar pow keeps the result bit-identical to the d-outer reference
    # (numpy's vectorized ** differs by an ulp on some inputs)
    out = np.empty(ds.shape[0], dtype=np.float64)
    for i in range(ds.shape[0]):
        out[i] = 2.0 * (math.pi / ds[i]) ** 0.25 / GAMMA_QUARTER * acc[idx[i]]
    return out


def lvalues_pos_block(block: Block, digits: int = 16) -> BlockResult:
    """Central values for every fundamental d in the block (sign +)."""
    if block.sign != POSITIVE:
        raise ValueError("positive-sign blocks only")
    flags = sieve_block(block).flags
    tab = g_table()
    acc, trips = _pos_block(
        block.lo, block.hi, flags, digits, tab.x0, tab.step, tab.coeffs, _INV_POCH
    )
    idx = np.nonzero(flags)[0]
    ds = block.lo + 1 + idx.astype(np.int64)
    L = _pos_finalize(ds.astype(np.float64), acc, idx)
    return BlockResult(ds, L, int(trips))


# ---------------------------------------------------------------------------
# oracles


@njit(cache=True)
def _oracle_pos_batch(ds, digits, zhi, zlo, inv_poch, ighi, iglo):
    """AFE at double-double precision with the truncation point doubled.

    Terms beyond w = (digits+8) ln(10) are below 10^-(digits+8) in absolute
    value (monotone bound through the incomplete-gamma decay), so the loop
    may stop there; the nominal range is n <= 2 N(d)."""
    out = np.empty(ds.shape[0], dtype=np.float64)
    wcut = (digits + 8.0) * LN10
    for i in range(ds.shape[0]):
        d = ds[i]
        nmax = 2 * int(math.ceil(math.sqrt(d / math.pi * LN10 * digits)))
        shi, slo = 0.0, 0.0
        for n in range(1, nmax + 1):
            whi, wlo = _dd.dd_mul_f(_dd.PI_HI, _dd.PI_LO, float(n) * float(n))
            whi, wlo = _dd.dd_div_f(whi, wlo, float(d))
            if whi > wcut:
                break
            chi = _kron(d, n)
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


_Z14 = _dd.gamma_ratio_constants(1, 4)


def oracle_pos_batch(ds, digits: int = 25) -> np.ndarray:
    """Double-double (~31 digit) AFE oracle for arrays of d > 0."""
    if digits > 30:
        raise ValueError("the double-double oracle carries about 31 digits")
    ds = np.asarray(ds, dtype=np.int64)
    zhi, zlo, inv_poch, ighi, iglo = _Z14
    return _oracle_pos_batch(ds, digits, zhi, zlo, inv_poch, ighi, iglo)


def oracle_afe_pos(d: int, digits: int = 30):
    """Truncation-doubled multiprecision AFE for a single d > 0.

    Uses mpfr at 3.4*digits bits for digits > 30, the double-double kernel
    otherwise.  Returns a float for the fast path, gmpy2.mpfr for the slow.
    """
    from .discriminants import is_fundamental

    if d <= 0 or not is_fundamental(d):
        raise ValueError(f"{d} is not a positive fundamental discriminant")
    if digits <= 30:
        return float(oracle_pos_batch(np.array([d]), digits)[0])
    with gmpy2.context(precision=int(digits * 3.4) + 16):
        quarter = gmpy2.mpfr(1) / 4
        gamma_quarter = gmpy2.gamma(quarter)
        pi = gmpy2.const_pi()
        nmax = 2 * math.ceil(math.sqrt(d / math.pi * LN10 * digits))
        s = gmpy2.mpfr(0)
        wcut = (digits + 10) * LN10
        for n in range(1, nmax + 1):
            w = pi * n * n / d
            if w > wcut:
                break
            chi = gmpy2.kronecker(d, n)
            if chi == 0:
                continue
            term = gmpy2.gamma_inc(quarter, w) / (gamma_quarter * gmpy2.sqrt(n))
            s += term if chi > 0 else -term
        return 2 * s


def tail_estimate(d: int, N: int) -> float:
    """Conjectural size of the ignored AFE tail: d^(3/4) N^(-3/2) e^(-pi N^2/d)
    times the 2/Gamma(1/4) pi^(-3/4) prefactor of the term bound.

    Diagnostic only; validates truncation choices and is never added to
    results.
    """
    if N < 1:
        raise ValueError("N >= 1")
    scale = 2.0 / GAMMA_QUARTER / math.pi**0.75
    return scale * d**0.75 * N**-1.5 * math.exp(-math.pi * N * N / d)


@njit(cache=True)
def _max_partial_sum(d, nmax, gw0, gstep, gcoef, inv_poch):
    acc = 0.0
    worst = 0.0
    pref = 2.0 * math.pi**0.25 / GAMMA_QUARTER / d**0.25
    for n in range(1, nmax + 1):
        chi = _kron(d, n)
        if chi == 0:
            continue
        g = _g_eval(math.pi * n * n / d, gw0, gstep, gcoef, inv_poch)
        acc += chi * g
        s = abs(pref * acc)
        if s > worst:
            worst = s
    return worst


def max_partial_sum(d: int, digits: int = 16) -> float:
    """max over N' of |2 sum_{n<=N'} chi_d(n) f(n)|, the cancellation probe."""
    tab = g_table()
    nmax = math.ceil(math.sqrt(d / math.pi * LN10 * digits))
    return float(
        _max_partial_sum(d, nmax, tab.x0, tab.step, tab.coeffs, _INV_POCH)
    )
