"""Table-driven K_0(x) on [5,37] and normalized incomplete gamma G(1/4,w).

Both functions are only ever needed to double precision on bounded ranges:
K-Bessel arguments are at least pi*sqrt(3) > 5 and anything past 37 is below
10^-16, so values there are taken as 0.  Evaluation uses dense grids of
truncated Taylor expansions (nearest center, |x - x_j| <= step/2):

  * K_0: centers j/200 on (5, 37), five terms.  Higher derivatives follow
    from K_0, K_1 via the modified Bessel ODE y'' + y'/x - y = 0.
  * G(1/4, w): centers at multiples of 0.01 on [1, 37], terms to degree 7,
    using d/dw G(z, w) = -G(z+1, w) exactly.  For w < 1 a complementary
    series is used instead: G(z,w) = w^-z Gamma(z) - g(z,w) with
    g(z,w) = e^-w sum_j w^j / (z)_{j+1}.

Tables are generated at >= 25 digit working precision on first use and
cached to little-endian coefficient files with a checksum trailer.  The
slow reference oracles (adaptive quadrature of the defining integrals) are
kept for table generation checks and the test suite.
"""

import math
import os
import struct
import zlib
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import gmpy2
import mpmath as mp
import numpy as np
from numba import njit

K0_X0 = 5.005
K0_STEP = 0.005
K0_COUNT = 6399  # centers j/200 for j = 1001 .. 7399
K0_TERMS = 5

G_W0 = 1.0
G_STEP = 0.01
G_COUNT = 3601  # centers j/100 for j = 100 .. 3700
G_TERMS = 8

CUTOFF = 37.0  # exp(-37) < 1e-16

GAMMA_QUARTER = 3.6256099082219083119  # Gamma(1/4)

_MAGIC = b"QTAB"
_VERSION = 1
_KINDS = {"bessel_k0": 0, "incgamma_quarter": 1}
_HDR = struct.Struct("<4sIIddQI")


@dataclass
class TaylorTable:
    kind: str
    x0: float
    step: float
    coeffs: np.ndarray  # [grid points, terms], float64

    @property
    def terms(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def center(self, j: int) -> float:
        return self.x0 + j * self.step


# ---------------------------------------------------------------------------
# coefficient file format


def save_table(table: TaylorTable, path) -> None:
    payload = np.ascontiguousarray(table.coeffs, dtype="<f8").tobytes()
    head = _HDR.pack(
        _MAGIC,
        _VERSION,
        _KINDS[table.kind],
        table.x0,
        table.step,
        table.coeffs.shape[0],
        table.coeffs.shape[1],
    )
    crc = zlib.crc32(head + payload) & 0xFFFFFFFF
    tmp = str(path) + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(head + payload + struct.pack("<I", crc))
    os.replace(tmp, path)


def load_table(path) -> TaylorTable:
    blob = Path(path).read_bytes()
    head = blob[: _HDR.size]
    magic, version, kind, x0, step, count, terms = _HDR.unpack(head)
    if magic != _MAGIC or version != _VERSION:
        raise ValueError(f"{path}: not a coefficient table")
    payload = blob[_HDR.size : _HDR.size + count * terms * 8]
    (crc,) = struct.unpack("<I", blob[_HDR.size + len(payload) :][:4])
    if crc != zlib.crc32(head + payload) & 0xFFFFFFFF:
        raise ValueError(f"{path}: checksum mismatch")
    names = {v: k for k, v in _KINDS.items()}
    coeffs = np.frombuffer(payload, dtype="<f8").reshape(count, terms).copy()
    return TaylorTable(names[kind], x0, step, coeffs)


# ---------------------------------------------------------------------------
# reference oracles (slow, high precision)


def k0_reference(x, dps: int = 25):
    """K_0(x) by adaptive quadrature of (1/2) int_0^inf e^{-(x/2)(y+1/y)} dy/y,
    folded to int_1^inf by the y -> 1/y symmetry."""
    if x <= 0:
        raise ValueError("K_0 needs x > 0")
    with mp.workdps(dps + 10):
        xx = mp.mpf(x)
        val = mp.quad(lambda y: mp.exp(-(xx / 2) * (y + 1 / y)) / y, [1, mp.inf])
        return +val


def g_reference(w, dps: int = 25):
    """G(1/4, w) = int_1^inf x^{-3/4} e^{-wx} dx by adaptive quadrature."""
    if w <= 0:
        raise ValueError("G(1/4, w) needs w > 0")
    with mp.workdps(dps + 10):
        ww = mp.mpf(w)
        val = mp.quad(lambda x: x ** mp.mpf("-0.75") * mp.exp(-ww * x), [1, mp.inf])
        return +val


def g_series_reference(w, dps: int = 25):
    """Series route: G(z,w) = w^-z Gamma(z) - e^-w sum_j w^j/(z)_{j+1}, z=1/4."""
    if w <= 0:
        raise ValueError("G(1/4, w) needs w > 0")
    with mp.workdps(dps + 15):
        z = mp.mpf(1) / 4
        ww = mp.mpf(w)
        # term_j = w^j / (z)_{j+1}
        s = mp.mpf(0)
        t = mp.mpf(1)
        poch = z
        j = 0
        while True:
            term = t / poch
            s += term
            j += 1
            t *= ww
            poch *= z + j
            if term < mp.mpf(10) ** (-(dps + 12)) and j > 4:
                break
        return ww ** (-z) * mp.gamma(z) - mp.exp(-ww) * s


def k0_reference_sweep(xs, dps: int = 30):
    """High-precision K_0 at many points in [5, 37+], for bulk table audits.

    Walks the center grid with a 16-term Taylor step of the Bessel ODE
    (per-step truncation ~1e-37), re-anchoring against besselk every 400
    centers; each query is evaluated from its nearest center.  Returns a
    list of mpf.  For spot checks against the quadrature oracle see
    k0_reference.
    """
    xs = np.asarray(xs, dtype=np.float64)
    if (xs < 5.0).any():
        raise ValueError("sweep covers x >= 5")
    order = np.argsort(xs)
    out = [None] * len(xs)
    walk_terms = 16
    with mp.workdps(dps):
        step = mp.mpf(1) / 200
        x0 = mp.mpf(1001) / 200
        y0, y1 = mp.besselk(0, x0), -mp.besselk(1, x0)
        t = _k0_taylor_row(x0, y0, y1, walk_terms)
        rev = t[::-1]
        j = 0
        for pos in order:
            x = mp.mpf(float(xs[pos]))
            jq = int(min(max(round((float(x) - K0_X0) / K0_STEP), 0), K0_COUNT - 1))
            while j < jq:
                y0 = mp.polyval(rev, step)
                y1 = mp.polyval([m * t[m] for m in range(walk_terms - 1, 0, -1)], step)
                x0 += step
                j += 1
                if j % 400 == 0:
                    y0, y1 = mp.besselk(0, x0), -mp.besselk(1, x0)
                t = _k0_taylor_row(x0, y0, y1, walk_terms)
                rev = t[::-1]
            out[pos] = mp.polyval(rev, x - x0)
    return out


# ---------------------------------------------------------------------------
# table generation


def _k0_taylor_row(x0, y0, y1, nterms):
    """Taylor coefficients t_0..t_{nterms-1} of K_0 around x0 from the value
    y0 = K_0(x0) and derivative y1 = K_0'(x0), via x y'' + y' - x y = 0:
    t_{m+2} = (x0 t_m + t_{m-1} - (m+1)^2 t_{m+1}) / (x0 (m+2)(m+1))."""
    t = [y0, y1]
    for m in range(nterms - 2):
        prev = t[m - 1] if m >= 1 else mp.mpf(0)
        t.append((x0 * t[m] + prev - (m + 1) ** 2 * t[m + 1]) / (x0 * (m + 2) * (m + 1)))
    return t


def build_k0_table(dps: int = 30, check: bool = True) -> TaylorTable:
    """Taylor coefficients K_0^(m)(x_j)/m! from K_0, K_1 and the Bessel ODE.

    Seeds K_0 and K_0' = -K_1 at the first center, then walks the grid with
    a 16-term Taylor step (step/x0 < 1e-3, so the per-step truncation is far
    below the working precision); every 500th center is re-anchored against
    besselk directly.
    """
    coeffs = np.empty((K0_COUNT, K0_TERMS), dtype=np.float64)
    walk_terms = 16
    with mp.workdps(dps):
        step = mp.mpf(1) / 200
        x0 = mp.mpf(1001) / 200
        y0, y1 = mp.besselk(0, x0), -mp.besselk(1, x0)
        for j in range(K0_COUNT):
            t = _k0_taylor_row(x0, y0, y1, walk_terms)
            coeffs[j] = [float(v) for v in t[:K0_TERMS]]
            # advance value and derivative to the next center
            y0 = mp.polyval(t[::-1], step)
            y1 = mp.polyval([m * t[m] for m in range(walk_terms - 1, 0, -1)], step)
            x0 += step
            if j % 500 == 499:
                ref = mp.besselk(0, x0)
                if abs(y0 - ref) > mp.mpf(10) ** (8 - dps) * ref:
                    raise ArithmeticError(f"K0 Taylor walk drifted at x={x0}")
                y0, y1 = ref, -mp.besselk(1, x0)
    table = TaylorTable("bessel_k0", K0_X0, K0_STEP, coeffs)
    if check:
        _check_k0_table(table, dps)
    return table


def _check_k0_table(table: TaylorTable, dps: int) -> None:
    # worst case |x - x_j| = step/2, spot-checked against besselk directly
    rng = np.random.default_rng(20210505)
    xs = np.concatenate(
        [
            rng.uniform(5.01, 36.99, 220),
            np.array([K0_X0, 37.0 - 1e-9, math.pi * math.sqrt(3)]),
            K0_X0 + (rng.integers(0, K0_COUNT, 60) + 0.5) * K0_STEP,
        ]
    )
    xs = xs[xs <= 37.0]
    got = k0_fast_array(xs, table)
    with mp.workdps(dps):
        for x, g in zip(xs, got):
            ref = float(mp.besselk(0, mp.mpf(x)))
            if abs(g - ref) > 1e-14:
                raise ArithmeticError(f"K0 table off at x={x}: {g} vs {ref}")


def build_g_table(dps: int = 30, check: bool = True) -> TaylorTable:
    """Taylor rows for G(1/4, w) on [1, 37] via d^m/dw^m G(z,w) = (-1)^m G(z+m,w).

    Coefficients below 1e-18 are stored as zero (they cannot affect the
    1e-14 target with |w - w_j| <= 1/200).
    """
    prec = int(dps * 3.33) + 8
    coeffs = np.empty((G_COUNT, G_TERMS), dtype=np.float64)
    with gmpy2.context(precision=prec):
        fact = [math.factorial(m) for m in range(G_TERMS)]
        for j in range(G_COUNT):
            w = gmpy2.mpfr(100 + j) / 100
            for m in range(G_TERMS):
                z = gmpy2.mpfr(4 * m + 1) / 4
                g = gmpy2.gamma_inc(z, w) * w**-z  # G(z+m, w)
                val = float(g) / fact[m]
                if m % 2:
                    val = -val
                coeffs[j, m] = 0.0 if abs(val) < 1e-18 else val
    table = TaylorTable("incgamma_quarter", G_W0, G_STEP, coeffs)
    if check:
        _check_g_table(table, prec)
    return table


def _check_g_table(table: TaylorTable, prec: int) -> None:
    rng = np.random.default_rng(19470625)
    ws = np.concatenate(
        [
            rng.uniform(1.0, 37.0, 220),
            rng.uniform(0.005, 1.0, 120),
            np.array([1.0, 0.999999, 1.000001, 36.999]),
            G_W0 + (rng.integers(0, G_COUNT, 60) + 0.5) * G_STEP,
        ]
    )
    ws = ws[ws <= 37.0]
    got = g_fast_array(ws, table)
    with gmpy2.context(precision=prec):
        quarter = gmpy2.mpfr(1) / 4
        for w, g in zip(ws, got):
            ww = gmpy2.mpfr(w)
            ref = float(gmpy2.gamma_inc(quarter, ww) * ww**-quarter)
            if abs(g - ref) > 1e-14:
                raise ArithmeticError(f"G table off at w={w}: {g} vs {ref}")


# ---------------------------------------------------------------------------
# fast evaluation


@njit(cache=True)
def _k0_eval(x, x0, step, coeffs):
    if x > 37.0:
        return 0.0
    idx = int(round((x - x0) / step))
    if idx < 0:
        idx = 0
    elif idx >= coeffs.shape[0]:
        idx = coeffs.shape[0] - 1
    dx = x - (x0 + idx * step)
    row = coeffs[idx]
    return (((row[4] * dx + row[3]) * dx + row[2]) * dx + row[1]) * dx + row[0]


# 1/(1/4)_{j+1}; 26 terms bound the w < 1 series tail below 1e-18
_INV_POCH = np.empty(26, dtype=np.float64)
_p = 0.25
for _j in range(26):
    _INV_POCH[_j] = 1.0 / _p
    _p *= 0.25 + _j + 1
del _p, _j


@njit(cache=True)
def _g_eval(w, w0, step, coeffs, inv_poch):
    if w > 37.0:
        return 0.0
    if w >= 1.0:
        idx = int(round((w - w0) / step))
        if idx < 0:
            idx = 0
        elif idx >= coeffs.shape[0]:
            idx = coeffs.shape[0] - 1
        dw = w - (w0 + idx * step)
        row = coeffs[idx]
        acc = row[7]
        for m in range(6, -1, -1):
            acc = acc * dw + row[m]
        return acc
    # complementary series below the table range; terms are positive and
    # decreasing, so the first term below 1e-18 bounds the tail
    s = 0.0
    t = 1.0
    for j in range(inv_poch.shape[0]):
        term = t * inv_poch[j]
        s += term
        if term < 1e-18:
            break
        t *= w
    return w**-0.25 * 3.6256099082219083119 - math.exp(-w) * s


@njit(cache=True)
def _k0_eval_array(xs, x0, step, coeffs, out):
    for i in range(xs.shape[0]):
        out[i] = _k0_eval(xs[i], x0, step, coeffs)


@njit(cache=True)
def _g_eval_array(ws, w0, step, coeffs, inv_poch, out):
    for i in range(ws.shape[0]):
        out[i] = _g_eval(ws[i], w0, step, coeffs, inv_poch)


def k0_fast(x: float, table: TaylorTable) -> float:
    """Nearest-center Taylor value of K_0(x); 0 beyond the 37 cutoff."""
    if x < 5.0:
        raise ValueError("K_0 table starts at 5 (arguments are >= pi*sqrt(3))")
    return float(_k0_eval(x, table.x0, table.step, table.coeffs))


def k0_fast_array(xs, table: TaylorTable) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if (xs < 5.0).any():
        raise ValueError("K_0 table starts at 5")
    out = np.empty_like(xs)
    _k0_eval_array(xs, table.x0, table.step, table.coeffs, out)
    return out


def g_fast(w: float, table: TaylorTable) -> float:
    """G(1/4, w): table on [1,37], series on (0,1), 0 past 37."""
    if w <= 0.0:
        raise ValueError("G(1/4, w) needs w > 0")
    return float(_g_eval(w, table.x0, table.step, table.coeffs, _INV_POCH))


def g_fast_array(ws, table: TaylorTable) -> np.ndarray:
    ws = np.asarray(ws, dtype=np.float64)
    if (ws <= 0.0).any():
        raise ValueError("G(1/4, w) needs w > 0")
    out = np.empty_like(ws)
    _g_eval_array(ws, table.x0, table.step, table.coeffs, _INV_POCH, out)
    return out


# ---------------------------------------------------------------------------
# cached singletons


def cache_dir() -> Path:
    root = os.environ.get("QMOMENTS_CACHE")
    if root:
        path = Path(root)
    else:
        xdg = os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache"))
        path = Path(xdg) / "qmoments"
    path.mkdir(parents=True, exist_ok=True)
    return path


@lru_cache(maxsize=None)
def k0_table() -> TaylorTable:
    path = cache_dir() / "k0_taylor_v1.tab"
    if path.exists():
        try:
            return load_table(path)
        except ValueError:
            pass  # stale or corrupt cache; rebuild
    table = build_k0_table()
    save_table(table, path)
    return table


@lru_cache(maxsize=None)
def g_table() -> TaylorTable:
    path = cache_dir() / "g_taylor_v1.tab"
    if path.exists():
        try:
            return load_table(path)
        except ValueError:
            pass
    table = build_g_table()
    save_table(table, path)
    return table
