"""Moment polynomials Q_±(k, x) by numerical k-fold contour residues.

Q_±(k, x) is the degree k(k+1)/2 polynomial

    Q(k,x) = pre * (2 pi i)^-k OINT ... OINT G(z) Delta(z^2)^2 / prod z_j^(2k-1)
             * exp((x/2) sum z_j) dz,     pre = (-1)^(k(k-1)/2) 2^k / k!,

with G(z) = A_k(z) prod_j X(1/2+z_j, a)^(-1/2) prod_{i<=j} zeta(1+z_i+z_j)
and A_k the arithmetic Euler product (absolutely convergent on
|Re z_j| < 1/2).  Coefficients are extracted one at a time by replacing the
exponential with (sum z_j)^m / (2^m m!) and integrating over the tensor
product of circles |z_j| = r with the trapezoid rule, which is
exponentially accurate here: the integrand is analytic on the torus (the
zeta poles at z_i + z_j = 0 are cancelled by the Vandermonde squares).

Numerical architecture, per (k, sign, config):

  * node set: N-th roots rotated by pi/(2N), with the antipodal half built
    by exact negation; Delta^2 kills any tuple whose nodes collide or sit
    antipodally, so only tuples with k distinct "classes" (node mod N/2)
    survive; they are enumerated directly, C(N/2, k) 2^k of them.
  * pair/diagonal tables: zeta(1+w) w^2 (z_j - z_i)^2 and the pair part
    prod_{p<=P} (1 - p^(-1-w)) of A_k fold into a per-pair table; the
    diagonal zeta, the X factors, z^-(2k-1) and the trapezoid weight z/N
    fold into a per-node table.
  * per tuple only the non-separable Euler factor survives:
      prod_{p<=P} [ (prod_j (1-u_pj)^-1 + prod_j (1+u_pj)^-1)/2 + 1/p ]
    with u_pj = p^(-1/2-z_j) precomputed per (p, node).
  * the p > P tail of log A_k is summed exactly against prime-zeta Taylor
    tables: log E_p = sum_{j>=2} L_{2j}(p^-z) p^-j with integer-coefficient
    symmetric polynomials L_{2j}, so
      sum_{p>P} log E_p = sum_j sum_i a_{j,i} i! [u^i] L_{2j}(e^{z u}),
    where Ptail_j(w) = sum_{p>P} p^-(j+w) = sum_i a_{j,i} w^i.  The
    [u^i] L_{2j}(e^{z u}) series are built per tuple with numpy complex128
    convolutions (the tail is a ~1e-4 correction, so double precision on
    it leaves A_k with ~1e-14 relative error); levels j = 2..5 cover
    radius <= 0.15 with room to spare.

Everything else runs in gmpy2 mpc at the configured precision.  The
extraction sum is monitored for cancellation: sum |term| / |coefficient|
is reported per coefficient, and the working precision must exceed the
cancellation magnitude by a comfortable margin or a ConvergenceError is
raised.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations, product

import gmpy2
import mpmath as mp
import numpy as np

from .specfun import cache_dir

DEFAULT_CUTOFF = 10_000
DEFAULT_DIGITS = 50
DEFAULT_RADIUS = 0.1
MAX_FAST_RADIUS = 0.15  # prime-zeta Taylor tables cover 2j*r <= 1.5 at j=5
_TAIL_LEVELS = (2, 3, 4, 5)
_TAIL_R = {2: 0.8, 3: 1.4, 4: 2.0, 5: 2.6}
_TAIL_SAMPLES = {2: 256, 3: 128, 4: 128, 5: 128}
_TAIL_TERMS = 96
_TAIL_DPS = 30


class ConvergenceError(ArithmeticError):
    pass


class XFactorPoleError(ValueError):
    pass


def default_points(k: int) -> int:
    return {1: 64, 2: 64, 3: 32}.get(k, 16)


@dataclass(frozen=True)
class ResidueConfig:
    radius: float = DEFAULT_RADIUS
    points: int = 0  # 0: pick by k
    digits: int = DEFAULT_DIGITS
    prime_cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        if not 0 < self.radius < 0.5:
            raise ValueError("contour radius must sit inside (0, 1/2)")
        if self.radius > MAX_FAST_RADIUS:
            raise ValueError(
                f"radius {self.radius} exceeds the tail-table domain "
                f"{MAX_FAST_RADIUS}; the arithmetic-factor tail correction "
                "is only tabulated for small contours"
            )
        if self.points and self.points & (self.points - 1):
            raise ValueError("points must be a power of two")
        if self.digits < 30:
            raise ValueError("digits >= 30 required")
        if self.prime_cutoff < 100:
            raise ValueError("prime cutoff >= 100 required")

    def points_for(self, k: int) -> int:
        pts = self.points or default_points(k)
        if pts < 2 * k:
            raise ValueError(f"need at least {2*k} nodes for k={k}")
        return pts


def _primes(n: int) -> np.ndarray:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


# ---------------------------------------------------------------------------
# gamma-factor X(s, a)


def x_factor(s, a: int):
    """X(s,a) = pi^(s-1/2) Gamma((1-s+a)/2) / Gamma((s+a)/2); X(1/2,a) = 1."""
    if a not in (0, 1):
        raise ValueError("a is 0 (d > 0) or 1 (d < 0)")
    s = mp.mpmathify(s)
    top = (1 - s + a) / 2
    bot = (s + a) / 2
    for arg in (top, bot):
        near = mp.nint(arg.real if hasattr(arg, "real") else arg)
        if near <= 0 and abs(arg - near) < mp.mpf("1e-12"):
            raise XFactorPoleError(f"gamma argument {arg} within 1e-12 of a pole")
    return mp.pi ** (s - mp.mpf(1) / 2) * mp.gamma(top) / mp.gamma(bot)


# ---------------------------------------------------------------------------
# prime-zeta tail tables


def _ptail_taylor(cutoff: int) -> dict:
    """Taylor coefficients a_{j,i} of sum_{p>cutoff} p^-(j+w) around w = 0,
    one row per level j; cached on disk.

    The full prime zeta P(j+w) is sampled on a circle (conjugate symmetry
    halves the samples) and FFT'd; the p <= cutoff part is subtracted in
    Taylor space, where its coefficients sum_p p^-j (-log p)^i / i! are
    plain positive-term sums (fsum in double precision, with the first few
    i at full precision since they dominate the correction).
    """
    path = cache_dir() / (f"ptail_c{cutoff}_d{_TAIL_DPS}_i{_TAIL_TERMS}_v2.npz")
    if path.exists():
        data = np.load(path)
        return {j: data[str(j)] for j in _TAIL_LEVELS}
    ps = _primes(cutoff)
    logs = np.log(ps.astype(np.float64))
    out = {}
    with mp.workdps(_TAIL_DPS):
        logs_mp = [mp.log(int(p)) for p in ps]
        for j in _TAIL_LEVELS:
            r = _TAIL_R[j]
            M = _TAIL_SAMPLES[j]
            samples = [mp.mpc(0)] * M
            for m in range(M // 2 + 1):
                w = r * mp.expjpi(mp.mpf(2 * m) / M)
                samples[m] = mp.primezeta(j + w)
            for m in range(M // 2 + 1, M):
                samples[m] = mp.conj(samples[M - m])
            coeffs = np.empty(_TAIL_TERMS + 1, dtype=np.float64)
            pj = ps.astype(np.float64) ** float(-j)
            ifac = 1.0
            for i in range(_TAIL_TERMS + 1):
                acc = mp.mpc(0)
                for m, f in enumerate(samples):
                    acc += f * mp.expjpi(mp.mpf(-2 * m * i) / M)
                full = acc.real / (M * mp.mpf(r) ** i)
                if i <= 2:
                    below = mp.fsum(
                        mp.exp(-j * lg) * (-lg) ** i for lg in logs_mp
                    ) / mp.factorial(i)
                    coeffs[i] = float(full - below)
                else:
                    below = math.fsum(pj * (-logs) ** i / ifac)
                    coeffs[i] = float(full) - below
                ifac *= i + 1
            out[j] = coeffs
    np.savez(path, **{str(j): v for j, v in out.items()})
    return out


def _tail_multipliers(cutoff: int) -> dict:
    tables = _ptail_taylor(cutoff)
    mults = {}
    for j, a in tables.items():
        fact = 1.0
        m = np.empty_like(a)
        for i in range(len(a)):
            m[i] = a[i] * fact
            fact *= i + 1
        mults[j] = m
    return mults


def _tail_log(z: np.ndarray, mults: dict) -> complex:
    """sum_{p > cutoff} log E_p(z) via the level tables; z is complex128."""
    k = z.shape[0]
    T = _TAIL_TERMS
    ymax = 2 * max(mults)

    def conv(x, y):
        return np.convolve(x, y)[: T + 1]

    # power sums pi_s(u) = sum_m exp(s z_m u)
    S = {}
    for s in range(1, ymax + 1):
        zs = s * z
        ser = np.empty(T + 1, dtype=np.complex128)
        ser[0] = k
        pw = np.ones(k, dtype=np.complex128)
        for i in range(1, T + 1):
            pw *= zs / i
            ser[i] = pw.sum()
        S[s] = ser
    # Pi_j (1 - y t_j)^-1 = exp(sum_s y^s pi_s / s)
    A = [np.zeros(T + 1, dtype=np.complex128) for _ in range(ymax + 1)]
    A[0][0] = 1.0
    for n in range(1, ymax + 1):
        acc = np.zeros(T + 1, dtype=np.complex128)
        for s in range(1, n + 1):
            acc += conv(S[s], A[n - s])
        A[n] = acc / n
    # bracket = even part + y^2, then its log
    Br = [A[n] if n % 2 == 0 else np.zeros(T + 1, np.complex128) for n in range(ymax + 1)]
    Br[2] = Br[2].copy()
    Br[2][0] += 1.0
    LB = [np.zeros(T + 1, dtype=np.complex128) for _ in range(ymax + 1)]
    for n in range(2, ymax + 1, 2):
        acc = Br[n].copy()
        for s in range(2, n, 2):
            acc -= (s / n) * conv(LB[s], Br[n - s])
        LB[n] = acc
    tail = 0.0 + 0.0j
    for j, mul in mults.items():
        Ln = LB[2 * j].copy()
        Ln -= (conv(S[j], S[j]) + S[2 * j]) / (2.0 * j)  # log prod (1 - y^2 t_i t_j)
        Ln[0] += (-1.0) ** j / j  # log (1 + y^2)^-1
        tail += np.dot(mul, Ln)
    return complex(tail)


# ---------------------------------------------------------------------------
# direct arithmetic-factor evaluation


def a_k_factor(k: int, prime_cutoff: int = DEFAULT_CUTOFF, dps: int = DEFAULT_DIGITS):
    """a_k = A_k(0,...,0): the truncated Euler product over p <= cutoff with
    the prime-zeta tail correction; returns mpf at the working precision."""
    if k < 1:
        raise ValueError("k >= 1")
    if prime_cutoff < 100:
        raise ValueError("prime cutoff >= 100 required")
    ps = _primes(prime_cutoff)
    with mp.workdps(dps + 10):
        acc = mp.mpf(1)
        K = k * (k + 1) // 2
        for p in ps:
            rp = 1 / mp.mpf(int(p))
            sq = mp.sqrt(rp)
            local = (
                ((1 - sq) ** -k + (1 + sq) ** -k) / 2 + rp
            ) * (1 - rp) ** K / (1 + rp)
            acc *= local
        tail = _tail_log(np.zeros(k), _tail_multipliers(prime_cutoff))
        return +(acc * mp.exp(mp.mpf(tail.real)))


def A_k_eval(z, prime_cutoff: int = DEFAULT_CUTOFF, dps: int = DEFAULT_DIGITS):
    """A_k at a point z = (z_1, ..., z_k), |Re z_j| < 1/2.

    For max |z_j| <= 0.15 the prime-zeta tail correction applies and the
    result carries ~13 digits beyond the truncated product; larger shifts
    fall back to a plain truncation at max(cutoff, 10^6) (slow decay, a few
    digits only).
    """
    z = [mp.mpmathify(v) for v in z]
    if any(abs(v.real) >= 0.5 for v in z):
        raise ValueError("A_k converges on |Re z_j| < 1/2 only")
    k = len(z)
    fast = all(abs(v) <= MAX_FAST_RADIUS for v in z)
    cutoff = prime_cutoff if fast else max(prime_cutoff, 10**6)
    ps = _primes(cutoff)
    with mp.workdps(dps + 10):
        acc = mp.mpc(1)
        zs = [mp.mpc(v) for v in z]
        for p in ps:
            rp = 1 / mp.mpf(int(p))
            u = [mp.power(int(p), -(mp.mpf(1) / 2 + zj)) for zj in zs]
            pa = mp.mpc(1)
            pb = mp.mpc(1)
            for uj in u:
                pa /= 1 - uj
                pb /= 1 + uj
            zfac = mp.mpc(1)
            for i in range(k):
                for j in range(i, k):
                    zfac *= 1 - u[i] * u[j]  # u_i u_j = p^(-1-z_i-z_j)
            acc *= zfac * ((pa + pb) / 2 + rp) / (1 + rp)
        if fast:
            zc = np.array([complex(v) for v in z], dtype=np.complex128)
            tail = _tail_log(zc, _tail_multipliers(prime_cutoff))
            acc *= mp.exp(mp.mpc(tail))
        return +acc


def ks_leading_coefficient(k: int, prime_cutoff: int = DEFAULT_CUTOFF, dps: int = DEFAULT_DIGITS):
    """a_k * prod_{j=1..k} j!/(2j)!: the conjectured leading coefficient."""
    with mp.workdps(dps + 10):
        v = a_k_factor(k, prime_cutoff, dps)
        for j in range(1, k + 1):
            v *= mp.mpf(math.factorial(j)) / math.factorial(2 * j)
        return +v


# ---------------------------------------------------------------------------
# moment polynomial container


@dataclass
class MomentPolynomial:
    k: int
    sign: int  # +1 or -1
    coeffs: list  # mpf, c_0 .. c_D
    meta: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        with mp.workdps(self.meta.get("digits", DEFAULT_DIGITS)):
            acc = mp.mpf(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return +acc

    def as_floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])


def save_polynomial(poly: MomentPolynomial, path) -> None:
    meta = poly.meta
    sign = "+" if poly.sign > 0 else "-"
    lines = [
        f"# k={poly.k} sign={sign} digits={meta.get('digits')} "
        f"prime_cutoff={meta.get('prime_cutoff')} radius={meta.get('radius')} "
        f"points={meta.get('points')}"
    ]
    for m, c in enumerate(poly.coeffs):
        lines.append(f"{m} {mp.nstr(c, 25)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_polynomial(path) -> MomentPolynomial:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    head = lines[0].lstrip("# ").split()
    meta = {}
    for item in head:
        key, val = item.split("=")
        meta[key] = val
    k = int(meta.pop("k"))
    sign = 1 if meta.pop("sign") == "+" else -1
    meta = {
        "digits": int(meta["digits"]),
        "prime_cutoff": int(meta["prime_cutoff"]),
        "radius": float(meta["radius"]),
        "points": int(meta["points"]),
    }
    coeffs = []
    with mp.workdps(max(meta["digits"], 30)):
        for ln in lines[1:]:
            m, v = ln.split()
            assert int(m) == len(coeffs)
            coeffs.append(mp.mpf(v))
    return MomentPolynomial(k, sign, coeffs, meta)


# ---------------------------------------------------------------------------
# the contour computation


def _mpf_to_mpfr(x):
    sign, man, e, _ = mp.mpf(x)._mpf_
    if man == 0:
        return gmpy2.mpfr(0)
    v = gmpy2.mpfr(man)
    v = gmpy2.mul_2exp(v, e) if e >= 0 else gmpy2.div_2exp(v, -e)
    return -v if sign else v


def _mpfr_to_mpf(x):
    man, e = x.as_mantissa_exp()
    return mp.mpf(int(man)) * mp.mpf(2) ** int(e)


def _mpc_to_mpc(x):
    x = mp.mpc(x)
    return gmpy2.mpc(_mpf_to_mpfr(x.real), _mpf_to_mpfr(x.imag))


def q_polynomial(
    k: int,
    sign: int,
    cfg: ResidueConfig = ResidueConfig(),
    check_points: bool = False,
    _extra_degrees: int = 2,
) -> MomentPolynomial:
    """Q_sign(k, x) coefficients by tensor-trapezoid contour extraction.

    check_points recomputes with twice the nodes per circle and raises
    ConvergenceError if any coefficient moves by more than
    10^(-digits/2) relative.
    """
    if k < 1 or k > 8:
        raise ValueError("k in 1..8")
    if sign not in (1, -1):
        raise ValueError("sign is +1 or -1")
    coeffs, meta = _q_contour(k, sign, cfg, cfg.points_for(k), _extra_degrees)
    if check_points:
        coeffs2, _ = _q_contour(k, sign, cfg, 2 * cfg.points_for(k), _extra_degrees)
        tol = mp.mpf(10) ** (-(cfg.digits // 2))
        worst = max(
            abs(a - b) / max(abs(a), mp.mpf(1e-30))
            for a, b in zip(coeffs, coeffs2)
        )
        meta["points_doubling_change"] = float(worst)
        if worst > tol:
            raise ConvergenceError(
                f"doubling nodes moved coefficients by {mp.nstr(worst, 3)}"
            )
        coeffs = coeffs2
    return MomentPolynomial(k, sign, coeffs, meta)


def _q_contour(k: int, sign: int, cfg: ResidueConfig, N: int, extra: int):
    a = 0 if sign > 0 else 1
    D = k * (k + 1) // 2
    dps = cfg.digits + 12 + 2 * k
    prec = int(dps * 3.33) + 4
    ps = [int(p) for p in _primes(cfg.prime_cutoff)]
    mults = _tail_multipliers(cfg.prime_cutoff)
    with mp.workdps(dps), gmpy2.context(precision=prec):
        half = N // 2
        r = mp.mpf(cfg.radius)
        nodes_mp = []
        for n in range(half):
            theta = mp.mpf(2 * n) / N + mp.mpf(1) / (2 * N)
            nodes_mp.append(r * mp.expjpi(theta))
        nodes_mp += [-g for g in nodes_mp]  # exact antipodes
        nodes = [_mpc_to_mpc(g) for g in nodes_mp]
        nodes_c128 = np.array([complex(g) for g in nodes_mp], dtype=np.complex128)

        # u_{p,n} = p^(-g_n); v-/v+ = (1 -/+ p^(-1/2) u)^(-1)
        one = gmpy2.mpfr(1)
        vm = []
        vp = []
        us = []
        invp = []
        for p in ps:
            lp = gmpy2.log(gmpy2.mpfr(p))
            sq = gmpy2.sqrt(gmpy2.mpfr(1) / p)
            invp.append(gmpy2.mpfr(1) / p)
            row_u = []
            row_m = []
            row_p = []
            for g in nodes:
                pu = gmpy2.exp(-g * lp)  # p^(-g)
                u = pu * sq  # p^(-1/2-g)
                row_u.append(pu)
                row_m.append(one / (one - u))
                row_p.append(one / (one + u))
            us.append(row_u)
            vm.append(row_m)
            vp.append(row_p)
        # per-node diagonal factor: zeta(1+2g) * prod_p (1-p^(-1-2g))
        #   * X(1/2+g,a)^(-1/2) * g^-(2k-1) * (g/N)
        xvals = [x_factor(mp.mpf(1) / 2 + g, a) for g in nodes_mp]
        if any(v.real <= 0 for v in xvals):
            raise ConvergenceError("X(1/2+z,a) leaves the right half plane; branch fault")
        diag = []
        for n, g in enumerate(nodes_mp):
            v = _mpc_to_mpc(mp.zeta(1 + 2 * g) / mp.sqrt(xvals[n]) * g ** (-(2 * k - 2)) / N)
            for idx in range(len(ps)):
                u = us[idx][n]
                v *= one - invp[idx] * u * u
            diag.append(v)
        # pair table for i < j: zeta(1+w) w^2 (g_b-g_a)^2 prod_p (1-p^(-1-w)),
        # w = g_a + g_b; exact zero on antipodal pairs
        pair = [[None] * N for _ in range(N)]
        for i in range(N):
            for j in range(i, N):
                w = nodes_mp[i] + nodes_mp[j]
                if abs(j - i) == half:  # w == 0 exactly; Delta^2 vanishes
                    pair[i][j] = pair[j][i] = gmpy2.mpc(0)
                    continue
                base = mp.zeta(1 + w) * w**2 * (nodes_mp[j] - nodes_mp[i]) ** 2
                val = _mpc_to_mpc(base)
                zp = gmpy2.mpc(1)
                for idx in range(len(ps)):
                    zp *= one - invp[idx] * us[idx][i] * us[idx][j]
                pair[i][j] = pair[j][i] = val * zp
        const = gmpy2.mpfr(1)
        for idx in range(len(ps)):
            const /= one + invp[idx]

        sums = [gmpy2.mpc(0) for _ in range(D + 1 + extra)]
        abssums = [0.0] * (D + 1 + extra)
        npairs = list(combinations(range(k), 2))
        half_idx = list(range(half))
        for classes in combinations(half_idx, k):
            for signs_ in product((0, half), repeat=k):
                tup = tuple(classes[i] + signs_[i] for i in range(k))
                B = gmpy2.mpc(const)
                for (i, j) in npairs:
                    B *= pair[tup[i]][tup[j]]
                for n in tup:
                    B *= diag[n]
                euler = gmpy2.mpc(1)
                for idx in range(len(ps)):
                    arow = vm[idx]
                    brow = vp[idx]
                    pa = arow[tup[0]]
                    pb = brow[tup[0]]
                    for t in range(1, k):
                        pa *= arow[tup[t]]
                        pb *= brow[tup[t]]
                    euler *= (pa + pb) * 0.5 + invp[idx]
                B *= euler
                tail = _tail_log(nodes_c128[list(tup)], mults)
                B *= gmpy2.exp(gmpy2.mpc(tail.real, tail.imag))
                S = nodes[tup[0]]
                for t in range(1, k):
                    S = S + nodes[tup[t]]
                P = B
                absP = abs(gmpy2.mpc(B))
                absS = abs(S)
                for m in range(D + 1 + extra):
                    sums[m] += P
                    abssums[m] += float(absP)
                    P = P * S
                    absP = absP * absS

        pref = mp.mpf((-1) ** (k * (k - 1) // 2) * 2**k)
        coeffs = []
        conds = []
        imag_worst = 0.0
        denom = mp.mpf(1)  # 2^m m!
        for m in range(D + 1 + extra):
            raw = mp.mpc(_mpfr_to_mpf(sums[m].real), _mpfr_to_mpf(sums[m].imag))
            val = pref * raw / denom
            denom *= 2 * (m + 1)
            mag = float(abs(val))
            conds.append(abssums[m] / max(float(abs(raw)), 1e-300))
            imag_worst = max(imag_worst, abs(float(val.imag)) / max(mag, 1e-300))
            coeffs.append(val.real)
        # the probe degrees past D must have collapsed to noise
        probe = max(abs(c) for c in coeffs[D + 1 :]) if extra else mp.mpf(0)
        scale = max(abs(c) for c in coeffs[: D + 1])
        if imag_worst > 10.0 ** (-(cfg.digits // 2)):
            raise ConvergenceError(f"imaginary residue {imag_worst:.2e}")
        meta = {
            "digits": cfg.digits,
            "prime_cutoff": cfg.prime_cutoff,
            "radius": cfg.radius,
            "points": N,
            "imag_worst": imag_worst,
            "cancel_condition": max(conds[: D + 1]),
            "probe_ratio": float(probe / scale),
        }
        if extra and probe > scale * mp.mpf("1e-8"):
            raise ConvergenceError(
                f"degree-{D} truncation failed: probe coefficient ratio "
                f"{mp.nstr(probe / scale, 3)}"
            )
        # effective digits left after cancellation must cover the target
        lost = math.log10(max(meta["cancel_condition"], 1.0))
        if lost > cfg.digits - 8:
            raise ConvergenceError(
                f"cancellation costs {lost:.1f} digits at {cfg.digits} working digits"
            )
        coeffs = [+c for c in coeffs[: D + 1]]
    return coeffs, meta


# ---------------------------------------------------------------------------
# exact integrals of the polynomials


def q_integrated(poly: MomentPolynomial, X):
    """int_1^X Q(k, log t) dt via int (log t)^m dt = t sum_j (-1)^j m!/(m-j)! log^(m-j) t."""
    if X < 1:
        raise ValueError("X >= 1")
    with mp.workdps(poly.meta.get("digits", DEFAULT_DIGITS) + 10):
        X = mp.mpf(X)
        lx = mp.log(X)
        total = mp.mpf(0)
        for m, c in enumerate(poly.coeffs):
            fall = mp.mpf(1)
            s = mp.mpf(0)
            for j in range(m + 1):
                s += (-1) ** j * fall * lx ** (m - j)
                fall *= m - j
            total += c * (X * s - (-1) ** m * mp.factorial(m))
        return +total


def q_integrated_weighted(poly: MomentPolynomial, X):
    """int_1^X Q(k, log t) (1 - t/X) dt, exact antiderivatives throughout."""
    if X <= 1:
        raise ValueError("X > 1")
    with mp.workdps(poly.meta.get("digits", DEFAULT_DIGITS) + 10):
        X = mp.mpf(X)
        lx = mp.log(X)
        total = mp.mpf(0)
        for m, c in enumerate(poly.coeffs):
            fall = mp.mpf(1)
            s = mp.mpf(0)  # int_1^X log^m
            s2 = mp.mpf(0)  # int_1^X t log^m
            for j in range(m + 1):
                s += (-1) ** j * fall * lx ** (m - j)
                s2 += (-1) ** j * fall * lx ** (m - j) / mp.mpf(2) ** (j + 1)
                fall *= m - j
            im = X * s - (-1) ** m * mp.factorial(m)
            jm = X * X * s2 - (-1) ** m * mp.factorial(m) / mp.mpf(2) ** (m + 1)
            total += c * (im - jm / X)
        return +total


def moment_prediction(poly: MomentPolynomial, X):
    """(3/pi^2) int_1^X Q(k, log t) dt: the conjectured moment for |d| <= X."""
    with mp.workdps(poly.meta.get("digits", DEFAULT_DIGITS) + 10):
        return +(3 / mp.pi**2 * q_integrated(poly, X))
