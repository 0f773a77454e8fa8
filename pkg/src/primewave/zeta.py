"""Riemann zeta on and around the critical strip.

Evaluation is Euler-Maclaurin summation in double precision: N-1 leading terms
plus 12 Bernoulli corrections, N ~ max(20, 1.3|t|).  For Re(s) < 0 the
functional equation maps the point into the right half plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, IncompleteScanError, PoleError, ResolutionError, ToleranceError

LN_PI = math.log(math.pi)
LN_2PI = math.log(2 * math.pi)
EM_TERMS = 12
MIN_TOL = 1e-14
ACCURATE_T = 520.0
# left of this the direct sum loses digits to cancellation (partial sums grow like N^(1-sigma))
REFLECT_BELOW = -1e-3   # reflecting closer to 0 would evaluate zeta(1-s) at the pole


def _bernoulli(n_max: int) -> list[Fraction]:
    b = [Fraction(0)] * (n_max + 1)
    b[0] = Fraction(1)
    for m in range(1, n_max + 1):
        b[m] = -sum(math.comb(m + 1, k) * b[k] for k in range(m)) / (m + 1)
    return b


_B = _bernoulli(2 * EM_TERMS + 2)
# B_{2k} / (2k)!
EM_COEF = np.array([float(_B[2 * k] / math.factorial(2 * k)) for k in range(1, EM_TERMS + 1)])
# B_{2k} / (2k (2k-1)) for the Stirling series
STIRLING_COEF = np.array([float(_B[2 * k] / (2 * k * (2 * k - 1))) for k in range(1, 11)])


def loggamma(z):
    """Principal branch of log Gamma via recurrence shift to Re z >= 12 and the Stirling series."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z).copy()
    shift = np.zeros(z.shape, dtype=complex)
    while True:
        small = z.real < 12
        if not small.any():
            break
        shift[small] += np.log(z[small])
        z[small] += 1
    inv = 1 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    for c in STIRLING_COEF[::-1]:
        series = series * inv2 + c
    out = (z - 0.5) * np.log(z) - z + 0.5 * LN_2PI + series * inv - shift
    return out[0] if scalar else out


def terms_for(t) -> int:
    return max(20, math.ceil(1.3 * abs(t)))


def _em_tail(s, N):
    """Euler-Maclaurin remainder terms after the partial sum of n < N."""
    lnN = math.log(N)
    nms = np.exp(-s * lnN)                 # N^{-s}
    tail = N * nms / (s - 1) + 0.5 * nms
    poch = s.copy()                        # s (s+1) ... (s+2k-2)
    pw = nms / N                           # N^{-s-2k+1}
    inv_n2 = 1.0 / (N * N)
    for k in range(EM_TERMS):
        tail = tail + EM_COEF[k] * poch * pw
        poch = poch * (s + 2 * k + 1) * (s + 2 * k + 2)
        pw = pw * inv_n2
    return tail


def _em_tail_prime(s, N):
    lnN = math.log(N)
    nms = np.exp(-s * lnN)
    d = (-lnN * N * nms / (s - 1) - N * nms / (s - 1) ** 2) - 0.5 * lnN * nms
    p, dp = s.copy(), np.ones_like(s)
    pw = nms / N
    inv_n2 = 1.0 / (N * N)
    for k in range(EM_TERMS):
        d = d + EM_COEF[k] * pw * (dp - lnN * p)
        for j in (2 * k + 1, 2 * k + 2):
            dp = dp * (s + j) + p
            p = p * (s + j)
        pw = pw * inv_n2
    return d


@lru_cache(maxsize=64)
def _logs(N: int) -> np.ndarray:
    return np.log(np.arange(1, N, dtype=float))


def _em_block(s, N, derivative=False):
    logs = _logs(N)
    out = np.empty(s.shape, dtype=complex)
    chunk = max(1, 2_000_000 // len(logs))
    for i in range(0, len(s), chunk):
        ss = s[i:i + chunk]
        powers = np.exp(-np.outer(ss, logs))
        if derivative:
            out[i:i + chunk] = -(powers @ logs) + _em_tail_prime(ss, N)
        else:
            out[i:i + chunk] = powers.sum(axis=1) + _em_tail(ss, N)
    return out


def _check_points(s):
    if not np.all(np.isfinite(s)):
        raise DomainError("zeta arguments must be finite")
    if np.any(s == 1):
        raise PoleError("zeta has a pole at s = 1")


def _grouped(s, fn):
    """Apply ``fn(points, N)`` with points grouped by their term count (rounded up to 32)."""
    n_req = np.maximum(20, np.ceil(1.3 * np.abs(s.imag))).astype(int)
    n_req = ((n_req + 31) // 32) * 32
    out = np.empty(s.shape, dtype=complex)
    for N in np.unique(n_req):
        sel = n_req == N
        out[sel] = fn(s[sel], int(N))
    return out


def _log_sin(z):
    """log sin(z) that stays finite when |Im z| is large (branch irrelevant, only exp is used)."""
    up = z.imag >= 0
    zz = np.where(up, z, np.conj(z))
    # sin z = (i/2) e^{-iz} (1 - e^{2iz}); e^{2iz} is small for Im z >= 0
    out = -1j * zz + math.log(0.5) + 0.5j * math.pi + np.log(1 - np.exp(2j * zz))
    return np.where(up, out, np.conj(out))


def _reflect(s):
    """zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s), used for Re(s) < 0."""
    w = 1 - s
    logfac = s * math.log(2) + (s - 1) * LN_PI + loggamma(w)
    # the sine vanishes at the trivial zeros; keep it out of the log there
    exact = np.abs(s.imag) < 1
    sin_part = np.ones(s.shape, dtype=complex)
    sin_part[exact] = np.sin(np.pi * s[exact] / 2)
    logs = logfac + np.where(exact, 0, _log_sin(np.pi * s / 2))
    return np.exp(logs) * sin_part * zeta_array(w)


def zeta_array(s) -> np.ndarray:
    """Vectorised zeta at arbitrary complex points."""
    s = np.asarray(s, dtype=complex)
    shape = s.shape
    s = s.ravel()
    _check_points(s)
    out = np.empty(s.shape, dtype=complex)
    left = s.real < REFLECT_BELOW
    if left.any():
        out[left] = _reflect(s[left])
    if (~left).any():
        out[~left] = _grouped(s[~left], _em_block)
    return out.reshape(shape)


def zeta_prime_array(s) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    shape = s.shape
    s = s.ravel()
    _check_points(s)
    out = np.empty(s.shape, dtype=complex)
    left = s.real < -2
    if left.any():
        h = 1e-5
        out[left] = (zeta_array(s[left] + h) - zeta_array(s[left] - h)) / (2 * h)
    if (~left).any():
        out[~left] = _grouped(s[~left], lambda ss, N: _em_block(ss, N, derivative=True))
    return out.reshape(shape)


def _remainder_bound(s: complex, N: int) -> float:
    k = EM_TERMS + 1
    b = abs(float(_B[2 * k] / math.factorial(2 * k)))
    poch = 1.0
    for j in range(2 * k - 1):
        poch *= abs(s + j)
    return b * poch * N ** (-s.real - 2 * k + 1) * abs(s + 2 * k - 1) / (s.real + 2 * k - 1)


def zeta(s: complex, tol: float = 1e-10) -> complex:
    """zeta(s) with the Euler-Maclaurin term count grown until the remainder bound meets ``tol``."""
    s = complex(s)
    if tol < MIN_TOL:
        raise ToleranceError(f"tolerance {tol} below double-precision floor {MIN_TOL}")
    _check_points(np.array([s]))
    if s.real < REFLECT_BELOW:
        return complex(_reflect(np.array([s]))[0])
    N = terms_for(s.imag)
    while _remainder_bound(s, N) > tol / 10 and N < 1 << 16:
        N *= 2
    return complex(_em_block(np.array([s]), N)[0])


def zeta_grid(sigmas, ts, block: int = 2048) -> np.ndarray:
    """zeta on the tensor grid ts x sigmas, shape (len(ts), len(sigmas)).

    The partial sum factorises as n^-sigma times exp(-i t ln n), so each block
    of rows is two real matrix products.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    ts = np.asarray(ts, dtype=float)
    if np.any(sigmas < -2):
        raise DomainError("zeta_grid covers Re(s) >= -2 only")
    out = np.empty((len(ts), len(sigmas)), dtype=complex)
    for i in range(0, len(ts), block):
        tb = ts[i:i + block]
        N = terms_for(np.abs(tb).max())
        N = ((N + 31) // 32) * 32
        logs = _logs(N)
        amp = np.exp(-np.outer(sigmas, logs))          # (ns, N-1)
        ph = np.outer(logs, tb)                        # (N-1, nt)
        re = amp @ np.cos(ph)
        im = -(amp @ np.sin(ph))
        s = sigmas[None, :] + 1j * tb[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = _em_tail(s.ravel(), N).reshape(s.shape)
        out[i:i + block] = (re + 1j * im).T + tail
    return out


# ------------------------------------------------------ critical line tools

def riemann_siegel_theta(t):
    """theta(t) = arg Gamma(1/4 + it/2) - (t/2) ln pi, continuous in t."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("theta is defined here for t >= 0")
    out = loggamma(0.25 + 0.5j * t).imag - 0.5 * t * LN_PI
    return float(out) if out.ndim == 0 else out


def hardy_z(t):
    """Hardy's Z(t) = exp(i theta(t)) zeta(1/2 + it), a real function."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    z = np.exp(1j * riemann_siegel_theta(t)) * zeta_array(0.5 + 1j * t)
    return float(z.real[0]) if scalar else z.real


def zero_count_estimate(t: float) -> float:
    """Smooth part of N(t): theta(t)/pi + 1."""
    return riemann_siegel_theta(t) / math.pi + 1


@dataclass
class ZeroList:
    zeros: list[float]
    brackets: list[tuple[float, float]]
    step: float = 0.05
    estimate: float = 0.0

    def __len__(self):
        return len(self.zeros)


def _bisect_sign(f, a, b, fa, width):
    while b - a > width:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0:
            return m, m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return a, b


def _scan(t_lo, t_hi, step):
    n = max(2, int(math.ceil((t_hi - t_lo) / step)) + 1)
    grid = np.linspace(t_lo, t_hi, n)
    return grid, hardy_z(grid)


def _sign_changes(grid, z):
    return np.nonzero(np.signbit(z[:-1]) != np.signbit(z[1:]))[0]


def _suspects(grid, z):
    """Cells where |Z| dips to a local minimum without a sign change (possible missed pair)."""
    a = np.abs(z)
    idx = np.nonzero((a[1:-1] < a[:-2]) & (a[1:-1] < a[2:]))[0] + 1
    same = np.signbit(z[idx - 1]) == np.signbit(z[idx + 1])
    return idx[same & (a[idx] < 1.0)]


def find_zeros(t_lo: float, t_hi: float, step: float = 0.05, width: float = 1e-6,
               max_refine: int = 6) -> ZeroList:
    """Critical-line zeros in (t_lo, t_hi) from sign changes of Z, bisected to ``width``."""
    if not (0 <= t_lo < t_hi <= ACCURATE_T):
        raise DomainError(f"need 0 <= t_lo < t_hi <= {ACCURATE_T}")
    grid, z = _scan(t_lo, t_hi, step)
    # refine locally where |Z| has a shallow minimum without crossing zero
    for _ in range(max_refine):
        sus = _suspects(grid, z)
        if not len(sus):
            break
        extra_t = np.concatenate([np.linspace(grid[i - 1], grid[i + 1], 41)[1:-1] for i in sus])
        grid = np.concatenate([grid, extra_t])
        order = np.argsort(grid, kind="stable")
        grid = grid[order]
        z = np.concatenate([z, hardy_z(extra_t)])[order]
        keep = np.concatenate([[True], np.diff(grid) > 0])
        grid, z = grid[keep], z[keep]
        if len(_suspects(grid, z)) == len(sus):
            break

    def f(t):
        return hardy_z(t)

    zeros, brackets = [], []
    for i in _sign_changes(grid, z):
        a, b = _bisect_sign(f, grid[i], grid[i + 1], z[i], width)
        brackets.append((float(a), float(b)))
        zeros.append(float(0.5 * (a + b)))
    est = zero_count_estimate(t_hi) - zero_count_estimate(t_lo) if t_lo > 0 else zero_count_estimate(t_hi) - 1
    # |S(t)| stays below ~1.5 for t <= 520, so the count may differ from the smooth estimate by < 3
    if abs(len(zeros) - est) >= 3:
        if step > 1e-3:
            return find_zeros(t_lo, t_hi, step / 2, width, max_refine)
        raise IncompleteScanError(
            f"found {len(zeros)} zeros in ({t_lo}, {t_hi}) but smooth count is {est:.2f}",
            ZeroList(zeros, brackets, step, est))
    return ZeroList(zeros, brackets, step, est)


@dataclass
class PhaseTrace:
    sigma: float
    t: np.ndarray
    theta: np.ndarray
    jumps: list[float] = field(default_factory=list)
    jump_flags: np.ndarray | None = None


PHASE_WINDOW = 0.3


def _on_critical_line(sigma: float) -> bool:
    return abs(sigma - 0.5) < 1e-12


def phase_trace(sigma: float, t_lo: float, t_hi: float, step: float) -> PhaseTrace:
    """Unwrapped arg zeta(sigma + it) with pi-jumps flagged.

    A step whose raw phase change lies within 0.3 of ±pi is a jump; on the
    critical line it must also coincide with a sign change of Z.  Jumps are
    always unwrapped upward by +pi.
    """
    if step <= 0 or t_hi <= t_lo:
        raise DomainError("need step > 0 and t_lo < t_hi")
    n = int(round((t_hi - t_lo) / step)) + 1
    t = t_lo + step * np.arange(n)
    if abs(sigma - 1) < 1e-12:
        t = t[np.abs(t) > step / 2]
    v = zeta_array(sigma + 1j * t)
    d = np.angle(v[1:] / v[:-1])
    near_pi = np.abs(np.abs(d) - math.pi) < PHASE_WINDOW
    if _on_critical_line(sigma):
        z = hardy_z(t)
        flips = np.signbit(z[:-1]) != np.signbit(z[1:])
        jump = near_pi & flips
        # a sign change of Z without a clean pi step means the step hid the jump
        ambiguous = ((np.abs(d) > math.pi - PHASE_WINDOW) | flips) & ~jump
    else:
        jump = near_pi
        ambiguous = np.zeros_like(jump)
    if ambiguous.sum() > max(3, 0.05 * len(d)):
        raise ResolutionError(f"step {step} too coarse to unwrap the phase at sigma={sigma}")
    d = np.where(jump, np.mod(d, 2 * math.pi), d)
    theta = np.concatenate([[np.angle(v[0])], np.angle(v[0]) + np.cumsum(d)])
    flags = np.concatenate([[False], jump])
    # report the jump at the midpoint of the step where it happens
    jumps = [float(0.5 * (t[i] + t[i + 1])) for i in np.nonzero(jump)[0]]
    return PhaseTrace(sigma, t, theta, jumps, flags)


@dataclass
class ArgandPath:
    sigma: float
    t: np.ndarray
    values: np.ndarray
    approaches: list[tuple[float, float]]

    @property
    def origin_approaches(self) -> int:
        return len(self.approaches)


def _golden_min(f, a, b, iters=60):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def argand_path(sigma: float, t_lo: float, t_hi: float, step: float,
                threshold: float = 1e-2) -> ArgandPath:
    """Curve t -> zeta(sigma + it) and its approaches to the origin.

    An approach is a local minimum of |zeta| along the samples that, once
    refined by golden-section search, falls below ``threshold``.
    """
    if step <= 0 or t_hi <= t_lo:
        raise DomainError("need step > 0 and t_lo < t_hi")
    n = int(round((t_hi - t_lo) / step)) + 1
    t = t_lo + step * np.arange(n)
    if abs(sigma - 1) < 1e-12:
        t = t[np.abs(t) > step / 2]
    v = zeta_array(sigma + 1j * t)
    a = np.abs(v)
    idx = np.nonzero((a[1:-1] <= a[:-2]) & (a[1:-1] < a[2:]))[0] + 1
    approaches = []
    for i in idx:
        tm, fm = _golden_min(lambda x: abs(zeta(complex(sigma, x))), t[i - 1], t[i + 1])
        if fm < threshold:
            approaches.append((float(tm), float(fm)))
    return ArgandPath(sigma, t, v, approaches)
