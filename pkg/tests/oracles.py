"""Reference implementations that share no code with the package."""

import math

import mpmath


def is_prime_td(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def primes_td(limit: int) -> list[int]:
    return [n for n in range(2, limit + 1) if is_prime_td(n)]


def composite_wheel_values(lo: int, hi: int) -> set[int]:
    return {v for v in range(lo, hi + 1) if v % 2 and v % 3 and v > 1 and not is_prime_td(v)}


def zeta_eta_series(s: complex, dps: int = 30) -> complex:
    """zeta through the alternating eta series with Borwein's acceleration.

    The accelerated sum cancels heavily for large |t|, so the working
    precision grows with |t|; mpmath supplies only the arithmetic.
    """
    s = complex(s)
    n = int(30 + 1.5 * abs(s.imag) + dps)
    with mpmath.workdps(dps + int(0.7 * abs(s.imag))):
        sm = mpmath.mpc(s.real, s.imag)
        d = []
        acc = mpmath.mpf(0)
        for i in range(n + 1):
            acc += (mpmath.factorial(n + i - 1) * mpmath.mpf(4) ** i * n
                    / (mpmath.factorial(n - i) * mpmath.factorial(2 * i)))
            d.append(acc)
        total = mpmath.mpc(0)
        for k in range(n):
            total += (-1) ** k * (d[k] - d[n]) / mpmath.power(k + 1, sm)
        return complex(-total / (d[n] * (1 - mpmath.power(2, 1 - sm))))


def completed_zeta_sides(s: complex) -> tuple[complex, complex]:
    """Both sides of pi^(-s/2) Gamma(s/2) zeta(s) = pi^(-(1-s)/2) Gamma((1-s)/2) zeta(1-s), zeta excluded."""
    s = mpmath.mpc(s.real, s.imag)
    a = mpmath.power(mpmath.pi, -s / 2) * mpmath.gamma(s / 2)
    b = mpmath.power(mpmath.pi, -(1 - s) / 2) * mpmath.gamma((1 - s) / 2)
    return complex(a), complex(b)


def classical_sieve(limit: int) -> list[int]:
    """Plain sieve of Eratosthenes over every integer, bytearray based."""
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = bytes(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(flags) if f]
