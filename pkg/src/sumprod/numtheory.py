"""Exact integer number-theory kernel.

Sieves, multiplicative-function tables, Ramanujan sums via the Kluyver
divisor identity, best rational approximation, and compensated harmonic /
Mertens sums.  Everything here is deterministic and uses exact integer
arithmetic where the result is an integer; floating sums go through
math.fsum, which is exact up to the final rounding and independent of
summation blocking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError, RangeError

SIEVE_LIMIT_BUDGET = 50_000_000


@dataclass
class PrimeTable:
    """Primality bitmap over [0, limit]; flags[n] is True iff n is prime."""

    limit: int
    flags: np.ndarray

    def is_prime(self, n: int) -> bool:
        if n < 0 or n > self.limit:
            raise RangeError(f"n={n} outside table limit {self.limit}")
        return bool(self.flags[n])

    def primes_array(self, lo: int = 2, hi: int | None = None) -> np.ndarray:
        """Primes in [lo, hi) as an int64 array (internal fast path)."""
        if hi is None:
            hi = self.limit + 1
        lo = max(lo, 0)
        return np.flatnonzero(self.flags[lo:hi]).astype(np.int64) + lo


def sieve_primes(limit: int) -> PrimeTable:
    """Sieve of Eratosthenes up to and including limit."""
    if limit < 2:
        raise DomainError("sieve limit must be >= 2")
    if limit > SIEVE_LIMIT_BUDGET:
        raise CapacityError(
            f"sieve limit {limit} exceeds budget {SIEVE_LIMIT_BUDGET}")
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p:: p] = False
    return PrimeTable(limit=limit, flags=flags)


def primes_in(table: PrimeTable, lo: int, hi: int) -> list[int]:
    """Sorted primes in the half-open interval [lo, hi)."""
    if not (2 <= lo < hi):
        raise DomainError(f"need 2 <= lo < hi, got [{lo}, {hi})")
    if hi > table.limit:
        raise RangeError(f"hi={hi} exceeds table limit {table.limit}")
    return table.primes_array(lo, hi).tolist()


def _is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def mertens_sum(primes) -> float:
    """Compensated sum of 1/p over the given primes, left to right."""
    primes = list(primes)
    for p in primes:
        if not _is_prime_trial(int(p)):
            raise DomainError(f"{p} is not prime")
    return math.fsum(1.0 / p for p in primes)


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization of n >= 1 as (prime, exponent) pairs."""
    if n < 1:
        raise DomainError("factorize needs n >= 1")
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def ramanujan_sum(q: int, n: int) -> int:
    """c_q(n) = sum over d | gcd(n, q) of d * mu(q/d), exact integer."""
    if q < 1:
        raise DomainError("ramanujan_sum needs q >= 1")
    fac_q = dict(factorize(q)) if q > 1 else {}
    g = math.gcd(n, q)
    total = 0
    for d in divisors(g):
        # mu(q/d): q/d has exponent fac_q[p] - (exponent of p in d)
        mu = 1
        rem = dict(fac_q)
        for p, e in factorize(d) if d > 1 else []:
            rem[p] = rem[p] - e
        for p, e in rem.items():
            if e >= 2:
                mu = 0
                break
            if e == 1:
                mu = -mu
        total += d * mu
    return total


@dataclass(frozen=True)
class RationalApprox:
    """Best rational approximation record: q minimizes ||q*theta|| mod 1."""

    q: int
    a: int
    err: float


_DIRECT_SCAN_MAX = 10 ** 6


def _dist_to_int(x: float) -> float:
    return abs(x - round(x))


def best_rational_approx(theta: float, qmax: int) -> RationalApprox:
    """q <= qmax minimizing ||q*theta||_{R/Z}; ties broken by smallest q.

    For qmax <= 1e6 a direct vectorized scan guarantees the true
    minimizer; above that, continued-fraction convergents are used
    (the minimizer over a denominator cap is always a convergent).
    """
    if qmax < 1:
        raise DomainError("qmax must be >= 1")
    theta = theta % 1.0
    if qmax <= _DIRECT_SCAN_MAX:
        qs = np.arange(1, qmax + 1, dtype=np.float64)
        x = qs * theta
        frac = x - np.floor(x)
        err = np.minimum(frac, 1.0 - frac)
        i = int(np.argmin(err))  # argmin takes first index: smallest q on ties
        q = i + 1
        return RationalApprox(q=q, a=round(q * theta), err=float(err[i]))
    # Convergents of the exact binary rational theta.  The minimizer of
    # ||q*theta|| over q <= qmax is always a convergent denominator.
    from fractions import Fraction

    frac_theta = Fraction(theta)
    a, b = frac_theta.numerator, frac_theta.denominator
    qm2, qm1 = 1, 0  # q_{-2}, q_{-1}
    best_q, best_err = 1, _dist_to_int(theta)
    while b:
        ai = a // b
        qi = ai * qm1 + qm2
        if qi > qmax:
            break
        if qi >= 1:
            e = _dist_to_int(qi * theta)
            if e < best_err:
                best_q, best_err = qi, e
        qm2, qm1 = qm1, qi
        a, b = b, a % b
    return RationalApprox(q=best_q, a=round(best_q * theta), err=best_err)


@lru_cache(maxsize=4096)
def _harmonic_int(m: int) -> float:
    return math.fsum(1.0 / n for n in range(1, m + 1))


def harmonic(m: float) -> float:
    """H_m = sum of 1/n for n <= m, compensated; m may be a real >= 1."""
    if m < 1:
        raise DomainError("harmonic needs m >= 1")
    return _harmonic_int(int(math.floor(m)))


@dataclass
class MultiplicativeTables:
    """mu, phi, tau and von Mangoldt Lambda tabulated on [0, limit]."""

    limit: int
    mobius: np.ndarray
    phi: np.ndarray
    tau: np.ndarray
    vonmangoldt: np.ndarray

    @classmethod
    def build(cls, limit: int) -> "MultiplicativeTables":
        if limit < 2:
            raise DomainError("table limit must be >= 2")
        if limit > SIEVE_LIMIT_BUDGET:
            raise CapacityError(
                f"table limit {limit} exceeds budget {SIEVE_LIMIT_BUDGET}")
        table = sieve_primes(limit)
        primes = table.primes_array()

        mob = np.ones(limit + 1, dtype=np.int64)
        phi = np.arange(limit + 1, dtype=np.int64)
        lam = np.zeros(limit + 1, dtype=np.float64)
        for p in primes.tolist():
            mob[p::p] *= -1
            sq = p * p
            if sq <= limit:
                mob[sq::sq] = 0
            phi[p::p] -= phi[p::p] // p
            logp = math.log(p)
            pk = p
            while pk <= limit:
                lam[pk] = logp
                pk *= p
        mob[0] = 0

        tau = np.zeros(limit + 1, dtype=np.int64)
        for d in range(1, limit + 1):
            tau[d::d] += 1
        tau[0] = 0
        return cls(limit=limit, mobius=mob, phi=phi, tau=tau, vonmangoldt=lam)

    def squarefree_up_to(self, bound: int) -> np.ndarray:
        """Squarefree q in [1, bound] as an int64 array."""
        if bound > self.limit:
            raise RangeError(f"bound {bound} exceeds table limit {self.limit}")
        return np.flatnonzero(self.mobius[: bound + 1] != 0).astype(np.int64)
