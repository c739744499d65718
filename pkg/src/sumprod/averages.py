"""Logarithmic and uniform averaging operators plus defect measurement.

The central objects are 1-bounded complex functions sampled on an integer
window.  Each lemma-style operation returns a DefectRecord holding the
measured left-hand side, the explicit error envelope it is compared
against, and their ratio.  Out-of-window evaluations contribute 0 and are
counted, never silent: truncation of a function that morally lives on all
of N must be observable in the record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RangeError
from .numtheory import harmonic


def cfsum(values: np.ndarray) -> complex:
    """Compensated complex sum (fsum on real and imaginary parts)."""
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real.tolist()),
                       math.fsum(arr.imag.tolist()))
    return complex(math.fsum(arr.tolist()), 0.0)


def e_of(x) -> np.ndarray:
    """e(x) = exp(2*pi*i*x)."""
    return np.exp(2j * np.pi * np.asarray(x, dtype=np.float64))


BOUND_SLACK = 1e-12


@dataclass
class SampledFunction:
    """Complex 1-bounded-style function on the integer window [lo, hi].

    Evaluation outside the window returns 0 and increments oob_events.
    """

    lo: int
    hi: int
    values: np.ndarray
    bound: float = 1.0
    oob_events: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.hi < self.lo:
            raise DomainError("empty sample window")
        if len(self.values) != self.hi - self.lo + 1:
            raise DomainError("values length does not match [lo, hi]")
        if self.bound < 0:
            raise DomainError("bound must be nonnegative")
        amax = float(np.max(np.abs(self.values))) if len(self.values) else 0.0
        if amax > self.bound + BOUND_SLACK:
            raise DomainError(
                f"values exceed declared bound: {amax} > {self.bound}")

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, value: complex, lo: int, hi: int) -> "SampledFunction":
        vals = np.full(hi - lo + 1, value, dtype=np.complex128)
        return cls(lo, hi, vals, bound=max(1.0, abs(value)))

    @classmethod
    def from_phase(cls, alpha: float, lo: int, hi: int) -> "SampledFunction":
        n = np.arange(lo, hi + 1, dtype=np.float64)
        return cls(lo, hi, e_of(alpha * n), bound=1.0)

    @classmethod
    def from_callable(cls, fn, lo: int, hi: int, bound: float = 1.0):
        vals = np.array([fn(n) for n in range(lo, hi + 1)],
                        dtype=np.complex128)
        return cls(lo, hi, vals, bound=bound)

    @classmethod
    def random_disc(cls, rng: np.random.Generator, lo: int, hi: int):
        """Independent values uniform on the closed complex unit disc."""
        size = hi - lo + 1
        r = np.sqrt(rng.random(size))
        ang = rng.random(size)
        return cls(lo, hi, r * e_of(ang), bound=1.0)

    @classmethod
    def random_nonneg(cls, rng: np.random.Generator, lo: int, hi: int):
        """Independent values uniform on [0, 1] (real, nonnegative)."""
        size = hi - lo + 1
        return cls(lo, hi, rng.random(size).astype(np.complex128), bound=1.0)

    # -- evaluation ---------------------------------------------------

    def covers(self, lo: int, hi: int) -> bool:
        return self.lo <= lo and hi <= self.hi

    def require_cover(self, lo: int, hi: int, what: str = "operation"):
        if not self.covers(lo, hi):
            raise RangeError(
                f"{what} needs f on [{lo}, {hi}] but window is "
                f"[{self.lo}, {self.hi}]")

    def slice(self, lo: int, hi: int) -> np.ndarray:
        """Values on [lo, hi], which must be inside the window."""
        self.require_cover(lo, hi)
        return self.values[lo - self.lo: hi - self.lo + 1]

    def at(self, idx) -> np.ndarray:
        """Values at arbitrary integer indices; 0 outside, counted."""
        idx = np.asarray(idx, dtype=np.int64)
        inside = (idx >= self.lo) & (idx <= self.hi)
        n_out = int(idx.size - np.count_nonzero(inside))
        if n_out:
            self.oob_events += n_out
        out = np.zeros(idx.shape, dtype=np.complex128)
        pos = idx[inside] - self.lo
        out[inside] = self.values[pos]
        return out

    def conj(self) -> "SampledFunction":
        return SampledFunction(self.lo, self.hi, np.conj(self.values),
                               bound=self.bound)


def difference(f: SampledFunction, h: int, hp: int) -> SampledFunction:
    """The difference operator n -> f(n + h) * conj(f(n + hp)).

    Defined on the largest window where both shifts stay inside f.
    """
    lo = f.lo - min(h, hp)
    hi = f.hi - max(h, hp)
    if hi < lo:
        raise RangeError("window too small for the requested shifts")
    n = np.arange(lo, hi + 1, dtype=np.int64)
    vals = f.values[(n + h) - f.lo] * np.conj(f.values[(n + hp) - f.lo])
    return SampledFunction(lo, hi, vals, bound=f.bound * f.bound)


@dataclass
class DefectRecord:
    """Measured lemma defect: lhs against an explicit error envelope."""

    name: str
    lhs: float
    bound: float
    ratio: float = field(init=False)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lhs < 0:
            raise DomainError("lhs must be nonnegative")
        if self.bound > 0:
            self.ratio = self.lhs / self.bound
        else:
            self.ratio = 0.0 if self.lhs <= 0 else math.inf

    def csv_row(self, n: int | str = "") -> list:
        parts = ";".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return [self.name, n, parts, repr(self.lhs), repr(self.bound),
                repr(self.ratio)]


# -- averages ----------------------------------------------------------


def _log_weights(N: int) -> np.ndarray:
    return 1.0 / np.arange(1, N + 1, dtype=np.float64)


def log_avg(f: SampledFunction, N: int) -> complex:
    """E^log over [N]: (sum f(n)/n) / H_N."""
    if N < 1:
        raise DomainError("N must be >= 1")
    f.require_cover(1, N, "log_avg")
    vals = f.slice(1, N)
    return cfsum(vals * _log_weights(N)) / harmonic(N)


def uniform_avg(f: SampledFunction, N: int) -> complex:
    """Plain average over [N]."""
    if N < 1:
        raise DomainError("N must be >= 1")
    f.require_cover(1, N, "uniform_avg")
    return cfsum(f.slice(1, N)) / N


def _avg_of_values(vals: np.ndarray, N: int, mode: str) -> complex:
    if mode == "log":
        return cfsum(vals * _log_weights(N)) / harmonic(N)
    if mode != "uniform":
        raise DomainError(f"unknown mode {mode!r}")
    return cfsum(vals) / N


# -- defect operations ------------------------------------------------


def shift_defect(f: SampledFunction, N: int, h: int,
                 mode: str = "log") -> DefectRecord:
    """Shift-invariance defect of the average against its envelope."""
    if abs(h) >= N:
        raise DomainError("need |h| < N")
    if mode == "log" and h == 0:
        raise DomainError("log-mode shift requires h != 0")
    n = np.arange(1, N + 1, dtype=np.int64)
    oob0 = f.oob_events
    base = _avg_of_values(f.at(n), N, mode)
    shifted = _avg_of_values(f.at(n + h), N, mode)
    lhs = abs(base - shifted)
    if mode == "log":
        bound = (1.0 + math.log(abs(h))) / math.log(N)
    else:
        bound = abs(h) / N
    return DefectRecord("shift", lhs, bound, params={
        "mode": mode, "h": h, "N": N, "oob": f.oob_events - oob0})


def residue_split_defect(f: SampledFunction, N: int, q: int) -> DefectRecord:
    """Residue-class splitting defect of the logarithmic average."""
    if q < 1:
        raise DomainError("q must be >= 1")
    n = np.arange(1, N + 1, dtype=np.int64)
    oob0 = f.oob_events
    acc = np.zeros(N, dtype=np.complex128)
    for a in range(q):
        acc += f.at(q * n + a)
    split = _avg_of_values(acc / q, N, "log")
    lhs = abs(split - _avg_of_values(f.at(n), N, "log"))
    bound = (1.0 + math.log(q)) / math.log(N)
    return DefectRecord("residue-split", lhs, bound, params={
        "q": q, "N": N, "oob": f.oob_events - oob0})


def frobenius_defect(f: SampledFunction, N: int, q: int, b: int,
                     H: int) -> DefectRecord:
    """Coin-problem progression defect: qn + bh averages vs the average."""
    if q < 1 or b < 1 or H < 1:
        raise DomainError("q, b, H must be positive")
    if math.gcd(q, b) != 1:
        raise DomainError("q and b must be coprime")
    n = np.arange(1, N + 1, dtype=np.int64)
    oob0 = f.oob_events
    acc = np.zeros(N, dtype=np.complex128)
    for h in range(1, H + 1):
        acc += f.at(q * n + b * h)
    lhs = abs(_avg_of_values(acc / H, N, "log")
              - _avg_of_values(f.at(n), N, "log"))
    bound = (1.0 + math.log(q) + math.log(b * H)) / math.log(N) + q / H
    return DefectRecord("frobenius", lhs, bound, params={
        "q": q, "b": b, "H": H, "N": N, "oob": f.oob_events - oob0})


def dilate_defect(f: SampledFunction, N: int, q: int) -> DefectRecord:
    """Dilation defect: E^log(f(n) - q*1_{q|n} f(n/q)).

    The dilated part telescopes to the harmonic tail, so the lhs is
    |sum_{n<=N} f(n)/n - sum_{m<=N/q} f(m)/m| / H_N.
    """
    if q < 1:
        raise DomainError("q must be >= 1")
    f.require_cover(1, N, "dilate_defect")
    w = _log_weights(N)
    full = cfsum(f.slice(1, N) * w)
    m = N // q
    sub = cfsum(f.slice(1, m) * w[:m]) if m >= 1 else 0.0
    lhs = abs(full - sub) / harmonic(N)
    bound = (math.log(q) if q > 1 else 1.0) / math.log(N)
    return DefectRecord("dilate", lhs, bound, params={"q": q, "N": N})


def elliott_defect(f: SampledFunction, N: int, primes,
                   P: int | None = None) -> DefectRecord:
    """Logarithmic Elliott-inequality defect over a finite prime set."""
    primes = sorted(int(p) for p in primes)
    if not primes:
        raise DomainError("prime set must be nonempty")
    if P is None:
        P = primes[-1]
    if primes[-1] > P or P > N:
        raise DomainError("need all primes <= P <= N")
    n = np.arange(1, N + 1, dtype=np.int64)
    oob0 = f.oob_events
    w = _log_weights(N)
    hn = harmonic(N)
    inv_p = [1.0 / p for p in primes]
    sum_invp = math.fsum(inv_p)
    per_prime = [cfsum(f.at(p * n) * w) / hn for p in primes]
    dilated = sum(ap * ip for ap, ip in zip(per_prime, inv_p)) / sum_invp
    lhs = abs(_avg_of_values(f.at(n), N, "log") - dilated)
    bound = math.log(P) / math.log(N) + sum_invp ** -0.5
    return DefectRecord("elliott", lhs, bound, params={
        "P": P, "N": N, "nprimes": len(primes), "sum_invp": sum_invp,
        "oob": f.oob_events - oob0})
