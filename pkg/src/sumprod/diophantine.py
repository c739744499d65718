"""Exponential-sum spectrum scans and diophantine verification.

A set S of integers is (L, L', D)-diophantine when every theta whose
exponential-sum average over S has modulus >= delta admits a denominator
q <= (L'/delta)^L with ||q theta|| <= (L'/delta)^L / D.  dioph_verify
turns this continuum statement into a finite scan over a rational grid
j/M: the full spectrum on such a grid is a single DFT of the indicator
of S mod M (exact, since e(js/M) only depends on s mod M).

Levels whose conclusion threshold (L'/delta)^L / D reaches 1/2 are
vacuous: any theta passes with q = 1 because ||q theta|| <= 1/2 always.
Only non-vacuous levels constrain the grid resolution; a scan whose grid
is coarser than the certified requirement is still run and reported, but
flagged certified=False.

Also here: the rational-approximation counting lemma verifier
(vino_verify), the pairwise-coprimality statistic gamma, von Mangoldt
polynomial-phase sums with their structure scan, and the hypothesis /
conclusion statistics of the concatenation lemma.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .averages import SampledFunction, cfsum, e_of, _log_weights
from .errors import CapacityError, DomainError, RangeError
from .numtheory import MultiplicativeTables, PrimeTable, harmonic
from .projections import NormParams, u1_norm, u1log_norm

GRID_POINT_BUDGET = 2 ** 26
ROW_SAMPLE_CAP = 512


@dataclass(frozen=True)
class DiophParams:
    L: float
    Lp: float
    D: float

    def __post_init__(self):
        if self.L < 1 or self.Lp < 1 or self.D <= 0:
            raise DomainError("need L, L' >= 1 and D > 0")

    def q_cap(self, delta: float) -> int:
        return int(math.ceil((self.Lp / delta) ** self.L))

    def err_threshold(self, delta: float) -> float:
        return (self.Lp / delta) ** self.L / self.D

    def vacuous(self, delta: float) -> bool:
        return self.err_threshold(delta) >= 0.5


@dataclass
class AlmostPrimeFamily:
    """Products of one prime per disjoint interval, each raised to power j."""

    intervals: list
    j: int
    prime_lists: list = field(default_factory=list)
    elements: np.ndarray = None

    @classmethod
    def build(cls, intervals, j: int, table: PrimeTable) -> "AlmostPrimeFamily":
        if j < 1:
            raise DomainError("power j must be >= 1")
        ivs = [(int(a), int(b)) for a, b in intervals]
        for (a, b) in ivs:
            if not (2 <= a < b):
                raise DomainError(f"bad interval [{a}, {b})")
        for (a0, b0), (a1, _) in zip(ivs, ivs[1:]):
            if b0 > a1:
                raise DomainError("intervals must be disjoint and ascending")
        lists = []
        for (a, b) in ivs:
            ps = table.primes_array(a, b)
            if len(ps) == 0:
                raise DomainError(f"no primes in [{a}, {b})")
            lists.append(ps)
        prods = lists[0].astype(object)
        for ps in lists[1:]:
            prods = (prods[:, None] * ps[None, :].astype(object)).ravel()
        elements = np.sort(np.array([int(p) ** j for p in prods], dtype=object))
        if int(elements[-1]) < 2 ** 62:
            elements = elements.astype(np.int64)
        return cls(intervals=ivs, j=j, prime_lists=lists, elements=elements)

    @property
    def k(self) -> int:
        return len(self.intervals)

    def product_scale(self) -> int:
        """D = (product of interval left endpoints)^j."""
        d = 1
        for (a, _) in self.intervals:
            d *= a
        return d ** self.j


def exp_sum(S, theta: float) -> complex:
    """E_{s in S} e(theta * s), compensated."""
    arr = np.asarray(list(S) if not isinstance(S, np.ndarray) else S)
    if arr.size == 0:
        raise DomainError("S must be nonempty")
    return cfsum(e_of(theta * arr.astype(np.float64))) / arr.size


@dataclass
class DiophRow:
    theta: float
    abs_sum: float
    level: float
    q: int
    err: float
    passed: bool
    vacuous: bool = False


@dataclass
class LevelSummary:
    level: float
    q_cap: int
    err_threshold: float
    vacuous: bool
    n_obligated: int
    n_pass: int
    n_fail: int
    worst_q_margin: float
    worst_err_margin: float


@dataclass
class DiophReport:
    """Scan outcome: per-level summaries plus row-level evidence.

    Every failure is stored; passing rows are sampled (first 512 per
    level) since vacuous levels can obligate a large fraction of the
    grid.  The per-level summaries count all obligated points.
    """

    params: DiophParams
    set_size: int
    diam: int
    grid_points: int
    spacing: float
    required_spacing: float
    certified: bool
    levels: list
    rows: list
    failures: list
    empirical_L: float | None = None

    @property
    def all_pass(self) -> bool:
        return not self.failures

    def to_json(self) -> str:
        obj = {
            "params": {"L": self.params.L, "Lp": self.params.Lp,
                       "D": self.params.D},
            "set_size": self.set_size,
            "diam": self.diam,
            "grid_points": self.grid_points,
            "spacing": self.spacing,
            "required_spacing": self.required_spacing,
            "certified": self.certified,
            "empirical_L": self.empirical_L,
            "levels": [vars(s) for s in self.levels],
            "rows": [vars(r) for r in self.rows],
            "failures": [vars(r) for r in self.failures],
        }
        return json.dumps(obj, sort_keys=True, indent=1)

    def csv_summary_rows(self) -> list:
        out = [["level", "q_cap", "err_threshold", "vacuous", "n_obligated",
                "n_pass", "n_fail", "worst_q_margin", "worst_err_margin"]]
        for s in self.levels:
            out.append([s.level, s.q_cap, s.err_threshold, int(s.vacuous),
                        s.n_obligated, s.n_pass, s.n_fail,
                        repr(s.worst_q_margin), repr(s.worst_err_margin)])
        return out


def _spectrum_on_grid(S: np.ndarray, M: int) -> np.ndarray:
    """|E_{s in S} e(j s / M)| for j = 0..M//2, exact via DFT of counts."""
    counts = np.zeros(M, dtype=np.float64)
    if S.dtype == object:
        idx = np.array([int(s) % M for s in S], dtype=np.int64)
    else:
        idx = np.mod(S, M).astype(np.int64)
    np.add.at(counts, idx, 1.0)
    return np.abs(np.fft.rfft(counts)) / len(S)


def best_q_on_grid(j: int, M: int, cap: int) -> tuple[int, float]:
    """Minimizer of ||q * j/M|| over q <= cap, exact on grid rationals.

    Walks the continued-fraction convergents of j/M in integer
    arithmetic; the minimum over a denominator cap is always attained at
    a convergent, so this equals the direct scan without the O(cap)
    cost.  Ties go to the smaller q (records strictly improve along
    convergents, so the first zero wins).
    """
    best_q, best_num = 1, min(j % M, M - j % M)
    a, b = j % M, M
    qm2, qm1 = 1, 0
    while b:
        ai = a // b
        qi = ai * qm1 + qm2
        if qi > cap:
            break
        if qi >= 1:
            r = (qi * j) % M
            e = min(r, M - r)
            if e < best_num:
                best_q, best_num = qi, e
            if e == 0:
                break
        qm2, qm1 = qm1, qi
        a, b = b, a % b
    return best_q, best_num / M


def _empirical_L_requirement(j: int, M: int, delta: float, Lp: float,
                             D: float) -> float:
    """Smallest L making some convergent q of j/M satisfy both bounds.

    Exact integer continued-fraction arithmetic on the grid rational.
    """
    base = math.log(Lp / delta)
    best = math.inf
    a, b = j, M
    qm2, qm1 = 1, 0
    while True:
        if b == 0:
            break
        ai = a // b
        qi = ai * qm1 + qm2
        if qi >= 1:
            r = (qi * j) % M
            err = min(r, M - r) / M
            need_q = math.log(qi) / base if qi > 1 else 0.0
            need_e = math.log(err * D) / base if err * D > 1 else 0.0
            best = min(best, max(need_q, need_e, 1.0))
        qm2, qm1 = qm1, qi
        a, b = b, a % b
        if qi > 10 ** 12:
            break
    return best


def dioph_verify(S, params: DiophParams, delta_levels, grid_points: int,
                 want_empirical_L: bool = False) -> DiophReport:
    """Scan the spectrum of S on a rational grid and verify the property.

    grid_points is the number of grid points M over the full circle
    (theta = j/M); by conjugate symmetry only j <= M/2 is scanned.
    """
    S = np.asarray(S if isinstance(S, np.ndarray) else list(S))
    if S.size == 0:
        raise DomainError("S must be nonempty")
    levels = sorted(set(float(d) for d in delta_levels), reverse=True)
    if not levels or levels[-1] <= 0 or levels[0] >= 1:
        raise DomainError("delta levels must lie in (0, 1)")
    if grid_points < 16:
        raise DomainError("grid too small")
    if grid_points > GRID_POINT_BUDGET:
        smallest = levels[-1]
        diam = int(S.max() - S.min())
        suggested = params.Lp * (8.0 * max(diam, 1) / GRID_POINT_BUDGET) ** (
            1.0 / params.L)
        raise CapacityError(
            f"grid of {grid_points} points exceeds budget "
            f"{GRID_POINT_BUDGET}; at delta floor {smallest} try a floor "
            f">= {suggested:.4g}")

    diam = int(S.max() - S.min())
    M = int(grid_points)
    caps = {d: params.q_cap(d) for d in levels}
    nonvac = [d for d in levels if not params.vacuous(d)]
    req_M = 8 * diam * max((caps[d] for d in nonvac), default=1)
    required_spacing = 1.0 / req_M if req_M > 0 else 1.0
    certified = (1.0 / M) <= required_spacing

    absvals = _spectrum_on_grid(S, M)
    margin = math.pi * diam / M
    rows, failures, summaries = [], [], []
    emp_L = 0.0 if want_empirical_L else None
    for d in levels:
        vac = params.vacuous(d)
        cap, thresh = caps[d], params.err_threshold(d)
        check_level = max(d - margin, 0.5 * d)
        js = np.flatnonzero(absvals >= check_level)
        n_pass = n_fail = 0
        worst_qm, worst_em = math.inf, math.inf
        stored = 0
        for j in js.tolist():
            theta = j / M
            if vac:
                q, err, ok = 1, min(theta, 1.0 - theta), True
            else:
                q, err = best_q_on_grid(j, M, cap)
                ok = err <= thresh
            if ok:
                n_pass += 1
            else:
                n_fail += 1
            worst_qm = min(worst_qm, (cap - q) / cap)
            worst_em = min(worst_em, (thresh - err) / thresh)
            row = DiophRow(theta=theta, abs_sum=float(absvals[j]), level=d,
                           q=q, err=float(err), passed=ok, vacuous=vac)
            if not ok:
                failures.append(row)
            if not ok or stored < ROW_SAMPLE_CAP:
                rows.append(row)
                stored += 1
            if want_empirical_L and j > 0 and not vac:
                emp_L = max(emp_L, _empirical_L_requirement(
                    j, M, d, params.Lp, params.D))
        summaries.append(LevelSummary(
            level=d, q_cap=cap, err_threshold=thresh, vacuous=vac,
            n_obligated=len(js), n_pass=n_pass, n_fail=n_fail,
            worst_q_margin=worst_qm if js.size else math.inf,
            worst_err_margin=worst_em if js.size else math.inf))
    return DiophReport(params=params, set_size=int(S.size), diam=diam,
                       grid_points=M, spacing=1.0 / M,
                       required_spacing=required_spacing, certified=certified,
                       levels=summaries, rows=rows, failures=failures,
                       empirical_L=emp_L)


@dataclass(frozen=True)
class VinoResult:
    hypothesis_holds: bool
    count: int
    q: int | None
    alarm: bool


def vino_verify(alpha: float, T: int, delta1: float,
                delta2: float) -> VinoResult:
    """Counting form of the rational-approximation lemma.

    If at least delta2*T of the t in [T] have ||alpha t|| <= delta1
    (with delta2 >= 32 delta1 and T >= 16/delta2), some q <= 16/delta2
    must satisfy ||alpha q|| <= delta1/(delta2 T).  A missing q is an
    implementation alarm, never expected.
    """
    if delta1 <= 0 or delta2 <= 0 or delta2 < 32 * delta1:
        raise DomainError("need 0 < 32*delta1 <= delta2")
    if T < 16 / delta2:
        raise DomainError("need T >= 16/delta2")
    t = np.arange(1, T + 1, dtype=np.float64)
    x = alpha * t
    frac = x - np.floor(x)
    dist = np.minimum(frac, 1.0 - frac)
    count = int(np.count_nonzero(dist <= delta1))
    holds = count >= delta2 * T
    if not holds:
        return VinoResult(False, count, None, False)
    qmax = int(math.floor(16 / delta2))
    thresh = delta1 / (delta2 * T)
    for q in range(1, qmax + 1):
        if _dist_mod1(alpha * q) <= thresh:
            return VinoResult(True, count, q, False)
    return VinoResult(True, count, None, True)


def _dist_mod1(x: float) -> float:
    f = x - math.floor(x)
    return min(f, 1.0 - f)


def gamma_coprimality(M, exact: bool = False):
    """gamma(M) = E^log_{n,n' in M} gcd(n, n') - 1.

    exact=True computes in rational arithmetic (small sets only).
    """
    elems = [int(m) for m in (M.tolist() if isinstance(M, np.ndarray) else M)]
    if not elems or min(elems) < 1:
        raise DomainError("need a nonempty set of positive integers")
    if exact:
        wsum = sum(Fraction(1, m) for m in elems)
        total = Fraction(0)
        for a in elems:
            for b in elems:
                total += Fraction(math.gcd(a, b), a * b)
        return total / (wsum * wsum) - 1
    arr = np.asarray(elems, dtype=np.int64)
    w = 1.0 / arr.astype(np.float64)
    wsum = math.fsum(w.tolist())
    total = 0.0
    block = max(1, (2 ** 22) // max(len(arr), 1))
    for i in range(0, len(arr), block):
        blk = arr[i:i + block]
        g = np.gcd.outer(blk, arr).astype(np.float64)
        total += float((g * w[i:i + block, None] * w[None, :]).sum())
    return total / (wsum * wsum) - 1.0


def gamma_prime_window(primes) -> float:
    """gamma of a set of distinct primes via the closed form.

    gcd(p, p') is 1 off the diagonal and p on it, so
    gamma = (sum 1/p)^{-2} * sum (p-1)/p^2.
    """
    ps = np.asarray(sorted(set(int(p) for p in primes)), dtype=np.float64)
    if ps.size == 0:
        raise DomainError("empty prime set")
    s = math.fsum((1.0 / ps).tolist())
    t = math.fsum(((ps - 1.0) / ps ** 2).tolist())
    return t / (s * s)


def gamma_family(fam: AlmostPrimeFamily) -> float:
    """gamma of an almost-prime family via the window product identity.

    Unique factorization across disjoint windows gives
    1 + gamma(family) = prod_l (1 + gamma(window_l)) exactly (for j = 1).
    """
    if fam.j != 1:
        raise DomainError("product identity requires j = 1")
    prod = 1.0
    for ps in fam.prime_lists:
        prod *= 1.0 + gamma_prime_window(ps)
    return prod - 1.0


def vonmangoldt_exp_sum(tables: MultiplicativeTables, X: int, m: int,
                        theta: float) -> complex:
    """sum_{n <= X} Lambda(n) e(n^m theta), unnormalized."""
    if X < 1 or m < 1:
        raise DomainError("need X, m >= 1")
    if X > tables.limit:
        raise RangeError(f"X={X} exceeds table limit {tables.limit}")
    n = np.arange(1, X + 1, dtype=np.float64)
    lam = tables.vonmangoldt[1: X + 1]
    return cfsum(lam * e_of(theta * n ** m))


@dataclass
class WeylReport:
    X: int
    m: int
    eps: float
    exponent: float
    grid_points: int
    rows: list
    failures: list
    empirical_E: float
    all_pass: bool

    def to_json(self) -> str:
        obj = {"X": self.X, "m": self.m, "eps": self.eps,
               "exponent": self.exponent, "grid_points": self.grid_points,
               "empirical_E": self.empirical_E, "all_pass": self.all_pass,
               "rows": [vars(r) for r in self.rows],
               "failures": [vars(r) for r in self.failures]}
        return json.dumps(obj, sort_keys=True, indent=1)


def weyl_structure_scan(tables: MultiplicativeTables, X: int, m: int,
                        eps: float, exponent: float = 6.0,
                        grid_points: int = 2 ** 22) -> WeylReport:
    """Scan theta for large von Mangoldt polynomial-phase sums.

    Wherever |sum_{n<=X} Lambda(n) e(n^m theta)| >= eps*X on the grid,
    verify q <= eps^-E with ||q theta|| <= eps^-E * X^-m, and report the
    empirical minimal E that would make every obligated point pass.
    On the rational grid j/M the sum depends only on n^m mod M, so the
    whole spectrum is one DFT of Lambda accumulated at those residues.
    """
    if not (0 < eps < 1):
        raise DomainError("eps must be in (0, 1)")
    if X > tables.limit:
        raise RangeError(f"X={X} exceeds table limit {tables.limit}")
    if grid_points > GRID_POINT_BUDGET:
        raise CapacityError(f"grid of {grid_points} exceeds budget")
    M = int(grid_points)
    n = np.arange(1, X + 1, dtype=np.int64)
    if m == 1:
        residues = n % M
    else:
        residues = np.array([pow(int(v), m, M) for v in n.tolist()],
                            dtype=np.int64)
    acc = np.zeros(M, dtype=np.float64)
    np.add.at(acc, residues, tables.vonmangoldt[1: X + 1])
    absvals = np.abs(np.fft.rfft(acc))

    cap = int(math.ceil(eps ** (-exponent)))
    thresh = eps ** (-exponent) * float(X) ** (-m)
    js = np.flatnonzero(absvals >= eps * X)
    rows, failures = [], []
    emp_E = 0.0
    log_inv_eps = math.log(1.0 / eps)
    for j in js.tolist():
        theta = j / M
        q, err = best_q_on_grid(j, M, cap)
        ok = err <= thresh
        need_q = math.log(q) / log_inv_eps if q > 1 else 0.0
        scaled = err * float(X) ** m
        need_e = math.log(scaled) / log_inv_eps if scaled > 1 else 0.0
        emp_E = max(emp_E, need_q, need_e)
        row = DiophRow(theta=theta, abs_sum=float(absvals[j]), level=eps,
                       q=q, err=err, passed=ok)
        rows.append(row)
        if not ok:
            failures.append(row)
    return WeylReport(X=X, m=m, eps=eps, exponent=exponent, grid_points=M,
                      rows=rows, failures=failures, empirical_E=emp_E,
                      all_pass=not failures)


# -- concatenation-lemma statistics ------------------------------------


def concat_hypothesis(f: SampledFunction, N: int, S, T: int,
                      mode: str = "log") -> float:
    """E_n E_{t,t' in [T]} E_{s in S} f(n+ts) conj(f(n+t's)).

    The t, t' double average collapses to E_s |E_t f(n + ts)|^2 per n,
    which is real and nonnegative by construction.
    """
    S = np.asarray(list(S) if not isinstance(S, np.ndarray) else S,
                   dtype=np.int64)
    if S.size == 0 or T < 1:
        raise DomainError("need nonempty S and T >= 1")
    lo_need = 1 + T * min(0, int(S.min()))
    hi_need = N + T * max(0, int(S.max()))
    f.require_cover(lo_need, hi_need, "concat_hypothesis")
    n = np.arange(1, N + 1, dtype=np.int64)
    per_n = np.zeros(N, dtype=np.float64)
    for s in S.tolist():
        acc = np.zeros(N, dtype=np.complex128)
        for t in range(1, T + 1):
            acc += f.values[(n + t * s) - f.lo]
        per_n += np.abs(acc / T) ** 2
    per_n /= S.size
    if mode == "log":
        val = math.fsum((per_n * _log_weights(N)).tolist()) / harmonic(N)
    elif mode == "uniform":
        val = math.fsum(per_n.tolist()) / N
    else:
        raise DomainError(f"unknown mode {mode!r}")
    return float(val)


def concat_conclusion_search(f: SampledFunction, N: int, H: int, qmax: int,
                             mode: str = "log") -> tuple[int, float]:
    """argmax over q <= qmax of the progression-bias norm at (q, H).

    Ties favor the smallest q.
    """
    if qmax < 1 or H < 1:
        raise DomainError("need qmax, H >= 1")
    best_q, best_norm = 1, -1.0
    for q in range(1, qmax + 1):
        p = NormParams(N, q, H)
        val = u1log_norm(f, p) if mode == "log" else u1_norm(f, p)
        if val > best_norm:
            best_q, best_norm = q, val
    return best_q, best_norm
