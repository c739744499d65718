"""Colorings of [N], monochromatic {x+y, xy} detection, the extremal
interval construction, and the scaled-down richness scanner.

The extremal coloring gives color i to [a_i, a_{i+1}) with
a_i = (3^i + 9) / 2, i = 0..r-1, and color 0 to {1, 2, 3, 4}; then
N = (3^r + 7) / 2 carries no monochromatic {x+y, xy} with x > y > 2
because a_{i+1} = 3 (a_i - 3): a sum landing in an interval pushes the
product past its right end.

The richness scanner works at configurable desk parameters: the real
construction uses B_0 = {V^{4^i}} with V a huge factorial and prime
windows at doubly exponential heights, which are astronomically out of
reach, so V, imax, the windows and kmax are exposed as configuration and
the mapping is documented in the report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, DomainError
from .numtheory import PrimeTable, harmonic

INT_BUDGET = 2 ** 62


@dataclass
class Coloring:
    N: int
    r: int
    colors: np.ndarray  # colors[n - 1] in [0, r) for n in [1, N]

    def __post_init__(self):
        self.colors = np.asarray(self.colors, dtype=np.int64)
        if len(self.colors) != self.N:
            raise DomainError("colors array must have length N")
        if self.N >= 1 and (self.colors.min() < 0
                            or self.colors.max() >= self.r):
            raise DomainError("color indices must lie in [0, r)")

    def color_of(self, n: int) -> int:
        return int(self.colors[n - 1])

    def to_rle_json(self) -> str:
        runs = []
        i = 0
        cols = self.colors
        while i < self.N:
            j = i
            while j + 1 < self.N and cols[j + 1] == cols[i]:
                j += 1
            runs.append([int(cols[i]), j - i + 1])
            i = j + 1
        return json.dumps({"N": self.N, "r": self.r, "runs": runs},
                          sort_keys=True)

    @classmethod
    def from_rle_json(cls, text: str) -> "Coloring":
        obj = json.loads(text)
        cols = np.concatenate([np.full(length, c, dtype=np.int64)
                               for c, length in obj["runs"]]) \
            if obj["runs"] else np.zeros(0, dtype=np.int64)
        return cls(N=obj["N"], r=obj["r"], colors=cols)


@dataclass(frozen=True)
class PatternWitness:
    x: int
    y: int
    color: int
    sum: int
    prod: int

    def validate(self, coloring: Coloring):
        if not (self.x > self.y > 2):
            raise DomainError("witness needs x > y > 2")
        if self.sum != self.x + self.y or self.prod != self.x * self.y:
            raise DomainError("witness sum/prod inconsistent")
        if self.prod > coloring.N:
            raise DomainError("witness product outside [N]")
        if coloring.color_of(self.sum) != self.color or \
                coloring.color_of(self.prod) != self.color:
            raise DomainError("witness is not monochromatic")


def extremal_coloring(r: int) -> Coloring:
    """The interval coloring of [ (3^r + 7) / 2 ] with r colors."""
    if r < 1:
        raise DomainError("need r >= 1")
    N = (3 ** r + 7) // 2
    if N > INT_BUDGET:
        raise CapacityError(f"N = (3^{r}+7)/2 exceeds the integer budget")
    bounds = [(3 ** i + 9) // 2 for i in range(r + 1)]  # a_0 .. a_r
    cols = np.zeros(N, dtype=np.int64)
    for i in range(r):
        lo, hi = bounds[i], min(bounds[i + 1], N + 1)
        cols[lo - 1: hi - 1] = i
    # {1,2,3,4} get color 0; already 0 by initialization
    return Coloring(N=N, r=r, colors=cols)


def find_monochromatic(c: Coloring):
    """Lexicographically least (y, x) with colors[x+y] == colors[xy].

    Scans y = 3, 4, ... and x = y+1 upward while xy <= N; exact integers.
    """
    N = c.N
    cols = c.colors
    y = 3
    while y * (y + 1) <= N:
        xmax = N // y
        if xmax >= y + 1:
            x = np.arange(y + 1, xmax + 1, dtype=np.int64)
            sums = x + y
            prods = x * y
            hit = cols[sums - 1] == cols[prods - 1]
            if hit.any():
                i = int(np.argmax(hit))
                xi = int(x[i])
                return PatternWitness(x=xi, y=y, color=int(cols[xi + y - 1]),
                                      sum=xi + y, prod=xi * y)
        y += 1
    return None


def verify_extremal(r: int) -> bool:
    """True iff the extremal coloring really has no monochromatic pair."""
    return find_monochromatic(extremal_coloring(r)) is None


@dataclass(frozen=True)
class RichnessConfig:
    V: int
    imax: int
    prime_windows: tuple
    kmax: int

    def b_set(self) -> list[int]:
        if self.V < 2 or self.imax < 1:
            raise DomainError("need V >= 2 and imax >= 1")
        out = []
        for i in range(1, self.imax + 1):
            b = self.V ** (4 ** i)
            if b > INT_BUDGET:
                raise CapacityError(
                    f"V^(4^{i}) exceeds the integer budget")
            out.append(b)
        return out


@dataclass
class RichnessReport:
    N: int
    r: int
    b_values: list
    table: np.ndarray           # shape (len(b_values), r): per-b, per-color
    selected_color: int
    threshold: float
    hits_per_color: list
    pair_stats: list            # rows (b, b', k, value)
    mapping_note: str

    def to_csv_rows(self) -> list:
        head = ["b"] + [f"color{j}" for j in range(self.r)]
        rows = [head]
        for b, vals in zip(self.b_values, self.table):
            rows.append([b] + [repr(float(v)) for v in vals])
        return rows

    def to_json(self) -> str:
        obj = {"N": self.N, "r": self.r,
               "b_values": [int(b) for b in self.b_values],
               "table": [[repr(float(v)) for v in row]
                         for row in self.table],
               "selected_color": self.selected_color,
               "threshold": repr(self.threshold),
               "hits_per_color": self.hits_per_color,
               "pair_stats": [
                   {"b": int(b), "bp": int(bp), "k": k, "value": repr(v)}
                   for (b, bp, k, v) in self.pair_stats],
               "mapping_note": self.mapping_note}
        return json.dumps(obj, sort_keys=True, indent=1)


_MAPPING_NOTE = (
    "desk-scale stand-in: the construction takes K = C0*r^8, t = K^2, "
    "V = (ceil(r^(4+eps0))^C)!, B0 = {V^(4^i) : i <= K^2} and prime "
    "windows at heights exp exp(r^25(4Ki+j)); here V, imax, the windows "
    "and kmax are free configuration at feasible sizes")


def _log_avg_indicator(cols: np.ndarray, color: int, b: int, N: int,
                       hn: float) -> float:
    """E^log_{n in [N]} 1_{A_color}(b n), normalized by H_N.

    Support is n <= floor(N/b); indices bn stay <= N.
    """
    m = N // b
    if m == 0:
        return 0.0
    n = np.arange(1, m + 1, dtype=np.int64)
    mask = cols[b * n - 1] == color
    return float(math.fsum((1.0 / n[mask]).tolist()) / hn)


def richness_scan(c: Coloring, cfg: RichnessConfig,
                  table: PrimeTable | None = None) -> RichnessReport:
    """Per-color multiple-density table plus pair statistics.

    (i) for every color j and b in B0 the log-density of A_j among
    multiples of b; (ii) the color with the most b reaching 1/(4r);
    (iii) for chosen b < b' and k <= kmax prime windows, the statistic
    E^log_{n, p_1..p_k} 1_A(bn) 1_A(b' p_1...p_k n).
    """
    b_values = cfg.b_set()
    N, r = c.N, c.r
    if b_values and b_values[-1] * N > INT_BUDGET:
        raise CapacityError("N * max(B0) exceeds the index budget")
    hn = harmonic(N)
    tab = np.zeros((len(b_values), r), dtype=np.float64)
    for bi, b in enumerate(b_values):
        for j in range(r):
            tab[bi, j] = _log_avg_indicator(c.colors, j, b, N, hn)
    threshold = 1.0 / (4.0 * r)
    hits = [int(np.count_nonzero(tab[:, j] >= threshold)) for j in range(r)]
    selected = int(np.argmax(hits))  # argmax takes the smallest j on ties

    windows = list(cfg.prime_windows)
    if cfg.kmax > len(windows):
        raise DomainError("kmax exceeds the number of prime windows")
    primes_per_window = []
    if cfg.kmax >= 1:
        if table is None:
            hi = max(b for _, b in windows[: cfg.kmax])
            from .numtheory import sieve_primes
            table = sieve_primes(max(hi, 4))
        for (a, b) in windows[: cfg.kmax]:
            ps = table.primes_array(a, b)
            if len(ps) == 0:
                raise DomainError(f"prime window [{a}, {b}) is empty")
            primes_per_window.append(ps.tolist())

    pair_stats = []
    cols = c.colors
    for ai in range(len(b_values)):
        for bi in range(ai + 1, len(b_values)):
            b, bp = b_values[ai], b_values[bi]
            for k in range(1, cfg.kmax + 1):
                val = _pair_statistic(cols, selected, b, bp,
                                      primes_per_window[:k], N, hn)
                pair_stats.append((b, bp, k, val))
    return RichnessReport(N=N, r=r, b_values=b_values, table=tab,
                          selected_color=selected, threshold=threshold,
                          hits_per_color=hits, pair_stats=pair_stats,
                          mapping_note=_MAPPING_NOTE)


def _pair_statistic(cols: np.ndarray, color: int, b: int, bp: int,
                    window_primes: list, N: int, hn: float) -> float:
    """E^log_{n, p_1..p_k} 1_A(b n) 1_A(b' p_1...p_k n), truncated at N."""
    tuples = [(1, 1.0)]
    for primes in window_primes:
        wsum = math.fsum(1.0 / p for p in primes)
        tuples = [(prod * p, w * (1.0 / p) / wsum)
                  for prod, w in tuples for p in primes]
    total = 0.0
    for prod, weight in tuples:
        m = N // (bp * prod)
        if m == 0:
            continue
        n = np.arange(1, m + 1, dtype=np.int64)
        mask = (cols[b * n - 1] == color) & (cols[bp * prod * n - 1] == color)
        total += weight * math.fsum((1.0 / n[mask]).tolist()) / hn
    return total


def partition_identity_exact(c: Coloring, b: int, N: int | None = None):
    """Rational check: sum_j E^log 1_{A_j}(bn) == H_{floor(N/b)} / H_N.

    Returns (lhs, rhs) as exact Fractions (both normalized by H_N).
    """
    N = c.N if N is None else N
    m = N // b
    per_color = [Fraction(0)] * c.r
    for n in range(1, m + 1):
        per_color[c.color_of(b * n)] += Fraction(1, n)
    lhs = sum(per_color, Fraction(0))
    rhs = sum((Fraction(1, n) for n in range(1, m + 1)), Fraction(0))
    return lhs, rhs
