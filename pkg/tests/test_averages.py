import math

import numpy as np
import pytest

from sumprod.averages import (SampledFunction, difference, dilate_defect,
                              elliott_defect, frobenius_defect, log_avg,
                              residue_split_defect, shift_defect, uniform_avg)
from sumprod.errors import DomainError, RangeError
from sumprod.numtheory import harmonic


def disc(seed, lo, hi):
    return SampledFunction.random_disc(np.random.default_rng(seed), lo, hi)


class TestSampledFunction:
    def test_bound_enforced(self):
        with pytest.raises(DomainError):
            SampledFunction(1, 3, np.array([1.0, 2.5, 0.0]), bound=1.0)

    def test_oob_counted(self):
        f = SampledFunction.constant(1.0, 1, 10)
        vals = f.at(np.array([0, 5, 11, 200]))
        assert f.oob_events == 3
        assert vals.tolist() == [0.0, 1.0, 0.0, 0.0]

    def test_difference_operator(self):
        f = disc(7, 1, 50)
        g = difference(f, 2, 5)
        n = 10
        expected = f.values[(n + 2) - 1] * np.conj(f.values[(n + 5) - 1])
        assert g.lo == -1 and g.hi == 45
        assert abs(g.values[n - g.lo] - expected) < 1e-15


class TestLogAvg:
    def test_constant(self):
        assert log_avg(SampledFunction.constant(1.0, 1, 200), 100) == 1.0

    def test_even_indicator(self):
        f = SampledFunction.from_callable(
            lambda n: 1.0 if n % 2 == 0 else 0.0, 1, 4)
        assert abs(log_avg(f, 2) - 1.0 / 3.0) < 1e-15

    def test_phase_against_high_precision(self):
        # 50-digit weighted summation as the independent oracle (a true
        # common-denominator rational sum is infeasible at this N)
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 50
        N = 10 ** 4
        f = SampledFunction.from_phase(0.37, 1, N)
        got = log_avg(f, N)
        re = mp.mpf(0)
        im = mp.mpf(0)
        hn = mp.mpf(0)
        for n in range(1, N + 1):
            w = mp.mpf(1) / n
            re += mp.cos(2 * mp.pi * mp.mpf(0.37) * n) * w
            im += mp.sin(2 * mp.pi * mp.mpf(0.37) * n) * w
            hn += w
        want = complex(float(re / hn), float(im / hn))
        assert abs(got - want) < 1e-10

    def test_domain_and_range(self):
        f = SampledFunction.constant(1.0, 1, 10)
        with pytest.raises(DomainError):
            log_avg(f, 0)
        with pytest.raises(RangeError):
            log_avg(f, 11)

    def test_linearity(self):
        N = 2000
        f, g = disc(1, 1, N), disc(2, 1, N)
        a, b = 0.3 - 0.4j, -0.5 + 0.1j
        comb = SampledFunction(1, N, a * f.values + b * g.values, bound=2.0)
        lhs = log_avg(comb, N)
        rhs = a * log_avg(f, N) + b * log_avg(g, N)
        assert abs(lhs - rhs) < 1e-12

    def test_modulus_below_bound(self):
        for seed in range(10):
            f = disc(seed, 1, 3000)
            assert abs(log_avg(f, 3000)) <= f.bound
            assert abs(uniform_avg(f, 3000)) <= f.bound


class TestUniformAvg:
    def test_constant(self):
        c = 0.5 - 0.25j
        assert uniform_avg(SampledFunction.constant(c, 1, 100), 64) == c

    def test_half_indicator(self):
        N = 100
        f = SampledFunction.from_callable(
            lambda n: 1.0 if n <= N // 2 else 0.0, 1, N)
        assert uniform_avg(f, N) == 0.5

    def test_matches_naive_loop(self):
        N = 500
        f = disc(3, 1, N)
        naive = sum(complex(f.values[n - 1]) for n in range(1, N + 1)) / N
        assert abs(uniform_avg(f, N) - naive) < 1e-12


class TestShiftDefect:
    def test_constant_zero(self):
        f = SampledFunction.constant(1.0, -200, 10 ** 4 + 200)
        assert shift_defect(f, 10 ** 4, 17, "log").lhs == 0.0

    def test_uniform_boundary_exact(self):
        # indicator of [1, N] with N a power of two: loss is exactly 1/N
        N = 128
        f = SampledFunction.from_callable(
            lambda n: 1.0 if 1 <= n <= N else 0.0, 0, N + 2)
        rec = shift_defect(f, N, 1, "uniform")
        assert rec.lhs == 1.0 / N

    def test_log_h_zero_rejected(self):
        f = SampledFunction.constant(1.0, 1, 100)
        with pytest.raises(DomainError):
            shift_defect(f, 50, 0, "log")

    def test_oob_surfaced(self):
        f = SampledFunction.constant(1.0, 1, 100)
        rec = shift_defect(f, 100, 5, "log")
        assert rec.params["oob"] == 5


class TestResidueSplitDefect:
    def test_constant_zero(self):
        f = SampledFunction.constant(1.0, 1, 4 * 10 ** 3 + 4)
        rec = residue_split_defect(f, 10 ** 3, 4)
        assert rec.lhs < 1e-15

    def test_identity_split(self):
        f = disc(5, 1, 2000)
        rec = residue_split_defect(f, 1000, 1)
        assert rec.lhs == 0.0

    def test_periodic_phase_within_bound(self):
        q, N = 3, 10 ** 4
        f = SampledFunction.from_callable(
            lambda n: np.exp(2j * np.pi * (n % q) / q), 1, q * N + q)
        rec = residue_split_defect(f, N, q)
        assert rec.lhs <= rec.bound


class TestFrobeniusDefect:
    def test_constant_zero(self):
        f = SampledFunction.constant(1.0, 1, 3 * 10 ** 3 + 500)
        rec = frobenius_defect(f, 10 ** 3, 3, 2, 100)
        assert rec.lhs < 1e-14

    def test_degenerate_q1(self):
        f = disc(11, 1, 2200)
        rec = frobenius_defect(f, 2000, 1, 1, 100)
        assert rec.lhs <= rec.bound

    def test_coprimality_required(self):
        f = SampledFunction.constant(1.0, 1, 100)
        with pytest.raises(DomainError):
            frobenius_defect(f, 50, 2, 4, 10)


class TestDilateDefect:
    def test_q_one_zero(self):
        f = disc(13, 1, 5000)
        assert dilate_defect(f, 5000, 1).lhs == 0.0

    def test_constant_exact_harmonic(self):
        N, q = 10 ** 4, 7
        f = SampledFunction.constant(1.0, 1, N)
        rec = dilate_defect(f, N, q)
        expected = (harmonic(N) - harmonic(N // q)) / harmonic(N)
        assert abs(rec.lhs - expected) < 1e-15
        assert rec.ratio < 10


class TestElliottDefect:
    PRIMES = (2, 3, 5, 7, 11)

    def test_constant_full_range_zero(self):
        N = 2000
        f = SampledFunction.constant(1.0, 1, self.PRIMES[-1] * N)
        rec = elliott_defect(f, N, self.PRIMES)
        assert rec.lhs < 1e-12

    def test_constant_truncated_within_bound(self):
        N = 2000
        f = SampledFunction.constant(1.0, 1, N)
        rec = elliott_defect(f, N, self.PRIMES)
        assert 0 < rec.lhs <= rec.bound
        assert rec.params["oob"] > 0

    def test_half_phase_odd_primes(self):
        # e(n/2) is invariant under dilation by odd primes
        N = 10 ** 4
        odd = [p for p in range(3, 101)
               if all(p % d for d in range(2, p))]
        f = SampledFunction.from_phase(0.5, 1, odd[-1] * N)
        rec = elliott_defect(f, N, odd)
        assert rec.lhs <= rec.bound

    def test_completely_multiplicative_on_set(self):
        # f(n) = e(alpha * #bad prime factors); f(p) = 1 on the set
        N = 10 ** 4
        hi = self.PRIMES[-1] * N
        bad_count = np.zeros(hi + 1, dtype=np.int64)
        for p in range(2, hi + 1):
            if p in self.PRIMES:
                continue
            if all(p % d for d in range(2, math.isqrt(p) + 1)):
                pk = p
                while pk <= hi:
                    bad_count[pk::pk] += 1
                    pk *= p
        vals = np.exp(2j * np.pi * 0.31 * bad_count[1:])
        f = SampledFunction(1, hi, vals, bound=1.0)
        rec = elliott_defect(f, N, self.PRIMES)
        assert rec.lhs <= rec.bound

    def test_preconditions(self):
        f = SampledFunction.constant(1.0, 1, 100)
        with pytest.raises(DomainError):
            elliott_defect(f, 100, [])
        with pytest.raises(DomainError):
            elliott_defect(f, 100, [2, 3], P=200)


class TestModeValidation:
    def test_unknown_mode_rejected(self):
        f = SampledFunction.constant(1.0, 1, 100)
        with pytest.raises(DomainError):
            shift_defect(f, 50, 3, "bogus")
