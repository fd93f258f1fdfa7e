import math

import numpy as np
import pytest

from metablox.combinatorics import (
    QTable,
    log_binomial,
    log_double_factorial_even,
    log_factorial,
    log_factorial_arr,
    log_multiset,
)

from oracle import q_brute, q_exact


class TestLogFactorial:
    def test_base_cases(self):
        assert log_factorial(0) == 0.0
        assert log_factorial(1) == 0.0
        assert log_factorial(5) == pytest.approx(math.log(120), rel=1e-14)

    def test_large_matches_exact_bigint(self):
        exact = math.log(math.factorial(1000))
        assert log_factorial(1000) == pytest.approx(exact, rel=1e-9)
        exact = math.log(math.factorial(5000))
        assert log_factorial(5000) == pytest.approx(exact, rel=1e-12)

    def test_vectorized_agrees_with_scalar(self):
        xs = np.array([0, 1, 2, 17, 2047, 2048, 2049, 9999])
        vec = log_factorial_arr(xs)
        for x, v in zip(xs.tolist(), vec.tolist()):
            assert v == log_factorial(x)

    def test_monotone(self):
        vals = [log_factorial(n) for n in range(300)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            log_factorial(-1)


class TestLogBinomial:
    def test_trivial(self):
        assert log_binomial(7, 0) == 0.0
        assert log_binomial(4, 2) == pytest.approx(math.log(6), rel=1e-14)

    def test_exact_integer_oracle(self):
        assert log_binomial(52, 5) == pytest.approx(math.log(2598960), rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            log_binomial(4, 5)
        with pytest.raises(ValueError):
            log_binomial(4, -1)


class TestLogMultiset:
    def test_single_bin(self):
        for e in (0, 1, 7, 123):
            assert log_multiset(1, e) == 0.0

    @pytest.mark.parametrize("n,k,expect", [(3, 2, 6), (2, 3, 4)])
    def test_enumeration(self, n, k, expect):
        assert log_multiset(n, k) == pytest.approx(math.log(expect), rel=1e-12)

    def test_matches_binomial_identity(self):
        for n in range(1, 12):
            for k in range(0, 12):
                assert log_multiset(n, k) == log_binomial(n + k - 1, k)

    def test_domain(self):
        with pytest.raises(ValueError):
            log_multiset(0, 3)


class TestDoubleFactorial:
    def test_values(self):
        assert log_double_factorial_even(0) == 0.0
        assert log_double_factorial_even(6) == pytest.approx(math.log(48), rel=1e-14)
        assert log_double_factorial_even(2 * 3) == pytest.approx(math.log(48), rel=1e-14)

    def test_odd_rejected(self):
        with pytest.raises(ValueError):
            log_double_factorial_even(3)


class TestQTable:
    def test_hand_enumerated_values(self):
        qt = QTable()
        assert qt.log_q(0, 5) == 0.0
        assert qt.log_q(4, 2) == pytest.approx(math.log(3), rel=1e-12)
        assert qt.log_q(5, 5) == pytest.approx(math.log(7), rel=1e-12)
        assert qt.log_q(6, 4) == pytest.approx(math.log(9), rel=1e-12)

    def test_exact_matches_brute_force(self):
        qt = QTable()
        for n in range(0, 13):
            for m in range(1, n + 2):
                assert qt.exact(n, m) == q_brute(n, m), (n, m)

    def test_at_most_recurrence_exact(self):
        # q(n, m) = q(n, m-1) + q(n-m, m) for partitions into at most m parts
        qt = QTable()
        for n in range(1, 201):
            for m in range(2, n + 1):
                assert qt.exact(n, m) == qt.exact(n, m - 1) + qt.exact(max(n - m, 0), m)

    def test_unrestricted_matches_partition_numbers(self):
        qt = QTable()
        for n in range(1, 51):
            assert qt.exact(n, n) == q_exact(n, n)
            for m in (n, n + 3, 5 * n):
                assert qt.log_q(n, m) == qt.log_q(n, n)

    def test_float_tier_matches_exact_tier(self):
        qt = QTable(exact_cap=200)
        ref = QTable(exact_cap=1000)
        for n in (201, 350, 777, 1000):
            for m in (1, 2, 17, n // 2, n):
                expect = math.log(ref.exact(n, m))
                assert qt.log_q(n, m) == pytest.approx(expect, abs=1e-9)

    def test_monotone_in_both_arguments(self):
        qt = QTable(exact_cap=100)
        for m in (1, 3, 10, 40):
            vals = [qt.log_q(n, m) for n in range(0, 400)]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        for n in (30, 150, 390):
            vals = [qt.log_q(n, m) for m in range(1, n + 5)]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_asymptotic_fallback_is_finite_and_monotone_in_m(self):
        qt = QTable(exact_cap=50, float_cap=100)
        vals = [qt.log_q(2000, m) for m in (5, 50, 500, 2000)]
        assert all(math.isfinite(v) for v in vals)
        assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))

    def test_domain_errors(self):
        qt = QTable()
        with pytest.raises(ValueError):
            qt.log_q(-1, 3)
        with pytest.raises(ValueError):
            qt.log_q(3, 0)

    def test_cache_roundtrip(self, tmp_path):
        qt = QTable(exact_cap=60)
        for n in range(0, 61):
            qt.log_q(n, max(n, 1))
        path = tmp_path / "qtable.bin"
        qt.save(path)
        fresh = QTable(exact_cap=60)
        assert fresh.load(path)
        for n in (0, 7, 33, 60):
            m = max(n, 1)
            assert fresh.exact(n, m) == qt.exact(n, m)

    def test_cache_absent_or_garbage_is_ignored(self, tmp_path):
        qt = QTable(exact_cap=30)
        assert not qt.load(tmp_path / "missing.bin")
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"not a cache at all")
        assert not qt.load(bad)
        assert qt.exact(10, 3) == q_brute(10, 3)
