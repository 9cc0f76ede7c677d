import math
from decimal import ROUND_FLOOR, Decimal, localcontext

import numpy as np
import pytest

from zkucb.utils import DomainError, ConfigError
from zkucb.fixedpoint import (LcgParams, lcg_next, lcg_stream, lcg_sample, LnTable, default_ln_table,
                              floor_ln, isqrt_newton, floor_div)


@pytest.mark.parametrize("state,expected", [(42, 1083814273), (0, 1013904223)])
def test_lcg_next_pinned_params(state, expected):
    assert lcg_next(state) == expected


def test_lcg_next_composes():
    assert lcg_stream(42, n=2) == [lcg_next(42), lcg_next(lcg_next(42))]
    assert lcg_stream(42, n=3)[-1] == 2479403867


def test_lcg_next_rejects_out_of_range_state():
    with pytest.raises(DomainError):
        lcg_next(2**32)


def test_lcg_params_validated():
    with pytest.raises(ConfigError):
        LcgParams(m=2**31)


def test_lcg_sample_degenerate_bound():
    for state in (0, 1, 42, 2**32-1):
        sample, nxt = lcg_sample(state, 1)
        assert sample == 1
        assert nxt == lcg_next(state)


def test_lcg_sample_golden():
    assert lcg_sample(42, 16) == (1083814273 % 31 + 1, 1083814273)
    assert lcg_sample(42, 16)[0] == 24


def test_lcg_sample_zero_bound():
    with pytest.raises(DomainError):
        lcg_sample(42, 0)


def test_lcg_sample_mean():
    state, total = 12345, 0
    n = 10**5
    for _ in range(n):
        sample, state = lcg_sample(state, 256)
        assert 1 <= sample <= 511
        total += sample
    assert abs(total/n-256) < 0.01*256


def test_ln_table_thresholds():
    table = LnTable.build(2**16)
    assert table.thresholds[:6] == (1, 3, 8, 21, 55, 149)
    assert table.L == 11
    assert table.thresholds[-1] > 2**16 >= table.thresholds[-2]


def test_ln_table_json_roundtrip():
    table = default_ln_table()
    again = LnTable.from_json(table.to_json(), table.n_max)
    assert again == table


def test_ln_table_rejects_unsorted():
    with pytest.raises(ConfigError):
        LnTable((1, 8, 3, 21), 10)


@pytest.mark.parametrize("n,expected", [(1, 0), (2, 0), (3, 1), (8, 2), (148, 4), (149, 5), (2**16, 11)])
def test_floor_ln_examples(n, expected):
    assert floor_ln(n) == expected


@pytest.mark.parametrize("n", [0, 2**16+1])
def test_floor_ln_domain(n):
    with pytest.raises(DomainError):
        floor_ln(n)


def test_floor_ln_oracle():
    with localcontext() as ctx:
        ctx.prec = 50
        for n in range(1, 10**4+1):
            assert floor_ln(n) == int(Decimal(n).ln().to_integral_value(rounding=ROUND_FLOOR))


@pytest.mark.parametrize("x,expected", [(0, 0), (1, 1), (16, 4), (8, 2), (15, 3), (2**40-1, 2**20-1)])
def test_isqrt_examples(x, expected):
    assert isqrt_newton(x, 20) == expected


def test_isqrt_small_range():
    for x in range(0, 20000):
        assert isqrt_newton(x) == math.isqrt(x)


def test_isqrt_literal_start_small_inputs():
    for x in range(0, 5000):
        assert isqrt_newton(x, 20, initial='x') == math.isqrt(x)


def test_isqrt_random_large(rng):
    for x in rng.integers(0, 2**40, size=2000):
        x = int(x)
        assert isqrt_newton(x) == math.isqrt(x)


@pytest.mark.slow
def test_isqrt_oracle_full():
    for x in range(0, 10**6+1):
        assert isqrt_newton(x) == math.isqrt(x)
    rng = np.random.default_rng(1)
    for x in rng.integers(0, 2**40, size=10**5):
        assert isqrt_newton(int(x)) == math.isqrt(int(x))


def test_isqrt_negative():
    with pytest.raises(DomainError):
        isqrt_newton(-1)


@pytest.mark.parametrize("x,y,expected", [(7, 2, (3, 1)), (0, 5, (0, 0))])
def test_floor_div_examples(x, y, expected):
    assert floor_div(x, y) == expected


def test_floor_div_identity(rng):
    for S, n in rng.integers(1, 2**63, size=(200, 2), dtype=np.uint64):
        S, n = int(S), int(n)
        q, r = floor_div(S, n)
        assert S == q*n+r and 0 <= r < n


def test_floor_div_zero_divisor():
    with pytest.raises(DomainError):
        floor_div(3, 0)
