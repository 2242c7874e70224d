import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from congbox.errors import IndexOutOfRange, NotPrime, TooLarge
from congbox.ffcore import (build_field_ctx, char_values, mod_pow, mult_char,
                            smallest_primitive_root)

from conftest import field

PRIMES = [3, 5, 7, 11, 13, 101, 1009]


def test_p7_context(ctx7):
    assert ctx7.g == 3
    assert ctx7.ind[3] == 1
    assert ctx7.ind[2] == 2


@pytest.mark.parametrize("p", [4, 1, 9, 91, 1001])
def test_composite_rejected(p):
    with pytest.raises(NotPrime):
        build_field_ctx(p)


def test_memory_cap(monkeypatch):
    monkeypatch.setenv("CONGBOX_MEM_CAP_MB", "0.001")
    with pytest.raises(TooLarge):
        build_field_ctx(101)


def test_p_above_2_31():
    with pytest.raises(TooLarge):
        build_field_ctx(2**31 + 11)


@pytest.mark.parametrize("p", PRIMES)
def test_log_table(p):
    ctx = field(p)
    xs = np.arange(1, p)
    assert sorted(ctx.ind[1:].tolist()) == list(range(p - 1))
    assert all(pow(ctx.g, int(ctx.ind[x]), p) == x for x in xs)
    assert ctx.ind[0] == -1


@pytest.mark.parametrize("p", [7, 11, 13, 17, 19, 23, 101, 1009, 10007])
def test_smallest_primitive_root(p):
    def is_generator(g):
        return len({pow(g, j, p) for j in range(p - 1)}) == p - 1
    expected = next(g for g in range(2, p) if is_generator(g))
    assert smallest_primitive_root(p) == expected


@pytest.mark.parametrize("p", PRIMES)
def test_additive_roots_multiply(p):
    ctx = field(p)
    rng = np.random.default_rng(p)
    z, w = rng.integers(0, p, (2, 50))
    err = np.abs(ctx.add_roots[z] * ctx.add_roots[w] - ctx.add_roots[(z + w) % p])
    assert err.max() < 1e-12


def test_mod_pow():
    assert mod_pow(2, 10, 1009) == 15
    assert mod_pow(5, 3, 7) == 6
    assert mod_pow(0, 0, 7) == 1
    assert all(mod_pow(x, 1, 13) == x for x in range(13))


def test_mult_char_values(ctx7):
    assert mult_char(ctx7, 0, 5) == 1
    assert abs(mult_char(ctx7, 3, 3) - cmath.exp(1j * math.pi)) < 1e-15
    for t in range(6):
        assert mult_char(ctx7, t, 0) == 0


def test_mult_char_index_range(ctx7):
    with pytest.raises(IndexOutOfRange):
        mult_char(ctx7, 6, 1)
    with pytest.raises(IndexOutOfRange):
        mult_char(ctx7, -1, 1)


@settings(max_examples=60, deadline=None)
@given(p=st.sampled_from([7, 13, 101, 1009]), data=st.data())
def test_multiplicativity(p, data):
    ctx = field(p)
    t = data.draw(st.integers(0, p - 2))
    x = data.draw(st.integers(1, p - 1))
    y = data.draw(st.integers(1, p - 1))
    assert abs(mult_char(ctx, t, x * y % p) - mult_char(ctx, t, x) * mult_char(ctx, t, y)) < 1e-12


@pytest.mark.parametrize("p", [7, 13, 101, 1009])
def test_orthogonality(p):
    ctx = field(p)
    xs = np.arange(1, p)
    for t in {0, 1, (p - 1) // 2, p - 2}:
        expect = p - 1 if t == 0 else 0
        assert abs(char_values(ctx, t, xs).sum() - expect) < 1e-9 * p
    table = np.array([char_values(ctx, t, xs) for t in range(p - 1)])
    col = table.sum(axis=0)
    assert abs(col[0] - (p - 1)) < 1e-9 * p
    assert np.abs(col[1:]).max() < 1e-9 * p
    for c in (1, 2, p - 1):
        assert abs(ctx.add_roots[(c * np.arange(p)) % p].sum()) < 1e-9 * p


def test_context_is_read_only(ctx7):
    with pytest.raises(ValueError):
        ctx7.ind[1] = 5
