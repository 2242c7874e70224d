"""Arithmetic modulo an odd prime and evaluation of its characters."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from sympy import factorint, isprime

from . import kernels
from .errors import IndexOutOfRange, NotPrime, TooLarge

P_MAX = 2**31
# ind + antilog (int64) and two complex128 root tables
_BYTES_PER_RESIDUE = 8 + 8 + 16 + 16


def memory_cap_bytes() -> int:
    """Table memory cap, from ``CONGBOX_MEM_CAP_MB`` (default 2048)."""
    return int(float(os.environ.get("CONGBOX_MEM_CAP_MB", "2048")) * 2**20)


def mod_pow(x: int, e: int, p: int) -> int:
    """``x**e mod p``; ``e == 0`` gives 1, including ``x == 0``."""
    if e < 0:
        raise ValueError("negative exponent")
    return pow(int(x), int(e), int(p))


def smallest_primitive_root(p: int) -> int:
    """Smallest g whose order mod p is p-1 (p prime)."""
    if p == 2:
        return 1
    order = p - 1
    cofactors = [order // q for q in factorint(order)]
    g = 2
    while any(pow(g, c, p) == 1 for c in cofactors):
        g += 1
    return g


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """Immutable context for the prime field of order ``p``.

    ``ind[x]`` is the discrete log of ``x`` to base ``g`` (``ind[0]`` is -1),
    ``antilog[j] = g**j``.  Character ``t`` is
    ``chi_t(g**j) = exp(2*pi*i*t*j/(p-1))`` with ``chi_t(0) = 0``.
    """

    p: int
    g: int
    ind: np.ndarray = field(repr=False)
    antilog: np.ndarray = field(repr=False)
    add_roots: np.ndarray = field(repr=False)
    mult_roots: np.ndarray = field(repr=False)

    def e_p(self, z) -> complex | np.ndarray:
        """Additive character ``exp(2*pi*i*z/p)``."""
        return self.add_roots[np.mod(z, self.p)]

    @cached_property
    def inv(self) -> np.ndarray:
        """Table of inverses; ``inv[0]`` is 0."""
        out = np.zeros(self.p, dtype=np.int64)
        out[1:] = self.antilog[(-self.ind[1:]) % (self.p - 1)]
        return out

    def check_index(self, t: int) -> int:
        if not 0 <= t <= self.p - 2:
            raise IndexOutOfRange(f"character index {t} outside [0, {self.p - 2}]")
        return int(t)


def build_field_ctx(p: int) -> FieldCtx:
    p = int(p)
    if p < 3 or not isprime(p):
        raise NotPrime(f"{p} is not an odd prime")
    if p > P_MAX:
        raise TooLarge(f"p={p} exceeds 2**31")
    need = _BYTES_PER_RESIDUE * p
    if need > memory_cap_bytes():
        raise TooLarge(
            f"tables for p={p} need {need / 2**20:.0f} MiB, cap is "
            f"{memory_cap_bytes() / 2**20:.0f} MiB (CONGBOX_MEM_CAP_MB)")
    g = smallest_primitive_root(p)
    antilog = kernels.antilog_table(g, p)
    ind = np.full(p, -1, dtype=np.int64)
    ind[antilog] = np.arange(p - 1, dtype=np.int64)
    add_roots = np.exp(2j * np.pi * np.arange(p) / p)
    mult_roots = np.exp(2j * np.pi * np.arange(p - 1) / (p - 1))
    for arr in (ind, antilog, add_roots, mult_roots):
        arr.setflags(write=False)
    return FieldCtx(p, g, ind, antilog, add_roots, mult_roots)


def mult_char(ctx: FieldCtx, t: int, x: int) -> complex:
    """Value of character ``t`` at residue ``x``; zero at ``x = 0``."""
    t = ctx.check_index(t)
    x = int(x) % ctx.p
    if x == 0:
        return 0j
    return complex(ctx.mult_roots[(t * int(ctx.ind[x])) % (ctx.p - 1)])


def char_values(ctx: FieldCtx, t: int, xs) -> np.ndarray:
    """Vectorised ``mult_char`` over an array of residues."""
    t = ctx.check_index(t)
    xs = np.mod(np.asarray(xs, dtype=np.int64), ctx.p)
    out = ctx.mult_roots[(t * ctx.ind[xs]) % (ctx.p - 1)]
    return np.where(xs == 0, 0j, out)


def log_positions(ctx: FieldCtx, values) -> np.ndarray:
    """Discrete logs of ``values`` with -1 marking zero residues."""
    values = np.mod(np.asarray(values, dtype=np.int64), ctx.p)
    return ctx.ind[values]
