"""Log/antilog tables for GF(2^m), 4 <= m <= 8.

GF(2^8) uses the AES polynomial x^8 + x^4 + x^3 + x + 1 with generator 3
(x + 1); x itself is not primitive for that polynomial. The smaller fields
use primitive polynomials with generator 2 and exist so that rate-compatible
macro symbols and exhaustive checks stay tractable.
"""
from __future__ import annotations

import functools

import numpy as np

# bits -> (reduction polynomial, generator)
FIELDS = {
    4: (0x13, 2),
    5: (0x25, 2),
    6: (0x43, 2),
    7: (0x89, 2),
    8: (0x11B, 3),
}


def _clmul(a: int, b: int, poly: int, bits: int) -> int:
    """Carry-less multiply with reduction; only used to build the tables."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> bits:
            a ^= poly
    return out


class GF:
    """Arithmetic in GF(2^bits) via exp/log tables.

    ``exp`` has length ``2 * order`` so products of two logs index it
    without a modulo. ``log[0]`` is a sentinel and must never be used.
    """

    def __init__(self, bits: int):
        if bits not in FIELDS:
            raise ValueError(f"unsupported field size 2^{bits}; choose bits in {sorted(FIELDS)}")
        poly, gen = FIELDS[bits]
        self.bits = bits
        self.size = 1 << bits
        self.order = self.size - 1
        self.poly = poly
        self.generator = gen
        exp = np.zeros(2 * self.order, dtype=np.int64)
        log = np.full(self.size, -1, dtype=np.int64)
        x = 1
        for i in range(self.order):
            exp[i] = x
            if log[x] != -1:
                raise ValueError(f"{gen} does not generate GF(2^{bits}) mod {poly:#x}")
            log[x] = i
            x = _clmul(x, gen, poly, bits)
        exp[self.order:] = exp[:self.order]
        exp.setflags(write=False)
        log.setflags(write=False)
        self.exp = exp
        self.log = log
        # plain lists are faster than numpy scalars in the scalar decoder loops
        self._exp = exp.tolist()
        self._log = log.tolist()

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF")
        if a == 0:
            return 0
        return self._exp[(self._log[a] - self._log[b]) % self.order]

    def inv(self, a: int) -> int:
        return self.div(1, a)

    def alpha_pow(self, e: int) -> int:
        return self._exp[e % self.order]

    def mul_vec(self, a: np.ndarray, b) -> np.ndarray:
        """Elementwise product of integer arrays."""
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        safe = (a != 0) & (b != 0)
        la = self.log[np.where(safe, a, 1)]
        lb = self.log[np.where(safe, b, 1)]
        return np.where(safe, self.exp[la + lb], 0)

    def __repr__(self):
        return f"GF(2^{self.bits})"


@functools.lru_cache(maxsize=None)
def field(bits: int) -> GF:
    return GF(bits)


# Polynomials are lists of coefficients, lowest degree first.

def poly_mul(f: GF, a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj:
                out[i + j] ^= f.mul(ai, bj)
    return out


def poly_eval(f: GF, p: list[int], x: int) -> int:
    acc = 0
    for c in reversed(p):
        acc = f.mul(acc, x) ^ c
    return acc


def poly_trim(p: list[int]) -> list[int]:
    n = len(p)
    while n > 1 and p[n - 1] == 0:
        n -= 1
    return p[:n]
