"""Systematic Reed-Solomon outer code with errors-and-erasures decoding.

Codewords are laid out message first, parity after. Internally position
``p`` of a length-``n`` word is the coefficient of ``x^(n-1-p)``, so the
message occupies the high-degree coefficients and the parity
``m(x) x^(n-k) mod g(x)`` the low ones. The generator polynomial has roots
``alpha^0 .. alpha^(n-k-1)``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .gf import GF, field, poly_eval, poly_mul, poly_trim


@dataclass(frozen=True)
class OuterCodeSpec:
    n_o: int
    k_o: int
    field_bits: int = 8

    def __post_init__(self):
        if not 1 <= self.k_o < self.n_o:
            raise ValueError(f"need 1 <= k_o < n_o, got k_o={self.k_o}, n_o={self.n_o}")
        gf = field(self.field_bits)  # also validates field_bits
        if self.n_o > gf.order:
            raise ValueError(f"n_o={self.n_o} exceeds 2^{self.field_bits} - 1")

    @property
    def rate(self) -> float:
        return self.k_o / self.n_o

    @property
    def nsym(self) -> int:
        return self.n_o - self.k_o

    @property
    def gf(self) -> GF:
        return field(self.field_bits)


@functools.lru_cache(maxsize=64)
def _generator(bits: int, nsym: int) -> tuple[int, ...]:
    f = field(bits)
    g = [1]
    for i in range(nsym):
        g = poly_mul(f, g, [f.alpha_pow(i), 1])  # (x + alpha^i), char 2
    return tuple(g)


@functools.lru_cache(maxsize=64)
def _syndrome_logs(bits: int, n: int, nsym: int) -> np.ndarray:
    # log of alpha^(j * i) for syndrome j and coefficient index i
    f = field(bits)
    j = np.arange(nsym)[:, None]
    i = np.arange(n)[None, :]
    return (j * i) % f.order


def _check_symbols(spec: OuterCodeSpec, word, length: int, what: str) -> list[int]:
    w = [int(v) for v in word]
    if len(w) != length:
        raise ValueError(f"{what} must have {length} symbols, got {len(w)}")
    top = spec.gf.size
    if any(v < 0 or v >= top for v in w):
        raise ValueError(f"{what} symbols must lie in [0, {top})")
    return w


def outer_encode(spec: OuterCodeSpec, message) -> list[int]:
    """Systematic encoding: returns ``message + parity``."""
    msg = _check_symbols(spec, message, spec.k_o, "message")
    f = spec.gf
    g = _generator(spec.field_bits, spec.nsym)
    nsym = spec.nsym
    # long division of m(x) x^nsym by the monic g(x), highest degree first
    rem = msg + [0] * nsym
    for i in range(spec.k_o):
        coef = rem[i]
        if coef:
            for d in range(1, nsym + 1):
                rem[i + d] ^= f.mul(g[nsym - d], coef)
    return msg + rem[spec.k_o:]


def syndromes(spec: OuterCodeSpec, word) -> list[int]:
    """``S_j = r(alpha^j)`` for ``j < n - k``; all zero iff ``word`` is a codeword."""
    f = spec.gf
    coeffs = np.asarray(word, dtype=np.int64)[::-1]  # coefficient of x^i
    L = _syndrome_logs(spec.field_bits, spec.n_o, spec.nsym)
    nz = coeffs != 0
    if not nz.any():
        return [0] * spec.nsym
    terms = f.exp[(L[:, nz] + f.log[coeffs[nz]][None, :]) % f.order]
    return np.bitwise_xor.reduce(terms, axis=1).tolist()


def decode_errors_erasures(spec: OuterCodeSpec, received, erasures=()) -> list[int] | None:
    """Correct ``t`` errors and ``d`` erasures whenever ``2t + d <= n_o - k_o``.

    ``erasures`` lists erased positions; the symbols there are ignored.
    Returns the message, or ``None`` when the word is outside the decoding
    radius. A returned message always re-encodes to a codeword within the
    radius of the received word.
    """
    word = _check_symbols(spec, received, spec.n_o, "received word")
    n, nsym, f = spec.n_o, spec.nsym, spec.gf
    er = sorted({int(p) for p in erasures})
    if any(p < 0 or p >= n for p in er):
        raise ValueError("erasure position out of range")
    if len(er) > nsym:
        return None
    for p in er:
        word[p] = 0
    S = syndromes(spec, word)
    if not any(S):
        return word[:spec.k_o]

    # Berlekamp-Massey seeded with the erasure locator (Blahut's errata form)
    locs = [f.alpha_pow(n - 1 - p) for p in er]
    lam = [1]
    for X in locs:
        lam = poly_mul(f, lam, [1, X])
    B = list(lam)
    L = len(er)
    for r in range(len(er), nsym):
        delta = 0
        for i in range(min(len(lam), r + 1)):
            if lam[i]:
                delta ^= f.mul(lam[i], S[r - i])
        B = [0] + B
        if delta:
            upd = lam + [0] * max(0, len(B) - len(lam))
            for i, b in enumerate(B):
                if b:
                    upd[i] ^= f.mul(delta, b)
            if 2 * L <= r + len(er):
                L_new = r + 1 + len(er) - L
                inv = f.inv(delta)
                B = [f.mul(c, inv) for c in lam]
                L = L_new
            lam = upd
    lam = poly_trim(lam)
    deg = len(lam) - 1
    if deg != L or 2 * (L - len(er)) + len(er) > nsym:
        return None

    # Chien search over the n valid positions
    roots = []
    for p in range(n):
        xinv = f.alpha_pow(-(n - 1 - p))
        if poly_eval(f, lam, xinv) == 0:
            roots.append(p)
    if len(roots) != deg:
        return None

    omega = poly_mul(f, S, lam)[:nsym]
    dlam = [lam[i] if i % 2 == 1 else 0 for i in range(1, len(lam))]  # formal derivative
    for p in roots:
        X = f.alpha_pow(n - 1 - p)
        xinv = f.inv(X)
        den = poly_eval(f, dlam, xinv)
        if den == 0:
            return None
        word[p] ^= f.mul(X, f.div(poly_eval(f, omega, xinv), den))

    if any(syndromes(spec, word)):
        return None
    orig = _check_symbols(spec, received, n, "received word")
    erased = set(er)
    t = sum(1 for p in range(n) if p not in erased and word[p] != orig[p])
    if 2 * t + len(er) > nsym:
        return None
    return word[:spec.k_o]


def gmd_candidate_set(weights, max_erasures: int | None = None) -> list[tuple[int, ...]]:
    """Erasure patterns for GMD decoding, by increasing erasure count.

    Pattern ``j`` erases the ``j`` least reliable positions; equal weights
    erase the lower index first. ``max_erasures`` defaults to
    ``len(weights) - 1``; GMD decoding passes ``n_o - k_o``.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1:
        raise ValueError("weights must be a vector")
    top = w.size - 1 if max_erasures is None else int(max_erasures)
    if not 0 <= top <= w.size:
        raise ValueError("max_erasures out of range")
    order = np.argsort(w, kind="stable").tolist()
    return [tuple(sorted(order[:j])) for j in range(top + 1)]


def to_hex(word) -> str:
    """Space-separated hex dump, for debugging."""
    return " ".join(f"{int(v):02x}" for v in word)
