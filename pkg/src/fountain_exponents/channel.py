"""Discrete memoryless channels and Gallager-style information functionals.

All quantities are in nats. Zero transition probabilities follow the usual
conventions ``0 * log 0 = 0`` and ``0 ** a = 0`` for ``a > 0``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import rel_entr

ROW_SUM_TOL = 1e-12


class CapacityError(RuntimeError):
    """Blahut-Arimoto did not reach the requested tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Channel:
    """Row-stochastic transition matrix ``p(y|x)``; rows are inputs."""

    transition: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        P = _frozen(self.transition)
        if P.ndim != 2 or P.shape[0] < 2 or P.shape[1] < 2:
            raise ValueError("transition must be a matrix with at least 2 inputs and 2 outputs")
        if not np.all(np.isfinite(P)) or np.any(P < 0) or np.any(P > 1):
            raise ValueError("transition entries must lie in [0, 1]")
        dev = np.abs(P.sum(axis=1) - 1.0).max()
        if dev > ROW_SUM_TOL:
            raise ValueError(f"transition rows must sum to 1 (max deviation {dev:.3e})")
        object.__setattr__(self, "transition", P)

    @property
    def input_size(self) -> int:
        return self.transition.shape[0]

    @property
    def output_size(self) -> int:
        return self.transition.shape[1]

    @property
    def symmetric(self) -> bool:
        """Gallager symmetry: the outputs split into groups in which rows are
        permutations of each other and columns are permutations of each other.

        Grouping columns by their sorted entries is the coarsest valid
        partition, so checking that one grouping decides the question.
        """
        P = np.round(self.transition, 12)
        groups: dict[tuple, list[int]] = {}
        for y in range(P.shape[1]):
            groups.setdefault(tuple(np.sort(P[:, y])), []).append(y)
        for cols in groups.values():
            sub = np.sort(P[:, cols], axis=1)
            if not np.all(sub == sub[0]):
                return False
        return True

    def __repr__(self):
        label = self.name or f"{self.input_size}x{self.output_size}"
        return f"Channel({label})"

    def __hash__(self):
        return hash(self.transition.tobytes())

    def __eq__(self, other):
        return isinstance(other, Channel) and np.array_equal(self.transition, other.transition)


@dataclass(frozen=True)
class InputDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = _frozen(self.probs)
        if p.ndim != 1 or p.size < 2:
            raise ValueError("input distribution must be a vector of length >= 2")
        if np.any(p < 0) or abs(p.sum() - 1.0) > ROW_SUM_TOL:
            raise ValueError("input distribution must be non-negative and sum to 1")
        object.__setattr__(self, "probs", p)

    @classmethod
    def uniform(cls, n: int) -> "InputDistribution":
        return cls(np.full(n, 1.0 / n))

    @property
    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.probs)
        c[-1] = 1.0
        return c

    def __len__(self):
        return self.probs.size

    def __hash__(self):
        return hash(self.probs.tobytes())

    def __eq__(self, other):
        return isinstance(other, InputDistribution) and np.array_equal(self.probs, other.probs)


def as_probs(px, ch: Channel | None = None) -> np.ndarray:
    """Accept an InputDistribution, an array, or None (uniform for ``ch``)."""
    if px is None:
        if ch is None:
            raise ValueError("need a channel to default the input distribution")
        return np.full(ch.input_size, 1.0 / ch.input_size)
    p = px.probs if isinstance(px, InputDistribution) else np.asarray(px, dtype=float)
    if ch is not None and p.size != ch.input_size:
        raise ValueError(f"input distribution has {p.size} entries, channel has {ch.input_size} inputs")
    return p


def make_bsc(crossover: float) -> Channel:
    """Binary symmetric channel in canonical form (crossover <= 1/2)."""
    if not 0.0 <= crossover <= 0.5:
        raise ValueError(f"crossover must lie in [0, 1/2], got {crossover}")
    q = float(crossover)
    return Channel(np.array([[1 - q, q], [q, 1 - q]]), name=f"bsc:{q:g}")


def _e0(P: np.ndarray, p: np.ndarray, rho) -> np.ndarray:
    # No range check: the slope probe evaluates slightly negative rho.
    rho = np.asarray(rho, dtype=float)
    a = 1.0 / (1.0 + rho)
    with np.errstate(divide="ignore"):
        logP = np.log(P)
    powered = np.exp(a[..., None, None] * logP)  # P**a with 0**a = 0
    inner = np.einsum("x,...xy->...y", p, powered)
    with np.errstate(divide="ignore"):
        total = np.exp((1.0 + rho)[..., None] * np.log(inner)).sum(axis=-1)
    return -np.log(total)


def gallager_e0(ch: Channel, px, rho):
    """``E0(rho, p_X) = -log sum_y (sum_x p(x) p(y|x)^(1/(1+rho)))^(1+rho)``.

    Vectorized over ``rho``; scalars in give a float out.
    """
    r = np.asarray(rho, dtype=float)
    if np.any(r < 0) or np.any(r > 1):
        raise ValueError("rho must lie in [0, 1]")
    out = _e0(ch.transition, as_probs(px, ch), r)
    return float(out) if out.ndim == 0 else out


def mutual_information(ch: Channel, px=None) -> float:
    p = as_probs(px, ch)
    P = ch.transition
    q = p @ P
    return float(max(0.0, np.sum(p[:, None] * rel_entr(P, q[None, :]))))


def e0_slope_at_zero(ch: Channel, px=None, h: float = 1e-4) -> float:
    """Central-difference estimate of dE0/drho at rho = 0."""
    if not 0.0 < h <= 1e-3:
        raise ValueError("h must lie in (0, 1e-3]")
    p = as_probs(px, ch)
    return float((_e0(ch.transition, p, h) - _e0(ch.transition, p, -h)) / (2 * h))


def capacity(ch: Channel, tol: float = 1e-10, max_iter: int = 100_000) -> tuple[float, InputDistribution]:
    """Shannon capacity (nats) and an achieving input distribution.

    Symmetric channels short-circuit to the uniform input. Otherwise
    Blahut-Arimoto runs until the gap between its lower and upper capacity
    bounds is below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = ch.input_size
    if ch.symmetric:
        u = InputDistribution.uniform(n)
        return mutual_information(ch, u), u

    P = ch.transition
    p = np.full(n, 1.0 / n)
    gap = np.inf
    for _ in range(max_iter):
        q = p @ P
        d = rel_entr(P, q[None, :]).sum(axis=1)  # D(P(.|x) || q)
        lower = float(p @ d)
        upper = float(d.max())
        gap = upper - lower
        if gap < tol:
            p = p / p.sum()
            return max(0.0, lower), InputDistribution(p)
        p = p * np.exp(d - d.max())
        p /= p.sum()
    raise CapacityError("Blahut-Arimoto did not converge", gap)


def load_channel(path) -> tuple[Channel, InputDistribution | None]:
    """Read ``{"transition": [[...]], "input_dist": [...]}`` from JSON."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    ch = Channel(np.asarray(doc["transition"], dtype=float), name=Path(path).stem)
    px = doc.get("input_dist")
    if px is not None:
        px = InputDistribution(np.asarray(px, dtype=float))
        as_probs(px, ch)
    return ch, px


def parse_channel(source: str) -> tuple[Channel, InputDistribution | None]:
    """``bsc:<p>`` or a path to a channel JSON document."""
    if source.startswith("bsc:"):
        return make_bsc(float(source[4:])), None
    return load_channel(source)
