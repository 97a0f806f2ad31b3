"""Fountain error exponents as numerical optimization problems.

Every exponent here is a maximum over some of ``p_X``, the outer code rate
``r_o`` and Gallager's ``rho``. The innermost maximization always has the
form

    max_{0 <= rho <= 1}  -rho * a + b * E0(rho) - c * E0(rho)**2

so a single batched solver (:func:`_rho_max`) serves all of them:

=====================  ==========  =====  =================
exponent               a           b      c
=====================  ==========  =====  =================
random coding E_FL     R           1      0
penalized E_FL         x           1      1
one-level E_Fc         R / r_o     1      (1 + r_o) / 2
lower bound            R / r_o     1      1
Forney E_c             R / r_o     1      0
adjusted E_z(z)        R / r_o     z      0
=====================  ==========  =====  =================
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .channel import Channel, InputDistribution, _e0, as_probs, capacity, mutual_information
from .optimize import golden_max, maximize, maximize_simplex

RATE_SLACK = 1e-12


class RateNotAchievable(ValueError):
    pass


@dataclass(frozen=True)
class OptimizerGrid:
    """Discretization of the continuous max/min problems.

    ``tol`` is the target accuracy of exponent values; arguments are polished
    to ``tol * 1e-3`` so near-boundary optima are resolved as well.
    """

    rho_steps: int = 64
    ro_steps: int = 64
    refine_rounds: int = 2
    tol: float = 1e-6

    def __post_init__(self):
        if self.rho_steps < 64 or self.ro_steps < 64:
            raise ValueError("rho_steps and ro_steps must be >= 64")
        if self.refine_rounds < 1:
            raise ValueError("refine_rounds must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    @property
    def xtol(self) -> float:
        return self.tol * 1e-3


DEFAULT_GRID = OptimizerGrid()


@dataclass(frozen=True)
class ExponentPoint:
    rate: float
    value: float
    witness_rho: float
    witness_ro: float
    witness_px: InputDistribution


class _E0:
    """E0(., p_X) for one channel/input pair, with its rho grid cached."""

    def __init__(self, ch: Channel, px, grid: OptimizerGrid):
        self.P = ch.transition
        self.p = as_probs(px, ch)
        self.rho_grid = np.linspace(0.0, 1.0, grid.rho_steps + 1)
        self.grid_vals = _e0(self.P, self.p, self.rho_grid)
        self.xtol = grid.xtol

    def __call__(self, rho):
        return _e0(self.P, self.p, rho)


def _rho_max(e0: _E0, a, b=1.0, c=0.0):
    """Batched ``max over rho in [0, 1]`` of ``-rho a + b E0 - c E0^2``.

    Returns ``(values, argmax)`` with the broadcast shape of ``a, b, c``.
    """
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c)))
    shape = a.shape
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    rho, E = e0.rho_grid, e0.grid_vals
    v = -np.outer(a, rho) + b[:, None] * E - c[:, None] * E * E
    i = np.argmax(v, axis=1)
    rows = np.arange(a.size)
    gbest, gx = v[rows, i], rho[i]
    step = rho[1]
    lo = np.maximum(0.0, gx - step)
    hi = np.minimum(1.0, gx + step)

    def f(r):
        Er = e0(r)
        return -r * a[:, None] + b[:, None] * Er - c[:, None] * Er * Er

    xg, fg = golden_max(f, lo, hi, e0.xtol)
    use = fg > gbest
    return np.where(use, fg, gbest).reshape(shape), np.where(use, xg, gx).reshape(shape)


def _outer_max(objective, lo: float, hi: float, grid: OptimizerGrid):
    """Scalar ``max over r_o in [lo, hi]`` of a batched objective."""
    if hi - lo <= 0:
        x = np.array([lo])
        return lo, float(objective(x)[0])

    def f(X):
        return objective(X.ravel()).reshape(X.shape)

    x, v = maximize(f, lo, hi, steps=grid.ro_steps, rounds=grid.refine_rounds, xtol=grid.xtol)
    return float(x[0]), float(v[0])


@functools.lru_cache(maxsize=256)
def channel_capacity(ch: Channel) -> tuple[float, InputDistribution]:
    return capacity(ch)


def _rate_status(rate: float, cap: float) -> bool:
    """True when ``rate`` sits at capacity (exponent 0); raise above it."""
    if rate < 0:
        raise ValueError("rate must be non-negative")
    slack = RATE_SLACK * max(1.0, cap)
    if rate > cap + slack:
        raise RateNotAchievable(f"rate not achievable: R={rate:.6g} exceeds C_F={cap:.6g} nats")
    return rate >= cap - slack


def _ratio(rate: float, ro):
    ro = np.asarray(ro, dtype=float)
    if rate == 0:
        return np.zeros_like(ro)
    return rate / ro


def _best_over_px(ch: Channel, evaluate, seed: int = 0) -> ExponentPoint:
    """Uniform input for symmetric channels, projected ascent otherwise."""
    if ch.symmetric:
        return evaluate(InputDistribution.uniform(ch.input_size))
    p, _ = maximize_simplex(lambda q: evaluate(InputDistribution(q / q.sum())).value,
                            ch.input_size, starts=8, seed=seed)
    return evaluate(InputDistribution(p / p.sum()))


# ---------------------------------------------------------------- random coding

def e_fl(rate: float, ch: Channel, px=None, grid: OptimizerGrid = DEFAULT_GRID) -> ExponentPoint:
    """``max over rho`` of ``-rho R + E0(rho, p_X)``."""
    if rate < 0:
        raise ValueError("rate must be non-negative")
    e0 = _E0(ch, px, grid)
    v, r = _rho_max(e0, rate)
    return ExponentPoint(rate, max(0.0, float(v)), float(r), 1.0, InputDistribution(e0.p))


def e_fl_penalized(x: float, ch: Channel, px=None, grid: OptimizerGrid = DEFAULT_GRID) -> ExponentPoint:
    """``max over rho`` of ``-rho x + E0 (1 - E0)``; the inner exponent of the multi-level bounds."""
    if x < 0:
        raise ValueError("rate must be non-negative")
    e0 = _E0(ch, px, grid)
    v, r = _rho_max(e0, x, 1.0, 1.0)
    return ExponentPoint(x, max(0.0, float(v)), float(r), 1.0, InputDistribution(e0.p))


def random_fountain_exponent(rate: float, ch: Channel, grid: OptimizerGrid = DEFAULT_GRID) -> ExponentPoint:
    cap, _ = channel_capacity(ch)
    if _rate_status(rate, cap):
        return ExponentPoint(rate, 0.0, 0.0, 1.0, InputDistribution.uniform(ch.input_size))
    return _best_over_px(ch, lambda px: e_fl(rate, ch, px, grid))


# ---------------------------------------------------------------- one level

def _one_level_form(rate, ch, px, grid, c_of_ro, lo, hi):
    e0 = _E0(ch, px, grid)

    def objective(ro):
        v, _ = _rho_max(e0, _ratio(rate, ro), 1.0, c_of_ro(ro))
        return (1.0 - ro) * v

    ro, val = _outer_max(objective, lo, hi, grid)
    _, rho = _rho_max(e0, _ratio(rate, ro), 1.0, c_of_ro(np.asarray(ro)))
    return ExponentPoint(rate, max(0.0, val), float(rho), ro, InputDistribution(e0.p))


def _c_fountain(ro):
    return (1.0 + np.asarray(ro)) / 2.0


def _c_one(ro):
    return np.ones_like(np.asarray(ro, dtype=float))


def _c_zero(ro):
    return np.zeros_like(np.asarray(ro, dtype=float))


def _concatenated(rate, ch, grid, c_of_ro):
    cap, _ = channel_capacity(ch)
    if _rate_status(rate, cap):
        return ExponentPoint(rate, 0.0, 0.0, 1.0, InputDistribution.uniform(ch.input_size))
    lo = rate / cap
    return _best_over_px(ch, lambda px: _one_level_form(rate, ch, px, grid, c_of_ro, lo, 1.0))


def one_level_exponent(rate: float, ch: Channel, grid: OptimizerGrid = DEFAULT_GRID) -> ExponentPoint:
    """One-level concatenated fountain exponent E_Fc(R)."""
    return _concatenated(rate, ch, grid, _c_fountain)


def one_level_lower_bound(rate: float, ch: Channel, grid: OptimizerGrid = DEFAULT_GRID) -> ExponentPoint:
    """Lower bound on E_Fc(R) with the penalty bracket ``1 - E0``."""
    return _concatenated(rate, ch, grid, _c_one)


def forney_exponent(rate: float, ch: Channel, grid: OptimizerGrid = DEFAULT_GRID) -> ExponentPoint:
    """Classical one-level concatenation exponent: no fountain penalty."""
    return _concatenated(rate, ch, grid, _c_zero)


def one_level_fixed(rate: float, ch: Channel, px, ro: float,
                    grid: OptimizerGrid = DEFAULT_GRID) -> ExponentPoint:
    """E_Fc objective maximized over rho only, at fixed ``p_X`` and ``r_o``."""
    if not 0 < ro <= 1:
        raise ValueError("ro must lie in (0, 1]")
    e0 = _E0(ch, px, grid)
    v, r = _rho_max(e0, _ratio(rate, ro), 1.0, _c_fountain(ro))
    return ExponentPoint(rate, max(0.0, (1 - ro) * float(v)), float(r), ro, InputDistribution(e0.p))


# ---------------------------------------------------------------- multi level

def _harmonic_levels(rate, ch, px, grid, nodes, lo, penalized=True):
    """max over r_o of ``(1 - r_o) * HM_i E_FL(t_i R / r_o)``.

    Both the m-level sum and the infinite-level integral reduce to this:
    ``(R/r_o - R) / ((R/(r_o m)) sum_i 1/E_i) = (1 - r_o) / mean_i(1/E_i)``.
    ``nodes`` are the fractions ``t_i`` of ``R / r_o`` at which E_FL is taken.
    A level with ``E_FL <= 0`` makes that ``r_o`` infeasible.
    """
    e0 = _E0(ch, px, grid)
    nodes = np.asarray(nodes, dtype=float)
    c = 1.0 if penalized else 0.0

    def objective(ro):
        x = np.outer(_ratio(rate, ro), nodes)
        E, _ = _rho_max(e0, x, 1.0, c)
        with np.errstate(divide="ignore"):
            inv = np.where(E > 0, 1.0 / np.where(E > 0, E, 1.0), np.inf)
        mean_inv = inv.mean(axis=1)
        return np.where(np.isfinite(mean_inv), (1.0 - ro) / mean_inv, -np.inf)

    ro, val = _outer_max(objective, lo, 1.0, grid)
    if not np.isfinite(val):
        raise RateNotAchievable("no feasible outer rate: every r_o leaves a level with E_FL <= 0")
    _, rho = _rho_max(e0, _ratio(rate, ro) * nodes[-1], 1.0, c)
    return ExponentPoint(rate, max(0.0, val), float(rho), ro, InputDistribution(e0.p))


def multilevel_exponent(rate: float, ch: Channel, m: int,
                        grid: OptimizerGrid = DEFAULT_GRID) -> ExponentPoint:
    """m-level concatenated fountain exponent.

    ``witness_rho`` is the maximizing rho of the top level (``i = m``).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    cap, _ = channel_capacity(ch)
    if _rate_status(rate, cap):
        return ExponentPoint(rate, 0.0, 0.0, 1.0, InputDistribution.uniform(ch.input_size))
    nodes = np.arange(1, m + 1) / m
    return _best_over_px(ch, lambda px: _harmonic_levels(rate, ch, px, grid, nodes, rate / cap))


def infinite_level_exponent(rate: float, ch: Channel, grid: OptimizerGrid = DEFAULT_GRID,
                            quad_steps: int = 1024, penalized: bool = True) -> ExponentPoint:
    """Limit of the m-level exponent; the integral of ``1/E_FL`` uses the
    composite midpoint rule with ``quad_steps`` nodes.

    ``penalized=False`` swaps in the unpenalized E_FL, which gives the
    classical comparison curve (see :func:`blokh_zyablov_comparison`).
    """
    if quad_steps < 256:
        raise ValueError("quad_steps must be >= 256")
    cap, _ = channel_capacity(ch)
    if _rate_status(rate, cap):
        return ExponentPoint(rate, 0.0, 0.0, 1.0, InputDistribution.uniform(ch.input_size))
    nodes = (np.arange(quad_steps) + 0.5) / quad_steps
    return _best_over_px(ch, lambda px: _harmonic_levels(rate, ch, px, grid, nodes, rate / cap,
                                                          penalized=penalized))


def blokh_zyablov_comparison(rate: float, ch: Channel, grid: OptimizerGrid = DEFAULT_GRID,
                             quad_steps: int = 1024) -> ExponentPoint:
    """Infinite-level curve without the fountain penalty.

    A comparison curve in the Blokh-Zyablov style, not a reproduction of the
    classical exponent itself.
    """
    return infinite_level_exponent(rate, ch, grid, quad_steps, penalized=False)


# ---------------------------------------------------------------- GMD analysis pieces

def adjusted_exponent_ez(z, rate_over_ro: float, ch: Channel, px=None,
                         grid: OptimizerGrid = DEFAULT_GRID):
    """``E_z(z) = max over rho`` of ``-rho R/r_o + z E0(rho)``, clamped at 0."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("z must be non-negative")
    v, _ = _rho_max(_E0(ch, px, grid), rate_over_ro, z, 0.0)
    v = np.maximum(v, 0.0)
    return float(v) if v.ndim == 0 else v


def phi_from_ez(ez, s, ro):
    """Three-branch GMD Chernoff term given ``E_z(z)``; boundaries go upward."""
    ez, s = np.broadcast_arrays(np.asarray(ez, dtype=float), np.asarray(s, dtype=float))
    return np.where(ez >= s, (1.0 - ro) * s,
                    np.where(ez >= s / 2, 2 * ez - (1.0 + ro) * s, -s * ro))


def phi(z, s, rate_over_ro: float, ro: float, ch: Channel, px=None,
        grid: OptimizerGrid = DEFAULT_GRID):
    if np.any(np.asarray(s) < 0):
        raise ValueError("s must be non-negative")
    out = phi_from_ez(adjusted_exponent_ez(z, rate_over_ro, ch, px, grid), s, ro)
    return float(out) if out.ndim == 0 else out


def closed_form_witness_z0(ro: float, e0: float) -> float:
    """Minimizing short-code length ``1 - (1 + r_o) E0`` of the two-point density."""
    if (1.0 + ro) * e0 > 1.0 + 1e-12:
        raise ValueError("outside closed-form regime: (1 + r_o) E0 > 1")
    return max(0.0, 1.0 - (1.0 + ro) * e0)


# ---------------------------------------------------------------- unknown channel

def suboptimal_outer_rate(gamma: float) -> float:
    """Channel-independent outer rate ``(sqrt(g^2 + 8g) - g) / 2``."""
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    return (math.sqrt(gamma * gamma + 8 * gamma) - gamma) / 2


def e_fc_gamma(gamma: float, ch: Channel, px, ro: float,
               grid: OptimizerGrid = DEFAULT_GRID) -> float:
    """One-level exponent at normalized rate ``gamma = R / I(p_X)`` and fixed ``r_o``."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if not gamma - 1e-12 <= ro <= 1:
        raise ValueError(f"infeasible outer rate {ro}: need gamma <= r_o <= 1")
    info = mutual_information(ch, px)
    return one_level_fixed(gamma * info, ch, px, ro, grid).value


def e_fc_gamma_optimal(gamma: float, ch: Channel, px=None,
                       grid: OptimizerGrid = DEFAULT_GRID) -> ExponentPoint:
    """``max over r_o in [gamma, 1]`` of :func:`e_fc_gamma`."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    rate = gamma * mutual_information(ch, px)
    return _one_level_form(rate, ch, px, grid, _c_fountain, gamma, 1.0)


def e_fcs(gamma: float, ch: Channel, px=None, grid: OptimizerGrid = DEFAULT_GRID) -> float:
    """Exponent with the outer rate fixed at :func:`suboptimal_outer_rate`."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    return e_fc_gamma(gamma, ch, px, suboptimal_outer_rate(gamma), grid)
