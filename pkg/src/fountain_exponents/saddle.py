"""Numeric min-max over two-point effective-length densities.

An independent route to the one-level fountain exponent at fixed
``(p_X, r_o)``: the adversary places mass ``gamma`` on a short length ``z0``
and the rest on ``(1 - gamma z0) / (1 - gamma)`` (mean one), pays the
quadratic large-deviation cost ``gamma / (1 - gamma) * (1 - z0)^2 / 2``, and
the decoder picks the Chernoff parameter ``s``. Used to cross-check the
closed form, not to compute it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Channel, _e0, as_probs
from .exponents import DEFAULT_GRID, OptimizerGrid, _E0, _rho_max, channel_capacity, phi_from_ez


@dataclass(frozen=True)
class SaddleConfig:
    z0_steps: int = 101
    gamma_steps: int = 99
    s_steps: int = 200
    s_max: float | None = None  # None: 4 * E0(1, p_X)

    def __post_init__(self):
        if self.z0_steps < 2 or self.gamma_steps < 1 or self.s_steps < 1:
            raise ValueError("empty saddle grid")
        if self.s_max is not None and not self.s_max > 0:
            raise ValueError("s_max must be positive")

    def z0_grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.z0_steps)

    def gamma_grid(self) -> np.ndarray:
        return np.arange(1, self.gamma_steps + 1) / (self.gamma_steps + 1)

    @property
    def z0_step(self) -> float:
        return 1.0 / (self.z0_steps - 1)

    @property
    def gamma_step(self) -> float:
        return 1.0 / (self.gamma_steps + 1)


@dataclass(frozen=True)
class SaddleResult:
    value: float
    z0: float
    gamma: float
    s_star: float
    # True when no point of the plain s grid beats the better of E_z(z0), E_z(z1)
    breakpoints_dominate: bool


def saddle_one_level(rate: float, ch: Channel, px, ro: float, sconf: SaddleConfig = SaddleConfig(),
                     grid: OptimizerGrid = DEFAULT_GRID) -> SaddleResult:
    cap, _ = channel_capacity(ch)
    if not (rate / cap if cap > 0 else np.inf) < ro < 1:
        raise ValueError(f"ro must lie in (R/C_F, 1) = ({rate / cap:.6g}, 1)")
    p = as_probs(px, ch)
    e0 = _E0(ch, p, grid)
    a = rate / ro
    s_max = sconf.s_max if sconf.s_max is not None else 4.0 * float(_e0(ch.transition, p, 1.0))

    z0 = sconf.z0_grid()[:, None]
    g = sconf.gamma_grid()[None, :]
    z1 = (1.0 - z0 * g) / (1.0 - g)
    ez0 = np.maximum(_rho_max(e0, a, z0[:, 0], 0.0)[0], 0.0)[:, None]
    ez1 = np.maximum(_rho_max(e0, a, z1, 0.0)[0], 0.0)
    ez0 = np.broadcast_to(ez0, ez1.shape)

    def mix(s):
        return g * phi_from_ez(ez0, s, ro) + (1.0 - g) * phi_from_ez(ez1, s, ro)

    # phi is piecewise linear in s, so its sum peaks at a breakpoint E_z(z0) or E_z(z1)
    at_bp0, at_bp1 = mix(ez0), mix(ez1)
    bp_best = np.maximum(at_bp0, at_bp1)
    s_bp = np.where(at_bp0 >= at_bp1, ez0, ez1)

    grid_best = np.full(ez1.shape, -np.inf)
    for s in np.linspace(0.0, s_max, sconf.s_steps + 1):
        grid_best = np.maximum(grid_best, mix(s))
    dominate = bool(np.all(grid_best <= bp_best + 1e-12))

    inner = np.maximum(bp_best, grid_best)
    total = inner + g / (1.0 - g) * (1.0 - z0) ** 2 / 2.0
    if not np.isfinite(total).any():
        raise ValueError("empty feasible saddle grid")
    i, j = np.unravel_index(np.argmin(total), total.shape)
    return SaddleResult(float(total[i, j]), float(z0[i, 0]), float(g[0, j]), float(s_bp[i, j]), dominate)
