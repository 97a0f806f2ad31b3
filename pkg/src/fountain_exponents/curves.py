"""Exponent curves over a rate grid (or a normalized-rate grid) as CSV."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import Channel, mutual_information
from .exponents import (DEFAULT_GRID, ExponentPoint, OptimizerGrid, blokh_zyablov_comparison, channel_capacity,
                        e_fc_gamma_optimal, forney_exponent, infinite_level_exponent, multilevel_exponent,
                        one_level_exponent, one_level_fixed, one_level_lower_bound, random_fountain_exponent,
                        suboptimal_outer_rate)

RATE_HEADER = ("rate_nats", "exponent_nats", "rho_star", "ro_star")
GAMMA_HEADER = ("gamma", "exponent_nats", "rho_star", "ro_star")

RATE_CURVES = {
    "efr": random_fountain_exponent,
    "efc": one_level_exponent,
    "efc_tilde": one_level_lower_bound,
    "ec": forney_exponent,
    "efc_inf": infinite_level_exponent,
    "bz_comparison": blokh_zyablov_comparison,
}
GAMMA_CURVES = ("efcs", "efc_gamma")


class InfeasibleGrid(ValueError):
    pass


@dataclass(frozen=True)
class CurveSpec:
    """One requested curve; ``m`` is set only for ``efc_m:<m>``."""

    name: str
    m: int | None = None

    @property
    def gamma_mode(self) -> bool:
        return self.name in GAMMA_CURVES

    @property
    def label(self) -> str:
        return f"efc_m{self.m}" if self.m is not None else self.name


def parse_curves(text: str) -> list[CurveSpec]:
    out = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        if tok.startswith("efc_m:"):
            m = int(tok[6:])
            if m < 1:
                raise ValueError("efc_m:<m> needs m >= 1")
            out.append(CurveSpec("efc_m", m))
        elif tok in RATE_CURVES or tok in GAMMA_CURVES:
            out.append(CurveSpec(tok))
        else:
            known = sorted(RATE_CURVES) + list(GAMMA_CURVES) + ["efc_m:<m>"]
            raise ValueError(f"unknown curve {tok!r}; expected one of {known}")
    if not out:
        raise ValueError("no curves requested")
    return out


def parse_rate(text: str, cap: float) -> float:
    """Absolute nats, or a fraction of capacity with suffix ``c`` (``0.5c``)."""
    t = text.strip().lower()
    return float(t[:-1]) * cap if t.endswith("c") else float(t)


def rate_grid(cap: float, lo: float = 0.05, hi: float = 0.99, points: int = 32) -> np.ndarray:
    return np.linspace(lo, hi, points) * cap


def check_rates(rates, cap: float) -> None:
    rates = np.asarray(rates, dtype=float)
    if cap <= 0:
        raise InfeasibleGrid("channel capacity C_F = 0: every exponent is 0 and the feasible rate grid is empty")
    bad = rates[(rates <= 0) | (rates >= cap)]
    if bad.size:
        raise InfeasibleGrid(f"rates {bad.tolist()} lie outside (0, C_F) with C_F = {cap:.12g} nats")


def _evaluate(spec: CurveSpec, x: float, ch: Channel, grid: OptimizerGrid):
    if spec.name == "efc_m":
        return multilevel_exponent(x, ch, spec.m, grid)
    if spec.gamma_mode:
        # gamma-mode rows report gamma in place of the rate
        if spec.name == "efcs":
            p = one_level_fixed(x * mutual_information(ch), ch, None, suboptimal_outer_rate(x), grid)
        else:
            p = e_fc_gamma_optimal(x, ch, None, grid)
        return ExponentPoint(x, p.value, p.witness_rho, p.witness_ro, p.witness_px)
    return RATE_CURVES[spec.name](x, ch, grid=grid)


def evaluate_curve(spec: CurveSpec, xs, ch: Channel, grid: OptimizerGrid = DEFAULT_GRID,
                   threads: int = 1) -> list[ExponentPoint]:
    """Evaluate one curve on ``xs`` (rates, or gammas for the gamma curves).

    Grid points are independent; ``threads > 1`` evaluates them
    concurrently with identical results.
    """
    xs = [float(x) for x in xs]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(lambda x: _evaluate(spec, x, ch, grid), xs))
    return [_evaluate(spec, x, ch, grid) for x in xs]


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def curve_csv(spec: CurveSpec, points, comments=()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    header = list(GAMMA_HEADER if spec.gamma_mode else RATE_HEADER)
    if spec.m is not None:
        header.append("m")
    w.writerow(header)
    for p in points:
        row = [_fmt(p.rate), _fmt(p.value), _fmt(p.witness_rho), _fmt(p.witness_ro)]
        if spec.m is not None:
            row.append(spec.m)
        w.writerow(row)
    return buf.getvalue()


def config_hash(doc: dict) -> str:
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


def read_curve(path) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        rows = [line for line in fh.read().splitlines() if line and not line.startswith("#")]
    reader = csv.reader(rows)
    header = next(reader)
    data = np.array([[float(v) for v in r] for r in reader])
    return {h: data[:, i] for i, h in enumerate(header)}


def capacity_of(ch: Channel) -> float:
    return channel_capacity(ch)[0]
