"""Self-checks that tie the numeric exponents to the structural claims
behind them: saddle-point equivalence, orderings, level collapse, limits,
and GMD soundness.

Each suite returns a :class:`SuiteResult`. ``tol`` overrides a suite's
primary tolerance, which is how a negative control is run.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel import Channel, gallager_e0, make_bsc
from .codec import gmd_decode
from .exponents import (DEFAULT_GRID, channel_capacity, e_fc_gamma_optimal, e_fcs, forney_exponent,
                        infinite_level_exponent, multilevel_exponent, one_level_exponent, one_level_fixed,
                        one_level_lower_bound)
from .outer import OuterCodeSpec, outer_encode
from .saddle import SaddleConfig, saddle_one_level

SUITES = ("saddle", "sandwich", "mcollapse", "limits", "gmd")

# (R / C_F, r_o) pairs for the saddle suite
SADDLE_POINTS = ((0.5, 0.6), (0.5, 0.75), (0.5, 0.9), (0.3, 0.5), (0.3, 0.7),
                 (0.3, 0.9), (0.7, 0.8), (0.7, 0.9), (0.2, 0.4), (0.8, 0.95))


@dataclass
class Check:
    name: str
    observed: float
    expected: float
    tol: float
    passed: bool
    gating: bool = True


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    def add(self, name, observed, expected, tol, passed, gating=True):
        self.checks.append(Check(name, float(observed), float(expected), float(tol), bool(passed), gating))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.gating and not c.passed]

    def to_json(self) -> dict:
        return {"suite": self.name, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}


def saddle_suite(ch: Channel, tol: float | None = None, ro: float | None = None,
                 sconf: SaddleConfig = SaddleConfig()) -> SuiteResult:
    """Numeric min-max of the two-point program against the closed form.

    Gating: value within ``tol`` (1e-3), minimizing ``gamma`` within one
    grid step of ``(1 - r_o)/2``, and the inner max attained at a
    breakpoint. The short-code length ``z0`` is reported against
    ``1 - (1 + r_o) E0`` without gating (see the README).
    """
    tol = 1e-3 if tol is None else tol
    cap, _ = channel_capacity(ch)
    points = SADDLE_POINTS if ro is None else ((0.5, ro),)
    res = SuiteResult("saddle")
    for frac, r_o in points:
        rate = frac * cap
        closed = one_level_fixed(rate, ch, None, r_o)
        sad = saddle_one_level(rate, ch, None, r_o, sconf)
        tag = f"R={frac}C,ro={r_o}"
        res.add(f"value {tag}", sad.value, closed.value, tol, abs(sad.value - closed.value) <= tol)
        g_star = (1 - r_o) / 2
        res.add(f"gamma {tag}", sad.gamma, g_star, sconf.gamma_step,
                abs(sad.gamma - g_star) <= sconf.gamma_step + 1e-12)
        res.add(f"s_at_breakpoint {tag}", float(sad.breakpoints_dominate), 1.0, 0, sad.breakpoints_dominate)
        e0 = gallager_e0(ch, None, closed.witness_rho)
        z0_star = 1 - (1 + r_o) * e0
        res.add(f"z0 {tag}", sad.z0, z0_star, sconf.z0_step,
                abs(sad.z0 - z0_star) <= sconf.z0_step + 1e-12, gating=False)
    return res


def _grid(cap: float, points: int = 32) -> np.ndarray:
    return np.linspace(0.05, 0.99, points) * cap


def sandwich_suite(ch: Channel, tol: float | None = None, points: int = 32) -> SuiteResult:
    """``lower bound <= E_Fc <= Forney`` pointwise, and each curve nonincreasing."""
    tol = 1e-6 if tol is None else tol
    cap, _ = channel_capacity(ch)
    res = SuiteResult("sandwich")
    rates = _grid(cap, points)
    lo = np.array([one_level_lower_bound(r, ch).value for r in rates])
    mid = np.array([one_level_exponent(r, ch).value for r in rates])
    hi = np.array([forney_exponent(r, ch).value for r in rates])
    res.add("lower<=efc (max violation)", np.max(lo - mid), 0.0, tol, np.all(lo <= mid + tol))
    res.add("efc<=forney (max violation)", np.max(mid - hi), 0.0, tol, np.all(mid <= hi + tol))
    for name, v in (("efc_tilde", lo), ("efc", mid), ("ec", hi)):
        rise = float(np.max(np.diff(v)))
        res.add(f"{name} nonincreasing (max rise)", rise, 0.0, tol, rise <= tol)
    return res


def mcollapse_suite(ch: Channel, tol: float | None = None, points: int = 32,
                    ms=(1, 2, 4, 8, 16), conv_fracs=(0.2, 0.5, 0.8)) -> SuiteResult:
    """m = 1 equals the lower bound; values nondecreasing in m; the m-level
    values converge to the infinite-level value at rate O(1/m)
    (Richardson: ``2 E(2m) - E(m)`` matches the limit much better than ``E(m)``).
    """
    tol = 1e-9 if tol is None else tol
    cap, _ = channel_capacity(ch)
    res = SuiteResult("mcollapse")
    rates = _grid(cap, points)
    worst_gap, worst_drop = 0.0, 0.0
    for r in rates:
        vals = [multilevel_exponent(r, ch, m).value for m in ms]
        worst_gap = max(worst_gap, abs(vals[0] - one_level_lower_bound(r, ch).value))
        worst_drop = max(worst_drop, float(np.max(-np.diff(vals))))
    res.add("m=1 vs lower bound (max abs diff)", worst_gap, 0.0, tol, worst_gap <= tol)
    res.add("nondecreasing in m (max drop)", worst_drop, 0.0, DEFAULT_GRID.tol, worst_drop <= DEFAULT_GRID.tol)
    for frac in conv_fracs:
        r = frac * cap
        inf = infinite_level_exponent(r, ch).value
        e64 = multilevel_exponent(r, ch, 64).value
        e128 = multilevel_exponent(r, ch, 128).value
        rich = 2 * e128 - e64
        rel = abs(rich - inf) / inf
        res.add(f"Richardson(64,128) vs infinite at R={frac}C (rel)", rel, 0.0, 0.02, rel <= 0.02)
        res.add(f"m=64 vs infinite at R={frac}C (rel, O(1/m) bias)", abs(e64 - inf) / inf, 0.0, 0.02,
                abs(e64 - inf) / inf <= 0.02, gating=False)
    return res


def limits_suite(ch: Channel, tol: float | None = None) -> SuiteResult:
    """Ratios approach 1 in the high-rate limits: the lower bound over E_Fc
    as ``R -> C_F`` and the suboptimal-outer-rate exponent over the optimal
    one as ``gamma -> 1``.
    """
    tol = 0.1 if tol is None else tol
    cap, _ = channel_capacity(ch)
    res = SuiteResult("limits")
    fr = (0.5, 0.9, 0.99)
    ratio = [one_level_lower_bound(f * cap, ch).value / one_level_exponent(f * cap, ch).value for f in fr]
    res.add("lower/efc nondecreasing (min step)", min(np.diff(ratio)), 0.0, 0.0, all(np.diff(ratio) >= -1e-9))
    res.add("lower/efc at 0.99C", ratio[-1], 1.0, tol, abs(ratio[-1] - 1) <= tol)
    th = [e_fcs(g, ch) / e_fc_gamma_optimal(g, ch).value for g in fr]
    res.add("efcs/efc nondecreasing (min step)", min(np.diff(th)), 0.0, 0.0, all(np.diff(th) >= -1e-9))
    res.add("efcs/efc at gamma=0.99", th[-1], 1.0, tol, abs(th[-1] - 1) <= tol)
    gam = np.linspace(0.05, 0.99, 32)
    excess = max(e_fcs(g, ch) - e_fc_gamma_optimal(g, ch).value for g in gam)
    res.add("efcs<=efc over gamma grid (max excess)", excess, 0.0, DEFAULT_GRID.tol,
            excess <= DEFAULT_GRID.tol)
    return res


def gmd_exhaustive(n_o: int = 8, k_o: int = 4, levels=(0.0, 1 / 3, 2 / 3, 1.0), field_bits: int = 8,
                   seed: int = 1):
    """Every error set and every weight vector from ``levels`` with
    ``sum alpha mu > k_o`` for the sent codeword; return ``(cases, misses)``.

    Wrong symbols are taken from a nearest competing codeword where it
    differs, so the errors pull toward a real alternative.
    """
    spec = OuterCodeSpec(n_o, k_o, field_bits)
    rng = np.random.default_rng(seed)
    msg = rng.integers(0, spec.gf.size, k_o).tolist()
    cw = outer_encode(spec, msg)
    alt = list(msg)
    alt[0] ^= 1
    rival = outer_encode(spec, alt)
    lat = np.array(list(itertools.product(levels, repeat=n_o)))
    cases = misses = 0
    for e in range(1 << n_o):
        wrong = np.array([(e >> i) & 1 for i in range(n_o)], dtype=bool)
        mu = np.where(wrong, -1.0, 1.0)
        ok = lat[(lat * mu).sum(axis=1) > k_o + 1e-12]
        rx = [(rival[i] if rival[i] != cw[i] else cw[i] ^ 1) if wrong[i] else cw[i] for i in range(n_o)]
        for a in ok:
            cases += 1
            if gmd_decode(spec, rx, a) != msg:
                misses += 1
    return cases, misses


def gmd_suite(ch: Channel | None = None, tol: float | None = None) -> SuiteResult:
    """GMD returns the sent message whenever its acceptance condition holds."""
    tol = 0.0 if tol is None else tol
    cases, misses = gmd_exhaustive()
    res = SuiteResult("gmd")
    res.add(f"misses over {cases} qualifying patterns", misses, 0.0, tol, misses <= tol)
    return res


RUNNERS = {"saddle": saddle_suite, "sandwich": sandwich_suite, "mcollapse": mcollapse_suite,
           "limits": limits_suite, "gmd": gmd_suite}


def run_suites(names=SUITES, ch: Channel | None = None, tol: float | None = None,
               ro: float | None = None) -> list[SuiteResult]:
    ch = make_bsc(0.1) if ch is None else ch
    out = []
    for name in names:
        if name not in RUNNERS:
            raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
        if name == "saddle":
            out.append(saddle_suite(ch, tol, ro))
        else:
            out.append(RUNNERS[name](ch, tol))
    return out


def summary(results) -> str:
    lines = []
    for r in results:
        lines.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}")
        for c in r.checks:
            mark = "ok " if c.passed else ("BAD" if c.gating else "off")
            note = "" if c.gating else "  (reported, not gating)"
            lines.append(f"    {mark} {c.name}: observed {c.observed:.6g}, expected {c.expected:.6g} "
                         f"+/- {c.tol:.3g}{note}")
    return "\n".join(lines)
