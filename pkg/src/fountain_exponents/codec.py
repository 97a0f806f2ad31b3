"""One-level concatenated fountain codec.

Pipeline: an outer Reed-Solomon codeword ``xi_1 .. xi_No`` is protected by
``N_o`` inner random fountain codes. At every time slot a shared random
switch picks an inner code ``k`` uniformly and that code emits its next
symbol ``C_theta(k, xi_k)_j``. The receiver sees the symbols kept by an
erasure schedule, decodes each inner code by maximum likelihood, attaches a
reliability weight to every decision and runs GMD decoding on the outer
code.

Indexing: inner codes ``k`` and stream positions ``l`` are 0-based,
per-code occurrence indices ``j`` start at 1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import prf
from .channel import Channel, InputDistribution, as_probs
from .exponents import adjusted_exponent_ez, channel_capacity
from .outer import OuterCodeSpec, decode_errors_erasures, gmd_candidate_set, outer_encode
from .stats import PeEstimate

MAX_CANDIDATE_BITS = 16


# ---------------------------------------------------------------- configuration

@dataclass(frozen=True)
class CodebookSeed:
    """Shared randomness ``theta`` of the fountain code library."""

    master_seed: int

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & prf.MASK64)

    def for_trial(self, trial: int) -> "CodebookSeed":
        return CodebookSeed(prf.derive_seed(self.master_seed, prf.TAG_TRIAL, trial))

    def symbols(self, cdf: np.ndarray, k, message, j) -> np.ndarray:
        """Channel inputs ``C_theta(k, message)_j``, broadcast over the arguments."""
        u = prf.uniform(self.master_seed, prf.TAG_CODEBOOK, k, message, j)
        return np.searchsorted(cdf, u, side="right")

    def switch(self, n_codes: int, positions) -> np.ndarray:
        """Inner code chosen at each stream position, uniform over ``n_codes``."""
        u = prf.uniform(self.master_seed, prf.TAG_SWITCH, positions)
        return np.minimum((u * n_codes).astype(np.int64), n_codes - 1)

    def digest(self, cdf: np.ndarray, n_codes: int, messages: int = 4, depth: int = 16) -> str:
        """Short fingerprint of the codebook and switch, to compare two ends."""
        k = np.arange(n_codes)[:, None, None]
        m = np.arange(messages)[None, :, None]
        j = np.arange(1, depth + 1)[None, None, :]
        h = prf.hash64(self.master_seed, 0,
                       self.symbols(cdf, k, m, j).ravel().sum(),
                       self.switch(n_codes, np.arange(depth * n_codes)).sum())
        return f"{int(h):016x}"


@dataclass(frozen=True)
class ConcatConfig:
    """A one-level concatenated fountain code.

    ``n_i`` is the nominal number of received symbols per inner code, so
    the fountain rate is ``levels * r_o * field_bits * ln 2 / n_i`` nats per
    received symbol. ``levels > 1`` stacks that many outer codewords into
    macro symbols (rate-compatible mode). ``weight_scale`` is the ``s`` of
    the reliability weights; ``None`` takes ``E_z(1)`` at the operating
    point.
    """

    outer: OuterCodeSpec
    n_i: int
    channel: Channel
    px: InputDistribution | None = None
    seed: CodebookSeed = field(default_factory=lambda: CodebookSeed(0))
    weight_scale: float | None = None
    z_cap: float = 2.0
    levels: int = 1

    def __post_init__(self):
        if self.n_i < 1:
            raise ValueError("n_i must be >= 1")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.levels * self.outer.field_bits > MAX_CANDIDATE_BITS:
            raise ValueError(f"inner message space 2^{self.levels * self.outer.field_bits} exceeds "
                             f"the tractability cap 2^{MAX_CANDIDATE_BITS}")
        if not self.z_cap > 0:
            raise ValueError("z_cap must be positive")
        px = InputDistribution(as_probs(self.px, self.channel))
        object.__setattr__(self, "px", px)
        cap, _ = channel_capacity(self.channel)
        if not self.rate < cap:
            raise ValueError(f"fountain rate {self.rate:.6g} nats is not below capacity C_F={cap:.6g}")
        if self.weight_scale is None:
            s = adjusted_exponent_ez(1.0, self.inner_rate, self.channel, px)
            if not s > 0:
                raise ValueError("E_z(1) is 0 at this operating point; pass weight_scale explicitly")
            object.__setattr__(self, "weight_scale", float(s))
        elif not self.weight_scale > 0:
            raise ValueError("weight_scale must be positive")

    @property
    def n_o(self) -> int:
        return self.outer.n_o

    @property
    def message_bits(self) -> int:
        return self.levels * self.outer.field_bits

    @property
    def rate(self) -> float:
        return self.levels * self.outer.k_o * self.outer.field_bits * math.log(2) / (self.n_o * self.n_i)

    @property
    def inner_rate(self) -> float:
        """``R / r_o``: nats per symbol carried by each inner code."""
        return self.message_bits * math.log(2) / self.n_i

    @property
    def nominal_n(self) -> int:
        return self.n_o * self.n_i

    @property
    def cdf(self) -> np.ndarray:
        return self.px.cdf

    @property
    def log_transition(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.channel.transition)


@dataclass(frozen=True)
class Schedule:
    """Which transmitted symbols the receiver observes.

    ``prefix``: the first ``N``. ``iid_thinning``: each symbol survives
    with probability ``param`` until ``N`` have survived.
    ``per_code_starve``: a ``param`` fraction of the inner codes is erased
    entirely, the first ``N`` of the remaining symbols are kept.
    """

    kind: str
    received_total: int
    param: float = 1.0

    KINDS = ("prefix", "iid_thinning", "per_code_starve")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}; expected one of {self.KINDS}")
        if self.received_total < 1:
            raise ValueError("received_total must be >= 1")
        if self.kind == "iid_thinning" and not 0 < self.param <= 1:
            raise ValueError("p_keep must lie in (0, 1]")
        if self.kind == "per_code_starve" and not 0 <= self.param < 1:
            raise ValueError("starved fraction must lie in [0, 1)")

    @classmethod
    def prefix(cls, n: int) -> "Schedule":
        return cls("prefix", n)

    @classmethod
    def iid_thinning(cls, n: int, p_keep: float) -> "Schedule":
        return cls("iid_thinning", n, p_keep)

    @classmethod
    def per_code_starve(cls, n: int, fraction: float) -> "Schedule":
        return cls("per_code_starve", n, fraction)

    def with_total(self, n: int) -> "Schedule":
        return replace(self, received_total=n)


# ---------------------------------------------------------------- transmitter

@dataclass(frozen=True)
class Stream:
    """Transmitted symbols at positions ``0 .. len - 1``."""

    code: np.ndarray  # inner code index k_l
    occurrence: np.ndarray  # j, 1-based, per code
    symbol: np.ndarray  # channel input

    def __len__(self):
        return self.code.size


def _occurrences(codes: np.ndarray, n_codes: int) -> np.ndarray:
    order = np.argsort(codes, kind="stable")
    counts = np.bincount(codes, minlength=n_codes)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    j = np.empty_like(codes)
    j[order] = np.arange(codes.size) - np.repeat(starts, counts) + 1
    return j


def inner_symbol(seed: CodebookSeed, k: int, message: int, j: int, px: InputDistribution) -> int:
    """Symbol ``j >= 1`` of inner code ``k``'s codeword for ``message``."""
    if j < 1:
        raise ValueError("j must be >= 1")
    return int(seed.symbols(px.cdf, k, message, j))


def transmit_stream(cfg: ConcatConfig, outer_codeword, length: int) -> Stream:
    """The first ``length`` transmitted symbols for an (macro) outer codeword."""
    if length < 1:
        raise ValueError("length must be >= 1")
    cw = np.asarray(outer_codeword, dtype=np.int64)
    if cw.shape != (cfg.n_o,):
        raise ValueError(f"outer codeword must have {cfg.n_o} symbols")
    pos = np.arange(length, dtype=np.int64)
    codes = cfg.seed.switch(cfg.n_o, pos)
    j = _occurrences(codes, cfg.n_o)
    x = cfg.seed.symbols(cfg.cdf, codes, cw[codes], j)
    return Stream(codes, j, x)


# ---------------------------------------------------------------- erasure device and channel

@dataclass(frozen=True)
class Received:
    """Channel outputs grouped by inner code.

    ``code``, ``occurrence``, ``output`` are sorted by code then
    occurrence. ``counts_raw`` is per-code before truncation to
    ``floor(z_cap * n_eff)``, ``counts`` after.
    """

    code: np.ndarray
    occurrence: np.ndarray
    output: np.ndarray
    counts: np.ndarray
    counts_raw: np.ndarray
    n_received: int
    n_eff: float  # N / N_o

    @property
    def z(self) -> np.ndarray:
        return self.counts / self.n_eff

    @property
    def z_raw(self) -> np.ndarray:
        return self.counts_raw / self.n_eff

    def for_code(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        sel = self.code == k
        return self.occurrence[sel], self.output[sel]


def _channel_outputs(ch: Channel, x: np.ndarray, noise_seed: int, positions: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(ch.transition, axis=1)
    cdf[:, -1] = 1.0
    u = prf.uniform(noise_seed, prf.TAG_NOISE, positions)
    return (u[:, None] >= cdf[x]).sum(axis=1)


def _schedule_mask(schedule: Schedule, codes: np.ndarray, n_codes: int, seed: int) -> np.ndarray:
    pos = np.arange(codes.size)
    if schedule.kind == "prefix":
        return np.ones(codes.size, dtype=bool)
    if schedule.kind == "iid_thinning":
        return prf.uniform(seed, prf.TAG_THIN, pos) < schedule.param
    n_starved = int(round(schedule.param * n_codes))
    ranks = np.argsort(prf.uniform(seed, prf.TAG_STARVE, np.arange(n_codes)), kind="stable")
    starved = np.zeros(n_codes, dtype=bool)
    starved[ranks[:n_starved]] = True
    return ~starved[codes]


def stream_length_for(schedule: Schedule) -> int:
    """Enough transmitted symbols that the schedule will almost surely fill."""
    n = schedule.received_total
    if schedule.kind == "prefix":
        return n
    keep = schedule.param if schedule.kind == "iid_thinning" else 1.0 - schedule.param
    return int(math.ceil(n / keep + 8 * math.sqrt(n / keep) + 64))


def apply_schedule(stream: Stream, schedule: Schedule, cfg: ConcatConfig, noise_seed: int) -> Received:
    """Erasure device plus memoryless channel.

    Erasure and noise draws are keyed by stream position, so a symbol's fate
    does not depend on how much of the stream was generated.
    """
    n = schedule.received_total
    mask = _schedule_mask(schedule, stream.code, cfg.n_o, noise_seed)
    kept = np.flatnonzero(mask)
    if kept.size < n:
        raise ValueError(f"schedule needs {n} symbols but the stream only yields {kept.size}; "
                         "generate a longer stream")
    kept = kept[:n]
    codes = stream.code[kept]
    occ = stream.occurrence[kept]
    y = _channel_outputs(cfg.channel, stream.symbol[kept], noise_seed, kept)

    n_eff = n / cfg.n_o
    limit = int(math.floor(cfg.z_cap * n_eff))
    counts_raw = np.bincount(codes, minlength=cfg.n_o)
    # positions arrive in order, so each code's first `limit` occurrences survive
    rank = _occurrences(codes, cfg.n_o)
    keep = rank <= limit
    codes, occ, y = codes[keep], occ[keep], y[keep]
    order = np.lexsort((occ, codes))
    codes, occ, y = codes[order], occ[order], y[order]
    counts = np.bincount(codes, minlength=cfg.n_o)
    return Received(codes, occ, y, counts, counts_raw, n, n_eff)


# ---------------------------------------------------------------- inner decoding

@dataclass(frozen=True)
class InnerDecision:
    xi_hat: int
    alpha: float
    z: float
    loglik_best: float
    loglik_second: float


def _weight(best: np.ndarray, second: np.ndarray, scale: float, n_eff: float) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        gap = best - second
    gap = np.where(np.isnan(gap), 0.0, gap)  # both -inf: no information
    return np.clip(gap / (scale * n_eff), 0.0, 1.0)


def _top_two(ll: np.ndarray):
    """Best index (lowest on ties), best and second-best along axis 0.

    Sums within rounding of each other count as tied, so the result does
    not depend on summation order.
    """
    top = ll.max(axis=0)
    tol = 1e-12 * np.maximum(1.0, np.abs(np.where(np.isfinite(top), top, 0.0)))
    i = np.argmax(ll >= top - tol, axis=0)
    cols = np.arange(ll.shape[1])
    best = ll[i, cols]
    if ll.shape[0] == 1:
        return i, best, np.full_like(best, -np.inf)
    second = np.partition(ll, -2, axis=0)[-2]
    second = np.where(top - second <= tol, best, second)
    return i, best, second


def _loglik(cfg: ConcatConfig, logP: np.ndarray, k, j, y, candidates: np.ndarray) -> np.ndarray:
    x = cfg.seed.symbols(cfg.cdf, k[None, :], candidates[:, None], j[None, :])
    return logP[x, y[None, :]]


def inner_ml_decode(cfg: ConcatConfig, k: int, occurrence, output, n_eff: float | None = None,
                    candidates=None) -> InnerDecision:
    """ML estimate of inner code ``k``'s message from its received symbols.

    ``candidates`` restricts the hypotheses (rate-compatible decoding);
    ties go to the earliest candidate. ``n_eff`` defaults to the nominal
    ``n_i``.
    """
    n_eff = float(cfg.n_i if n_eff is None else n_eff)
    j = np.asarray(occurrence, dtype=np.int64)
    y = np.asarray(output, dtype=np.int64)
    cand = (np.arange(1 << cfg.message_bits) if candidates is None
            else np.asarray(candidates, dtype=np.int64))
    if j.size == 0:
        return InnerDecision(int(cand[0]), 0.0, 0.0, 0.0, 0.0)
    ll = _loglik(cfg, cfg.log_transition, np.full(j.size, k), j, y, cand).sum(axis=1)
    i, best, second = _top_two(ll[:, None])
    alpha = _weight(best, second, cfg.weight_scale, n_eff)
    return InnerDecision(int(cand[i[0]]), float(alpha[0]), j.size / n_eff, float(best[0]), float(second[0]))


def decode_all_inner(cfg: ConcatConfig, rx: Received, candidates=None) -> list[InnerDecision]:
    """Inner ML decoding of every code.

    Without ``candidates`` all codes are scored in one pass, summing
    per-symbol log-likelihoods code by code with ``reduceat``.
    ``candidates`` is a per-code list of hypothesis arrays.
    """
    logP = cfg.log_transition
    z = rx.z
    if candidates is not None:
        out = []
        for k in range(cfg.n_o):
            j, y = rx.for_code(k)
            out.append(inner_ml_decode(cfg, k, j, y, rx.n_eff, candidates[k]))
        return out
    cand = np.arange(1 << cfg.message_bits)
    xi = np.zeros(cfg.n_o, dtype=np.int64)
    best = np.zeros(cfg.n_o)
    second = np.zeros(cfg.n_o)
    alpha = np.zeros(cfg.n_o)
    nz = np.flatnonzero(rx.counts)
    if nz.size:
        ll = _loglik(cfg, logP, rx.code, rx.occurrence, rx.output, cand)
        starts = np.concatenate([[0], np.cumsum(rx.counts[nz])[:-1]])
        sums = np.add.reduceat(ll, starts, axis=1)
        i, b, s = _top_two(sums)
        xi[nz], best[nz], second[nz] = cand[i], b, s
        alpha[nz] = _weight(b, s, cfg.weight_scale, rx.n_eff)
    return [InnerDecision(int(xi[k]), float(alpha[k]), float(z[k]), float(best[k]), float(second[k]))
            for k in range(cfg.n_o)]


# ---------------------------------------------------------------- outer decoding

def gmd_score(codeword, xi_hat, alpha) -> float:
    """``sum_k alpha_k mu_k`` with ``mu_k = +1`` where ``codeword`` agrees with ``xi_hat``."""
    agree = np.asarray(codeword) == np.asarray(xi_hat)
    return float(np.sum(np.where(agree, alpha, -np.asarray(alpha, dtype=float))))


def gmd_decode(spec: OuterCodeSpec, xi_hat, alpha) -> list[int] | None:
    """Forney GMD decoding with acceptance ``sum alpha mu > k_o``.

    Tries the erasure patterns of :func:`gmd_candidate_set` in order and
    returns the first decoded message whose codeword meets the acceptance
    condition, or ``None``.
    """
    xi_hat = [int(v) for v in xi_hat]
    alpha = np.asarray(alpha, dtype=float)
    if len(xi_hat) != spec.n_o or alpha.shape != (spec.n_o,):
        raise ValueError(f"need {spec.n_o} decisions")
    tried = set()
    for pattern in gmd_candidate_set(alpha, spec.nsym):
        msg = decode_errors_erasures(spec, xi_hat, pattern)
        if msg is None or tuple(msg) in tried:
            continue
        tried.add(tuple(msg))
        if gmd_score(outer_encode(spec, msg), xi_hat, alpha) > spec.k_o:
            return msg
    return None


def gmd_decode_decisions(cfg: ConcatConfig, decisions: list[InnerDecision]) -> list[int] | None:
    if len(decisions) != cfg.n_o:
        raise ValueError(f"need {cfg.n_o} decisions, got {len(decisions)}")
    return gmd_decode(cfg.outer, [d.xi_hat for d in decisions], [d.alpha for d in decisions])


# ---------------------------------------------------------------- end to end

@dataclass(frozen=True)
class RoundTrip:
    success: bool
    decoded: list[int] | None
    z: np.ndarray
    z_raw: np.ndarray
    alpha: np.ndarray
    inner_correct: np.ndarray
    n_received: int

    def z_histogram(self, bins: int = 8) -> list[int]:
        """Empirical f_Z on ``[0, 2]`` in equal-width bins."""
        h, _ = np.histogram(self.z, bins=bins, range=(0.0, 2.0))
        return h.tolist()

    def alpha_quantiles(self) -> list[float]:
        return np.quantile(self.alpha, [0.0, 0.25, 0.5, 0.75, 1.0]).tolist()

    def transcript(self, trial: int) -> str:
        return json.dumps({"trial": trial, "success": self.success, "N": self.n_received,
                           "z_hist": self.z_histogram(), "alpha_quantiles": self.alpha_quantiles()})


def _receive(cfg: ConcatConfig, codeword, schedule: Schedule, noise_seed: int) -> Received:
    length = stream_length_for(schedule)
    while True:
        stream = transmit_stream(cfg, codeword, length)
        try:
            return apply_schedule(stream, schedule, cfg, noise_seed)
        except ValueError:
            length *= 2


def concat_roundtrip(cfg: ConcatConfig, message, schedule: Schedule, noise_seed: int) -> RoundTrip:
    """outer encode, transmit, erase and corrupt, inner decode, GMD decode."""
    if cfg.levels != 1:
        raise ValueError("use rate_compatible_encode/decode for levels > 1")
    msg = [int(v) for v in message]
    codeword = outer_encode(cfg.outer, msg)
    rx = _receive(cfg, codeword, schedule, noise_seed)
    decisions = decode_all_inner(cfg, rx)
    decoded = gmd_decode_decisions(cfg, decisions)
    xi = np.array([d.xi_hat for d in decisions])
    return RoundTrip(decoded == msg, decoded, rx.z, rx.z_raw, np.array([d.alpha for d in decisions]),
                     xi == np.asarray(codeword), rx.n_received)


def random_message(cfg: ConcatConfig, seed: int, levels: int | None = None) -> list[list[int]]:
    """``levels`` uniformly random outer messages derived from ``seed``."""
    L = cfg.levels if levels is None else levels
    u = prf.uniform(seed, prf.TAG_MESSAGE, np.arange(L)[:, None], np.arange(cfg.outer.k_o)[None, :])
    return (u * cfg.outer.gf.size).astype(np.int64).tolist()


def run_trial(cfg: ConcatConfig, schedule: Schedule, trial: int) -> RoundTrip:
    """One Monte Carlo trial: fresh codebook, message and noise from the trial index."""
    tseed = cfg.seed.for_trial(trial)
    tcfg = replace(cfg, seed=tseed)
    msg = random_message(tcfg, tseed.master_seed, 1)[0]
    noise = prf.derive_seed(tseed.master_seed, prf.TAG_NOISE)
    return concat_roundtrip(tcfg, msg, schedule, noise)


# ---------------------------------------------------------------- rate-compatible mode

def _macro(cfg: ConcatConfig, codewords: np.ndarray) -> np.ndarray:
    fb = cfg.outer.field_bits
    shifts = (np.arange(codewords.shape[0]) * fb)[:, None]
    return np.bitwise_or.reduce(codewords << shifts, axis=0)


def rate_compatible_encode(cfg: ConcatConfig, submessages, length: int) -> Stream:
    """Stack ``levels`` outer codewords into macro symbols and transmit them.

    Submessage ``i`` occupies bits ``[i * field_bits, (i + 1) * field_bits)``
    of each macro symbol; one inner fountain code per macro symbol.
    """
    subs = [list(s) for s in submessages]
    if len(subs) != cfg.levels:
        raise ValueError(f"need {cfg.levels} submessages, got {len(subs)}")
    cws = np.array([outer_encode(cfg.outer, s) for s in subs], dtype=np.int64)
    return transmit_stream(cfg, _macro(cfg, cws), length)


def received_needed(cfg: ConcatConfig, n_known: int) -> int:
    """``N_l``: symbols after which decoding with ``n_known`` known parts starts.

    With equal part rates ``N_l = N * (L - l) / L`` for the nominal ``N``.
    """
    if not 0 <= n_known < cfg.levels:
        raise ValueError("need 0 <= known parts < levels")
    return int(math.ceil(cfg.nominal_n * (cfg.levels - n_known) / cfg.levels))


def rate_compatible_decode(cfg: ConcatConfig, rx: Received, known: dict[int, list[int]]):
    """Decode the unknown submessages given the known ones as side information.

    Hypotheses inconsistent with the known parts are struck out of every
    inner codebook before ML decoding; each unknown part is then GMD
    decoded with the shared reliability weights. Returns ``{part: message}``
    for the unknown parts, or ``None`` on failure.
    """
    L, fb, spec = cfg.levels, cfg.outer.field_bits, cfg.outer
    for i, msg in known.items():
        if not 0 <= i < L:
            raise ValueError(f"known part index {i} outside 0..{L - 1}")
        if len(msg) != spec.k_o or any(not 0 <= int(v) < spec.gf.size for v in msg):
            raise ValueError(f"known part {i} is not a valid outer message")
    unknown = [i for i in range(L) if i not in known]
    if not unknown:
        raise ValueError("all parts known; nothing to decode")

    base = np.zeros(cfg.n_o, dtype=np.int64)
    for i, msg in known.items():
        base |= np.asarray(outer_encode(spec, msg), dtype=np.int64) << (i * fb)
    # every assignment of the unknown parts, lowest index first
    free = np.arange(1 << (fb * len(unknown)))
    spread = np.zeros_like(free)
    for pos, i in enumerate(unknown):
        spread |= ((free >> (pos * fb)) & (spec.gf.size - 1)) << (i * fb)
    candidates = [base[k] | spread for k in range(cfg.n_o)]

    decisions = decode_all_inner(cfg, rx, candidates)
    alpha = [d.alpha for d in decisions]
    out = {}
    for i in unknown:
        xi = [(d.xi_hat >> (i * fb)) & (spec.gf.size - 1) for d in decisions]
        msg = gmd_decode(spec, xi, alpha)
        if msg is None:
            return None
        out[i] = msg
    return out


def rate_compatible_trial(cfg: ConcatConfig, n_known: int, trial: int,
                          schedule: Schedule | None = None) -> bool:
    """One rate-compatible trial with parts ``0 .. n_known-1`` known.

    The default schedule is the prefix of ``N_l`` symbols.
    """
    tseed = cfg.seed.for_trial(trial)
    tcfg = replace(cfg, seed=tseed)
    subs = random_message(tcfg, tseed.master_seed)
    if schedule is None:
        schedule = Schedule.prefix(received_needed(cfg, n_known))
    stream = rate_compatible_encode(tcfg, subs, stream_length_for(schedule))
    rx = apply_schedule(stream, schedule, tcfg, prf.derive_seed(tseed.master_seed, prf.TAG_NOISE))
    got = rate_compatible_decode(tcfg, rx, {i: subs[i] for i in range(n_known)})
    return got is not None and all(got[i] == subs[i] for i in got)


# ---------------------------------------------------------------- plain random fountain code

def random_fountain_sim(ch: Channel, px, rate: float, n_messages: int, seed: int, trials: int,
                        n_values=None) -> list[PeEstimate]:
    """Monte Carlo error rate of a plain random fountain code with ML decoding.

    Each trial draws a fresh codebook of ``n_messages`` infinite codewords,
    a uniform message and channel noise, and decodes from the first ``N``
    outputs. ``n_values`` defaults to ``ceil(ln W / rate)``.
    """
    if not 2 <= n_messages <= 64:
        raise ValueError("n_messages must lie in [2, 64]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not rate > 0:
        raise ValueError("rate must be positive")
    p = InputDistribution(as_probs(px, ch))
    if n_values is None:
        n_values = [int(math.ceil(math.log(n_messages) / rate))]
    with np.errstate(divide="ignore"):
        logP = np.log(ch.transition)
    cand = np.arange(n_messages)
    out = []
    for n in n_values:
        fails = 0
        j = np.arange(1, n + 1)
        for t in range(trials):
            tseed = CodebookSeed(prf.derive_seed(seed, prf.TAG_TRIAL, n, t))
            msg = int(prf.uniform(tseed.master_seed, prf.TAG_MESSAGE, 0) * n_messages)
            x = tseed.symbols(p.cdf, 0, cand[:, None], j[None, :])
            y = _channel_outputs(ch, x[msg], prf.derive_seed(tseed.master_seed, prf.TAG_NOISE), j - 1)
            ll = logP[x, y[None, :]].sum(axis=1)
            fails += int(np.argmax(ll) != msg)
        out.append(PeEstimate.from_counts(n, fails, trials))
    return out
