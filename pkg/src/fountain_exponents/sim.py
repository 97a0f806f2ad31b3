"""Monte Carlo sweeps of error probability against received-symbol count.

A sweep is fully described by an :class:`ExperimentManifest`; the manifest
round-trips through JSON so any CSV can be regenerated exactly. Trial
``t`` at grid point ``N`` uses randomness derived from
``(master_seed, N, t)`` alone, so results do not depend on the thread
count or on which other N values are in the grid.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import prf
from .channel import Channel, InputDistribution, as_probs
from .codec import (CodebookSeed, ConcatConfig, Schedule, random_fountain_sim, rate_compatible_trial,
                    run_trial)
from .outer import OuterCodeSpec
from .stats import ExponentFit, PeEstimate, fit_exponent  # noqa: F401  (re-exported)

CSV_HEADER = ("n", "trials", "failures", "p_hat", "ci_low", "ci_high")


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class RandomFountainSpec:
    """A plain (non-concatenated) random fountain code with ``n_messages`` codewords."""

    channel: Channel
    rate: float
    n_messages: int
    px: InputDistribution | None = None


@dataclass(frozen=True)
class ExperimentManifest:
    """Everything needed to rerun a sweep.

    ``schedule`` fixes the schedule family; its ``received_total`` is
    replaced by each entry of ``n_values``. ``known_parts > 0`` runs
    rate-compatible trials with that many parts known at the receiver.
    """

    config: ConcatConfig | RandomFountainSpec
    n_values: tuple[int, ...]
    trials_per_point: int
    master_seed: int
    schedule: Schedule = Schedule("prefix", 1)
    known_parts: int = 0

    def __post_init__(self):
        n = tuple(int(v) for v in self.n_values)
        object.__setattr__(self, "n_values", n)
        if not n:
            raise ValueError("n_values must not be empty")
        if any(b <= a for a, b in zip(n, n[1:])):
            raise ValueError("n_values must be strictly increasing")
        if n[0] < 1:
            raise ValueError("n_values must be positive")
        if self.trials_per_point < 100:
            raise ValueError("trials_per_point must be >= 100")
        if self.known_parts:
            if not isinstance(self.config, ConcatConfig) or not 0 < self.known_parts < self.config.levels:
                raise ValueError("known_parts needs a ConcatConfig with more levels than known parts")

    @property
    def schedule_kind(self) -> str:
        return self.schedule.kind

    def to_json(self) -> dict:
        c = self.config
        doc = {"n_values": list(self.n_values), "trials_per_point": self.trials_per_point,
               "master_seed": self.master_seed,
               "schedule": {"kind": self.schedule.kind, "param": self.schedule.param},
               "known_parts": self.known_parts,
               "channel": {"transition": c.channel.transition.tolist(), "name": c.channel.name}}
        if isinstance(c, ConcatConfig):
            doc["config"] = {"type": "concat", "n_o": c.outer.n_o, "k_o": c.outer.k_o,
                             "field_bits": c.outer.field_bits, "n_i": c.n_i,
                             "px": c.px.probs.tolist(), "weight_scale": c.weight_scale,
                             "z_cap": c.z_cap, "levels": c.levels, "rate_nats": c.rate}
        else:
            doc["config"] = {"type": "random_fountain", "rate_nats": c.rate, "n_messages": c.n_messages,
                             "px": as_probs(c.px, c.channel).tolist()}
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ExperimentManifest":
        ch = Channel(np.asarray(doc["channel"]["transition"], dtype=float), name=doc["channel"].get("name", ""))
        c = doc["config"]
        px = InputDistribution(np.asarray(c["px"], dtype=float))
        if c["type"] == "concat":
            config = ConcatConfig(OuterCodeSpec(c["n_o"], c["k_o"], c["field_bits"]), c["n_i"], ch, px,
                                  CodebookSeed(doc["master_seed"]), c["weight_scale"], c["z_cap"], c["levels"])
        else:
            config = RandomFountainSpec(ch, c["rate_nats"], c["n_messages"], px)
        sched = Schedule(doc["schedule"]["kind"], 1, doc["schedule"]["param"])
        return cls(config, tuple(doc["n_values"]), doc["trials_per_point"], doc["master_seed"], sched,
                   doc.get("known_parts", 0))

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("FEL_THREADS", "1")))
    except ValueError:
        return 1


def _point_config(manifest: ExperimentManifest, n: int) -> ConcatConfig:
    return replace(manifest.config, seed=CodebookSeed(prf.derive_seed(manifest.master_seed, prf.TAG_TRIAL, n)))


def _run_point(manifest: ExperimentManifest, n: int, threads: int, transcript: list | None):
    cfg = _point_config(manifest, n)
    sched = manifest.schedule.with_total(n)
    trials = range(manifest.trials_per_point)

    if manifest.config.levels > 1:
        def one(t):
            return rate_compatible_trial(cfg, manifest.known_parts, t, sched), None
    else:
        def one(t):
            rt = run_trial(cfg, sched, t)
            return rt.success, (rt.transcript(t) if transcript is not None else None)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(one, trials))
    else:
        results = [one(t) for t in trials]
    if transcript is not None:
        transcript.extend(line for _, line in results if line is not None)
    failures = sum(1 for ok, _ in results if not ok)
    return PeEstimate.from_counts(n, failures, manifest.trials_per_point)


def run_sweep(manifest: ExperimentManifest, threads: int | None = None,
              transcript_path=None) -> list[PeEstimate]:
    """Estimate ``P_e(N)`` at every ``N`` of the manifest.

    ``threads`` defaults to ``$FEL_THREADS`` (1 if unset). With
    ``transcript_path`` one JSON line per concatenated-code trial is written.
    """
    threads = thread_count() if threads is None else max(1, int(threads))
    c = manifest.config
    if isinstance(c, RandomFountainSpec):
        return random_fountain_sim(c.channel, c.px, c.rate, c.n_messages, manifest.master_seed,
                                   manifest.trials_per_point, manifest.n_values)
    lines = [] if transcript_path is not None else None
    out = []
    for n in manifest.n_values:
        try:
            out.append(_run_point(manifest, n, threads, lines))
        except ValueError as exc:
            raise SweepError(f"N={n}: {exc}") from exc
    if transcript_path is not None:
        Path(transcript_path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return out


def estimates_csv(estimates, comments=()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for e in estimates:
        w.writerow([e.n, e.trials, e.failures, f"{e.p_hat:.12g}", f"{e.ci_low:.12g}", f"{e.ci_high:.12g}"])
    return buf.getvalue()


def write_results(manifest: ExperimentManifest, estimates, csv_path) -> Path:
    """Write the CSV and its manifest (``<csv>.manifest.json``) side by side."""
    csv_path = Path(csv_path)
    doc = manifest.to_json()
    header = [f"config_hash={manifest.digest()}", "config=" + json.dumps(doc, sort_keys=True)]
    csv_path.write_text(estimates_csv(estimates, header), encoding="utf-8")
    man = csv_path.with_name(csv_path.name + ".manifest.json")
    man.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return man


def read_estimates(csv_path) -> list[PeEstimate]:
    rows = [line for line in Path(csv_path).read_text(encoding="utf-8").splitlines()
            if line and not line.startswith("#")]
    reader = csv.DictReader(rows)
    return [PeEstimate(int(r["n"]), int(r["failures"]), int(r["trials"]), float(r["p_hat"]),
                       float(r["ci_low"]), float(r["ci_high"])) for r in reader]
