"""Monte Carlo sweeps over SNR, user count, antenna count and CSI mode.

Randomness is keyed, not sequential: channel draws depend on
``(seed, k, m, trial)``, pilot noise on ``(seed, k, m, snr, trial)`` and data
symbols/noise on ``(seed, k, m, l, snr, direction, trial)``. Results therefore
do not depend on the order or the number of worker threads, and perfect and
estimated CSI cells see identical channels, symbols and noise.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .capacity import CapacityRecord, ideal_capacity, measure_sinr, per_user_capacity, tr_precoder
from .chanest import PilotPlan, estimate_channel_set, receive_pilots
from .channel import ChannelProfile, draw_channel_set
from .linkops import (
    SYMBOL_SOURCES,
    DetectionResult,
    dl_precode_transmit,
    dl_receive_detect,
    draw_symbols,
    to_freq,
    ul_channel_output,
    ul_mf_detect,
)

log = logging.getLogger(__name__)

__all__ = [
    "SweepConfig",
    "Cell",
    "SweepResult",
    "aggregate_path",
    "figure_config",
    "run_cell",
    "run_sweep",
    "load_config",
    "ConfigError",
    "RECORD_HEADER",
    "AGGREGATE_HEADER",
    "THREADS_ENV",
]

RECORD_HEADER = ("snr_db", "k", "m", "l", "direction", "csi_mode", "user", "trial", "sinr_linear", "capacity_bpcu")
AGGREGATE_HEADER = (
    "snr_db", "k", "m", "l", "direction", "csi_mode", "trials",
    "mean_capacity_bpcu", "stderr", "mean_ideal_bpcu", "ideal_stderr", "mean_sinr_linear",
)
THREADS_ENV = "CPDSSS_THREADS"

DIRECTIONS = ("ul", "dl")
CSI_MODES = ("perfect", "estimated")

_CHANNEL, _PILOT, _DATA = 0, 1, 2


class ConfigError(ValueError):
    """Invalid sweep configuration; the message names the offending field."""


@dataclass(frozen=True)
class Cell:
    snr_db: float
    k: int
    m: int
    direction: str
    csi_mode: str

    @property
    def key(self) -> tuple:
        return (self.snr_db, self.k, self.m, self.direction, self.csi_mode)


@dataclass(frozen=True)
class SweepConfig:
    snr_db: tuple[float, ...] = (-30.0, -25.0, -20.0)
    k: tuple[int, ...] = (1,)
    m: tuple[int, ...] = (1,)
    l: int = 1
    n: int = 2048
    n_cp: int = 144
    profile: ChannelProfile = field(default_factory=ChannelProfile)
    csi_mode: tuple[str, ...] = ("perfect",)
    direction: tuple[str, ...] = ("ul",)
    trials: int = 50
    frames_per_trial: int = 1
    seed: int = 0
    output: str | None = None
    symbol_source: str = "qpsk"
    zc_root: int = 1
    normalize_estimates: bool = True
    workers: int = 1

    def __post_init__(self):
        for name in ("snr_db", "k", "m", "csi_mode", "direction"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        self.validate()

    def validate(self) -> None:
        def bad(fld, msg):
            raise ConfigError(f"{fld}: {msg}")

        if self.n < 2:
            bad("n", f"must be >= 2, got {self.n}")
        if self.l < 1 or self.n % self.l:
            bad("l", f"{self.l} does not divide n={self.n}")
        for i, k in enumerate(self.k):
            if k < 1 or self.n % k:
                bad(f"k[{i}]", f"{k} does not divide n={self.n}")
        for i, m in enumerate(self.m):
            if m < 1:
                bad(f"m[{i}]", f"must be >= 1, got {m}")
        if not 1 <= self.profile.l_h <= self.n_cp <= self.n:
            bad("profile.l_h", f"need l_h <= n_cp <= n, got {self.profile.l_h}, {self.n_cp}, {self.n}")
        for i, c in enumerate(self.csi_mode):
            if c not in CSI_MODES:
                bad(f"csi_mode[{i}]", f"unknown mode {c!r}")
        for i, d in enumerate(self.direction):
            if d not in DIRECTIONS:
                bad(f"direction[{i}]", f"unknown direction {d!r}")
        if self.trials < 1:
            bad("trials", f"must be >= 1, got {self.trials}")
        if self.frames_per_trial < 1:
            bad("frames_per_trial", f"must be >= 1, got {self.frames_per_trial}")
        if self.symbol_source not in SYMBOL_SOURCES:
            bad("symbol_source", f"unknown source {self.symbol_source!r}")
        if math.gcd(self.zc_root, self.n) != 1:
            bad("zc_root", f"{self.zc_root} is not coprime with n={self.n}")
        if self.workers < 1:
            bad("workers", f"must be >= 1, got {self.workers}")

    def cells(self) -> list[Cell]:
        return [
            Cell(float(s), k, m, d, c)
            for s, k, m, d, c in itertools.product(self.snr_db, self.k, self.m, self.direction, self.csi_mode)
        ]

    def to_dict(self) -> dict:
        d = asdict(self)
        for name in ("snr_db", "k", "m", "csi_mode", "direction"):
            d[name] = list(d[name])
        return d


@dataclass
class SweepResult:
    records: list[CapacityRecord]
    aggregates: list[dict]

    def write_csv(self, path) -> tuple[Path, Path]:
        """Write per-record and aggregate CSVs; returns both paths."""
        path = Path(path)
        agg_path = aggregate_path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RECORD_HEADER)
            for r in self.records:
                w.writerow((repr(r.snr_db), r.k, r.m, r.l, r.direction, r.csi_mode, r.user, r.trial,
                            repr(r.sinr), repr(r.per_user_capacity)))
        with open(agg_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(AGGREGATE_HEADER)
            for a in self.aggregates:
                w.writerow(tuple(repr(v) if isinstance(v, float) else v for v in (a[h] for h in AGGREGATE_HEADER)))
        return path, agg_path

    def aggregate(self, **match) -> dict:
        """The single aggregate row whose fields equal `match`."""
        rows = [a for a in self.aggregates if all(a[k2] == v for k2, v in match.items())]
        if len(rows) != 1:
            raise KeyError(f"{len(rows)} aggregate rows match {match}")
        return rows[0]


def aggregate_path(path) -> Path:
    """Where the aggregate CSV lives for a given per-record CSV path."""
    path = Path(path)
    return path.with_name(path.stem + "_aggregate" + (path.suffix or ".csv"))


def _snr_key(snr_db: float) -> int:
    return int(round(snr_db * 1000)) + 10**7


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key)))


def _run_trial(cfg: SweepConfig, cell: Cell, trial: int) -> list[CapacityRecord]:
    n, l, k, m = cfg.n, cfg.l, cell.k, cell.m
    noise_var = 10.0 ** (-cell.snr_db / 10.0)
    snr = 1.0 / noise_var
    dir_key = DIRECTIONS.index(cell.direction)

    channels = draw_channel_set(k, m, cfg.profile, _rng(cfg.seed, _CHANNEL, k, m, trial))
    h = to_freq(channels, n)
    if cell.csi_mode == "perfect":
        est = h
    else:
        plan = PilotPlan(n=n, k=k, n_cp=cfg.n_cp, u=cfg.zc_root)
        rx = receive_pilots(plan, channels, noise_var, _rng(cfg.seed, _PILOT, k, m, _snr_key(cell.snr_db), trial))
        est_set = estimate_channel_set(rx, plan)
        if cfg.normalize_estimates:
            est_set = est_set.normalized()
        est = to_freq(est_set, n)

    rng = _rng(cfg.seed, _DATA, k, m, l, _snr_key(cell.snr_db), dir_key, trial)
    results: list[list[DetectionResult]] = [[] for _ in range(k)]
    for _ in range(cfg.frames_per_trial):
        s = draw_symbols(k, n // l, l, rng, cfg.symbol_source)
        if cell.direction == "ul":
            y = ul_channel_output(h, s, l, noise_var, rng, n=n)
            s_hat = ul_mf_detect(y, est, l)
        else:
            x = dl_precode_transmit(est, s, l, n=n)
            gain = est.energy.mean(axis=1)
            s_hat = dl_receive_detect(h, x, l, gain, noise_var, rng)
        for i in range(k):
            results[i].append(DetectionResult(i, s_hat[i], s[i]))

    records = []
    for i in range(k):
        rho = measure_sinr(results[i], l).rho
        if cell.direction == "ul":
            ideal = ideal_capacity(h.freq[i], snr, l)
        else:
            ideal = ideal_capacity(h.freq[i], snr, l, precoders=np.stack([g.freq for g in tr_precoder(h.freq[i])]))
        records.append(CapacityRecord(
            scenario=f"{cell.direction}-{cell.csi_mode}-k{k}-m{m}-l{l}",
            snr_db=cell.snr_db, k=k, m=m, l=l, user=i, trial=trial,
            direction=cell.direction, csi_mode=cell.csi_mode,
            sinr=float(rho), per_user_capacity=per_user_capacity(rho, l), ideal_capacity=ideal,
        ))
    return records


def run_cell(cfg: SweepConfig, cell: Cell, trials: range | None = None) -> list[CapacityRecord]:
    """All trials of one cell, ordered by (trial, user)."""
    out = []
    for t in trials if trials is not None else range(cfg.trials):
        try:
            out.extend(_run_trial(cfg, cell, t))
        except ValueError as exc:
            raise ValueError(f"cell {cell.key}, trial {t}: {exc}") from exc
    return out


def _stderr(x: np.ndarray) -> float:
    return float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else math.nan


def _aggregate(cfg: SweepConfig, cell: Cell, recs: list[CapacityRecord]) -> dict:
    # stderr from per-trial means so users sharing a trial are not treated as independent
    by_trial = {}
    for r in recs:
        by_trial.setdefault(r.trial, []).append(r)
    trials = sorted(by_trial)
    cap_t = np.array([math.fsum(r.per_user_capacity for r in by_trial[t]) / len(by_trial[t]) for t in trials])
    ideal_t = np.array([math.fsum(r.ideal_capacity for r in by_trial[t]) / len(by_trial[t]) for t in trials])
    return {
        "snr_db": cell.snr_db, "k": cell.k, "m": cell.m, "l": cfg.l,
        "direction": cell.direction, "csi_mode": cell.csi_mode, "trials": len(trials),
        "mean_capacity_bpcu": math.fsum(cap_t) / len(trials),
        "stderr": _stderr(cap_t),
        "mean_ideal_bpcu": math.fsum(ideal_t) / len(trials),
        "ideal_stderr": _stderr(ideal_t),
        "mean_sinr_linear": math.fsum(r.sinr for r in recs) / len(recs),
    }


def _worker_count(cfg: SweepConfig, workers: int | None) -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return workers if workers is not None else cfg.workers


def run_sweep(cfg: SweepConfig, workers: int | None = None, output=None) -> SweepResult:
    """Run every cell of `cfg`, aggregate, and write CSVs if an output path is set.

    Trials are distributed over a thread pool; the ``CPDSSS_THREADS``
    environment variable overrides the worker count. Output is identical for
    any worker count.
    """
    cells = cfg.cells()
    tasks = [(ci, t) for ci in range(len(cells)) for t in range(cfg.trials)]
    nworkers = _worker_count(cfg, workers)
    log.info("running %d cells x %d trials on %d worker(s)", len(cells), cfg.trials, nworkers)

    def job(task):
        ci, t = task
        return task, run_cell(cfg, cells[ci], range(t, t + 1))

    if nworkers == 1:
        done = dict(map(job, tasks))
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as ex:
            done = dict(ex.map(job, tasks))

    records, aggregates = [], []
    for ci, cell in enumerate(cells):
        recs = [r for t in range(cfg.trials) for r in done[(ci, t)]]
        records.extend(recs)
        aggregates.append(_aggregate(cfg, cell, recs))
    result = SweepResult(records, aggregates)
    out = output if output is not None else cfg.output
    if out is not None:
        result.write_csv(out)
    return result


# -- config files -------------------------------------------------------------

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "snr_db": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "k": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "m": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "l": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 2},
        "n_cp": {"type": "integer", "minimum": 1},
        "profile": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "l_h": {"type": "integer", "minimum": 1},
                "tau": {"type": "number", "exclusiveMinimum": 0},
                "normalize": {"type": "boolean"},
            },
        },
        "csi_mode": {"type": "array", "items": {"enum": list(CSI_MODES)}, "minItems": 1},
        "direction": {"type": "array", "items": {"enum": list(DIRECTIONS)}, "minItems": 1},
        "trials": {"type": "integer", "minimum": 1},
        "frames_per_trial": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "output": {"type": ["string", "null"]},
        "symbol_source": {"enum": sorted(SYMBOL_SOURCES)},
        "zc_root": {"type": "integer", "minimum": 1},
        "normalize_estimates": {"type": "boolean"},
        "workers": {"type": "integer", "minimum": 1},
    },
}


def config_from_dict(d: dict) -> SweepConfig:
    import jsonschema

    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(d), key=lambda e: list(e.path))
    if errors:
        msgs = []
        for e in errors:
            where = ".".join(str(p) for p in e.absolute_path) or "<root>"
            msgs.append(f"{where}: {e.message}")
        raise ConfigError("; ".join(msgs))
    d = dict(d)
    if "profile" in d:
        d["profile"] = ChannelProfile(**d["profile"])
    return SweepConfig(**d)


def load_config(path) -> SweepConfig:
    """Read a JSON sweep config. Syntax errors report line and column."""
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return config_from_dict(d)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


# -- built-in figure configs ----------------------------------------------------

_FIG_SNR = tuple(float(s) for s in range(-40, 1, 5))


def figure_config(name: str, trials: int = 50, full: bool = False, **overrides) -> SweepConfig:
    """Built-in sweep reproducing the trend of one published figure.

    ``fig1``: uplink, one antenna, K in {1, 2, 8, 32}.
    ``fig2``: downlink, K = 32, M in {1, 8, 32, 128}.
    ``fig3``: as fig2 with perfect and estimated CSI.
    """
    if full:
        trials = max(trials, 500)
    base = dict(snr_db=_FIG_SNR, trials=trials, n=2048, n_cp=144, l=1)
    if name == "fig1":
        base.update(k=(1, 2, 8, 32), m=(1,), direction=("ul",), csi_mode=("perfect",))
    elif name == "fig2":
        base.update(k=(32,), m=(1, 8, 32, 128), direction=("dl",), csi_mode=("perfect",))
    elif name == "fig3":
        base.update(k=(32,), m=(1, 8, 32, 128), direction=("dl",), csi_mode=("perfect", "estimated"))
    else:
        raise ValueError(f"unknown figure {name!r}")
    base.update(overrides)
    return SweepConfig(**base)


def with_root(cfg: SweepConfig, u: int) -> SweepConfig:
    return replace(cfg, zc_root=u)
