"""Random multipath channels with an exponential power-delay profile."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circulant import CirculantOperator, from_impulse

__all__ = [
    "ChannelProfile",
    "ChannelSet",
    "draw_impulse",
    "draw_channel_set",
    "write_channels_csv",
    "read_channels_csv",
    "CSV_HEADER",
]

CSV_HEADER = ("trial", "user", "antenna", "tap_index", "re", "im")


@dataclass(frozen=True)
class ChannelProfile:
    """Exponential power-delay profile.

    Tap ``l`` has expected power proportional to ``exp(-l / tau)`` for
    ``l = 0 .. l_h - 1``. With `normalize` set every realization is scaled to
    unit energy, so all users see the same channel gain.
    """

    l_h: int = 130
    tau: float = 25.0
    normalize: bool = True

    def __post_init__(self):
        if self.l_h < 1:
            raise ValueError(f"l_h must be >= 1, got {self.l_h}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @property
    def tap_powers(self) -> np.ndarray:
        """Expected tap powers, scaled to sum to one."""
        p = np.exp(-np.arange(self.l_h) / self.tau)
        return p / p.sum()


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Impulse responses for ``k`` users by ``m`` gateway antennas.

    ``impulses`` has shape ``(k, m, taps)``.
    """

    impulses: np.ndarray

    @property
    def k(self) -> int:
        return self.impulses.shape[0]

    @property
    def m(self) -> int:
        return self.impulses.shape[1]

    @property
    def n_taps(self) -> int:
        return self.impulses.shape[2]

    def freq(self, n: int) -> np.ndarray:
        """N-point frequency responses, shape ``(k, m, n)``."""
        if self.n_taps > n:
            raise ValueError(f"{self.n_taps} taps do not fit in a frame of {n}")
        return np.fft.fft(self.impulses, n=n, axis=-1)

    def operator(self, user: int, antenna: int, n: int) -> CirculantOperator:
        return from_impulse(self.impulses[user, antenna], n)

    def normalized(self) -> "ChannelSet":
        """Copy with every (user, antenna) response scaled to unit energy."""
        norms = np.linalg.norm(self.impulses, axis=-1, keepdims=True)
        if np.any(norms == 0):
            raise ValueError("cannot normalize an all-zero impulse response")
        return ChannelSet(self.impulses / norms)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def draw_impulse(profile: ChannelProfile, rng: np.random.Generator) -> np.ndarray:
    """One Rayleigh tap vector following `profile`."""
    return draw_channel_set(1, 1, profile, rng).impulses[0, 0]


def draw_channel_set(k: int, m: int, profile: ChannelProfile, rng: np.random.Generator) -> ChannelSet:
    """Independent draws for every (user, antenna) pair.

    Taps are circularly-symmetric complex Gaussian with variances given by
    ``profile.tap_powers``. Deterministic for a given generator state.
    """
    if k < 1 or m < 1:
        raise ValueError(f"need k >= 1 and m >= 1, got k={k}, m={m}")
    taps = _complex_gaussian(rng, (k, m, profile.l_h)) * np.sqrt(profile.tap_powers)
    if profile.normalize:
        taps /= np.linalg.norm(taps, axis=-1, keepdims=True)
    return ChannelSet(taps)


def write_channels_csv(path, sets) -> None:
    """Write ``{trial: ChannelSet}`` as rows of ``trial,user,antenna,tap_index,re,im``.

    Floats are written with ``repr`` so a reload is bit-exact.
    """
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for trial in sorted(sets):
            imp = sets[trial].impulses
            for (u, a, t), v in np.ndenumerate(imp):
                w.writerow((trial, u, a, t, repr(float(v.real)), repr(float(v.imag))))


def read_channels_csv(path) -> dict[int, ChannelSet]:
    rows: dict[int, dict[tuple[int, int, int], complex]] = {}
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected channel CSV header {header}")
        for lineno, row in enumerate(reader, start=2):
            try:
                trial, u, a, t = (int(x) for x in row[:4])
                rows.setdefault(trial, {})[(u, a, t)] = complex(float(row[4]), float(row[5]))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from exc
    out = {}
    for trial, entries in rows.items():
        shape = tuple(max(idx[i] for idx in entries) + 1 for i in range(3))
        imp = np.zeros(shape, dtype=complex)
        for idx, v in entries.items():
            imp[idx] = v
        out[trial] = ChannelSet(imp)
    return out
