"""Uplink matched-filter and downlink time-reversal transceiver chains.

Everything runs in the despread domain: spreading by Z and despreading by Zᴴ
cancel exactly and leave white noise white, so a frame is synthesized as
``H E_L s + v`` directly. The cyclic prefix is not simulated; its only effect
is to make the channel a circular convolution, which the circulant model
already is.

Channel arguments accept either a :class:`~cpdsss.channel.ChannelSet` or a
:class:`FreqChannels` holding precomputed frequency responses, which avoids
repeating K·M FFTs for every frame of a trial.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet
from .circulant import ExpanderSpec, compress, expand

__all__ = [
    "LinkScenario",
    "SymbolFrame",
    "DetectionResult",
    "FreqChannels",
    "to_freq",
    "draw_symbols",
    "awgn",
    "ul_channel_output",
    "ul_mf_detect",
    "dl_precode_transmit",
    "dl_receive_detect",
]


@dataclass(frozen=True)
class LinkScenario:
    """Parameters of one link-level experiment.

    ``snr_db`` is the per-sample SNR σ_s²‖h‖²/σ_v² with σ_s² = 1 and unit
    channel energy, so the noise variance is ``10**(-snr_db/10)``.
    """

    n: int = 2048
    n_cp: int = 144
    l: int = 1
    k: int = 1
    m: int = 1
    snr_db: float = -20.0
    symbol_source: str = "qpsk"
    frames_per_trial: int = 1
    trials: int = 1
    seed: int = 0
    l_h: int = 130

    def __post_init__(self):
        if self.l < 1 or self.n % self.l:
            raise ValueError(f"l={self.l} must divide n={self.n}")
        if self.k < 1 or self.n % self.k:
            raise ValueError(f"k={self.k} must divide n={self.n}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 1 <= self.l_h <= self.n_cp <= self.n:
            raise ValueError(f"need 1 <= l_h <= n_cp <= n, got {self.l_h}, {self.n_cp}, {self.n}")
        if self.symbol_source not in SYMBOL_SOURCES:
            raise ValueError(f"unknown symbol source {self.symbol_source!r}")
        if self.frames_per_trial < 1 or self.trials < 1:
            raise ValueError("frames_per_trial and trials must be >= 1")

    @property
    def noise_var(self) -> float:
        return 10.0 ** (-self.snr_db / 10.0)

    @property
    def expander(self) -> ExpanderSpec:
        return ExpanderSpec(self.n, self.l)


@dataclass(frozen=True, eq=False)
class SymbolFrame:
    """One user's symbols for one frame, already scaled by sqrt(L)."""

    user: int
    symbols: np.ndarray


@dataclass(frozen=True, eq=False)
class DetectionResult:
    user: int
    estimated: np.ndarray
    transmitted: np.ndarray

    def __post_init__(self):
        if np.shape(self.estimated) != np.shape(self.transmitted):
            raise ValueError("estimated and transmitted symbol vectors differ in length")


@dataclass(frozen=True, eq=False)
class FreqChannels:
    """Frequency responses ``freq[k, m, f]`` and energies ``energy[k, m]``."""

    freq: np.ndarray
    energy: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.energy is None:
            n = self.freq.shape[-1]
            object.__setattr__(self, "energy", np.sum(np.abs(self.freq) ** 2, axis=-1) / n)

    @property
    def k(self) -> int:
        return self.freq.shape[0]

    @property
    def m(self) -> int:
        return self.freq.shape[1]

    @property
    def n(self) -> int:
        return self.freq.shape[2]


def to_freq(channels, n: int) -> FreqChannels:
    if isinstance(channels, FreqChannels):
        if channels.n != n:
            raise ValueError(f"channels are sized for n={channels.n}, not {n}")
        return channels
    if isinstance(channels, ChannelSet):
        return FreqChannels(channels.freq(n), np.sum(np.abs(channels.impulses) ** 2, axis=-1))
    raise TypeError(f"expected ChannelSet or FreqChannels, got {type(channels).__name__}")


def _qpsk(rng, shape):
    return (rng.choice((-1.0, 1.0), size=shape) + 1j * rng.choice((-1.0, 1.0), size=shape)) / np.sqrt(2)


def _gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


SYMBOL_SOURCES = {"qpsk": _qpsk, "gaussian": _gaussian}


def draw_symbols(k: int, n_symbols: int, l: int, rng: np.random.Generator, source: str = "qpsk") -> np.ndarray:
    """Unit-power symbols scaled by sqrt(l), shape ``(k, n_symbols)``."""
    return np.sqrt(l) * SYMBOL_SOURCES[source](rng, (k, n_symbols))


def awgn(rng: np.random.Generator, shape, noise_var: float) -> np.ndarray:
    """Circularly-symmetric complex Gaussian noise of variance `noise_var`."""
    return np.sqrt(noise_var / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _frames_f(symbols, e: ExpanderSpec) -> np.ndarray:
    return np.fft.fft(expand(e, np.atleast_2d(symbols)), axis=-1)


def ul_channel_output(channels, symbols, l: int, noise_var: float = 0.0, rng=None, n: int | None = None) -> np.ndarray:
    """Despread uplink signal at every gateway antenna.

    ``y^(m) = sum_k H_k^(m) E_L s_k + v^(m)``; returns shape ``(m, n)``.
    `symbols` is ``(k, n/l)``, already carrying the sqrt(L) scaling.
    """
    symbols = np.atleast_2d(symbols)
    if n is None:
        n = symbols.shape[-1] * l
    ch = to_freq(channels, n)
    if symbols.shape[0] != ch.k:
        raise ValueError(f"{symbols.shape[0]} symbol frames for {ch.k} users")
    s_f = _frames_f(symbols, ExpanderSpec(n, l))
    y = np.fft.ifft(np.einsum("kmf,kf->mf", ch.freq, s_f), axis=-1)
    if noise_var > 0:
        if rng is None:
            raise ValueError("an rng is required when noise_var > 0")
        y = y + awgn(rng, y.shape, noise_var)
    return y


def ul_mf_detect(received, est_channels, l: int, user: int | None = None) -> np.ndarray:
    """Matched-filter symbol estimates averaged over antennas.

    ``s_i = (1/M) sum_m Ĥ_i^(m)ᴴ y^(m) / (ĥ_i^(m)ᴴ ĥ_i^(m))`` read at the
    symbol positions. Returns ``(n/l,)`` for one `user` or ``(k, n/l)`` for
    all users when `user` is None.
    """
    received = np.atleast_2d(received)
    n = received.shape[-1]
    est = to_freq(est_channels, n)
    if received.shape[0] != est.m:
        raise ValueError(f"{received.shape[0]} antenna signals for {est.m} estimated antennas")
    users = range(est.k) if user is None else [user]
    y_f = np.fft.fft(received, axis=-1)
    g = np.conj(est.freq[list(users)]) / est.energy[list(users), :, None]
    s_hat = np.fft.ifft(np.einsum("kmf,mf->kf", g, y_f), axis=-1) / est.m
    s_hat = compress(ExpanderSpec(n, l), s_hat)
    return s_hat[0] if user is not None else s_hat


def dl_precode_transmit(est_channels, symbols, l: int, n: int | None = None) -> np.ndarray:
    """Per-antenna time-reversal precoded downlink frames.

    Antenna m sends ``sum_k Ĥ_k^(m)ᴴ E_L s_k / sqrt(M)``. Returns ``(m, n)``.
    With unit-energy estimates each user's precoder meets tr(GᴴG) = N.
    """
    symbols = np.atleast_2d(symbols)
    if n is None:
        n = symbols.shape[-1] * l
    est = to_freq(est_channels, n)
    if symbols.shape[0] != est.k:
        raise ValueError(f"{symbols.shape[0]} symbol frames for {est.k} users")
    s_f = _frames_f(symbols, ExpanderSpec(n, l))
    x_f = np.einsum("kmf,kf->mf", np.conj(est.freq), s_f) / np.sqrt(est.m)
    return np.fft.ifft(x_f, axis=-1)


def dl_receive_detect(
    true_channels,
    transmit,
    l: int,
    gain,
    noise_var: float = 0.0,
    rng=None,
) -> np.ndarray:
    """Receive the downlink at one or more users and scale to symbol estimates.

    User i receives ``y_i = sum_m H_i^(m) x^(m) + v_i`` and forms
    ``s_i = y_i / (sqrt(M) * gain_i)`` at the symbol positions, where `gain`
    stands for the receiver's estimate of ĥ_iᴴĥ_i (1 for unit-energy
    estimates). `true_channels` covers the users to detect, shape
    ``(users, m, ...)``; returns ``(users, n/l)``.
    """
    transmit = np.atleast_2d(transmit)
    n = transmit.shape[-1]
    ch = to_freq(true_channels, n)
    if ch.m != transmit.shape[0]:
        raise ValueError(f"{transmit.shape[0]} antenna frames for channels with {ch.m} antennas")
    x_f = np.fft.fft(transmit, axis=-1)
    y = np.fft.ifft(np.einsum("kmf,mf->kf", ch.freq, x_f), axis=-1)
    if noise_var > 0:
        if rng is None:
            raise ValueError("an rng is required when noise_var > 0")
        y = y + awgn(rng, y.shape, noise_var)
    gain = np.broadcast_to(np.asarray(gain, dtype=float), (ch.k,))
    y = y / (np.sqrt(ch.m) * gain[:, None])
    return compress(ExpanderSpec(n, l), y)
