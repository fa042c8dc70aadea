"""Pilot-frame channel estimation.

Every user sends one pilot symbol per frame (rate reduction L = N) on its own
ZC cyclic shift. The pilot amplitude is sqrt(N), so the pilot frame carries
the same energy as a data frame. After despreading, user k's response
appears starting at sample d_k, and the first ``window_len`` samples there,
divided by sqrt(N), are the estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet
from .zc import SpreadingOperator, ZcSequence, cyclic_shift, despread, generate_zc, spreading_operator

__all__ = [
    "PilotPlan",
    "ChannelEstimate",
    "build_pilot_frame",
    "receive_pilots",
    "estimate_channels",
    "estimate_channel_set",
]


@dataclass(frozen=True)
class PilotPlan:
    """Pilot layout for `k` users in a frame of `n` samples.

    Shifts default to ``d_k = k * n / K``; the estimate window is
    ``min(n / k, n_cp)``.
    """

    n: int
    k: int
    n_cp: int
    u: int = 1
    shifts: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.k < 1 or self.n % self.k:
            raise ValueError(f"number of users {self.k} must divide frame length {self.n}")
        if self.n_cp < 1:
            raise ValueError(f"n_cp must be positive, got {self.n_cp}")
        if not self.shifts:
            object.__setattr__(self, "shifts", tuple(i * (self.n // self.k) for i in range(self.k)))
        if len(self.shifts) != self.k:
            raise ValueError(f"expected {self.k} shifts, got {len(self.shifts)}")
        for d in self.shifts:
            if d < 0 or d + self.window_len > self.n:
                raise ValueError(
                    f"pilot window [{d}, {d + self.window_len}) overruns frame of {self.n}"
                )

    @property
    def pilot_amplitude(self) -> float:
        return float(np.sqrt(self.n))

    @property
    def window_len(self) -> int:
        return min(self.n // self.k, self.n_cp)

    @property
    def sequence(self) -> ZcSequence:
        return generate_zc(self.n, self.u)

    @property
    def spreader(self) -> SpreadingOperator:
        return spreading_operator(self.sequence)


@dataclass(frozen=True, eq=False)
class ChannelEstimate:
    user: int
    antenna: int
    taps: np.ndarray


def build_pilot_frame(plan: PilotPlan, user: int) -> np.ndarray:
    """Transmitted (spread) pilot frame for `user`: sqrt(N) times the shifted ZC."""
    if not 0 <= user < plan.k:
        raise IndexError(f"user {user} out of range for {plan.k} users")
    return plan.pilot_amplitude * cyclic_shift(plan.sequence.samples, plan.shifts[user])


def receive_pilots(
    plan: PilotPlan,
    channels: ChannelSet,
    noise_var: float,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Simulate a simultaneous pilot frame and despread it at every antenna.

    All users transmit at once; antenna m receives
    ``sum_k H_k^(m) p_k + v^(m)`` in the spread domain, which is then
    despread with Zᴴ. Returns shape ``(m, n)``.
    """
    if channels.k != plan.k:
        raise ValueError(f"plan has {plan.k} users, channel set has {channels.k}")
    op = plan.spreader
    n = plan.n
    # FFT of each user's pilot: amplitude * Λ_Z * delay phase
    f = np.arange(n)
    pilots_f = plan.pilot_amplitude * op.lambda_z * np.exp(
        -2j * np.pi * np.outer(plan.shifts, f) / n
    )
    rx_f = np.einsum("kmf,kf->mf", channels.freq(n), pilots_f)
    rx = np.fft.ifft(rx_f, axis=-1)
    if noise_var > 0:
        if rng is None:
            raise ValueError("an rng is required when noise_var > 0")
        shape = rx.shape
        rx = rx + np.sqrt(noise_var / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return despread(op, rx)


def _windows(received: np.ndarray, plan: PilotPlan) -> np.ndarray:
    received = np.atleast_2d(np.asarray(received))
    if received.shape[-1] != plan.n:
        raise ValueError(f"expected despread frames of length {plan.n}, got {received.shape[-1]}")
    w = plan.window_len
    idx = np.asarray(plan.shifts)[:, None] + np.arange(w)
    if idx.max() >= plan.n:
        raise ValueError("pilot window overruns the frame")
    # (m, k, w) -> (k, m, w)
    return np.swapaxes(received[:, idx], 0, 1) / plan.pilot_amplitude


def estimate_channel_set(received: np.ndarray, plan: PilotPlan) -> ChannelSet:
    """Raw estimates for all users and antennas as a ``(k, m, window_len)`` set."""
    return ChannelSet(_windows(received, plan))


def estimate_channels(received: np.ndarray, plan: PilotPlan) -> list[ChannelEstimate]:
    """Per-(user, antenna) estimates from despread pilot frames, one row per antenna."""
    taps = _windows(received, plan)
    return [
        ChannelEstimate(user=k, antenna=m, taps=taps[k, m])
        for k in range(taps.shape[0])
        for m in range(taps.shape[1])
    ]
