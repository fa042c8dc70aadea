"""Estimating every user's channel from one pilot frame.

Each of the K users sends the same ZC sequence with a distinct cyclic shift
N/K apart. After despreading, user k's impulse response appears at offset
d_k, so the receiver reads each channel out of its own window. Despreading
collects the full frame energy, so each tap estimate sees noise variance
sigma^2 / N: a 33 dB gain at N = 2048.
"""

import math

import numpy as np

from cpdsss.chanest import PilotPlan, estimate_channel_set, receive_pilots
from cpdsss.channel import ChannelProfile, draw_channel_set

rng = np.random.default_rng(1)
n, k, snr_db = 2048, 32, -20.0
noise_var = 10 ** (-snr_db / 10)
plan = PilotPlan(n=n, k=k, n_cp=144)
print(f"K={k} users, shifts every {n // k} samples, window {plan.window_len} taps")

for l_h, label in [(64, "fits the window"), (130, "default profile, tails leak")]:
    chans = draw_channel_set(k, 200, ChannelProfile(l_h, 25.0), rng)
    est = estimate_channel_set(receive_pilots(plan, chans, noise_var, rng), plan)
    w = plan.window_len
    truth = chans.impulses[..., :w]
    mse = np.mean(np.abs(est.impulses - truth) ** 2)
    lost = np.mean(np.sum(np.abs(chans.impulses[..., w:]) ** 2, axis=-1))
    print(f"l_h={l_h:3d} ({label}): per-tap MSE {mse:.2e}, noise floor {noise_var / n:.2e}, "
          f"truncated energy {lost:.3f}")

print(f"per-sample SNR gain 10 log10({n}) = {10 * math.log10(n):.1f} dB")
