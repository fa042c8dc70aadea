"""Spreading with a Zadoff-Chu circulant and why despreading is free.

A length-n ZC sequence and its n cyclic shifts form a unitary circulant Z.
Any channel that acts as circular convolution is also circulant, so it
commutes with Z: despreading the received frame gives H s directly.
"""

import numpy as np

from cpdsss import circulant
from cpdsss.channel import ChannelProfile, draw_impulse
from cpdsss.zc import despread, generate_zc, spread, spreading_operator

rng = np.random.default_rng(0)
n = 2048

zc = generate_zc(n, u=1)
op = spreading_operator(zc)
print(f"|z| spread: {np.ptp(np.abs(zc.samples)):.1e}  (constant modulus 1/sqrt(n) = {1 / np.sqrt(n):.5f})")
print(f"|lambda_z| spread: {np.ptp(np.abs(op.lambda_z)):.1e}  (all ones: Z is unitary)")

# orthogonality of a few shift pairs
for i, j in [(0, 1), (5, 900), (17, 2047)]:
    c = np.vdot(np.roll(zc.samples, i), np.roll(zc.samples, j))
    print(f"<z_({i}), z_({j})> = {abs(c):.1e}")

# multipath channel applied to a spread frame
h = circulant.from_impulse(draw_impulse(ChannelProfile(), rng), n)
s = (rng.choice([-1, 1], n) + 1j * rng.choice([-1, 1], n)) / np.sqrt(2)
y = circulant.apply(h, spread(op, s))
direct = circulant.apply(h, s)
err = np.linalg.norm(despread(op, y) - direct) / np.linalg.norm(direct)
print(f"despread(H Z s) vs H s: relative error {err:.1e}")

# white noise stays white after despreading
v = (rng.standard_normal(100_000 // n * n) + 1j * rng.standard_normal(100_000 // n * n)) / np.sqrt(2)
print(f"noise variance before/after despreading: {np.var(v):.4f} / {np.var(despread(op, v.reshape(-1, n))):.4f}")
