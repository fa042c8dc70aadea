import numpy as np
import pytest

from cpdsss.chanest import (
    PilotPlan,
    build_pilot_frame,
    estimate_channel_set,
    estimate_channels,
    receive_pilots,
)
from cpdsss.channel import ChannelProfile, ChannelSet, draw_channel_set
from cpdsss.zc import despread, generate_zc

from conftest import crandn, dense_circulant, padded


def test_plan_shifts_and_window():
    plan = PilotPlan(n=2048, k=32, n_cp=144)
    assert np.all(np.diff(plan.shifts) == 64)
    assert plan.shifts[0] == 0
    assert plan.window_len == 64
    assert plan.pilot_amplitude == pytest.approx(np.sqrt(2048))
    assert PilotPlan(n=2048, k=1, n_cp=144).window_len == 144


def test_plan_validation():
    with pytest.raises(ValueError):
        PilotPlan(n=2048, k=3, n_cp=144)
    with pytest.raises(ValueError, match="overruns"):
        PilotPlan(n=64, k=2, n_cp=16, shifts=(0, 60))


def test_pilot_frame_power_and_single_user():
    plan = PilotPlan(n=2048, k=32, n_cp=144)
    frame = build_pilot_frame(plan, 5)
    assert np.vdot(frame, frame).real == pytest.approx(2048, rel=1e-12)
    single = PilotPlan(n=2048, k=1, n_cp=144)
    np.testing.assert_allclose(build_pilot_frame(single, 0), np.sqrt(2048) * generate_zc(2048).samples)
    with pytest.raises(IndexError):
        build_pilot_frame(plan, 32)


def test_pilot_frame_is_shifted_sequence():
    plan = PilotPlan(n=64, k=4, n_cp=16, u=3)
    z = generate_zc(64, 3).samples
    np.testing.assert_allclose(build_pilot_frame(plan, 2), 8 * np.roll(z, 32), atol=1e-13)


def test_receive_matches_dense_spread_domain(rng):
    # oracle: sum_k H_k p_k built with explicit matrices, then Z^H
    plan = PilotPlan(n=64, k=4, n_cp=16)
    chans = ChannelSet(crandn(rng, 4, 2, 6))
    rx = receive_pilots(plan, chans, 0.0)
    zh = dense_circulant(generate_zc(64).samples).conj().T
    for m in range(2):
        y = sum(dense_circulant(padded(chans.impulses[k, m], 64)) @ build_pilot_frame(plan, k) for k in range(4))
        np.testing.assert_allclose(rx[m], zh @ y, atol=1e-12)


def test_noiseless_single_user_exact(rng):
    plan = PilotPlan(n=256, k=1, n_cp=32)
    chans = draw_channel_set(1, 3, ChannelProfile(20, 5.0), rng)
    est = estimate_channel_set(receive_pilots(plan, chans, 0.0), plan)
    assert est.impulses.shape == (1, 3, 32)
    np.testing.assert_allclose(est.impulses[..., :20], chans.impulses, atol=1e-9)
    np.testing.assert_allclose(est.impulses[..., 20:], 0, atol=1e-9)


def test_noiseless_truncation_without_overlap(rng):
    plan = PilotPlan(n=512, k=8, n_cp=40)
    chans = draw_channel_set(8, 2, ChannelProfile(40, 10.0), rng)
    est = estimate_channel_set(receive_pilots(plan, chans, 0.0), plan)
    np.testing.assert_allclose(est.impulses, chans.impulses[..., :40], atol=1e-9)


def test_estimate_list_form(rng):
    plan = PilotPlan(n=128, k=2, n_cp=16)
    chans = ChannelSet(crandn(rng, 2, 3, 4))
    ests = estimate_channels(receive_pilots(plan, chans, 0.0), plan)
    assert [(e.user, e.antenna) for e in ests] == [(k, m) for k in range(2) for m in range(3)]
    for e in ests:
        assert e.taps.shape == (16,)
        np.testing.assert_allclose(e.taps[:4], chans.impulses[e.user, e.antenna], atol=1e-9)


def test_linearity(rng):
    plan = PilotPlan(n=128, k=4, n_cp=32)
    y1, y2 = crandn(rng, 2, 128), crandn(rng, 2, 128)
    a = estimate_channel_set(y1 + y2, plan).impulses
    b = estimate_channel_set(y1, plan).impulses + estimate_channel_set(y2, plan).impulses
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_per_antenna_independence(rng):
    plan = PilotPlan(n=128, k=4, n_cp=32)
    y = crandn(rng, 3, 128)
    base = estimate_channel_set(y, plan).impulses
    y2 = y.copy()
    y2[1] += crandn(rng, 128)
    changed = estimate_channel_set(y2, plan).impulses
    np.testing.assert_array_equal(changed[:, [0, 2]], base[:, [0, 2]])


def test_noise_floor(rng):
    n, sigma2 = 2048, 100.0
    plan = PilotPlan(n=n, k=32, n_cp=144)
    zero = ChannelSet(np.zeros((32, 100, 1), dtype=complex))
    taps = np.concatenate([
        estimate_channel_set(receive_pilots(plan, zero, sigma2, rng), plan).impulses for _ in range(100)
    ], axis=1)  # 10^4 pilot frames
    assert taps.shape[1] == 10_000
    per_tap = np.mean(np.abs(taps) ** 2, axis=1)
    assert per_tap.mean() == pytest.approx(sigma2 / n, rel=0.05)


def test_overlap_adds_tail_energy(rng):
    # user 0's tail beyond n/k lands in user 1's window
    n, k = 256, 2
    plan = PilotPlan(n=n, k=k, n_cp=n // 2)
    w = plan.window_len
    taps = np.zeros((2, 1, w + 20), dtype=complex)
    taps[:, 0, :] = crandn(rng, 2, w + 20) * np.exp(-np.arange(w + 20) / 30)
    chans = ChannelSet(taps)
    est = estimate_channel_set(receive_pilots(plan, chans, 0.0), plan).impulses
    leaked = np.zeros(w, dtype=complex)
    leaked[:20] = taps[0, 0, w:]
    np.testing.assert_allclose(est[1, 0] - taps[1, 0, :w], leaked, atol=1e-9)
    mse_user1 = np.sum(np.abs(est[1, 0] - taps[1, 0, :w]) ** 2)
    assert mse_user1 == pytest.approx(np.sum(np.abs(taps[0, 0, w:]) ** 2), rel=1e-9)

    sigma2 = 2.0
    errs = []
    for _ in range(400):
        e = estimate_channel_set(receive_pilots(plan, chans, sigma2, rng), plan).impulses
        errs.append(np.sum(np.abs(e[1, 0] - taps[1, 0, :w]) ** 2))
    expected = w * sigma2 / n + mse_user1
    assert np.mean(errs) == pytest.approx(expected, rel=0.05)


def test_received_length_checked():
    plan = PilotPlan(n=64, k=2, n_cp=8)
    with pytest.raises(ValueError):
        estimate_channel_set(np.zeros((1, 63)), plan)


def test_despread_of_shifted_pilot_is_delayed_impulse():
    plan = PilotPlan(n=64, k=4, n_cp=16)
    out = despread(plan.spreader, build_pilot_frame(plan, 3))
    expected = np.zeros(64)
    expected[48] = 8
    np.testing.assert_allclose(out, expected, atol=1e-12)
