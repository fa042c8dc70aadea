"""Self-checks run by ``cpdsss validate``.

Each check compares a frequency-domain routine against an explicitly
materialized matrix, or checks an invariant, at small sizes.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import capacity, chanest, circulant, linkops, zc
from .channel import ChannelSet

TOL = 1e-9


def dense_circulant(col: np.ndarray) -> np.ndarray:
    """Matrix whose column i is `col` cyclically delayed by i."""
    col = np.asarray(col)
    return np.stack([np.roll(col, i) for i in range(col.size)], axis=1)


def _rel(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(np.linalg.norm(b), 1e-300))


def _rand_c(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def check_spreading(n: int, rng) -> float:
    op = zc.spreading_operator(zc.generate_zc(n, 1))
    z_dense = dense_circulant(op.first_column)
    s = _rand_c(rng, n)
    err = max(_rel(zc.spread(op, s), z_dense @ s), _rel(zc.despread(op, s), z_dense.conj().T @ s))
    return max(err, float(np.abs(z_dense.conj().T @ z_dense - np.eye(n)).max()))


def check_circulant(n: int, rng) -> float:
    a = circulant.from_impulse(_rand_c(rng, 5), n)
    b = circulant.from_impulse(_rand_c(rng, 7), n)
    da, db = dense_circulant(a.first_col), dense_circulant(b.first_col)
    x = _rand_c(rng, n)
    return max(
        _rel(circulant.apply(a, x), da @ x),
        _rel(circulant.apply_hermitian(a, x), da.conj().T @ x),
        _rel(circulant.apply(circulant.compose(a, b), x), da @ db @ x),
    )


def check_chains(n: int, rng) -> float:
    k, m, l = 3, 2, 2
    taps = _rand_c(rng, k, m, 4)
    chans = ChannelSet(taps).normalized()
    dense = [[dense_circulant(np.pad(chans.impulses[u, a], (0, n - 4))) for a in range(m)] for u in range(k)]
    e = np.zeros((n, n // l))
    e[np.arange(0, n, l), np.arange(n // l)] = 1
    s = _rand_c(rng, k, n // l)
    y = linkops.ul_channel_output(chans, s, l)
    y_ref = np.stack([sum(dense[u][a] @ e @ s[u] for u in range(k)) for a in range(m)])
    s_ul = linkops.ul_mf_detect(y, chans, l)
    s_ul_ref = np.stack([
        e.T @ sum(dense[i][a].conj().T @ y_ref[a] for a in range(m)) / m for i in range(k)
    ])
    x = linkops.dl_precode_transmit(chans, s, l)
    s_dl = linkops.dl_receive_detect(chans, x, l, gain=1.0)
    s_dl_ref = np.stack([
        e.T @ sum(dense[i][a] @ dense[u][a].conj().T @ e @ s[u] for a in range(m) for u in range(k)) / m
        for i in range(k)
    ])
    return max(_rel(y, y_ref), _rel(s_ul, s_ul_ref), _rel(s_dl, s_dl_ref))


def check_ideal_capacity(n: int, rng) -> float:
    worst = 0.0
    for m in (1, 4):
        hs = [circulant.from_impulse(_rand_c(rng, 6) / 4, n) for _ in range(m)]
        for l in (1, 2, 4):
            e = np.zeros((n, n // l))
            e[np.arange(0, n, l), np.arange(n // l)] = 1
            h_stack = np.vstack([dense_circulant(h.first_col) for h in hs])
            gram = l * 10.0 * h_stack @ e @ e.T @ h_stack.conj().T
            ref = np.linalg.slogdet(np.eye(gram.shape[0]) + gram)[1] / math.log(2) / n
            worst = max(worst, abs(capacity.ideal_capacity(hs, 10.0, l) - ref) / ref)
    return worst


def check_pilot_estimate(n: int, rng) -> float:
    plan = chanest.PilotPlan(n=n, k=2, n_cp=n // 2)
    h = ChannelSet(_rand_c(rng, 2, 1, 3))
    est = chanest.estimate_channel_set(chanest.receive_pilots(plan, h, 0.0), plan)
    return _rel(est.impulses[:, :, :3], h.impulses)


CHECKS: dict[str, tuple[Callable, float]] = {
    "spreading vs dense Z": (check_spreading, TOL),
    "circulant apply/adjoint/compose vs dense": (check_circulant, TOL),
    "UL/DL chains vs dense": (check_chains, TOL),
    "ideal capacity fast path vs log-det": (check_ideal_capacity, 1e-8),
    "noiseless pilot estimate": (check_pilot_estimate, TOL),
}


def run_all(sizes=(16, 64), seed: int = 0, echo=print) -> bool:
    rng = np.random.default_rng(seed)
    ok = True
    for name, (fn, tol) in CHECKS.items():
        for n in sizes:
            err = fn(n, rng)
            passed = err < tol
            ok &= passed
            echo(f"{'PASS' if passed else 'FAIL'}  {name} (n={n}): error {err:.2e} < {tol:g}")
    return ok
