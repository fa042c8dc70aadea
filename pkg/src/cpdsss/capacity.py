"""SINR measurement and capacity in bits per channel use.

All capacities are per payload sample. Multiply by the sample rate for
bits per second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .circulant import CirculantOperator, from_freq

__all__ = [
    "SinrEstimate",
    "CapacityRecord",
    "measure_sinr",
    "per_user_capacity",
    "ideal_capacity",
    "tr_precoder",
]


@dataclass(frozen=True)
class SinrEstimate:
    user: int
    rho: float
    sample_count: int
    std_error: float


@dataclass(frozen=True)
class CapacityRecord:
    scenario: str
    snr_db: float
    k: int
    m: int
    l: int
    user: int
    trial: int
    direction: str
    csi_mode: str
    sinr: float
    per_user_capacity: float
    ideal_capacity: float


def measure_sinr(results: Iterable, l: int = 1) -> SinrEstimate:
    """SINR as the reciprocal of the symbol error variance.

    `results` are :class:`~cpdsss.linkops.DetectionResult` items for one
    user. Errors are divided by sqrt(l) first, so both sides carry unit
    symbol power. A perfect detector gives ``rho = inf``.
    """
    errs = []
    user = None
    for r in results:
        user = r.user if user is None else user
        errs.append(np.abs(np.asarray(r.estimated) - np.asarray(r.transmitted)).ravel() ** 2 / l)
    if not errs:
        raise ValueError("cannot measure SINR from an empty result stream")
    e = np.concatenate(errs)
    mu = float(e.mean())
    if mu == 0.0:
        return SinrEstimate(user=user, rho=math.inf, sample_count=e.size, std_error=0.0)
    se_mu = float(e.std(ddof=1)) / math.sqrt(e.size) if e.size > 1 else math.inf
    return SinrEstimate(user=user, rho=1.0 / mu, sample_count=e.size, std_error=se_mu / mu**2)


def per_user_capacity(rho: float, l: int = 1, n: int | None = None, n_cp: int = 0) -> float:
    """``log2(1 + rho) / l`` bits per payload sample.

    Passing `n` and `n_cp` applies the cyclic-prefix overhead n/(n + n_cp).
    """
    if rho < 0 or l < 1:
        raise ValueError(f"need rho >= 0 and l >= 1, got rho={rho}, l={l}")
    c = math.log2(1.0 + rho) / l if math.isfinite(rho) else math.inf
    if n is not None and n_cp:
        c *= n / (n + n_cp)
    return c


def _freqs(ops) -> np.ndarray:
    if isinstance(ops, np.ndarray):
        return np.atleast_2d(ops)
    if isinstance(ops, CirculantOperator):
        ops = [ops]
    return np.stack([op.freq for op in ops])


def ideal_capacity(
    channels: Sequence[CirculantOperator] | np.ndarray,
    snr: float,
    l: int = 1,
    precoders: Sequence[CirculantOperator] | np.ndarray | None = None,
) -> float:
    """Ideal-receiver capacity ``log2 det(I + L snr A E_L E_Lᴴ Aᴴ) / N``.

    Without `precoders` the antennas are stacked as receive branches
    (uplink, A = [H1; H2; ...]). With `precoders` the antennas transmit and
    A = sum_m H^(m) G^(m) (downlink). Either way AᴴA is circulant and
    E_Lᴴ(AᴴA)E_L is an N/L circulant whose eigenvalues are the
    L-fold aliased eigenvalues of AᴴA divided by L, so the determinant is a
    product over N/L frequency bins.

    Operators may be given as CirculantOperators or as an ``(m, n)`` array
    of frequency responses.
    """
    h = _freqs(channels)
    n = h.shape[-1]
    if n % l:
        raise ValueError(f"l={l} must divide n={n}")
    if precoders is None:
        gram = np.sum(np.abs(h) ** 2, axis=0)
    else:
        g = _freqs(precoders)
        if g.shape != h.shape:
            raise ValueError(f"precoder shape {g.shape} does not match channel shape {h.shape}")
        gram = np.abs(np.sum(h * g, axis=0)) ** 2
    aliased = gram.reshape(l, n // l).sum(axis=0)
    return float(np.sum(np.log2(1.0 + snr * aliased)) / n)


def tr_precoder(est_channels: Sequence[CirculantOperator] | np.ndarray) -> list[CirculantOperator]:
    """Time-reversal precoders for one user across M antennas.

    ``G^(m) = a * Ĥ^(m)ᴴ / sqrt(M)`` with ``a`` chosen so the stacked precoder
    satisfies tr(GᴴG) = N; ``a = 1`` when every estimate has unit energy.
    """
    h = _freqs(est_channels)
    m, n = h.shape
    total = float(np.sum(np.abs(h) ** 2)) / n
    if total == 0:
        raise ValueError("cannot build a precoder from all-zero channel estimates")
    a = math.sqrt(m / total)
    return [from_freq(a * np.conj(row) / math.sqrt(m)) for row in h]
