"""Zadoff-Chu spreading sequences and the circulant spreading operator.

The spreading matrix has the cyclic shifts of a unit-power ZC sequence as
its columns. Being circulant, it is applied through its DFT diagonal, so
spreading and despreading cost one FFT/IFFT pair each.

DFT convention used across the package (numpy's): forward transform has an
``exp(-2j*pi*k*f/n)`` kernel and no scaling, the inverse carries ``1/n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

__all__ = [
    "ZcSequence",
    "SpreadingOperator",
    "generate_zc",
    "spreading_operator",
    "spread",
    "despread",
    "cyclic_shift",
]


@dataclass(frozen=True, eq=False)
class ZcSequence:
    """A Zadoff-Chu sequence of length ``n`` and root ``u``, scaled so zᴴz = 1."""

    n: int
    u: int
    samples: np.ndarray


@dataclass(frozen=True, eq=False)
class SpreadingOperator:
    """Circulant spreading matrix Z held as its frequency-domain diagonal."""

    n: int
    lambda_z: np.ndarray

    @property
    def first_column(self) -> np.ndarray:
        return np.fft.ifft(self.lambda_z)


def generate_zc(n: int, u: int = 1) -> ZcSequence:
    """Generate a unit-power Zadoff-Chu sequence.

    Parameters
    ----------
    n : int
        Sequence length, at least 2.
    u : int
        Root index, coprime with `n`.

    Returns
    -------
    ZcSequence
        ``z[k] = exp(-j*pi*u*k**2/n)/sqrt(n)`` for even `n`,
        ``z[k] = exp(-j*pi*u*k*(k+1)/n)/sqrt(n)`` for odd `n`.
    """
    n = int(n)
    u = int(u)
    if n < 2:
        raise ValueError(f"ZC length must be at least 2, got {n}")
    if gcd(u, n) != 1:
        raise ValueError(f"ZC root {u} is not coprime with length {n}")
    k = np.arange(n, dtype=np.int64)
    # reduce the phase index modulo 2n before scaling to keep large n exact
    if n % 2 == 0:
        idx = (u * k * k) % (2 * n)
    else:
        idx = (u * k * (k + 1)) % (2 * n)
    samples = np.exp(-1j * np.pi * idx / n) / np.sqrt(n)
    samples.setflags(write=False)
    return ZcSequence(n=n, u=u, samples=samples)


def cyclic_shift(x: np.ndarray, shift: int) -> np.ndarray:
    """Delay `x` cyclically by `shift` samples (``out[i] = x[i - shift]``)."""
    return np.roll(np.asarray(x), int(shift))


def spreading_operator(z: ZcSequence) -> SpreadingOperator:
    """Build the circulant spreading operator whose column i is `z` delayed by i."""
    lam = np.fft.fft(z.samples)
    lam.setflags(write=False)
    return SpreadingOperator(n=z.n, lambda_z=lam)


def _check_length(op: SpreadingOperator, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1] != op.n:
        raise ValueError(f"expected trailing length {op.n}, got {x.shape[-1]}")
    return x


def spread(op: SpreadingOperator, s: np.ndarray) -> np.ndarray:
    """Return Z·s. Leading axes of `s` are treated as a batch."""
    s = _check_length(op, s)
    return np.fft.ifft(op.lambda_z * np.fft.fft(s, axis=-1), axis=-1)


def despread(op: SpreadingOperator, y: np.ndarray) -> np.ndarray:
    """Return Zᴴ·y. Z is unitary so this inverts :func:`spread`."""
    y = _check_length(op, y)
    return np.fft.ifft(np.conj(op.lambda_z) * np.fft.fft(y, axis=-1), axis=-1)
