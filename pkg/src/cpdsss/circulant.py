"""Circulant operator algebra in the frequency domain.

Channel matrices, precoders and their products are all N×N circulants. Each
is stored as its first column together with the DFT of that column; every
product, adjoint and application is then a pointwise operation on the
diagonal. The expander E_L (symbol-rate reduction) is a strided selection and
is never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CirculantOperator",
    "ExpanderSpec",
    "from_impulse",
    "from_freq",
    "identity",
    "apply",
    "apply_hermitian",
    "compose",
    "hermitian",
    "expand",
    "compress",
]


@dataclass(frozen=True, eq=False)
class CirculantOperator:
    """An N×N circulant matrix.

    Attributes
    ----------
    n : int
        Dimension.
    first_col : ndarray
        First column (zero-padded impulse response).
    freq : ndarray
        DFT of `first_col`, i.e. the eigenvalues. Used for all arithmetic.
    """

    n: int
    first_col: np.ndarray
    freq: np.ndarray

    @property
    def energy(self) -> float:
        """Squared norm of the first column, the common diagonal of CᴴC."""
        return float(np.vdot(self.first_col, self.first_col).real)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def from_impulse(h, n: int) -> CirculantOperator:
    """Circulant whose first column is `h` zero-padded to length `n`."""
    h = np.asarray(h, dtype=complex).ravel()
    if h.size > n:
        raise ValueError(f"impulse response of length {h.size} exceeds frame length {n}")
    col = np.zeros(n, dtype=complex)
    col[: h.size] = h
    return CirculantOperator(n=n, first_col=_freeze(col), freq=_freeze(np.fft.fft(col)))


def from_freq(freq) -> CirculantOperator:
    freq = np.array(freq, dtype=complex).ravel()
    return CirculantOperator(n=freq.size, first_col=_freeze(np.fft.ifft(freq)), freq=_freeze(freq))


def identity(n: int) -> CirculantOperator:
    return from_impulse([1.0], n)


def _check(c: CirculantOperator, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1] != c.n:
        raise ValueError(f"operator has dimension {c.n}, vector has length {x.shape[-1]}")
    return x


def apply(c: CirculantOperator, x) -> np.ndarray:
    """C·x as a circular convolution of ``c.first_col`` with `x`."""
    x = _check(c, x)
    return np.fft.ifft(c.freq * np.fft.fft(x, axis=-1), axis=-1)


def apply_hermitian(c: CirculantOperator, x) -> np.ndarray:
    """Cᴴ·x (circular correlation)."""
    x = _check(c, x)
    return np.fft.ifft(np.conj(c.freq) * np.fft.fft(x, axis=-1), axis=-1)


def compose(*ops: CirculantOperator) -> CirculantOperator:
    """Product of circulants, formed as a single diagonal product.

    Circulants commute, so the order of `ops` does not matter.
    """
    if not ops:
        raise ValueError("compose needs at least one operator")
    n = ops[0].n
    freq = np.ones(n, dtype=complex)
    for op in ops:
        if op.n != n:
            raise ValueError(f"dimension mismatch: {op.n} != {n}")
        freq = freq * op.freq
    return from_freq(freq)


def hermitian(c: CirculantOperator) -> CirculantOperator:
    return from_freq(np.conj(c.freq))


@dataclass(frozen=True)
class ExpanderSpec:
    """Symbol-rate reduction: n/l symbols placed every l samples of an n frame."""

    n: int
    l: int

    def __post_init__(self):
        if self.l < 1 or self.n < 1 or self.n % self.l:
            raise ValueError(f"reduction factor {self.l} must divide frame length {self.n}")

    @property
    def n_symbols(self) -> int:
        return self.n // self.l


def expand(e: ExpanderSpec, s) -> np.ndarray:
    """E_L·s: put ``s[i]`` at sample ``i*l``, zeros elsewhere. No power scaling."""
    s = np.asarray(s)
    if s.shape[-1] != e.n_symbols:
        raise ValueError(f"expected {e.n_symbols} symbols, got {s.shape[-1]}")
    out = np.zeros(s.shape[:-1] + (e.n,), dtype=np.result_type(s, complex))
    out[..., :: e.l] = s
    return out


def compress(e: ExpanderSpec, y) -> np.ndarray:
    """E_Lᴴ·y: read the symbol positions back out of a frame."""
    y = np.asarray(y)
    if y.shape[-1] != e.n:
        raise ValueError(f"expected frame length {e.n}, got {y.shape[-1]}")
    return y[..., :: e.l].copy()
