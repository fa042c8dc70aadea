import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpdsss.circulant import (
    ExpanderSpec,
    apply,
    apply_hermitian,
    compose,
    compress,
    expand,
    from_impulse,
    identity,
)

from conftest import crandn, dense_circulant, dense_expander, padded, rel_err


def test_unit_impulse_is_identity():
    c = from_impulse([1.0], 8)
    np.testing.assert_allclose(c.freq, np.ones(8))
    x = np.arange(8) + 1j
    np.testing.assert_allclose(apply(c, x), x, atol=1e-14)
    np.testing.assert_allclose(apply_hermitian(c, x), x, atol=1e-14)


def test_delay_impulse_shifts():
    c = from_impulse([0, 1], 8)
    e0 = np.eye(8)[0]
    np.testing.assert_allclose(apply(c, e0), np.eye(8)[1], atol=1e-15)


def test_rejects_long_impulse():
    with pytest.raises(ValueError, match="exceeds"):
        from_impulse(np.ones(9), 8)


def test_cached_freq_consistent(rng):
    c = from_impulse(crandn(rng, 5), 32)
    assert np.abs(c.freq - np.fft.fft(c.first_col)).max() < 1e-12
    assert np.abs(c.first_col - padded(c.first_col[:5], 32)).max() == 0


@pytest.mark.parametrize("n", [16, 32, 64, 256])
def test_dense_oracle(rng, n):
    h = crandn(rng, 5)
    c = from_impulse(h, n)
    d = dense_circulant(padded(h, n))
    mat = np.stack([apply(c, e) for e in np.eye(n)], axis=1)
    assert np.abs(mat - d).max() < 1e-12
    x = crandn(rng, n)
    assert rel_err(apply(c, x), d @ x) < 1e-10
    assert rel_err(apply_hermitian(c, x), d.conj().T @ x) < 1e-10


def test_linearity(rng):
    c = from_impulse(crandn(rng, 7), 64)
    x, y = crandn(rng, 64), crandn(rng, 64)
    a, b = 0.3 - 2j, 1.7 + 0.1j
    assert rel_err(apply(c, a * x + b * y), a * apply(c, x) + b * apply(c, y)) < 1e-10


def test_adjoint_identity(rng):
    c = from_impulse(crandn(rng, 7), 64)
    x, y = crandn(rng, 64), crandn(rng, 64)
    assert abs(np.vdot(y, apply(c, x)) - np.vdot(apply_hermitian(c, y), x)) < 1e-10 * np.linalg.norm(x) * np.linalg.norm(y)


def test_apply_length_mismatch():
    c = identity(8)
    with pytest.raises(ValueError):
        apply(c, np.ones(7))
    with pytest.raises(ValueError):
        apply_hermitian(c, np.ones(9))


class TestCompose:
    def test_identity_is_neutral(self, rng):
        c = from_impulse(crandn(rng, 5), 16)
        np.testing.assert_allclose(compose(c, identity(16)).freq, c.freq, atol=1e-12)

    def test_equals_sequential_application(self, rng):
        a, b = from_impulse(crandn(rng, 5), 128), from_impulse(crandn(rng, 11), 128)
        x = crandn(rng, 128)
        assert rel_err(apply(compose(a, b), x), apply(a, apply(b, x))) < 1e-10

    def test_commutative_and_associative(self, rng):
        a, b, c = (from_impulse(crandn(rng, 4), 32) for _ in range(3))
        assert np.abs(compose(a, b).freq - compose(b, a).freq).max() < 1e-12
        assert np.abs(compose(compose(a, b), c).freq - compose(a, compose(b, c)).freq).max() < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            compose(identity(8), identity(16))

    @pytest.mark.parametrize("n", [16, 64, 256])
    def test_gram_diagonal_is_energy(self, rng, n):
        h = crandn(rng, 6)
        d = dense_circulant(padded(h, n))
        diag = np.diag(d.conj().T @ d)
        assert np.abs(diag - np.vdot(h, h).real).max() < 1e-10
        assert from_impulse(h, n).energy == pytest.approx(np.vdot(h, h).real, rel=1e-12)


class TestExpander:
    def test_l1_identity(self):
        e = ExpanderSpec(8, 1)
        s = np.arange(8) * 1j
        np.testing.assert_array_equal(expand(e, s), s)
        np.testing.assert_array_equal(compress(e, s), s)

    def test_definition(self):
        out = expand(ExpanderSpec(8, 4), np.array([2.0, 3.0]))
        np.testing.assert_array_equal(out, [2, 0, 0, 0, 3, 0, 0, 0])
        np.testing.assert_array_equal(compress(ExpanderSpec(8, 2), np.arange(8.0)), [0, 2, 4, 6])

    def test_matches_dense_expander(self, rng):
        e = ExpanderSpec(16, 4)
        s = crandn(rng, 4)
        np.testing.assert_allclose(expand(e, s), dense_expander(16, 4) @ s)
        y = crandn(rng, 16)
        np.testing.assert_allclose(compress(e, y), dense_expander(16, 4).T @ y)

    def test_dense_expander_orthonormal(self):
        e = dense_expander(32, 4)
        np.testing.assert_array_equal(e.T @ e, np.eye(8))

    def test_norm_and_round_trip(self, rng):
        e = ExpanderSpec(64, 8)
        s = crandn(rng, 8)
        assert np.linalg.norm(expand(e, s)) == pytest.approx(np.linalg.norm(s))
        np.testing.assert_array_equal(compress(e, expand(e, s)), s)

    def test_expand_compress_is_mask(self, rng):
        e = ExpanderSpec(12, 3)
        y = crandn(rng, 12)
        mask = np.zeros(12)
        mask[::3] = 1
        np.testing.assert_array_equal(expand(e, compress(e, y)), y * mask)

    def test_errors(self):
        with pytest.raises(ValueError):
            ExpanderSpec(10, 3)
        with pytest.raises(ValueError):
            expand(ExpanderSpec(8, 2), np.ones(3))
        with pytest.raises(ValueError):
            compress(ExpanderSpec(8, 2), np.ones(4))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([16, 64, 256]), st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_apply_matches_dense_property(n, taps, seed):
    rng = np.random.default_rng(seed)
    h = crandn(rng, taps)
    d = dense_circulant(padded(h, n))
    x = crandn(rng, n)
    c = from_impulse(h, n)
    assert rel_err(apply(c, x), d @ x) < 1e-10
    assert rel_err(apply_hermitian(c, x), d.conj().T @ x) < 1e-10
