"""Embedding layer: affine maps, Chebyshev recurrence, dictionaries, crop/pad."""

import numpy as np
import pytest

from sedonet.embeddings import (Coordinate, SpectralDictionary, DOMAIN_TOL,
                                affine_to_reference, cheb_eval_all,
                                cheb_tensor_features, crop_pad, embed,
                                embed_points, fourier_features, normalize_unit)
from sedonet.errors import ConfigError, DomainError


# ---------------------------------------------------------------------------
# affine map


def test_affine_endpoints_exact():
    assert affine_to_reference(0.0, (0.0, 1.0)) == -1.0
    assert affine_to_reference(1.0, (0.0, 1.0)) == 1.0
    assert affine_to_reference(0.3, (0.3, 2.7)) == -1.0
    assert affine_to_reference(2.7, (0.3, 2.7)) == 1.0


def test_affine_midpoint_and_linearity():
    assert affine_to_reference(0.5, (0.0, 1.0)) == 0.0
    xs = np.linspace(-2.0, 6.0, 101)
    xi = affine_to_reference(xs, (-2.0, 6.0))
    assert np.allclose(xi, np.linspace(-1.0, 1.0, 101), atol=1e-15)


def test_affine_roundoff_clipped_but_outliers_rejected():
    assert affine_to_reference(1.0 + 0.5 * DOMAIN_TOL, (0.0, 1.0)) == 1.0
    with pytest.raises(DomainError):
        affine_to_reference(1.0 + 1e-9, (0.0, 1.0))
    with pytest.raises(DomainError):
        affine_to_reference(np.array([0.5, -0.1]), (0.0, 1.0))


def test_affine_degenerate_domain():
    with pytest.raises(ConfigError):
        affine_to_reference(0.5, (1.0, 1.0))


def test_normalize_unit():
    assert normalize_unit(0.25, (0.0, 1.0)) == 0.25
    assert normalize_unit(-1.0, (-1.0, 1.0)) == 0.0
    assert normalize_unit(1.0, (-1.0, 1.0)) == 1.0


# ---------------------------------------------------------------------------
# Chebyshev recurrence


def test_cheb_low_orders_by_hand():
    # T_0..T_3 at 0.5: 1, 0.5, 2*0.25-1, 4*0.125-3*0.5
    vals = cheb_eval_all(0.5, 4)
    assert np.allclose(vals, [1.0, 0.5, -0.5, -1.0], atol=1e-15)


def test_cheb_matches_trig_identity():
    rng = np.random.Generator(np.random.PCG64(7))
    xi = rng.uniform(-1.0, 1.0, 200)
    tab = cheb_eval_all(xi, 33)
    for n in range(33):
        exact = np.cos(n * np.arccos(xi))
        assert np.max(np.abs(tab[:, n] - exact)) <= 1e-12


def test_cheb_endpoint_values():
    tab = cheb_eval_all(np.array([-1.0, 1.0]), 20)
    signs = (-1.0) ** np.arange(20)
    assert np.array_equal(tab[1], np.ones(20))
    assert np.array_equal(tab[0], signs)


def test_cheb_rejects_out_of_range():
    with pytest.raises(DomainError):
        cheb_eval_all(1.001, 4)
    with pytest.raises(ConfigError):
        cheb_eval_all(0.5, 0)


# ---------------------------------------------------------------------------
# tensor dictionary and crop/pad


def test_tensor_features_layout():
    d = SpectralDictionary("chebyshev", k_x=3, k_t=2, d_trunk=6)
    c = Coordinate(0.75, 0.25)
    xi_x = affine_to_reference(0.75, d.domain_x)
    xi_t = affine_to_reference(0.25, d.domain_t)
    tx = cheb_eval_all(xi_x, 3)
    tt = cheb_eval_all(xi_t, 2)
    feats = cheb_tensor_features(c, d)
    assert feats.shape == (6,)
    for i in range(3):
        for j in range(2):
            assert feats[i * 2 + j] == tx[i] * tt[j]


def test_tensor_features_need_time_coordinate():
    d = SpectralDictionary("chebyshev", k_x=3, k_t=2, d_trunk=6)
    with pytest.raises(ConfigError):
        cheb_tensor_features(Coordinate(0.5), d)


def test_crop_keeps_leading_entries():
    full = np.arange(10.0)
    out = crop_pad(full, 4)
    assert np.array_equal(out, [0.0, 1.0, 2.0, 3.0])


def test_pad_appends_zeros():
    out = crop_pad(np.array([5.0, 6.0]), 5)
    assert np.array_equal(out, [5.0, 6.0, 0.0, 0.0, 0.0])


def test_crop_pad_returns_fresh_array():
    full = np.arange(4.0)
    out = crop_pad(full, 4)
    out[0] = 99.0
    assert full[0] == 0.0


def test_crop_pad_batch_axis():
    full = np.arange(12.0).reshape(3, 4)
    assert crop_pad(full, 2).shape == (3, 2)
    padded = crop_pad(full, 6)
    assert padded.shape == (3, 6)
    assert np.array_equal(padded[:, 4:], np.zeros((3, 2)))


# ---------------------------------------------------------------------------
# fourier and identity kinds


def test_fourier_layout():
    d = SpectralDictionary("fourier", k_x=2, k_t=1, d_trunk=7)
    feats = fourier_features(Coordinate(0.25, 0.5), d)
    # x_hat = 0.25: sin/cos of pi/2 and pi; t_hat = 0.5: sin/cos of pi
    expect = [1.0,
              np.sin(0.5 * np.pi), np.cos(0.5 * np.pi),
              np.sin(np.pi), np.cos(np.pi),
              np.sin(np.pi), np.cos(np.pi)]
    assert np.allclose(feats, expect, atol=1e-15)


def test_fourier_spatial_only_skips_time_block():
    d = SpectralDictionary("fourier", k_x=2, k_t=2, d_trunk=5)
    feats = fourier_features(Coordinate(0.25), d)
    assert feats.shape == (5,)
    assert feats[0] == 1.0


def test_identity_returns_normalized_coords():
    d = SpectralDictionary("identity", domain_x=(0.0, 2.0), domain_t=(0.0, 0.5))
    out = embed(Coordinate(1.0, 0.25), d)
    assert np.array_equal(out, [0.5, 0.5])
    assert np.array_equal(embed(Coordinate(1.0), d), [0.5])


def test_output_width():
    assert SpectralDictionary("identity").output_width() == 2
    assert SpectralDictionary("identity").output_width(spatial_only=True) == 1
    assert SpectralDictionary("chebyshev", d_trunk=17).output_width() == 17
    assert SpectralDictionary("fourier", d_trunk=9).output_width(True) == 9


def test_chebyshev_embed_pads_when_dictionary_small():
    d = SpectralDictionary("chebyshev", k_x=2, k_t=2, d_trunk=6)
    feats = embed(Coordinate(0.5, 0.5), d)
    assert feats.shape == (6,)
    assert np.array_equal(feats[4:], [0.0, 0.0])


# ---------------------------------------------------------------------------
# vectorized embedding equals the scalar path


def test_embed_points_matches_scalar_all_kinds():
    rng = np.random.Generator(np.random.PCG64(13))
    pts = np.column_stack([rng.uniform(0.0, 1.0, 40), rng.uniform(0.0, 0.3, 40)])
    for kind in ("identity", "fourier", "chebyshev"):
        d = SpectralDictionary(kind, k_x=4, k_t=3, d_trunk=10,
                               domain_t=(0.0, 0.3))
        batch = embed_points(pts, d)
        for q in range(len(pts)):
            row = embed(Coordinate(pts[q, 0], pts[q, 1]), d)
            assert np.array_equal(batch[q], row), (kind, q)


def test_embed_points_spatial_only():
    rng = np.random.Generator(np.random.PCG64(17))
    pts = rng.uniform(-1.0, 1.0, (25, 1))
    for kind in ("identity", "fourier", "chebyshev"):
        d = SpectralDictionary(kind, k_x=5, k_t=2, d_trunk=8,
                               domain_x=(-1.0, 1.0))
        batch = embed_points(pts, d)
        assert batch.shape == (25, d.output_width(spatial_only=True))
        for q in range(25):
            assert np.array_equal(batch[q], embed(Coordinate(pts[q, 0]), d))


def test_embed_points_shape_validation():
    d = SpectralDictionary("chebyshev")
    with pytest.raises(ConfigError):
        embed_points(np.zeros((4, 3)), d)
    with pytest.raises(ConfigError):
        embed_points(np.zeros(4), d)


# ---------------------------------------------------------------------------
# dictionary validation


def test_dictionary_validation():
    with pytest.raises(ConfigError):
        SpectralDictionary("splines")
    with pytest.raises(ConfigError):
        SpectralDictionary("chebyshev", k_x=0)
    with pytest.raises(ConfigError):
        SpectralDictionary("chebyshev", d_trunk=0)
    with pytest.raises(ConfigError):
        SpectralDictionary("chebyshev", domain_x=(1.0, 0.0))
    with pytest.raises(ConfigError):
        SpectralDictionary("chebyshev", domain_t=(0.0, np.inf))
