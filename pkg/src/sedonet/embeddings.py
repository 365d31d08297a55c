"""Deterministic coordinate embeddings for operator trunks.

Three interchangeable dictionaries feed the trunk network:

* ``chebyshev``: tensor products of first-kind Chebyshev polynomials on
  affinely mapped coordinates, cropped or zero-padded to the trunk width.
* ``fourier``: integer-frequency sine/cosine features of domain-normalized
  coordinates, cropped or zero-padded the same way.
* ``identity``: the domain-normalized raw coordinates themselves (the
  plain-DeepONet trunk input).

Every embedding is a pure function of the coordinates and carries no
trainable state, so its output for a fixed grid can be computed once and
cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DomainError

KINDS = ("identity", "fourier", "chebyshev")

# Slack for grid points that land on a domain endpoint with roundoff.
DOMAIN_TOL = 1e-12


class Coordinate(NamedTuple):
    """A query point. ``t`` is None for purely spatial problems."""

    x: float
    t: float | None = None


@dataclass(frozen=True)
class SpectralDictionary:
    """Configuration of one trunk embedding.

    k_x, k_t count the per-axis modes of the tensor dictionary (ignored by
    the identity kind), d_trunk is the width the feature vector is cropped
    or zero-padded to, and the domains are the physical coordinate ranges
    that get mapped onto the reference interval.
    """

    kind: str
    k_x: int = 8
    k_t: int = 8
    d_trunk: int = 64
    domain_x: tuple[float, float] = (0.0, 1.0)
    domain_t: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown embedding kind {self.kind!r}")
        if self.k_x < 1 or self.k_t < 1:
            raise ConfigError("mode counts k_x, k_t must be >= 1")
        if self.d_trunk < 1:
            raise ConfigError("d_trunk must be >= 1")
        for name, dom in (("domain_x", self.domain_x), ("domain_t", self.domain_t)):
            a, b = dom
            if not np.isfinite(a) or not np.isfinite(b) or not b > a:
                raise ConfigError(f"{name} must be a finite interval with b > a, got {dom}")

    def output_width(self, spatial_only: bool = False) -> int:
        """Width of the embedded feature vector the trunk will see."""
        if self.kind == "identity":
            return 1 if spatial_only else 2
        return self.d_trunk


def affine_to_reference(v, domain):
    """Map values from [a, b] onto the reference interval [-1, 1].

    Endpoints map exactly to -1 and +1. Values outside the domain by more
    than DOMAIN_TOL raise DomainError; roundoff overshoot is clipped.
    Accepts scalars or arrays.
    """
    a, b = float(domain[0]), float(domain[1])
    if not b > a:
        raise ConfigError(f"degenerate domain ({a}, {b})")
    arr = np.asarray(v, dtype=float)
    if np.any(arr < a - DOMAIN_TOL) or np.any(arr > b + DOMAIN_TOL):
        raise DomainError(f"coordinate outside domain [{a}, {b}]")
    xi = np.clip(2.0 * (arr - a) / (b - a) - 1.0, -1.0, 1.0)
    return float(xi) if xi.ndim == 0 else xi


def normalize_unit(v, domain):
    """Map values from [a, b] onto [0, 1] with the same tolerance handling."""
    return 0.5 * (affine_to_reference(v, domain) + 1.0)


def cheb_eval_all(xi, n_max: int):
    """Evaluate T_0 .. T_{n_max-1} at xi via the three-term recurrence.

    T_0 = 1, T_1 = xi, T_{n+1} = 2 xi T_n - T_{n-1}. Accepts scalar or
    array xi in [-1, 1]; the output has one trailing axis of length n_max.
    """
    if n_max < 1:
        raise ConfigError("n_max must be >= 1")
    arr = np.asarray(xi, dtype=float)
    if np.any(np.abs(arr) > 1.0 + DOMAIN_TOL):
        raise DomainError("Chebyshev argument outside [-1, 1]")
    arr = np.clip(arr, -1.0, 1.0)
    out = np.empty(arr.shape + (n_max,))
    out[..., 0] = 1.0
    if n_max > 1:
        out[..., 1] = arr
    for n in range(2, n_max):
        out[..., n] = 2.0 * arr * out[..., n - 1] - out[..., n - 2]
    return out


def cheb_tensor_features(c: Coordinate, d: SpectralDictionary):
    """Full tensor dictionary Phi_ij = T_i(xi_x) T_j(xi_t), flattened.

    Flattening is lexicographic with the temporal index fastest:
    entry i * k_t + j holds T_i(xi_x) T_j(xi_t).
    """
    if c.t is None:
        raise ConfigError("tensor features need both coordinates")
    tx = cheb_eval_all(affine_to_reference(c.x, d.domain_x), d.k_x)
    tt = cheb_eval_all(affine_to_reference(c.t, d.domain_t), d.k_t)
    return (tx[:, None] * tt[None, :]).ravel()


def crop_pad(full, d_trunk: int):
    """Crop the trailing feature axis to d_trunk, or zero-pad up to it.

    Cropping keeps the first d_trunk entries, dropping the lexicographic
    tail (the highest modes). The result is always a fresh array.
    """
    if d_trunk < 1:
        raise ConfigError("d_trunk must be >= 1")
    arr = np.asarray(full, dtype=float)
    n = arr.shape[-1]
    if n >= d_trunk:
        return arr[..., :d_trunk].copy()
    pad = [(0, 0)] * (arr.ndim - 1) + [(0, d_trunk - n)]
    return np.pad(arr, pad)


def fourier_features(c: Coordinate, d: SpectralDictionary):
    """Deterministic integer-frequency Fourier dictionary, then crop_pad.

    Layout before crop_pad: a leading constant 1, then interleaved
    (sin, cos) pairs of 2 pi k x_hat for k = 1..k_x, then the same pairs
    in t_hat for k = 1..k_t. x_hat, t_hat are the coordinates normalized
    to [0, 1]. Raw coordinates are not included.
    """
    xh = normalize_unit(c.x, d.domain_x)
    parts = [1.0]
    for k in range(1, d.k_x + 1):
        parts.append(np.sin(2.0 * np.pi * k * xh))
        parts.append(np.cos(2.0 * np.pi * k * xh))
    if c.t is not None:
        th = normalize_unit(c.t, d.domain_t)
        for k in range(1, d.k_t + 1):
            parts.append(np.sin(2.0 * np.pi * k * th))
            parts.append(np.cos(2.0 * np.pi * k * th))
    return crop_pad(np.array(parts), d.d_trunk)


def embed(c: Coordinate, d: SpectralDictionary):
    """Embed a single coordinate, dispatching on the dictionary kind."""
    if d.kind == "identity":
        xh = normalize_unit(c.x, d.domain_x)
        if c.t is None:
            return np.array([xh])
        return np.array([xh, normalize_unit(c.t, d.domain_t)])
    if d.kind == "fourier":
        return fourier_features(c, d)
    if c.t is None:
        tx = cheb_eval_all(affine_to_reference(c.x, d.domain_x), d.k_x)
        return crop_pad(tx, d.d_trunk)
    return crop_pad(cheb_tensor_features(c, d), d.d_trunk)


def embed_points(points, d: SpectralDictionary):
    """Vectorized embed over a (Q, 2) or (Q, 1) coordinate array.

    Row q of the result equals embed(Coordinate(*points[q]), d) bit for
    bit; the batch path runs the same arithmetic elementwise.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] not in (1, 2):
        raise ConfigError("points must have shape (Q, 1) or (Q, 2)")
    spatial_only = pts.shape[1] == 1
    x = pts[:, 0]
    if d.kind == "identity":
        xh = normalize_unit(x, d.domain_x)
        if spatial_only:
            return xh[:, None].copy()
        return np.column_stack([xh, normalize_unit(pts[:, 1], d.domain_t)])
    if d.kind == "fourier":
        xh = normalize_unit(x, d.domain_x)
        cols = [np.ones_like(xh)]
        for k in range(1, d.k_x + 1):
            cols.append(np.sin(2.0 * np.pi * k * xh))
            cols.append(np.cos(2.0 * np.pi * k * xh))
        if not spatial_only:
            th = normalize_unit(pts[:, 1], d.domain_t)
            for k in range(1, d.k_t + 1):
                cols.append(np.sin(2.0 * np.pi * k * th))
                cols.append(np.cos(2.0 * np.pi * k * th))
        return crop_pad(np.column_stack(cols), d.d_trunk)
    tx = cheb_eval_all(affine_to_reference(x, d.domain_x), d.k_x)
    if spatial_only:
        return crop_pad(tx, d.d_trunk)
    tt = cheb_eval_all(affine_to_reference(pts[:, 1], d.domain_t), d.k_t)
    full = (tx[:, :, None] * tt[:, None, :]).reshape(len(pts), -1)
    return crop_pad(full, d.d_trunk)
