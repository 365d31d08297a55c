"""Evaluation metrics and embedding diagnostics.

Relative l2 errors, discrete power spectra (1-D and radially binned 2-D),
pointwise error maps, Gram-matrix conditioning of an embedding dictionary,
and the dictionary-vs-MLP expressivity demonstration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import SpectralDictionary, cheb_eval_all, embed_points
from .errors import ConfigError, DegenerateReference, ShapeError
from .nn import AdamState, adam_step, mlp_backward, mlp_forward, mlp_init, \
    mlp_params, mlp_set_params, mse_loss

SAMPLINGS = ("uniform", "chebgauss", "chebgausslobatto")


@dataclass
class EvalReport:
    """Per-sample relative l2 errors plus their mean and std."""

    rel_l2: np.ndarray
    mean: float
    std: float
    benchmark: str = ""
    model_id: str = ""

    @classmethod
    def from_errors(cls, errors, benchmark="", model_id=""):
        e = np.asarray(errors, dtype=float)
        if e.ndim != 1 or not len(e):
            raise ConfigError("need a non-empty 1-D error vector")
        return cls(e, float(e.mean()), float(e.std()), benchmark, model_id)


@dataclass
class SpectrumReport:
    """Energies per integer wavenumber for a reference/prediction pair."""

    k: np.ndarray
    e_ref: np.ndarray
    e_pred: np.ndarray


@dataclass
class GramReport:
    """Empirical Gram matrix of embedding features and how diagonal it is."""

    gram: np.ndarray
    condition_number: float
    max_offdiag_ratio: float
    n_points: int


def relative_l2(pred, ref) -> float:
    """||pred - ref||_2 / ||ref||_2 with Frobenius norms."""
    p = np.asarray(pred, dtype=float)
    r = np.asarray(ref, dtype=float)
    if p.shape != r.shape:
        raise ShapeError(f"pred {p.shape} vs ref {r.shape}")
    denom = np.sqrt(np.sum(r * r))
    if denom == 0.0:
        raise DegenerateReference("reference field has zero norm")
    return float(np.sqrt(np.sum((p - r) ** 2)) / denom)


def error_map(pred, ref) -> np.ndarray:
    """Pointwise absolute error |pred - ref|."""
    p = np.asarray(pred, dtype=float)
    r = np.asarray(ref, dtype=float)
    if p.shape != r.shape:
        raise ShapeError(f"pred {p.shape} vs ref {r.shape}")
    return np.abs(p - r)


def power_spectrum_1d(field, time_index: int = -1):
    """Spatial power spectrum of one time slice of an (n_x, n_t) field.

    E(k) = |u_hat_k|^2 / n_x summed over +-k for k = 0 .. n_x // 2, which
    makes sum_k E(k) equal the mean square of the samples times n_x
    (Parseval). Returns (k, E).
    """
    f = np.asarray(field, dtype=float)
    if f.ndim != 2:
        raise ShapeError("field must be 2-D (n_x, n_t)")
    n_x = f.shape[0]
    if n_x < 4:
        raise ShapeError("need at least 4 spatial points")
    u = f[:, time_index]
    spec = np.abs(np.fft.rfft(u)) ** 2
    if n_x % 2 == 0:
        spec[1:-1] *= 2.0
    else:
        spec[1:] *= 2.0
    return np.arange(len(spec)), spec / n_x


def power_spectrum_2d(field):
    """Radially binned power spectrum of a square field.

    Modes are binned by the rounded integer radius of their wavevector;
    energies are |u_hat|^2 / n^2 so the bin sum again satisfies Parseval
    against mean square times the sample count. Returns (k, E).
    """
    f = np.asarray(field, dtype=float)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ShapeError(f"field must be square 2-D, got {f.shape}")
    n = f.shape[0]
    if n < 4:
        raise ShapeError("need at least 4 points per side")
    power = np.abs(np.fft.fft2(f)) ** 2 / (n * n)
    freq = np.fft.fftfreq(n) * n
    radius = np.rint(np.hypot(freq[:, None], freq[None, :])).astype(int)
    e = np.bincount(radius.ravel(), weights=power.ravel())
    return np.arange(len(e)), e


def spectrum_report_1d(ref_field, pred_field, time_index: int = -1) -> SpectrumReport:
    """Paired spectra of reference and predicted fields at one snapshot."""
    k, e_ref = power_spectrum_1d(ref_field, time_index)
    k2, e_pred = power_spectrum_1d(pred_field, time_index)
    if len(k) != len(k2):
        raise ShapeError("fields disagree on spatial resolution")
    return SpectrumReport(k, e_ref, e_pred)


def spectrum_report_2d(ref_field, pred_field) -> SpectrumReport:
    k, e_ref = power_spectrum_2d(ref_field)
    k2, e_pred = power_spectrum_2d(pred_field)
    if len(k) != len(k2):
        raise ShapeError("fields disagree on resolution")
    return SpectrumReport(k, e_ref, e_pred)


def _reference_nodes(sampling: str, q: int) -> np.ndarray:
    """Sampling nodes on [-1, 1]."""
    if sampling == "uniform":
        return np.linspace(-1.0, 1.0, q)
    if sampling == "chebgauss":
        return np.cos((2.0 * np.arange(q) + 1.0) * np.pi / (2.0 * q))
    if sampling == "chebgausslobatto":
        if q < 2:
            raise ConfigError("Gauss-Lobatto needs q >= 2")
        return np.cos(np.arange(q) * np.pi / (q - 1))
    raise ConfigError(f"unknown sampling {sampling!r}; choose from {SAMPLINGS}")


def gram_diagnostic(d: SpectralDictionary, sampling: str = "chebgauss",
                    q: int = 64, one_dim: bool = False) -> GramReport:
    """Empirical Gram matrix G = (1/Q) sum_q phi(q) phi(q)^T.

    With one_dim the nodes sample the x axis only and the embedding sees
    just the spatial coordinate; otherwise a tensor grid of at least q
    points covers both axes. Requires at least as many points as features.
    """
    ax, bx = d.domain_x
    q_side = q if one_dim else max(2, int(np.ceil(np.sqrt(q))))
    nodes_x = ax + 0.5 * (_reference_nodes(sampling, q_side) + 1.0) * (bx - ax)
    if one_dim:
        coords = nodes_x[:, None]
    else:
        at, bt = d.domain_t
        nodes_t = at + 0.5 * (_reference_nodes(sampling, q_side) + 1.0) * (bt - at)
        coords = np.column_stack([
            np.repeat(nodes_x, len(nodes_t)),
            np.tile(nodes_t, len(nodes_x)),
        ])
    phi = embed_points(coords, d)
    n_pts, width = phi.shape
    if n_pts < width:
        raise ConfigError(f"{n_pts} sample points cannot resolve {width} features")
    g = phi.T @ phi / n_pts
    g = 0.5 * (g + g.T)
    eig = np.linalg.eigvalsh(g)
    cond = float(eig[-1] / max(eig[0], 1e-300))
    diag = np.diag(g)
    off = g - np.diag(diag)
    max_off = float(np.max(np.abs(off))) if width > 1 else 0.0
    ratio = max_off / float(np.min(np.abs(diag))) if np.min(np.abs(diag)) > 0 else np.inf
    return GramReport(g, cond, ratio, n_pts)


def superset_demo(degree: int = 12, trunk_widths=(1, 32, 32, 1),
                  budget: int = 5000, n_grid: int = 512, seed: int = 0,
                  lr: float = 1e-3) -> dict:
    """Fit T_degree two ways: linear readout on the dictionary vs plain MLP.

    The target is T_degree(2x - 1) on a dense uniform grid over [0, 1].
    A least-squares linear readout on the (degree + 1)-mode Chebyshev
    dictionary represents it exactly; the coordinate-input MLP gets
    `budget` full-batch Adam steps with linearly decayed learning rate.
    Returns both mean squared errors.
    """
    if degree < 0:
        raise ConfigError("degree must be >= 0")
    xs = np.linspace(0.0, 1.0, n_grid)
    basis = cheb_eval_all(2.0 * xs - 1.0, degree + 1)
    target = basis[:, degree].copy()

    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    cheb_mse = float(np.mean((basis @ coef - target) ** 2))

    net = mlp_init(list(trunk_widths), "tanh", seed=seed)
    params = mlp_params(net)
    state = AdamState.init(params, lr=lr)
    x_in = xs[:, None]
    y = target[:, None]
    for step in range(budget):
        out, tape = mlp_forward(net, x_in)
        _, dout = mse_loss(out, y)
        grads = mlp_backward(net, tape, dout)
        state.lr = lr * (1.0 - step / budget)
        params, state = adam_step(params, grads, state)
        mlp_set_params(net, params)
    out, _ = mlp_forward(net, x_in)
    mlp_mse = float(np.mean((out[:, 0] - target) ** 2))
    return {"cheb_linear_mse": cheb_mse, "vanilla_mlp_mse": mlp_mse}
