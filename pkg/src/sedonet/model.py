"""Branch-trunk operator networks over a fixed query grid.

The operator prediction at query point (x, t) for input function u0 is
sum_k b_k(u0) t_k(x, t): a plain inner product of branch and trunk
outputs, with no additive bias. The trunk input is whatever the attached
spectral dictionary produces; branch inputs are standardized with
per-dataset statistics stored on the model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embeddings import SpectralDictionary, embed_points
from .errors import ConfigError, ShapeError
from .nn import (Mlp, mlp_backward, mlp_forward, mlp_init, mlp_param_count,
                 mlp_params, mlp_set_params, mse_loss)


@dataclass
class QueryGrid:
    """Tensor-product evaluation grid with physical coordinate values.

    Flattening is lexicographic with the temporal index fastest: query
    q = ix * n_t + it corresponds to (xs[ix], ts[it]), matching how target
    fields of shape (n_x, n_t) are raveled.
    """

    xs: np.ndarray
    ts: np.ndarray
    domain_x: tuple[float, float] = (0.0, 1.0)
    domain_t: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.ts = np.asarray(self.ts, dtype=float)
        if self.xs.ndim != 1 or self.ts.ndim != 1 or not len(self.xs) or not len(self.ts):
            raise ConfigError("grid axes must be non-empty 1-D arrays")

    @property
    def n_x(self) -> int:
        return len(self.xs)

    @property
    def n_t(self) -> int:
        return len(self.ts)

    @property
    def n_points(self) -> int:
        return len(self.xs) * len(self.ts)

    def points(self) -> np.ndarray:
        """All (x, t) pairs as a (n_x * n_t, 2) array, t fastest."""
        return np.column_stack([
            np.repeat(self.xs, len(self.ts)),
            np.tile(self.ts, len(self.xs)),
        ])


@dataclass
class OperatorModel:
    """Branch and trunk networks sharing a latent width p."""

    branch: Mlp
    trunk: Mlp
    dictionary: SpectralDictionary
    p: int
    input_mean: np.ndarray = field(default=None)
    input_std: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.branch.layer_widths[-1] != self.p or self.trunk.layer_widths[-1] != self.p:
            raise ConfigError("branch and trunk output widths must equal p")
        if self.trunk.layer_widths[0] != self.dictionary.output_width():
            raise ConfigError(
                f"trunk input width {self.trunk.layer_widths[0]} != embedding "
                f"width {self.dictionary.output_width()}")
        m = self.branch.layer_widths[0]
        if self.input_mean is None:
            self.input_mean = np.zeros(m)
        if self.input_std is None:
            self.input_std = np.ones(m)
        self.input_mean = np.asarray(self.input_mean, dtype=float)
        self.input_std = np.asarray(self.input_std, dtype=float)
        if self.input_mean.shape != (m,) or self.input_std.shape != (m,):
            raise ConfigError("standardization stats must have shape (m,)")


def make_operator_model(dictionary: SpectralDictionary, m: int,
                        branch_hidden=(128, 128), trunk_hidden=(128, 128),
                        p: int = 64, seed: int = 0,
                        activation: str = "tanh") -> OperatorModel:
    """Build a fresh model; branch and trunk get distinct derived seeds."""
    if m < 1 or p < 1:
        raise ConfigError("m and p must be >= 1")
    branch = mlp_init([m, *branch_hidden, p], activation, seed=2 * seed)
    trunk = mlp_init([dictionary.output_width(), *trunk_hidden, p],
                     activation, seed=2 * seed + 1)
    return OperatorModel(branch, trunk, dictionary, p)


def set_standardization(model: OperatorModel, train_inputs):
    """Fix branch standardization stats from a training input matrix."""
    u = np.asarray(train_inputs, dtype=float)
    if u.ndim != 2 or u.shape[1] != model.branch.layer_widths[0]:
        raise ShapeError("inputs must be (N, m)")
    mean = u.mean(axis=0)
    std = u.std(axis=0)
    model.input_mean = mean
    # Constant sensors carry no signal; leave them unscaled instead of
    # dividing by zero.
    model.input_std = np.where(std < 1e-12, 1.0, std)


def branch_eval(model: OperatorModel, u0_batch):
    """Branch coefficients for a (N, m) batch of input functions."""
    u = np.asarray(u0_batch, dtype=float)
    if u.ndim != 2:
        raise ShapeError("u0_batch must be 2-D (N, m)")
    out, _ = mlp_forward(model.branch, (u - model.input_mean) / model.input_std)
    return out


def trunk_eval(model: OperatorModel, grid: QueryGrid):
    """Trunk basis at every grid point, shape (Q, p)."""
    out, _ = mlp_forward(model.trunk, trunk_features(model, grid))
    return out


def trunk_features(model: OperatorModel, grid: QueryGrid):
    """Embedded grid coordinates (Q, width): deterministic, cacheable."""
    d = model.dictionary
    if (d.domain_x != tuple(grid.domain_x)) or (d.domain_t != tuple(grid.domain_t)):
        raise ConfigError("grid domains do not match the embedding dictionary")
    return embed_points(grid.points(), d)


def synthesize(branch_out, trunk_out):
    """Predicted fields: row i is branch_out[i] . trunk_out[q] over all q."""
    b = np.asarray(branch_out, dtype=float)
    t = np.asarray(trunk_out, dtype=float)
    if b.ndim != 2 or t.ndim != 2 or b.shape[1] != t.shape[1]:
        raise ShapeError(f"latent widths differ: {b.shape} vs {t.shape}")
    return b @ t.T


def operator_loss(model: OperatorModel, u0_batch, targets, grid: QueryGrid = None,
                  features=None):
    """Mean squared operator loss and exact parameter gradients.

    targets has shape (N, Q) over the flattened grid. Pass features to
    reuse a cached embedding matrix; otherwise it is computed from grid.
    Returns (loss, grads) with grads ordered branch params then trunk
    params, matching model_params().
    """
    u = np.asarray(u0_batch, dtype=float)
    y = np.asarray(targets, dtype=float)
    if features is None:
        if grid is None:
            raise ConfigError("operator_loss needs a grid or cached features")
        features = trunk_features(model, grid)
    if u.ndim != 2 or y.ndim != 2 or u.shape[0] != y.shape[0]:
        raise ShapeError("u0_batch (N, m) and targets (N, Q) must align")
    if y.shape[1] != features.shape[0]:
        raise ShapeError(
            f"targets have {y.shape[1]} queries but grid has {features.shape[0]}")

    b_out, b_tape = mlp_forward(model.branch,
                                (u - model.input_mean) / model.input_std)
    t_out, t_tape = mlp_forward(model.trunk, features)
    loss, dpred = mse_loss(b_out @ t_out.T, y)
    grads = mlp_backward(model.branch, b_tape, dpred @ t_out)
    grads += mlp_backward(model.trunk, t_tape, dpred.T @ b_out)
    return loss, grads


def predict_field(model: OperatorModel, u0, grid: QueryGrid):
    """Predicted field for one input function, shaped (n_x, n_t)."""
    u = np.asarray(u0, dtype=float)
    if u.ndim != 1:
        raise ShapeError("u0 must be a single sensor vector")
    row = synthesize(branch_eval(model, u[None, :]), trunk_eval(model, grid))
    return row.reshape(grid.n_x, grid.n_t)


def model_params(model: OperatorModel):
    """Flat trainable-parameter list: branch first, then trunk."""
    return mlp_params(model.branch) + mlp_params(model.trunk)


def model_set_params(model: OperatorModel, params):
    nb = 2 * len(model.branch.weights)
    mlp_set_params(model.branch, params[:nb])
    mlp_set_params(model.trunk, params[nb:])


def model_param_count(model: OperatorModel) -> int:
    return mlp_param_count(model.branch) + mlp_param_count(model.trunk)
