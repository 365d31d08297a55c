"""Training and evaluation pipeline.

A RunConfig names the benchmark, the model kind (deeponet, fedonet, or
sedonet), and all architecture/optimizer knobs. train() follows the plain
mini-batch loop: per batch, branch forward on the inputs, trunk forward on
the cached grid embedding, inner-product synthesis, mean squared loss, and
one bias-corrected Adam update of both networks. Everything is driven by
a single integer seed, so a fixed (config, data) pair reproduces its
checkpoint byte for byte.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from .datagen import BENCHMARKS, Dataset
from .diagnostics import EvalReport
from .embeddings import SpectralDictionary
from .errors import ConfigError, DegenerateReference, DivergenceError
from .model import (OperatorModel, make_operator_model, model_params,
                    model_set_params, operator_loss, set_standardization,
                    synthesize, trunk_features)
from .nn import AdamState, adam_step, mlp_forward, mlp_init, mlp_set_params

MODEL_KINDS = ("deeponet", "fedonet", "sedonet")

_EMBEDDING_FOR_MODEL = {
    "deeponet": "identity",
    "fedonet": "fourier",
    "sedonet": "chebyshev",
}

SEED_ENV_VAR = "SEDONET_SEED"


def default_seed() -> int:
    """Seed used when a config leaves it unset; SEDONET_SEED overrides 0."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc


@dataclass
class RunConfig:
    """One training run. Defaults give the desk-scale setup."""

    benchmark: str
    model: str
    k_x: int = 8
    k_t: int = 8
    d_trunk: int = 64
    branch_hidden: list[int] = field(default_factory=lambda: [128, 128])
    trunk_hidden: list[int] = field(default_factory=lambda: [128, 128])
    p: int = 64
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    batch_size: int = 64
    epochs: int = 200
    seed: int | None = None

    def __post_init__(self):
        if self.benchmark not in BENCHMARKS:
            raise ConfigError(f"unknown benchmark {self.benchmark!r}")
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {MODEL_KINDS}")
        if min(self.k_x, self.k_t, self.d_trunk, self.p, self.batch_size) < 1:
            raise ConfigError("k_x, k_t, d_trunk, p, batch_size must be >= 1")
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")
        if self.lr <= 0 or not (0 <= self.beta1 < 1) or not (0 <= self.beta2 < 1):
            raise ConfigError("bad optimizer settings")
        if not all(isinstance(w, int) and w >= 1
                   for w in list(self.branch_hidden) + list(self.trunk_hidden)):
            raise ConfigError("hidden widths must be positive integers")
        if self.seed is None:
            self.seed = default_seed()

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "benchmark" not in raw or "model" not in raw:
            raise ConfigError("config needs at least 'benchmark' and 'model'")
        return cls(**raw)


def default_run_config(benchmark: str, model: str, **overrides) -> RunConfig:
    """Desk-scale defaults; fedonet gets enough frequencies to fill d_trunk."""
    cfg = dict(benchmark=benchmark, model=model)
    if model == "fedonet":
        cfg.update(k_x=15, k_t=15)
    cfg.update(overrides)
    return RunConfig(**cfg)


@dataclass
class Checkpoint:
    """Everything needed to rebuild and rerun a trained model.

    config is the resolved snapshot (run settings plus the data-dependent
    m and domains); params is the flat branch-then-trunk array list.
    """

    config: dict
    params: list[np.ndarray]
    input_mean: np.ndarray
    input_std: np.ndarray
    loss_history: np.ndarray

    def to_model(self) -> OperatorModel:
        model = _model_from_snapshot(self.config)
        model_set_params(model, [np.array(p, dtype=float) for p in self.params])
        model.input_mean = np.asarray(self.input_mean, dtype=float)
        model.input_std = np.asarray(self.input_std, dtype=float)
        return model


def _dictionary_for(cfg_model, k_x, k_t, d_trunk, domain_x, domain_t):
    return SpectralDictionary(_EMBEDDING_FOR_MODEL[cfg_model], k_x, k_t, d_trunk,
                              tuple(domain_x), tuple(domain_t))


def _model_from_snapshot(snap: dict) -> OperatorModel:
    d = _dictionary_for(snap["model"], snap["k_x"], snap["k_t"], snap["d_trunk"],
                        snap["domain_x"], snap["domain_t"])
    return make_operator_model(d, snap["m"], snap["branch_hidden"],
                               snap["trunk_hidden"], snap["p"], seed=snap["seed"])


def _mlp_shapes(widths):
    shapes = []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        shapes.append((fan_out, fan_in))
        shapes.append((fan_out,))
    return shapes


def validate_snapshot(snap: dict):
    """Check a checkpoint config snapshot; return the expected array shapes.

    The shape list covers the flat parameter arrays, the two
    standardization vectors, and None for the variable-length loss history.
    Raises ConfigError on anything inconsistent.
    """
    required = ("benchmark", "model", "k_x", "k_t", "d_trunk", "branch_hidden",
                "trunk_hidden", "p", "lr", "beta1", "beta2", "batch_size",
                "epochs", "seed", "m", "domain_x", "domain_t")
    missing = [k for k in required if k not in snap]
    if missing:
        raise ConfigError(f"snapshot missing keys: {missing}")
    RunConfig(**{k: snap[k] for k in RunConfig.__dataclass_fields__})
    m = snap["m"]
    if not isinstance(m, int) or m < 1:
        raise ConfigError("snapshot m must be a positive integer")
    if not isinstance(snap["seed"], int):
        raise ConfigError("snapshot seed must be a resolved integer")
    d = _dictionary_for(snap["model"], snap["k_x"], snap["k_t"], snap["d_trunk"],
                        snap["domain_x"], snap["domain_t"])
    shapes = _mlp_shapes([m, *snap["branch_hidden"], snap["p"]])
    shapes += _mlp_shapes([d.output_width(), *snap["trunk_hidden"], snap["p"]])
    return shapes + [(m,), (m,), None]


def _snapshot_from(cfg: RunConfig, m: int, grid) -> dict:
    snap = asdict(cfg)
    snap["branch_hidden"] = list(cfg.branch_hidden)
    snap["trunk_hidden"] = list(cfg.trunk_hidden)
    snap["m"] = m
    snap["domain_x"] = [float(grid.domain_x[0]), float(grid.domain_x[1])]
    snap["domain_t"] = [float(grid.domain_t[0]), float(grid.domain_t[1])]
    return snap


def train(cfg: RunConfig, dataset: Dataset) -> Checkpoint:
    """Train one model on one dataset; fully determined by (cfg, dataset)."""
    if cfg.benchmark != dataset.benchmark:
        raise ConfigError(
            f"config is for {cfg.benchmark}, data is {dataset.benchmark}")
    if dataset.n_samples < 1:
        raise ConfigError("empty training set")

    n, m = dataset.inputs.shape
    grid = dataset.grid
    snap = _snapshot_from(cfg, m, grid)
    model = _model_from_snapshot(snap)
    set_standardization(model, dataset.inputs)

    # The embedding of the fixed grid never changes; compute it once.
    features = trunk_features(model, grid)

    params = model_params(model)
    state = AdamState.init(params, lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2)
    shuffle_rng = np.random.Generator(np.random.PCG64(cfg.seed + 0x9E3779B9))
    batch = min(cfg.batch_size, n)

    history = []
    for _ in range(cfg.epochs):
        order = shuffle_rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            loss, grads = operator_loss(model, dataset.inputs[idx],
                                        dataset.targets[idx], features=features)
            if not np.isfinite(loss):
                raise DivergenceError(f"loss became {loss} during training")
            params, state = adam_step(params, grads, state)
            model_set_params(model, params)
            epoch_losses.append(loss)
        history.append(float(np.mean(epoch_losses)))

    return Checkpoint(snap, [p.copy() for p in params],
                      model.input_mean.copy(), model.input_std.copy(),
                      np.asarray(history))


def evaluate(ckpt: Checkpoint | OperatorModel, dataset: Dataset,
             chunk: int = 256) -> EvalReport:
    """Per-sample relative l2 errors of the predicted fields."""
    if isinstance(ckpt, Checkpoint):
        if ckpt.config["benchmark"] != dataset.benchmark:
            raise ConfigError(
                f"checkpoint is for {ckpt.config['benchmark']}, data is "
                f"{dataset.benchmark}")
        model_id = ckpt.config["model"]
        model = ckpt.to_model()
    else:
        model = ckpt
        model_id = model.dictionary.kind
    if dataset.n_samples < 1:
        raise ConfigError("empty evaluation set")

    features = trunk_features(model, dataset.grid)
    t_out, _ = mlp_forward(model.trunk, features)
    errors = np.empty(dataset.n_samples)
    for start in range(0, dataset.n_samples, chunk):
        u = dataset.inputs[start:start + chunk]
        y = dataset.targets[start:start + chunk]
        b_out, _ = mlp_forward(model.branch, (u - model.input_mean) / model.input_std)
        pred = synthesize(b_out, t_out)
        num = np.sqrt(np.sum((pred - y) ** 2, axis=1))
        den = np.sqrt(np.sum(y * y, axis=1))
        if np.any(den == 0.0):
            raise DegenerateReference("a reference field has zero norm")
        errors[start:start + chunk] = num / den
    return EvalReport.from_errors(errors, dataset.benchmark, model_id)


# ---------------------------------------------------------------------------
# Deterministic CSV writers


def _fmt(x: float) -> str:
    return repr(float(x))


def write_eval_csv(report: EvalReport, path) -> None:
    lines = ["sample,rel_l2"]
    lines += [f"{i},{_fmt(v)}" for i, v in enumerate(report.rel_l2)]
    _write_text(path, lines)


def write_spectrum_csv(k, e_ref, e_pred, path) -> None:
    lines = ["k,E_ref,E_pred"]
    lines += [f"{int(ki)},{_fmt(r)},{_fmt(p)}" for ki, r, p in zip(k, e_ref, e_pred)]
    _write_text(path, lines)


def write_gram_csv(report, path) -> None:
    lines = [
        "metric,value",
        f"condition_number,{_fmt(report.condition_number)}",
        f"max_offdiag_ratio,{_fmt(report.max_offdiag_ratio)}",
        f"n_points,{report.n_points}",
        f"width,{report.gram.shape[0]}",
    ]
    _write_text(path, lines)


def write_superset_csv(result: dict, path) -> None:
    lines = ["metric,value"]
    lines += [f"{k},{_fmt(v)}" for k, v in sorted(result.items())]
    _write_text(path, lines)


def _write_text(path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
