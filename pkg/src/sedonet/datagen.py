"""Benchmark data generators.

Five operator-learning benchmarks, each mapping an input function to a
solution field on a fixed tensor grid:

* ``poisson2d``: 2-D Poisson with Gaussian-random-field forcing, 5-point
  Laplacian solved by conjugate gradients.
* ``burgers1d``: viscous Burgers with upwind advection and centered
  diffusion, homogeneous Dirichlet walls.
* ``advdiff1d``: linear advection-diffusion, first-order upwind in the
  direction fixed by sign(c).
* ``lorenz96``: the 40-site Lorenz-96 system under RK4, predicting the
  post-transient window from its first snapshot.
* ``allencahn``: 1-D Allen-Cahn with periodic boundaries under explicit
  Euler.

Every sample owns an independent RNG stream seeded with base_seed XOR
sample_index, so serial and parallel generation are bit-identical. The
test split uses base_seed XOR TEST_STREAM so train and test streams are
disjoint by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GenerationError, ShapeError, SolverError
from .model import QueryGrid

BENCHMARKS = ("poisson2d", "burgers1d", "advdiff1d", "lorenz96", "allencahn")

# Test-split RNG streams live 2^31 away from the train streams; sample
# indices never reach that bit, so the seed sets cannot collide.
TEST_STREAM = 1 << 31

# Hard magnitude bounds on stored target fields, checked after generation.
TARGET_BOUNDS = {
    "poisson2d": 10.0,
    "burgers1d": 5.0,
    "advdiff1d": 5.0,
    "lorenz96": 100.0,
    "allencahn": 10.0,
}

_BURGERS_T = 0.3
_ADVDIFF_T = 1.0
_L96_WINDOW = 5.0
_AC_T = 1.0


@dataclass
class GrfSpec:
    """Karhunen-Loeve sine expansion of a Gaussian random field on [0,1]^2.

    Eigenvalues lambda_jk = (pi^2 (j^2 + k^2) + tau^2)^(-alpha), modes
    truncated at j, k <= n // 2.
    """

    alpha: float = 3.0
    tau: float = 3.0
    n: int = 32

    def __post_init__(self):
        if self.n < 4:
            raise ConfigError("GRF grid must have n >= 4")
        if self.alpha <= 1.0 or self.tau <= 0.0:
            raise ConfigError("GRF needs alpha > 1 and tau > 0")


def sample_grf_2d(spec: GrfSpec, seed: int) -> np.ndarray:
    """One field draw on the inclusive n x n grid, zero on the boundary."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n, modes = spec.n, spec.n // 2
    j = np.arange(1, modes + 1)
    lam = (np.pi ** 2 * (j[:, None] ** 2 + j[None, :] ** 2) + spec.tau ** 2) ** (-spec.alpha)
    coeff = np.sqrt(lam) * rng.standard_normal((modes, modes))
    x = np.linspace(0.0, 1.0, n)
    s = np.sin(np.pi * j[:, None] * x[None, :])  # (modes, n)
    return 2.0 * (s.T @ coeff @ s)


def solve_poisson_2d(f: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Solve lap(u) = f on [0,1]^2 with zero Dirichlet walls.

    5-point Laplacian at spacing h = 1/(n-1); conjugate gradients on the
    SPD system down to a relative residual of rtol. Raises SolverError
    after 10 n^2 iterations without convergence.
    """
    f = np.asarray(f, dtype=float)
    if f.ndim != 2 or f.shape[0] != f.shape[1] or f.shape[0] < 3:
        raise ShapeError(f"forcing must be square n x n with n >= 3, got {f.shape}")
    n = f.shape[0]
    h = 1.0 / (n - 1)

    def apply_a(v):
        # 4 v - sum of neighbors; zero Dirichlet halo implied.
        out = 4.0 * v.copy()
        out[1:, :] -= v[:-1, :]
        out[:-1, :] -= v[1:, :]
        out[:, 1:] -= v[:, :-1]
        out[:, :-1] -= v[:, 1:]
        return out

    b = -h * h * f[1:-1, 1:-1]
    b_norm = np.sqrt(np.sum(b * b))
    u = np.zeros((n, n))
    if b_norm == 0.0:
        return u
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = np.sum(r * r)
    for _ in range(10 * n * n):
        ap = apply_a(p)
        alpha = rs / np.sum(p * ap)
        x += alpha * p
        r -= alpha * ap
        rs_new = np.sum(r * r)
        if np.sqrt(rs_new) <= rtol * b_norm:
            u[1:-1, 1:-1] = x
            return u
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise SolverError(f"CG stalled after {10 * n * n} iterations (n={n})")


@dataclass
class BenchmarkConfig:
    """Generation settings for one dataset split.

    Fields not applicable to a benchmark are simply ignored by its
    generator. Use benchmark_config() to get consistent defaults.
    """

    benchmark: str
    count: int
    seed: int = 0
    n_x: int = 100
    n_t: int = 100
    nu: float = 0.01
    c: float = 0.03
    forcing: float = 4.0
    eps: float = 1e-4
    t_final: float = 1.0
    alpha: float = 3.0
    tau: float = 3.0
    dt: float = 0.01
    transient: float = 10.0
    sensor_side: int = 32

    def __post_init__(self):
        if self.benchmark not in BENCHMARKS:
            raise ConfigError(f"unknown benchmark {self.benchmark!r}")
        if self.count < 1:
            raise ConfigError("count must be >= 1")
        if self.n_x < 4 or self.n_t < 2:
            raise ConfigError("grid too small")


_DESK_COUNTS = {
    "poisson2d": (2000, 200),
    "burgers1d": (1000, 250),
    "advdiff1d": (1000, 250),
    "lorenz96": (1000, 200),
    "allencahn": (1000, 250),
}

_PAPER_COUNTS = {
    "poisson2d": (10000, 1000),
    "burgers1d": (1122, 128),
    "advdiff1d": (1000, 250),
    "lorenz96": (8000, 2000),
    "allencahn": (9750, 250),
}


def default_counts(benchmark: str, paper_scale: bool = False):
    """(train, test) sample counts at desk or paper scale."""
    table = _PAPER_COUNTS if paper_scale else _DESK_COUNTS
    if benchmark not in table:
        raise ConfigError(f"unknown benchmark {benchmark!r}")
    return table[benchmark]


def benchmark_config(benchmark: str, count: int, seed: int = 0,
                     paper_scale: bool = False, **overrides) -> BenchmarkConfig:
    """Canonical config for a benchmark at desk or paper scale."""
    base = dict(benchmark=benchmark, count=count, seed=seed)
    if benchmark == "poisson2d":
        n = 128 if paper_scale else 32
        base.update(n_x=n, n_t=n, alpha=3.0, tau=3.0)
    elif benchmark == "burgers1d":
        base.update(n_x=100, n_t=100, nu=0.01, t_final=_BURGERS_T)
    elif benchmark == "advdiff1d":
        base.update(n_x=100, n_t=100, nu=0.01, c=0.03, t_final=_ADVDIFF_T)
    elif benchmark == "lorenz96":
        base.update(n_x=40, n_t=501, forcing=4.0, dt=0.01, transient=10.0,
                    t_final=_L96_WINDOW)
    else:
        base.update(n_x=200, n_t=200, eps=1e-4, dt=0.005, t_final=_AC_T)
    base.update(overrides)
    return BenchmarkConfig(**base)


def grid_for_benchmark(benchmark: str, n_x: int, n_t: int) -> QueryGrid:
    """Canonical query grid: fixed physical domains per benchmark."""
    if benchmark == "poisson2d":
        return QueryGrid(np.linspace(0.0, 1.0, n_x), np.linspace(0.0, 1.0, n_t),
                         (0.0, 1.0), (0.0, 1.0))
    if benchmark == "burgers1d":
        return QueryGrid(np.linspace(0.0, 1.0, n_x), np.linspace(0.0, _BURGERS_T, n_t),
                         (0.0, 1.0), (0.0, _BURGERS_T))
    if benchmark == "advdiff1d":
        return QueryGrid(np.linspace(0.0, 1.0, n_x), np.linspace(0.0, _ADVDIFF_T, n_t),
                         (0.0, 1.0), (0.0, _ADVDIFF_T))
    if benchmark == "lorenz96":
        return QueryGrid(np.arange(n_x) / n_x, np.linspace(0.0, _L96_WINDOW, n_t),
                         (0.0, 1.0), (0.0, _L96_WINDOW))
    if benchmark == "allencahn":
        return QueryGrid(-1.0 + 2.0 * np.arange(n_x) / n_x,
                         _AC_T * np.arange(1, n_t + 1) / n_t,
                         (-1.0, 1.0), (0.0, _AC_T))
    raise ConfigError(f"unknown benchmark {benchmark!r}")


@dataclass(eq=False)
class Dataset:
    """Input functions, target fields, and the grid they live on.

    config is an in-memory provenance snapshot; it is not persisted by the
    binary format and is excluded from equality.
    """

    benchmark: str
    inputs: np.ndarray
    targets: np.ndarray
    grid: QueryGrid
    config: dict | None = None

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float)
        if self.inputs.ndim != 2 or self.targets.ndim != 2:
            raise ShapeError("inputs and targets must be 2-D")
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ShapeError("inputs and targets must have the same sample count")
        if self.targets.shape[1] != self.grid.n_points:
            raise ShapeError(
                f"targets have {self.targets.shape[1]} queries, grid has "
                f"{self.grid.n_points}")

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.benchmark == other.benchmark
                and self.inputs.shape == other.inputs.shape
                and self.targets.shape == other.targets.shape
                and (self.grid.n_x, self.grid.n_t) == (other.grid.n_x, other.grid.n_t)
                and np.array_equal(self.inputs, other.inputs)
                and np.array_equal(self.targets, other.targets))

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]


def _check_targets(benchmark: str, targets: np.ndarray):
    if not np.all(np.isfinite(targets)):
        raise GenerationError(f"{benchmark}: non-finite values in generated fields")
    bound = TARGET_BOUNDS[benchmark]
    peak = float(np.max(np.abs(targets)))
    if peak > bound:
        raise GenerationError(f"{benchmark}: |target| = {peak:.3g} exceeds bound {bound}")


# ---------------------------------------------------------------------------
# Poisson


def gen_poisson(cfg: BenchmarkConfig) -> Dataset:
    """GRF forcings and their Poisson solutions on an n x n grid.

    Branch input is the forcing itself, downsampled to sensor_side x
    sensor_side when the native grid is a strict multiple of it.
    """
    if cfg.n_x != cfg.n_t:
        raise ConfigError("poisson2d uses a square grid (n_x == n_t)")
    n = cfg.n_x
    spec = GrfSpec(cfg.alpha, cfg.tau, n)
    stride = n // cfg.sensor_side if (n > cfg.sensor_side and n % cfg.sensor_side == 0) else 1
    m = (n // stride) ** 2 if stride > 1 else n * n
    inputs = np.empty((cfg.count, m))
    targets = np.empty((cfg.count, n * n))
    for i in range(cfg.count):
        f = sample_grf_2d(spec, cfg.seed ^ i)
        u = solve_poisson_2d(f)
        inputs[i] = (f[::stride, ::stride] if stride > 1 else f).ravel()
        targets[i] = u.ravel()
    _check_targets("poisson2d", targets)
    return Dataset("poisson2d", inputs, targets, grid_for_benchmark("poisson2d", n, n),
                   config=_snapshot(cfg))


# ---------------------------------------------------------------------------
# Burgers


def burgers_trajectory(u0: np.ndarray, nu: float = 0.01, t_final: float = _BURGERS_T,
                       n_t: int = 100, u_bound: float = 5.0) -> np.ndarray:
    """Integrate viscous Burgers with Dirichlet-0 walls; field (n_x, n_t).

    Upwind advection switches on sign(u); diffusion is centered. The
    internal step is chosen so nu dt / dx^2 <= 0.5 and the CFL number at
    |u| = u_bound stays below 1. Frames that blow past u_bound or go
    non-finite leave the remaining columns as NaN for the caller to reject.
    """
    u = np.asarray(u0, dtype=float).copy()
    n_x = u.shape[0]
    dx = 1.0 / (n_x - 1)
    frame_dt = t_final / (n_t - 1)
    dt_max = 0.9 * min(0.5 * dx * dx / nu, dx / u_bound)
    n_sub = max(1, math.ceil(frame_dt / dt_max))
    dt = frame_dt / n_sub

    field = np.full((n_x, n_t), np.nan)
    field[:, 0] = u
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, n_t):
            for _ in range(n_sub):
                mid = u[1:-1]
                bwd = (mid - u[:-2]) / dx
                fwd = (u[2:] - mid) / dx
                adv = mid * np.where(mid > 0.0, bwd, fwd)
                diff = (u[2:] - 2.0 * mid + u[:-2]) / (dx * dx)
                u[1:-1] = mid + dt * (nu * diff - adv)
                # Dirichlet walls stay pinned at zero.
                u[0] = 0.0
                u[-1] = 0.0
            if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > u_bound:
                return field
            field[:, j] = u
    return field


def gen_burgers(cfg: BenchmarkConfig) -> Dataset:
    """Random three-mode sine initial conditions and their Burgers evolution.

    Unstable or out-of-bound trajectories are resampled with fresh
    coefficients from the same per-sample stream; ten straight rejections
    for one sample raise GenerationError.
    """
    xs = np.linspace(0.0, 1.0, cfg.n_x)
    inputs = np.empty((cfg.count, cfg.n_x))
    targets = np.empty((cfg.count, cfg.n_x * cfg.n_t))
    modes = np.sin(np.pi * np.arange(1, 4)[:, None] * xs[None, :])  # (3, n_x)
    for i in range(cfg.count):
        rng = np.random.Generator(np.random.PCG64(cfg.seed ^ i))
        for _ in range(10):
            coeff = rng.normal(0.0, 0.3, size=3)
            u0 = coeff @ modes
            u0[0] = 0.0
            u0[-1] = 0.0
            fld = burgers_trajectory(u0, cfg.nu, cfg.t_final, cfg.n_t)
            if np.all(np.isfinite(fld)) and np.max(np.abs(fld)) <= 5.0:
                break
        else:
            raise GenerationError(f"burgers1d: sample {i} rejected 10 times")
        inputs[i] = u0
        targets[i] = fld.ravel()
    _check_targets("burgers1d", targets)
    return Dataset("burgers1d", inputs, targets,
                   grid_for_benchmark("burgers1d", cfg.n_x, cfg.n_t),
                   config=_snapshot(cfg))


# ---------------------------------------------------------------------------
# Advection-diffusion


def advdiff_trajectory(u0: np.ndarray, c: float = 0.03, nu: float = 0.01,
                       t_final: float = _ADVDIFF_T, n_t: int = 100) -> np.ndarray:
    """Linear advection-diffusion, upwind direction fixed by sign(c)."""
    u = np.asarray(u0, dtype=float).copy()
    n_x = u.shape[0]
    dx = 1.0 / (n_x - 1)
    frame_dt = t_final / (n_t - 1)
    dt_max = 0.5 * dx * dx / nu
    if c != 0.0:
        dt_max = min(dt_max, dx / abs(c))
    n_sub = max(1, math.ceil(frame_dt / (0.9 * dt_max)))
    dt = frame_dt / n_sub

    field = np.empty((n_x, n_t))
    field[:, 0] = u
    for j in range(1, n_t):
        for _ in range(n_sub):
            mid = u[1:-1]
            grad = (mid - u[:-2]) / dx if c >= 0.0 else (u[2:] - mid) / dx
            diff = (u[2:] - 2.0 * mid + u[:-2]) / (dx * dx)
            u[1:-1] = mid + dt * (nu * diff - c * grad)
            u[0] = 0.0
            u[-1] = 0.0
        field[:, j] = u
    return field


def _advdiff_ic(rng, xs):
    # Quadratic bulk plus 1-3 Gaussian bumps, all masked by x(1-x) so the
    # walls are met exactly.
    mask = xs * (1.0 - xs)
    a = rng.uniform(0.0, 1.0)
    u0 = a * mask
    for _ in range(int(rng.integers(1, 4))):
        amp = rng.uniform(0.2, 1.0)
        mu = rng.uniform(0.2, 0.8)
        sig = rng.uniform(0.03, 0.12)
        u0 = u0 + amp * np.exp(-((xs - mu) ** 2) / (2.0 * sig * sig)) * mask
    return u0


def gen_advdiff(cfg: BenchmarkConfig) -> Dataset:
    xs = np.linspace(0.0, 1.0, cfg.n_x)
    inputs = np.empty((cfg.count, cfg.n_x))
    targets = np.empty((cfg.count, cfg.n_x * cfg.n_t))
    for i in range(cfg.count):
        rng = np.random.Generator(np.random.PCG64(cfg.seed ^ i))
        u0 = _advdiff_ic(rng, xs)
        fld = advdiff_trajectory(u0, cfg.c, cfg.nu, cfg.t_final, cfg.n_t)
        if not np.all(np.isfinite(fld)):
            raise GenerationError(f"advdiff1d: sample {i} went unstable")
        inputs[i] = u0
        targets[i] = fld.ravel()
    _check_targets("advdiff1d", targets)
    return Dataset("advdiff1d", inputs, targets,
                   grid_for_benchmark("advdiff1d", cfg.n_x, cfg.n_t),
                   config=_snapshot(cfg))


# ---------------------------------------------------------------------------
# Lorenz-96


def lorenz96_rhs(x: np.ndarray, forcing: float) -> np.ndarray:
    """dx_i/dt = (x_{i+1} - x_{i-2}) x_{i-1} - x_i + F on the last axis."""
    return ((np.roll(x, -1, axis=-1) - np.roll(x, 2, axis=-1))
            * np.roll(x, 1, axis=-1) - x + forcing)


def lorenz96_step(x: np.ndarray, dt: float, forcing: float) -> np.ndarray:
    """One classic RK4 step."""
    k1 = lorenz96_rhs(x, forcing)
    k2 = lorenz96_rhs(x + 0.5 * dt * k1, forcing)
    k3 = lorenz96_rhs(x + 0.5 * dt * k2, forcing)
    k4 = lorenz96_rhs(x + dt * k3, forcing)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def gen_lorenz96(cfg: BenchmarkConfig) -> Dataset:
    """Perturbed-equilibrium starts, transient discarded, window recorded.

    Branch input is the first kept snapshot; the target is the full
    (sites x snapshots) window. Snapshot spacing must be an integer
    multiple of the solver step.
    """
    n_sites, n_snap = cfg.n_x, cfg.n_t
    snap_dt = cfg.t_final / (n_snap - 1)
    stride = snap_dt / cfg.dt
    if abs(stride - round(stride)) > 1e-9 or round(stride) < 1:
        raise ConfigError("snapshot spacing must be an integer number of RK4 steps")
    stride = round(stride)
    transient_steps = round(cfg.transient / cfg.dt)

    x = np.empty((cfg.count, n_sites))
    for i in range(cfg.count):
        rng = np.random.Generator(np.random.PCG64(cfg.seed ^ i))
        x[i] = cfg.forcing + 1e-3 * rng.standard_normal(n_sites)
    for _ in range(transient_steps):
        x = lorenz96_step(x, cfg.dt, cfg.forcing)
    snaps = np.empty((cfg.count, n_snap, n_sites))
    snaps[:, 0] = x
    for j in range(1, n_snap):
        for _ in range(stride):
            x = lorenz96_step(x, cfg.dt, cfg.forcing)
        snaps[:, j] = x
    if not np.all(np.isfinite(snaps)):
        raise GenerationError("lorenz96: non-finite state during integration")

    inputs = snaps[:, 0].copy()
    targets = snaps.transpose(0, 2, 1).reshape(cfg.count, -1)
    _check_targets("lorenz96", targets)
    return Dataset("lorenz96", inputs, targets,
                   grid_for_benchmark("lorenz96", n_sites, n_snap),
                   config=_snapshot(cfg))


# ---------------------------------------------------------------------------
# Allen-Cahn


def allencahn_step(u: np.ndarray, dt: float, eps: float, dx: float) -> np.ndarray:
    """Explicit Euler step of u_t = eps u_xx - 5 u^3 + 5 u, periodic."""
    lap = (np.roll(u, -1, axis=-1) - 2.0 * u + np.roll(u, 1, axis=-1)) / (dx * dx)
    return u + dt * (eps * lap - 5.0 * u ** 3 + 5.0 * u)


def _allencahn_ic(rng, xs):
    # Even-power polynomial envelopes keep the profile periodic-friendly.
    u0 = np.zeros_like(xs)
    a = rng.uniform(0.0, 1.0, size=3)
    b = rng.uniform(0.0, 1.0, size=3)
    for k in range(1, 4):
        u0 += (a[k - 1] * np.cos(k * np.pi * xs) + b[k - 1] * np.sin(k * np.pi * xs)) \
            * xs ** (2 * k)
    return u0


def gen_allencahn(cfg: BenchmarkConfig) -> Dataset:
    """Random smooth initial profiles and their Allen-Cahn relaxation.

    Frames are the states after each recording interval, so t runs from
    t_final / n_t up to t_final inclusive; the branch input is the t = 0
    profile itself.
    """
    n_x, n_t = cfg.n_x, cfg.n_t
    dx = 2.0 / n_x
    steps_per_frame = (cfg.t_final / n_t) / cfg.dt
    if abs(steps_per_frame - round(steps_per_frame)) > 1e-9 or round(steps_per_frame) < 1:
        raise ConfigError("frame spacing must be an integer number of Euler steps")
    steps_per_frame = round(steps_per_frame)
    xs = -1.0 + dx * np.arange(n_x)

    u = np.empty((cfg.count, n_x))
    for i in range(cfg.count):
        rng = np.random.Generator(np.random.PCG64(cfg.seed ^ i))
        u[i] = _allencahn_ic(rng, xs)
    inputs = u.copy()
    frames = np.empty((cfg.count, n_t, n_x))
    for j in range(n_t):
        for _ in range(steps_per_frame):
            u = allencahn_step(u, cfg.dt, cfg.eps, dx)
        if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > TARGET_BOUNDS["allencahn"]:
            raise GenerationError("allencahn: solution blew up")
        frames[:, j] = u

    targets = frames.transpose(0, 2, 1).reshape(cfg.count, -1)
    return Dataset("allencahn", inputs, targets,
                   grid_for_benchmark("allencahn", n_x, n_t),
                   config=_snapshot(cfg))


# ---------------------------------------------------------------------------
# Dispatch


_GENERATORS = {
    "poisson2d": gen_poisson,
    "burgers1d": gen_burgers,
    "advdiff1d": gen_advdiff,
    "lorenz96": gen_lorenz96,
    "allencahn": gen_allencahn,
}


def _snapshot(cfg: BenchmarkConfig) -> dict:
    return {k: getattr(cfg, k) for k in (
        "benchmark", "count", "seed", "n_x", "n_t", "nu", "c", "forcing",
        "eps", "t_final", "alpha", "tau", "dt", "transient", "sensor_side")}


def gen_dataset(cfg: BenchmarkConfig) -> Dataset:
    """Generate one dataset split from its config."""
    return _GENERATORS[cfg.benchmark](cfg)


def gen_split(benchmark: str, seed: int = 0, paper_scale: bool = False,
              train: int | None = None, test: int | None = None, **overrides):
    """Generate (train, test) datasets with disjoint RNG streams."""
    n_train, n_test = default_counts(benchmark, paper_scale)
    if train is not None:
        n_train = train
    if test is not None:
        n_test = test
    train_ds = gen_dataset(benchmark_config(benchmark, n_train, seed,
                                            paper_scale, **overrides))
    test_ds = gen_dataset(benchmark_config(benchmark, n_test, seed ^ TEST_STREAM,
                                           paper_scale, **overrides))
    return train_ds, test_ds
