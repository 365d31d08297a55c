"""Operator-learning laboratory.

Spectral-embedded branch-trunk operator networks (Chebyshev and Fourier
trunk dictionaries plus the plain-coordinate baseline), five PDE/ODE
benchmark generators, a from-scratch float64 network engine, evaluation
diagnostics, and binary dataset/checkpoint formats behind one CLI.
"""

from .datagen import (BenchmarkConfig, Dataset, GrfSpec, benchmark_config,
                      default_counts, gen_dataset, gen_split,
                      grid_for_benchmark, sample_grf_2d, solve_poisson_2d)
from .dataio import (load_checkpoint, load_dataset, save_checkpoint,
                     save_dataset)
from .diagnostics import (EvalReport, GramReport, SpectrumReport,
                          error_map, gram_diagnostic, power_spectrum_1d,
                          power_spectrum_2d, relative_l2, superset_demo)
from .embeddings import (Coordinate, SpectralDictionary, affine_to_reference,
                         cheb_eval_all, cheb_tensor_features, crop_pad,
                         embed, embed_points, fourier_features)
from .errors import (ConfigError, DegenerateReference, DivergenceError,
                     DomainError, FormatError, GenerationError, SedonetError,
                     ShapeError, SolverError)
from .model import (OperatorModel, QueryGrid, branch_eval,
                    make_operator_model, operator_loss, predict_field,
                    synthesize, trunk_eval)
from .nn import (AdamState, GradientTape, Mlp, adam_step, mlp_backward,
                 mlp_forward, mlp_init, mse_loss)
from .pipeline import Checkpoint, RunConfig, default_run_config, evaluate, train

__version__ = "0.1.0"
