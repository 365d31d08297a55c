"""Command-line pipeline: sedonet gen-data | train | eval | spectrum | diagnose.

Exit codes: 0 success, 1 usage error, 2 runtime failure (bad files,
diverged training, solver trouble). The SEDONET_SEED environment variable
overrides the default seed wherever one is not given explicitly.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import dataio, diagnostics, pipeline
from .datagen import BENCHMARKS, benchmark_config, default_counts, gen_dataset, TEST_STREAM
from .embeddings import KINDS, SpectralDictionary
from .errors import SedonetError
from .model import predict_field


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the contract wants 1.
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="sedonet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a train/test dataset pair")
    p.add_argument("--benchmark", required=True, choices=BENCHMARKS)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--paper-scale", action="store_true",
                   help="paper-native sizes instead of desk scale")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--train", type=int, default=None, help="override train count")
    p.add_argument("--test", type=int, default=None, help="override test count")

    p = sub.add_parser("train", help="train a model from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="checkpoint path")

    p = sub.add_parser("eval", help="per-sample relative l2 errors as CSV")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="CSV path")

    p = sub.add_parser("spectrum", help="reference vs predicted power spectrum")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--sample", type=int, required=True)
    p.add_argument("--out", required=True, help="CSV path")
    p.add_argument("--time-index", type=int, default=-1,
                   help="snapshot index for 1-D benchmarks (default: last)")

    diag = sub.add_parser("diagnose", help="embedding diagnostics")
    dsub = diag.add_subparsers(dest="diagnostic", required=True)

    p = dsub.add_parser("gram", help="Gram conditioning of an embedding")
    p.add_argument("--kind", default="chebyshev", choices=KINDS)
    p.add_argument("--kx", type=int, default=8)
    p.add_argument("--kt", type=int, default=8)
    p.add_argument("--dtrunk", type=int, default=64)
    p.add_argument("--sampling", default="chebgauss", choices=diagnostics.SAMPLINGS)
    p.add_argument("--q", type=int, default=64)
    p.add_argument("--one-dim", action="store_true")
    p.add_argument("--out", required=True, help="CSV path")

    p = dsub.add_parser("superset", help="dictionary vs coordinate-MLP fit")
    p.add_argument("--degree", type=int, default=12)
    p.add_argument("--budget", type=int, default=5000)
    p.add_argument("--out", required=True, help="CSV path")

    return parser


def _seed_or_default(seed):
    return pipeline.default_seed() if seed is None else seed


def _cmd_gen_data(args) -> int:
    seed = _seed_or_default(args.seed)
    n_train, n_test = default_counts(args.benchmark, args.paper_scale)
    if args.train is not None:
        n_train = args.train
    if args.test is not None:
        n_test = args.test
    os.makedirs(args.out, exist_ok=True)
    for role, count, role_seed in (("train", n_train, seed),
                                   ("test", n_test, seed ^ TEST_STREAM)):
        cfg = benchmark_config(args.benchmark, count, role_seed, args.paper_scale)
        path = os.path.join(args.out, f"{args.benchmark}_{role}.sedods")
        dataio.save_dataset(gen_dataset(cfg), path)
        print(f"wrote {path} ({count} samples)")
    return 0


def _cmd_train(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = pipeline.RunConfig.from_json(fh.read())
    data = dataio.load_dataset(args.data)
    ckpt = pipeline.train(cfg, data)
    dataio.save_checkpoint(ckpt, args.out)
    final = ckpt.loss_history[-1] if len(ckpt.loss_history) else float("nan")
    print(f"wrote {args.out} (final epoch loss {final:.6g})")
    return 0


def _cmd_eval(args) -> int:
    ckpt = dataio.load_checkpoint(args.ckpt)
    data = dataio.load_dataset(args.data)
    report = pipeline.evaluate(ckpt, data)
    pipeline.write_eval_csv(report, args.out)
    print(f"rel_l2 mean {report.mean:.6g} std {report.std:.6g} "
          f"over {len(report.rel_l2)} samples -> {args.out}")
    return 0


def _cmd_spectrum(args) -> int:
    ckpt = dataio.load_checkpoint(args.ckpt)
    data = dataio.load_dataset(args.data)
    if not 0 <= args.sample < data.n_samples:
        raise SedonetError(f"sample index {args.sample} out of range "
                           f"[0, {data.n_samples})")
    model = ckpt.to_model()
    grid = data.grid
    ref = data.targets[args.sample].reshape(grid.n_x, grid.n_t)
    pred = predict_field(model, data.inputs[args.sample], grid)
    if data.benchmark == "poisson2d":
        report = diagnostics.spectrum_report_2d(ref, pred)
    else:
        report = diagnostics.spectrum_report_1d(ref, pred, args.time_index)
    pipeline.write_spectrum_csv(report.k, report.e_ref, report.e_pred, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_diagnose(args) -> int:
    if args.diagnostic == "gram":
        d = SpectralDictionary(args.kind, args.kx, args.kt, args.dtrunk)
        report = diagnostics.gram_diagnostic(d, args.sampling, args.q,
                                             one_dim=args.one_dim)
        pipeline.write_gram_csv(report, args.out)
        print(f"condition number {report.condition_number:.6g} -> {args.out}")
    else:
        result = diagnostics.superset_demo(args.degree, budget=args.budget)
        pipeline.write_superset_csv(result, args.out)
        print(f"cheb {result['cheb_linear_mse']:.3g} vs mlp "
              f"{result['vanilla_mlp_mse']:.3g} -> {args.out}")
    return 0


_COMMANDS = {
    "gen-data": _cmd_gen_data,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "spectrum": _cmd_spectrum,
    "diagnose": _cmd_diagnose,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (SedonetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
