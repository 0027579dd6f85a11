"""Command-line harness: train, sweep, gradcheck, plot.

Dataset files are looked up under ``$DIFNET_DATA_DIR`` (default ``./data``)
as ``<root>/<name>/<name>.content`` and ``<root>/<name>/<name>.cites``.

Exit codes: 0 success, 1 validation/usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from . import gradcheck as gradcheck_mod
from . import training
from .data import ParseError, SplitError, load_citation_dataset, standard_split
from .model import save_checkpoint
from .tensor import ContractError, ShapeError

DATA_ENV_VAR = "DIFNET_DATA_DIR"

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; our contract reserves 2 for runtime
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"error: {message}")


def _dataset_paths(name: str) -> tuple[Path, Path]:
    root = Path(os.environ.get(DATA_ENV_VAR, "data"))
    content = root / name / f"{name}.content"
    cites = root / name / f"{name}.cites"
    if not content.is_file() or not cites.is_file():
        raise FileNotFoundError(
            f"dataset {name!r} not found: expected {content} and {cites} "
            f"(set ${DATA_ENV_VAR} to the dataset root)")
    return content, cites


def _load(name: str):
    content, cites = _dataset_paths(name)
    g = load_citation_dataset(content, cites)
    return g, standard_split(g)


def _train_config(args) -> training.TrainConfig:
    return training.TrainConfig(
        dataset=args.dataset,
        model=args.model,
        depth=args.depth,
        gdu_variant=args.gdu,
        residual=args.residual.replace("-", "_"),
        learning_rate=args.lr,
        max_epochs=args.epochs,
        weight_decay=args.weight_decay,
        dropout=args.dropout,
        hidden=args.hidden,
        seed=args.seed,
    )


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", default="cora")
    p.add_argument("--model", choices=["difnet", "gcn"], default="difnet")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--gdu", choices=["full", "simplified"], default="full")
    p.add_argument("--residual",
                   choices=["naive", "raw", "graph-naive", "graph-raw"],
                   default="graph-raw")
    p.add_argument("--lr", type=float, default=None,
                   help="learning rate (default 0.01, 0.005 on pubmed)")
    p.add_argument("--epochs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--weight-decay", type=float, default=5e-4)
    p.add_argument("--dropout", type=float, default=0.5)
    p.add_argument("--hidden", type=int, default=16)


def _build_parser() -> _Parser:
    parser = _Parser(prog="difnet")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train one model, write metrics CSV")
    _add_train_flags(p_train)
    p_train.add_argument("--out", default="metrics.csv", help="metrics CSV path")
    p_train.add_argument("--checkpoint", default=None,
                         help="checkpoint path (default: metrics path with .npz)")

    p_sweep = sub.add_parser("sweep", help="train one model per depth")
    _add_train_flags(p_sweep)
    p_sweep.add_argument("--depths", required=True,
                         help="comma-separated depth list, e.g. 2,10,20")
    p_sweep.add_argument("--out", default="sweep.csv", help="sweep CSV path")

    p_gc = sub.add_parser("gradcheck",
                          help="finite-difference gradient suite on a toy graph")
    p_gc.add_argument("--tolerance", type=float, default=gradcheck_mod.TOLERANCE)

    p_plot = sub.add_parser("plot", help="render a metrics or sweep CSV to SVG")
    p_plot.add_argument("--input", required=True)
    p_plot.add_argument("--out", required=True)

    return parser


def _cmd_train(args) -> int:
    cfg = _train_config(args)
    g, split = _load(args.dataset)
    report, model = training.train(cfg, g, split)
    training.write_metrics(args.out, report)
    ckpt = args.checkpoint or str(Path(args.out).with_suffix(".npz"))
    save_checkpoint(ckpt, model.state(), meta={"model": cfg.model, "depth": cfg.depth,
                                               "dataset": cfg.dataset, "seed": cfg.seed})
    print(f"best val epoch {report.best_val_epoch}, "
          f"test accuracy {report.test_acc_at_best_val:.4f}, "
          f"{report.wall_clock_seconds:.1f}s")
    return 0


def _cmd_sweep(args) -> int:
    try:
        depths = [int(d) for d in args.depths.split(",") if d.strip()]
    except ValueError:
        raise SystemExit(f"error: invalid --depths {args.depths!r}")
    if not depths:
        raise SystemExit("error: --depths is empty")
    cfg = _train_config(args)
    g, split = _load(args.dataset)
    rows = training.depth_sweep(cfg, depths, g, split)
    training.write_sweep(args.out, rows)
    for model, depth, acc, seconds in rows:
        print(f"{model} depth={depth} accuracy={acc:.4f} ({seconds:.1f}s)")
    return 0


def _cmd_gradcheck(args) -> int:
    results = gradcheck_mod.run_suite()
    worst = max(err for _, err in results)
    for name, err in results:
        print(f"{name}: max relative error {err:.3e}")
    print(f"overall max relative error {worst:.3e}")
    return 0 if worst <= args.tolerance else 1


def _cmd_plot(args) -> int:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with open(args.input, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        rows = list(reader)
    fig, ax = plt.subplots(figsize=(6, 4))
    if header == training.METRICS_HEADER:
        epochs = [int(r[0]) for r in rows]
        for column, label in ((2, "train"), (3, "validation"), (4, "test")):
            ax.plot(epochs, [float(r[column]) for r in rows], label=label)
        ax.set_xlabel("epoch")
    elif header == training.SWEEP_HEADER:
        models = sorted({r[0] for r in rows})
        for model in models:
            pts = sorted((int(r[1]), float(r[2])) for r in rows if r[0] == model)
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=model)
        ax.set_xlabel("depth")
    else:
        raise SystemExit(f"error: unrecognized CSV header in {args.input}")
    ax.set_ylabel("accuracy")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, format="svg")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"train": _cmd_train, "sweep": _cmd_sweep,
                   "gradcheck": _cmd_gradcheck, "plot": _cmd_plot}[args.command]
        return handler(args)
    except SystemExit as exc:
        if exc.code in (0, None):
            return 0
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        return exc.code if isinstance(exc.code, int) else 1
    except (FileNotFoundError, ParseError, SplitError, ShapeError,
            ContractError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FloatingPointError, RuntimeError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
