"""Command-line driver: run, export-features, analyze, split."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .experiment import (ExperimentConfig, export_features,
                         projection_for_config, run_experiment,
                         write_projection_csv)
from .graph import load_edge_list
from .model import TrainConfig
from .splits import save_split, split_links

logger = logging.getLogger(__name__)

LABELING_FLAGS = {"drnl": "drnl", "degdrnl": "degree_drnl"}


def default_max_hop(dataset_path: str) -> int:
    """Protocol default: 3 hops everywhere, 7 for the power-grid graph."""
    return 7 if "power" in Path(dataset_path).stem.lower() else 3


def guard_max_hop(dataset_path: str, max_dim: int, max_hop: int) -> int:
    """Memory guard: the E.coli graph at dim 1 is capped to 2 hops."""
    stem = Path(dataset_path).stem.lower().replace(".", "").replace("_", "")
    if max_dim == 1 and "ecoli" in stem and max_hop > 2:
        logger.warning("capping max hop to 2 for %s with one-dimensional homology",
                       dataset_path)
        return 2
    return max_hop


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` text file; '#' starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


_INT_KEYS = {"max_hop", "dim", "pi_res", "batch_size", "epochs", "patience",
             "workers"}
_FLOAT_KEYS = {"lr"}
_BOOL_KEYS = {"pretrain_angles"}


def build_experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    file_values = read_config_file(args.config) if args.config else {}

    def pick(name, flag_value, cast=str):
        if flag_value is not None:
            return flag_value
        if name in file_values:
            raw = file_values[name]
            if name == "seeds":
                return tuple(int(s) for s in raw.replace(",", " ").split())
            if name == "ratios":
                return tuple(float(s) for s in raw.replace(",", " ").split())
            if name in _INT_KEYS:
                return int(raw)
            if name in _FLOAT_KEYS:
                return float(raw)
            if name in _BOOL_KEYS:
                return raw.lower() in ("1", "true", "yes")
            return cast(raw)
        return None

    dataset = pick("dataset", args.dataset)
    if dataset is None:
        raise SystemExit("a dataset is required (--dataset or config file)")
    max_dim = pick("dim", args.dim)
    max_dim = 0 if max_dim is None else max_dim
    max_hop = pick("max_hop", args.max_hop)
    if max_hop is None:
        max_hop = default_max_hop(dataset)
    max_hop = guard_max_hop(dataset, max_dim, max_hop)
    labeling_flag = pick("labeling", args.labeling) or "degdrnl"
    if labeling_flag not in LABELING_FLAGS:
        raise SystemExit(f"--labeling must be one of {sorted(LABELING_FLAGS)}")
    seeds = pick("seeds", tuple(args.seeds) if args.seeds else None)

    train = TrainConfig(
        learning_rate=pick("lr", None) or 1e-3,
        batch_size=pick("batch_size", None) or 64,
        max_epochs=pick("epochs", None) or 200,
        patience=pick("patience", None) or 20,
        pretrain_angles=bool(pick("pretrain_angles", None)),
    )
    return ExperimentConfig(
        dataset=dataset,
        ratios=pick("ratios", None) or (0.85, 0.05, 0.10),
        seeds=seeds if seeds is not None else tuple(range(10)),
        max_hop=max_hop,
        max_dim=max_dim,
        labeling=LABELING_FLAGS[labeling_flag],
        centers=pick("centers", args.centers) or "target",
        resolution=pick("pi_res", args.pi_res) or 7,
        pi_weight=pick("pi_weight", None) or "log1p",
        train=train,
        out_dir=pick("out", args.out),
        workers=pick("workers", args.workers) or 1,
    )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", help="edge-list file (u v per line)")
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--seeds", type=int, nargs="+", metavar="SEED",
                        help="run seeds (default 0..9)")
    parser.add_argument("--max-hop", dest="max_hop", type=int,
                        help="largest hop count in the angle menu")
    parser.add_argument("--dim", type=int, choices=(0, 1),
                        help="max homology dimension (default 0)")
    parser.add_argument("--labeling", choices=sorted(LABELING_FLAGS),
                        help="node labeling scheme (default degdrnl)")
    parser.add_argument("--centers", choices=("target", "random"),
                        help="labeling center policy (default target)")
    parser.add_argument("--pi-res", dest="pi_res", type=int,
                        help="persistence image resolution (default 7)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--workers", type=int,
                        help="extraction worker processes (default 1)")


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = argparse.ArgumentParser(
        prog="topolink",
        description="Link prediction from persistent homology of enclosing subgraphs")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
            ("run", "run the benchmark protocol and report AUC"),
            ("export-features", "write per-link per-angle feature vectors"),
            ("analyze", "project features to (h(with), h(without)) pairs"),
            ("split", "persist a seeded train/val/test link split")]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "analyze":
            p.add_argument("--part", choices=("train", "val", "test"),
                           default="test", help="which split to project")
    args = parser.parse_args(argv)

    cfg = build_experiment_config(args)
    out_dir = Path(cfg.out_dir) if cfg.out_dir else Path(".")

    if args.command == "run":
        if cfg.out_dir is None:
            cfg.out_dir = str(out_dir)
        report = run_experiment(cfg)
        print((Path(cfg.out_dir) / "summary.txt").read_text(encoding="utf-8"))
        return 0 if report.completed() else 1

    if args.command == "export-features":
        path = export_features(cfg, out_dir / "features.csv")
        print(f"wrote {path}")
        return 0

    if args.command == "analyze":
        rows = projection_for_config(cfg, part=args.part)
        path = write_projection_csv(rows, out_dir / "projection.csv")
        print(f"wrote {path}")
        return 0

    if args.command == "split":
        graph = load_edge_list(cfg.dataset)
        for seed in cfg.seeds:
            split = split_links(graph, cfg.ratios, seed)
            save_split(split, out_dir / f"split_seed{seed}")
        print(f"wrote {len(cfg.seeds)} split(s) under {out_dir}")
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
