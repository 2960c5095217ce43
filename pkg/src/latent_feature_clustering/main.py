"""Main entry point for the latent feature clustering experiments"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from .config import ExperimentConfig, load_config, output_root
from .datasets import CHANNEL_CLASSES, SPLASH_CLASSES, DatasetCollector
from .errors import ConfigurationError, LatentClusteringError
from .harness import SEARCH_SPACE, coefficient_grid, grid_search, load_latents, run_experiment
from .losses import AUX_MODES, LossReport
from .metrics import evaluate_projection
from .projection import ProjectionConfig, export_embedding_csv, load_embedding_csv, project
from .reporting import loss_curves_frame, plot_loss_curves, plot_projection, write_projection_html

# Configure logging
logger = logging.getLogger(__name__)

LOG_FILE = "latent_feature_clustering.log"
GENERATED_CLASSES = {"channels": CHANNEL_CLASSES, "splash": SPLASH_CLASSES}


def setup_logging(root: Path, debug: bool = False) -> None:
    """Root logger writes to <output root>/logs and to stderr; stdout carries only the JSON summary"""
    log_dir = root / "logs"
    log_dir.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_dir / LOG_FILE),
            logging.StreamHandler(sys.stderr)
        ]
    )
    if debug:
        logging.getLogger().setLevel(logging.DEBUG)
        logger.debug('Debug mode enabled')


def parse_assignment(text: str):
    """``key=value`` with the value read as JSON when it parses, else kept as text"""
    if "=" not in text:
        raise ConfigurationError(f"expected KEY=VALUE, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def experiment_config(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    overrides = dict(parse_assignment(item) for item in args.set or [])
    if overrides:
        config = config.with_overrides(overrides)
    if args.name:
        config.name = args.name
    if args.output_dir:
        config.output_dir = args.output_dir
    return config


def cmd_generate_data(args) -> Dict[str, Any]:
    params = {"n_samples": args.n_samples, "seed": args.seed}
    image_set = DatasetCollector().collect_from_source(args.dataset, params)
    directory = Path(args.out) if args.out else output_root() / "data"
    images_path, labels_path = DatasetCollector().save_data(image_set, directory, args.prefix or args.dataset)
    logger.info(f"Wrote {len(image_set)} images to {images_path}")
    return {
        "images": str(images_path),
        "labels": str(labels_path),
        "n": len(image_set),
        "class_counts": image_set.class_counts().tolist(),
    }


def cmd_train(args) -> Dict[str, Any]:
    result = run_experiment(experiment_config(args))
    return {
        "run": result.config["name"],
        "silhouette": result.silhouette,
        "epochs": result.epochs,
        "output_dir": result.output_dir,
        "checkpoint": result.checkpoint_path,
    }


def build_grid(args) -> Dict[str, List[Any]]:
    grid: Dict[str, List[Any]] = {}
    if args.grid:
        with open(args.grid, "r", encoding="utf-8") as f:
            loaded = json.load(f)
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"{args.grid} must hold a mapping of key to value list")
        grid.update({k: v if isinstance(v, list) else [v] for k, v in loaded.items()})
    for key in args.sweep or []:
        if key not in SEARCH_SPACE:
            raise ConfigurationError(f"unknown sweep {key!r}; choose from {sorted(SEARCH_SPACE)}")
        grid[key] = list(SEARCH_SPACE[key])
    if args.coefficients:
        grid.update(coefficient_grid(args.coefficients))
    if args.aux:
        grid["aux"] = list(args.aux)
    if not grid:
        raise ConfigurationError("empty grid; pass --grid, --sweep, --coefficients or --aux")
    return grid


def cmd_grid_search(args) -> Dict[str, Any]:
    grid = build_grid(args)
    result = grid_search(experiment_config(args), grid, workers=args.workers)
    return {
        "runs": len(result.runs),
        "summary": str(result.summary_path),
        "silhouettes": [run.silhouette for run in result.runs],
    }


def cmd_project(args) -> Dict[str, Any]:
    z, labels = load_latents(args.latents)
    config = ProjectionConfig(
        n_neighbors=args.n_neighbors,
        min_dist=args.min_dist,
        epochs=args.epochs,
        seed=args.seed,
    )
    embedding = project(z, labels, config)
    out = Path(args.out) if args.out else Path(args.latents).with_name("embedding.csv")
    export_embedding_csv(embedding, out)
    plot_projection(embedding, out.with_suffix(".svg"))
    report = evaluate_projection(embedding)
    return {"embedding": str(out), "silhouette": report.silhouette}


def cmd_evaluate(args) -> Dict[str, Any]:
    report = evaluate_projection(load_embedding_csv(args.embedding))
    payload = report.to_dict()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
    return payload


def _class_names(config: Dict[str, Any]) -> Optional[List[str]]:
    dataset = config.get("dataset", {})
    return dataset.get("class_names") or GENERATED_CLASSES.get(dataset.get("name"))


def cmd_plot(args) -> Dict[str, Any]:
    run_dir = Path(args.run_dir)
    result_path = run_dir / "result.json"
    if not result_path.exists():
        raise ConfigurationError(f"{run_dir} holds no result.json")
    with open(result_path, "r", encoding="utf-8") as f:
        stored = json.load(f)
    written = []
    train = [LossReport(**r) for r in stored["train_history"]]
    val = [LossReport(**r) for r in stored["val_history"]]
    written.append(plot_loss_curves(loss_curves_frame(train, val), run_dir / "loss_curves.svg"))
    embedding_path = run_dir / "embedding.csv"
    if embedding_path.exists():
        embedding = load_embedding_csv(embedding_path, class_names=_class_names(stored["config"]))
        title = f"silhouette {stored['silhouette']:.3f}"
        written.append(plot_projection(embedding, run_dir / "projection.svg", title))
        html = write_projection_html(embedding, run_dir / "projection.html", title)
        if html is not None:
            written.append(html)
    return {"written": [str(p) for p in written]}


COMMANDS: Dict[str, Callable[[argparse.Namespace], Dict[str, Any]]] = {
    "generate-data": cmd_generate_data,
    "train": cmd_train,
    "grid-search": cmd_grid_search,
    "project": cmd_project,
    "evaluate": cmd_evaluate,
    "plot": cmd_plot,
}


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', type=str, help='JSON experiment configuration')
    parser.add_argument('--set', action='append', metavar='KEY=VALUE',
                        help='Override a configuration key (dotted path or short alias)')
    parser.add_argument('--name', type=str, help='Run name')
    parser.add_argument('--output-dir', type=str, help='Run directory (default <output root>/<name>)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='lfc', description='Latent feature clustering experiments')
    parser.add_argument('--debug', action='store_true', help='Enable debug logging')
    parser.add_argument('--output-root', type=str, help='Output root (overrides LFC_OUTPUT_ROOT)')
    sub = parser.add_subparsers(dest='command', required=True)

    generate = sub.add_parser('generate-data', help='Write a synthetic ensemble as an IDX pair')
    generate.add_argument('--dataset', choices=sorted(GENERATED_CLASSES), default='channels')
    generate.add_argument('--n-samples', type=int, default=3000)
    generate.add_argument('--seed', type=int, default=0)
    generate.add_argument('--out', type=str, help='Target directory (default <output root>/data)')
    generate.add_argument('--prefix', type=str, help='File name prefix (default dataset name)')

    train = sub.add_parser('train', help='Run one experiment end to end')
    _add_config_arguments(train)

    grid = sub.add_parser('grid-search', help='Run one experiment per grid point')
    _add_config_arguments(grid)
    grid.add_argument('--grid', type=str, help='JSON mapping of key to value list')
    grid.add_argument('--sweep', action='append', metavar='KEY',
                      help=f'Add a predefined value set, one of {sorted(SEARCH_SPACE)}')
    grid.add_argument('--coefficients', choices=['clustering', 'contrastive'],
                      help='Sweep the auxiliary coefficient of this loss')
    grid.add_argument('--aux', action='append', choices=list(AUX_MODES),
                      help='Auxiliary modes compared in the summary table')
    grid.add_argument('--workers', type=int, default=1)

    proj = sub.add_parser('project', help='Project stored latent vectors to 2-D')
    defaults = ProjectionConfig()
    proj.add_argument('--latents', type=str, required=True, help='latents.npz written by a run')
    proj.add_argument('--out', type=str, help='Embedding CSV (default next to the latents)')
    proj.add_argument('--n-neighbors', type=int, default=defaults.n_neighbors)
    proj.add_argument('--min-dist', type=float, default=defaults.min_dist)
    proj.add_argument('--epochs', type=int, default=defaults.epochs)
    proj.add_argument('--seed', type=int, default=defaults.seed)

    evaluate = sub.add_parser('evaluate', help='Silhouette score of an embedding CSV')
    evaluate.add_argument('--embedding', type=str, required=True)
    evaluate.add_argument('--out', type=str, help='Also write the report as JSON')

    plot = sub.add_parser('plot', help='Re-render the figures of a finished run')
    plot.add_argument('--run-dir', type=str, required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.output_root:
        os.environ["LFC_OUTPUT_ROOT"] = args.output_root
    setup_logging(output_root(), args.debug)
    logger.info(f"Running {args.command}")

    try:
        payload = COMMANDS[args.command](args)
    except LatentClusteringError as e:
        logger.error(f"{args.command} failed: {str(e)}")
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return 2
    except Exception as e:
        logger.error(f"Unexpected failure in {args.command}: {str(e)}", exc_info=True)
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 1
    print(json.dumps(payload, default=str))
    return 0


def run():
    """Console script entry point"""
    sys.exit(main())


if __name__ == '__main__':
    run()
