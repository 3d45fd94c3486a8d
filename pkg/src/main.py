import argparse
import logging
import sys
from typing import List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from src.config import settings
from src.exceptions import DiagnosisError
from src.models import ExplorationBudget, GaConfig
from src.services.model_service import load_manifest
from src.services.pipeline_service import DiagnosisPipeline, format_metrics_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2

# Commands whose result depends on a seed; an omitted seed is drawn and printed.
SEEDED_COMMANDS = {"generate", "split", "learn", "reduce"}


def _names(value: str) -> List[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level (default: %(default)s)")
    common.add_argument("--jobs", type=int, default=settings.JOBS, help="Worker threads (default: %(default)s)")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=None, help="RNG seed; drawn and printed when omitted")

    parser = argparse.ArgumentParser(
        prog="rootcause",
        description="Learn Bayesian networks from diagnosis data and extract label-specific root cause models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common, seeded], help="Simulate a synthetic diagnosis dataset")
    p.add_argument("--spec", default=None, help="GeneratorSpec JSON file (default: builtin medical spec)")
    p.add_argument("--patients", type=int, default=None, help="Rows per pathology of the builtin spec")
    p.add_argument("--out", required=True)

    p = sub.add_parser("split", parents=[common, seeded], help="Stratified train/test split of a CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--test-fraction", type=float, default=settings.TEST_FRACTION)
    p.add_argument("--boolean", type=_names, default=settings.BOOLEAN_COLUMNS,
                   help="Comma-separated columns read as true/false (default: BOOLEAN_COLUMNS)")
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)

    p = sub.add_parser("learn", parents=[common, seeded], help="Learn the global network")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", type=_names, required=True, help="Comma-separated label columns")
    p.add_argument("--ignore", type=_names, default=[], help="Comma-separated columns left out of the network")
    p.add_argument("--boolean", type=_names, default=settings.BOOLEAN_COLUMNS,
                   help="Comma-separated columns read as true/false (default: BOOLEAN_COLUMNS)")
    p.add_argument("--bins", type=int, default=settings.N_BINS)
    p.add_argument("--max-parents", type=int, default=settings.MAX_PARENT_SET_SIZE)
    p.add_argument("--max-candidates", type=int, default=settings.MAX_CANDIDATES_PER_NODE)
    p.add_argument("--max-expansions", type=int, default=settings.MAX_EXPANSIONS_PER_NODE)
    p.add_argument("--out", required=True)

    p = sub.add_parser("add-label", parents=[common], help="Add a label node to a learned global network")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--seed", type=int, default=None, help="Selection seed (default: the model's)")
    p.add_argument("--boolean", type=_names, default=settings.BOOLEAN_COLUMNS,
                   help="Comma-separated columns read as true/false (default: BOOLEAN_COLUMNS)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("reduce", parents=[common, seeded], help="Extract the root cause network of a label")
    p.add_argument("--model", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--data", default=None, help="Training CSV (default: the one recorded in the model)")
    p.add_argument("--K", type=int, default=settings.GA_K)
    p.add_argument("--max-gen", type=int, default=settings.GA_MAX_GEN)
    p.add_argument("--patience", type=int, default=settings.GA_PATIENCE)
    p.add_argument("--plateau", type=float, default=settings.GA_PLATEAU)
    p.add_argument("--tau", type=int, default=settings.GA_TAU)
    p.add_argument("--C", type=float, default=settings.GA_C)
    p.add_argument("--mutation-rate", type=float, default=settings.GA_MUTATION_RATE)
    p.add_argument("--offspring", type=int, default=None)
    p.add_argument("--exhaustive", action="store_true", help="Score every ancestor subset instead of breeding")
    p.add_argument("--alpha", type=float, default=settings.CPT_ALPHA)
    p.add_argument("--out", required=True)

    for name, help_text in (("eval", "Evaluate a reduced network on test data"),
                            ("baseline", "Compare a reduced network with decision trees")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--model", required=True)
        p.add_argument("--threshold", type=float, default=settings.DECISION_THRESHOLD)
        p.add_argument("--hide", type=_names, default=[], help="Comma-separated variables left unobserved")
        if name == "eval":
            p.add_argument("--data", required=True)
            p.add_argument("--out", default=None, help="Write the evaluation report as JSON")
        else:
            p.add_argument("--train", required=True)
            p.add_argument("--test", required=True)
            p.add_argument("--max-depth", type=int, default=settings.TREE_MAX_DEPTH)

    p = sub.add_parser("export-dot", parents=[common], help="Render a global or reduced network as DOT")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("replay", parents=[common], help="Re-run a stage from its manifest")
    p.add_argument("manifest")
    return parser


def _draw_seed() -> int:
    return int(np.random.SeedSequence().entropy % (2 ** 31))


def run(args: argparse.Namespace, argv: List[str]) -> int:
    if args.command == "replay":
        manifest = load_manifest(args.manifest)
        logger.info(f"Replaying '{manifest.command}' from {args.manifest}")
        return main(manifest.argv)

    pipeline = DiagnosisPipeline(argv=argv, jobs=args.jobs)

    if args.command == "generate":
        pipeline.generate(args.out, args.spec, args.patients, args.seed)
    elif args.command == "split":
        pipeline.split(args.data, args.label, args.train_out, args.test_out, args.test_fraction, args.seed,
                       args.boolean)
    elif args.command == "learn":
        budget = ExplorationBudget(
            max_parent_set_size=args.max_parents,
            max_candidates_per_node=args.max_candidates,
            max_expansions_per_node=args.max_expansions,
        )
        model = pipeline.learn(args.data, args.labels, args.out, budget, args.bins, args.seed, args.ignore,
                               args.boolean)
        print(f"Learned {len(model.dag.nodes)} nodes, {len(model.dag.edges())} edges -> {args.out}")
    elif args.command == "add-label":
        model = pipeline.add_label(args.model, args.data, args.label, args.out, args.seed, args.boolean)
        print(f"Added '{args.label}': {len(model.dag.nodes)} nodes, {len(model.dag.edges())} edges -> {args.out}")
    elif args.command == "reduce":
        cfg = GaConfig(
            K=args.K, max_gen=args.max_gen, patience=args.patience, plateau=args.plateau, tau=args.tau,
            C=args.C, mutation_rate=args.mutation_rate, offspring=args.offspring,
            max_initial_parents=settings.GA_MAX_INITIAL_PARENTS, exhaustive=args.exhaustive, seed=args.seed,
        )
        stored = pipeline.reduce(args.model, args.label, args.out, cfg, args.alpha, args.data)
        features = [stored.names[n] for n in stored.reduced.features]
        print(f"Reduced '{args.label}' to {len(features)} features (fitness {stored.reduced.fitness:.6f}): "
              f"{', '.join(features) or '-'}")
    elif args.command == "eval":
        report = pipeline.evaluate(args.model, args.data, args.threshold, args.hide, args.out)
        print(format_metrics_table([report]))
        for name, accuracy in report.hidden_accuracy.items():
            print(f"hidden {name}: accuracy {accuracy:.3f}")
    elif args.command == "baseline":
        reports = pipeline.baseline(args.model, args.train, args.test, args.threshold, args.hide, args.max_depth)
        print(format_metrics_table(reports))
    elif args.command == "export-dot":
        pipeline.export_dot(args.model, args.out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    CLI entry point.

    Returns:
        0 on success, 2 for invalid input or configuration, 1 for internal errors.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        settings.validate()
        if args.jobs < 1:
            raise ValueError("--jobs must be at least 1")
        if args.command in SEEDED_COMMANDS and args.seed is None \
                and not (args.command == "generate" and args.spec):
            args.seed = _draw_seed()
            argv = argv + ["--seed", str(args.seed)]
            logger.warning(f"No --seed given; drew seed {args.seed}")
            print(f"seed: {args.seed}")
        return run(args, argv)
    except (DiagnosisError, ValidationError) as e:
        logger.error(f"{e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as e:
        logger.error(f"Invalid configuration or file: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        logger.exception(f"Internal error: {e}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
