import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.config import settings
from src.core.dataset import (
    Dataset, RawTable, apply_schema, discretize, load_csv, stratified_split, write_csv,
)
from src.core.infoscore import ScoreCache
from src.core.rootcause import extract_root_cause
from src.core.structure import explore_candidates, learn_structure, select_parents
from src.exceptions import DataValidationError
from src.inference import (
    evaluate, evaluate_tree, fit_constrained_tree, fit_cpts, fit_decision_tree, hidden_accuracy,
)
from src.models import EvaluationReport, ExplorationBudget, GaConfig, RunManifest
from src.services.export_service import DotExporter
from src.services.model_service import (
    GlobalModel, StoredReducedModel, file_sha256, load_any_model, load_global_model,
    load_reduced_model, save_global_model, save_reduced_model, write_manifest,
)
from src.services.synthgen import GeneratedDataset, generate, load_spec
from src.templates import templates

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_metrics_table(reports: Sequence[EvaluationReport]) -> str:
    """Aligned plain-text table, one row per evaluated classifier"""
    headers = ["model", "features", "precision", "sensitivity", "specificity", "F1", "tp", "fp", "tn", "fn"]
    rows = [
        [
            r.model, str(len(r.features)),
            f"{r.metrics.precision:.3f}", f"{r.metrics.sensitivity:.3f}",
            f"{r.metrics.specificity:.3f}", f"{r.metrics.f1:.3f}",
            str(r.metrics.tp), str(r.metrics.fp), str(r.metrics.tn), str(r.metrics.fn),
        ]
        for r in reports
    ]
    widths = [max(len(row[i]) for row in [headers] + rows) for i in range(len(headers))]
    lines = []
    for k, row in enumerate([headers] + rows):
        cells = [cell.ljust(w) if i == 0 else cell.rjust(w) for i, (cell, w) in enumerate(zip(row, widths))]
        lines.append("  ".join(cells).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


class DiagnosisPipeline:
    """
    Runs the pipeline stages behind the CLI commands.

    Every stage that writes an artifact also writes a run manifest next to it,
    holding the resolved arguments, input and output hashes and step timings.
    """

    def __init__(self, argv: Optional[Sequence[str]] = None, jobs: Optional[int] = None):
        self.argv = list(argv or [])
        self.jobs = jobs or settings.JOBS
        self.timings: Dict[str, float] = {}

    @contextmanager
    def _step(self, name: str):
        started = time.perf_counter()
        yield
        self.timings[name] = round(time.perf_counter() - started, 6)

    def _record(self, command: str, outputs: Iterable[PathLike], inputs: Iterable[PathLike] = (),
                config: Optional[Dict] = None, seeds: Optional[Dict[str, int]] = None):
        outputs = list(outputs)
        manifest = RunManifest(
            command=command,
            argv=self.argv,
            config=config or {},
            seeds=seeds or {},
            input_hashes={str(p): file_sha256(p) for p in inputs},
            output_hashes={str(p): file_sha256(p) for p in outputs},
            timings=dict(self.timings),
        )
        write_manifest(manifest, outputs[0])

    def _training_data(self, model: GlobalModel, data: Optional[PathLike]) -> Dataset:
        path = data or model.data_path
        if file_sha256(path) != model.data_sha256:
            logger.warning(f"{path} differs from the data the model was learned on")
        table = load_csv(path, model.label_names)
        return apply_schema(table, model.variables)

    def generate(self, out: PathLike, spec_path: Optional[PathLike] = None, patients: Optional[int] = None,
                 seed: Optional[int] = None) -> GeneratedDataset:
        """Simulates a diagnosis dataset from a spec file, or from the builtin medical spec"""
        with self._step("generate"):
            if spec_path is None:
                spec = templates.builtin_medical_spec(patients or 500, seed or 0)
            else:
                spec = load_spec(spec_path)
                if seed is not None:
                    spec = spec.model_copy(update={"seed": seed})
            logger.info(f"Generating data from {'builtin medical spec' if spec_path is None else spec_path}...")
            generated = generate(spec)
            generated.to_csv(out)
        logger.info(f"Wrote {len(generated.frame)} rows to {out}")
        self._record("generate", [out], [spec_path] if spec_path else [],
                     config={"spec_hash": generated.provenance}, seeds={"generator": spec.seed})
        return generated

    def split(self, data: PathLike, label: str, train_out: PathLike, test_out: PathLike,
              test_fraction: float, seed: int,
              boolean_columns: Sequence[str] = ()) -> Tuple[RawTable, RawTable]:
        with self._step("split"):
            table = load_csv(data, [label], boolean_columns)
            train, test = stratified_split(table, label, test_fraction, seed)
            write_csv(train, train_out)
            write_csv(test, test_out)
        logger.info(f"Split {table.n_rows} rows into {train.n_rows} train and {test.n_rows} test rows")
        self._record("split", [train_out, test_out], [data],
                     config={"label": label, "test_fraction": test_fraction}, seeds={"split": seed})
        return train, test

    def learn(self, data: PathLike, labels: Sequence[str], out: PathLike, budget: ExplorationBudget,
              n_bins: int, seed: int, ignore: Sequence[str] = (),
              boolean_columns: Sequence[str] = ()) -> GlobalModel:
        """Discretizes the training CSV and learns the global network from its labels"""
        clash = set(labels) & set(ignore)
        if clash:
            raise DataValidationError(f"label(s) {sorted(clash)} cannot be ignored")
        with self._step("load"):
            table = load_csv(data, labels, boolean_columns)
            if ignore:
                table = table.drop(ignore)
            ds = discretize(table, n_bins)
        with self._step("structure"):
            dag, candidates = learn_structure(ds, budget, seed, self.jobs)
        model = GlobalModel(
            variables=ds.variables, dag=dag, candidates=candidates, budget=budget, seed=seed,
            n_bins=n_bins, data_path=str(data), data_sha256=file_sha256(data), ignored=list(ignore),
        )
        save_global_model(model, out)
        self._record("learn", [out], [data],
                     config={"budget": budget.model_dump(), "n_bins": n_bins, "labels": list(labels),
                             "ignore": list(ignore), "boolean": list(boolean_columns), "jobs": self.jobs},
                     seeds={"selection": seed})
        return model

    def add_label(self, model_path: PathLike, data: PathLike, label: str, out: PathLike,
                  seed: Optional[int] = None, boolean_columns: Sequence[str] = ()) -> GlobalModel:
        """
        Adds a label column as a new node of an existing global network.

        Only the new node's candidate parent sets are explored; the stored candidate
        lists of every other node are reused as they are. Parent selection then runs
        again from all labels.
        """
        model = load_global_model(model_path)
        if label in model.index:
            raise DataValidationError(f"'{label}' is already in the model")
        seed = model.seed if seed is None else seed

        with self._step("load"):
            table = load_csv(data, model.label_names + [label], boolean_columns)
            if file_sha256(data) != model.data_sha256:
                logger.warning(f"{data} differs from the data the model was learned on")
            existing = apply_schema(table, model.variables)
            column = RawTable(frame=table.frame[[label]], kinds={label: table.kinds[label]}, labels=[label])
            added = discretize(column, model.n_bins)
            ds = Dataset(model.variables + added.variables, np.column_stack([existing.data, added.data]))
        x = ds.index(label)

        with self._step("structure"):
            logger.info(f"Exploring candidates for new label '{label}' only...")
            candidates = dict(model.candidates)
            candidates[x] = explore_candidates(ds, x, model.budget, ScoreCache())
            dag = select_parents(candidates, model.dag.labels + [x], seed)
        logger.info(f"Network now has {len(dag.nodes)} nodes and {len(dag.edges())} edges")

        updated = GlobalModel(
            variables=ds.variables, dag=dag, candidates=candidates, budget=model.budget, seed=seed,
            n_bins=model.n_bins, data_path=str(data), data_sha256=file_sha256(data),
            ignored=[c for c in model.ignored if c != label],
        )
        save_global_model(updated, out)
        self._record("add-label", [out], [model_path, data], config={"label": label}, seeds={"selection": seed})
        return updated

    def reduce(self, model_path: PathLike, label: str, out: PathLike, cfg: GaConfig, alpha: float,
               data: Optional[PathLike] = None) -> StoredReducedModel:
        """Extracts the root cause network of one label and fits its CPTs"""
        model = load_global_model(model_path)
        if label not in model.label_names:
            raise DataValidationError(f"'{label}' is not a label of the model")
        with self._step("load"):
            ds = self._training_data(model, data)
        with self._step("search"):
            reduced = extract_root_cause(ds, model.dag, model.index[label], cfg,
                                         provenance=file_sha256(model_path), jobs=self.jobs)
        with self._step("cpts"):
            cpts = fit_cpts(ds, reduced.dag, alpha)
        kept = [model.names[n] for n in reduced.features]
        logger.info(f"Reduced model for '{label}': {len(kept)} features {kept}, "
                    f"{len(reduced.used_features)} in its Markov blanket, fitness {reduced.fitness:.6f}")

        stored = StoredReducedModel(variables=model.variables, reduced=reduced, cpts=cpts, alpha=alpha)
        save_reduced_model(stored, out)
        self._record("reduce", [out], [model_path, data or model.data_path],
                     config={"ga": reduced.config.model_dump(), "alpha": alpha, "jobs": self.jobs},
                     seeds={"ga": cfg.seed})
        return stored

    def _resolve_hidden(self, stored: StoredReducedModel, hide: Sequence[str]) -> List[int]:
        index = stored.index
        unknown = [h for h in hide if h not in index]
        if unknown:
            raise DataValidationError(f"unknown hidden variable(s): {', '.join(unknown)}")
        hidden = [index[h] for h in hide]
        if stored.reduced.label in hidden:
            raise DataValidationError("the label is always hidden; do not list it in --hide")
        for h in hidden:
            if h not in stored.reduced.dag.nodes:
                logger.warning(f"Hidden variable '{stored.names[h]}' is not part of the reduced model")
        return hidden

    def _encode(self, stored: StoredReducedModel, data: PathLike) -> Dataset:
        table = load_csv(data, [stored.label_name])
        return apply_schema(table, stored.variables)

    def evaluate(self, model_path: PathLike, data: PathLike, threshold: Optional[float],
                 hide: Sequence[str] = (), out: Optional[PathLike] = None) -> EvaluationReport:
        """Classifies the test CSV with the reduced network, the label and `hide` unobserved"""
        stored = load_reduced_model(model_path)
        hidden = self._resolve_hidden(stored, hide)
        reduced = stored.reduced
        with self._step("load"):
            test = self._encode(stored, data)
        with self._step("inference"):
            positive = stored.variables[reduced.label].positive_state
            metrics = evaluate(stored.cpts, reduced.dag, reduced.label, test, threshold, hidden,
                               positive_state=positive, jobs=self.jobs)
            accuracy = hidden_accuracy(stored.cpts, reduced.dag, reduced.label, test, hidden, jobs=self.jobs)
        report = EvaluationReport(
            model="bayesian network (reduced)",
            label=stored.label_name,
            n_rows=test.n_rows,
            threshold=threshold,
            hidden=list(hide),
            features=[stored.names[n] for n in reduced.features],
            metrics=metrics,
            hidden_accuracy={stored.names[n]: acc for n, acc in accuracy.items()},
        )
        for name, acc in report.hidden_accuracy.items():
            logger.info(f"Hidden variable '{name}' recovered with accuracy {acc:.3f}")
        if out is not None:
            with open(out, "w", encoding="utf-8", newline="\n") as f:
                f.write(report.model_dump_json(indent=2) + "\n")
            self._record("eval", [out], [model_path, data], config={"threshold": threshold, "hide": list(hide)})
        return report

    def baseline(self, model_path: PathLike, train: PathLike, test: PathLike, threshold: Optional[float],
                 hide: Sequence[str] = (), max_depth: Optional[int] = None) -> List[EvaluationReport]:
        """
        Compares the reduced network with decision trees trained on the same data.

        Returns:
            Reports for the reduced network, a depth-limited tree on the reduced
            network's observable features and an unconstrained tree on every feature.
        """
        max_depth = max_depth or settings.TREE_MAX_DEPTH
        stored = load_reduced_model(model_path)
        hidden = set(self._resolve_hidden(stored, hide))
        label = stored.reduced.label
        reports = [self.evaluate(model_path, test, threshold, hide)]

        with self._step("trees"):
            train_ds = self._encode(stored, train)
            test_ds = self._encode(stored, test)
            reduced_features = [n for n in stored.reduced.features if n not in hidden]
            all_features = [j for j, v in enumerate(stored.variables) if v.kind == "feature" and j not in hidden]
            trees = []
            if reduced_features:
                trees.append((f"decision tree (depth <= {max_depth}, reduced)",
                              fit_constrained_tree(train_ds, reduced_features, label, max_depth)))
            else:
                logger.warning("The reduced model has no observable feature; skipping the constrained tree")
            trees.append(("decision tree (unconstrained)", fit_decision_tree(train_ds, all_features, label)))

        for name, tree in trees:
            logger.info(f"{name}: depth {tree.depth} over {len(tree.features)} features")
            reports.append(EvaluationReport(
                model=name,
                label=stored.label_name,
                n_rows=test_ds.n_rows,
                hidden=list(hide),
                features=[stored.names[n] for n in tree.features],
                metrics=evaluate_tree(tree, test_ds, stored.variables[label].positive_state),
            ))
        return reports

    def export_dot(self, model_path: PathLike, out: PathLike):
        model = load_any_model(model_path)
        if isinstance(model, StoredReducedModel):
            exporter = DotExporter(f"reduced_{model.label_name}")
            dag = model.reduced.dag
        else:
            exporter = DotExporter("global_network")
            dag = model.dag
        with self._step("export"):
            exporter.write(dag, model.names, out)
        self._record("export-dot", [out], [model_path])
