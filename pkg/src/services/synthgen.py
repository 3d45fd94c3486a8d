import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Union

import networkx as nx
import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.exceptions import GeneratorSpecError
from src.models import GeneratorSpec, PathologySpec

logger = logging.getLogger(__name__)


@dataclass
class GeneratedDataset:
    """Binary symptom columns followed by one binary column per label pathology"""
    frame: pd.DataFrame
    labels: List[str]
    provenance: str

    def to_csv(self, path: Union[str, Path]):
        self.frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")


def load_spec(path: Union[str, Path]) -> GeneratorSpec:
    """Reads a GeneratorSpec JSON file"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return GeneratorSpec(**json.load(f))
    except (OSError, json.JSONDecodeError, ValidationError, TypeError) as e:
        raise GeneratorSpecError(f"invalid generator spec {path}: {e}")


def _sequential_order(spec: GeneratorSpec) -> List[PathologySpec]:
    """Sequential pathologies with every prerequisite drawn first"""
    graph = nx.DiGraph()
    by_name = {p.name: p for p in spec.sequential}
    graph.add_nodes_from(by_name)
    for p in spec.sequential:
        if p.depends_on is not None and p.depends_on.pathology in by_name:
            graph.add_edge(p.depends_on.pathology, p.name)
    try:
        return [by_name[name] for name in nx.lexicographical_topological_sort(graph)]
    except nx.NetworkXUnfeasible:
        raise GeneratorSpecError("depends_on links between pathologies form a cycle")


def validate_spec(spec: GeneratorSpec):
    """Cross-field checks the pydantic model cannot express on its own"""
    if len(set(spec.symptoms)) != len(spec.symptoms):
        raise GeneratorSpecError("symptom names must be unique")
    names = [p.name for p in spec.all_pathologies()]
    if len(set(names)) != len(names):
        raise GeneratorSpecError("pathology names must be unique")
    if set(names) & set(spec.symptoms):
        raise GeneratorSpecError("pathology and symptom names must not overlap")
    known = set(spec.symptoms)
    for p in spec.all_pathologies():
        unknown = set(p.symptom_probs) - known
        if unknown:
            raise GeneratorSpecError(f"{p.name} references unknown symptom(s) {sorted(unknown)}")
    for p in spec.pathologies:
        if p.depends_on is not None:
            raise GeneratorSpecError(f"primary pathology {p.name} cannot depend on another; declare it sequential")
    for p in spec.sequential:
        if p.depends_on is not None and p.depends_on.pathology not in names:
            raise GeneratorSpecError(f"{p.name} depends on undeclared pathology {p.depends_on.pathology}")
    unknown_labels = set(spec.labels) - set(names)
    if unknown_labels:
        raise GeneratorSpecError(f"labels reference undeclared pathologies {sorted(unknown_labels)}")
    if sum(p.patients_per_pathology for p in spec.pathologies) < 1:
        raise GeneratorSpecError("the spec generates no rows")
    _sequential_order(spec)


def generate(spec: GeneratorSpec) -> GeneratedDataset:
    """
    Simulates patients block by block, one block per primary pathology.

    Each symptom fires independently with the pathology's probability, or with
    baseline_noise when unlisted. Sequential pathologies are then drawn per row
    given their prerequisite's label and add their own symptoms where they fire.
    """
    validate_spec(spec)
    rng = np.random.default_rng(spec.seed)
    column = {name: j for j, name in enumerate(spec.symptoms)}

    def probabilities(p: PathologySpec, noise: float) -> np.ndarray:
        vector = np.full(len(spec.symptoms), noise)
        for symptom, prob in p.symptom_probs.items():
            vector[column[symptom]] = prob
        return vector

    blocks = []
    for p in spec.pathologies:
        blocks.append(rng.random((p.patients_per_pathology, len(spec.symptoms))) < probabilities(p, spec.baseline_noise))
    symptoms = np.vstack(blocks)
    origin = np.repeat(np.arange(len(spec.pathologies)), [p.patients_per_pathology for p in spec.pathologies])
    n_rows = symptoms.shape[0]

    present: Dict[str, np.ndarray] = {p.name: origin == i for i, p in enumerate(spec.pathologies)}
    for p in _sequential_order(spec):
        if p.depends_on is not None:
            prerequisite = present[p.depends_on.pathology]
            rate = np.where(prerequisite, p.depends_on.prob_given_present, p.depends_on.prob_given_absent)
        else:
            rate = np.full(n_rows, p.prevalence)
        fired = rng.random(n_rows) < rate
        extra = rng.random(symptoms.shape) < probabilities(p, 0.0)
        symptoms |= extra & fired[:, None]
        present[p.name] = fired

    frame = pd.DataFrame(symptoms.astype(np.int64), columns=spec.symptoms)
    for name in spec.labels:
        frame[name] = present[name].astype(np.int64)
    positives = {name: int(frame[name].sum()) for name in spec.labels}
    logger.info(f"Generated {n_rows} rows over {len(spec.symptoms)} symptoms; positives per label {positives}")
    return GeneratedDataset(frame=frame, labels=list(spec.labels), provenance=spec.spec_hash())
