import json
from pathlib import Path
from typing import Dict, List

import numpy as np
import pytest

from src.core.dataset import Dataset
from src.core.structure import Dag
from src.inference import Cpt


def noisy_copy(rng: np.random.Generator, source: np.ndarray, flip: float) -> np.ndarray:
    return np.where(rng.random(source.size) < flip, 1 - source, source)


@pytest.fixture
def chain_dataset() -> Dataset:
    """Binary chain a -> b -> c with 10% flips per link, c is the label"""
    rng = np.random.default_rng(7)
    a = rng.integers(0, 2, 2000)
    b = noisy_copy(rng, a, 0.1)
    c = noisy_copy(rng, b, 0.1)
    return Dataset.from_codes({"a": a, "b": b, "c": c}, labels=["c"], cardinalities={"a": 2, "b": 2, "c": 2})


@pytest.fixture
def chain_dag() -> Dag:
    return Dag(nodes=[0, 1, 2], parents={0: (), 1: (0,), 2: (1,)}, labels=[2])


def random_network(rng: np.random.Generator, n_nodes: int, max_card: int = 4, max_parents: int = 3,
                   link_last: bool = True):
    """Random DAG over ids 0..n-1 (parents among lower ids) with Dirichlet CPTs; the last node gets a parent"""
    cards = rng.integers(2, max_card + 1, n_nodes).tolist()
    parents: Dict[int, tuple] = {}
    cpts: List[Cpt] = []
    for node in range(n_nodes):
        low = 1 if link_last and node == n_nodes - 1 and node > 0 else 0
        k = int(rng.integers(low, min(node, max_parents) + 1))
        pa = tuple(sorted(rng.choice(node, size=k, replace=False).tolist())) if k else ()
        parents[node] = pa
        pcards = tuple(cards[p] for p in pa)
        q = int(np.prod(pcards)) if pa else 1
        table = rng.dirichlet(np.ones(cards[node]), size=q)
        cpts.append(Cpt(node, pa, cards[node], pcards, table, 1.0))
    return Dag(nodes=list(range(n_nodes)), parents=parents, labels=[]), cpts, cards


def sample_network(rng: np.random.Generator, dag: Dag, cpts: List[Cpt], n_rows: int) -> np.ndarray:
    """Ancestral sampling; nodes are already in topological order"""
    data = np.zeros((n_rows, len(dag.nodes)), dtype=np.int64)
    for cpt in cpts:
        if cpt.parents:
            rows = np.ravel_multi_index(tuple(data[:, p] for p in cpt.parents), cpt.parent_cardinalities)
        else:
            rows = np.zeros(n_rows, dtype=np.int64)
        cumulative = np.cumsum(cpt.table[rows], axis=1)
        draws = rng.random(n_rows)[:, None]
        data[:, cpt.node] = np.minimum((draws > cumulative).sum(axis=1), cpt.cardinality - 1)
    return data


SMALL_SPEC = {
    "symptoms": ["s0", "s1", "s2", "s3", "s4", "s5"],
    "pathologies": [
        {"name": "flu", "patients_per_pathology": 150, "symptom_probs": {"s0": 0.9, "s1": 0.8}},
        {"name": "cold", "patients_per_pathology": 150, "symptom_probs": {"s2": 0.9, "s3": 0.8}},
        {"name": "rash", "patients_per_pathology": 150, "symptom_probs": {"s4": 0.9}},
    ],
    "sequential": [
        {
            "name": "late",
            "symptom_probs": {"s5": 0.9},
            "depends_on": {"pathology": "flu", "prob_given_present": 0.6, "prob_given_absent": 0.02},
        }
    ],
    "labels": ["flu", "late"],
    "baseline_noise": 0.01,
    "seed": 3,
}


@pytest.fixture
def small_spec_path(tmp_path) -> Path:
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(SMALL_SPEC), encoding="utf-8")
    return path


@pytest.fixture
def write_csv(tmp_path):
    def _write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
