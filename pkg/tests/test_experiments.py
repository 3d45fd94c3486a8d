import json

import networkx as nx
import pytest

from src.main import main
from src.services.model_service import load_global_model, load_reduced_model
from src.services.pipeline_service import DiagnosisPipeline
from src.templates import templates

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def benchmark(tmp_path_factory):
    """Builtin data split on jaundice and a global network learned without Gilbert's syndrome"""
    ws = tmp_path_factory.mktemp("benchmark")
    assert main(["generate", "--out", str(ws / "data.csv"), "--seed", "0"]) == 0
    assert main(["split", "--data", str(ws / "data.csv"), "--label", "jaundice", "--seed", "0",
                 "--train-out", str(ws / "train.csv"), "--test-out", str(ws / "test.csv")]) == 0
    assert main(["learn", "--data", str(ws / "train.csv"), "--labels", "jaundice", "--ignore", "gilbert_syndrome",
                 "--seed", "0", "--jobs", "4", "--out", str(ws / "global.json")]) == 0
    return ws


@pytest.fixture(scope="module")
def gilbert(benchmark):
    ws = benchmark
    assert main(["add-label", "--model", str(ws / "global.json"), "--data", str(ws / "train.csv"),
                 "--label", "gilbert_syndrome", "--out", str(ws / "global2.json")]) == 0
    assert main(["reduce", "--model", str(ws / "global2.json"), "--label", "gilbert_syndrome", "--seed", "0",
                 "--jobs", "4", "--out", str(ws / "gilbert.json")]) == 0
    return ws / "gilbert.json"


def _metrics(ws, model, name, *extra):
    out = ws / f"{name}-eval.json"
    assert main(["eval", "--model", str(model), "--data", str(ws / "test.csv"), "--out", str(out), *extra]) == 0
    return json.loads(out.read_text(encoding="utf-8"))["metrics"]


def test_global_network_covers_every_symptom(benchmark):
    model = load_global_model(benchmark / "global.json")
    assert len(model.dag.nodes) >= 133
    assert nx.is_directed_acyclic_graph(model.dag.to_networkx())


def test_jaundice_root_causes_are_its_symptoms(benchmark):
    ws = benchmark
    assert main(["reduce", "--model", str(ws / "global.json"), "--label", "jaundice", "--seed", "0",
                 "--C", "0.1", "--jobs", "4", "--out", str(ws / "jaundice.json")]) == 0
    stored = load_reduced_model(ws / "jaundice.json")
    features = [stored.names[n] for n in stored.reduced.features]

    assert len(stored.reduced.dag.nodes) <= 10
    assert features
    true_symptoms = set(templates.pathologies["jaundice"])
    assert sum(f in true_symptoms for f in features) >= 0.8 * len(features)

    metrics = _metrics(ws, ws / "jaundice.json", "jaundice")
    assert metrics["f1"] >= 0.60
    assert metrics["specificity"] >= 0.97


def test_gilbert_is_diagnosed_through_hidden_jaundice(benchmark, gilbert):
    stored = load_reduced_model(gilbert)
    assert stored.index["jaundice"] in stored.reduced.dag.ancestors(stored.reduced.label)

    metrics = _metrics(benchmark, gilbert, "gilbert", "--hide", "jaundice")
    assert metrics["f1"] >= 0.30

    reports = DiagnosisPipeline().baseline(gilbert, benchmark / "train.csv", benchmark / "test.csv",
                                           threshold=0.5, hide=["jaundice"], max_depth=5)
    network, tree = reports[0], reports[1]
    assert tree.model.startswith("decision tree (depth <= 5")
    assert abs(tree.metrics.f1 - network.metrics.f1) <= 0.15


def test_adding_gilbert_keeps_the_learned_candidates(benchmark, gilbert):
    before = load_global_model(benchmark / "global.json")
    after = load_global_model(benchmark / "global2.json")
    for node, candidates in before.candidates.items():
        assert after.candidates[node].fingerprint() == candidates.fingerprint()
