import json

import pytest

from src.core.rootcause import extract_root_cause
from src.core.structure import learn_structure
from src.exceptions import DataValidationError
from src.inference import fit_cpts
from src.models import ExplorationBudget, GaConfig
from src.services.model_service import (
    GlobalModel, StoredReducedModel, load_any_model, load_global_model, load_reduced_model,
    save_global_model, save_reduced_model,
)


@pytest.fixture
def global_model(chain_dataset) -> GlobalModel:
    dag, candidates = learn_structure(chain_dataset, ExplorationBudget(), seed=4)
    return GlobalModel(
        variables=chain_dataset.variables, dag=dag, candidates=candidates, budget=ExplorationBudget(),
        seed=4, n_bins=4, data_path="train.csv", data_sha256="0" * 64,
    )


@pytest.fixture
def reduced_model(chain_dataset, global_model) -> StoredReducedModel:
    reduced = extract_root_cause(chain_dataset, global_model.dag, 2, GaConfig(seed=1))
    return StoredReducedModel(variables=chain_dataset.variables, reduced=reduced,
                              cpts=fit_cpts(chain_dataset, reduced.dag), alpha=1.0)


def _tamper(path, **changes):
    payload = json.loads(path.read_text(encoding="utf-8"))
    payload.update(changes)
    path.write_text(json.dumps(payload), encoding="utf-8")


def test_global_model_file_round_trip(tmp_path, global_model):
    path = tmp_path / "global.json"
    save_global_model(global_model, path)
    loaded = load_global_model(path)

    assert loaded.dag == global_model.dag
    assert loaded.variables == global_model.variables
    assert loaded.seed == 4
    for node, candidates in global_model.candidates.items():
        assert loaded.candidates[node].entries == candidates.entries
    assert isinstance(load_any_model(path), GlobalModel)


def test_reduced_model_file_round_trip(tmp_path, reduced_model):
    path = tmp_path / "reduced.json"
    save_reduced_model(reduced_model, path)
    loaded = load_reduced_model(path)

    assert loaded.label_name == "c"
    assert loaded.reduced.dag == reduced_model.reduced.dag
    assert loaded.reduced.config == reduced_model.reduced.config
    assert [c.table.tolist() for c in loaded.cpts] == [c.table.tolist() for c in reduced_model.cpts]
    assert isinstance(load_any_model(path), StoredReducedModel)


@pytest.mark.parametrize("changes", [
    {"evaluations": "x"},
    {"alpha": -1.0},
    {"label": "nope"},
    {"schema_hash": "0" * 64},
    {"format": "global-network"},
    {"cpts": [{"node": 0, "parents": [], "cardinality": 2, "parent_cardinalities": [],
               "table": [[0.5]], "alpha": 1.0}]},
])
def test_malformed_reduced_model_is_rejected(tmp_path, reduced_model, changes):
    path = tmp_path / "reduced.json"
    save_reduced_model(reduced_model, path)
    _tamper(path, **changes)
    with pytest.raises(DataValidationError):
        load_reduced_model(path)


@pytest.mark.parametrize("changes", [
    {"n_bins": "many"},
    {"budget": {"max_parent_set_size": 0}},
    {"dag": {"nodes": ["a"], "parents": {"a": ["zz"]}, "labels": ["a"], "seed": 0}},
    {"format": "reduced-network"},
])
def test_malformed_global_model_is_rejected(tmp_path, global_model, changes):
    path = tmp_path / "global.json"
    save_global_model(global_model, path)
    _tamper(path, **changes)
    with pytest.raises(DataValidationError):
        load_global_model(path)


def test_edited_candidate_list_breaks_its_fingerprint(tmp_path, global_model):
    path = tmp_path / "global.json"
    save_global_model(global_model, path)
    payload = json.loads(path.read_text(encoding="utf-8"))
    payload["candidates"]["a"]["entries"][0][1] += 1.0
    path.write_text(json.dumps(payload), encoding="utf-8")

    with pytest.raises(DataValidationError, match="fingerprint"):
        load_global_model(path)
