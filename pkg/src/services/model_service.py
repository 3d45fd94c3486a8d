import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import ValidationError

from src.core.rootcause import FitnessTerms, ReducedModel
from src.core.structure import CandidateList, Dag
from src.exceptions import DataValidationError
from src.inference import Cpt
from src.models import (
    CandidateRecord, CptRecord, DagRecord, DataRecord, ExplorationBudget, FitnessRecord, GlobalModelFile,
    ReducedModelFile, RunManifest, Variable, canonical_hash,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def file_sha256(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_json(payload: Any, path: PathLike):
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline"""
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def read_json(path: PathLike) -> Dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise DataValidationError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise DataValidationError(f"{path} is not valid JSON: {e}")


def manifest_path(out: PathLike) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def write_manifest(manifest: RunManifest, out: PathLike) -> Path:
    path = manifest_path(out)
    write_json(manifest.model_dump(mode="json"), path)
    logger.info(f"Manifest written to {path}")
    return path


def load_manifest(path: PathLike) -> RunManifest:
    try:
        return RunManifest(**read_json(path))
    except ValidationError as e:
        raise DataValidationError(f"invalid manifest {path}: {e}")


def dag_to_record(g: Dag, names: Sequence[str], seed: Optional[int] = None) -> DagRecord:
    """Dag by variable names"""
    return DagRecord(
        nodes=[names[n] for n in g.nodes],
        parents={names[n]: [names[p] for p in g.parents.get(n, ())] for n in g.nodes},
        labels=[names[n] for n in g.labels],
        seed=seed,
    )


def dag_from_record(record: DagRecord, index: Dict[str, int]) -> Dag:
    return Dag(
        nodes=[index[n] for n in record.nodes],
        parents={index[n]: tuple(index[p] for p in record.parents.get(n, [])) for n in record.nodes},
        labels=[index[n] for n in record.labels],
    )


def _schema_hash(variables: Sequence[Variable]) -> str:
    return canonical_hash([v.model_dump(mode="json") for v in variables])


def _validated(record_type, payload: Dict, path: PathLike):
    try:
        return record_type.model_validate(payload)
    except ValidationError as e:
        raise DataValidationError(f"invalid model file {path}: {e}")


@dataclass
class GlobalModel:
    """Learned global network together with everything needed to extend or reduce it"""
    variables: List[Variable]
    dag: Dag
    candidates: Dict[int, CandidateList]
    budget: ExplorationBudget
    seed: int
    n_bins: int
    data_path: str
    data_sha256: str
    ignored: List[str] = field(default_factory=list)

    @property
    def names(self) -> List[str]:
        return [v.name for v in self.variables]

    @property
    def index(self) -> Dict[str, int]:
        return {v.name: j for j, v in enumerate(self.variables)}

    @property
    def label_names(self) -> List[str]:
        return [self.names[n] for n in self.dag.labels]

    def schema_hash(self) -> str:
        return _schema_hash(self.variables)

    def to_record(self) -> GlobalModelFile:
        names = self.names
        return GlobalModelFile(
            variables=self.variables,
            schema_hash=self.schema_hash(),
            dag=dag_to_record(self.dag, names, self.seed),
            candidates={
                names[x]: CandidateRecord(
                    entries=[([names[p] for p in parents], score) for parents, score in cl.entries],
                    fingerprint=cl.fingerprint(),
                )
                for x, cl in sorted(self.candidates.items())
            },
            budget=self.budget,
            n_bins=self.n_bins,
            data=DataRecord(path=self.data_path, sha256=self.data_sha256),
            ignored=list(self.ignored),
        )

    @classmethod
    def from_record(cls, record: GlobalModelFile) -> "GlobalModel":
        index = {v.name: j for j, v in enumerate(record.variables)}
        candidates = {}
        for name, entry in record.candidates.items():
            x = index[name]
            try:
                entries = [(tuple(index[p] for p in parents), score) for parents, score in entry.entries]
            except KeyError as e:
                raise DataValidationError(f"candidate list of '{name}' references unknown variable {e}")
            candidates[x] = CandidateList(child=x, entries=entries)
            if candidates[x].fingerprint() != entry.fingerprint:
                raise DataValidationError(f"candidate list of '{name}' does not match its fingerprint")
        if record.dag.seed is None:
            raise DataValidationError("the global network does not record its selection seed")
        return cls(
            variables=list(record.variables),
            dag=dag_from_record(record.dag, index),
            candidates=candidates,
            budget=record.budget,
            seed=record.dag.seed,
            n_bins=record.n_bins,
            data_path=record.data.path,
            data_sha256=record.data.sha256,
            ignored=list(record.ignored),
        )


def save_global_model(model: GlobalModel, path: PathLike):
    write_json(model.to_record().model_dump(), path)
    logger.info(f"Global model ({len(model.dag.nodes)} nodes) saved to {path}")


def load_global_model(path: PathLike) -> GlobalModel:
    return GlobalModel.from_record(_validated(GlobalModelFile, read_json(path), path))


@dataclass
class StoredReducedModel:
    """Reduced network as persisted: its variables' schema, the search result and fitted CPTs"""
    variables: List[Variable]
    reduced: ReducedModel
    cpts: List[Cpt]
    alpha: float

    @property
    def names(self) -> List[str]:
        return [v.name for v in self.variables]

    @property
    def index(self) -> Dict[str, int]:
        return {v.name: j for j, v in enumerate(self.variables)}

    @property
    def label_name(self) -> str:
        return self.variables[self.reduced.label].name

    def schema_hash(self) -> str:
        return _schema_hash(self.variables)

    def to_record(self) -> ReducedModelFile:
        names = self.names
        reduced = self.reduced
        return ReducedModelFile(
            label=names[reduced.label],
            variables=self.variables,
            schema_hash=self.schema_hash(),
            dag=dag_to_record(reduced.dag, names, reduced.config.seed),
            fitness=reduced.fitness,
            terms=FitnessRecord(u=reduced.terms.u, l=reduced.terms.l, r=reduced.terms.r),
            config=reduced.config,
            provenance=reduced.provenance,
            history=list(reduced.history),
            evaluations=reduced.evaluations,
            alpha=self.alpha,
            cpts=[CptRecord(**c.to_dict()) for c in self.cpts],
        )

    @classmethod
    def from_record(cls, record: ReducedModelFile) -> "StoredReducedModel":
        index = {v.name: j for j, v in enumerate(record.variables)}
        reduced = ReducedModel(
            label=index[record.label],
            dag=dag_from_record(record.dag, index),
            fitness=record.fitness,
            terms=FitnessTerms(u=record.terms.u, l=record.terms.l, r=record.terms.r),
            config=record.config,
            provenance=record.provenance,
            history=list(record.history),
            evaluations=record.evaluations,
        )
        return cls(
            variables=list(record.variables),
            reduced=reduced,
            cpts=[Cpt.from_dict(c.model_dump()) for c in record.cpts],
            alpha=record.alpha,
        )


def save_reduced_model(model: StoredReducedModel, path: PathLike):
    write_json(model.to_record().model_dump(), path)
    logger.info(f"Reduced model for '{model.label_name}' ({len(model.reduced.dag.nodes)} nodes) saved to {path}")


def load_reduced_model(path: PathLike) -> StoredReducedModel:
    return StoredReducedModel.from_record(_validated(ReducedModelFile, read_json(path), path))


def load_any_model(path: PathLike) -> Union[GlobalModel, StoredReducedModel]:
    payload = read_json(path)
    if isinstance(payload, dict) and payload.get("format") == "reduced-network":
        return StoredReducedModel.from_record(_validated(ReducedModelFile, payload, path))
    return GlobalModel.from_record(_validated(GlobalModelFile, payload, path))
