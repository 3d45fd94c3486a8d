import hashlib
import json
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def canonical_hash(payload: Any) -> str:
    """SHA-256 of the canonical (sorted-key, compact) JSON form of payload"""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class Variable(BaseModel):
    """A discretized network variable"""
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Column name")
    cardinality: int = Field(..., ge=1, description="Number of encoded states")
    kind: Literal["feature", "label"] = Field("feature", description="Role in the network")
    bin_edges: Optional[List[float]] = Field(
        None, description="Right-closed quantile cut points, present iff the column was continuous"
    )
    states: Optional[List[str]] = Field(None, description="Raw value of each state for text and boolean columns")
    missing: bool = Field(False, description="Whether the last state encodes a missing cell")

    @field_validator("bin_edges")
    @classmethod
    def edges_strictly_increasing(cls, edges):
        if edges is not None and any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("bin_edges must be strictly increasing")
        return edges

    @model_validator(mode="after")
    def cardinality_matches_encoding(self):
        extra = 1 if self.missing else 0
        if self.bin_edges is not None and self.cardinality != len(self.bin_edges) + 1 + extra:
            raise ValueError(f"{self.name}: cardinality does not match bin_edges")
        if self.states is not None and self.cardinality != max(len(self.states) + extra, 1):
            raise ValueError(f"{self.name}: cardinality does not match states")
        return self

    @property
    def positive_state(self) -> int:
        """Code of the positive class: the `true` state, or the top bin of a numeric column"""
        if self.bin_edges is not None:
            return len(self.bin_edges)
        lowered = [s.strip().lower() for s in self.states or []]
        for token in ("true", "1", "yes"):
            if token in lowered:
                return lowered.index(token)
        return 1 if self.cardinality > 1 else 0


class ExplorationBudget(BaseModel):
    """Bounds for candidate parent-set exploration"""
    model_config = ConfigDict(frozen=True)

    max_parent_set_size: int = Field(3, ge=1)
    max_candidates_per_node: int = Field(20, ge=1)
    max_expansions_per_node: int = Field(500, ge=1)


class GaConfig(BaseModel):
    """Hyper-parameters of the root cause extraction"""
    model_config = ConfigDict(frozen=True)

    K: int = Field(20, ge=2, description="Survivors per generation")
    max_gen: int = Field(100, ge=1, description="Maximum number of generations, generation 0 included")
    patience: int = Field(10, ge=1, description="Stagnating generations tolerated")
    plateau: float = Field(1e-6, ge=0, description="Minimal best-fitness improvement")
    tau: Optional[int] = Field(None, ge=1, description="Characteristic state number; None means 3 x label cardinality")
    C: float = Field(1e-3, ge=0, description="Regularization intensity")
    mutation_rate: float = Field(0.05, ge=0, le=1, description="Flip probability per gene")
    offspring: Optional[int] = Field(None, ge=1, description="Children bred per generation; None means 2K")
    max_initial_parents: int = Field(12, ge=1, description="Direct parents enumerated exhaustively in generation 0")
    exhaustive: bool = Field(False, description="Enumerate every ancestor subset instead of breeding")
    seed: int = Field(0, description="Master RNG seed")

    def resolved(self, label_cardinality: int) -> "GaConfig":
        updates: Dict[str, Any] = {}
        if self.tau is None:
            updates["tau"] = 3 * label_cardinality
        if self.offspring is None:
            updates["offspring"] = 2 * self.K
        return self.model_copy(update=updates) if updates else self


class MetricsReport(BaseModel):
    """Confusion counts and diagnosis metrics for the positive class"""
    tp: int = Field(..., ge=0)
    fp: int = Field(..., ge=0)
    tn: int = Field(..., ge=0)
    fn: int = Field(..., ge=0)
    precision: float
    sensitivity: float
    specificity: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, tn: int, fn: int) -> "MetricsReport":
        precision = tp / (tp + fp) if tp + fp else 0.0
        sensitivity = tp / (tp + fn) if tp + fn else 0.0
        specificity = tn / (tn + fp) if tn + fp else 0.0
        f1 = 2 * precision * sensitivity / (precision + sensitivity) if precision + sensitivity else 0.0
        return cls(
            tp=tp, fp=fp, tn=tn, fn=fn,
            precision=precision, sensitivity=sensitivity, specificity=specificity, f1=f1,
        )


class EvaluationReport(BaseModel):
    """Result of evaluating a model on a held-out table"""
    model: str = Field(..., description="Name of the evaluated classifier")
    label: str
    n_rows: int
    threshold: Optional[float] = None
    hidden: List[str] = []
    features: List[str] = []
    metrics: MetricsReport
    hidden_accuracy: Dict[str, float] = Field(
        default_factory=dict, description="MAP accuracy of hidden variables whose true column is known"
    )


class RunManifest(BaseModel):
    """Everything needed to reproduce one CLI stage"""
    command: str
    argv: List[str]
    config: Dict[str, Any] = {}
    seeds: Dict[str, int] = {}
    input_hashes: Dict[str, str] = {}
    output_hashes: Dict[str, str] = {}
    timings: Dict[str, float] = {}


class Dependency(BaseModel):
    """Sequential-failure link from a prerequisite pathology"""
    pathology: str
    prob_given_present: float = Field(..., ge=0, le=1)
    prob_given_absent: float = Field(..., ge=0, le=1)


class PathologySpec(BaseModel):
    """One simulated pathology and its symptom appearance probabilities"""
    name: str
    patients_per_pathology: int = Field(0, ge=0)
    symptom_probs: Dict[str, float] = {}
    depends_on: Optional[Dependency] = None
    prevalence: float = Field(0.0, ge=0, le=1, description="Firing rate of a sequential pathology without depends_on")

    @field_validator("symptom_probs")
    @classmethod
    def probabilities_in_range(cls, probs):
        for symptom, p in probs.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability of {symptom} outside [0, 1]")
        return probs


class GeneratorSpec(BaseModel):
    """Synthetic diagnosis dataset description"""
    symptoms: List[str]
    pathologies: List[PathologySpec] = Field(..., description="Primary pathologies, one block of rows each")
    sequential: List[PathologySpec] = Field(
        default_factory=list, description="Pathologies drawn per row after their prerequisite"
    )
    labels: List[str] = Field(..., description="Pathologies emitted as binary label columns")
    baseline_noise: float = Field(0.0, ge=0, le=1)
    seed: int = 0

    def all_pathologies(self) -> List[PathologySpec]:
        return list(self.pathologies) + list(self.sequential)

    def spec_hash(self) -> str:
        return canonical_hash(self.model_dump(mode="json"))


class DagRecord(BaseModel):
    """A network by variable names, as written to model files"""
    nodes: List[str]
    parents: Dict[str, List[str]]
    labels: List[str] = []
    seed: Optional[int] = None

    @model_validator(mode="after")
    def edges_between_known_nodes(self):
        known = set(self.nodes)
        for child, parents in self.parents.items():
            unknown = [n for n in [child, *parents] if n not in known]
            if unknown:
                raise ValueError(f"edge into '{child}' references unknown node(s) {unknown}")
        if not set(self.labels) <= known:
            raise ValueError("labels must be network nodes")
        return self


class CandidateRecord(BaseModel):
    """Ranked candidate parent sets of one variable and their fingerprint"""
    entries: List[Tuple[List[str], float]]
    fingerprint: str


class DataRecord(BaseModel):
    path: str
    sha256: str


class FitnessRecord(BaseModel):
    u: float
    l: float
    r: float


class CptRecord(BaseModel):
    """Conditional probability table of one node, rows in C order over its parents"""
    node: int = Field(..., ge=0)
    parents: List[int]
    cardinality: int = Field(..., ge=1)
    parent_cardinalities: List[int]
    table: List[List[float]]
    alpha: float = Field(..., ge=0)

    @model_validator(mode="after")
    def table_matches_shape(self):
        rows = 1
        for c in self.parent_cardinalities:
            rows *= c
        if len(self.parents) != len(self.parent_cardinalities):
            raise ValueError(f"node {self.node}: one cardinality per parent expected")
        if len(self.table) != rows or any(len(row) != self.cardinality for row in self.table):
            raise ValueError(f"node {self.node}: table is not {rows} x {self.cardinality}")
        return self


def _check_schema_hash(variables: List[Variable], expected: str):
    if canonical_hash([v.model_dump(mode="json") for v in variables]) != expected:
        raise ValueError("schema hash does not match the stored variables")


class GlobalModelFile(BaseModel):
    """On-disk form of a learned global network"""
    format: Literal["global-network"] = "global-network"
    version: Literal[1] = 1
    variables: List[Variable]
    schema_hash: str
    dag: DagRecord
    candidates: Dict[str, CandidateRecord]
    budget: ExplorationBudget
    n_bins: int = Field(..., ge=2)
    data: DataRecord
    ignored: List[str] = []

    @model_validator(mode="after")
    def consistent(self):
        _check_schema_hash(self.variables, self.schema_hash)
        names = {v.name for v in self.variables}
        if not set(self.dag.nodes) <= names or not set(self.candidates) <= names:
            raise ValueError("network references variables outside the stored schema")
        return self


class ReducedModelFile(BaseModel):
    """On-disk form of a root cause network with its fitted CPTs"""
    format: Literal["reduced-network"] = "reduced-network"
    version: Literal[1] = 1
    label: str
    variables: List[Variable]
    schema_hash: str
    dag: DagRecord
    fitness: float
    terms: FitnessRecord
    config: GaConfig
    provenance: str = ""
    history: List[float] = []
    evaluations: int = Field(0, ge=0)
    alpha: float = Field(..., ge=0)
    cpts: List[CptRecord]

    @model_validator(mode="after")
    def consistent(self):
        _check_schema_hash(self.variables, self.schema_hash)
        names = {v.name for v in self.variables}
        if self.label not in names:
            raise ValueError(f"label '{self.label}' is not in the stored schema")
        if not set(self.dag.nodes) <= names:
            raise ValueError("network references variables outside the stored schema")
        if self.label not in self.dag.nodes:
            raise ValueError(f"label '{self.label}' is not a node of the network")
        if any(c.node >= len(self.variables) for c in self.cpts):
            raise ValueError("a CPT references a variable outside the stored schema")
        return self
