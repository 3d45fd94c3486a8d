"""Parameter fitting, exact inference and evaluation of discrete networks."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import confusion_matrix
from sklearn.tree import DecisionTreeClassifier

from src.core.dataset import Dataset
from src.core.structure import Dag
from src.exceptions import InferenceError, SchemaMismatchError
from src.models import MetricsReport

logger = logging.getLogger(__name__)

Evidence = Mapping[int, int]


@dataclass(frozen=True)
class Cpt:
    """P(node | parents), one probability row per parent joint state (C order over parents)"""
    node: int
    parents: Tuple[int, ...]
    cardinality: int
    parent_cardinalities: Tuple[int, ...]
    table: np.ndarray
    alpha: float

    def as_factor(self) -> "Factor":
        shape = self.parent_cardinalities + (self.cardinality,)
        return Factor(self.parents + (self.node,), self.table.reshape(shape))

    def to_dict(self) -> Dict:
        return {
            "node": int(self.node),
            "parents": [int(p) for p in self.parents],
            "cardinality": int(self.cardinality),
            "parent_cardinalities": [int(c) for c in self.parent_cardinalities],
            "table": self.table.tolist(),
            "alpha": float(self.alpha),
        }

    @classmethod
    def from_dict(cls, payload: Dict) -> "Cpt":
        return cls(
            node=payload["node"],
            parents=tuple(payload["parents"]),
            cardinality=payload["cardinality"],
            parent_cardinalities=tuple(payload["parent_cardinalities"]),
            table=np.asarray(payload["table"], dtype=float),
            alpha=payload["alpha"],
        )


class Factor:
    """Non-negative table over an ordered tuple of variables, one axis each"""

    def __init__(self, variables: Sequence[int], values: np.ndarray):
        self.variables = tuple(variables)
        self.values = np.asarray(values, dtype=float)

    def _aligned(self, union: Sequence[int]) -> np.ndarray:
        order = [self.variables.index(v) for v in union if v in self.variables]
        shape = [self.values.shape[self.variables.index(v)] if v in self.variables else 1 for v in union]
        return self.values.transpose(order).reshape(shape)

    def __mul__(self, other: "Factor") -> "Factor":
        union = self.variables + tuple(v for v in other.variables if v not in self.variables)
        return Factor(union, self._aligned(union) * other._aligned(union))

    def sum_out(self, var: int) -> "Factor":
        axis = self.variables.index(var)
        return Factor(self.variables[:axis] + self.variables[axis + 1:], self.values.sum(axis=axis))

    def reduce(self, evidence: Evidence) -> "Factor":
        factor = self
        for var, state in evidence.items():
            if var in factor.variables:
                axis = factor.variables.index(var)
                factor = Factor(
                    factor.variables[:axis] + factor.variables[axis + 1:],
                    np.take(factor.values, state, axis=axis),
                )
        return factor


def fit_cpts(ds: Dataset, g: Dag, alpha: float = 1.0) -> List[Cpt]:
    """
    Estimates P(x | pi) = (N_pi,x + alpha) / (N_pi + alpha * r) for every node of g.

    Parent configurations never observed get the uniform row.
    """
    if alpha < 0:
        raise InferenceError("alpha must be non-negative")
    cpts = []
    for node in g.nodes:
        parents = tuple(g.parents.get(node, ()))
        r = ds.cardinality(node)
        pcards = tuple(ds.cardinality(p) for p in parents)
        q = int(np.prod(pcards, dtype=np.int64)) if parents else 1
        if parents:
            pa = np.ravel_multi_index(tuple(ds.column(p) for p in parents), pcards)
        else:
            pa = np.zeros(ds.n_rows, dtype=np.int64)
        counts = np.bincount(pa * r + ds.column(node), minlength=q * r).reshape(q, r).astype(float)
        smoothed = counts + alpha
        totals = smoothed.sum(axis=1, keepdims=True)
        table = np.divide(smoothed, totals, out=np.full_like(smoothed, 1.0 / r), where=totals > 0)
        cpts.append(Cpt(node, parents, r, pcards, table, alpha))
    logger.debug(f"Fitted {len(cpts)} CPTs with alpha={alpha}")
    return cpts


def _check_evidence(by_node: Dict[int, Cpt], query: int, ev: Evidence):
    if query not in by_node:
        raise InferenceError(f"query variable {query} is not in the network")
    if query in ev:
        raise InferenceError(f"query variable {query} cannot be observed")
    for var, state in ev.items():
        if var not in by_node:
            raise InferenceError(f"evidence references unknown variable {var}")
        if not 0 <= state < by_node[var].cardinality:
            raise InferenceError(f"state {state} of variable {var} out of range")


def _elimination_order(factors: List[Factor], hidden: Iterable[int]) -> List[int]:
    """Greedy min-degree order over the interaction graph, ties by id"""
    scopes = [set(f.variables) for f in factors]
    remaining = set(hidden)
    order = []
    while remaining:
        def degree(v):
            return len(set().union(*[s for s in scopes if v in s]) - {v})

        var = min(remaining, key=lambda v: (degree(v), v))
        merged = set().union(*[s for s in scopes if var in s]) - {var}
        scopes = [s for s in scopes if var not in s] + [merged]
        remaining.discard(var)
        order.append(var)
    return order


def posterior(cpts: Sequence[Cpt], g: Dag, query: int, ev: Evidence) -> np.ndarray:
    """
    Exact P(query | evidence) by variable elimination.

    Only the ancestral closure of the query and evidence is used; every other node
    sums to one and drops out.
    """
    by_node = {c.node: c for c in cpts}
    ev = {int(k): int(v) for k, v in ev.items()}
    _check_evidence(by_node, query, ev)

    relevant = {query, *ev}
    for node in list(relevant):
        relevant |= g.ancestors(node)
    factors = [by_node[n].as_factor().reduce(ev) for n in sorted(relevant)]
    hidden = relevant - {query} - set(ev)

    for var in _elimination_order(factors, hidden):
        involved = [f for f in factors if var in f.variables]
        product = involved[0]
        for f in involved[1:]:
            product = product * f
        factors = [f for f in factors if var not in f.variables] + [product.sum_out(var)]

    result = Factor((query,), np.ones(by_node[query].cardinality))
    for f in factors:
        result = result * f
    values = result._aligned((query,))
    total = values.sum()
    if total <= 0:
        raise InferenceError("evidence has zero probability under the network")
    return values / total


def infer_hidden(cpts: Sequence[Cpt], g: Dag, node: int, ev: Evidence) -> Tuple[int, np.ndarray]:
    """Most probable state of a hidden variable and its posterior"""
    dist = posterior(cpts, g, node, ev)
    return int(np.argmax(dist)), dist


def classify(cpts: Sequence[Cpt], g: Dag, label: int, ev: Evidence, threshold: Optional[float] = 0.5,
             positive_state: int = 1) -> int:
    """
    Binary labels are positive iff P(label=positive_state | ev) >= threshold; other labels
    take the most probable state, ties going to the lower index.
    """
    dist = posterior(cpts, g, label, ev)
    if len(dist) == 2 and threshold is not None:
        if not 0.0 < threshold < 1.0:
            raise InferenceError("threshold must lie in (0, 1)")
        if positive_state not in (0, 1):
            raise InferenceError(f"positive state {positive_state} outside a binary label")
        return positive_state if dist[positive_state] >= threshold else 1 - positive_state
    return int(np.argmax(dist))


def _check_schema(cpts: Sequence[Cpt], test: Dataset):
    for cpt in cpts:
        if cpt.node >= test.n_vars or test.cardinality(cpt.node) != cpt.cardinality:
            raise SchemaMismatchError(f"test data does not match the model at variable {cpt.node}")


def _predict_patterns(test: Dataset, observed: List[int], predict, jobs: int) -> np.ndarray:
    """Applies `predict(evidence)` once per distinct observed pattern and maps back to rows"""
    if observed:
        patterns, inverse = np.unique(test.data[:, observed], axis=0, return_inverse=True)
    else:
        patterns, inverse = np.zeros((1, 0), dtype=np.int64), np.zeros(test.n_rows, dtype=np.int64)
    evidences = [dict(zip(observed, row.tolist())) for row in patterns]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        predictions = np.array(list(pool.map(predict, evidences)), dtype=np.int64)
    return predictions[np.asarray(inverse).reshape(-1)]


def metrics_from_predictions(y_true: np.ndarray, y_pred: np.ndarray) -> MetricsReport:
    tn, fp, fn, tp = confusion_matrix(
        np.asarray(y_true, dtype=bool), np.asarray(y_pred, dtype=bool), labels=[False, True]
    ).ravel()
    return MetricsReport.from_counts(tp=int(tp), fp=int(fp), tn=int(tn), fn=int(fn))


def evaluate(cpts: Sequence[Cpt], g: Dag, label: int, test: Dataset, threshold: Optional[float] = 0.5,
             hide: Iterable[int] = (), positive_state: int = 1, jobs: int = 1) -> MetricsReport:
    """
    Classifies every test row with the label and the `hide` variables unobserved.
    """
    _check_schema(cpts, test)
    hidden = set(hide) | {label}
    observed = [n for n in g.nodes if n not in hidden]
    predicted = _predict_patterns(
        test, observed, lambda ev: classify(cpts, g, label, ev, threshold, positive_state), jobs
    )
    report = metrics_from_predictions(test.column(label) == positive_state, predicted == positive_state)
    logger.info(f"Evaluated {test.n_rows} rows: F1={report.f1:.3f}")
    return report


def hidden_accuracy(cpts: Sequence[Cpt], g: Dag, label: int, test: Dataset, hide: Iterable[int],
                    jobs: int = 1) -> Dict[int, float]:
    """MAP accuracy of each hidden variable of the network against its true test column"""
    _check_schema(cpts, test)
    hide = [h for h in hide if h in g.nodes]
    hidden = set(hide) | {label}
    observed = [n for n in g.nodes if n not in hidden]
    accuracy = {}
    for node in hide:
        predicted = _predict_patterns(
            test, observed, lambda ev, node=node: infer_hidden(cpts, g, node, ev)[0], jobs
        )
        accuracy[node] = float(np.mean(predicted == test.column(node)))
    return accuracy


@dataclass
class TreeBaseline:
    """Decision tree restricted to a feature subset"""
    features: List[int]
    label: int
    classifier: DecisionTreeClassifier

    def predict(self, ds: Dataset) -> np.ndarray:
        return self.classifier.predict(ds.data[:, self.features])

    @property
    def depth(self) -> int:
        return int(self.classifier.get_depth())


def fit_decision_tree(ds: Dataset, features: Iterable[int], label: int, max_depth: Optional[int] = None) -> TreeBaseline:
    """Greedy information-gain tree on the ordinal codes of `features`"""
    features = sorted(set(features) - {label})
    if not features:
        raise InferenceError("a decision tree needs at least one feature")
    classifier = DecisionTreeClassifier(criterion="entropy", max_depth=max_depth, random_state=0)
    classifier.fit(ds.data[:, features], ds.column(label))
    return TreeBaseline(features=features, label=label, classifier=classifier)


def fit_constrained_tree(ds: Dataset, features: Iterable[int], label: int, max_depth: int = 5) -> TreeBaseline:
    """Depth-limited tree used to check that a reduced model kept the informative features"""
    if max_depth < 1:
        raise InferenceError("max_depth must be at least 1")
    return fit_decision_tree(ds, features, label, max_depth)


def evaluate_tree(tree: TreeBaseline, test: Dataset, positive_state: int = 1) -> MetricsReport:
    predicted = tree.predict(test)
    return metrics_from_predictions(test.column(tree.label) == positive_state, predicted == positive_state)
