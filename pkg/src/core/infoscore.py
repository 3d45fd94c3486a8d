"""Information-theoretic and BIC scoring primitives.

All quantities are in nats and computed from maximum-likelihood frequencies of
a Dataset, without smoothing.
"""

import threading
from dataclasses import dataclass
from typing import Dict, Iterable, Tuple, Union

import numpy as np
from scipy.special import xlogy
from scipy.stats import entropy as _entropy

from src.core.dataset import Dataset
from src.exceptions import CacheMissError, ScoreError
from src.models import canonical_hash

ParentSet = Tuple[int, ...]
VarSet = Union[int, Iterable[int]]

# Joint codes are re-compressed once the mixed-radix product would exceed this.
_RADIX_LIMIT = 1 << 40


def as_set(variables: VarSet) -> ParentSet:
    """Canonical (sorted, duplicate-free) tuple of variable ids"""
    if isinstance(variables, (int, np.integer)):
        return (int(variables),)
    return tuple(sorted({int(v) for v in variables}))


def joint_codes(ds: Dataset, variables: ParentSet) -> Tuple[np.ndarray, int]:
    """
    Maps every row to the index of its joint state over `variables`.

    Returns:
        Codes and an upper bound on their number. Indices are mixed-radix while the
        product of cardinalities stays small, and compressed to observed states otherwise.
    """
    codes = np.zeros(ds.n_rows, dtype=np.int64)
    size = 1
    for v in variables:
        card = ds.cardinality(v)
        if size * card > _RADIX_LIMIT:
            _, codes = np.unique(codes, return_inverse=True)
            size = int(codes.max()) + 1
        codes = codes * card + ds.column(v)
        size *= card
    return codes, size


@dataclass(frozen=True)
class ContingencyTable:
    """Counts of (parent joint state, child state) over the observed parent states"""
    child: int
    parents: ParentSet
    counts: np.ndarray  # observed parent configurations x child states
    n: int

    @property
    def parent_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)


def contingency(ds: Dataset, child: int, parents: VarSet = ()) -> ContingencyTable:
    parents = as_set(parents)
    r = ds.cardinality(child)
    pa, _ = joint_codes(ds, parents)
    keys, counts = np.unique(pa * r + ds.column(child), return_counts=True)
    configs, rows = np.unique(keys // r, return_inverse=True)
    table = np.zeros((len(configs), r), dtype=np.int64)
    table[rows, keys % r] = counts
    return ContingencyTable(child=child, parents=parents, counts=table, n=ds.n_rows)


def _conditional_loglik(table: ContingencyTable) -> float:
    """sum over (pi, x) of N_pi,x * ln(N_pi,x / N_pi)"""
    counts = table.counts.astype(float)
    totals = table.parent_totals.astype(float)[:, None]
    return float(xlogy(counts, counts).sum() - xlogy(counts, np.broadcast_to(totals, counts.shape)).sum())


def entropy(ds: Dataset, x: int) -> float:
    """Empirical entropy H(X)"""
    return float(_entropy(np.bincount(ds.column(x))))


def conditional_entropy(ds: Dataset, x: int, cond: VarSet) -> float:
    """Empirical conditional entropy H(X | Y) with Y the joint variable over `cond`"""
    cond = as_set(cond)
    if x in cond:
        raise ScoreError(f"variable {x} cannot condition on itself")
    if not cond:
        return entropy(ds, x)
    return max(0.0, -_conditional_loglik(contingency(ds, x, cond)) / ds.n_rows)


def mutual_information(ds: Dataset, x: int, y: VarSet) -> float:
    """I(X, Y) = H(X) - H(X | Y)"""
    mi = entropy(ds, x) - conditional_entropy(ds, x, y)
    if -1e-12 < mi < 0:
        return 0.0
    return mi


def uncertainty_coefficient(ds: Dataset, d: int, e: VarSet) -> float:
    """
    U(D, E) = I(D, E) / H(D), the share of D's entropy explained by the joint variable E.

    A constant D gives 0; an empty E gives 0.
    """
    e = as_set(e)
    if d in e:
        raise ScoreError(f"variable {d} cannot explain itself")
    h = entropy(ds, d)
    if h == 0.0 or not e:
        return 0.0
    return min(1.0, max(0.0, mutual_information(ds, d, e) / h))


class ScoreCache:
    """Thread-safe map from (child, canonical parent set) to exact BIC"""

    def __init__(self):
        self._scores: Dict[Tuple[int, ParentSet], float] = {}
        self._lock = threading.Lock()

    def get(self, x: int, parents: ParentSet):
        with self._lock:
            return self._scores.get((x, parents))

    def put(self, x: int, parents: ParentSet, score: float):
        with self._lock:
            self._scores[(x, parents)] = score

    def __contains__(self, key) -> bool:
        with self._lock:
            return key in self._scores

    def __len__(self) -> int:
        with self._lock:
            return len(self._scores)

    def fingerprint(self, x: int = None) -> str:
        """Hash of every cached score, or of those of child `x`"""
        with self._lock:
            items = sorted(
                (k[0], list(k[1]), v) for k, v in self._scores.items() if x is None or k[0] == x
            )
        return canonical_hash(items)


def bic(ds: Dataset, x: int, parents: VarSet, cache: ScoreCache = None) -> float:
    """
    BIC(X | parents) = log-likelihood - (ln n / 2) * q * (r - 1); larger is better.
    """
    parents = as_set(parents)
    if x in parents:
        raise ScoreError(f"variable {x} proposed as its own parent")
    if cache is not None:
        cached = cache.get(x, parents)
        if cached is not None:
            return cached

    r = ds.cardinality(x)
    q = 1
    for p in parents:
        q *= ds.cardinality(p)
    penalty = 0.5 * np.log(ds.n_rows) * q * (r - 1)
    score = _conditional_loglik(contingency(ds, x, parents)) - float(penalty)

    if cache is not None:
        cache.put(x, parents, score)
    return score


def bic_star(x: int, s1: VarSet, s2: VarSet, cache: ScoreCache) -> float:
    """
    Additive estimate BIC(x|s1) + BIC(x|s2) - BIC(x|empty) of BIC(x | s1 u s2).

    Only used to rank unexplored candidates; never stored as a score.

    Raises:
        CacheMissError: if any of the three exact scores has not been computed.
    """
    s1, s2 = as_set(s1), as_set(s2)
    if set(s1) & set(s2):
        raise ScoreError("BIC* combines disjoint parent sets only")
    scores = []
    for parents in (s1, s2, ()):
        score = cache.get(x, parents)
        if score is None:
            raise CacheMissError(f"no cached BIC for variable {x} given {list(parents)}")
        scores.append(score)
    return scores[0] + scores[1] - scores[2]


def network_bic(ds: Dataset, parents: Dict[int, ParentSet], cache: ScoreCache = None) -> float:
    """Total score of a network, the sum of its local scores"""
    return sum(bic(ds, x, pa, cache) for x, pa in parents.items())
