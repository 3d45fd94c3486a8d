"""Global network structure learning.

Candidate parent sets are explored per variable under a budget, then a
label-centric pass assigns one candidate to every node while keeping the
graph acyclic.
"""

import heapq
import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from src.core.dataset import Dataset
from src.core.infoscore import ParentSet, ScoreCache, as_set, bic, bic_star, network_bic
from src.exceptions import CycleError, StructureError
from src.models import ExplorationBudget, canonical_hash

logger = logging.getLogger(__name__)


@dataclass
class CandidateList:
    """Explored parent sets of one child, best exact BIC first"""
    child: int
    entries: List[Tuple[ParentSet, float]]
    explored: Set[ParentSet] = field(default_factory=set)
    frontier: List[Tuple[float, ParentSet]] = field(default_factory=list)

    def best(self) -> Tuple[ParentSet, float]:
        return self.entries[0]

    def fingerprint(self) -> str:
        return canonical_hash([[list(p), s] for p, s in self.entries])


@dataclass
class Dag:
    """Parent-set representation of a directed acyclic graph"""
    nodes: List[int]
    parents: Dict[int, ParentSet]
    labels: List[int] = field(default_factory=list)

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((p, child) for child in self.nodes for p in self.parents.get(child, ()))

    def children(self, node: int) -> List[int]:
        return sorted(c for c in self.nodes if node in self.parents.get(c, ()))

    def ancestors(self, node: int) -> Set[int]:
        return _ancestors(node, self.parents)

    def markov_blanket(self, node: int) -> Set[int]:
        """Parents, children and the children's other parents of `node`"""
        blanket = set(self.parents.get(node, ()))
        for child in self.children(node):
            blanket.add(child)
            blanket.update(self.parents.get(child, ()))
        blanket.discard(node)
        return blanket

    def induced(self, keep: Iterable[int]) -> "Dag":
        """Subgraph on `keep` holding exactly the edges between kept nodes"""
        keep = set(keep)
        nodes = [n for n in self.nodes if n in keep]
        return Dag(
            nodes=nodes,
            parents={n: tuple(p for p in self.parents.get(n, ()) if p in keep) for n in nodes},
            labels=[n for n in self.labels if n in keep],
        )

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from(self.edges())
        return graph


def _ancestors(node: int, parents: Dict[int, ParentSet]) -> Set[int]:
    seen: Set[int] = set()
    stack = list(parents.get(node, ()))
    while stack:
        current = stack.pop()
        if current not in seen:
            seen.add(current)
            stack.extend(parents.get(current, ()))
    return seen


def topological_order(g: Dag) -> List[int]:
    """Parents before children, ties broken by node id"""
    try:
        return list(nx.lexicographical_topological_sort(g.to_networkx()))
    except nx.NetworkXUnfeasible:
        raise CycleError("graph contains a directed cycle")


def explore_candidates(ds: Dataset, x: int, budget: ExplorationBudget, cache: ScoreCache) -> CandidateList:
    """
    Best-first search over parent sets of `x`.

    The frontier starts with every singleton (exact BIC). Each popped set is scored
    exactly and moved to the explored list; its unions with disjoint explored sets
    are queued ranked by BIC*. Sets not beating the empty parent set are dropped,
    and the empty set closes the list as the fallback entry.
    """
    empty_score = bic(ds, x, (), cache)
    others = [v for v in range(ds.n_vars) if v != x]

    frontier: List[Tuple[float, ParentSet]] = [(-bic(ds, x, (v,), cache), (v,)) for v in others]
    heapq.heapify(frontier)
    queued: Set[ParentSet] = {s for _, s in frontier}
    explored: Dict[ParentSet, float] = {}

    while frontier and len(explored) < budget.max_expansions_per_node:
        _, current = heapq.heappop(frontier)
        explored[current] = bic(ds, x, current, cache)
        for other in list(explored):
            if other == current or set(other) & set(current):
                continue
            union = as_set(current + other)
            if len(union) > budget.max_parent_set_size or union in queued:
                continue
            queued.add(union)
            heapq.heappush(frontier, (-bic_star(x, current, other, cache), union))

    ranked = sorted(
        ((s, score) for s, score in explored.items() if score > empty_score),
        key=lambda item: (-item[1], item[0]),
    )
    entries = ranked[: budget.max_candidates_per_node] + [((), empty_score)]
    logger.debug(f"Node {x}: {len(explored)} sets explored, best {entries[0][0]}")
    return CandidateList(child=x, entries=entries, explored=set(explored), frontier=frontier)


def explore_all(ds: Dataset, nodes: Sequence[int], budget: ExplorationBudget, cache: ScoreCache,
                jobs: int = 1) -> Dict[int, CandidateList]:
    """Runs candidate exploration for several nodes on a thread pool"""
    logger.info(f"Exploring candidates for {len(nodes)} nodes with {jobs} worker(s)...")
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        lists = list(pool.map(lambda x: explore_candidates(ds, x, budget, cache), nodes))
    return dict(zip(nodes, lists))


@dataclass
class SelectionTrace:
    """Order in which nodes received their parent set"""
    order: List[int] = field(default_factory=list)
    depth: Dict[int, int] = field(default_factory=dict)
    random_phase: List[int] = field(default_factory=list)


def _rank_order(nodes: ParentSet, candidates: CandidateList) -> List[int]:
    """Nodes ordered by the first candidate entry that contains them"""
    first_seen: Dict[int, int] = {}
    for rank, (parent_set, _) in enumerate(candidates.entries):
        for p in parent_set:
            first_seen.setdefault(p, rank)
    return sorted(nodes, key=lambda p: (first_seen.get(p, len(candidates.entries)), p))


def select_parents(candidates: Dict[int, CandidateList], labels, seed: int = 0,
                   trace: Optional[SelectionTrace] = None) -> Dag:
    """
    Assigns each node its best candidate that keeps the graph acyclic.

    Nodes are visited breadth-first from the labels, so every node linked at distance
    k picks before any node at distance k + 1. Nodes never reached pick afterwards in
    a seeded random order. A node whose candidates all close a cycle gets no parents.
    """
    labels = [int(labels)] if isinstance(labels, (int, np.integer)) else list(labels)
    trace = trace if trace is not None else SelectionTrace()
    parents: Dict[int, ParentSet] = {}

    def candidates_of(node: int) -> CandidateList:
        try:
            return candidates[node]
        except KeyError:
            raise StructureError(f"no candidate list for node {node}")

    def assign(node: int) -> ParentSet:
        for parent_set, _ in candidates_of(node).entries:
            if node in parent_set:
                continue
            if all(node not in _ancestors(c, parents) for c in parent_set):
                parents[node] = parent_set
                return parent_set
        parents[node] = ()
        return ()

    open_list = deque(labels)
    queued = set(labels)
    for label in labels:
        trace.depth[label] = 0
    while open_list:
        node = open_list.popleft()
        accepted = assign(node)
        trace.order.append(node)
        for p in _rank_order(accepted, candidates_of(node)):
            if p not in parents and p not in queued:
                queued.add(p)
                trace.depth[p] = trace.depth[node] + 1
                open_list.append(p)

    remaining = np.array(sorted(set(candidates) - set(parents)), dtype=np.int64)
    np.random.default_rng(seed).shuffle(remaining)
    for node in remaining.tolist():
        assign(node)
        trace.order.append(node)
        trace.random_phase.append(node)

    nodes = sorted(candidates)
    dag = Dag(nodes=nodes, parents={n: parents.get(n, ()) for n in nodes}, labels=labels)
    topological_order(dag)
    return dag


def learn_structure(ds: Dataset, budget: ExplorationBudget, seed: int, jobs: int = 1,
                    cache: Optional[ScoreCache] = None) -> Tuple[Dag, Dict[int, CandidateList]]:
    """Explores candidates for every variable, then assigns parents from the dataset's labels"""
    labels = ds.label_ids
    if not labels:
        raise StructureError("at least one variable must be marked as label before learning")
    cache = cache if cache is not None else ScoreCache()
    candidates = explore_all(ds, list(range(ds.n_vars)), budget, cache, jobs)
    logger.info(f"Selecting parents from {len(labels)} label(s)...")
    dag = select_parents(candidates, labels, seed)
    logger.info(f"Learned network with {len(dag.nodes)} nodes and {len(dag.edges())} edges, "
                f"BIC {network_bic(ds, dag.parents, cache):.2f}")
    return dag, candidates
