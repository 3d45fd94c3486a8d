"""Label-specific model reduction.

A genetic algorithm searches subsets E of the label's ancestors maximising
F(G) = U(label, E) + L(G) - R(E), where L rewards nodes that keep their own
parents and R penalizes the number of states beyond a characteristic count.
"""

import itertools
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from src.core.dataset import Dataset
from src.core.infoscore import as_set, uncertainty_coefficient
from src.core.structure import Dag
from src.exceptions import RootCauseError
from src.models import GaConfig

logger = logging.getLogger(__name__)

Mask = Tuple[bool, ...]

EXHAUSTIVE_LIMIT = 20


@dataclass(frozen=True)
class FitnessTerms:
    u: float
    l: float
    r: float

    @property
    def total(self) -> float:
        return self.u + self.l - self.r


@dataclass(frozen=True)
class Chromosome:
    """Selection mask over the label's ancestors and its cached fitness"""
    mask: Mask
    fitness: float

    def selected(self, genes: Sequence[int]) -> Tuple[int, ...]:
        return tuple(g for g, on in zip(genes, self.mask) if on)


@dataclass
class ReducedModel:
    """Induced subgraph explaining one label"""
    label: int
    dag: Dag
    fitness: float
    terms: FitnessTerms
    config: GaConfig
    provenance: str = ""
    history: List[float] = field(default_factory=list)
    evaluations: int = 0

    @property
    def features(self) -> List[int]:
        return [n for n in self.dag.nodes if n != self.label]

    @property
    def used_features(self) -> List[int]:
        """Features in the label's Markov blanket, the only ones its posterior depends on"""
        return sorted(self.dag.markov_blanket(self.label))


def state_count(ds: Dataset, e: Iterable[int]) -> int:
    """Sum of the cardinalities of the selected nodes"""
    return int(sum(ds.cardinality(v) for v in as_set(e)))


def regularization(e: Iterable[int], cfg: GaConfig, ds: Dataset) -> float:
    """R(E) = C * max(0, (states(E) - tau) / tau)^2"""
    if cfg.tau is None:
        raise RootCauseError("tau must be resolved before computing the regularization")
    hinge = max(0.0, (state_count(ds, e) - cfg.tau) / cfg.tau)
    return cfg.C * hinge ** 2


def local_term(ds: Dataset, e: Iterable[int], global_dag: Dag) -> float:
    """Mean over kept nodes Y of U(Y, parents_global(Y) within E); 0 for empty E"""
    e = as_set(e)
    if not e:
        return 0.0
    kept = set(e)
    scores = [
        uncertainty_coefficient(ds, y, [p for p in global_dag.parents.get(y, ()) if p in kept])
        for y in e
    ]
    return float(np.mean(scores))


def fitness_terms(ds: Dataset, label: int, e: Iterable[int], global_dag: Dag, cfg: GaConfig) -> FitnessTerms:
    e = as_set(e)
    if not set(e) <= global_dag.ancestors(label):
        raise RootCauseError(f"selection {list(e)} is not within the ancestors of node {label}")
    cfg = cfg.resolved(ds.cardinality(label))
    if not e:
        return FitnessTerms(0.0, 0.0, 0.0)
    return FitnessTerms(
        u=uncertainty_coefficient(ds, label, e),
        l=local_term(ds, e, global_dag),
        r=regularization(e, cfg, ds),
    )


def fitness(ds: Dataset, label: int, e: Iterable[int], global_dag: Dag, cfg: GaConfig) -> float:
    """F(G) = U(label, E) + L(G) - R(E)"""
    return fitness_terms(ds, label, e, global_dag, cfg).total


class _Evaluator:
    """Memoized, pool-parallel fitness of selection masks"""

    def __init__(self, ds: Dataset, label: int, global_dag: Dag, cfg: GaConfig, genes: Sequence[int], jobs: int):
        self.ds = ds
        self.label = label
        self.global_dag = global_dag
        self.cfg = cfg
        self.genes = list(genes)
        self.jobs = jobs
        self.memo: Dict[Mask, float] = {}
        self._lock = threading.Lock()

    def _score(self, mask: Mask) -> float:
        selected = [g for g, on in zip(self.genes, mask) if on]
        value = fitness(self.ds, self.label, selected, self.global_dag, self.cfg)
        with self._lock:
            self.memo[mask] = value
        return value

    def rank(self, masks: Iterable[Mask]) -> List[Chromosome]:
        unique = list(dict.fromkeys(masks))
        todo = [m for m in unique if m not in self.memo]
        if todo:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                list(pool.map(self._score, todo))
        population = [Chromosome(mask=m, fitness=self.memo[m]) for m in unique]
        return sorted(population, key=lambda c: (-c.fitness, c.mask))


def _initial_masks(genes: Sequence[int], direct: Sequence[int], cfg: GaConfig) -> List[Mask]:
    positions = [genes.index(p) for p in direct]
    n = len(genes)

    def to_mask(chosen: Iterable[int]) -> Mask:
        on = set(chosen)
        return tuple(i in on for i in range(n))

    # the empty selection keeps the trivial model in the running
    masks = [to_mask(())]
    if len(positions) <= cfg.max_initial_parents:
        return masks + [
            to_mask(combo)
            for k in range(1, len(positions) + 1)
            for combo in itertools.combinations(positions, k)
        ]

    logger.warning(f"{len(positions)} direct parents; sampling generation 0 instead of enumerating it")
    rng = np.random.default_rng([cfg.seed, 0])
    while len(masks) <= 2 ** cfg.max_initial_parents:
        draw = rng.random(len(positions)) < 0.5
        if draw.any():
            masks.append(to_mask(p for p, on in zip(positions, draw) if on))
    return masks


def _breed(rng: np.random.Generator, elites: Sequence[Chromosome], mutation_rate: float) -> Mask:
    """Uniform crossover of two elites followed by per-gene mutation and one forced flip"""
    a = np.array(elites[rng.integers(len(elites))].mask, dtype=bool)
    b = np.array(elites[rng.integers(len(elites))].mask, dtype=bool)
    child = np.where(rng.random(a.size) < 0.5, a, b)
    flips = rng.random(a.size) < mutation_rate
    flips[rng.integers(a.size)] = True
    return tuple(bool(v) for v in child ^ flips)


def _reduced_model(ds: Dataset, global_dag: Dag, label: int, selected: Sequence[int], cfg: GaConfig,
                   provenance: str, history: List[float], evaluations: int) -> ReducedModel:
    terms = fitness_terms(ds, label, selected, global_dag, cfg)
    return ReducedModel(
        label=label,
        dag=global_dag.induced(set(selected) | {label}),
        fitness=terms.total,
        terms=terms,
        config=cfg,
        provenance=provenance,
        history=history,
        evaluations=evaluations,
    )


def exhaustive_search(ds: Dataset, global_dag: Dag, label: int, cfg: GaConfig, provenance: str = "",
                      jobs: int = 1) -> ReducedModel:
    """Scores every subset of the label's ancestors and keeps the fittest"""
    if label not in global_dag.labels:
        raise RootCauseError(f"node {label} is not a label of the network")
    cfg = cfg.resolved(ds.cardinality(label))
    genes = sorted(global_dag.ancestors(label))
    if len(genes) > EXHAUSTIVE_LIMIT:
        raise RootCauseError(f"exhaustive search over {len(genes)} ancestors refused (limit {EXHAUSTIVE_LIMIT})")
    if not genes:
        return _reduced_model(ds, global_dag, label, (), cfg, provenance, [0.0], 0)

    evaluator = _Evaluator(ds, label, global_dag, cfg, genes, jobs)
    masks = list(itertools.product((False, True), repeat=len(genes)))
    best = evaluator.rank(masks)[0]
    logger.info(f"Exhaustive search over {len(masks)} subsets, best fitness {best.fitness:.6f}")
    return _reduced_model(ds, global_dag, label, best.selected(genes), cfg, provenance,
                          [best.fitness], len(evaluator.memo))


def extract_root_cause(ds: Dataset, global_dag: Dag, label: int, cfg: GaConfig, provenance: str = "",
                       jobs: int = 1) -> ReducedModel:
    """
    Genetic search for the fittest subset of the label's ancestors.

    Generation 0 holds the empty selection and every combination of the label's
    direct parents.
    Each following generation keeps the K elites, breeds children from them and
    keeps the K fittest. The search stops after `patience` consecutive generations
    improving the best fitness by less than `plateau`, or at `max_gen`.
    """
    if label not in global_dag.labels:
        raise RootCauseError(f"node {label} is not a label of the network")
    cfg = cfg.resolved(ds.cardinality(label))
    if cfg.exhaustive:
        return exhaustive_search(ds, global_dag, label, cfg, provenance, jobs)

    genes = sorted(global_dag.ancestors(label))
    if not genes:
        logger.warning(f"Node {label} has no ancestors; returning the label alone")
        return _reduced_model(ds, global_dag, label, (), cfg, provenance, [0.0], 0)

    evaluator = _Evaluator(ds, label, global_dag, cfg, genes, jobs)
    direct = [p for p in genes if p in global_dag.parents.get(label, ())]
    best = evaluator.rank(_initial_masks(genes, direct, cfg))[: cfg.K]
    history = [best[0].fitness]
    logger.info(f"Generation 0: {len(evaluator.memo)} individuals over {len(genes)} ancestors, "
                f"best fitness {best[0].fitness:.6f}")

    generation = 1
    stagnation = 0
    while generation < cfg.max_gen:
        rng = np.random.default_rng([cfg.seed, generation])
        children = [_breed(rng, best, cfg.mutation_rate) for _ in range(cfg.offspring)]
        ranked = evaluator.rank([c.mask for c in best] + children)[: cfg.K]
        improvement = ranked[0].fitness - best[0].fitness
        best = ranked
        history.append(best[0].fitness)
        logger.debug(f"Generation {generation}: best fitness {best[0].fitness:.6f}")
        generation += 1
        stagnation = stagnation + 1 if improvement < cfg.plateau else 0
        if stagnation >= cfg.patience:
            break

    logger.info(f"Stopped after {generation} generations and {len(evaluator.memo)} evaluations")
    return _reduced_model(ds, global_dag, label, best[0].selected(genes), cfg, provenance,
                          history, len(evaluator.memo))
