import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterable, List, Mapping, Tuple, Union

import numpy as np

from app.errors import MisuseError, ModelError, UnsupportedConfigurationError
from app.models.fault_tree import (
    BasicEvent,
    CutSet,
    EventRole,
    Gate,
    Leaf,
    Node,
    PreventionStructure,
    and_,
)
from app.services.reliability_service import (
    DEFAULT_GRID_STEP_HOURS,
    DEFAULT_HORIZON_HOURS,
    ReliabilityService,
    TimeGrid,
)

logger = logging.getLogger(__name__)

MAX_ENUMERATION_EVENTS = 16

Probability = Union[float, np.ndarray]
Conditioned = Union[Node, bool]


@dataclass(frozen=True)
class BarrierPfd:
    pfd_avg: float
    risk_reduction_factor: float


def leaf_ids(node: Node) -> List[str]:
    """Folhas da árvore, com repetição."""
    if isinstance(node, Leaf):
        return [node.event_id]
    return [event_id for child in node.children for event_id in leaf_ids(child)]


def condition(node: Node, assignment: Mapping[str, bool]) -> Conditioned:
    """Substitui eventos por estados fixos e simplifica; devolve True/False se a árvore colapsa."""
    if isinstance(node, Leaf):
        return assignment.get(node.event_id, node)

    k = node.k
    remaining = []
    for child in node.children:
        reduced = condition(child, assignment)
        if reduced is True:
            k -= 1
        elif reduced is not False:
            remaining.append(reduced)
    if k <= 0:
        return True
    if k > len(remaining):
        return False
    if len(remaining) == 1:
        return remaining[0]
    if k == len(remaining):
        kind = "and"
    elif k == 1:
        kind = "or"
    else:
        kind = "koon"
    return Gate(k=k, children=tuple(remaining), kind=kind)


def _minimize(sets: Iterable[CutSet]) -> List[CutSet]:
    kept: List[CutSet] = []
    for candidate in sorted(set(sets), key=lambda s: (len(s), sorted(s))):
        if not any(existing <= candidate for existing in kept):
            kept.append(candidate)
    return kept


def _combine(groups: Iterable[List[CutSet]]) -> List[CutSet]:
    # AND: produto cartesiano com absorção a cada passo
    result: List[CutSet] = [frozenset()]
    for group in groups:
        result = _minimize(a | b for a in result for b in group)
    return result


def _cut_sets(node: Node) -> List[CutSet]:
    if isinstance(node, Leaf):
        return [frozenset({node.event_id})]
    children = [_cut_sets(child) for child in node.children]
    if node.k == 1:
        return _minimize(s for group in children for s in group)
    collected: List[CutSet] = []
    for chosen in itertools.combinations(children, node.k):
        collected.extend(_combine(chosen))
    return _minimize(collected)


def _at_least_k(probabilities: List[Probability], k: int) -> Probability:
    n = len(probabilities)
    if k == n:
        return reduce(lambda a, b: a * b, probabilities)
    if k == 1:
        return 1.0 - reduce(lambda a, b: a * b, [1.0 - p for p in probabilities])
    # distribuição do número de filhos em falha
    distribution: List[Probability] = [1.0]
    for p in probabilities:
        shifted: List[Probability] = [0.0] * (len(distribution) + 1)
        for count, mass in enumerate(distribution):
            shifted[count] = shifted[count] + mass * (1.0 - p)
            shifted[count + 1] = shifted[count + 1] + mass * p
        distribution = shifted
    return reduce(lambda a, b: a + b, distribution[k:])


def _independent_probability(node: Node, q: Mapping[str, Probability]) -> Probability:
    if isinstance(node, Leaf):
        return q[node.event_id]
    return _at_least_k([_independent_probability(child, q) for child in node.children], node.k)


def _shannon(node: Conditioned, q: Mapping[str, Probability], cache: Dict[Node, Probability]) -> Probability:
    if node is True:
        return 1.0
    if node is False:
        return 0.0
    if node in cache:
        return cache[node]

    counts = Counter(leaf_ids(node))
    repeated = sorted((event_id for event_id, count in counts.items() if count > 1), key=lambda e: (-counts[e], e))
    if not repeated:
        result = _independent_probability(node, q)
    else:
        pivot = repeated[0]
        failed = _shannon(condition(node, {pivot: True}), q, cache)
        working = _shannon(condition(node, {pivot: False}), q, cache)
        result = q[pivot] * failed + (1.0 - q[pivot]) * working
    cache[node] = result
    return result


class BooleanService:
    @staticmethod
    def minimal_cut_sets(tree: Node) -> List[CutSet]:
        """Cortes mínimos por expansão descendente com absorção, em ordem (tamanho, ids)."""
        return _cut_sets(tree)

    @staticmethod
    def evaluate(tree: Conditioned, failed: Iterable[str]) -> bool:
        """Função de estrutura: True se o conjunto `failed` derruba o topo."""
        if isinstance(tree, bool):
            return tree
        failed = set(failed)
        if isinstance(tree, Leaf):
            return tree.event_id in failed
        return sum(BooleanService.evaluate(child, failed) for child in tree.children) >= tree.k

    @staticmethod
    def probability(tree: Conditioned, q: Mapping[str, Probability]) -> Probability:
        """Probabilidade exata do topo por decomposição de Shannon nos eventos repetidos.

        `q` pode conter escalares ou arrays (uma avaliação por instante da grade).
        O cache de memoização vive apenas durante esta chamada.
        """
        return _shannon(tree, q, {})

    @staticmethod
    def enumeration_probability(tree: Node, q: Mapping[str, float]) -> float:
        """Oráculo: soma sobre os 2^n estados dos eventos da árvore."""
        events = sorted(set(leaf_ids(tree)))
        if len(events) > MAX_ENUMERATION_EVENTS:
            raise UnsupportedConfigurationError(f"enumeração limitada a {MAX_ENUMERATION_EVENTS} eventos")
        total = 0.0
        for state in itertools.product((False, True), repeat=len(events)):
            failed = {event_id for event_id, is_failed in zip(events, state) if is_failed}
            if not BooleanService.evaluate(tree, failed):
                continue
            weight = 1.0
            for event_id, is_failed in zip(events, state):
                weight *= q[event_id] if is_failed else 1.0 - q[event_id]
            total += weight
        return total

    @staticmethod
    def _enablers(tree: Conditioned, events: Mapping[str, BasicEvent]) -> List[BasicEvent]:
        if isinstance(tree, bool):
            return []
        selected = []
        for event_id in sorted(set(leaf_ids(tree))):
            if event_id not in events:
                raise ModelError(f"evento básico desconhecido: {event_id}")
            event = events[event_id]
            if event.role == EventRole.INITIATOR:
                raise MisuseError(f"{event_id} é um iniciador; use erc_frequency")
            selected.append(event)
        return selected

    @staticmethod
    def top_probability(tree: Node, events: Mapping[str, BasicEvent], t: float) -> float:
        enablers = BooleanService._enablers(tree, events)
        q = {event.id: ReliabilityService.instantaneous_unavailability(event.model, t) for event in enablers}
        return float(BooleanService.probability(tree, q))

    @staticmethod
    def _grid_for(enablers: Iterable[BasicEvent], horizon: float, grid_step: float) -> TimeGrid:
        intervals = ReliabilityService.test_intervals(event.model for event in enablers)
        return TimeGrid.build(horizon, grid_step, intervals)

    @staticmethod
    def _profile_on(tree: Conditioned, enablers: List[BasicEvent], grid: TimeGrid) -> np.ndarray:
        q = {
            event.id: ReliabilityService.unavailability_on_grid(event.model, grid.times, grid.left)
            for event in enablers
        }
        values = BooleanService.probability(tree, q)
        return np.broadcast_to(np.asarray(values, dtype=float), grid.times.shape)

    @staticmethod
    def barrier_profile(
        tree: Node,
        events: Mapping[str, BasicEvent],
        horizon: float = DEFAULT_HORIZON_HOURS,
        grid_step: float = DEFAULT_GRID_STEP_HOURS,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Curva q(t) da barreira nos pontos da grade (tempos, valores)."""
        enablers = BooleanService._enablers(tree, events)
        grid = BooleanService._grid_for(enablers, horizon, grid_step)
        return grid.times, BooleanService._profile_on(tree, enablers, grid)

    @staticmethod
    def barrier_pfd_avg(
        tree: Node,
        events: Mapping[str, BasicEvent],
        horizon: float = DEFAULT_HORIZON_HOURS,
        grid_step: float = DEFAULT_GRID_STEP_HOURS,
    ) -> BarrierPfd:
        enablers = BooleanService._enablers(tree, events)
        grid = BooleanService._grid_for(enablers, horizon, grid_step)
        pfd = grid.average(BooleanService._profile_on(tree, enablers, grid))
        if pfd > 1.0 + 1e-12:
            raise ModelError(f"PFDavg acima de 1 ({pfd})")
        factor = 1.0 / pfd if pfd > 0 else math.inf
        return BarrierPfd(pfd_avg=pfd, risk_reduction_factor=factor)

    @staticmethod
    def _check_initiator_cut_sets(cause: BasicEvent, tree: Conditioned, events: Mapping[str, BasicEvent]):
        if tree is False:
            return
        joint = Leaf(cause.id) if tree is True else and_(Leaf(cause.id), tree)
        roles = {event_id: event.role for event_id, event in events.items()}
        roles[cause.id] = EventRole.INITIATOR
        for cut_set in BooleanService.minimal_cut_sets(joint):
            initiators = [event_id for event_id in cut_set if roles.get(event_id) == EventRole.INITIATOR]
            if len(initiators) != 1:
                raise ModelError(
                    f"corte {sorted(cut_set)} contém {len(initiators)} iniciadores (esperado exatamente 1)"
                )

    @staticmethod
    def erc_contributions(
        structure: PreventionStructure,
        horizon: float = DEFAULT_HORIZON_HOURS,
        grid_step: float = DEFAULT_GRID_STEP_HOURS,
    ) -> Dict[str, float]:
        """
        Frequência anual do ERC por causa iniciadora.

        Para cada causa: f × média temporal de P(todas as barreiras do EI falham | causa),
        onde o condicionamento coloca em falha os habilitadores ligados à causa.
        """
        enablers = [event for event in structure.events.values() if event.role == EventRole.ENABLER]
        grid = BooleanService._grid_for(enablers, horizon, grid_step)

        contributions: Dict[str, float] = {}
        for cause in sorted(structure.causes, key=lambda c: c.event.id):
            if cause.initiating_event not in structure.ei_barrier_map:
                raise ModelError(f"evento iniciador sem barreiras declaradas: {cause.initiating_event}")
            if cause.event.role != EventRole.INITIATOR:
                raise MisuseError(f"causa {cause.event.id} não é um evento iniciador")
            barrier_ids = structure.ei_barrier_map[cause.initiating_event]
            unknown = [barrier_id for barrier_id in barrier_ids if barrier_id not in structure.barriers]
            if unknown:
                raise ModelError(f"barreiras desconhecidas para {cause.initiating_event}: {unknown}")

            if barrier_ids:
                joint = and_(*(structure.barriers[barrier_id] for barrier_id in barrier_ids))
                conditioned = condition(joint, {event_id: True for event_id in cause.forced_failed})
            else:
                conditioned = True
            BooleanService._check_initiator_cut_sets(cause.event, conditioned, structure.events)

            if isinstance(conditioned, bool):
                failure = 1.0 if conditioned else 0.0
            else:
                involved = BooleanService._enablers(conditioned, structure.events)
                failure = grid.average(BooleanService._profile_on(conditioned, involved, grid))
            contributions[cause.event.id] = cause.event.model.rate_per_year * failure
            logger.debug(f"Contribuição ERC de {cause.event.id}: {contributions[cause.event.id]:.3e}/ano")
        return contributions

    @staticmethod
    def erc_frequency(
        structure: PreventionStructure,
        horizon: float = DEFAULT_HORIZON_HOURS,
        grid_step: float = DEFAULT_GRID_STEP_HOURS,
    ) -> float:
        contributions = BooleanService.erc_contributions(structure, horizon, grid_step)
        return math.fsum(contributions[key] for key in sorted(contributions))
