import logging
import re
from typing import Callable, Dict, List, Tuple

from app.errors import DomainError, ModelError
from app.models.event_tree import (
    Branch,
    BranchSpec,
    EventTreeNode,
    EventTreeSpec,
    Outcome,
    OutcomeSpec,
    ProbabilitySource,
)

logger = logging.getLogger(__name__)


def natural_key(label: str) -> Tuple:
    # PhD2 antes de PhD10
    return tuple(int(part) if part.isdigit() else part for part in re.split(r"(\d+)", label))


class EventTreeService:
    @staticmethod
    def resolve(spec: EventTreeSpec, probability_of: Callable[[ProbabilitySource], float]) -> EventTreeNode:
        """Converte a árvore declarada em árvore numérica, resolvendo cada fonte de probabilidade."""
        if isinstance(spec, BranchSpec):
            return Branch(
                label=spec.branch,
                p_yes=float(probability_of(spec.p_yes)),
                yes=EventTreeService.resolve(spec.yes, probability_of),
                no=EventTreeService.resolve(spec.no, probability_of),
            )
        return Outcome(label=spec.outcome)

    @staticmethod
    def outcome_labels(tree) -> List[str]:
        """Rótulos das folhas, aceita tanto a árvore declarada quanto a resolvida."""
        if isinstance(tree, Outcome):
            return [tree.label]
        if isinstance(tree, OutcomeSpec):
            return [tree.outcome]
        return EventTreeService.outcome_labels(tree.yes) + EventTreeService.outcome_labels(tree.no)

    @staticmethod
    def propagate(erc_frequency: float, tree: EventTreeNode) -> Dict[str, float]:
        """
        Propaga a frequência do ERC até os fenômenos perigosos (PhD).

        Returns:
            dict rótulo -> frequência anual, em ordem natural dos rótulos
        """
        if erc_frequency < 0:
            raise DomainError(f"frequência do ERC negativa: {erc_frequency}")
        labels = EventTreeService.outcome_labels(tree)
        duplicated = sorted({label for label in labels if labels.count(label) > 1})
        if duplicated:
            raise ModelError(f"rótulos de resultado repetidos: {duplicated}")

        frequencies: Dict[str, float] = {}
        pending = [(tree, erc_frequency)]
        while pending:
            node, frequency = pending.pop()
            if isinstance(node, Outcome):
                frequencies[node.label] = frequency
                continue
            if not 0.0 <= node.p_yes <= 1.0:
                raise ModelError(f"ramo '{node.label}': probabilidade {node.p_yes} fora de [0, 1]")
            pending.append((node.yes, frequency * node.p_yes))
            pending.append((node.no, frequency * (1.0 - node.p_yes)))

        return {label: frequencies[label] for label in sorted(frequencies, key=natural_key)}

    @staticmethod
    def outcome_ratios(tree: EventTreeNode) -> Dict[str, float]:
        """Razões PhD/ERC: a propagação de uma frequência unitária."""
        return EventTreeService.propagate(1.0, tree)
