import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from app.errors import ModelError
from app.models.event_tree import EventTreeNode
from app.models.semiquant import (
    Complexity,
    ConfidenceLevel,
    CreditedElement,
    SemiQuantBarrierProfile,
)
from app.services.event_tree_service import EventTreeService

logger = logging.getLogger(__name__)

NONE, NC1, NC2, NC3, NC4 = (
    ConfidenceLevel.NONE,
    ConfidenceLevel.NC1,
    ConfidenceLevel.NC2,
    ConfidenceLevel.NC3,
    ConfidenceLevel.NC4,
)

# NC máximo por faixa de SFF (linhas) e HFT 0/1/2 (colunas)
NC_TABLE: Dict[Complexity, Tuple[Tuple[ConfidenceLevel, ...], ...]] = {
    Complexity.SIMPLE: (
        (NC1, NC2, NC3),   # < 60%
        (NC2, NC3, NC4),   # 60% a < 90%
        (NC3, NC4, NC4),   # 90% a < 99%
        (NC3, NC4, NC4),   # >= 99%
    ),
    Complexity.COMPLEX: (
        (NONE, NC1, NC2),
        (NC1, NC2, NC3),
        (NC2, NC3, NC4),
        (NC3, NC4, NC4),
    ),
}

SFF_BUCKET_BOUNDS = (0.60, 0.90, 0.99)


def sff_bucket(sff: float) -> int:
    return sum(1 for bound in SFF_BUCKET_BOUNDS if sff >= bound)


@dataclass(frozen=True)
class SemiQuantOutcome:
    erc_frequency: float
    contributions: Dict[str, float]
    phd_frequencies: Dict[str, float]


class SemiQuantService:
    @staticmethod
    def nc_lookup(profile: SemiQuantBarrierProfile) -> ConfidenceLevel:
        """Célula da tabela (complexidade, faixa de SFF, HFT)."""
        return NC_TABLE[profile.complexity][sff_bucket(profile.sff_effective)][profile.hft]

    @staticmethod
    def effective_profile(
        barrier_id: str,
        elements: Sequence[CreditedElement],
        hft: int,
        operator_excluded: bool = False,
    ) -> SemiQuantBarrierProfile:
        """
        Perfil da barreira a partir dos elementos mais penalizantes.

        A barreira é complexa se algum elemento o for; o SFF efetivo é o mínimo
        dos elementos creditados. O HFT é declarado pelo modelo.
        """
        if not elements:
            raise ModelError(f"barreira {barrier_id}: lista de elementos vazia")
        complexity = (
            Complexity.COMPLEX
            if any(element.complexity == Complexity.COMPLEX for element in elements)
            else Complexity.SIMPLE
        )
        return SemiQuantBarrierProfile(
            barrier_id=barrier_id,
            complexity=complexity,
            hft=hft,
            sff_effective=min(element.sff for element in elements),
            operator_excluded=operator_excluded,
        )

    @staticmethod
    def semiquant_propagate(
        ei_frequencies: Mapping[str, float],
        ei_barrier_map: Mapping[str, Sequence[str]],
        factors: Mapping[str, float],
        event_tree: EventTreeNode,
        uncredited: Iterable[Tuple[str, str]] = (),
    ) -> SemiQuantOutcome:
        """
        Propagação por divisões e somas: ERC = Σ_e f_e / Π fatores das barreiras de e.

        Pares (EI, barreira) em `uncredited` não dividem a frequência daquele EI.
        """
        skipped = set(uncredited)
        contributions: Dict[str, float] = {}
        for ei in sorted(ei_frequencies):
            if ei not in ei_barrier_map:
                raise ModelError(f"evento iniciador sem barreiras declaradas: {ei}")
            divisor = 1.0
            for barrier_id in ei_barrier_map[ei]:
                if barrier_id not in factors:
                    raise ModelError(f"barreira {barrier_id} sem fator de redução de risco")
                if (ei, barrier_id) in skipped:
                    logger.debug(f"Barreira {barrier_id} não creditada para {ei}")
                    continue
                divisor *= factors[barrier_id]
            contributions[ei] = ei_frequencies[ei] / divisor

        erc = math.fsum(contributions[ei] for ei in sorted(contributions))
        return SemiQuantOutcome(
            erc_frequency=erc,
            contributions=contributions,
            phd_frequencies=EventTreeService.propagate(erc, event_tree),
        )
