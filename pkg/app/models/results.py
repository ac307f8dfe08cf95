from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class Approach(str, Enum):
    QUANTITATIVE = "quant"
    SEMI_QUANTITATIVE = "semi"

    @property
    def title(self) -> str:
        return "quantitativa" if self is Approach.QUANTITATIVE else "semi-quantitativa"


class BarrierMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    barrier_id: str
    pfd_avg: Optional[float] = Field(default=None, ge=0, le=1)
    confidence_level: Optional[str] = None
    risk_reduction_factor: float


class ComponentMetrics(BaseModel):
    """PFDavg numérico de um componente isolado (sem β) ao lado da aproximação λ·T/2."""

    model_config = ConfigDict(frozen=True)

    component_id: str
    pfd_avg: float = Field(ge=0, le=1)
    simplified_pfd_avg: float = Field(ge=0)


class CaseResult(BaseModel):
    """Resultado de uma abordagem num caso de sensibilidade."""

    model_config = ConfigDict(frozen=True)

    approach: Approach
    case_id: str
    barriers: Dict[str, BarrierMetrics]
    erc_frequency: float = Field(ge=0)
    contributions: Dict[str, float]
    phd_frequencies: Dict[str, float]
    components: Dict[str, ComponentMetrics] = Field(default_factory=dict)


class EvaluationMetadata(BaseModel):
    model_config = ConfigDict(frozen=True, protected_namespaces=())

    model_name: str
    model_hash: str
    horizon_hours: float
    grid_step_hours: float


class EvaluationResult(BaseModel):
    metadata: EvaluationMetadata
    results: List[CaseResult]

    def get(self, approach: Approach, case_id: str) -> CaseResult:
        for result in self.results:
            if result.approach == approach and result.case_id == case_id:
                return result
        raise KeyError((approach.value, case_id))

    @property
    def approaches(self) -> List[Approach]:
        return [approach for approach in Approach if any(r.approach == approach for r in self.results)]

    @property
    def case_ids(self) -> List[str]:
        seen: List[str] = []
        for result in self.results:
            if result.case_id not in seen:
                seen.append(result.case_id)
        return seen


class BarrierProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    barrier_id: str
    case_id: str
    times: List[float]
    values: List[float]


class ComparisonRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    case_id: str
    quantitative_erc: float
    semi_quantitative_erc: float
    ratio: Optional[float] = None
