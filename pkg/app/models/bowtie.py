from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.event_tree import EventTreeSpec
from app.models.reliability import CcfRole, ComponentReliability
from app.models.semiquant import Complexity


class _Spec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)


# --- árvores de falhas ---------------------------------------------------------

class EventRef(_Spec):
    event: str


class GateRef(_Spec):
    gate: str


class AndSpec(_Spec):
    and_: List["GateSpec"] = Field(alias="and", min_length=1)


class OrSpec(_Spec):
    or_: List["GateSpec"] = Field(alias="or", min_length=1)


class KoonBody(_Spec):
    k: int
    children: List["GateSpec"] = Field(min_length=1)


class KoonSpec(_Spec):
    koon: KoonBody


GateSpec = Union[EventRef, GateRef, AndSpec, OrSpec, KoonSpec]

for _model in (AndSpec, OrSpec, KoonBody, KoonSpec):
    _model.model_rebuild()


# --- eventos e barreiras -------------------------------------------------------

class BasicEventSpec(_Spec):
    id: str = Field(min_length=1)
    description: Optional[str] = None
    component: Optional[str] = None
    ccf_role: CcfRole = CcfRole.INDEPENDENT
    constant_probability: Optional[float] = Field(default=None, ge=0, le=1)

    @model_validator(mode="after")
    def _one_model(self):
        if (self.component is None) == (self.constant_probability is None):
            raise ValueError("informe exatamente um de 'component' ou 'constant_probability'")
        return self


class BarrierSpec(_Spec):
    label: str
    fault_tree: GateSpec


class ControlLoopElement(_Spec):
    id: str
    component: str


class ControlLoopSpec(_Spec):
    elements: List[ControlLoopElement]
    split_ccf_cause: bool = True


class InitiatingEventSpec(_Spec):
    description: Optional[str] = None
    frequency_per_year: Optional[float] = Field(default=None, ge=0)
    control_loop: Optional[ControlLoopSpec] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.frequency_per_year is None) == (self.control_loop is None):
            raise ValueError("informe exatamente um de 'frequency_per_year' ou 'control_loop'")
        return self

    @property
    def is_derived(self) -> bool:
        return self.control_loop is not None


class ConditionalLinkage(_Spec):
    cause: str
    enabler: str


# --- semi-quantitativo ---------------------------------------------------------

class SemiQuantElementSpec(_Spec):
    component: str
    complexity: Complexity = Complexity.SIMPLE


class SemiQuantBarrierSpec(_Spec):
    elements: List[SemiQuantElementSpec]
    hft: int = Field(ge=0, le=2)
    operator_excluded: bool = False


class UncreditedPair(_Spec):
    initiating_event: str
    barrier: str
    reason: Optional[str] = None


class SemiQuantSpec(_Spec):
    barriers: Dict[str, SemiQuantBarrierSpec]
    initiating_event_frequencies: Dict[str, float] = Field(default_factory=dict)
    derived_frequency_per_year: float = Field(default=0.1, gt=0)
    uncredited: List[UncreditedPair] = Field(default_factory=list)


# --- casos e avaliação ---------------------------------------------------------

class CaseTransform(_Spec):
    description: Optional[str] = None
    lambda_scale: float = Field(default=1.0, gt=0)
    sff_scale: float = Field(default=1.0, gt=0)
    test_interval_scale: float = Field(default=1.0, gt=0)
    beta_scale: float = Field(default=1.0, gt=0)

    @property
    def is_identity(self) -> bool:
        return self.lambda_scale == self.sff_scale == self.test_interval_scale == self.beta_scale == 1.0


class EvaluationSpec(_Spec):
    horizon_hours: float = Field(default=35040.0, gt=0)
    grid_step_hours: float = Field(default=4.0, gt=0)


class BowTieModel(_Spec):
    name: str = "bowtie"
    description: Optional[str] = None
    components: List[ComponentReliability]
    basic_events: List[BasicEventSpec]
    gates: Dict[str, GateSpec] = Field(default_factory=dict)
    barriers: Dict[str, BarrierSpec]
    initiating_events: Dict[str, InitiatingEventSpec]
    ei_barrier_map: Dict[str, List[str]]
    conditional_linkages: List[ConditionalLinkage] = Field(default_factory=list)
    event_tree: EventTreeSpec
    semiquant: SemiQuantSpec
    cases: Dict[str, CaseTransform] = Field(default_factory=lambda: {"cas0": CaseTransform()})
    evaluation: EvaluationSpec = Field(default_factory=EvaluationSpec)

    def component(self, component_id: str) -> ComponentReliability:
        for component in self.components:
            if component.id == component_id:
                return component
        raise KeyError(component_id)
