from dataclasses import dataclass
from typing import Union

from pydantic import BaseModel, ConfigDict, Field


class ConstantSource(BaseModel):
    """Probabilidade condicional constante (evento condicional)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    constant: float = Field(ge=0, le=1)


class OnDemandSource(BaseModel):
    """Probabilidade de falha na solicitação de um evento básico constante."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    on_demand: str


class BarrierSource(BaseModel):
    """Probabilidade de falha de uma barreira (PFDavg ou 1/fator)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    barrier: str


ProbabilitySource = Union[ConstantSource, OnDemandSource, BarrierSource]


class OutcomeSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    outcome: str = Field(min_length=1)


class BranchSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    branch: str = Field(min_length=1)
    p_yes: ProbabilitySource
    yes: "EventTreeSpec"
    no: "EventTreeSpec"


EventTreeSpec = Union[BranchSpec, OutcomeSpec]
BranchSpec.model_rebuild()


@dataclass(frozen=True)
class Outcome:
    label: str


@dataclass(frozen=True)
class Branch:
    label: str
    p_yes: float
    yes: "EventTreeNode"
    no: "EventTreeNode"


EventTreeNode = Union[Branch, Outcome]
