from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Mapping, Tuple, Union

from pydantic import BaseModel, ConfigDict, model_validator

from app.errors import ModelError
from app.models.reliability import Frequency, UnavailabilityModel


class EventRole(str, Enum):
    ENABLER = "enabler"
    INITIATOR = "initiator"


class BasicEvent(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str
    model: UnavailabilityModel
    role: EventRole = EventRole.ENABLER

    @model_validator(mode="after")
    def _role_matches_model(self):
        is_frequency = isinstance(self.model, Frequency)
        if is_frequency and self.role != EventRole.INITIATOR:
            raise ValueError(f"evento {self.id}: modelo de frequência exige papel 'initiator'")
        if not is_frequency and self.role != EventRole.ENABLER:
            raise ValueError(f"evento {self.id}: modelo de probabilidade exige papel 'enabler'")
        return self


@dataclass(frozen=True)
class Leaf:
    event_id: str

    def __str__(self) -> str:
        return self.event_id


@dataclass(frozen=True)
class Gate:
    """Porta k-em-n do lado das falhas; AND e OR são os casos n-em-n e 1-em-n."""

    k: int
    children: Tuple["Node", ...]
    kind: str = field(default="koon", compare=False)

    def __post_init__(self):
        if not self.children:
            raise ModelError("porta sem filhos")
        if not 1 <= self.k <= len(self.children):
            raise ModelError(f"porta {self.kind}: k={self.k} fora de [1, {len(self.children)}]")

    def __str__(self) -> str:
        inner = ", ".join(str(child) for child in self.children)
        if self.kind in ("and", "or"):
            return f"{self.kind}({inner})"
        return f"{self.k}oo{len(self.children)}({inner})"


Node = Union[Leaf, Gate]


def leaf(event_id: str) -> Leaf:
    return Leaf(event_id)


def and_(*children: Node) -> Gate:
    return Gate(k=len(children), children=tuple(children), kind="and")


def or_(*children: Node) -> Gate:
    return Gate(k=1, children=tuple(children), kind="or")


def koon(k: int, *children: Node) -> Gate:
    return Gate(k=k, children=tuple(children), kind="koon")


@dataclass(frozen=True)
class InitiatorCause:
    """Uma causa de um EI, com os habilitadores que ela coloca em falha."""

    initiating_event: str
    event: BasicEvent
    forced_failed: FrozenSet[str] = frozenset()


@dataclass(frozen=True, eq=False)
class PreventionStructure:
    events: Mapping[str, BasicEvent]
    barriers: Mapping[str, Node]
    ei_barrier_map: Mapping[str, Tuple[str, ...]]
    causes: Tuple[InitiatorCause, ...]

    @property
    def initiating_events(self) -> Tuple[str, ...]:
        return tuple(sorted({cause.initiating_event for cause in self.causes}))


CutSet = FrozenSet[str]
