from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class Complexity(str, Enum):
    SIMPLE = "simple"        # sem microprocessador
    COMPLEX = "complex"      # com microprocessador


class ConfidenceLevel(str, Enum):
    NONE = "none"
    NC1 = "NC1"
    NC2 = "NC2"
    NC3 = "NC3"
    NC4 = "NC4"

    @property
    def rank(self) -> int:
        return 0 if self is ConfidenceLevel.NONE else int(self.value[-1])

    @property
    def risk_reduction_factor(self) -> int:
        return 10 ** self.rank


class CreditedElement(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    complexity: Complexity = Complexity.SIMPLE
    sff: float = Field(ge=0, lt=1)


class SemiQuantBarrierProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    barrier_id: str
    complexity: Complexity
    hft: int = Field(ge=0, le=2)
    sff_effective: float = Field(ge=0, lt=1)
    operator_excluded: bool = False
