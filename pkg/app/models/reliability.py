from enum import Enum
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

HOURS_PER_YEAR = 8760.0


class PartialTest(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    t2_hours: float = Field(gt=0)
    ptc: float = Field(gt=0, le=1)


class ComponentReliability(BaseModel):
    """Parâmetros de fiabilidade de um tipo de elemento (uma linha da tabela de dados)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = Field(min_length=1)
    lambda_total: float = Field(gt=0, description="taxa de falha total, por hora")
    sff: float = Field(ge=0, lt=1, description="proporção de falhas em segurança")
    t1_hours: float = Field(gt=0, description="intervalo do teste periódico completo")
    partial_test: Optional[PartialTest] = None
    beta: Optional[float] = Field(default=None, ge=0, le=1)

    @model_validator(mode="after")
    def _partial_test_inside_period(self):
        if self.partial_test is not None and not self.partial_test.t2_hours < self.t1_hours:
            raise ValueError("partial_test.t2_hours deve ser menor que t1_hours")
        return self

    @property
    def lambda_du(self) -> float:
        # falhas perigosas não detectadas
        return (1.0 - self.sff) * self.lambda_total


class CcfRole(str, Enum):
    INDEPENDENT = "independent"
    COMMON = "common"


class PeriodicallyTested(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["periodically_tested"] = "periodically_tested"
    component: ComponentReliability
    ccf_role: CcfRole = CcfRole.INDEPENDENT

    @model_validator(mode="after")
    def _common_role_needs_beta(self):
        if self.ccf_role == CcfRole.COMMON and not self.component.beta:
            raise ValueError(f"papel 'common' exige beta > 0 no componente {self.component.id}")
        return self

    @property
    def rate(self) -> float:
        """Taxa λ_DU ajustada ao papel no modelo de fator β."""
        beta = self.component.beta or 0.0
        if self.ccf_role == CcfRole.COMMON:
            return beta * self.component.lambda_du
        return (1.0 - beta) * self.component.lambda_du

    @property
    def test_intervals(self) -> tuple:
        intervals = [self.component.t1_hours]
        if self.component.partial_test is not None:
            intervals.append(self.component.partial_test.t2_hours)
        return tuple(intervals)


class ConstantProbability(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["constant_probability"] = "constant_probability"
    p: float = Field(ge=0, le=1)


class Frequency(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["frequency"] = "frequency"
    rate_per_year: float = Field(ge=0)


UnavailabilityModel = Annotated[
    Union[PeriodicallyTested, ConstantProbability, Frequency],
    Field(discriminator="kind"),
]
