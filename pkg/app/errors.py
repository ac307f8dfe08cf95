from dataclasses import dataclass
from typing import List


class RiskEngineError(Exception):
    """Base de todos os erros do motor de avaliação."""


class DomainError(RiskEngineError, ValueError):
    """Argumento numérico fora do domínio (tempo negativo, horizonte inválido...)."""


class MisuseError(RiskEngineError, TypeError):
    """Operação chamada com um tipo de modelo que ela não aceita."""


class UnsupportedConfigurationError(RiskEngineError):
    pass


class ModelError(RiskEngineError):
    """Estrutura do modelo incoerente (ciclo, EI sem barreiras declaradas...)."""


class TransformError(RiskEngineError):
    pass


@dataclass(frozen=True)
class ModelIssue:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}" if self.path else self.message


class ModelValidationError(ModelError):
    """Lista completa dos problemas encontrados num documento de modelo."""

    def __init__(self, issues: List[ModelIssue]):
        self.issues = list(issues)
        super().__init__(f"{len(self.issues)} problema(s) de validação no modelo")

    def __str__(self) -> str:
        return "\n".join(str(issue) for issue in self.issues)
