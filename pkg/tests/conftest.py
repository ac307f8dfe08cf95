import json
import os
import sys

import pytest

# Raiz do projeto no sys.path para importar o pacote `app`
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.models.results import Approach  # noqa: E402
from app.services.model_service import CASE_STUDY_PATH, ModelService  # noqa: E402
from app.services.report_service import ReportService  # noqa: E402


@pytest.fixture(scope="session")
def case_study():
    return ModelService.load_case_study()


@pytest.fixture
def case_study_document():
    """Documento JSON do estudo de caso, para ser mutado nos testes."""
    with open(CASE_STUDY_PATH, encoding="utf-8") as handle:
        return json.load(handle)


@pytest.fixture(scope="session")
def structure(case_study):
    return ModelService.prevention_structure(case_study)


@pytest.fixture(scope="session")
def evaluation(case_study):
    """Ambas as abordagens em todos os casos, com a grade padrão (4 h)."""
    return ReportService.evaluate(case_study, "both", "all")


@pytest.fixture(scope="session")
def quant_cas0(evaluation):
    return evaluation.get(Approach.QUANTITATIVE, "cas0")


@pytest.fixture(scope="session")
def semi_cas0(evaluation):
    return evaluation.get(Approach.SEMI_QUANTITATIVE, "cas0")
