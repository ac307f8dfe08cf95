import json
import logging
from typing import Any, Dict, Literal, Optional

from fastapi import APIRouter, HTTPException, Request
from fastapi.concurrency import run_in_threadpool
from pydantic import BaseModel, Field

from app.errors import ModelValidationError, RiskEngineError
from app.models.bowtie import BowTieModel
from app.services.cache_service import CacheService
from app.services.model_service import ModelService
from app.services.report_service import ALL_CASES, BOTH_APPROACHES, ReportService

logger = logging.getLogger(__name__)

router = APIRouter()


class EvaluateRequest(BaseModel):
    model: Optional[Dict[str, Any]] = Field(default=None, description="documento do modelo; omitido = estudo de caso")
    approach: Literal["quant", "semi", "both"] = BOTH_APPROACHES
    case: str = ALL_CASES
    horizon_hours: Optional[float] = Field(default=None, gt=0)
    grid_step_hours: Optional[float] = Field(default=None, gt=0)


class CompareRequest(BaseModel):
    model: Optional[Dict[str, Any]] = None
    case: str = ALL_CASES
    horizon_hours: Optional[float] = Field(default=None, gt=0)
    grid_step_hours: Optional[float] = Field(default=None, gt=0)


class ProfileRequest(BaseModel):
    model: Optional[Dict[str, Any]] = None
    barrier: str
    case: str = "cas0"
    horizon_hours: Optional[float] = Field(default=None, gt=0)
    grid_step_hours: Optional[float] = Field(default=None, gt=0)


def _issues_detail(exc: ModelValidationError) -> dict:
    return {
        "valid": False,
        "issues": [{"path": issue.path, "message": issue.message} for issue in exc.issues],
    }


def _to_http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, ModelValidationError):
        return HTTPException(status_code=422, detail=_issues_detail(exc))
    if isinstance(exc, RiskEngineError):
        return HTTPException(status_code=400, detail=str(exc))
    logger.error(f"❌ Erro inesperado na avaliação: {exc}", exc_info=True)
    return HTTPException(status_code=500, detail="erro interno na avaliação")


def _load(document: Optional[Dict[str, Any]]) -> BowTieModel:
    if document is None:
        return ModelService.load_case_study()
    return ModelService.parse_model(json.dumps(document))


@router.get("/case-study")
async def get_case_study():
    """Modelo do estudo de caso do separador, em JSON canônico."""
    try:
        return json.loads(ModelService.serialize_model(ModelService.load_case_study()))
    except Exception as e:
        raise _to_http_error(e)


@router.post("/validate")
async def validate_model(request: Request):
    body = await request.body()
    try:
        model = ModelService.parse_model(body)
    except Exception as e:
        raise _to_http_error(e)
    return {"valid": True, "name": model.name, "hash": ModelService.model_hash(model)}


@router.post("/evaluate")
async def evaluate(payload: EvaluateRequest):
    try:
        model = _load(payload.model)
        horizon = payload.horizon_hours or model.evaluation.horizon_hours
        grid_step = payload.grid_step_hours or model.evaluation.grid_step_hours
        key = CacheService.result_key(
            ModelService.model_hash(model), payload.approach, payload.case, horizon, grid_step
        )
        cached = await CacheService.get_result(key)
        if cached is not None:
            return cached

        result = await run_in_threadpool(
            ReportService.evaluate, model, payload.approach, payload.case, horizon, grid_step
        )
        document = result.model_dump(mode="json")
        await CacheService.set_result(key, document)
        return document
    except Exception as e:
        raise _to_http_error(e)


@router.post("/compare")
async def compare(payload: CompareRequest):
    try:
        model = _load(payload.model)
        rows = await run_in_threadpool(
            ReportService.compare, model, payload.case, payload.horizon_hours, payload.grid_step_hours
        )
    except Exception as e:
        raise _to_http_error(e)
    return {"rows": [row.model_dump(mode="json") for row in rows]}


@router.post("/profile")
async def barrier_profile(payload: ProfileRequest):
    """Curva q(t) de uma barreira, para traçado fora da ferramenta."""
    try:
        model = _load(payload.model)
        profile = await run_in_threadpool(
            ReportService.barrier_profile,
            model,
            payload.barrier,
            payload.case,
            payload.horizon_hours,
            payload.grid_step_hours,
        )
    except Exception as e:
        raise _to_http_error(e)
    return profile.model_dump(mode="json")


@router.delete("/cache")
async def clear_cache():
    removed = await CacheService.clear_results()
    return {"removed": removed}
