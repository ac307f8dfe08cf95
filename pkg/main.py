"""Serviço HTTP do motor de avaliação de risco bow-tie.

Endpoints:
GET  /                      -> healthcheck
GET  /health                -> healthcheck
GET  /bowtie/case-study     -> modelo do estudo de caso (separador)
POST /bowtie/validate       -> valida um documento de modelo (422 com a lista de problemas)
POST /bowtie/evaluate       -> { "model"?, "approach", "case", "horizon_hours"?, "grid_step_hours"? }
POST /bowtie/compare        -> ERC quantitativo vs semi-quantitativo por caso
POST /bowtie/profile        -> { "model"?, "barrier", "case"? } curva q(t) da barreira
DELETE /bowtie/cache        -> limpa o cache de resultados

Env vars (can be set in .env):
LOG_LEVEL               optional (default INFO)
DEBUG                   optional true/false
EVALUATION_WORKERS      optional (threads por avaliação, default 1)
REDIS_ENABLED           optional true/false (cache de resultados)
REDIS_URL               optional
RESULT_CACHE_TTL_HOURS  optional (default 24)
RESULT_CACHE_MAX_ENTRIES optional (fallback em memória, default 128)
"""

import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.config.settings import settings
from app.routes.evaluation_routes import router as evaluation_router

# Configure logging
logging.basicConfig(level=settings.log_level)
logger = logging.getLogger(__name__)

app = FastAPI(title="bowtie-risk-engine")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Register routers
app.include_router(evaluation_router, prefix="/bowtie")


@app.get("/")
async def healthcheck():
    return {"status": "ok"}


@app.get("/health")
async def health():
    return {"status": "ok"}
