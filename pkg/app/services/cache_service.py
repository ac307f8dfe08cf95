# app/services/cache_service.py
import json
import logging
from collections import OrderedDict
from datetime import datetime, timedelta, timezone
from typing import Optional

import redis.asyncio as redis

from app.config.settings import settings

logger = logging.getLogger(__name__)


class CacheService:
    _redis_client: Optional[redis.Redis] = None

    # Fallback em memória: chave -> {"result", "expires_at"}, na ordem de inserção
    _result_cache: "OrderedDict[str, dict]" = OrderedDict()

    @classmethod
    async def _get_redis_client(cls) -> Optional[redis.Redis]:
        if not settings.is_redis_enabled:
            return None
        if cls._redis_client is None:
            try:
                cls._redis_client = redis.from_url(settings.REDIS_URL, decode_responses=True)
                await cls._redis_client.ping()
                logger.info("Cliente Redis conectado com sucesso.")
            except Exception as e:
                logger.warning(f"Não foi possível conectar ao Redis: {e}. Usando fallback em memória.")
                cls._redis_client = None
        return cls._redis_client

    @staticmethod
    def result_key(model_hash: str, approach: str, case: str, horizon: float, grid_step: float) -> str:
        return f"result:{model_hash}:{approach}:{case}:{horizon:g}:{grid_step:g}"

    @staticmethod
    def _now() -> datetime:
        return datetime.now(timezone.utc)

    @classmethod
    def _purge_expired(cls):
        now = cls._now()
        for key in [key for key, entry in cls._result_cache.items() if entry["expires_at"] <= now]:
            del cls._result_cache[key]

    @classmethod
    async def get_result(cls, key: str) -> Optional[dict]:
        client = await cls._get_redis_client()
        if client:
            data = await client.get(key)
            if data:
                logger.info(f"💾 Resultado em cache (redis): {key}")
                return json.loads(data)
            return None
        cls._purge_expired()
        entry = cls._result_cache.get(key)
        if entry is None:
            return None
        logger.info(f"💾 Resultado em cache (memória): {key}")
        return entry["result"]

    @classmethod
    async def set_result(cls, key: str, result: dict):
        ttl = timedelta(hours=settings.RESULT_CACHE_TTL_HOURS)
        client = await cls._get_redis_client()
        if client:
            await client.set(key, json.dumps(result), ex=ttl)
        else:
            cls._purge_expired()
            cls._result_cache.pop(key, None)
            cls._result_cache[key] = {"result": result, "expires_at": cls._now() + ttl}
            while len(cls._result_cache) > settings.RESULT_CACHE_MAX_ENTRIES:
                evicted, _ = cls._result_cache.popitem(last=False)
                logger.debug(f"Cache em memória cheio; removido {evicted}")
        logger.info(f"💾 Resultado armazenado: {key}")

    @classmethod
    async def clear_results(cls) -> int:
        """Remove todos os resultados guardados; devolve quantos foram removidos."""
        removed = 0
        client = await cls._get_redis_client()
        if client:
            async for key in client.scan_iter("result:*"):
                removed += await client.delete(key)
        removed += len(cls._result_cache)
        cls._result_cache.clear()
        logger.info(f"🧹 Cache de resultados limpo ({removed} entradas)")
        return removed
