import os
from dotenv import load_dotenv
from pydantic_settings import BaseSettings

# Carrega variáveis de ambiente
load_dotenv()


class Settings(BaseSettings):
    # Configurações da aplicação
    DEBUG: bool = os.getenv("DEBUG", "False").lower() == "true"
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Avaliação: 1 = casos avaliados em sequência
    EVALUATION_WORKERS: int = int(os.getenv("EVALUATION_WORKERS", "1"))

    # Configurações do Redis para cache de resultados
    REDIS_URL: str = os.getenv("REDIS_URL", "redis://localhost:6379/0")
    REDIS_ENABLED: bool = os.getenv("REDIS_ENABLED", "False").lower() == "true"
    RESULT_CACHE_TTL_HOURS: int = int(os.getenv("RESULT_CACHE_TTL_HOURS", "24"))
    # Limite do fallback em memória (entradas mais antigas saem primeiro)
    RESULT_CACHE_MAX_ENTRIES: int = int(os.getenv("RESULT_CACHE_MAX_ENTRIES", "128"))

    @property
    def is_redis_enabled(self) -> bool:
        return self.REDIS_ENABLED

    @property
    def log_level(self) -> str:
        return "DEBUG" if self.DEBUG else self.LOG_LEVEL.upper()

    class Config:
        env_file = ".env"


settings = Settings()
