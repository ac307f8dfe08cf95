import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Union

import numpy as np

from app.errors import DomainError, MisuseError, UnsupportedConfigurationError
from app.models.reliability import (
    CcfRole,
    ComponentReliability,
    ConstantProbability,
    Frequency,
    PeriodicallyTested,
)

logger = logging.getLogger(__name__)

DEFAULT_HORIZON_HOURS = 35040.0
DEFAULT_GRID_STEP_HOURS = 4.0

# tolerância para reconhecer um instante de teste exato
_INSTANT_TOLERANCE = 1e-9

TimeLike = Union[float, np.ndarray]


def check_horizon(horizon: float, grid_step: float):
    if not horizon > 0:
        raise DomainError(f"horizonte deve ser positivo (recebido {horizon})")
    if not 0 < grid_step <= horizon:
        raise DomainError(f"passo da grade deve estar em ]0, {horizon}] (recebido {grid_step})")


def _elapsed(times: np.ndarray, period: float, left: np.ndarray) -> np.ndarray:
    """Tempo decorrido desde o último teste de período `period`.

    Nos instantes de teste o valor é 0 (continuidade à direita) ou `period`
    quando se pede o limite à esquerda.
    """
    ratio = times / period
    nearest = np.round(ratio)
    on_instant = np.abs(ratio - nearest) <= _INSTANT_TOLERANCE
    last_test = np.where(on_instant, nearest, np.floor(ratio))
    last_test = np.where(on_instant & left & (times > 0), last_test - 1, last_test)
    return np.maximum(times - period * last_test, 0.0)


@dataclass(frozen=True)
class TimeGrid:
    """Grade de integração com pontos forçados nas descontinuidades.

    Cada segmento entre dois instantes de teste é amostrado separadamente; o
    último ponto de cada segmento é avaliado como limite à esquerda, de modo que
    a regra dos trapézios nunca atravessa um salto do dente de serra.
    """

    times: np.ndarray
    left: np.ndarray
    weights: np.ndarray
    horizon: float

    @classmethod
    def build(cls, horizon: float, grid_step: float, test_intervals: Iterable[float] = ()) -> "TimeGrid":
        check_horizon(horizon, grid_step)
        breakpoints = {0.0, float(horizon)}
        for interval in set(test_intervals):
            k = 1
            while k * interval < horizon * (1 - _INSTANT_TOLERANCE):
                breakpoints.add(k * interval)
                k += 1
        ordered = sorted(breakpoints)

        times: List[np.ndarray] = []
        left: List[np.ndarray] = []
        weights: List[np.ndarray] = []
        for start, end in zip(ordered[:-1], ordered[1:]):
            n = max(1, math.ceil((end - start) / grid_step - _INSTANT_TOLERANCE))
            points = start + (end - start) * np.arange(n + 1) / n
            points[-1] = end
            flags = np.zeros(n + 1, dtype=bool)
            flags[-1] = True
            w = np.zeros(n + 1)
            widths = np.diff(points)
            w[:-1] += widths / 2
            w[1:] += widths / 2
            times.append(points)
            left.append(flags)
            weights.append(w)

        grid = cls(
            times=np.concatenate(times),
            left=np.concatenate(left),
            weights=np.concatenate(weights),
            horizon=float(horizon),
        )
        logger.debug(f"Grade construída: {len(grid.times)} pontos, {len(ordered) - 1} segmentos")
        return grid

    def average(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values) / self.horizon)


class ReliabilityService:
    @staticmethod
    def unavailability_on_grid(model, times: np.ndarray, left: np.ndarray) -> np.ndarray:
        """Indisponibilidade q(t) vetorizada; `left` marca os pontos avaliados como limite à esquerda."""
        if isinstance(model, Frequency):
            raise MisuseError("um modelo de frequência não tem indisponibilidade; use erc_frequency")
        times = np.asarray(times, dtype=float)
        if np.any(times < 0):
            raise DomainError("o tempo deve ser >= 0")
        if isinstance(model, ConstantProbability):
            return np.full(times.shape, model.p)
        if not isinstance(model, PeriodicallyTested):
            raise MisuseError(f"modelo de indisponibilidade desconhecido: {type(model).__name__}")

        left = np.broadcast_to(np.asarray(left, dtype=bool), times.shape)
        component = model.component
        rate = model.rate
        tau_full = _elapsed(times, component.t1_hours, left)
        if component.partial_test is None:
            return -np.expm1(-rate * tau_full)

        # parte coberta pelo teste parcial: reposta a cada T2 e também a cada T1
        ptc = component.partial_test.ptc
        tau_partial = np.minimum(_elapsed(times, component.partial_test.t2_hours, left), tau_full)
        exponent = ptc * rate * tau_partial + (1.0 - ptc) * rate * tau_full
        return -np.expm1(-exponent)

    @staticmethod
    def instantaneous_unavailability(model, t: TimeLike, left_limit: bool = False) -> TimeLike:
        """
        Probabilidade de o elemento estar em falha perigosa não detectada no instante t.

        Args:
            model: PeriodicallyTested ou ConstantProbability
            t: instante (horas), escalar ou array
            left_limit: avalia o limite à esquerda nos instantes de teste (t⁻)
        Returns:
            q(t) em [0, 1], do mesmo formato que t
        """
        scalar = np.ndim(t) == 0
        values = ReliabilityService.unavailability_on_grid(model, np.atleast_1d(t), left_limit)
        return float(values[0]) if scalar else values

    @staticmethod
    def test_intervals(models: Iterable) -> List[float]:
        intervals = set()
        for model in models:
            if isinstance(model, PeriodicallyTested):
                intervals.update(model.test_intervals)
        return sorted(intervals)

    @staticmethod
    def average_unavailability(
        model,
        horizon: float = DEFAULT_HORIZON_HOURS,
        grid_step: float = DEFAULT_GRID_STEP_HOURS,
    ) -> float:
        """Média temporal de q(t) em [0, horizon] pela regra dos trapézios."""
        if isinstance(model, Frequency):
            raise MisuseError("um modelo de frequência não tem indisponibilidade média")
        grid = TimeGrid.build(horizon, grid_step, ReliabilityService.test_intervals([model]))
        values = ReliabilityService.unavailability_on_grid(model, grid.times, grid.left)
        return grid.average(values)

    @staticmethod
    def analytic_average_unavailability(model, horizon: float = DEFAULT_HORIZON_HOURS) -> float:
        """Média exata de 1 - exp(-λτ) para um elemento sem teste parcial."""
        if isinstance(model, ConstantProbability):
            return model.p
        if not isinstance(model, PeriodicallyTested):
            raise MisuseError("média analítica só existe para modelos de probabilidade")
        if model.component.partial_test is not None:
            raise UnsupportedConfigurationError("média analítica não cobre testes parciais")
        if not horizon > 0:
            raise DomainError(f"horizonte deve ser positivo (recebido {horizon})")

        rate = model.rate
        period = model.component.t1_hours

        def _integral(duration: float) -> float:
            # ∫_0^d (1 - e^{-λs}) ds
            return duration + math.expm1(-rate * duration) / rate

        full_periods = math.floor(horizon / period + _INSTANT_TOLERANCE)
        remainder = max(horizon - full_periods * period, 0.0)
        return (full_periods * _integral(period) + _integral(remainder)) / horizon

    @staticmethod
    def simplified_pfd_avg(model) -> float:
        """Aproximação de primeira ordem da norma: λ·T/2 por parcela de teste."""
        if isinstance(model, ConstantProbability):
            return model.p
        if not isinstance(model, PeriodicallyTested):
            raise MisuseError("PFDavg simplificado só existe para modelos de probabilidade")
        component = model.component
        if component.partial_test is None:
            return model.rate * component.t1_hours / 2
        ptc = component.partial_test.ptc
        return (
            ptc * model.rate * component.partial_test.t2_hours / 2
            + (1 - ptc) * model.rate * component.t1_hours / 2
        )

    @staticmethod
    def split_ccf(group: Sequence[ComponentReliability]) -> Dict[str, object]:
        """
        Separa um grupo de elementos redundantes segundo o modelo do fator β.

        Returns:
            {"independent": [modelo por membro], "common": modelo partilhado}
        """
        if not group:
            raise UnsupportedConfigurationError("grupo de causa comum vazio")
        betas = {member.beta for member in group}
        if None in betas:
            raise MisuseError("todos os membros do grupo precisam de um beta")
        if len(betas) != 1:
            raise UnsupportedConfigurationError(f"betas diferentes no grupo: {sorted(betas)}")
        beta = betas.pop()
        if beta <= 0:
            raise UnsupportedConfigurationError("grupo com beta = 0: use modelos independentes")
        reference = group[0].lambda_du
        if any(not math.isclose(member.lambda_du, reference, rel_tol=1e-12) for member in group):
            raise UnsupportedConfigurationError("λ_DU heterogêneo no grupo de causa comum")

        return {
            "independent": [PeriodicallyTested(component=member, ccf_role=CcfRole.INDEPENDENT) for member in group],
            "common": PeriodicallyTested(component=group[0], ccf_role=CcfRole.COMMON),
        }
