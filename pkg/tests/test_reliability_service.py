"""
Testes do núcleo de fiabilidade: dente de serra exponencial, teste parcial,
médias temporais e separação de causa comum (fator β).
"""

import math

import numpy as np
import pytest

from app.errors import DomainError, MisuseError, UnsupportedConfigurationError
from app.models.reliability import (
    CcfRole,
    ComponentReliability,
    ConstantProbability,
    Frequency,
    PartialTest,
    PeriodicallyTested,
)
from app.services.model_service import ModelService
from app.services.reliability_service import ReliabilityService, TimeGrid

RV = ComponentReliability(id="RV", lambda_total=1.392e-6, sff=0.5, t1_hours=35040)
ESDV = ComponentReliability(
    id="ESDV",
    lambda_total=1.114e-5,
    sff=0.625,
    t1_hours=35040,
    partial_test=PartialTest(t2_hours=4380, ptc=0.9),
)
CP = ComponentReliability(id="CP", lambda_total=3.2e-6, sff=0.8, t1_hours=35040, beta=0.05)


class TestInstantaneousUnavailability:
    def test_zero_at_start(self):
        assert ReliabilityService.instantaneous_unavailability(PeriodicallyTested(component=RV), 0.0) == 0.0

    def test_exponential_between_tests(self):
        model = PeriodicallyTested(component=RV)
        t = 10000.0
        expected = 1.0 - math.exp(-RV.lambda_du * t)
        assert ReliabilityService.instantaneous_unavailability(model, t) == pytest.approx(expected, rel=1e-12)

    def test_reset_is_right_continuous(self):
        component = ComponentReliability(id="X", lambda_total=1e-5, sff=0.0, t1_hours=1000)
        model = PeriodicallyTested(component=component)
        assert ReliabilityService.instantaneous_unavailability(model, 1000.0) == 0.0
        left = ReliabilityService.instantaneous_unavailability(model, 1000.0, left_limit=True)
        assert left == pytest.approx(-math.expm1(-1e-5 * 1000), rel=1e-12)

    def test_vectorized_matches_scalar(self):
        model = PeriodicallyTested(component=ESDV)
        times = np.array([0.0, 100.0, 4380.0, 5000.0, 20000.0])
        values = ReliabilityService.instantaneous_unavailability(model, times)
        for t, value in zip(times, values):
            assert value == pytest.approx(ReliabilityService.instantaneous_unavailability(model, float(t)))

    def test_partial_test_resets_covered_share_only(self):
        model = PeriodicallyTested(component=ESDV)
        rate = ESDV.lambda_du
        q = ReliabilityService.instantaneous_unavailability(model, 4380.0)
        # logo após o teste parcial só a parte não coberta (1 - PTC) continua acumulada
        assert q == pytest.approx(-math.expm1(-0.1 * rate * 4380.0), rel=1e-12)

    @pytest.mark.parametrize("component", [RV, ESDV, CP], ids=lambda c: c.id)
    def test_bounded_by_one_full_period(self, component):
        model = PeriodicallyTested(component=component)
        times = np.linspace(0.0, 3 * component.t1_hours, 3001)
        values = ReliabilityService.instantaneous_unavailability(model, times)
        bound = -math.expm1(-component.lambda_du * component.t1_hours)
        assert np.all(values >= 0.0)
        assert np.all(values <= bound * (1 + 1e-12))

    def test_non_decreasing_between_tests(self):
        component = ComponentReliability(
            id="X",
            lambda_total=1e-5,
            sff=0.2,
            t1_hours=1000,
            partial_test=PartialTest(t2_hours=250, ptc=0.7),
        )
        model = PeriodicallyTested(component=component)
        for start in np.arange(0.0, 3000.0, 250.0):
            times = np.linspace(start, start + 250.0, 101)
            inside = ReliabilityService.instantaneous_unavailability(model, times[:-1])
            assert np.all(np.diff(inside) >= 0.0), start
            end = ReliabilityService.instantaneous_unavailability(model, float(times[-1]), left_limit=True)
            assert end >= inside[-1]

    def test_constant_probability(self):
        assert ReliabilityService.instantaneous_unavailability(ConstantProbability(p=0.1), 123.0) == 0.1

    def test_negative_time_raises(self):
        with pytest.raises(DomainError):
            ReliabilityService.instantaneous_unavailability(PeriodicallyTested(component=RV), -1.0)

    def test_frequency_model_is_misuse(self):
        with pytest.raises(MisuseError):
            ReliabilityService.instantaneous_unavailability(Frequency(rate_per_year=0.1), 10.0)


class TestTimeGrid:
    def test_weights_cover_horizon(self):
        grid = TimeGrid.build(35040, 4, [4380, 35040])
        assert grid.weights.sum() == pytest.approx(35040, rel=1e-12)

    def test_test_instants_are_breakpoints(self):
        grid = TimeGrid.build(35040, 7, [4380])
        for k in range(1, 8):
            assert np.any(np.isclose(grid.times, 4380 * k))

    def test_segment_ends_are_left_limits(self):
        grid = TimeGrid.build(100, 10, [50])
        assert grid.left[np.isclose(grid.times, 50.0)].any()
        assert grid.left[-1]

    @pytest.mark.parametrize("horizon, step", [(0, 1), (-5, 1), (10, 0), (10, 11)])
    def test_invalid_arguments(self, horizon, step):
        with pytest.raises(DomainError):
            TimeGrid.build(horizon, step)


class TestAverageUnavailability:
    def test_relief_valve_reference_value(self):
        x = RV.lambda_du * 35040
        expected = 1.0 - (1.0 - math.exp(-x)) / x
        assert ReliabilityService.average_unavailability(PeriodicallyTested(component=RV)) == pytest.approx(
            expected, rel=1e-4
        )

    @pytest.mark.parametrize("case_id", ["cas0", "cas1", "cas2", "cas3", "cas4"])
    def test_matches_closed_form_for_every_component(self, case_study, case_id):
        model = ModelService.apply_case(case_study, case_study.cases[case_id])
        for component in model.components:
            if component.partial_test is not None:
                continue
            tested = PeriodicallyTested(component=component)
            numeric = ReliabilityService.average_unavailability(tested)
            analytic = ReliabilityService.analytic_average_unavailability(tested)
            assert numeric == pytest.approx(analytic, rel=1e-3), component.id

    @pytest.mark.parametrize("component", [RV, ESDV, CP], ids=lambda c: c.id)
    def test_grid_refinement_is_stable(self, component):
        model = PeriodicallyTested(component=component)
        coarse = ReliabilityService.average_unavailability(model, grid_step=4)
        fine = ReliabilityService.average_unavailability(model, grid_step=2)
        assert fine == pytest.approx(coarse, rel=5e-4)

    def test_full_partial_coverage_gives_t2_sawtooth(self):
        component = ESDV.model_copy(update={"partial_test": PartialTest(t2_hours=4380, ptc=1.0)})
        average = ReliabilityService.average_unavailability(PeriodicallyTested(component=component))
        assert average == pytest.approx(component.lambda_du * 4380 / 2, rel=1e-2)

    def test_partial_test_lowers_average(self):
        without = ESDV.model_copy(update={"partial_test": None})
        with_partial = ReliabilityService.average_unavailability(PeriodicallyTested(component=ESDV))
        assert with_partial < ReliabilityService.average_unavailability(PeriodicallyTested(component=without))

    def test_constant_average_is_constant(self):
        assert ReliabilityService.average_unavailability(ConstantProbability(p=0.01)) == pytest.approx(0.01)

    def test_frequency_average_is_misuse(self):
        with pytest.raises(MisuseError):
            ReliabilityService.average_unavailability(Frequency(rate_per_year=1.0))

    def test_analytic_rejects_partial_tests(self):
        with pytest.raises(UnsupportedConfigurationError):
            ReliabilityService.analytic_average_unavailability(PeriodicallyTested(component=ESDV))

    def test_simplified_value(self):
        assert ReliabilityService.simplified_pfd_avg(PeriodicallyTested(component=RV)) == pytest.approx(
            6.96e-7 * 35040 / 2
        )


class TestSplitCcf:
    def test_rates_follow_beta(self):
        split = ReliabilityService.split_ccf([CP, CP, CP])
        assert len(split["independent"]) == 3
        assert split["independent"][0].rate == pytest.approx(0.95 * CP.lambda_du)
        assert split["common"].rate == pytest.approx(0.05 * CP.lambda_du)
        assert split["common"].ccf_role == CcfRole.COMMON

    def test_empty_group(self):
        with pytest.raises(UnsupportedConfigurationError):
            ReliabilityService.split_ccf([])

    def test_missing_beta(self):
        with pytest.raises(MisuseError):
            ReliabilityService.split_ccf([RV, RV])

    def test_zero_beta(self):
        zero = CP.model_copy(update={"beta": 0.0})
        with pytest.raises(UnsupportedConfigurationError):
            ReliabilityService.split_ccf([zero, zero])

    def test_different_betas(self):
        other = CP.model_copy(update={"beta": 0.1})
        with pytest.raises(UnsupportedConfigurationError):
            ReliabilityService.split_ccf([CP, other])

    def test_heterogeneous_rates(self):
        other = CP.model_copy(update={"lambda_total": 4.0e-6})
        with pytest.raises(UnsupportedConfigurationError):
            ReliabilityService.split_ccf([CP, other])


def test_common_role_requires_beta():
    with pytest.raises(ValueError):
        PeriodicallyTested(component=RV, ccf_role=CcfRole.COMMON)


def test_partial_test_must_be_shorter_than_full_test():
    with pytest.raises(ValueError):
        ComponentReliability(
            id="V", lambda_total=1e-6, sff=0.5, t1_hours=1000, partial_test=PartialTest(t2_hours=2000, ptc=0.5)
        )
