import itertools

import pytest

from app.errors import ModelError
from app.models.event_tree import Outcome
from app.models.semiquant import Complexity, ConfidenceLevel, CreditedElement, SemiQuantBarrierProfile
from app.services.model_service import ModelService
from app.services.semiquant_service import SemiQuantService, sff_bucket

SFF_SAMPLES = (0.3, 0.75, 0.95, 0.995)


def profile(complexity, sff, hft, barrier_id="b"):
    return SemiQuantBarrierProfile(barrier_id=barrier_id, complexity=complexity, hft=hft, sff_effective=sff)


class TestNcTable:
    @pytest.mark.parametrize(
        "complexity, sff, hft, expected",
        [
            (Complexity.SIMPLE, 0.5, 0, ConfidenceLevel.NC1),
            (Complexity.SIMPLE, 0.5, 1, ConfidenceLevel.NC2),
            (Complexity.SIMPLE, 0.95, 0, ConfidenceLevel.NC3),
            (Complexity.SIMPLE, 0.995, 2, ConfidenceLevel.NC4),
            (Complexity.COMPLEX, 0.5, 0, ConfidenceLevel.NONE),
            (Complexity.COMPLEX, 0.625, 0, ConfidenceLevel.NC1),
            (Complexity.COMPLEX, 0.625, 1, ConfidenceLevel.NC2),
            (Complexity.COMPLEX, 0.95, 2, ConfidenceLevel.NC4),
        ],
    )
    def test_lookup(self, complexity, sff, hft, expected):
        assert SemiQuantService.nc_lookup(profile(complexity, sff, hft)) == expected

    def test_bucket_bounds(self):
        assert [sff_bucket(s) for s in (0.0, 0.59, 0.6, 0.89, 0.9, 0.989, 0.99)] == [0, 0, 1, 1, 2, 2, 3]

    def test_monotone_over_all_cells(self):
        """Mais SFF, mais HFT ou um elemento simples nunca baixam o NC."""
        for complexity, (i, sff), hft in itertools.product(Complexity, enumerate(SFF_SAMPLES), range(3)):
            rank = SemiQuantService.nc_lookup(profile(complexity, sff, hft)).rank
            if i + 1 < len(SFF_SAMPLES):
                assert SemiQuantService.nc_lookup(profile(complexity, SFF_SAMPLES[i + 1], hft)).rank >= rank
            if hft < 2:
                assert SemiQuantService.nc_lookup(profile(complexity, sff, hft + 1)).rank >= rank
            if complexity == Complexity.COMPLEX:
                assert SemiQuantService.nc_lookup(profile(Complexity.SIMPLE, sff, hft)).rank >= rank

    def test_factor_is_power_of_ten(self):
        assert [level.risk_reduction_factor for level in ConfidenceLevel] == [1, 10, 100, 1000, 10000]


class TestEffectiveProfile:
    def test_most_penalizing_element_wins(self):
        elements = [
            CreditedElement(name="CP", complexity=Complexity.SIMPLE, sff=0.8),
            CreditedElement(name="AC", complexity=Complexity.COMPLEX, sff=0.835),
            CreditedElement(name="ESDV", complexity=Complexity.SIMPLE, sff=0.625),
        ]
        result = SemiQuantService.effective_profile("alarm", elements, hft=0)
        assert result.complexity == Complexity.COMPLEX
        assert result.sff_effective == 0.625

    def test_empty_element_list(self):
        with pytest.raises(ModelError):
            SemiQuantService.effective_profile("b", [], hft=0)


class TestCaseStudyFactors:
    @staticmethod
    def factors(model, case_id):
        cased = ModelService.apply_case(model, model.cases[case_id])
        return {
            barrier_id: SemiQuantService.nc_lookup(p).risk_reduction_factor
            for barrier_id, p in ModelService.semiquant_profiles(cased).items()
        }

    def test_reference_case(self, case_study):
        assert self.factors(case_study, "cas0") == {"SIS": 100, "alarm": 10, "relief_valves": 10}

    def test_halved_sff(self, case_study):
        assert self.factors(case_study, "cas2") == {"SIS": 10, "alarm": 1, "relief_valves": 10}

    @pytest.mark.parametrize("case_id", ["cas1", "cas3", "cas4"])
    def test_unchanged_by_rates_intervals_and_beta(self, case_study, case_id):
        assert self.factors(case_study, case_id) == self.factors(case_study, "cas0")


class TestPropagation:
    def test_divisions_and_sums(self):
        outcome = SemiQuantService.semiquant_propagate(
            {"EI1": 0.1, "EI4": 0.005},
            {"EI1": ["a", "b"], "EI4": ["b"]},
            {"a": 10, "b": 100},
            Outcome("ERC"),
        )
        assert outcome.contributions == {"EI1": pytest.approx(1e-4), "EI4": pytest.approx(5e-5)}
        assert outcome.erc_frequency == pytest.approx(1.5e-4)
        assert outcome.phd_frequencies == {"ERC": pytest.approx(1.5e-4)}

    def test_uncredited_pair_is_skipped(self):
        outcome = SemiQuantService.semiquant_propagate(
            {"EI1": 0.1}, {"EI1": ["a", "b"]}, {"a": 10, "b": 100}, Outcome("ERC"), [("EI1", "a")]
        )
        assert outcome.erc_frequency == pytest.approx(1e-3)

    def test_unmapped_initiating_event(self):
        with pytest.raises(ModelError):
            SemiQuantService.semiquant_propagate({"EI9": 1.0}, {}, {}, Outcome("ERC"))

    def test_missing_factor(self):
        with pytest.raises(ModelError):
            SemiQuantService.semiquant_propagate({"EI1": 1.0}, {"EI1": ["z"]}, {}, Outcome("ERC"))

    @pytest.mark.parametrize("ei", ["EI1", "EI2", "EI4"])
    def test_linear_in_each_initiating_event_frequency(self, ei):
        frequencies = {"EI1": 0.1, "EI2": 0.2, "EI4": 0.005}
        ei_barrier_map = {"EI1": ["a", "b"], "EI2": ["a", "b", "c"], "EI4": ["c"]}
        factors = {"a": 10, "b": 100, "c": 10}
        uncredited = [("EI1", "a")]
        base = SemiQuantService.semiquant_propagate(frequencies, ei_barrier_map, factors, Outcome("ERC"), uncredited)
        for scale in (0.0, 2.0, 7.5):
            scaled = SemiQuantService.semiquant_propagate(
                {**frequencies, ei: frequencies[ei] * scale}, ei_barrier_map, factors, Outcome("ERC"), uncredited
            )
            assert scaled.contributions[ei] == pytest.approx(scale * base.contributions[ei], rel=1e-12)
            expected = base.erc_frequency + (scale - 1.0) * base.contributions[ei]
            assert scaled.erc_frequency == pytest.approx(expected, rel=1e-12, abs=1e-18)
