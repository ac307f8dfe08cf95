import json

import pytest

from app.errors import ModelError, ModelValidationError, TransformError
from app.models.bowtie import CaseTransform
from app.models.fault_tree import EventRole
from app.models.results import Approach
from app.services.event_tree_service import EventTreeService
from app.services.model_service import ModelService
from app.services.report_service import ReportService


def parse(document: dict):
    return ModelService.parse_model(json.dumps(document))


def issue_paths(excinfo) -> list:
    return [issue.path for issue in excinfo.value.issues]


class TestCaseStudyFile:
    def test_inventory(self, case_study):
        assert set(case_study.barriers) == {"alarm", "SIS", "relief_valves"}
        assert sorted(case_study.initiating_events) == ["EI1", "EI2", "EI3", "EI4"]
        assert len(EventTreeService.outcome_labels(case_study.event_tree)) == 7
        assert sorted(case_study.cases) == ["cas0", "cas1", "cas2", "cas3", "cas4"]

    def test_round_trip(self, case_study):
        text = ModelService.serialize_model(case_study)
        again = ModelService.parse_model(text)
        assert again == case_study
        assert ModelService.serialize_model(again) == text

    def test_hash_is_stable(self, case_study):
        assert ModelService.model_hash(case_study) == ModelService.model_hash(
            ModelService.parse_model(ModelService.serialize_model(case_study))
        )

    def test_component_data(self, case_study):
        esdv = case_study.component("ESDV")
        assert esdv.lambda_total == 1.114e-5
        assert esdv.partial_test.t2_hours == 4380
        assert esdv.partial_test.ptc == 0.9
        assert case_study.component("CP").beta == 0.05


class TestValidation:
    def test_koon_larger_than_children(self, case_study_document):
        sis = case_study_document["barriers"]["SIS"]["fault_tree"]["or"]
        sis[1]["koon"]["k"] = 4
        with pytest.raises(ModelValidationError) as excinfo:
            parse(case_study_document)
        assert "barriers.SIS.fault_tree.or[1].koon" in issue_paths(excinfo)

    def test_dangling_barrier(self, case_study_document):
        case_study_document["ei_barrier_map"]["EI4"] = ["RVx"]
        with pytest.raises(ModelValidationError) as excinfo:
            parse(case_study_document)
        assert any("RVx" in issue.message for issue in excinfo.value.issues)

    def test_sff_out_of_range(self, case_study_document):
        case_study_document["components"][0]["sff"] = 1.2
        with pytest.raises(ModelValidationError) as excinfo:
            parse(case_study_document)
        assert issue_paths(excinfo) == ["components.0.sff"]

    def test_missing_event_tree(self, case_study_document):
        del case_study_document["event_tree"]
        with pytest.raises(ModelValidationError) as excinfo:
            parse(case_study_document)
        assert "event_tree" in issue_paths(excinfo)

    def test_reports_every_problem(self, case_study_document):
        case_study_document["ei_barrier_map"]["EI4"] = ["RVx"]
        case_study_document["conditional_linkages"].append({"cause": "EI1.XX", "enabler": "nope"})
        with pytest.raises(ModelValidationError) as excinfo:
            parse(case_study_document)
        assert len(excinfo.value.issues) >= 3

    def test_unknown_event_in_tree(self, case_study_document):
        case_study_document["barriers"]["alarm"]["fault_tree"]["or"].append({"event": "GHOST"})
        with pytest.raises(ModelValidationError) as excinfo:
            parse(case_study_document)
        assert "barriers.alarm.fault_tree.or[6]" in issue_paths(excinfo)

    def test_gate_cycle(self, case_study_document):
        case_study_document["gates"]["loop_a"] = {"or": [{"gate": "loop_b"}, {"event": "AS"}]}
        case_study_document["gates"]["loop_b"] = {"and": [{"gate": "loop_a"}, {"event": "AS"}]}
        with pytest.raises(ModelValidationError) as excinfo:
            parse(case_study_document)
        assert any("cíclica" in issue.message for issue in excinfo.value.issues)

    def test_unmapped_initiating_event(self, case_study_document):
        del case_study_document["ei_barrier_map"]["EI3"]
        with pytest.raises(ModelValidationError) as excinfo:
            parse(case_study_document)
        assert "ei_barrier_map.EI3" in issue_paths(excinfo)

    def test_on_demand_needs_constant_event(self, case_study_document):
        case_study_document["event_tree"]["yes"]["p_yes"] = {"on_demand": "RVa"}
        with pytest.raises(ModelValidationError) as excinfo:
            parse(case_study_document)
        assert "event_tree.yes.p_yes" in issue_paths(excinfo)

    def test_invalid_json(self):
        with pytest.raises(ModelValidationError):
            ModelService.parse_model("{not json")

    def test_issue_rendering(self, case_study_document):
        case_study_document["components"][0]["sff"] = 1.2
        with pytest.raises(ModelValidationError) as excinfo:
            parse(case_study_document)
        assert str(excinfo.value).startswith("components.0.sff: ")


class TestTrees:
    def test_named_gates_are_inlined(self, case_study):
        sis = ModelService.build_tree(case_study, "SIS")
        assert str(sis) == (
            "or(CCF_sensors, 2oo3(CP3a, CP3b, CP3c), AS, and(CV1, ESDV1), and(CV2, ESDV2))"
        )

    def test_events_split_common_cause(self, case_study):
        events = ModelService.build_events(case_study)
        cp = case_study.component("CP")
        assert events["CP2"].model.rate == pytest.approx(0.95 * cp.lambda_du)
        assert events["CCF_sensors"].model.rate == pytest.approx(0.05 * cp.lambda_du)
        assert events["RVa"].model.rate == pytest.approx(case_study.component("RV").lambda_du)
        assert events["OP"].model.p == 0.1


class TestInitiatingEvents:
    def test_ei1_derived_from_control_loop(self, case_study):
        assert ModelService.derive_ei1_frequency(case_study) == pytest.approx(0.1114, rel=1e-3)

    def test_ei1_scales_with_rates(self, case_study):
        cas1 = ModelService.apply_case(case_study, case_study.cases["cas1"])
        assert ModelService.derive_ei1_frequency(cas1) == pytest.approx(0.557, rel=1e-3)

    def test_causes_and_linkages(self, case_study):
        causes = {cause.event.id: cause for cause in ModelService.initiator_causes(case_study)}
        assert sorted(causes) == [
            "EI1.AC",
            "EI1.CCF_sensors",
            "EI1.CP1",
            "EI1.CV1",
            "EI1.CV2",
            "EI2",
            "EI3",
            "EI4",
        ]
        assert causes["EI1.AC"].forced_failed == frozenset({"AC"})
        assert causes["EI1.CP1"].forced_failed == frozenset()
        assert causes["EI1.CCF_sensors"].event.model.rate_per_year == pytest.approx(0.05 * 3.2e-6 * 8760)
        assert all(cause.event.role == EventRole.INITIATOR for cause in causes.values())

    def test_ccf_cause_can_stay_merged(self, case_study_document):
        case_study_document["initiating_events"]["EI1"]["control_loop"]["split_ccf_cause"] = False
        case_study_document["conditional_linkages"] = [
            link for link in case_study_document["conditional_linkages"] if link["cause"] != "EI1.CCF_sensors"
        ]
        model = parse(case_study_document)
        ids = [cause.event.id for cause in ModelService.initiator_causes(model)]
        assert "EI1.CCF_sensors" not in ids
        assert ModelService.derive_ei1_frequency(model) == pytest.approx(0.1114, rel=1e-3)

    def test_fixed_frequency_event_is_not_derived(self, case_study):
        with pytest.raises(ModelError):
            ModelService.derive_ei1_frequency(case_study, "EI2")

    def test_semiquant_uses_declared_frequency(self, case_study):
        assert ModelService.semiquant_ei_frequencies(case_study) == {
            "EI1": 0.1,
            "EI2": 0.2,
            "EI3": 0.1,
            "EI4": 0.005,
        }

    def test_semiquant_derived_event_defaults_to_fixed_frequency(self, case_study_document):
        del case_study_document["semiquant"]["initiating_event_frequencies"]
        model = parse(case_study_document)
        cas1 = ModelService.apply_case(model, model.cases["cas1"])
        assert ModelService.semiquant_ei_frequencies(model)["EI1"] == 0.1
        assert ModelService.semiquant_ei_frequencies(cas1)["EI1"] == 0.1

    def test_semiquant_erc_ignores_rate_changes_without_override(self, case_study_document):
        del case_study_document["semiquant"]["initiating_event_frequencies"]
        evaluation = ReportService.evaluate(parse(case_study_document), "semi", "all")
        reference = evaluation.get(Approach.SEMI_QUANTITATIVE, "cas0")
        for case_id in ("cas1", "cas3", "cas4"):
            result = evaluation.get(Approach.SEMI_QUANTITATIVE, case_id)
            assert result.erc_frequency == reference.erc_frequency, case_id
            assert result.contributions == reference.contributions, case_id


class TestApplyCase:
    def test_rates_times_five(self, case_study):
        cas1 = ModelService.apply_case(case_study, case_study.cases["cas1"])
        rv = cas1.component("RV")
        assert rv.lambda_total == pytest.approx(6.96e-6)
        assert rv.lambda_du == pytest.approx(3.48e-6)

    def test_halved_sff(self, case_study):
        cas2 = ModelService.apply_case(case_study, case_study.cases["cas2"])
        assert cas2.component("AS").sff == pytest.approx(0.475)

    def test_intervals_doubled(self, case_study):
        cas3 = ModelService.apply_case(case_study, case_study.cases["cas3"])
        esdv = cas3.component("ESDV")
        assert esdv.t1_hours == 70080
        assert esdv.partial_test.t2_hours == 8760

    def test_identity(self, case_study):
        assert ModelService.apply_case(case_study, case_study.cases["cas0"]) == case_study

    def test_original_untouched(self, case_study):
        ModelService.apply_case(case_study, case_study.cases["cas4"])
        assert case_study.component("CP").beta == 0.05

    def test_sff_reaching_one(self, case_study):
        with pytest.raises(TransformError):
            ModelService.apply_case(case_study, CaseTransform(sff_scale=1.2))

    def test_beta_above_one(self, case_study):
        with pytest.raises(TransformError):
            ModelService.apply_case(case_study, CaseTransform(beta_scale=30))

    def test_unknown_case(self, case_study):
        with pytest.raises(ModelError):
            ModelService.case_transform(case_study, "cas9")
