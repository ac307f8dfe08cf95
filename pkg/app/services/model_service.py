import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple, Union

from pydantic import ValidationError

from app.errors import ModelError, ModelIssue, ModelValidationError, TransformError
from app.models.bowtie import (
    AndSpec,
    BowTieModel,
    CaseTransform,
    EventRef,
    GateRef,
    GateSpec,
    KoonSpec,
    OrSpec,
)
from app.models.event_tree import BarrierSource, BranchSpec, ConstantSource, OnDemandSource
from app.models.fault_tree import (
    BasicEvent,
    EventRole,
    Gate,
    InitiatorCause,
    Leaf,
    Node,
    PreventionStructure,
)
from app.models.reliability import (
    HOURS_PER_YEAR,
    CcfRole,
    ComponentReliability,
    ConstantProbability,
    Frequency,
    PartialTest,
    PeriodicallyTested,
)
from app.models.semiquant import CreditedElement, SemiQuantBarrierProfile
from app.services.event_tree_service import EventTreeService
from app.services.reliability_service import ReliabilityService
from app.services.semiquant_service import SemiQuantService

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
CASE_STUDY_NAME = "case_study_separator"
CASE_STUDY_PATH = DATA_DIR / f"{CASE_STUDY_NAME}.json"


def _loc_to_path(loc) -> str:
    return ".".join(str(part) for part in loc)


def _children_of(spec: GateSpec, path: str) -> List[Tuple[GateSpec, str]]:
    if isinstance(spec, AndSpec):
        return [(child, f"{path}.and[{i}]") for i, child in enumerate(spec.and_)]
    if isinstance(spec, OrSpec):
        return [(child, f"{path}.or[{i}]") for i, child in enumerate(spec.or_)]
    if isinstance(spec, KoonSpec):
        return [(child, f"{path}.koon.children[{i}]") for i, child in enumerate(spec.koon.children)]
    return []


class ModelService:
    # ------------------------------------------------------------------ leitura

    @staticmethod
    def parse_model(text: Union[str, bytes]) -> BowTieModel:
        """
        Lê e valida um documento de modelo (JSON).

        Raises:
            ModelValidationError: com todos os problemas encontrados, não apenas o primeiro
        """
        try:
            model = BowTieModel.model_validate_json(text)
        except ValidationError as exc:
            issues = [ModelIssue(_loc_to_path(error["loc"]), error["msg"]) for error in exc.errors()]
            raise ModelValidationError(issues) from exc

        issues = ModelService.semantic_issues(model)
        if issues:
            raise ModelValidationError(issues)
        logger.info(f"📦 Modelo '{model.name}' carregado (hash {ModelService.model_hash(model)[:12]})")
        return model

    @staticmethod
    def load_model(path: Union[str, Path]) -> BowTieModel:
        return ModelService.parse_model(Path(path).read_text(encoding="utf-8"))

    @staticmethod
    def load_case_study() -> BowTieModel:
        return ModelService.load_model(CASE_STUDY_PATH)

    @staticmethod
    def serialize_model(model: BowTieModel) -> str:
        """JSON canônico: chaves ordenadas, indentação de 2 espaços."""
        document = model.model_dump(mode="json", by_alias=True, exclude_none=True)
        return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @staticmethod
    def model_hash(model: BowTieModel) -> str:
        return hashlib.sha256(ModelService.serialize_model(model).encode("utf-8")).hexdigest()

    # ------------------------------------------------------------- validação

    @staticmethod
    def semantic_issues(model: BowTieModel) -> List[ModelIssue]:
        """Verificação de referências cruzadas; devolve a lista completa de problemas."""
        issues: List[ModelIssue] = []

        def issue(path: str, message: str):
            issues.append(ModelIssue(path, message))

        components: Dict[str, ComponentReliability] = {}
        for i, component in enumerate(model.components):
            if component.id in components:
                issue(f"components.{i}.id", f"componente repetido: {component.id}")
            components[component.id] = component

        events: Dict[str, object] = {}
        for i, event in enumerate(model.basic_events):
            path = f"basic_events.{i}"
            if event.id in events:
                issue(f"{path}.id", f"evento básico repetido: {event.id}")
            events[event.id] = event
            if event.component is None:
                continue
            component = components.get(event.component)
            if component is None:
                issue(f"{path}.component", f"componente desconhecido: {event.component}")
            elif event.ccf_role == CcfRole.COMMON and not component.beta:
                issue(f"{path}.ccf_role", f"papel 'common' exige beta > 0 em {component.id}")

        for component in components.values():
            refs = [e for e in model.basic_events if e.component == component.id]
            if not component.beta or not refs:
                continue
            if not any(e.ccf_role == CcfRole.COMMON for e in refs):
                issue(f"components.{component.id}", "componente com beta sem evento de causa comum")

        ModelService._check_gates(model, set(events), issue)

        causes = ModelService._cause_ids(model, components, issue)
        for cause_id in causes:
            if cause_id in events:
                issue("initiating_events", f"causa {cause_id} colide com um evento básico")

        for ei, barriers in model.ei_barrier_map.items():
            if ei not in model.initiating_events:
                issue(f"ei_barrier_map.{ei}", f"evento iniciador desconhecido: {ei}")
            for j, barrier_id in enumerate(barriers):
                if barrier_id not in model.barriers:
                    issue(f"ei_barrier_map.{ei}.{j}", f"referência pendente para a barreira '{barrier_id}'")
        for ei in model.initiating_events:
            if ei not in model.ei_barrier_map:
                issue(f"ei_barrier_map.{ei}", f"evento iniciador não mapeado: {ei}")

        for i, linkage in enumerate(model.conditional_linkages):
            if linkage.cause not in causes:
                issue(f"conditional_linkages.{i}.cause", f"causa desconhecida: {linkage.cause}")
            if linkage.enabler not in events:
                issue(f"conditional_linkages.{i}.enabler", f"evento básico desconhecido: {linkage.enabler}")

        ModelService._check_event_tree(model, events, issue)
        ModelService._check_semiquant(model, components, issue)

        if model.evaluation.grid_step_hours > model.evaluation.horizon_hours:
            issue("evaluation.grid_step_hours", "passo da grade maior que o horizonte")
        return issues

    @staticmethod
    def _check_gates(model: BowTieModel, event_ids: Set[str], issue):
        def walk(spec: GateSpec, path: str):
            if isinstance(spec, EventRef):
                if spec.event not in event_ids:
                    issue(path, f"evento básico desconhecido: {spec.event}")
                return
            if isinstance(spec, GateRef):
                if spec.gate not in model.gates:
                    issue(path, f"porta nomeada desconhecida: {spec.gate}")
                return
            if isinstance(spec, KoonSpec):
                n = len(spec.koon.children)
                if not 1 <= spec.koon.k <= n:
                    issue(f"{path}.koon", f"porta koon com k={spec.koon.k} fora de [1, {n}] filhos")
            for child, child_path in _children_of(spec, path):
                walk(child, child_path)

        for name, spec in model.gates.items():
            walk(spec, f"gates.{name}")
        for barrier_id, barrier in model.barriers.items():
            walk(barrier.fault_tree, f"barriers.{barrier_id}.fault_tree")

        for name in model.gates:
            try:
                ModelService._resolve_gate(GateRef(gate=name), model.gates, (), lenient=True)
            except ModelError as exc:
                issue(f"gates.{name}", str(exc))

    @staticmethod
    def _cause_ids(model: BowTieModel, components: Dict[str, ComponentReliability], issue) -> Set[str]:
        causes: Set[str] = set()
        for ei, spec in model.initiating_events.items():
            if not spec.is_derived:
                causes.add(ei)
                continue
            if not spec.control_loop.elements:
                issue(f"initiating_events.{ei}.control_loop.elements", "malha de controle vazia")
            for j, element in enumerate(spec.control_loop.elements):
                component = components.get(element.component)
                if component is None:
                    issue(
                        f"initiating_events.{ei}.control_loop.elements.{j}.component",
                        f"componente desconhecido: {element.component}",
                    )
                    continue
                for cause_id in ModelService._element_cause_ids(model, ei, element.id, component, spec.control_loop.split_ccf_cause):
                    if cause_id in causes:
                        issue(f"initiating_events.{ei}", f"causa repetida: {cause_id}")
                    causes.add(cause_id)
        return causes

    @staticmethod
    def _check_event_tree(model: BowTieModel, events: Dict[str, object], issue):
        labels: List[str] = []

        def walk(node, path: str):
            if not isinstance(node, BranchSpec):
                labels.append(node.outcome)
                return
            source = node.p_yes
            if isinstance(source, OnDemandSource):
                event = events.get(source.on_demand)
                if event is None:
                    issue(f"{path}.p_yes", f"evento básico desconhecido: {source.on_demand}")
                elif event.constant_probability is None:
                    issue(f"{path}.p_yes", f"{source.on_demand} não é uma probabilidade constante")
            elif isinstance(source, BarrierSource) and source.barrier not in model.barriers:
                issue(f"{path}.p_yes", f"referência pendente para a barreira '{source.barrier}'")
            walk(node.yes, f"{path}.yes")
            walk(node.no, f"{path}.no")

        walk(model.event_tree, "event_tree")
        for label in sorted({label for label in labels if labels.count(label) > 1}):
            issue("event_tree", f"rótulo de resultado repetido: {label}")

    @staticmethod
    def _check_semiquant(model: BowTieModel, components: Dict[str, ComponentReliability], issue):
        semiquant = model.semiquant
        for barrier_id, profile in semiquant.barriers.items():
            path = f"semiquant.barriers.{barrier_id}"
            if barrier_id not in model.barriers:
                issue(path, f"referência pendente para a barreira '{barrier_id}'")
            if not profile.elements:
                issue(f"{path}.elements", "lista de elementos vazia")
            for j, element in enumerate(profile.elements):
                if element.component not in components:
                    issue(f"{path}.elements.{j}.component", f"componente desconhecido: {element.component}")
        mapped = {barrier_id for barriers in model.ei_barrier_map.values() for barrier_id in barriers}
        for barrier_id in sorted(mapped - set(semiquant.barriers)):
            issue("semiquant.barriers", f"barreira mapeada sem perfil semi-quantitativo: {barrier_id}")
        for ei, frequency in semiquant.initiating_event_frequencies.items():
            if ei not in model.initiating_events:
                issue(f"semiquant.initiating_event_frequencies.{ei}", f"evento iniciador desconhecido: {ei}")
            if frequency < 0:
                issue(f"semiquant.initiating_event_frequencies.{ei}", "frequência negativa")
        for i, pair in enumerate(semiquant.uncredited):
            if pair.barrier not in model.ei_barrier_map.get(pair.initiating_event, []):
                issue(
                    f"semiquant.uncredited.{i}",
                    f"par ({pair.initiating_event}, {pair.barrier}) não existe no mapeamento EI→barreiras",
                )

    # ------------------------------------------------------------- construção

    @staticmethod
    def _resolve_gate(spec: GateSpec, gates: Dict[str, GateSpec], stack: Tuple[str, ...], lenient: bool = False) -> Optional[Node]:
        if isinstance(spec, EventRef):
            return Leaf(spec.event)
        if isinstance(spec, GateRef):
            if spec.gate in stack:
                cycle = " -> ".join(stack + (spec.gate,))
                raise ModelError(f"referência cíclica entre portas: {cycle}")
            if spec.gate not in gates:
                if lenient:
                    return None
                raise ModelError(f"porta nomeada desconhecida: {spec.gate}")
            return ModelService._resolve_gate(gates[spec.gate], gates, stack + (spec.gate,), lenient)

        children = [ModelService._resolve_gate(child, gates, stack, lenient) for child, _ in _children_of(spec, "")]
        if lenient:
            return None
        if isinstance(spec, AndSpec):
            return Gate(k=len(children), children=tuple(children), kind="and")
        if isinstance(spec, OrSpec):
            return Gate(k=1, children=tuple(children), kind="or")
        return Gate(k=spec.koon.k, children=tuple(children), kind="koon")

    @staticmethod
    def build_tree(model: BowTieModel, barrier_id: str) -> Node:
        return ModelService._resolve_gate(model.barriers[barrier_id].fault_tree, model.gates, ())

    @staticmethod
    def build_barriers(model: BowTieModel) -> Dict[str, Node]:
        return {barrier_id: ModelService.build_tree(model, barrier_id) for barrier_id in sorted(model.barriers)}

    @staticmethod
    def build_events(model: BowTieModel) -> Dict[str, BasicEvent]:
        """Eventos habilitadores; os grupos com beta passam pela separação de causa comum."""
        events: Dict[str, BasicEvent] = {}
        for spec in model.basic_events:
            if spec.constant_probability is not None:
                events[spec.id] = BasicEvent(id=spec.id, model=ConstantProbability(p=spec.constant_probability))

        for component in model.components:
            refs = [spec for spec in model.basic_events if spec.component == component.id]
            if not refs:
                continue
            if not component.beta:
                for spec in refs:
                    events[spec.id] = BasicEvent(id=spec.id, model=PeriodicallyTested(component=component))
                continue
            members = [spec for spec in refs if spec.ccf_role == CcfRole.INDEPENDENT]
            split = ReliabilityService.split_ccf([component] * max(1, len(members)))
            for spec, independent in zip(members, split["independent"]):
                events[spec.id] = BasicEvent(id=spec.id, model=independent)
            for spec in refs:
                if spec.ccf_role == CcfRole.COMMON:
                    events[spec.id] = BasicEvent(id=spec.id, model=split["common"])
        return {event_id: events[event_id] for event_id in sorted(events)}

    @staticmethod
    def _common_event_for(model: BowTieModel, component_id: str) -> Optional[str]:
        for spec in model.basic_events:
            if spec.component == component_id and spec.ccf_role == CcfRole.COMMON:
                return spec.id
        return None

    @staticmethod
    def _element_cause_ids(model: BowTieModel, ei: str, element_id: str, component: ComponentReliability, split_ccf_cause: bool) -> List[str]:
        if split_ccf_cause and component.beta:
            common = ModelService._common_event_for(model, component.id) or f"{element_id}_ccf"
            return [f"{ei}.{element_id}", f"{ei}.{common}"]
        return [f"{ei}.{element_id}"]

    @staticmethod
    def initiator_causes(model: BowTieModel) -> List[InitiatorCause]:
        """
        Causas iniciadoras com frequência anual.

        Um EI derivado da malha de controle é decomposto por elemento, na taxa de
        falha total; com `split_ccf_cause` a parte β de um sensor vira uma causa à parte.
        """
        forced: Dict[str, Set[str]] = {}
        for linkage in model.conditional_linkages:
            forced.setdefault(linkage.cause, set()).add(linkage.enabler)

        def cause(ei: str, cause_id: str, rate_per_year: float) -> InitiatorCause:
            event = BasicEvent(id=cause_id, model=Frequency(rate_per_year=rate_per_year), role=EventRole.INITIATOR)
            return InitiatorCause(initiating_event=ei, event=event, forced_failed=frozenset(forced.get(cause_id, ())))

        causes: List[InitiatorCause] = []
        for ei in sorted(model.initiating_events):
            spec = model.initiating_events[ei]
            if not spec.is_derived:
                causes.append(cause(ei, ei, spec.frequency_per_year))
                continue
            if not spec.control_loop.elements:
                raise ModelError(f"{ei}: malha de controle vazia")
            for element in spec.control_loop.elements:
                component = model.component(element.component)
                yearly = component.lambda_total * HOURS_PER_YEAR
                ids = ModelService._element_cause_ids(model, ei, element.id, component, spec.control_loop.split_ccf_cause)
                if len(ids) == 1:
                    causes.append(cause(ei, ids[0], yearly))
                else:
                    causes.append(cause(ei, ids[0], (1.0 - component.beta) * yearly))
                    causes.append(cause(ei, ids[1], component.beta * yearly))
        return causes

    @staticmethod
    def derive_ei1_frequency(model: BowTieModel, initiating_event: str = "EI1") -> float:
        """Σ λ_total dos elementos da malha de controle × 8760."""
        spec = model.initiating_events.get(initiating_event)
        if spec is None or not spec.is_derived:
            raise ModelError(f"{initiating_event} não é derivado da malha de controle")
        if not spec.control_loop.elements:
            raise ModelError(f"{initiating_event}: malha de controle vazia")
        return sum(
            cause.event.model.rate_per_year
            for cause in ModelService.initiator_causes(model)
            if cause.initiating_event == initiating_event
        )

    @staticmethod
    def prevention_structure(model: BowTieModel) -> PreventionStructure:
        return PreventionStructure(
            events=ModelService.build_events(model),
            barriers=ModelService.build_barriers(model),
            ei_barrier_map={ei: tuple(barriers) for ei, barriers in model.ei_barrier_map.items()},
            causes=tuple(ModelService.initiator_causes(model)),
        )

    @staticmethod
    def semiquant_profiles(model: BowTieModel) -> Dict[str, SemiQuantBarrierProfile]:
        profiles = {}
        for barrier_id in sorted(model.semiquant.barriers):
            spec = model.semiquant.barriers[barrier_id]
            elements = [
                CreditedElement(
                    name=element.component,
                    complexity=element.complexity,
                    sff=model.component(element.component).sff,
                )
                for element in spec.elements
            ]
            profiles[barrier_id] = SemiQuantService.effective_profile(
                barrier_id, elements, spec.hft, spec.operator_excluded
            )
        return profiles

    @staticmethod
    def semiquant_ei_frequencies(model: BowTieModel) -> Dict[str, float]:
        """Frequências usadas no modo semi-quantitativo.

        EI derivados da malha de controle não acompanham as taxas de falha: sem valor
        declarado usam `semiquant.derived_frequency_per_year` (0,1/ano).
        """
        frequencies = {}
        overrides = model.semiquant.initiating_event_frequencies
        for ei in sorted(model.initiating_events):
            spec = model.initiating_events[ei]
            if ei in overrides:
                frequencies[ei] = overrides[ei]
            elif spec.is_derived:
                frequencies[ei] = model.semiquant.derived_frequency_per_year
            else:
                frequencies[ei] = spec.frequency_per_year
        return frequencies

    @staticmethod
    def resolve_event_tree(model: BowTieModel, barrier_probabilities: Dict[str, float]):
        events = {spec.id: spec for spec in model.basic_events}

        def probability_of(source) -> float:
            if isinstance(source, ConstantSource):
                return source.constant
            if isinstance(source, OnDemandSource):
                return events[source.on_demand].constant_probability
            return barrier_probabilities[source.barrier]

        return EventTreeService.resolve(model.event_tree, probability_of)

    # ---------------------------------------------------------------- casos

    @staticmethod
    def case_transform(model: BowTieModel, case_id: str) -> CaseTransform:
        if case_id not in model.cases:
            raise ModelError(f"caso desconhecido: {case_id} (disponíveis: {', '.join(sorted(model.cases))})")
        return model.cases[case_id]

    @staticmethod
    def apply_case(model: BowTieModel, transform: CaseTransform) -> BowTieModel:
        """Novo modelo com λ, SFF, T1/T2 e β escalados; o original não é alterado."""
        if transform.is_identity:
            return model

        scaled = []
        for component in model.components:
            sff = component.sff * transform.sff_scale
            if sff >= 1:
                raise TransformError(f"{component.id}: SFF escalado = {sff:.4f} >= 1")
            beta = None
            if component.beta is not None:
                beta = component.beta * transform.beta_scale
                if beta > 1:
                    raise TransformError(f"{component.id}: beta escalado = {beta:.4f} > 1")
            partial = None
            if component.partial_test is not None:
                partial = PartialTest(
                    t2_hours=component.partial_test.t2_hours * transform.test_interval_scale,
                    ptc=component.partial_test.ptc,
                )
            scaled.append(
                ComponentReliability(
                    id=component.id,
                    lambda_total=component.lambda_total * transform.lambda_scale,
                    sff=sff,
                    t1_hours=component.t1_hours * transform.test_interval_scale,
                    partial_test=partial,
                    beta=beta,
                )
            )
        return model.model_copy(update={"components": scaled})
