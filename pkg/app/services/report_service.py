import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.config.settings import settings
from app.errors import ModelError
from app.models.bowtie import BowTieModel
from app.models.reliability import PeriodicallyTested
from app.models.results import (
    Approach,
    BarrierMetrics,
    BarrierProfile,
    CaseResult,
    ComponentMetrics,
    ComparisonRow,
    EvaluationMetadata,
    EvaluationResult,
)
from app.services.boolean_service import BooleanService
from app.services.event_tree_service import EventTreeService, natural_key
from app.services.model_service import ModelService
from app.services.reliability_service import ReliabilityService
from app.services.semiquant_service import SemiQuantService

logger = logging.getLogger(__name__)

ALL_CASES = "all"
BOTH_APPROACHES = "both"

Row = Tuple[str, List[str]]


def format_frequency(value: float) -> str:
    # 3 algarismos significativos, ponto decimal
    return f"{value:.2E}"


def format_factor(value: float) -> str:
    return f"{value:.2f}"


class ReportService:
    # ------------------------------------------------------------- avaliação

    @staticmethod
    def resolve_cases(model: BowTieModel, case: str = ALL_CASES) -> List[str]:
        if case == ALL_CASES:
            return sorted(model.cases, key=natural_key)
        ModelService.case_transform(model, case)
        return [case]

    @staticmethod
    def resolve_approaches(approach: str = BOTH_APPROACHES) -> List[Approach]:
        if approach == BOTH_APPROACHES:
            return list(Approach)
        return [Approach(approach)]

    @staticmethod
    def _quantitative(model: BowTieModel, case_id: str, horizon: float, grid_step: float) -> CaseResult:
        structure = ModelService.prevention_structure(model)
        barriers: Dict[str, BarrierMetrics] = {}
        for barrier_id, tree in structure.barriers.items():
            pfd = BooleanService.barrier_pfd_avg(tree, structure.events, horizon, grid_step)
            barriers[barrier_id] = BarrierMetrics(
                barrier_id=barrier_id,
                pfd_avg=pfd.pfd_avg,
                risk_reduction_factor=pfd.risk_reduction_factor,
            )
        contributions = BooleanService.erc_contributions(structure, horizon, grid_step)
        erc = math.fsum(contributions[key] for key in sorted(contributions))
        tree = ModelService.resolve_event_tree(model, {b: m.pfd_avg for b, m in barriers.items()})
        return CaseResult(
            approach=Approach.QUANTITATIVE,
            case_id=case_id,
            barriers=barriers,
            erc_frequency=erc,
            contributions=contributions,
            phd_frequencies=EventTreeService.propagate(erc, tree),
            components=ReportService._component_metrics(model, horizon, grid_step),
        )

    @staticmethod
    def _component_metrics(model: BowTieModel, horizon: float, grid_step: float) -> Dict[str, ComponentMetrics]:
        metrics = {}
        for component in sorted(model.components, key=lambda c: c.id):
            tested = PeriodicallyTested(component=component.model_copy(update={"beta": None}))
            metrics[component.id] = ComponentMetrics(
                component_id=component.id,
                pfd_avg=ReliabilityService.average_unavailability(tested, horizon, grid_step),
                simplified_pfd_avg=ReliabilityService.simplified_pfd_avg(tested),
            )
        return metrics

    @staticmethod
    def _semi_quantitative(model: BowTieModel, case_id: str) -> CaseResult:
        barriers: Dict[str, BarrierMetrics] = {}
        for barrier_id, profile in ModelService.semiquant_profiles(model).items():
            level = SemiQuantService.nc_lookup(profile)
            barriers[barrier_id] = BarrierMetrics(
                barrier_id=barrier_id,
                confidence_level=level.value,
                risk_reduction_factor=float(level.risk_reduction_factor),
            )
        factors = {barrier_id: metrics.risk_reduction_factor for barrier_id, metrics in barriers.items()}
        tree = ModelService.resolve_event_tree(model, {b: 1.0 / f for b, f in factors.items()})
        uncredited = [(pair.initiating_event, pair.barrier) for pair in model.semiquant.uncredited]
        for ei, barrier_id in uncredited:
            logger.warning(f"⚠️ Barreira {barrier_id} não creditada contra {ei} (modo semi-quantitativo)")
        outcome = SemiQuantService.semiquant_propagate(
            ModelService.semiquant_ei_frequencies(model),
            model.ei_barrier_map,
            factors,
            tree,
            uncredited,
        )
        return CaseResult(
            approach=Approach.SEMI_QUANTITATIVE,
            case_id=case_id,
            barriers=barriers,
            erc_frequency=outcome.erc_frequency,
            contributions=outcome.contributions,
            phd_frequencies=outcome.phd_frequencies,
        )

    @staticmethod
    def evaluate_case(
        model: BowTieModel,
        approach: Approach,
        case_id: str,
        horizon: Optional[float] = None,
        grid_step: Optional[float] = None,
    ) -> CaseResult:
        horizon = horizon or model.evaluation.horizon_hours
        grid_step = grid_step or model.evaluation.grid_step_hours
        cased = ModelService.apply_case(model, ModelService.case_transform(model, case_id))
        if approach == Approach.QUANTITATIVE:
            result = ReportService._quantitative(cased, case_id, horizon, grid_step)
        else:
            result = ReportService._semi_quantitative(cased, case_id)
        logger.info(f"✅ {approach.title} / {case_id}: ERC = {format_frequency(result.erc_frequency)} /ano")
        return result

    @staticmethod
    def evaluate(
        model: BowTieModel,
        approach: str = BOTH_APPROACHES,
        case: str = ALL_CASES,
        horizon: Optional[float] = None,
        grid_step: Optional[float] = None,
        workers: Optional[int] = None,
    ) -> EvaluationResult:
        """
        Avalia o modelo nas abordagens e casos pedidos.

        Com mais de um worker os casos correm num pool de threads; a ordem do
        resultado é sempre (abordagem, caso) na ordem de declaração.
        """
        horizon = horizon or model.evaluation.horizon_hours
        grid_step = grid_step or model.evaluation.grid_step_hours
        if grid_step > horizon:
            raise ModelError(f"passo da grade ({grid_step} h) maior que o horizonte ({horizon} h)")
        jobs = [
            (selected, case_id)
            for selected in ReportService.resolve_approaches(approach)
            for case_id in ReportService.resolve_cases(model, case)
        ]
        workers = workers or settings.EVALUATION_WORKERS

        def run(job) -> CaseResult:
            return ReportService.evaluate_case(model, job[0], job[1], horizon, grid_step)

        if workers > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, jobs))
        else:
            results = [run(job) for job in jobs]

        return EvaluationResult(
            metadata=EvaluationMetadata(
                model_name=model.name,
                model_hash=ModelService.model_hash(model),
                horizon_hours=horizon,
                grid_step_hours=grid_step,
            ),
            results=results,
        )

    @staticmethod
    def compare(
        model: BowTieModel,
        case: str = ALL_CASES,
        horizon: Optional[float] = None,
        grid_step: Optional[float] = None,
    ) -> List[ComparisonRow]:
        """ERC das duas abordagens lado a lado, com a razão quantitativa / semi-quantitativa."""
        evaluation = ReportService.evaluate(model, BOTH_APPROACHES, case, horizon, grid_step)
        rows = []
        for case_id in evaluation.case_ids:
            quant = evaluation.get(Approach.QUANTITATIVE, case_id).erc_frequency
            semi = evaluation.get(Approach.SEMI_QUANTITATIVE, case_id).erc_frequency
            rows.append(
                ComparisonRow(
                    case_id=case_id,
                    quantitative_erc=quant,
                    semi_quantitative_erc=semi,
                    ratio=quant / semi if semi > 0 else None,
                )
            )
        return rows

    @staticmethod
    def barrier_profile(
        model: BowTieModel,
        barrier_id: str,
        case_id: str,
        horizon: Optional[float] = None,
        grid_step: Optional[float] = None,
    ) -> BarrierProfile:
        """Curva q(t) de uma barreira no caso pedido, nos pontos da grade de integração."""
        horizon = horizon or model.evaluation.horizon_hours
        grid_step = grid_step or model.evaluation.grid_step_hours
        cased = ModelService.apply_case(model, ModelService.case_transform(model, case_id))
        structure = ModelService.prevention_structure(cased)
        if barrier_id not in structure.barriers:
            raise ModelError(f"barreira desconhecida: {barrier_id}")
        times, values = BooleanService.barrier_profile(
            structure.barriers[barrier_id], structure.events, horizon, grid_step
        )
        return BarrierProfile(barrier_id=barrier_id, case_id=case_id, times=times.tolist(), values=values.tolist())

    # ---------------------------------------------------------- renderização

    @staticmethod
    def metric_rows(evaluation: EvaluationResult, approach: Approach, breakdown: bool = False) -> List[Row]:
        """Linhas (métrica, células por caso) de uma abordagem, já formatadas."""
        results = [evaluation.get(approach, case_id) for case_id in evaluation.case_ids]
        first = results[0]
        rows: List[Row] = []
        for barrier_id in first.barriers:
            if approach == Approach.QUANTITATIVE:
                rows.append((barrier_id, [format_frequency(r.barriers[barrier_id].pfd_avg) for r in results]))
            else:
                rows.append((barrier_id, [r.barriers[barrier_id].confidence_level for r in results]))
        for barrier_id in first.barriers:
            rows.append(
                (f"RRF {barrier_id}", [format_factor(r.barriers[barrier_id].risk_reduction_factor) for r in results])
            )
        rows.append(("ERC", [format_frequency(r.erc_frequency) for r in results]))
        if breakdown:
            for key in first.contributions:
                rows.append((f"ERC <- {key}", [format_frequency(r.contributions.get(key, 0.0)) for r in results]))
            for component_id in first.components:
                rows.append(
                    (f"PFDavg {component_id}", [format_frequency(r.components[component_id].pfd_avg) for r in results])
                )
                rows.append(
                    (
                        f"λT/2 {component_id}",
                        [format_frequency(r.components[component_id].simplified_pfd_avg) for r in results],
                    )
                )
        for label in first.phd_frequencies:
            rows.append((label, [format_frequency(r.phd_frequencies[label]) for r in results]))
        return rows

    @staticmethod
    def _align(header: Sequence[str], rows: Iterable[Sequence[str]]) -> List[str]:
        table = [list(header)] + [list(row) for row in rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(header))]
        return ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in table]

    @staticmethod
    def render_table(evaluation: EvaluationResult, breakdown: bool = False) -> str:
        meta = evaluation.metadata
        lines = [
            f"# modelo {meta.model_name} (sha256 {meta.model_hash[:12]}), "
            f"horizonte {meta.horizon_hours:g} h, passo {meta.grid_step_hours:g} h",
        ]
        for approach in evaluation.approaches:
            lines.append("")
            lines.append(f"== abordagem {approach.title} ==")
            rows = ReportService.metric_rows(evaluation, approach, breakdown)
            lines.extend(ReportService._align(["metric"] + evaluation.case_ids, ([m] + c for m, c in rows)))
        return "\n".join(lines) + "\n"

    @staticmethod
    def render_csv(evaluation: EvaluationResult, breakdown: bool = False) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["approach", "metric"] + evaluation.case_ids)
        for approach in evaluation.approaches:
            for metric, cells in ReportService.metric_rows(evaluation, approach, breakdown):
                writer.writerow([approach.value, metric] + cells)
        return buffer.getvalue()

    @staticmethod
    def _comparison_cells(rows: List[ComparisonRow]) -> List[List[str]]:
        return [
            [
                row.case_id,
                format_frequency(row.quantitative_erc),
                format_frequency(row.semi_quantitative_erc),
                format_factor(row.ratio) if row.ratio is not None else "",
            ]
            for row in rows
        ]

    @staticmethod
    def render_comparison_csv(rows: List[ComparisonRow]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["case", "quantitative_erc", "semi_quantitative_erc", "ratio"])
        writer.writerows(ReportService._comparison_cells(rows))
        return buffer.getvalue()

    @staticmethod
    def render_profile_csv(profile: BarrierProfile) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["t_hours", "q"])
        writer.writerows([f"{t:g}", format_frequency(q)] for t, q in zip(profile.times, profile.values))
        return buffer.getvalue()

    @staticmethod
    def render_comparison_table(rows: List[ComparisonRow]) -> str:
        header = ["case", "quantitative_erc", "semi_quantitative_erc", "ratio"]
        return "\n".join(ReportService._align(header, ReportService._comparison_cells(rows))) + "\n"
