"""
Linha de comando do motor bow-tie.

Usage:
    python -m app.cli evaluate [--model PATH] [--approach quant|semi|both] [--case cas0..cas4|all]
                               [--format table|csv] [--out PATH] [--horizon H] [--grid-step H] [--breakdown]
    python -m app.cli compare  [--model PATH] [--case ...] [--format csv|table] [--out PATH]
    python -m app.cli validate [--model PATH]
    python -m app.cli profile  --barrier ID [--model PATH] [--case cas0] [--out PATH] [--horizon H] [--grid-step H]
"""

import logging
import sys
from pathlib import Path
from typing import Optional

import click

from app.config.settings import settings
from app.errors import ModelValidationError, RiskEngineError
from app.models.bowtie import BowTieModel
from app.services.model_service import CASE_STUDY_PATH, ModelService
from app.services.report_service import ALL_CASES, BOTH_APPROACHES, ReportService

logger = logging.getLogger(__name__)

model_option = click.option(
    "--model",
    "model_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=CASE_STUDY_PATH,
    show_default="estudo de caso do separador",
    help="Arquivo JSON do modelo bow-tie.",
)
case_option = click.option("--case", "case", default=ALL_CASES, show_default=True, help="Caso de sensibilidade (cas0..cas4) ou 'all'.")
out_option = click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), help="Grava a saída neste arquivo.")
horizon_option = click.option("--horizon", type=click.FloatRange(min=0, min_open=True), help="Horizonte de integração (h).")
grid_option = click.option("--grid-step", type=click.FloatRange(min=0, min_open=True), help="Passo da grade de integração (h).")


def _fail(message: str) -> None:
    click.echo(message, err=True)
    sys.exit(1)


def _load(model_path: Path) -> BowTieModel:
    try:
        return ModelService.load_model(model_path)
    except ModelValidationError as e:
        _fail(f"Modelo inválido: {model_path}\n{e}")
    except UnicodeDecodeError as e:
        _fail(f"Modelo ilegível (não é UTF-8): {model_path}: {e}")
    except OSError as e:
        _fail(f"Não foi possível ler o modelo {model_path}: {e.strerror or e}")


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    out.write_text(text, encoding="utf-8")
    click.echo(f"Saída gravada em {out}", err=True)


@click.group()
@click.option("--log-level", default=None, help="Nível de log (padrão: LOG_LEVEL do ambiente).")
def cli(log_level: Optional[str]):
    """Avaliação quantitativa e semi-quantitativa de barreiras de prevenção (bow-tie)."""
    logging.basicConfig(stream=sys.stderr, level=(log_level or settings.log_level).upper())


@cli.command()
@model_option
@click.option("--approach", type=click.Choice(["quant", "semi", BOTH_APPROACHES]), default=BOTH_APPROACHES, show_default=True)
@case_option
@click.option("--format", "output_format", type=click.Choice(["table", "csv"]), default="table", show_default=True)
@out_option
@horizon_option
@grid_option
@click.option("--breakdown", is_flag=True, help="Inclui a contribuição de cada causa iniciadora no ERC.")
def evaluate(model_path, approach, case, output_format, out, horizon, grid_step, breakdown):
    """Avalia barreiras, ERC e fenômenos perigosos por caso."""
    model = _load(model_path)
    try:
        result = ReportService.evaluate(model, approach, case, horizon, grid_step)
    except RiskEngineError as e:
        _fail(f"Erro na avaliação: {e}")
    if output_format == "csv":
        _emit(ReportService.render_csv(result, breakdown), out)
    else:
        _emit(ReportService.render_table(result, breakdown), out)


@cli.command()
@model_option
@case_option
@click.option("--format", "output_format", type=click.Choice(["csv", "table"]), default="csv", show_default=True)
@out_option
@horizon_option
@grid_option
def compare(model_path, case, output_format, out, horizon, grid_step):
    """Compara o ERC das duas abordagens (razão quantitativa / semi-quantitativa)."""
    model = _load(model_path)
    try:
        rows = ReportService.compare(model, case, horizon, grid_step)
    except RiskEngineError as e:
        _fail(f"Erro na comparação: {e}")
    if output_format == "table":
        _emit(ReportService.render_comparison_table(rows), out)
    else:
        _emit(ReportService.render_comparison_csv(rows), out)


@cli.command()
@model_option
def validate(model_path):
    """Valida o modelo e lista todos os problemas encontrados."""
    try:
        ModelService.load_model(model_path)
    except ModelValidationError as e:
        click.echo(str(e), err=True)
        sys.exit(1)
    except RiskEngineError as e:
        _fail(str(e))
    except UnicodeDecodeError as e:
        _fail(f"Modelo ilegível (não é UTF-8): {model_path}: {e}")
    except OSError as e:
        _fail(f"Não foi possível ler o modelo {model_path}: {e.strerror or e}")
    click.echo("OK")


@cli.command()
@model_option
@click.option("--barrier", required=True, help="Barreira cuja curva q(t) é exportada.")
@click.option("--case", "case", default="cas0", show_default=True, help="Caso de sensibilidade.")
@out_option
@horizon_option
@grid_option
def profile(model_path, barrier, case, out, horizon, grid_step):
    """Exporta em CSV a indisponibilidade instantânea de uma barreira ao longo do horizonte."""
    model = _load(model_path)
    try:
        result = ReportService.barrier_profile(model, barrier, case, horizon, grid_step)
    except RiskEngineError as e:
        _fail(f"Erro no perfil: {e}")
    _emit(ReportService.render_profile_csv(result), out)


if __name__ == "__main__":
    cli()
