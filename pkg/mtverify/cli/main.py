"""
CLI entry point for mtverify

Provides theta, check, classify, cache and run commands.
"""

import json
import typer
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from rich.console import Console
from rich.table import Table

from ..checks.factory import CheckFactory
from ..config.loader import ConfigLoader
from ..core.arith import format_rational
from ..core.cache import CoefficientCache
from ..core.conjectures import classify_primes
from ..core.curve import load_curve
from ..core.groupring import AbelianFieldSpec
from ..core.mazurtate import theta, write_theta
from ..core.modsym import SymbolOptions
from ..core.report import Verdict, write_reports
from ..core.suite import execute, run_suite
from ..logging.logger import setup_logger


# Create Typer app
app = typer.Typer(
    name="mtverify",
    help="Verification toolkit for Mazur-Tate elements of elliptic curves",
    add_completion=False
)

console = Console()


class CheckType(str, Enum):
    """Supported checks"""
    norm = "norm"
    funceq = "funceq"
    interp = "interp"
    integrality = "integrality"
    otsuki = "otsuki"
    honda = "honda"
    g_h = "g-h"
    multiplicative = "multiplicative"
    hypothesis = "hypothesis"
    order = "order"
    leading_term = "leading-term"


class CacheAction(str, Enum):
    """Cache maintenance actions"""
    warm = "warm"
    verify = "verify"
    purge = "purge"


VERDICT_STYLES = {
    Verdict.passed: "green",
    Verdict.failed: "red",
    Verdict.undecided: "yellow",
    Verdict.hypothesis_violated: "magenta",
}


def _load(config_file: Optional[str]) -> Tuple[ConfigLoader, Dict[str, Any]]:
    """Load configuration and set up the logger"""
    config = ConfigLoader(config_file)
    setup_logger(log_file=config.get_log_file(), level=config.get_log_level())
    return config, config.get_settings()


def _parse_params(values: List[str]) -> Dict[str, Any]:
    """Parse repeated KEY=VALUE options into check parameters"""
    params: Dict[str, Any] = {}
    for item in values:
        key, sep, value = item.partition('=')
        if not sep or not key:
            raise ValueError(f"Invalid parameter: {item}. Expected KEY=VALUE")
        params[key.strip()] = _scalar(value.strip())
    return params


def _scalar(value: str) -> Any:
    # Plain ints and booleans; everything else (field specs, character labels) stays text
    try:
        return int(value)
    except ValueError:
        return {"true": True, "false": False}.get(value.lower(), value)


def _fail(prefix: str, e: Exception) -> None:
    typer.echo(f"Error: {prefix}: {e}", err=True)
    raise typer.Exit(code=1)


@app.command("theta")
def theta_command(
    curve_file: str = typer.Option(..., "--curve", help="Path to the curve file"),
    field: str = typer.Option("m=1", "--field", help="Field spec 'm=<int>;H=<residues>'"),
    out: Optional[str] = typer.Option(None, "--out", help="Write theta to this file"),
    digits: Optional[int] = typer.Option(None, "--digits", help="Decimal digits for the periods"),
    config_file: Optional[str] = typer.Option(
        None,
        "--config",
        help="Path to config.yaml file (default: searches current directory)"
    )
):
    """
    Compute the Mazur-Tate element of a field

    Example:
        mtverify theta --curve curves/11a1.yaml --field "m=5" --out theta_11a1_5.txt
    """
    try:
        config, settings = _load(config_file)
        if digits is not None:
            settings['decimal_digits'] = digits
        curve = load_curve(curve_file)
        spec = AbelianFieldSpec.parse(field)
        store = CoefficientCache.from_config(config.get_cache_config())
        value = theta(curve, spec, SymbolOptions.from_settings(settings, store))

        for a, c in value.element.items():
            typer.echo(f"sigma_{a}: {format_rational(c)}")
        if out:
            path = write_theta(value, out)
            typer.echo(f"\nTheta written to: {path}")

    except FileNotFoundError as e:
        _fail("File not found", e)
    except ValueError as e:
        _fail("Invalid input", e)
    except RuntimeError as e:
        _fail("Computation failed", e)
    except Exception as e:
        _fail("Unexpected error", e)


@app.command()
def check(
    name: CheckType = typer.Argument(..., help="Check to run"),
    curve_file: str = typer.Option(..., "--curve", help="Path to the curve file"),
    field: Optional[str] = typer.Option(None, "--field", help="Field spec 'm=<int>;H=<residues>'"),
    p: Optional[int] = typer.Option(None, "--p", help="Prime p"),
    k: Optional[int] = typer.Option(None, "--k", help="p-adic digits"),
    digits: Optional[int] = typer.Option(None, "--digits", help="Decimal digits"),
    deg: Optional[int] = typer.Option(None, "--deg", help="Series degree"),
    rank: Optional[int] = typer.Option(None, "--rank", help="r_p (default: detected analytic rank)"),
    out: Optional[str] = typer.Option(None, "--out", help="Write the JSON report to this file"),
    param: List[str] = typer.Option([], "--param", "-P", help="Extra check parameter KEY=VALUE (repeatable)"),
    config_file: Optional[str] = typer.Option(
        None,
        "--config",
        help="Path to config.yaml file (default: searches current directory)"
    )
):
    """
    Run a single check and print its verdict

    Example:
        mtverify check norm --curve curves/11a1.yaml --field "m=3" -P ell=2
        mtverify check order --curve curves/11a1.yaml --field "m=5" --p 7 --rank 0
    """
    try:
        config, settings = _load(config_file)
        curve = load_curve(curve_file)
        params = _parse_params(param)
        if field is not None:
            params.setdefault('field', field)
            params.setdefault('m', AbelianFieldSpec.parse(field).m)
        for key, value in (('p', p), ('k', k), ('digits', digits), ('deg', deg), ('rank', rank)):
            if value is not None:
                params[key] = value

        store = CoefficientCache.from_config(config.get_cache_config())
        handler = CheckFactory.get_handler(name.value, settings, store)
        reports = [execute(curve, (name.value, q), settings, cache=store) for q in handler.expand(curve, params)]

        for report in reports:
            style = VERDICT_STYLES[report.verdict]
            console.print(f"{report.check_id} {report.parameters}: [{style}]{report.verdict.value}[/{style}]")
            if report.message:
                typer.echo(f"  {report.message}")
        if out:
            path = write_reports(reports, Path(out))
            typer.echo(f"Report: {path}")
        elif len(reports) == 1:
            typer.echo(json.dumps(reports[0].to_dict()["witnesses"], indent=2, sort_keys=True))

        if any(report.failed for report in reports):
            raise typer.Exit(code=1)

    except typer.Exit:
        raise
    except FileNotFoundError as e:
        _fail("File not found", e)
    except ValueError as e:
        _fail("Invalid input", e)
    except RuntimeError as e:
        _fail("Check failed", e)
    except Exception as e:
        _fail("Unexpected error", e)


@app.command()
def classify(
    curve_file: str = typer.Option(..., "--curve", help="Path to the curve file"),
    field: str = typer.Option(..., "--field", help="Field spec 'm=<int>;H=<residues>'"),
    p: int = typer.Option(..., "--p", help="Prime p > 3"),
    rank: Optional[int] = typer.Option(None, "--rank", help="r_p, to print the predicted order"),
    config_file: Optional[str] = typer.Option(
        None,
        "--config",
        help="Path to config.yaml file (default: searches current directory)"
    )
):
    """
    Classify the primes of m * N into C_x, C_2, C_0 and Sp

    Example:
        mtverify classify --curve curves/11a1.yaml --field "m=5" --p 7 --rank 0
    """
    try:
        _, settings = _load(config_file)
        curve = load_curve(curve_file)
        spec = AbelianFieldSpec.parse(field)
        classification = classify_primes(curve, spec, p, settings['c2_ap'])

        table = Table(title=f"{curve.label}, K = {spec}, p = {p}")
        for column in ("ell", "a_ell", "f", "C_x", "C_2", "C_0", "split mult."):
            table.add_column(column)
        mark = lambda flag: "yes" if flag else ""
        for r in classification.records:
            table.add_row(
                str(r.ell), str(r.a_ell), str(r.residue_degree),
                mark(r.in_c_times), mark(r.in_c_2), mark(r.in_c_0), mark(r.split_multiplicative),
            )
        console.print(table)
        typer.echo(f"sp(m) = {classification.sp}, c(K) = {classification.c}")
        if rank is not None:
            predicted = rank + classification.sp + 2 * classification.c
            typer.echo(f"predicted order of vanishing: {predicted}")

    except FileNotFoundError as e:
        _fail("File not found", e)
    except ValueError as e:
        _fail("Invalid input", e)
    except RuntimeError as e:
        _fail("Classification failed", e)
    except Exception as e:
        _fail("Unexpected error", e)


@app.command()
def cache(
    action: CacheAction = typer.Argument(..., help="warm, verify or purge"),
    curve_file: Optional[str] = typer.Option(None, "--curve", help="Path to the curve file (purge: all when omitted)"),
    bound: Optional[int] = typer.Option(None, "--bound", help="Largest n for warm (default: precision.max_terms)"),
    config_file: Optional[str] = typer.Option(
        None,
        "--config",
        help="Path to config.yaml file (default: searches current directory)"
    )
):
    """
    Maintain the coefficient cache

    Example:
        mtverify cache warm --curve curves/11a1.yaml --bound 2000
    """
    try:
        config, settings = _load(config_file)
        store = CoefficientCache.from_config(config.get_cache_config())
        curve = load_curve(curve_file) if curve_file else None

        if action == CacheAction.purge:
            removed = store.purge(curve)
            typer.echo(f"Removed {removed} cache file(s) from {store.directory}")
            return
        if curve is None:
            typer.echo(f"Error: '{action.value}' needs --curve", err=True)
            raise typer.Exit(code=1)
        if action == CacheAction.warm:
            path = store.warm(curve, bound or settings['max_terms'], settings['tate_series_terms'] + 2)
            typer.echo(f"Cache warmed: {path}")
        else:
            checked = store.verify(curve)
            typer.echo(f"Cache clean: {checked} coefficients recomputed")

    except typer.Exit:
        raise
    except FileNotFoundError as e:
        _fail("File not found", e)
    except ValueError as e:
        _fail("Invalid input", e)
    except RuntimeError as e:
        _fail("Cache error", e)
    except Exception as e:
        _fail("Unexpected error", e)


@app.command()
def run(
    spec_file: str = typer.Option(..., "--spec", help="Path to the run specification"),
    out: Optional[str] = typer.Option(None, "--out", help="Report path (overrides the specification)"),
    no_timing: bool = typer.Option(False, "--no-timing", help="Leave elapsed times out of the report"),
    config_file: Optional[str] = typer.Option(
        None,
        "--config",
        help="Path to config.yaml file (default: searches current directory)"
    )
):
    """
    Run a suite of checks; exits 1 if any check failed

    Example:
        mtverify run --spec suites/11a1.yaml --out reports/11a1.json
    """
    try:
        config, settings = _load(config_file)
        store = CoefficientCache.from_config(config.get_cache_config())
        workers = config.get_suite_config()['workers']
        result = run_suite(
            spec_file,
            settings,
            workers=workers,
            cache=store,
            output=Path(out) if out else None,
            include_timing=not no_timing,
        )

        table = Table(title="Suite summary")
        table.add_column("verdict")
        table.add_column("count", justify="right")
        for verdict in Verdict:
            style = VERDICT_STYLES[verdict]
            table.add_row(f"[{style}]{verdict.value}[/{style}]", str(result.summary[verdict.value]))
        console.print(table)
        if result.output:
            typer.echo(f"Report: {result.output}")

        if result.exit_code:
            raise typer.Exit(code=result.exit_code)

    except typer.Exit:
        raise
    except FileNotFoundError as e:
        _fail("File not found", e)
    except ValueError as e:
        _fail("Configuration error", e)
    except RuntimeError as e:
        _fail("Suite failed", e)
    except Exception as e:
        _fail("Unexpected error", e)


@app.callback(invoke_without_command=True)
def main(
    version: bool = typer.Option(
        False,
        "--version",
        "-v",
        help="Show version information"
    )
):
    """
    mtverify - Verification toolkit for Mazur-Tate elements of elliptic curves

    Checks:
    - Norm relations, functional equation, interpolation, integrality
    - Otsuki operator calculus
    - Honda type of the formal group
    - Order of vanishing and leading-term congruence
    """
    if version:
        from .. import __version__
        typer.echo(f"mtverify version {__version__}")
        raise typer.Exit()


if __name__ == "__main__":
    app()
