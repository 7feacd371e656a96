"""
Command line interface for the qudit GME toolkit.

Every command returns its exit code: 0 success, 1 usage error, 2 validation
failure, 3 oracle-check failure. Results go to stdout or --out; logs go to
stderr and the log file.
"""
import json
import logging
from typing import List, Optional

import click

from config import config
from controllers.scan_controller import ScanController, ghz_reference_thresholds, parse_part, parse_parties
from controllers.state_controller import FAMILY_REGISTRY, build_family
from models.density_matrix import save_density_matrix
from models.report import Criterion, OptimizerConfig
from models.scan import PROBE_POLICIES, ScanSpec, parse_grid
from models.state_family import FAMILY_PARAMS, StateFamily
from utils.error_handler import EXIT_OK, OracleCheckFailure, UsageError, handle_errors, validate_input
from utils.report_generator import ReportGenerator, reports_to_payload

logger = logging.getLogger(__name__)


def family_options(func):
    """Options that pick one family member."""
    options = [
        click.option('--family', default='ghz', show_default=True,
                     type=click.Choice(sorted(FAMILY_REGISTRY)), help='State family'),
        click.option('--d', 'd', default=2, show_default=True, type=int, help='Local dimension'),
        click.option('--n', 'n', default=3, show_default=True, type=int, help='Number of parties'),
        click.option('--alpha', default=0.0, show_default=True, type=float, help='First mixing weight'),
        click.option('--beta', default=0.0, show_default=True, type=float, help='Second mixing weight'),
        click.option('--noise', 'p', default=None, type=float,
                     help='p: GHZ visibility for ghz, noise weight for w'),
        click.option('--state-file', type=click.Path(dir_okay=False), default=None,
                     help='JSON density matrix; implies --family custom-file'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def policy_option(func):
    return click.option('--probes', 'policy', default='fixed', show_default=True,
                        type=click.Choice(PROBE_POLICIES), help='Probe policy')(func)


def optimizer_options(func):
    options = [
        click.option('--restarts', default=config.OPT_RESTARTS, show_default=True, type=int),
        click.option('--iterations', default=config.OPT_ITERATIONS, show_default=True, type=int),
        click.option('--seed', default=config.OPT_SEED, show_default=True, type=int),
        click.option('--part', default=None, help='Single cut as side-A parties, e.g. 1,3'),
        click.option('--m', 'm', default=2, show_default=True, type=int, help='Copies for MLIN'),
        click.option('--workers', default=config.WORKERS, show_default=True, type=int),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def make_family(family, d, n, alpha, beta, p, state_file) -> StateFamily:
    if state_file:
        family = 'custom-file'
    return StateFamily(family=family, alpha=alpha, beta=beta, p=p, d=d, n=n, path=state_file)


def parse_criteria(values) -> List[Criterion]:
    names = [name for value in values for name in value.split(',') if name.strip()]
    validate_input(names or None, 'criterion')
    return [Criterion.parse(name.strip()) for name in names]


def make_controller(restarts, iterations, seed, workers) -> ScanController:
    validate_input(workers, 'workers', minimum=1)
    settings = OptimizerConfig(restarts=restarts, iterations=iterations, seed=seed)
    return ScanController(settings, workers=workers)


def emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, 'w', encoding='utf-8') as handle:
            handle.write(text)
        logger.info(f"Output written to {out}")
    else:
        click.echo(text.rstrip('\n'))


def emit_json(payload, out: Optional[str]) -> None:
    if out:
        ReportGenerator().write_json(payload, out)
    else:
        click.echo(json.dumps(payload, indent=2))


@click.group()
@click.version_option(config.APP_VERSION, prog_name=config.APP_NAME)
def cli():
    """Genuine multipartite entanglement criteria for qudit density matrices."""
    pass


@cli.command()
@family_options
@policy_option
@optimizer_options
@click.option('--criterion', multiple=True, default=('II',), show_default=True,
              help='I, II, III, MLIN or PPT; repeat or comma-separate')
@click.option('--format', 'fmt', default='text', show_default=True, type=click.Choice(['text', 'json']))
@click.option('--out', default=None, type=click.Path(dir_okay=False))
@handle_errors
def detect(family, d, n, alpha, beta, p, state_file, policy, restarts, iterations, seed,
           part, m, workers, criterion, fmt, out):
    """Evaluate criteria on one state."""
    member = make_family(family, d, n, alpha, beta, p, state_file)
    controller = make_controller(restarts, iterations, seed, workers)
    cut = parse_part(part, build_family(member).n) if part else None
    reports = controller.detect(member, parse_criteria(criterion), policy, cut, m)
    if fmt == 'json':
        emit_json(reports_to_payload(reports), out)
    else:
        lines = [f"{r.label:<24} lhs={r.lhs:+.9f}  {'VIOLATED' if r.violated else 'not violated'}"
                 for r in reports]
        emit('\n'.join(lines), out)
    return EXIT_OK


@cli.command()
@family_options
@policy_option
@optimizer_options
@click.option('--criterion', multiple=True, default=('II', 'III'), show_default=True,
              help='Criteria per cell; repeat or comma-separate')
@click.option('--grid', default='0:1:0.1,0:1:0.1', show_default=True, help='a0:a1:step,b0:b1:step')
@click.option('--format', 'fmt', default='csv', show_default=True, type=click.Choice(['csv', 'json', 'xlsx']))
@click.option('--out', default=None, type=click.Path(dir_okay=False))
@handle_errors
def scan(family, d, n, alpha, beta, p, state_file, policy, restarts, iterations, seed,
         part, m, workers, criterion, grid, fmt, out):
    """Evaluate criteria over an (alpha, beta) grid."""
    member = make_family(family, d, n, alpha, beta, p, state_file)
    controller = make_controller(restarts, iterations, seed, workers)
    alpha_axis, beta_axis = parse_grid(grid)
    spec = ScanSpec(
        family=member, alpha_axis=alpha_axis, beta_axis=beta_axis,
        criteria=tuple(parse_criteria(criterion)), policy=policy,
        optimizer=controller.optimizer.settings,
        part=parse_parties(part) if part else None, m=m, workers=workers,
    )
    result = controller.scan(spec)
    generator = ReportGenerator()
    if fmt == 'xlsx' and not out:
        raise UsageError("xlsx output needs --out")
    if out:
        generator.write_scan(result, out, fmt)
    else:
        click.echo(generator.render_scan(result, fmt).rstrip('\n'))
    return EXIT_OK


@cli.command()
@family_options
@policy_option
@optimizer_options
@click.option('--criterion', default='II', show_default=True)
@click.option('--param', default='p', show_default=True, type=click.Choice(FAMILY_PARAMS[:3]))
@click.option('--lo', default=0.0, show_default=True, type=float)
@click.option('--hi', default=1.0, show_default=True, type=float)
@click.option('--tol', default=1e-6, show_default=True, type=float)
@click.option('--out', default=None, type=click.Path(dir_okay=False))
@handle_errors
def threshold(family, d, n, alpha, beta, p, state_file, policy, restarts, iterations, seed,
              part, m, workers, criterion, param, lo, hi, tol, out):
    """Bisect the detection boundary along one parameter."""
    member = make_family(family, d, n, alpha, beta, p, state_file)
    controller = make_controller(restarts, iterations, seed, workers)
    value = controller.threshold(member, param, lo, hi, criterion, policy, tol, part, m)
    payload = {'family': member.family, 'param': param, 'criterion': Criterion.parse(criterion).value,
               'policy': policy, 'tol': tol, 'threshold': value}
    if member.family in ('ghz', 'ghz_noise') and param == 'p':
        payload['reference'] = ghz_reference_thresholds(member.d, member.n)
    emit_json(payload, out)
    return EXIT_OK


@cli.command()
@family_options
@optimizer_options
@click.option('--criterion', default='II', show_default=True, help='II, I or MLIN')
@click.option('--out', default=None, type=click.Path(dir_okay=False))
@handle_errors
def optimize(family, d, n, alpha, beta, p, state_file, restarts, iterations, seed,
             part, m, workers, criterion, out):
    """Search for the most violating probe."""
    member = make_family(family, d, n, alpha, beta, p, state_file)
    controller = make_controller(restarts, iterations, seed, workers)
    rho = controller.load(member)
    optimum = controller.optimizer.optimize_violation(rho, criterion, part=parse_part(part, rho.n), m=m)
    emit_json(optimum.to_dict(), out)
    return EXIT_OK


@cli.command('oracle-check')
@click.option('--n', 'n', default=3, show_default=True, type=int)
@click.option('--d', 'd', default=2, show_default=True, type=int)
@click.option('--m', 'm', default=2, show_default=True, type=int)
@click.option('--trials', default=100, show_default=True, type=int)
@click.option('--seed', default=config.OPT_SEED, show_default=True, type=int)
@click.option('--workers', default=config.WORKERS, show_default=True, type=int)
@click.option('--out', default=None, type=click.Path(dir_okay=False))
@handle_errors
def oracle_check(n, d, m, trials, seed, workers, out):
    """Compare reduced evaluators with brute-force tensor copies."""
    validate_input(trials, 'trials', minimum=1)
    summary = ScanController(workers=workers).oracle_check(n, d, m, trials, seed)
    emit_json(summary, out)
    if not summary['passed']:
        raise OracleCheckFailure(f"max deviation {summary['max_deviation']:.3e} exceeds "
                                 f"{summary['tolerance']:.0e}")
    return EXIT_OK


@cli.command('make-state')
@family_options
@click.option('--out', required=True, type=click.Path(dir_okay=False), help='Target JSON file')
@handle_errors
def make_state(family, d, n, alpha, beta, p, state_file, out):
    """Write a family member as a JSON state file."""
    member = make_family(family, d, n, alpha, beta, p, state_file)
    path = save_density_matrix(build_family(member), out)
    click.echo(f"State written to {path}")
    return EXIT_OK


@cli.command('show-config')
@handle_errors
def show_config():
    """Print the active configuration."""
    click.echo(json.dumps(config.as_dict(), indent=2, default=str))
    return EXIT_OK


if __name__ == '__main__':
    cli()
