#!/usr/bin/env python3
"""Command-line front end: mana, harvest, sweep, optimize, verify."""
import argparse
import logging
import sys

from config import settings
from models.harvest import HarvestParams, SweepRow
from models.quadrature import EpsilonSchedule, QuadratureSpec
from models.run_config import RunConfig, parse_eps_levels
from services import harvest, phase_space, storage
from services.config_validator import VALID_LOG_LEVELS, RunConfigValidator
from services.error_handler import EXIT_OK, ErrorHandler, VerificationFailed
from services.state_validator import StateValidator
from services.verification import AcceptanceSuite, all_passed

logger = logging.getLogger(__name__)


def eps_levels_arg(text: str):
    try:
        return parse_eps_levels(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _add_physics_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--lambda', dest='coupling', type=float,
                        help=f'coupling strength (default {settings.coupling})')
    parser.add_argument('--omega', type=float,
                        help=f'energy gap, applied to both transitions (default {settings.omega})')
    parser.add_argument('--sigma-t', dest='sigma_t', type=float,
                        help=f'Gaussian switching scale (default {settings.sigma_t})')
    parser.add_argument('--omega-sigma', dest='omega_sigma', type=float,
                        help='dimensionless product omega*sigma_t; overrides --omega')
    parser.add_argument('--method', choices=harvest.METHODS,
                        help=f'closed forms or quadrature oracle (default {settings.method})')
    parser.add_argument('--eps-levels', dest='eps_levels', type=eps_levels_arg,
                        help=f'regulator levels K_MIN:K_MAX, eps_k = sigma_t*2^-k '
                             f'(default {settings.eps_k_min}:{settings.eps_k_max})')
    parser.add_argument('--tol', type=float,
                        help=f'absolute quadrature tolerance (default {settings.quad_abs_tol:g})')
    parser.add_argument('--workers', type=int,
                        help='worker threads for sweep points')
    parser.add_argument('--output', help='write the result to this path instead of stdout')
    parser.add_argument('--format', choices=('csv', 'json'), help='output format')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mana-harvest',
        description='Mana of a three-level detector coupled to the scalar vacuum.',
    )
    parser.add_argument('--log-level', dest='log_level', default=None,
                        type=str.upper, choices=VALID_LOG_LEVELS,
                        help=f'logging level on stderr (default {settings.log_level})')
    sub = parser.add_subparsers(dest='command', required=True)

    mana_parser = sub.add_parser('mana', help='mana of a density matrix stored as JSON')
    mana_parser.add_argument('state_file', help='DensityMatrix JSON file')

    harvest_parser = sub.add_parser('harvest', help='single harvesting run')
    _add_physics_flags(harvest_parser)

    sweep_parser = sub.add_parser('sweep', help='scan omega*sigma_t and emit a CSV table')
    _add_physics_flags(sweep_parser)
    sweep_parser.add_argument('--min', dest='x_min', type=float, default=0.0)
    sweep_parser.add_argument('--max', dest='x_max', type=float, default=5.0)
    sweep_parser.add_argument('--steps', type=int, default=101)

    optimize_parser = sub.add_parser('optimize', help='maximise the closed-form mana')
    optimize_parser.add_argument('--lambda', dest='coupling', type=float,
                                 help=f'coupling strength (default {settings.coupling})')
    optimize_parser.add_argument('--output', help='write JSON to this path')

    sub.add_parser('verify', help='run the acceptance suite')
    return parser


def _params_for(config: RunConfig) -> HarvestParams:
    quadrature = QuadratureSpec.from_settings(settings, target_abs_tol=config.tol)
    eps = EpsilonSchedule.dyadic(config.sigma_t, config.eps_k_min, config.eps_k_max)
    return HarvestParams.equal_gaps(config.coupling, config.omega, config.sigma_t,
                                    quadrature=quadrature, eps=eps)


def _emit_json(data: dict, output):
    if output:
        storage.save_json(data, output)
    else:
        storage.dump_json(data, sys.stdout)


def cmd_mana(config: RunConfig) -> int:
    rho = storage.load_density_matrix(config.state_file)
    StateValidator(psd_tolerance=settings.psd_tolerance).validate_or_raise(rho)
    print(f"{phase_space.mana(rho):.12f}")
    return EXIT_OK


def cmd_harvest(config: RunConfig) -> int:
    result = harvest.run_pipeline(_params_for(config), config.method)
    if config.format == 'csv':
        rows = [SweepRow.from_result(result)]
        if config.output:
            storage.save_sweep_csv(rows, config.output)
        else:
            storage.write_sweep_csv(rows, sys.stdout)
    else:
        _emit_json(result.to_dict(), config.output)
    return EXIT_OK


def cmd_sweep(config: RunConfig) -> int:
    params = _params_for(config)
    rows = harvest.sweep(
        config.x_min, config.x_max, config.steps, config.coupling,
        method=config.method, sigma_t=config.sigma_t, workers=config.workers,
        quadrature=params.quadrature, eps=params.eps,
    )
    if config.format == 'json':
        _emit_json({"rows": [row.to_dict() for row in rows]}, config.output)
    elif config.output:
        storage.save_sweep_csv(rows, config.output)
    else:
        storage.write_sweep_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_optimize(config: RunConfig) -> int:
    best = harvest.optimize(config.coupling)
    data = best.to_dict()
    data["coupling"] = config.coupling
    _emit_json(data, config.output)
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    results = AcceptanceSuite().run()
    for result in results:
        print(result)
    if not all_passed(results):
        failed = [r.name for r in results if not r.passed]
        raise VerificationFailed(f"failed criteria: {', '.join(failed)}", failed)
    print(f"all {len(results)} criteria passed")
    return EXIT_OK


HANDLERS = {
    'mana': cmd_mana,
    'harvest': cmd_harvest,
    'sweep': cmd_sweep,
    'optimize': cmd_optimize,
    'verify': cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        stream=sys.stderr,
        format='%(levelname)s %(name)s: %(message)s',
    )
    handler = ErrorHandler()
    try:
        config = RunConfig.from_args(args, settings)
        RunConfigValidator(config).validate_or_raise()
        return HANDLERS[config.command](config)
    except Exception as e:
        code = handler.handle(e)
        print(handler.describe(e), file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
