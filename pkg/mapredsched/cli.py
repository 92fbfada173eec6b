"""Command line interface of mapredsched.

Every subcommand reads workloads and writes results as JSON (or CSV for
experiments). Exit code 0 on success, 1 on bad input or an illegal schedule,
2 when an internal invariant failed.
"""
import argparse
import logging
import sys
from typing import List, Optional

from .baselines import SCHEDULERS, run_scheduler
from .bench import (BENCHMARKS, PRESETS, emit_results, generate_scenario, preset_scenario,
                    run_scenario, scenario_from_dict)
from .errors import *
from .lprelax import solve_lp
from .model import derive_stats, load_workload
from .pretty import (parse_schedule, prettify_lp, prettify_schedule, prettify_trace,
                     prettify_violations, prettify_workload)
from .simulator import PERTURB_SCOPES, PerturbationModel, execute_dynamic, execute_static, validate_schedule
from .utils import dump_json, load_json, parse_bool, parse_factor_range, parse_seed_range

logger = logging.getLogger('mapredsched')

class _Parser(argparse.ArgumentParser):
    """Usage errors are bad input, so they exit with 1."""
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f'{self.prog}: error: {message}\n')

def _argtype(parse):
    def convert(text):
        try:
            return parse(text)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e))
    convert.__name__ = parse.__name__
    return convert

def _write(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, 'w', newline='') as file:
            file.write(text)
        logger.info(f'Saved to: {output}')

def _scenario(args):
    if args.spec is not None:
        spec = scenario_from_dict(load_json(args.spec))
        if args.preset is not None or args.benchmark is not None or args.count is not None:
            raise InvalidSpec('--spec can not be combined with --preset, --benchmark or --count.')
        return spec
    if args.preset is None:
        raise InvalidSpec('Give a scenario with --spec or --preset.')
    return preset_scenario(args.preset, args.benchmark, args.count)

def _perturbation(args, seed: int) -> Optional[PerturbationModel]:
    if args.perturb is None:
        return None
    lo, hi = args.perturb
    return PerturbationModel('multiplicative', lo, hi, seed, args.perturb_scope)

def cmd_generate(args) -> int:
    spec = _scenario(args)
    w = generate_scenario(spec, args.seed)
    _write(dump_json(prettify_workload(w)), args.output)
    return 0

def cmd_solve_lp(args) -> int:
    w = load_workload(args.workload)
    s = derive_stats(w)
    lp = solve_lp(w, s)
    _write(dump_json(prettify_lp(lp)), args.output)
    return 0

def cmd_schedule(args) -> int:
    w = load_workload(args.workload)
    sch = run_scheduler(args.scheduler, w, seed=args.seed, early_reduce=args.fifo_early_reduce)
    _write(dump_json(prettify_schedule(sch)), args.output)
    return 0

def cmd_simulate(args) -> int:
    w = load_workload(args.workload)
    sch = run_scheduler(args.scheduler, w, seed=args.seed, early_reduce=args.fifo_early_reduce)
    perturb = _perturbation(args, args.seed)
    if args.mode == 'dynamic':
        if args.scheduler != 'dmrs':
            raise InvalidSpec('Dynamic mode replans with DMRS, use --scheduler dmrs.')
        trace = execute_dynamic(w, sch.order, perturb)
    else:
        trace = execute_static(w, sch, perturb)
    _write(dump_json(prettify_trace(trace)), args.output)
    summary = f'TWCT {trace.twct:.3f}s ({trace.twct / 3600:.4f}h), replanned {trace.replan_count} tasks\n'
    # keep stdout parseable when the trace goes there
    (sys.stdout if args.output else sys.stderr).write(summary)
    return 0

def cmd_validate(args) -> int:
    w = load_workload(args.workload)
    sch = parse_schedule(w, load_json(args.schedule))
    violations = validate_schedule(w, sch)
    _write(dump_json(prettify_violations(violations)), args.output)
    if violations:
        logger.error(f'Schedule has {len(violations)} violations.')
        return 1
    return 0

def cmd_experiment(args) -> int:
    spec = _scenario(args)
    res = run_scenario(
        spec, args.seeds,
        mode=args.mode,
        perturb=args.perturb,
        perturb_scope=args.perturb_scope,
        early_reduce=args.fifo_early_reduce,
    )
    data = emit_results(res, args.format)
    if args.output is None:
        sys.stdout.buffer.write(data)
    else:
        with open(args.output, 'wb') as file:
            file.write(data)
        logger.info(f'Saved to: {args.output}')
    return 0

def _add_scenario_args(parser):
    parser.add_argument('--spec', help='scenario JSON file')
    parser.add_argument('--preset', choices=PRESETS)
    parser.add_argument('--benchmark', choices=sorted(BENCHMARKS))
    parser.add_argument('--count', type=int, help='large jobs of large-small, elephants of elephant')

def _add_run_args(parser, scheduler: bool=True):
    if scheduler:
        parser.add_argument('--scheduler', choices=SCHEDULERS, default='dmrs')
    parser.add_argument('--fifo-early-reduce', type=_argtype(parse_bool), default=True, metavar='true|false')

def _add_perturb_args(parser):
    parser.add_argument('--mode', choices=('static', 'dynamic'), default='static')
    parser.add_argument('--perturb', type=_argtype(parse_factor_range), metavar='lo,hi')
    parser.add_argument('--perturb-scope', choices=PERTURB_SCOPES, default='task')

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='mapredsched', description='LP-guided scheduling of map/reduce jobs on heterogeneous machines.')
    parser.add_argument('-v', '--verbose', action='store_true', help='log debug messages')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('generate', help='draw a workload from a scenario')
    _add_scenario_args(p)
    p.add_argument('--seed', type=int, help='defaults to the seed of the scenario')
    p.add_argument('-o', '--output')
    p.set_defaults(func=cmd_generate)

    p = commands.add_parser('solve-lp', help='solve the LP relaxation of a workload')
    p.add_argument('workload')
    p.add_argument('-o', '--output')
    p.set_defaults(func=cmd_solve_lp)

    p = commands.add_parser('schedule', help='plan a schedule')
    p.add_argument('workload')
    _add_run_args(p)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('-o', '--output')
    p.set_defaults(func=cmd_schedule)

    p = commands.add_parser('simulate', help='plan and execute a schedule')
    p.add_argument('workload')
    _add_run_args(p)
    _add_perturb_args(p)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('-o', '--output')
    p.set_defaults(func=cmd_simulate)

    p = commands.add_parser('validate', help='check a schedule file against a workload')
    p.add_argument('workload')
    p.add_argument('schedule')
    p.add_argument('-o', '--output')
    p.set_defaults(func=cmd_validate)

    p = commands.add_parser('experiment', help='compare every scheduler over a range of seeds')
    _add_scenario_args(p)
    _add_run_args(p, scheduler=False)
    _add_perturb_args(p)
    p.add_argument('--seeds', type=_argtype(parse_seed_range), default=[0], metavar='a..b')
    p.add_argument('--format', choices=('csv', 'json'), default='csv')
    p.add_argument('-o', '--output')
    p.set_defaults(func=cmd_experiment)
    return parser

def main(argv: Optional[List[str]]=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (MapRedSchedException, OSError) as e:
        if is_internal(e) and isinstance(e, MapRedSchedException):
            logger.error(f'Internal error: {e}')
            return 2
        logger.error(str(e))
        return 1
    except Exception:
        logger.exception('Internal error')
        return 2

if __name__ == '__main__':
    sys.exit(main())
