import sys
import logging
from argparse import ArgumentParser, ArgumentDefaultsHelpFormatter,\
    RawTextHelpFormatter

from .greeks import ESTIMATORS, NestedRunner, BumpRunner, \
    report_variance_reduction
from .resultwriter import estimates_to_frame, create_writer
from .runconfig import RunConfig, ConfigError, read_config_file, CASES, \
    CUSTOM, FORMATS, LOG_LEVEL
from .scenarioengine import ScenarioGenerator
from .validation import validate

help_message = """
Estimate the liability, delta and gamma of a GMWB variable annuity under a
Heston equity model with CIR interest rates.

For example:
 > va-greeks run --case A
 > va-greeks run --case C --estimators bump mixed --format csv --out c.csv
 > va-greeks run --config case_e.cfg --outer 2000 --jobs 4
 > va-greeks validate --samples 1000000

Settings come from class defaults, then the --config file, then flags.
"""

logger = logging.getLogger(__name__)

OK = 0
VALIDATION_FAILED = 1
BAD_CONFIG = 2


class Formatter(ArgumentDefaultsHelpFormatter, RawTextHelpFormatter):
    pass


def parse_args(argv=None):
    """Parse command line arguments."""
    parser = ArgumentParser(prog="va-greeks", description=help_message,
                            formatter_class=Formatter)
    parser.add_argument(
        "-l", "--log-level", type=int, dest="log_level", choices=[1, 2, 3],
        default=None,
        help="Logging level (off=3, info=2, debug=1). Default is info.")
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    run = commands.add_parser(
        "run", formatter_class=Formatter,
        help="Estimate the liability and Greeks for one case.")
    run.add_argument(
        "--config", type=str, default=None, dest="config",
        help="Flat key = value file. Flags override its values.")

    # None defaults leave the config file or RunConfig defaults in place
    model_args = run.add_argument_group("Model and contract")
    model_args.add_argument(
        "-c", "--case", type=str, default=None, dest="case",
        help="Built-in case ({}) or {} with model keys in the config "
             "file.".format(", ".join(sorted(CASES)), CUSTOM))
    model_args.add_argument(
        "--mortality", type=str, default=None, dest="mortality",
        help="Mortality table file (age q). Gompertz-Makeham if not given.")
    model_args.add_argument(
        "--s0", type=float, default=None, dest="s0",
        help="Initial equity level. Default is {}.".format(RunConfig.s0))

    sim_args = run.add_argument_group("Simulation")
    sim_args.add_argument(
        "-e", "--estimators", type=str, nargs="*", default=None,
        dest="estimators",
        help="Any of {} or all.".format(", ".join(ESTIMATORS)))
    sim_args.add_argument(
        "-p", "--paths", type=int, default=None, dest="paths",
        help="Paths per bump leg. Default is {}.".format(RunConfig.n_paths))
    sim_args.add_argument(
        "--outer", type=int, default=None, dest="outer",
        help="Variance/rate outer paths. Default is {}.".format(
            RunConfig.n_outer))
    sim_args.add_argument(
        "--inner", type=int, default=None, dest="inner",
        help="Equity paths per outer path. Default is {}.".format(
            RunConfig.n_inner))
    sim_args.add_argument(
        "--steps-per-year", type=int, default=None, dest="steps_per_year",
        help="Euler steps per year. Default is {}.".format(
            RunConfig.steps_per_year))
    sim_args.add_argument(
        "-b", "--bump", type=float, default=None, dest="bump",
        help="Relative S0 bump. Default is {}.".format(RunConfig.bump))
    sim_args.add_argument(
        "-s", "--seed", type=int, default=None, dest="seed",
        help="Root seed. Default is {}.".format(RunConfig.seed))
    sim_args.add_argument(
        "-j", "--jobs", type=int, default=None, dest="jobs",
        help="Worker threads. Results do not depend on this.")
    sim_args.add_argument(
        "--block-size", type=int, default=None, dest="block_size",
        help="Outer paths per work item. Default is {}.".format(
            RunConfig.block_size))

    output_args = run.add_argument_group("Output")
    output_args.add_argument(
        "-o", "--out", type=str, default=None, dest="out",
        help="Output file. Standard output if not given.")
    output_args.add_argument(
        "-f", "--format", type=str, default=None, dest="format",
        choices=FORMATS, help="Output format. Default is table.")

    check = commands.add_parser(
        "validate", formatter_class=Formatter,
        help="Check the estimators against Black-Scholes closed forms.")
    check.add_argument(
        "-n", "--samples", type=int, default=10 ** 6, dest="samples",
        help="Samples per check.")
    check.add_argument(
        "-s", "--seed", type=int, default=0, dest="seed",
        help="Oracle stream seed.")

    return parser.parse_args(argv)


def _settings(args):
    values = {}
    if args.config is not None:
        values.update(read_config_file(args.config))
    flags = {
        "case": args.case, "estimators": args.estimators, "paths": args.paths,
        "outer": args.outer, "inner": args.inner,
        "steps-per-year": args.steps_per_year, "bump": args.bump,
        "seed": args.seed, "out": args.out, "format": args.format,
        "jobs": args.jobs, "block-size": args.block_size,
        "mortality": args.mortality, "s0": args.s0,
        "log-level": args.log_level,
    }
    for key, value in flags.items():
        if value is not None:
            values[key] = value
    return values


def run_case(config):
    """Run both simulation set-ups for one configured case.

    Args:
        config(RunConfig): Validated run settings

    Returns:
        list(GreekEstimate): Bump set-up estimates then nested estimates

    """
    params = config.model_params()
    product = config.product()
    generator = ScenarioGenerator(
        params, horizon=product.term, seed=config.seed,
        steps_per_year=config.steps_per_year, quadrature=config.quadrature,
        scheme=config.scheme, log_level=config.log_level)

    logger.info("Case %s: %s", config.case, ", ".join(config.estimators))
    bump = BumpRunner(generator, product, n_paths=config.n_paths,
                      bump=config.bump, scheme=config.bump_scheme,
                      block_size=config.block_size, n_jobs=config.n_jobs,
                      log_level=config.log_level)
    nested = NestedRunner(generator, product, n_outer=config.n_outer,
                          n_inner=config.n_inner,
                          block_size=config.block_size, n_jobs=config.n_jobs,
                          log_level=config.log_level)

    estimates = bump.run(config.s0, config.estimators) + \
        nested.run(config.s0, config.estimators)
    report_variance_reduction(estimates, logger)
    return estimates


def write_results(config, estimates):
    frame = estimates_to_frame(config.case, estimates)
    writer = create_writer(config.format, config.out,
                           target_node="{}/seed_{}".format(config.case,
                                                           config.seed),
                           log_level=config.log_level)
    if config.format == "hdf5":
        writer.write(frame, attributes=dict(case=config.case,
                                            seed=config.seed))
    else:
        writer.write(frame)
    return frame


def report(results, stream=None):
    """Print one line per oracle check with its deviation in SE."""
    stream = stream or sys.stdout
    for result in results:
        stream.write("{status:4} {name:22} {estimate:12.6g} {expected:12.6g} "
                     "{deviation:6.2f} SE\n".format(
                         status="ok" if result.passed else "FAIL",
                         name=result.name, estimate=result.estimate,
                         expected=result.expected,
                         deviation=result.deviation))


def main(argv=None):
    """Run program."""
    logging.basicConfig(
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")

    args = parse_args(argv)
    logger.setLevel((args.log_level or LOG_LEVEL) * 10)

    try:
        if args.command == "validate":
            results = validate(n_samples=args.samples, seed=args.seed)
            report(results)
            return OK if all(r.passed for r in results) else VALIDATION_FAILED

        config = RunConfig(_settings(args))
        logger.setLevel(config.log_level * 10)
        write_results(config, run_case(config))
    except ConfigError as error:
        logger.error("%s", error)
        return BAD_CONFIG
    except IOError as error:
        logger.error("%s", error)
        return BAD_CONFIG
    return OK


if __name__ == "__main__":
    sys.exit(main())
