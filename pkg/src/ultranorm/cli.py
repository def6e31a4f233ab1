"""Command line front end.

Subcommands tabulate associated functions, check weight sequences and
weight systems, regularize sequences of Komatsu's family, measure
seminorms, run the STFT checks and the verification suites, and
re-render saved reports.

Exit codes: 0 when everything passed, 1 when something failed, 2 for
usage and configuration errors, 3 when something was inconclusive and
nothing failed.

"""
import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np
from rich.console import Console
from rich.logging import RichHandler

from ultranorm import __version__
from ultranorm.config import ConfigError, ExperimentConfig, load_config
from ultranorm.functions import seminorm_h
from ultranorm.komatsu import (regularization_certificate, regularize,
                               shifted_associated_function)
from ultranorm.pictures import plot_profile, plot_stft_magnitude
from ultranorm.reports import (CheckRecord, Status, VerificationReport,
                               exit_code, render, write_table_csv)
from ultranorm.sequences import (LocalizationError, M2PrimeWitness,
                                 SequenceExtensionError, associated_function,
                                 check_m1, check_m2prime_decay, fit_m2prime,
                                 precedes_log_growth)
from ultranorm.stft import isometry_check, reconstruction_check, stft_grid
from ultranorm.suites import run_suites
from ultranorm.utilities import ordered_map
from ultranorm.weights import (admissibility_chain, admissibility_check,
                               build_vbar, check_decreasing,
                               condition_s_check, mollify_weight,
                               standard_bump, vbar_inequality_check)

__author__ = "ultranorm developers"
__license__ = "mit"

_logger = logging.getLogger(__name__)

USAGE_ERROR = 2
SEQUENCE_LENGTH = 200
LOG_GROWTH_MIN = 10


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--config',
        help="experiment configuration (JSON)",
        metavar="PATH")
    common.add_argument(
        '--out',
        help="directory for reports, tables and plots",
        metavar="DIR")
    common.add_argument(
        '--format',
        choices=("json", "csv"),
        default="json",
        help="format of the written report")
    common.add_argument(
        '--plot',
        action='store_true',
        help="also write SVG plots")
    common.add_argument(
        '--tol',
        action='append',
        default=[],
        help="override a tolerance",
        metavar="NAME=VALUE")
    common.add_argument(
        '--threads',
        type=int,
        default=1,
        metavar="N")
    common.add_argument(
        '--seed',
        type=int,
        metavar="N")
    common.add_argument(
        '-v',
        '--verbose',
        dest="loglevel",
        help="set loglevel to INFO",
        action='store_const',
        const=logging.INFO)
    common.add_argument(
        '-vv',
        '--very-verbose',
        dest="loglevel",
        help="set loglevel to DEBUG",
        action='store_const',
        const=logging.DEBUG)
    return common


def _parse_args(args):
    """Parse command line parameters

    Args:
      args ([str]): command line parameters as list of strings

    Returns:
      :obj:`argparse.Namespace`: command line parameters namespace
    """
    common = _common_parser()
    parser = argparse.ArgumentParser(
        description="Weighted ultradifferentiable seminorms and the "
        "short-time Fourier transform")
    parser.add_argument(
        '--version',
        action='version',
        version=f'ultranorm {__version__}')
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True
    commands.add_parser("assoc", parents=[common],
                        help="tabulate M and M_r")
    commands.add_parser("check-seq", parents=[common],
                        help="(M.1), (M.2)' and growth of the sequences")
    commands.add_parser("regularize", parents=[common],
                        help="regularize the r-sequences")
    commands.add_parser("weights", parents=[common],
                        help="conditions of the weight system")
    commands.add_parser("seminorm", parents=[common],
                        help="seminorms of the test functions")
    commands.add_parser("stft", parents=[common],
                        help="isometry and reconstruction")
    commands.add_parser("verify", parents=[common],
                        help="run the verification suites")
    report = commands.add_parser("report", parents=[common],
                                 help="re-render a saved report")
    report.add_argument(dest="report", metavar="REPORT",
                        help="JSON report written by verify")
    return parser.parse_args(args)


def _setup_logging(loglevel):
    """Setup basic logging

    Args:
      loglevel (int): minimum loglevel for emitting messages
    """
    logging.basicConfig(level=loglevel or logging.WARNING,
                        format="%(message)s", datefmt="[%X]",
                        handlers=[RichHandler()])


def _tolerances(pairs):
    overrides = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects NAME=VALUE, got {pair!r}")
        try:
            overrides[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--tol {name}: not a number") from None
    return overrides


def _load(args):
    config = load_config(args.config) if args.config \
        else ExperimentConfig.default()
    return config.with_overrides(_tolerances(args.tol), args.seed)


def _path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _emit(args, report, name, console):
    render(report, console)
    if args.out:
        if args.format == "json":
            report.write_json(_path(args, f"{name}.json"))
        else:
            report.write_csv(_path(args, f"{name}.csv"))
    return report.exit_code


def _table(args, name, header, rows, console):
    if args.out:
        write_table_csv(_path(args, f"{name}.csv"), header, rows)
    else:
        lines = [",".join(header)] + [
            ",".join(f"{v:.17g}" if isinstance(v, float) else str(v)
                     for v in row) for row in rows]
        for line in lines:
            console.print(line, markup=False, highlight=False,
                          soft_wrap=True)


def assoc_grid():
    """Default ``t`` nodes: 0, 1, 2 and 200 log-spaced points in
    :math:`[10^{-2}, 10^3]`."""
    return np.unique(np.concatenate([[0.0, 1.0, 2.0],
                                     np.logspace(-2, 3, 200)]))


def _assoc(args, config, console, pool):
    t = assoc_grid()
    columns = {}
    for name in config.sequences:
        M = config.sequence(name)
        columns[f"{name}(t)"] = associated_function(M, t)
        for r in config.r_sequence_list():
            columns[f"{name}_[{r.name}](t)"] = \
                shifted_associated_function(M, r, t)
    header = ("t",) + tuple(columns)
    rows = [(float(t[i]),) + tuple(float(c[i]) for c in columns.values())
            for i in range(len(t))]
    _table(args, "assoc", header, rows, console)
    if args.plot and args.out:
        plot_profile(t[1:], {k: v[1:] for k, v in columns.items()},
                     _path(args, "assoc.svg"), log_x=True, ylabel="M(t)")
    return 0


def _reach(M, P=SEQUENCE_LENGTH):
    """The largest index up to ``P`` that ``M`` can supply."""
    return P if M.generator is not None else min(P, len(M) - 1)


def _check_seq(args, config, console, pool):
    records = []
    threshold = config.tolerance("log_growth_threshold")
    for name in config.sequences:
        M = config.sequence(name)
        P = _reach(M)
        ok, index = check_m1(M, P)
        records.append(CheckRecord(
            f"m1[{name}]", "(M.1) log-convexity",
            Status.PASS if ok else Status.FAIL, {"first_violation": index},
            grid={"P": P}))
        witness = fit_m2prime(M, P - 1) if P >= 2 else \
            M2PrimeWitness(1.0, 1.0, 0)
        records.append(check_m2prime_decay(M, witness, config.dimension,
                                           config.t_grid(),
                                           config.tolerance("m2prime")))
        if P < LOG_GROWTH_MIN:
            records.append(CheckRecord(
                f"log_growth[{name}]", "(log p)^p precedes M_p",
                Status.INCONCLUSIVE, {"P": P}, {"threshold": threshold},
                provenance=[f"only {P + 1} values stored"]))
            continue
        verdict, trend = precedes_log_growth(M, P, threshold)
        records.append(CheckRecord(
            f"log_growth[{name}]", "(log p)^p precedes M_p",
            Status.PASS if verdict else Status.INCONCLUSIVE,
            {"trend_last": float(trend[-1])}, {"threshold": threshold},
            provenance=[] if verdict else ["trend not yet increasing"]))
    report = VerificationReport.create(records, config.to_dict())
    return _emit(args, report, "check-seq", console)


def _regularize(args, config, console, pool):
    M = config.sequence("M")
    J = _reach(M)
    if J < 2:
        raise ConfigError("regularize needs at least three values of M")
    records, rows = [], []
    for r in config.r_sequence_list():
        r_prime = regularize(r, J)
        records.append(regularization_certificate(M, r, r_prime, J))
        rows.extend((r.name, j, float(a), float(b)) for j, (a, b) in
                    enumerate(zip(r.values(J), r_prime.values(J))))
    _table(args, "regularize", ("r", "j", "r_j", "r'_j"), rows, console)
    report = VerificationReport.create(records, config.to_dict())
    return _emit(args, report, "regularize-report", console)


def _weights(args, config, console, pool):
    V = config.weight_system("V")
    A = config.sequence("A")
    spatial = config.spatial_grid()
    product = config.product_grid()
    adm = config.admissibility
    n = int(adm["n"])
    records = []
    ok, witness = check_decreasing(V, 4, spatial,
                                   config.tolerance("decreasing_slack"))
    records.append(CheckRecord("decreasing", "v_{n+1} <= v_n",
                               Status.PASS if ok else Status.FAIL,
                               {"witness": witness}, grid=spatial.to_dict()))
    if V.kind != "constant":
        ok, info = condition_s_check(V, 1, 2, spatial,
                                     config.tolerance("s_threshold"))
        records.append(CheckRecord(
            "condition_s", "v_m/v_n vanishes at infinity",
            Status.PASS if ok else Status.INCONCLUSIVE, info,
            grid=spatial.to_dict(),
            provenance=[] if ok else ["ratio not small at the grid edge"]))
    records.append(admissibility_check(V, A, adm["tau"], [(n, 2 * n)],
                                       adm["C"], product, product))
    v = config.nachbin_weight_list()[0]
    chain = admissibility_chain(V, A, adm["tau"], v, n,
                                int(adm["chain_length"]), product, product)
    vbar = build_vbar(V, chain)
    records.append(vbar_inequality_check(v, vbar, A, adm["tau"], product,
                                         product, config.tolerance("vbar")))
    if V.kind == "constant" and config.dimension == 1:
        smooth = mollify_weight(spatial.axis, V[1](spatial.axis),
                                standard_bump(0.5))
        low, high = smooth.params["support"]
        axis = spatial.axis[(spatial.axis >= low) & (spatial.axis <= high)]
        if args.plot and args.out:
            plot_profile(axis, {"weight": np.log(V[1](axis)),
                                "mollified": smooth.log(axis)},
                         _path(args, "mollified.svg"), xlabel="x",
                         ylabel="log weight")
    report = VerificationReport.create(records, config.to_dict())
    return _emit(args, report, "weights", console)


def _seminorm(args, config, console, pool):
    M = config.sequence("M")
    V = config.weight_system("V")
    n = int(config.admissibility["n"])
    spatial = config.spatial_grid()
    records, rows = [], []
    for i, phi in enumerate(config.function_family()):
        result = seminorm_h(phi, M, 1.0 / n, V[n], spatial,
                            config.decay["alpha_max"])
        rows.append((i, result.value, " ".join(map(str, result.alpha)),
                     result.lower_bound))
        records.append(CheckRecord(
            f"seminorm[{i}]", "weighted Roumieu seminorm",
            Status.INCONCLUSIVE if result.lower_bound else Status.PASS,
            result.to_dict(), grid=spatial.to_dict(),
            provenance=["sup on the boundary of its range"]
            if result.lower_bound else []))
    _table(args, "seminorm", ("function", "value", "alpha", "lower_bound"),
           rows, console)
    report = VerificationReport.create(records, config.to_dict())
    return _emit(args, report, "seminorm-report", console)


def _stft(args, config, console, pool):
    psi, gamma = config.window("psi"), config.window("gamma")
    grid = config.phase_grid()
    t_points = config.reconstruction_grid().nodes()
    family = config.function_family()
    tol = config.tolerances

    def checks(phi):
        return [isometry_check(phi, psi, grid, tol["isometry"],
                               tol["edge_mass"]),
                reconstruction_check(phi, psi, gamma, grid, t_points,
                                     tol["reconstruction"])]
    records = []
    for i, pair in enumerate(ordered_map(checks, family, pool)):
        records.extend(replace(r, name=f"{r.name}[{i}]") for r in pair)
    if args.out:
        F = stft_grid(family[0], psi, grid)
        header = tuple(f"x{k}" for k in range(grid.dim)) + \
            tuple(f"xi{k}" for k in range(grid.dim)) + ("re", "im")
        write_table_csv(_path(args, "stft.csv"), header, F.rows())
        if args.plot:
            plot_stft_magnitude(F, _path(args, "stft.svg"))
    report = VerificationReport.create(records, config.to_dict())
    return _emit(args, report, "stft-report", console)


def _verify(args, config, console, pool):
    report = run_suites(config, pool)
    return _emit(args, report, "report", console)


def _report(args, console):
    with open(args.report) as report_file:
        report = VerificationReport.from_json(report_file.read())
    return _emit(args, report, "report", console)


COMMANDS = {
    "assoc": _assoc,
    "check-seq": _check_seq,
    "regularize": _regularize,
    "weights": _weights,
    "seminorm": _seminorm,
    "stft": _stft,
    "verify": _verify,
}


def run_cli(argv, console=None):
    """Run a command and return its exit code.

    Args:
      argv ([str]): command line parameters as list of strings
      console (rich.console.Console): where tables are printed

    Returns:
      int: 0 all passed, 1 something failed, 2 usage or configuration
      error, 3 something inconclusive and nothing failed
    """
    try:
        args = _parse_args(argv)
    except SystemExit as exit:
        return exit.code if isinstance(exit.code, int) else USAGE_ERROR
    _setup_logging(args.loglevel)
    console = console or Console()
    try:
        if args.command == "report":
            return _report(args, console)
        config = _load(args)
    except (ConfigError, OSError, ValueError) as err:
        _logger.error(f"{args.command}: {err}")
        return USAGE_ERROR
    pool = ThreadPoolExecutor(max_workers=args.threads) \
        if args.threads > 1 else None
    try:
        return COMMANDS[args.command](args, config, console, pool)
    except (ConfigError, SequenceExtensionError) as err:
        _logger.error(f"{args.command}: {err}")
        return USAGE_ERROR
    except LocalizationError as err:
        _logger.error(f"{args.command}: {err}")
        return exit_code([Status.INCONCLUSIVE])
    finally:
        if pool is not None:
            pool.shutdown()


def _main(args):
    """Main entry point allowing external calls

    Args:
      args ([str]): command line parameter list
    """
    return run_cli(args)


def _run():
    """Entry point for console_scripts
    """
    sys.exit(_main(sys.argv[1:]))


if __name__ == "__main__":
    _run()
