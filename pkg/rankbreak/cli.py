"""
Command-line surface: test a series from a file, run single Monte Carlo
cells, reproduce the tables of the simulation study.

Exit codes: 0 ok, 2 input parse error, 3 degenerate data, 4 bad flags.
"""

import argparse
import math
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from rankbreak.common.errors import DegenerateDataError, InvalidArgumentError, ParseError
from rankbreak.common.logger import AppLogger
from rankbreak.database.results_store import ResultsStore
from rankbreak.rankbreak import RankBreak
from rankbreak.reporting import write_frame, write_json
from rankbreak.simulate.generators import Ar1Config, FgnConfig
from rankbreak.simulate.monte_carlo import McConfig, RhoStudyConfig
from rankbreak.tables import (
    DESK_MAX_N,
    DESK_REPLICATIONS,
    FIGURE_RHO,
    FULL_REPLICATIONS,
    TABLE_CHOICES,
    GridOptions,
    rho_estimates_frame,
)
from rankbreak.testing.procedure import Procedure
from rankbreak.testing.procedures import build_procedure
from rankbreak.variance import DEFAULT_BANDWIDTH_C, RhoSource, VarianceConfig, VarianceKind

logger = AppLogger.get_logger(__name__)

EXIT_OK = 0
EXIT_PARSE_ERROR = 2
EXIT_DEGENERATE = 3
EXIT_BAD_FLAGS = 4

TEST_CHOICES = {
    'wilcoxon': (Procedure.WILCOXON,),
    'cusum': (Procedure.CUSUM,),
    'both': (Procedure.CUSUM, Procedure.WILCOXON),
}
CUSUM_VARIANCE_CHOICES = {'bartlett': VarianceKind.BARTLETT, 'carlstein': VarianceKind.CARLSTEIN_C}


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with EXIT_BAD_FLAGS."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_FLAGS, f"{self.prog}: error: {message}\n")


def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"must be an unsigned 64-bit integer, got {value}")
    return value


def _is_header(text: str) -> bool:
    # "nan" and "inf" parse as numbers and are bad rows, not headers.
    try:
        pd.to_numeric(text)
    except (ValueError, TypeError):
        return True
    return False


def read_series(path: str) -> np.ndarray:
    """
    Reads one real per line, or a single-column CSV with an optional header
    line. Blank lines are skipped.

    Raises:
        ParseError: Unreadable file, several columns, or a row that is not a
            finite number (the error names the line).
    """
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False,
                            skip_blank_lines=False, encoding='utf-8')
    except (OSError, UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ParseError(f"cannot read '{path}': {e}")

    if frame.shape[1] != 1:
        raise ParseError(f"'{path}' has {frame.shape[1]} columns, expected one")

    raw = frame.iloc[:, 0].str.strip()
    values = pd.to_numeric(raw, errors='coerce')
    line_numbers = np.arange(1, raw.size + 1)

    keep = (raw != '').to_numpy()
    if raw.size and raw.iloc[0] != '' and _is_header(raw.iloc[0]):
        keep[0] = False

    numbers = values.to_numpy(dtype=np.float64)
    bad = keep & ~np.isfinite(numbers)
    if bad.any():
        line = int(line_numbers[bad][0])
        raise ParseError(f"line {line} of '{path}' is not a finite number: {raw.iloc[line - 1]!r}", line_number=line)

    series = numbers[keep]
    logger.info(f"Read {series.size} observation(s) from '{path}'")
    return series


def _variance_configs(args, outliers: bool) -> dict[Procedure, VarianceConfig]:
    if args.rho_source is not None:
        rho_source = RhoSource(args.rho_source)
    else:
        rho_source = RhoSource.ROBUST_Q if outliers else RhoSource.SAMPLE_ACF
    shared = {'rho_source': rho_source, 'fixed_block': args.block, 'bandwidth_c': args.bandwidth_c}
    return {
        Procedure.WILCOXON: VarianceConfig(kind=VarianceKind.CARLSTEIN_W, **shared),
        Procedure.CUSUM: VarianceConfig(kind=CUSUM_VARIANCE_CHOICES[args.variance], **shared),
    }


@dataclass(frozen=True)
class RunManifest:
    """
    Everything a run depends on, defaults materialized. Echoed into every
    artifact the run writes.
    """
    command: str
    config: dict
    seed: int | None
    format: str
    out: str | None

    def as_dict(self) -> dict:
        return asdict(self)


def _manifest(command: str, config: dict, args) -> dict:
    return RunManifest(
        command=command,
        config=config,
        seed=getattr(args, 'seed', None),
        format=getattr(args, 'format', 'csv'),
        out=args.out,
    ).as_dict()


def cmd_test(args) -> int:
    """
    Runs the requested procedures on a series read from a file and emits one
    report per procedure.
    """
    procedures = TEST_CHOICES[args.test]
    variance_configs = _variance_configs(args, outliers=False)
    config = {
        'input': args.input,
        'alpha': args.alpha,
        'tests': [procedure.value for procedure in procedures],
        'variance': {procedure.value: variance_configs[procedure].as_dict() for procedure in procedures},
    }
    manifest = _manifest('test', config, args)

    try:
        series = read_series(args.input)
    except ParseError as e:
        logger.error(f"Parse error: {e}")
        return EXIT_PARSE_ERROR

    status = EXIT_OK
    reports = []
    for procedure in procedures:
        try:
            report = build_procedure(procedure, variance_configs[procedure]).run(series, args.alpha)
            reports.append({**report.as_dict(), 'error': None, 'message': None})
            logger.info(f"{procedure.value}: k_hat={report.k_hat}, statistic={report.statistic:.4f}, "
                        f"critical value={report.critical_value:.4f}, reject={report.reject}")
        except (DegenerateDataError, InvalidArgumentError) as e:
            logger.error(f"{procedure.value}: {e}")
            reports.append({'procedure': procedure.value, 'n': int(series.size),
                            'k_hat': getattr(e, 'k_hat', None),
                            'error': type(e).__name__, 'message': str(e)})
            status = EXIT_DEGENERATE

    if args.format == 'json':
        write_json({'reports': reports}, args.out, manifest)
    else:
        write_frame(pd.DataFrame(reports), args.out, manifest)
    return status


def _emit_cell(command: str, args, cfg: McConfig, labels: dict, workers: int) -> int:
    cell = RankBreak(workers=workers).run_cell(cfg)
    row = dict(labels)
    for procedure in cfg.tests:
        tally = cell.tallies[procedure]
        row[f'{procedure.value}_pct'] = 100.0 * tally.rejection_rate
        row[f'{procedure.value}_rejections'] = tally.rejections
        row[f'{procedure.value}_used'] = tally.replications_used
        row[f'{procedure.value}_failures'] = tally.failures
    row['replications'] = cfg.replications

    manifest = _manifest(command, cfg.as_dict(), args)
    if args.format == 'json':
        write_json({'cell': {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in row.items()}},
                   args.out, manifest)
    else:
        write_frame(pd.DataFrame([row]), args.out, manifest)
    return EXIT_OK


def cmd_size(args) -> int:
    """One empirical-size cell on AR(1) data with a mean shift."""
    dgp = Ar1Config(n=args.n, rho=args.rho, theta=args.theta, delta=args.delta)
    cfg = McConfig(dgp=dgp, replications=args.reps, alpha=args.alpha, seed=args.seed, outliers=args.outliers,
                   tests=TEST_CHOICES[args.test], variance_configs=_variance_configs(args, args.outliers))
    labels = {'n': args.n, 'rho': args.rho, 'theta': args.theta, 'delta': args.delta, 'outliers': args.outliers}
    return _emit_cell('size', args, cfg, labels, args.workers)


def cmd_power(args) -> int:
    """One empirical-power cell on fractional Gaussian noise."""
    cfg = McConfig(dgp=FgnConfig(n=args.n, d=args.d), replications=args.reps, alpha=args.alpha, seed=args.seed,
                   outliers=args.outliers, tests=TEST_CHOICES[args.test],
                   variance_configs=_variance_configs(args, args.outliers))
    labels = {'n': args.n, 'd': args.d, 'outliers': args.outliers}
    return _emit_cell('power', args, cfg, labels, args.workers)


def cmd_tables(args) -> int:
    """
    Reproduces the requested tables, one CSV per table in the output
    directory. Desk scale by default; --full runs every n at 10,000
    replications.
    """
    if args.full:
        grid = GridOptions(replications=FULL_REPLICATIONS, max_n=None, seed=args.seed, alpha=args.alpha)
    else:
        grid = GridOptions(replications=args.reps, max_n=args.max_n, seed=args.seed, alpha=args.alpha)

    names = list(TABLE_CHOICES) if args.table == 'all' else [args.table]
    manifest = _manifest('tables', {'grid': grid.as_dict(), 'tables': names}, args)
    store = ResultsStore() if args.resume else None

    RankBreak(workers=args.workers, store=store).run(names, grid, args.out, manifest)
    return EXIT_OK


def cmd_figure_rho(args) -> int:
    """Sample and robust lag-one autocorrelations of contaminated AR(1) samples."""
    cfg = RhoStudyConfig(n=args.n, rho=args.rho, replications=args.reps, seed=args.seed, outliers=True)
    frame = rho_estimates_frame(RankBreak(workers=args.workers).run_rho_study(cfg))
    write_frame(frame, args.out, _manifest(FIGURE_RHO, cfg.as_dict(), args))
    return EXIT_OK


def _add_variance_flags(parser):
    parser.add_argument('--test', choices=sorted(TEST_CHOICES), default='both')
    parser.add_argument('--alpha', type=_probability, default=0.05)
    parser.add_argument('--variance', choices=sorted(CUSUM_VARIANCE_CHOICES), default='carlstein',
                        help='long-run variance estimator of the CUSUM test')
    parser.add_argument('--rho-source', choices=[source.value for source in RhoSource], default=None,
                        help='autocorrelation estimator for the block length (default: robust with --outliers, acf otherwise)')
    parser.add_argument('--block', type=_positive_int, default=None, help='fixed block length')
    parser.add_argument('--bandwidth-c', type=float, default=DEFAULT_BANDWIDTH_C,
                        help='Bartlett bandwidth constant C in q = C log10(n)')


def _add_run_flags(parser, default_reps: int):
    parser.add_argument('--reps', type=_positive_int, default=default_reps)
    parser.add_argument('--seed', type=_seed, default=0)
    parser.add_argument('--workers', type=_positive_int, default=os.cpu_count() or 1)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='rankbreak',
                            description='Wilcoxon- and CUSUM-type tests separating a mean shift from long memory.')
    commands = parser.add_subparsers(dest='command', required=True)

    test = commands.add_parser('test', help='test a series read from a file')
    test.add_argument('input', help='one real per line, or a single-column CSV with optional header')
    _add_variance_flags(test)
    test.add_argument('--out', default=None, help='output file (default: stdout)')
    test.add_argument('--format', choices=('json', 'csv'), default='json')
    test.set_defaults(handler=cmd_test)

    size = commands.add_parser('size', help='empirical size on AR(1) data with a mean shift')
    size.add_argument('--n', type=_positive_int, default=1000)
    size.add_argument('--theta', type=_probability, default=0.5)
    size.add_argument('--delta', type=float, default=1.0)
    size.add_argument('--rho', type=float, default=0.4)
    size.add_argument('--outliers', action='store_true')
    _add_variance_flags(size)
    _add_run_flags(size, DESK_REPLICATIONS)
    size.add_argument('--out', default=None)
    size.add_argument('--format', choices=('json', 'csv'), default='csv')
    size.set_defaults(handler=cmd_size)

    power = commands.add_parser('power', help='empirical power on fractional Gaussian noise')
    power.add_argument('--n', type=_positive_int, default=1000)
    power.add_argument('--d', type=float, default=0.4)
    power.add_argument('--outliers', action='store_true')
    _add_variance_flags(power)
    _add_run_flags(power, DESK_REPLICATIONS)
    power.add_argument('--out', default=None)
    power.add_argument('--format', choices=('json', 'csv'), default='csv')
    power.set_defaults(handler=cmd_power)

    tables = commands.add_parser('tables', help='reproduce the tables of the simulation study')
    tables.add_argument('--table', choices=(*TABLE_CHOICES, 'all'), default='all')
    tables.add_argument('--max-n', type=_positive_int, default=DESK_MAX_N)
    tables.add_argument('--full', action='store_true',
                        help=f'every n at {FULL_REPLICATIONS} replications; overrides --reps and --max-n')
    tables.add_argument('--alpha', type=_probability, default=0.05)
    tables.add_argument('--resume', action='store_true', help='reuse finished cells from the result store')
    tables.add_argument('--out', default='tables', help='output directory')
    _add_run_flags(tables, DESK_REPLICATIONS)
    tables.set_defaults(handler=cmd_tables)

    figure = commands.add_parser(FIGURE_RHO, help='autocorrelation estimates on contaminated AR(1) samples')
    figure.add_argument('--n', type=_positive_int, default=500)
    figure.add_argument('--rho', type=float, default=0.4)
    _add_run_flags(figure, FULL_REPLICATIONS)
    figure.add_argument('--out', default=None)
    figure.set_defaults(handler=cmd_figure_rho)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InvalidArgumentError as e:
        logger.error(f"Invalid argument: {e}")
        return EXIT_BAD_FLAGS


if __name__ == '__main__':
    sys.exit(main())
