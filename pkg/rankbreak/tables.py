"""
Monte Carlo grids of the simulation study, one per published table, and the
shaping of finished cells into table rows.

Each cell gets the substream key (table number, cell index) under the run's
base seed.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
import pandas as pd

from rankbreak.common.errors import InvalidArgumentError
from rankbreak.simulate.generators import Ar1Config, FgnConfig
from rankbreak.simulate.monte_carlo import McCell, McConfig, RhoStudyConfig
from rankbreak.testing.procedure import Procedure
from rankbreak.variance import RhoSource, VarianceConfig, VarianceKind

logger = logging.getLogger(__name__)

SAMPLE_SIZES = (200, 500, 1000, 2000, 5000)
BARTLETT_SAMPLE_SIZES = (500, 1000, 2000, 5000)
THETAS = (0.25, 0.5, 0.75)
MEMORY_PARAMETERS = (0.1, 0.2, 0.3, 0.4)
AR_RHO = 0.4
FULL_REPLICATIONS = 10_000
DESK_REPLICATIONS = 2_000
DESK_MAX_N = 1000
FIGURE_RHO_STREAM = (6,)


@dataclass(frozen=True)
class GridOptions:
    """Scale of a table run."""
    replications: int = DESK_REPLICATIONS
    max_n: int | None = DESK_MAX_N
    seed: int = 0
    alpha: float = 0.05

    def __post_init__(self):
        if self.replications < 1:
            raise InvalidArgumentError(f"replications must be at least 1, got {self.replications}")

    def sizes(self, candidates=SAMPLE_SIZES) -> tuple[int, ...]:
        return tuple(n for n in candidates if self.max_n is None or n <= self.max_n)

    def as_dict(self) -> dict:
        return {'replications': self.replications, 'max_n': self.max_n, 'seed': self.seed, 'alpha': self.alpha}


@dataclass(frozen=True)
class GridCell:
    """One row key of a table and the experiment behind it."""
    labels: dict
    config: McConfig


def _cell(table: int, index: int, labels: dict, dgp, grid: GridOptions, outliers: bool = False,
          tests=(Procedure.CUSUM, Procedure.WILCOXON), variance_configs=None) -> GridCell:
    config = McConfig(
        dgp=dgp,
        replications=grid.replications,
        alpha=grid.alpha,
        seed=grid.seed,
        outliers=outliers,
        tests=tuple(tests),
        variance_configs=variance_configs or {},
        stream=(table, index),
    )
    return GridCell(labels=labels, config=config)


def bartlett_grid(grid: GridOptions) -> list[GridCell]:
    """CUSUM with the Bartlett estimator: size at theta=0.5, delta=1 and power at d=0.4."""
    bartlett = {Procedure.CUSUM: VarianceConfig(kind=VarianceKind.BARTLETT)}
    cells = []
    for n in grid.sizes(BARTLETT_SAMPLE_SIZES):
        cells.append(_cell(1, len(cells), {'n': n, 'measure': 'size'},
                           Ar1Config(n=n, rho=AR_RHO, theta=0.5, delta=1.0), grid,
                           tests=(Procedure.CUSUM,), variance_configs=bartlett))
        cells.append(_cell(1, len(cells), {'n': n, 'measure': 'power'},
                           FgnConfig(n=n, d=0.4), grid,
                           tests=(Procedure.CUSUM,), variance_configs=bartlett))
    return cells


def size_grid(grid: GridOptions) -> list[GridCell]:
    """AR(1) with a mean shift, no outliers: every theta at delta 1 and 2, theta=0.5 at delta 0 and 0.5."""
    designs = [(theta, delta) for delta in (1.0, 2.0) for theta in THETAS]
    designs += [(0.5, 0.0), (0.5, 0.5)]
    cells = []
    for n in grid.sizes():
        for theta, delta in designs:
            cells.append(_cell(2, len(cells), {'n': n, 'theta': theta, 'delta': delta},
                               Ar1Config(n=n, rho=AR_RHO, theta=theta, delta=delta), grid))
    return cells


def size_outlier_grid(grid: GridOptions) -> list[GridCell]:
    """AR(1) with a mean shift at theta=0.5, delta 1 and 2, with outliers."""
    cells = []
    for n in grid.sizes():
        for delta in (1.0, 2.0):
            cells.append(_cell(3, len(cells), {'n': n, 'theta': 0.5, 'delta': delta},
                               Ar1Config(n=n, rho=AR_RHO, theta=0.5, delta=delta), grid, outliers=True))
    return cells


def _power_grid(table: int, grid: GridOptions, outliers: bool) -> list[GridCell]:
    cells = []
    for n in grid.sizes():
        for d in MEMORY_PARAMETERS:
            cells.append(_cell(table, len(cells), {'n': n, 'd': d}, FgnConfig(n=n, d=d), grid, outliers=outliers))
    return cells


def power_grid(grid: GridOptions) -> list[GridCell]:
    """Fractional Gaussian noise, no outliers."""
    return _power_grid(4, grid, outliers=False)


def power_outlier_grid(grid: GridOptions) -> list[GridCell]:
    """Fractional Gaussian noise with outliers."""
    return _power_grid(5, grid, outliers=True)


@dataclass(frozen=True)
class TableSpec:
    name: str
    title: str
    build: Callable[[GridOptions], list[GridCell]]


TABLES = {
    '1': TableSpec('1', 'Empirical size and power of the CUSUM test with the Bartlett estimator', bartlett_grid),
    '2': TableSpec('2', 'Empirical size of the CUSUM and Wilcoxon tests without outliers', size_grid),
    '3': TableSpec('3', 'Empirical size of the CUSUM and Wilcoxon tests with outliers', size_outlier_grid),
    '4': TableSpec('4', 'Empirical power of the CUSUM and Wilcoxon tests without outliers', power_grid),
    '5': TableSpec('5', 'Empirical power of the CUSUM and Wilcoxon tests with outliers', power_outlier_grid),
}
FIGURE_RHO = 'figure-rho'
TABLE_CHOICES = (*TABLES, FIGURE_RHO)


def _percent(rate: float) -> float:
    return 100.0 * rate


def cells_to_frame(table: TableSpec, cells: list[GridCell], results: list[McCell]) -> pd.DataFrame:
    """
    One row per cell: the row labels, the rejection rate in percent of each
    test, and the bookkeeping (replications used, failures, seed, stream).
    """
    if table.name == '1':
        return _bartlett_frame(cells, results)

    rows = []
    for cell, result in zip(cells, results):
        row = dict(cell.labels)
        for procedure in cell.config.tests:
            row[f'{procedure.value}_pct'] = _percent(result.rejection_rate(procedure))
        for procedure in cell.config.tests:
            row[f'{procedure.value}_used'] = result.replications_used(procedure)
            row[f'{procedure.value}_failures'] = result.tallies[procedure].failures
        row['replications'] = cell.config.replications
        row['seed'] = cell.config.seed
        row['stream'] = '-'.join(str(key) for key in cell.config.stream)
        rows.append(row)
    return pd.DataFrame(rows)


def _bartlett_frame(cells: list[GridCell], results: list[McCell]) -> pd.DataFrame:
    by_n: dict[int, dict] = {}
    for cell, result in zip(cells, results):
        n = cell.labels['n']
        measure = cell.labels['measure']
        row = by_n.setdefault(n, {'n': n})
        row[f'{measure}_pct'] = _percent(result.rejection_rate(Procedure.CUSUM))
        row[f'{measure}_used'] = result.replications_used(Procedure.CUSUM)
        row['replications'] = cell.config.replications
        row['seed'] = cell.config.seed
    return pd.DataFrame([by_n[n] for n in sorted(by_n)],
                        columns=['n', 'size_pct', 'power_pct', 'size_used', 'power_used', 'replications', 'seed'])


# Row labels that identify a design within one n, per table.
DESIGN_LABELS = {'2': ('theta', 'delta'), '3': ('theta', 'delta'), '4': ('d',), '5': ('d',)}


def table_layout(table: TableSpec, frame: pd.DataFrame) -> pd.DataFrame:
    """
    Published layout of a table: one row per n and one column per design and
    test, holding the rejection rate in percent. Column names read like
    ``theta=0.5 delta=1 cusum``. Table 1 already has one row per n and is
    returned as is.
    """
    keys = DESIGN_LABELS.get(table.name)
    if keys is None or frame.empty:
        return frame

    tests = [column.removesuffix('_pct') for column in frame.columns if column.endswith('_pct')]
    long = frame.melt(id_vars=['n', *keys], value_vars=[f'{test}_pct' for test in tests],
                      var_name='test', value_name='pct')
    long['test'] = long['test'].str.removesuffix('_pct')
    wide = long.pivot(index='n', columns=[*keys, 'test'], values='pct')

    # Designs in grid order, tests side by side within a design.
    designs = dict.fromkeys(frame[list(keys)].itertuples(index=False, name=None))
    wide = wide[[(*design, test) for design in designs for test in tests]]
    wide.columns = [' '.join([*(f'{key}={value:g}' for key, value in zip(keys, column[:-1])), column[-1]])
                    for column in wide.columns]
    return wide.reset_index()


def rho_study_config(grid: GridOptions, n: int = 500) -> RhoStudyConfig:
    """Contaminated AR(1) samples for the autocorrelation histograms."""
    return RhoStudyConfig(n=n, rho=AR_RHO, replications=grid.replications, seed=grid.seed,
                          outliers=True, stream=FIGURE_RHO_STREAM)


def rho_estimates_frame(estimates: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame({
        'replication': np.arange(1, estimates.shape[0] + 1),
        RhoSource.SAMPLE_ACF.value: estimates[:, 0],
        RhoSource.ROBUST_Q.value: estimates[:, 1],
    })
