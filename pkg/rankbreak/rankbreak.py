import os

import numpy as np
import pandas as pd

from rankbreak.common.logger import AppLogger
from rankbreak.database.results_store import ResultsStore
from rankbreak.reporting import write_frame
from rankbreak.simulate.monte_carlo import McCell, McConfig, RhoStudyConfig, run_mc, sample_rho_estimates
from rankbreak.tables import (
    FIGURE_RHO,
    TABLES,
    GridOptions,
    cells_to_frame,
    rho_estimates_frame,
    rho_study_config,
    table_layout,
)

# Configure the logger for the application
logger = AppLogger.get_logger(__name__)


class RankBreak:
    """
    Main class to reproduce the simulation study: runs the Monte Carlo cells
    of each requested table and writes one CSV per table.
    """

    def __init__(self, workers: int = 1, store: ResultsStore | None = None):
        """
        Initializes the RankBreak application.

        Args:
            workers (int): Worker processes for the Monte Carlo replications.
            store (ResultsStore | None): Where finished cells are kept between runs.
        """
        self._workers = max(1, workers)
        self._store = store
        logger.info(f"RankBreak initialized with {self._workers} worker(s), "
                    f"result store {'enabled' if store else 'disabled'}")

    def run_cell(self, cfg: McConfig) -> McCell:
        """
        Runs one Monte Carlo cell, reusing a stored result when there is one.
        """
        if self._store is not None:
            stored = self._store.get_cell(cfg)
            if stored is not None:
                logger.info(f"Reusing stored cell {cfg.dgp.as_dict()} outliers={cfg.outliers}")
                return stored

        cell = run_mc(cfg, workers=self._workers)

        if self._store is not None:
            self._store.put_cell(cell)
        return cell

    def run_rho_study(self, cfg: RhoStudyConfig) -> np.ndarray:
        return sample_rho_estimates(cfg, workers=self._workers)

    def run_table(self, name: str, grid: GridOptions) -> pd.DataFrame:
        """
        Executes every cell of one table.

        Returns:
            pd.DataFrame: The table rows.
        """
        logger.info("-" * 50) # Horizontal line

        if name == FIGURE_RHO:
            logger.info("Starting autocorrelation study")
            return rho_estimates_frame(self.run_rho_study(rho_study_config(grid)))

        table = TABLES[name]
        cells = table.build(grid)
        logger.info(f"Starting table {name} ({table.title}): {len(cells)} cell(s)")
        if not cells:
            logger.warning(f"Table {name} has no cells at max_n={grid.max_n}")

        results = []
        for index, cell in enumerate(cells, start=1):
            logger.info(f"Table {name}, cell {index}/{len(cells)}: {cell.labels}")
            results.append(self.run_cell(cell.config))
        return cells_to_frame(table, cells, results)

    def run(self, names: list[str], grid: GridOptions, out_dir: str, manifest: dict) -> list[str]:
        """
        Executes all requested tables and writes them to out_dir.

        Returns:
            list[str]: The CSV files written.
        """
        logger.info("Table reproduction started.")
        logger.info(f"Configured {len(names)} table(s) to run: {', '.join(names)}")

        written = []
        for name in names:
            frame = self.run_table(name, grid)
            table_manifest = {**manifest, 'table': name}
            if name == FIGURE_RHO:
                written.append(write_frame(frame, os.path.join(out_dir, f"{FIGURE_RHO}.csv"), table_manifest))
                continue

            layout = table_layout(TABLES[name], frame)
            written.append(write_frame(layout, os.path.join(out_dir, f"table{name}.csv"), table_manifest))
            # Per-cell bookkeeping the layout leaves out.
            if layout is not frame:
                written.append(write_frame(frame, os.path.join(out_dir, f"table{name}-cells.csv"), table_manifest))

        logger.info("All tables processed. Application finished.")
        return written
