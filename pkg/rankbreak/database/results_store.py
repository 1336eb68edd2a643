import json
import logging
import sqlite3
from datetime import datetime

from rankbreak.common.file_config_manager import FileConfigManager
from rankbreak.simulate.monte_carlo import McCell, McConfig, TestTally

# Configure logger for this module
logger = logging.getLogger(__name__)

class ResultsStore:
    """
    Manages the SQLite store of finished Monte Carlo cells, so that an
    interrupted table run can pick up where it stopped.

    Cells are keyed by the canonical JSON of their configuration, seed
    included; a stored cell is exactly what run_mc would return again.
    """
    def __init__(self, db_path: str | None = None):
        self._db_name = db_path or FileConfigManager().get_file_path('results.db')
        self._create_database_and_tables()

    @property
    def db_name(self) -> str:
        return self._db_name

    def _get_connection(self):
        """Helper to get a database connection."""
        return sqlite3.connect(self._db_name)

    @staticmethod
    def cell_key(cfg: McConfig) -> str:
        return json.dumps(cfg.as_dict(), sort_keys=True, separators=(',', ':'))

    def _create_database_and_tables(self):
        """
        Creates the SQLite database and the table holding one row per
        (cell, procedure).
        """
        conn = None
        try:
            conn = self._get_connection()
            cursor = conn.cursor()

            cursor.execute('''
                CREATE TABLE IF NOT EXISTS cell_tallies (
                    cell_key TEXT NOT NULL,
                    procedure TEXT NOT NULL CHECK(procedure IN ('wilcoxon', 'cusum')),
                    rejections INTEGER NOT NULL,
                    failures INTEGER NOT NULL,
                    replications INTEGER NOT NULL,
                    stored_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                    PRIMARY KEY (cell_key, procedure)
                )
            ''')
            conn.commit()
            logger.debug(f"Database '{self._db_name}' and table 'cell_tallies' ensured to exist.")
        except sqlite3.Error as e:
            logger.error(f"Database error during table creation: {e}", exc_info=True)
        finally:
            if conn:
                conn.close()

    def get_cell(self, cfg: McConfig) -> McCell | None:
        """
        Retrieves a finished cell.

        Returns:
            McCell | None: The stored cell when every configured procedure has
            a row, otherwise None.
        """
        key = self.cell_key(cfg)
        conn = None
        try:
            conn = self._get_connection()
            cursor = conn.cursor()
            cursor.execute(
                "SELECT procedure, rejections, failures, replications FROM cell_tallies WHERE cell_key = ?",
                (key,)
            )
            rows = {row[0]: row[1:] for row in cursor.fetchall()}
        except sqlite3.Error as e:
            logger.error(f"Database error reading cell: {e}", exc_info=True)
            return None
        finally:
            if conn:
                conn.close()

        if any(procedure.value not in rows for procedure in cfg.tests):
            return None

        tallies = {}
        for procedure in cfg.tests:
            rejections, failures, replications = rows[procedure.value]
            tallies[procedure] = TestTally(rejections=rejections, failures=failures, replications=replications)
        logger.debug(f"Reusing stored cell {key}")
        return McCell(config=cfg, tallies=tallies)

    def put_cell(self, cell: McCell) -> int:
        """
        Stores a finished cell, replacing an earlier row with the same key.

        Returns the number of rows written.
        """
        key = self.cell_key(cell.config)
        conn = None
        try:
            conn = self._get_connection()
            cursor = conn.cursor()
            current_timestamp = datetime.now().isoformat()
            written = 0
            for procedure, tally in cell.tallies.items():
                cursor.execute(
                    """
                    INSERT OR REPLACE INTO cell_tallies
                        (cell_key, procedure, rejections, failures, replications, stored_at)
                    VALUES (?, ?, ?, ?, ?, ?)
                    """,
                    (key, procedure.value, tally.rejections, tally.failures, tally.replications, current_timestamp)
                )
                written += 1
            conn.commit()
            logger.debug(f"Stored {written} tallies for cell {key} in '{self._db_name}'.")
            return written
        except sqlite3.Error as e:
            logger.error(f"Database error storing cell: {e}", exc_info=True)
            return 0
        finally:
            if conn:
                conn.close()

    def count_cells(self) -> int:
        """Number of distinct stored cells."""
        conn = None
        try:
            conn = self._get_connection()
            cursor = conn.cursor()
            cursor.execute("SELECT COUNT(DISTINCT cell_key) FROM cell_tallies")
            return cursor.fetchone()[0]
        except sqlite3.Error as e:
            logger.error(f"Database error counting cells: {e}", exc_info=True)
            return 0
        finally:
            if conn:
                conn.close()
