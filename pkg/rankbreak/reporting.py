"""
Report emission. Every artifact carries the run manifest, and the same
content with the same manifest always serializes to the same bytes.
"""

import json
import logging
import sys

import pandas as pd

from rankbreak.common.file_config_manager import FileConfigManager

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.6f'


def manifest_json(manifest: dict) -> str:
    """Canonical one-line JSON of a run manifest."""
    return json.dumps(manifest, sort_keys=True, separators=(',', ':'))


def _write_csv(handle, frame: pd.DataFrame, manifest: dict):
    handle.write(f"# manifest: {manifest_json(manifest)}\n")
    frame.to_csv(handle, index=False, lineterminator='\n', float_format=FLOAT_FORMAT)


def write_frame(frame: pd.DataFrame, path: str | None, manifest: dict) -> str | None:
    """
    Writes a table as CSV whose first line is the manifest as a '#' comment.
    Files also get a '<path>.manifest.json' sidecar; without a path the CSV
    goes to stdout.

    Returns:
        str | None: The absolute path written, None for stdout.
    """
    if path is None:
        _write_csv(sys.stdout, frame, manifest)
        return None

    path = FileConfigManager.prepare_output_path(path)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        _write_csv(handle, frame, manifest)
    with open(f"{path}.manifest.json", 'w', encoding='utf-8', newline='') as handle:
        handle.write(json.dumps(manifest, sort_keys=True, indent=2) + '\n')
    logger.info(f"Wrote {len(frame)} row(s) to '{path}'")
    return path


def write_json(payload: dict, path: str | None, manifest: dict) -> str | None:
    """Writes {'manifest': ..., **payload} as indented JSON to path or stdout."""
    text = json.dumps({'manifest': manifest, **payload}, sort_keys=True, indent=2) + '\n'
    if path is None:
        sys.stdout.write(text)
        return None

    path = FileConfigManager.prepare_output_path(path)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        handle.write(text)
    logger.info(f"Wrote report to '{path}'")
    return path
