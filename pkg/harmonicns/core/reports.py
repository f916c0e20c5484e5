"""JSON and CSV output, and the manifest of a run."""
import dataclasses
import importlib.metadata
import json
import logging
import pathlib

import numpy as np

from harmonicns.core import constants

logger = logging.getLogger(__name__)

PASS, FAIL, NOT_RUN = "pass", "fail", "not-run"


def make_json_safe(obj):
    """Convert dataclasses, numpy values and paths to plain JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = obj.to_dict() if hasattr(obj, "to_dict") else dataclasses.asdict(obj)
    if isinstance(obj, dict):
        return {str(k): make_json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [make_json_safe(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return make_json_safe(obj.tolist())
    if isinstance(obj, pathlib.Path):
        return str(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def write_json(path, payload):
    """Write ``payload`` as indented JSON with a trailing newline."""
    path = pathlib.Path(path)
    text = json.dumps(make_json_safe(payload), indent=constants.JSON_INDENT)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def write_csv(path, columns, rows):
    """Write a header row and 17-significant-digit rows with '\\n' endings."""
    path = pathlib.Path(path)
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    with path.open("w", newline="", encoding="utf-8") as stream:
        np.savetxt(stream, rows, fmt=constants.CSV_FORMAT, delimiter=",",
                   header=",".join(columns), comments="", newline="\n")
    return path


def _version(package):
    try:
        return importlib.metadata.version(package)
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


class RunManifest:
    """Config echo, verdicts, optional timings and the output inventory.

    Args:
        config (RunConfig): The resolved config.
        output_dir (pathlib.Path): Where outputs go.
        record_timings (bool): Whether timings are written.

    """

    FILENAME = "manifest.json"

    def __init__(self, config, output_dir, record_timings=False):
        self.config = config
        self.output_dir = pathlib.Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.record_timings = record_timings
        self.verdicts = {}
        self.timings = {}
        self.files = []

    def write_json(self, name, payload):
        """Write an output JSON file and list it."""
        return self._add(write_json(self.output_dir/name, payload))

    def write_csv(self, name, columns, rows):
        """Write an output CSV file and list it."""
        return self._add(write_csv(self.output_dir/name, columns, rows))

    def _add(self, path):
        if path.name not in self.files:
            self.files.append(path.name)
        logger.info("Wrote %s", path)
        return path

    def record(self, command, verdict, seconds=None):
        """Store the verdict of a command."""
        self.verdicts[command] = verdict
        if seconds is not None:
            self.timings[command] = seconds
            logger.info("%s: %s in %.2fs", command, verdict, seconds)
        if verdict == FAIL:
            logger.warning("%s failed", command)

    @property
    def passed(self):
        return all(verdict != FAIL for verdict in self.verdicts.values())

    def to_dict(self):
        data = {
            "config": self.config.to_dict(),
            "versions": {name: _version(name) for name in ("harmonicns", "numpy", "scipy")},
            "verdicts": dict(self.verdicts),
            "files": sorted(set(self.files) | {self.FILENAME}),
        }
        if self.record_timings:
            data["timings"] = dict(self.timings)
        return data

    def write(self):
        """Write ``manifest.json``."""
        return write_json(self.output_dir/self.FILENAME, self.to_dict())
