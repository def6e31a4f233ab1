"""Check records, verification reports and their JSON/CSV forms.

A check never raises because an inequality fails: it produces a
:class:`CheckRecord` whose status is one of ``pass``, ``fail`` or
``inconclusive``. Finite grids cannot certify limits, so whenever a
measurement only gives a lower bound the status is ``inconclusive``.

"""
import csv
import hashlib
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

import numpy as np
from rich.console import Console
from rich.table import Table
from rich.text import Text

from ultranorm import __version__

_logger = logging.getLogger(__name__)

SCHEMA = "ultranorm/1"


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"

    @classmethod
    def combine(cls, statuses):
        """Fail if anything failed, inconclusive if anything was, pass
        otherwise.

        Examples
        --------
        >>> from ultranorm.reports import Status
        >>> Status.combine([Status.PASS, Status.INCONCLUSIVE]).value
        'inconclusive'

        """
        statuses = [cls(s) for s in statuses]
        if cls.FAIL in statuses:
            return cls.FAIL
        if cls.INCONCLUSIVE in statuses:
            return cls.INCONCLUSIVE
        return cls.PASS


def plain(obj):
    """Recursively convert numpy scalars and arrays, tuples and enums to
    plain JSON types."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


@dataclass
class CheckRecord(object):
    """Outcome of one check, with everything needed to reproduce it."""
    name: str
    anchor: str
    status: Status
    constants: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    provenance: list = field(default_factory=list)

    def __post_init__(self):
        self.status = Status(self.status)
        self.constants = plain(self.constants)
        self.tolerances = plain(self.tolerances)
        self.grid = plain(self.grid)
        self.provenance = [str(p) for p in self.provenance]

    @property
    def passed(self):
        return self.status is Status.PASS

    def to_dict(self):
        return {"name": self.name, "anchor": self.anchor,
                "status": self.status.value, "constants": self.constants,
                "tolerances": self.tolerances, "grid": self.grid,
                "provenance": list(self.provenance)}

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def config_hash(config):
    text = json.dumps(plain(config), sort_keys=True)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def exit_code(statuses):
    """0 if everything passed, 1 if something failed, 3 if something was
    inconclusive and nothing failed."""
    return {Status.PASS: 0, Status.FAIL: 1,
            Status.INCONCLUSIVE: 3}[Status.combine(statuses)]


@dataclass
class VerificationReport(object):
    records: list
    config: dict = field(default_factory=dict)
    config_hash: str = ""
    tool_version: str = __version__
    timestamp: str = ""
    schema: str = SCHEMA

    @classmethod
    def create(cls, records, config=None):
        config = plain(config or {})
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return cls(list(records), config, config_hash(config),
                   timestamp=stamp)

    @property
    def counts(self):
        counts = {s.value: 0 for s in Status}
        for record in self.records:
            counts[record.status.value] += 1
        return counts

    @property
    def status(self):
        return Status.combine(r.status for r in self.records)

    @property
    def exit_code(self):
        return exit_code(r.status for r in self.records)

    def __getitem__(self, name):
        for record in self.records:
            if record.name == name:
                return record
        raise KeyError(name)

    def to_dict(self, with_timestamp=True):
        data = {"schema": self.schema, "tool_version": self.tool_version,
                "config_hash": self.config_hash, "config": self.config,
                "records": [r.to_dict() for r in self.records],
                "counts": self.counts}
        if with_timestamp:
            data["timestamp"] = self.timestamp
        return data

    def to_json(self, with_timestamp=True):
        return json.dumps(self.to_dict(with_timestamp), sort_keys=True,
                          indent=2)

    @classmethod
    def from_dict(cls, data):
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unknown report schema {data.get('schema')!r}")
        records = [CheckRecord.from_dict(r) for r in data["records"]]
        return cls(records, data["config"], data["config_hash"],
                   data["tool_version"], data.get("timestamp", ""),
                   data["schema"])

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def write_json(self, path):
        with open(path, 'w') as report_file:
            report_file.write(self.to_json())
        _logger.info(f"report written to {path}")

    def write_csv(self, path):
        rows = [(r.name, r.status.value, r.anchor,
                 json.dumps(r.constants, sort_keys=True))
                for r in self.records]
        write_table_csv(path, ("name", "status", "anchor", "constants"),
                        rows)


def write_table_csv(path, header, rows):
    """Write ``rows`` under a header row."""
    with open(path, 'w', newline='') as table_file:
        writer = csv.writer(table_file)
        writer.writerow(header)
        for row in rows:
            writer.writerow([plain(v) for v in row])


_STYLE = {Status.PASS: "green", Status.FAIL: "red",
          Status.INCONCLUSIVE: "yellow"}


def render(report, console=None):
    """Print a summary table of ``report``."""
    console = console or Console()
    table = Table(title=f"{report.schema} report ({report.tool_version})")
    table.add_column("check")
    table.add_column("status")
    table.add_column("anchor")
    for record in report.records:
        table.add_row(Text(record.name),
                      Text(record.status.value, style=_STYLE[record.status]),
                      Text(record.anchor))
    console.print(table)
    console.print(", ".join(f"{k}: {v}" for k, v in report.counts.items()))
