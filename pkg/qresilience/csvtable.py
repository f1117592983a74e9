"""
CSV result tables with an embedded provenance block.

Layout: '#'-prefixed "key: value" metadata lines, then a header row and
the data rows. Floats are written with 12 significant digits so identical
runs produce identical bytes.
"""

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import CSV_FLOAT_FORMAT, TOOL_VERSION
from .errors import DomainError

logger = logging.getLogger(__name__)


def format_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        # snap rounding noise so reordered but equal computations print alike
        return CSV_FLOAT_FORMAT % (round(float(value), 12) + 0.0)
    return str(value)


@dataclass
class CsvTable:
    header: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.metadata = {"tool_version": TOOL_VERSION, **self.metadata}
        for row in self.rows:
            self._check(row)

    def _check(self, row):
        if len(row) != len(self.header):
            raise DomainError(
                f"row has {len(row)} cells, header has {len(self.header)}", field="rows"
            )

    def append(self, row):
        self._check(row)
        self.rows.append(tuple(row))

    def column(self, name):
        index = self.header.index(name)
        return [row[index] for row in self.rows]

    def to_text(self):
        buffer = io.StringIO()
        for key, value in self.metadata.items():
            buffer.write(f"# {key}: {value}\n")
        writer = csv.DictWriter(buffer, fieldnames=self.header, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({name: format_cell(cell) for name, cell in zip(self.header, row)})
        return buffer.getvalue()

    def write(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(self.to_text())
        logger.info("wrote %d rows to %s", len(self.rows), path)
        return path


def read_csv_table(path):
    """Load a table written by CsvTable.write; cells come back as strings."""
    metadata = {}
    data_lines = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                metadata[key] = value
            else:
                data_lines.append(line)
    reader = csv.DictReader(data_lines)
    rows = [tuple(entry[name] for name in reader.fieldnames) for entry in reader]
    return CsvTable(list(reader.fieldnames), rows, metadata)


def write_plot_script(path, csv_name, title, xlabel, ylabel, series):
    """
    Emit a gnuplot script next to a CSV.

    `series` is a list of (x column, y column, legend) using 1-based
    column numbers; an optional fourth element is a gnuplot filter
    expression on the row, e.g. "$1==3".
    """
    lines = [
        f"# generated by qresilience {TOOL_VERSION}",
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
    ]
    plots = []
    for entry in series:
        x, y, legend = entry[:3]
        if len(entry) > 3:
            y_expr = f"({entry[3]} ? ${y} : 1/0)"
        else:
            y_expr = f"{y}"
        plots.append(f"'{csv_name}' using {x}:{y_expr} with linespoints title '{legend}'")
    lines.append("plot " + ", \\\n     ".join(plots))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
