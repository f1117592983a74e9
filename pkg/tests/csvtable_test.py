import numpy as np
import pytest

from qresilience.config import TOOL_VERSION
from qresilience.csvtable import CsvTable, format_cell, read_csv_table, write_plot_script
from qresilience.errors import DomainError


def test_format_cell():
    assert format_cell(True) == "1"
    assert format_cell(np.bool_(False)) == "0"
    assert format_cell(np.int64(3)) == "3"
    assert format_cell(1 / 3) == "0.333333333333"
    assert format_cell(-0.0) == "0"
    assert format_cell(0.1 + 0.2) == "0.3"
    assert format_cell("2|13") == "2|13"


def test_metadata_block_comes_first():
    table = CsvTable(["tau", "negativity"], [(0.5, 0.25)], {"command": "negativity-scan", "seed": 7})
    lines = table.to_text().splitlines()
    assert lines[0] == f"# tool_version: {TOOL_VERSION}"
    assert lines[1] == "# command: negativity-scan"
    assert lines[2] == "# seed: 7"
    assert lines[3] == "tau,negativity"
    assert lines[4] == "0.5,0.25"


def test_column_count_is_checked():
    with pytest.raises(DomainError):
        CsvTable(["a", "b"], [(1, 2, 3)])
    table = CsvTable(["a", "b"])
    with pytest.raises(DomainError):
        table.append((1,))
    table.append((1, 2))
    assert table.column("b") == [2]


def test_write_and_read_back(tmp_path):
    table = CsvTable(["lambda", "P"], [(0.0, 0.25), (1.0, 1.0)], {"n": 2})
    path = table.write(tmp_path / "nested" / "scan.csv")
    loaded = read_csv_table(path)
    assert loaded.header == ["lambda", "P"]
    assert loaded.rows == [("0", "0.25"), ("1", "1")]
    assert loaded.metadata["n"] == "2"


def test_identical_tables_give_identical_bytes(tmp_path):
    rows = [(float(x), np.sin(x)) for x in np.linspace(0, 1, 5)]
    a = CsvTable(["x", "y"], list(rows), {"seed": 1}).write(tmp_path / "a.csv")
    b = CsvTable(["x", "y"], list(rows), {"seed": 1}).write(tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()


def test_plot_script(tmp_path):
    path = write_plot_script(tmp_path / "t.gp", "t.csv", "title", "tau", "D",
                             [(2, 3, "N=3", "$1==3"), (1, 2, "plain")])
    text = path.read_text()
    assert "set datafile separator ','" in text
    assert "'t.csv' using 2:($1==3 ? $3 : 1/0)" in text
    assert "'t.csv' using 1:2 with linespoints title 'plain'" in text
