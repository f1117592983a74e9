import numpy as np
import pytest

from qresilience.cli import (
    cmd_grover_scan,
    cmd_negativity_scan,
    cmd_tolerance_scan,
    cmd_white_noise,
    main,
    parse_grid,
    parse_range,
    parse_values,
)
from qresilience.csvtable import read_csv_table
from qresilience.errors import UsageError


def test_parse_grid_forms():
    assert parse_grid("0:1:5").tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("0.1,0.9").tolist() == [0.1, 0.9]
    with pytest.raises(UsageError):
        parse_grid("")
    with pytest.raises(UsageError):
        parse_grid("0:2:3")
    with pytest.raises(UsageError):
        parse_grid("a,b")


def test_parse_values_and_range():
    assert parse_values("-0.775,0.25,0.675") == (-0.775, 0.25, 0.675)
    assert parse_range("3-5") == [3, 4, 5]
    assert parse_range("3,6") == [3, 6]
    with pytest.raises(UsageError):
        parse_values(",")


def test_grover_scan_writes_tables(results_dir):
    assert main(["grover-scan", "--n", "2", "--lambda-grid", "0:1:5"]) == 0
    surface = read_csv_table(results_dir / "grover_n2.csv")
    for lam, m, p in surface.rows:
        if m == "1":
            assert float(p) == pytest.approx(float(lam) ** 2, abs=1e-11)
    assert surface.metadata["command"] == "grover-scan"
    norm = read_csv_table(results_dir / "grover_n2_norm.csv")
    assert norm.header == ["lambda", "P_norm", "lambda_pow_n"]
    assert (results_dir / "grover_n2.gp").exists()
    assert (results_dir / "grover_n2_period.csv").exists()


@pytest.mark.parametrize("table", [
    lambda: cmd_grover_scan(2, 0, np.array([0.5, 1.0]))[0],
    lambda: cmd_negativity_scan("nontraced", [1.0]),
    lambda: cmd_tolerance_scan([3], np.array([0.9, 1.0]))[0],
    lambda: cmd_white_noise((0.25, 0.25, 0.25), 0.25, [1.0]),
])
def test_exact_commands_record_seed(table):
    metadata = table().metadata
    assert metadata["tool_version"]
    assert metadata["seed"] == "none"
    assert list(metadata)[:3] == ["tool_version", "command", "seed"]


def test_grover_first_max_for_four_qubits(results_dir):
    assert main(["grover-scan", "--n", "4", "--lambda-grid", "1"]) == 0
    surface = read_csv_table(results_dir / "grover_n4.csv")
    probabilities = [float(p) for _, _, p in surface.rows]
    assert int(np.argmax(probabilities[:7])) == 3


def test_average_run_swap_keeps_ruler_column(results_dir):
    argv = ["average-run", "--variant", "ruler", "--lambda-grid", "0:1:6", "--swap"]
    assert main(argv) == 0
    plain = read_csv_table(results_dir / "average_ruler.csv")
    swapped = read_csv_table(results_dir / "average_ruler_swapped.csv")
    assert plain.column("D") == swapped.column("D")
    assert abs(float(plain.column("D")[0])) <= 1e-9
    assert abs(float(plain.column("D")[-1])) <= 1e-9


def test_sampled_runs_are_byte_identical(tmp_path):
    argv = ["average-run", "--lambda", "0.9", "--mode", "sampled", "--alpha", "500", "--seed", "4"]
    assert main(argv + ["--out", str(tmp_path / "a.csv")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert "# seed: 4" in (tmp_path / "a.csv").read_text()


def test_negativity_modes():
    traced = cmd_negativity_scan("traced-ruler", [0.0, 0.5, 1.0])
    assert max(float(v) for v in traced.column("negativity")) < 1e-10
    nontraced = cmd_negativity_scan("nontraced", [1.0])
    assert nontraced.column("negativity") == pytest.approx([0.5, 0.5, 0.5])
    with pytest.raises(UsageError):
        cmd_negativity_scan("sideways", [0.5])


def test_theta_halving_command(results_dir):
    assert main(["theta-halving", "--values", "0.0625,0.0625,0.0625"]) == 0
    table = read_csv_table(results_dir / "theta_halving.csv")
    assert table.rows[0][1] == "3"
    assert table.rows[0][3] == "1"


def test_distributed_command(results_dir):
    assert main(["distributed", "--alpha", "50", "--lambda", "0.9"]) == 0
    table = read_csv_table(results_dir / "distributed.csv")
    assert table.column("bits_transmitted") == ["150"]


def test_exit_codes(results_dir, capsys):
    assert main(["grover-scan", "--lambda-grid", ""]) == 2
    assert main(["average-run", "--values", "0.2,2.0", "--lambda", "1"]) == 2
    assert main(["distributed", "--alpha", "5", "--drop-probability", "1"]) == 1
    assert "[-]" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["average-run", "--variant", "bogus"])
    assert info.value.code == 2
