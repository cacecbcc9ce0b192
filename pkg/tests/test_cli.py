"""End-to-end tests of the command-line entry point."""
import csv
import json
import math

import numpy as np
import pytest

import main
from models.phase_space import DensityMatrix
from services import phase_space, storage
from services.error_handler import EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_PARSE, EXIT_VERIFICATION
from services.verification import CriterionResult


@pytest.fixture
def saved_state(tmp_path):
    def save(rho, name="state.json"):
        return storage.save_density_matrix(rho, str(tmp_path / name))
    return save


@pytest.mark.integration
class TestManaCommand:
    """Test suite for `mana STATE_FILE`."""

    def test_maximally_mixed(self, saved_state, capsys):
        code = main.main(['mana', saved_state(DensityMatrix.maximally_mixed(3))])
        assert code == EXIT_OK
        assert capsys.readouterr().out == "0.000000000000\n"

    def test_stabilizer_state(self, saved_state, capsys):
        rho = phase_space.stabilizer_states(3)[7]
        assert main.main(['mana', saved_state(rho)]) == EXIT_OK
        assert capsys.readouterr().out == "0.000000000000\n"

    def test_strange_state(self, saved_state, capsys):
        assert main.main(['mana', saved_state(phase_space.strange_state())]) == EXIT_OK
        assert capsys.readouterr().out == f"{math.log(5.0 / 3.0):.12f}\n"

    def test_invalid_json_exits_with_parse_code(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"dim": 3, "entries": ')
        assert main.main(['mana', str(path)]) == EXIT_PARSE
        assert "StateFileError" in capsys.readouterr().err

    def test_non_utf8_file_exits_with_parse_code(self, tmp_path, capsys):
        path = tmp_path / "binary.json"
        path.write_bytes(b"\xff\xfe")
        assert main.main(['mana', str(path)]) == EXIT_PARSE
        assert "UTF-8" in capsys.readouterr().err

    def test_even_dimension_names_invariant(self, saved_state, capsys):
        assert main.main(['mana', saved_state(DensityMatrix.maximally_mixed(2))]) == EXIT_DOMAIN
        assert "dimension" in capsys.readouterr().err

    def test_non_positive_state(self, saved_state, capsys):
        rho = DensityMatrix.from_matrix(np.diag([1.5, -0.25, -0.25]))
        assert main.main(['mana', saved_state(rho)]) == EXIT_DOMAIN
        assert "positivity" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main.main(['mana', str(tmp_path / "absent.json")]) == EXIT_IO


@pytest.mark.integration
class TestHarvestCommands:
    """Test suite for harvest, sweep and optimize."""

    def test_harvest_json(self, capsys):
        assert main.main(['harvest', '--lambda', '0.1', '--omega', '1.0']) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["method"] == "closed"
        assert data["mana_closed"] == pytest.approx(1.0549e-4, rel=1e-4)
        assert data["params"]["omega_sigma"] == 1.0
        assert data["diagnostics"]["quad_error_estimate"] is None

    def test_harvest_omega_sigma_flag(self, capsys):
        assert main.main(['harvest', '--sigma-t', '2', '--omega-sigma', '1', '--format', 'csv']) == EXIT_OK
        rows = list(csv.reader(capsys.readouterr().out.splitlines()))
        assert len(rows) == 2
        assert float(rows[1][0]) == 1.0

    def test_sweep_default_grid(self, capsys):
        assert main.main(['sweep', '--lambda', '0.1', '--min', '0', '--max', '5']) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 102
        assert lines[0].split(",")[0] == "omega_sigma"

    def test_sweep_output_is_byte_identical(self, tmp_path):
        paths = [str(tmp_path / f"run{i}.csv") for i in (1, 2)]
        for path in paths:
            assert main.main(['sweep', '--steps', '21', '--output', path]) == EXIT_OK
        with open(paths[0], 'rb') as a, open(paths[1], 'rb') as b:
            assert a.read() == b.read()

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file.txt"
        blocker.write_text("")
        code = main.main(['sweep', '--steps', '5', '--output', str(blocker / "out.csv")])
        assert code == EXIT_IO

    def test_invalid_flag_value_is_rejected(self, capsys):
        assert main.main(['harvest', '--lambda', '0']) == EXIT_PARSE
        assert "coupling" in capsys.readouterr().err

    def test_coupling_beyond_ground_depletion_is_rejected(self, capsys):
        assert main.main(['harvest', '--lambda', '6', '--omega-sigma', '1']) == EXIT_PARSE
        assert "ground population" in capsys.readouterr().err

    def test_large_coupling_still_produces_a_result(self, capsys):
        assert main.main(['harvest', '--lambda', '2', '--omega-sigma', '0']) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert any("not positive" in w for w in data["diagnostics"]["warnings"])

    def test_large_coupling_sweep_completes(self, capsys):
        args = ['sweep', '--lambda', '3', '--min', '0', '--max', '2', '--steps', '5']
        assert main.main(args) == EXIT_OK
        assert len(capsys.readouterr().out.splitlines()) == 6

    def test_malformed_eps_levels(self):
        with pytest.raises(SystemExit) as excinfo:
            main.main(['harvest', '--eps-levels', 'four'])
        assert excinfo.value.code == 2

    def test_optimize(self, tmp_path):
        path = str(tmp_path / "best.json")
        assert main.main(['optimize', '--lambda', '0.2', '--output', path]) == EXIT_OK
        with open(path) as f:
            data = json.load(f)
        assert data["x_star"] == pytest.approx(0.752, abs=0.01)
        assert data["coupling"] == 0.2


@pytest.mark.integration
class TestVerifyCommand:
    """Test suite for `verify` exit codes."""

    def test_all_passing(self, monkeypatch, capsys):
        monkeypatch.setattr(main.AcceptanceSuite, "run",
                            lambda self: [CriterionResult("stabilizer_zeros", True, "ok")])
        assert main.main(['verify']) == EXIT_OK
        assert "all 1 criteria passed" in capsys.readouterr().out

    def test_failure_exits_with_one(self, monkeypatch, capsys):
        monkeypatch.setattr(main.AcceptanceSuite, "run", lambda self: [
            CriterionResult("stabilizer_zeros", True, "ok"),
            CriterionResult("q_oracle", False, "x=1: mismatch"),
        ])
        assert main.main(['verify']) == EXIT_VERIFICATION
        captured = capsys.readouterr()
        assert "FAIL q_oracle" in captured.out
        assert "q_oracle" in captured.err
