"""CLI contract tests: outputs, exit codes, strict parsing, byte determinism."""

import json
import math
import subprocess
import sys

import pytest

from conftest import make_string_spec, make_unit_problem
from eigenforge import serialize
from eigenforge.polynomials import Polynomial, poly


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "eigenforge", *args],
        capture_output=True, text=True, cwd=cwd,
    )


@pytest.fixture(scope="module")
def problem_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "dirichlet.json"
    obj = serialize.problem_to_obj(make_unit_problem())
    path.write_text(serialize.dumps(obj))
    return str(path)


@pytest.fixture(scope="module")
def model_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "string.json"
    obj = serialize.model_to_obj(make_string_spec(num_modes=2))
    path.write_text(serialize.dumps(obj))
    return str(path)


@pytest.fixture(scope="module")
def solution_file(tmp_path_factory, model_file):
    path = tmp_path_factory.mktemp("cli") / "solution.json"
    result = run_cli("sigma", "--model", model_file, "--out", str(path))
    assert result.returncode == 0, result.stderr
    return str(path)


class TestSerialize:
    def test_float_formatting_round_trips(self):
        for x in [math.pi, 1.0 / 3.0, 1e-300, 12345.678901234567, -0.5]:
            assert float(serialize.format_float(x)) == x

    def test_dumps_is_valid_json(self):
        obj = {"a": [1.5, 2, True], "b": {"c": None, "d": "x"}, "e": []}
        assert json.loads(serialize.dumps(obj)) == obj

    def test_poly_round_trip(self):
        p = poly([0.1, -2.5, 3.75], (-1.0, 2.0))
        obj = serialize.poly_to_obj(p)
        assert serialize.poly_from_obj(obj) == p

    def test_unknown_keys_rejected(self):
        with pytest.raises(Exception):
            serialize.poly_from_obj({"coeffs": [1.0], "interval": [0, 1], "extra": 1})

    def test_nonfinite_rejected(self):
        with pytest.raises(Exception):
            serialize.format_float(float("inf"))

    def test_ledger_object_shape(self):
        from eigenforge.action import total_energy

        ledger = total_energy(math.pi / 2, [1.0, 2.0], [2, 1])
        obj = serialize.ledger_to_obj(ledger)
        assert list(obj) == ["I", "h", "omegas", "occupations", "E_t"]
        assert obj["E_t"] == pytest.approx(4.0)
        assert json.loads(serialize.dumps(obj))["occupations"] == [2, 1]


class TestEigenCommand:
    def test_benchmark_output(self, problem_file):
        result = run_cli("eigen", "--problem", problem_file, "--modes", "2", "--tol", "1e-10")
        assert result.returncode == 0, result.stderr
        data = json.loads(result.stdout)
        assert data["modes"][0]["lambda"] == pytest.approx(math.pi**2, rel=1e-9)
        assert data["trace"][0][0] == 2
        assert data["trace"][0][1] == pytest.approx(10.0, abs=1e-12)

    def test_unknown_key_rejected(self, tmp_path):
        obj = serialize.problem_to_obj(make_unit_problem())
        obj["surprise"] = 1
        path = tmp_path / "bad.json"
        path.write_text(serialize.dumps(obj))
        result = run_cli("eigen", "--problem", str(path))
        assert result.returncode == 2
        assert "unknown keys" in result.stderr

    def test_nonconvergence_exit_code(self, problem_file):
        result = run_cli("eigen", "--problem", problem_file, "--tol", "1e-30",
                         "--max-degree", "10")
        assert result.returncode == 3

    def test_missing_file(self):
        result = run_cli("eigen", "--problem", "/nonexistent.json")
        assert result.returncode == 2


class TestSigmaCommand:
    def test_solution_contents(self, solution_file):
        data = json.loads(open(solution_file).read())
        modes = {m["label"]: m for m in data["modes"]}
        assert modes["m1"]["omega"] == pytest.approx(1.0, abs=1e-8)
        assert modes["m2"]["omega"] == pytest.approx(2.0, abs=1e-8)
        for m in modes.values():
            assert m["report"]["converged"] is True
            assert m["null_residual"] <= 1e-8
            assert m["indicial_residual"] <= 1e-10
        spectrum = data["action_spectrum"]
        assert spectrum["I"] == pytest.approx(math.pi / 2, abs=1e-7)
        assert spectrum["closure"] is True


class TestActionCommand:
    def test_refit_from_solution(self, solution_file):
        result = run_cli("action", "--solution", solution_file)
        assert result.returncode == 0, result.stderr
        data = json.loads(result.stdout)
        assert data["multipliers"] == [1, 1]
        assert data["I"] == pytest.approx(math.pi / 2, abs=1e-7)
        assert data["h"] == pytest.approx(2 * math.pi, abs=4e-7)

    def test_no_lattice_exit_code(self, tmp_path):
        # amplitudes 1 and 2^(1/4) give actions pi/2 and sqrt(2) pi/2
        obj = {"modes": [
            {"label": "a", "omega": 1.0, "amplitude": 1.0},
            {"label": "b", "omega": 2.0, "amplitude": 2.0 ** 0.25},
        ]}
        path = tmp_path / "incommensurable.json"
        path.write_text(serialize.dumps(obj))
        result = run_cli("action", "--solution", str(path))
        assert result.returncode == 4

    def test_unnormalized_solution_rejected(self, tmp_path):
        obj = {"modes": [{
            "label": "a", "omega": 1.0, "amplitude": 1.0,
            "space_factors": [{"lambda": 1.0, "coeffs": [1.0], "interval": [0.0, 1.0],
                               "degree": 2, "norm": 0.5}],
        }]}
        path = tmp_path / "unnormalized.json"
        path.write_text(serialize.dumps(obj))
        result = run_cli("action", "--solution", str(path))
        assert result.returncode == 2


class TestCodecCommands:
    def test_encode(self):
        result = run_cli("encode", "--occupation", "2,1")
        assert result.returncode == 0
        assert result.stdout == "12\n"

    def test_encode_vacuum(self):
        result = run_cli("encode", "--occupation", "")
        assert result.stdout == "1\n"

    def test_decode(self):
        result = run_cli("decode", "--integer", "360")
        assert result.stdout == "3,2,1\n"

    def test_decode_zero_invalid(self):
        result = run_cli("decode", "--integer", "0")
        assert result.returncode == 2

    def test_encode_non_canonical_invalid(self):
        result = run_cli("encode", "--occupation", "1,0")
        assert result.returncode == 2


class TestEnumerateCommand:
    def test_two_mode_example_csv(self):
        result = run_cli("enumerate", "--omegas", "1,2", "--quantum-I",
                         repr(math.pi / 2), "--emax", "2")
        assert result.returncode == 0, result.stderr
        lines = result.stdout.splitlines()
        assert lines[0] == "godel_integer,occupations,energy"
        godels = [int(line.split(",")[0]) for line in lines[1:]]
        assert godels == [1, 2, 3, 4]

    def test_bad_omega_rejected(self):
        result = run_cli("enumerate", "--omegas", "0", "--quantum-I", "1.0", "--emax", "1")
        assert result.returncode == 2


class TestQstarCommand:
    def test_finite_near_one(self):
        result = run_cli("qstar", "--expr", "(W+1)/W")
        assert result.returncode == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "(W+1)/W"
        assert lines[1] == "finite; equal to 1; not identical to 1"

    def test_reduction_shown(self):
        result = run_cli("qstar", "--expr", "(W*W-1)/(W-1)")
        assert result.stdout.splitlines()[0] == "W+1"

    def test_bad_expression(self):
        result = run_cli("qstar", "--expr", "(W")
        assert result.returncode == 2


class TestDeterminism:
    def test_every_command_byte_identical_across_runs(self, problem_file, model_file,
                                                      solution_file):
        invocations = [
            ("eigen", "--problem", problem_file, "--modes", "2"),
            ("sigma", "--model", model_file),
            ("action", "--solution", solution_file),
            ("encode", "--occupation", "2,1"),
            ("decode", "--integer", "360"),
            ("enumerate", "--omegas", "1,2", "--quantum-I", repr(math.pi / 2),
             "--emax", "2"),
            ("qstar", "--expr", "(W+1)/W"),
        ]
        for argv in invocations:
            first = run_cli(*argv)
            second = run_cli(*argv)
            assert first.returncode == 0, (argv, first.stderr)
            assert first.returncode == second.returncode
            assert first.stdout.encode() == second.stdout.encode(), argv
