import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locorth import cli
from locorth.core import DensityOperator, PureState, bell_state, random_density_operator
from locorth.errors import InvalidStateError
from locorth.io import FileFormatError, from_states, load, parse, serialize, to_document

from conftest import block_state


def write(tmp_path, name, ef):
    path = tmp_path / name
    path.write_text(serialize(ef))
    return str(path)


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path, tau, psi_plus):
    v, w = block_state()
    tau_m = tau.matrix
    werner = 2 / 3 * tau_m + 1 / 3 * np.eye(4) / 4
    block_mix = 0.5 * v.density().matrix + 0.5 * w.density().matrix
    return {
        "bell": write(tmp_path, "bell.json", from_states([1.0], [bell_state()], [2], [2])),
        "werner": write(tmp_path, "werner.json",
                        from_states([1.0], [DensityOperator(werner, (2, 2))], [2], [2])),
        "block": write(tmp_path, "block.json", from_states([0.5, 0.5], [v, w], [2], [4])),
        "block_mix": write(tmp_path, "block_mix.json",
                           from_states([1.0], [DensityOperator(block_mix, (2, 4))], [2], [4])),
        "bellpair": write(tmp_path, "bellpair.json",
                          from_states([0.5, 0.5], [tau, psi_plus], [2], [2])),
        "qutrit": write(tmp_path, "q.json", from_states(
            [1.0], [DensityOperator(np.eye(9) / 9, (3, 3))], [3], [3])),
        "diag": write(tmp_path, "diag.json", from_states(
            [0.5, 0.5], [DensityOperator(np.diag([1, 0]), (2,)),
                         DensityOperator(np.diag([0, 1]), (2,))], [2], [])),
    }


def test_round_trip(rng, tmp_path):
    rho = random_density_operator([2, 3], rng)
    psi = PureState(rng.standard_normal(6) + 1j * rng.standard_normal(6), (2, 3), normalize=True)
    ef = from_states([0.25, 0.75], [rho, psi], [2], [3], labels=["x", "y"])
    again = parse(serialize(ef))
    assert to_document(again) == to_document(ef)
    assert again.labels == ["x", "y"]
    assert np.array_equal(again.entries[0].data, rho.matrix)
    path = write(tmp_path, "rt.json", ef)
    assert serialize(load(path)) == serialize(ef)


@settings(max_examples=50, deadline=None)
@given(vals=st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=8, max_size=8))
def test_round_trip_exact_floats(vals):
    vec = np.array(vals[:4]) + 1j * np.array(vals[4:])
    doc = {"dims_A": [2], "dims_B": [2],
           "states": [{"prob": 1.0, "pure": True, "vector": [[z.real, z.imag] for z in vec]}]}
    assert np.array_equal(parse(json.dumps(doc)).entries[0].data, vec)


@pytest.mark.parametrize("text, field", [
    ("{", "JSON"),
    ('{"dims_B": [2], "states": []}', "dims_A"),
    ('{"dims_A": [2], "states": []}', "states"),
    ('{"dims_A": [2], "states": [{"prob": "x"}]}', "states[0].prob"),
    ('{"dims_A": [2], "states": [{"prob": 1, "pure": true, "vector": [[1,0]]}]}', "states[0].vector"),
    ('{"dims_A": [2], "states": [{"prob": 1, "matrix": [[[1,0],[0,0]],[[0,0],[0]]]}]}',
     "states[0].matrix[1][1]"),
    ('{"dims_A": [2], "labels": ["a", "b"], "states": [{"prob": 1, "pure": true, '
     '"vector": [[1,0],[0,0]]}]}', "labels"),
])
def test_parse_errors_name_field(text, field):
    with pytest.raises(FileFormatError, match=field.replace("[", r"\[").replace("]", r"\]")):
        parse(text)


def test_state_validation():
    bad_norm = parse('{"dims_A": [2], "states": [{"prob": 1, "pure": true, "vector": [[1,0],[1,0]]}]}')
    with pytest.raises(FileFormatError, match="states\\[0\\]"):
        bad_norm.states()
    bad_prob = parse('{"dims_A": [2], "states": [{"prob": 0.5, "pure": true, "vector": [[1,0],[0,0]]}]}')
    with pytest.raises(InvalidStateError):
        bad_prob.ensemble()


def test_check_lo(files, capsys):
    code, out, _ = run(["check-lo", files["block"]], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["locally_orthogonal"] and doc["witness_parties"][0] == "B0"
    code, out, _ = run(["check-lo", files["bellpair"]], capsys)
    doc = json.loads(out)
    assert code == 2 and not doc["locally_orthogonal"]
    assert np.allclose(doc["overlap_table"][0]["overlaps"], [0.5, 0.5])
    assert "tolerances" in doc


def test_check_lo_truncated(tmp_path, files, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(open(files["block"]).read()[:50])
    code, _, err = run(["check-lo", str(bad)], capsys)
    assert code == 1 and "JSON" in err
    assert run(["check-lo", str(tmp_path / "missing.json")], capsys)[0] == 1


def test_ef_commands(files, capsys):
    code, out, _ = run(["ef", files["bell"], "--method", "wootters"], capsys)
    assert code == 0 and json.loads(out)["value"] == pytest.approx(1.0)
    code, out, _ = run(["ef", files["werner"]], capsys)
    doc = json.loads(out)
    assert doc["method"] == "wootters" and doc["value"] == pytest.approx(0.3546, abs=1e-4)
    code, out, _ = run(["ef", files["block_mix"], "--method", "roof", "--restarts", "20",
                        "--seed", "7"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["method"] == "roof" and doc["value"] == pytest.approx(0.5, abs=5e-3)
    assert doc["seed"] == 7 and doc["restarts"] == 20 and "converged" in doc
    assert run(["ef", files["qutrit"], "--method", "wootters"], capsys)[0] == 1
    assert run(["ef", files["diag"]], capsys)[0] == 1


def test_verify_decomposition(files, capsys, tmp_path):
    code, out, err = run(["verify-decomposition", files["block"]], capsys)
    doc = json.loads(out)
    assert code == 0 and abs(doc["gap"]) <= 5e-3 and "E_c" in err
    assert doc["ec_hypothesis"]
    code, out, _ = run(["verify-decomposition", files["bellpair"]], capsys)
    assert code == 2 and "hypothesis" in json.loads(out)["explanation"]
    single = write(tmp_path, "single.json", from_states([1.0], [bell_state()], [2], [2]))
    code, out, _ = run(["verify-decomposition", single], capsys)
    assert code == 0 and abs(json.loads(out)["gap"]) <= 1e-12


def test_verify_decomposition_gap_tol(files, capsys):
    # an impossible tolerance turns the (tiny) gap into a negative result
    code, _, _ = run(["verify-decomposition", files["bell"], "--gap-tol", "-1"], capsys)
    assert code == 2


def test_typicality_cli(files, capsys):
    code, out, _ = run(["typicality", "--probs", "0.5,0.5", "--n", "4", "--eps", "0.5"], capsys)
    assert code == 0 and json.loads(out)["mass"] == pytest.approx(0.875)
    code, out, _ = run(["typicality", "--probs", "0.5,0.5", "--mode", "weak"], capsys)
    assert json.loads(out)["mass"] == pytest.approx(1.0)
    code, out, _ = run(["typicality", "--probs", "0.5,0.3,0.2", "--n", "1000", "--eps", "0.3"],
                       capsys)
    assert json.loads(out)["mass"] >= 0.99
    code, out, _ = run(["typicality", "--probs", "0.5,0.5", "--n", "4", "--eps", "0.5",
                        "--exact-distance", files["diag"]], capsys)
    assert json.loads(out)["exact_trace_distance"] == pytest.approx(0.125, abs=1e-9)
    code, _, err = run(["typicality", "--probs", "0.25,0.25,0.25,0.25", "--n", "500",
                        "--mode", "weak", "--lattice-cap", "1000"], capsys)
    assert code == 3 and "cap" in err
    assert run(["typicality", "--probs", "0.5,0.6"], capsys)[0] == 1
    assert run(["typicality", "--probs", "a,b"], capsys)[0] == 1


def test_typicality_matrix_cap(files, capsys):
    code, _, err = run(["--max-dim", "8", "typicality", "--probs", "0.5,0.5", "--n", "4",
                        "--eps", "0.5", "--exact-distance", files["diag"]], capsys)
    assert code == 3 and "8" in err


def test_example_cli(capsys, tmp_path):
    code, out, _ = run(["example"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["certificate"]["witness_per_element"][0] == 1
    code, out, _ = run(["example", "--r", "1", "--w", "0.5"], capsys)
    assert json.loads(out)["ef_predicted"] == pytest.approx(0.75)
    code, out, _ = run(["example", "--w", "1.0"], capsys)
    assert code == 0 and json.loads(out)["params"]["w"] == 1.0
    assert run(["example", "--w", "2"], capsys)[0] == 1
    assert run(["example", "--s", "1,1,1"], capsys)[0] == 1
    target = tmp_path / "rep.json"
    code, out, _ = run(["example", "--output", str(target)], capsys)
    assert out == "" and json.loads(target.read_text())["command"] == "example"


def test_reports_byte_identical(files, capsys):
    argv = ["verify-decomposition", files["block"], "--seed", "5", "--restarts", "6"]
    first = run(argv, capsys)[1]
    assert run(argv, capsys)[1] == first
    assert run(argv + ["--workers", "3"], capsys)[1] == first
