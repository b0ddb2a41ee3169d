import io
import json

import pytest

from fmoperad.cli import RunConfig, run_command
from fmoperad.fm import FMPoint, fm_error
from fmoperad.wspace import WPoint, w_error


def run(argv, stdin=""):
    out = io.StringIO()
    code = run_command(argv, io.StringIO(stdin), out)
    return code, out.getvalue()


def test_sample_beta_beta_inv_pipeline():
    code, text = run(["sample", "--n", "2", "--k", "4", "--seed", "3", "--region", "collar"])
    assert code == 0
    p = FMPoint.from_json(json.loads(text))
    code, wtext = run(["beta"], text)
    assert code == 0
    w = WPoint.from_json(json.loads(wtext))
    code, back = run(["beta-inv"], wtext)
    assert code == 0
    assert fm_error(FMPoint.from_json(json.loads(back)), p) < 1e-12
    code, again = run(["beta"], back)
    assert w_error(WPoint.from_json(json.loads(again)), w) < 1e-12


def test_beta_on_boundary_has_unit_lengths():
    _, text = run(["sample", "--k", "3", "--seed", "0", "--region", "boundary"])
    _, wtext = run(["beta"], text)
    assert json.loads(wtext)["lengths"] == [1.0]


def test_compose_f_and_w(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run(["sample", "--k", "3", "--seed", "1", "--out", str(a)])
    run(["sample", "--k", "2", "--seed", "2", "--out", str(b)])
    code, text = run(["compose", "--tree", "[[1,2],3,4]", str(a), str(b)])
    assert code == 0
    p = FMPoint.from_json(json.loads(text))
    assert p.is_boundary and p.k == 4
    wa, wb = tmp_path / "wa.json", tmp_path / "wb.json"
    run(["beta", str(a), "--out", str(wa)])
    run(["beta", str(b), "--out", str(wb)])
    code, text = run(["compose", "--tree", "[[1,2],3,4]", str(wa), str(wb)])
    assert code == 0
    assert json.loads(text)["lengths"] == [1.0]


def test_reports_are_deterministic():
    argv = ["check-axioms", "--n", "2", "--k", "3", "--trials", "20", "--seed", "9"]
    first, second = run(argv), run(argv)
    assert first == second and first[0] == 0
    code, text = run(["roundtrip", "--n", "2", "--k", "4", "--trials", "50", "--seed", "7"])
    assert code == 0 and json.loads(text)["failed"] == 0


@pytest.mark.parametrize("cmd", ["check-equivariance", "check-seams"])
def test_check_commands_pass(cmd):
    code, text = run([cmd, "--k", "4", "--trials", "10"])
    assert code == 0, text
    assert json.loads(text)["failed"] == 0


def test_enumerate_strata():
    code, text = run(["enumerate-strata", "--k", "3"])
    body = json.loads(text)
    assert code == 0 and body["count"] == 4 and body["codim_counts"] == {"0": 1, "1": 3}


def test_export_dot():
    code, text = run(["export-dot"], "[[1,2],3]")
    assert code == 0 and text.startswith("digraph")


def test_errors_exit_two():
    code, text = run(["beta"], "{not json")
    assert code == 2 and json.loads(text)["invariant"] == "json"
    _, sample = run(["sample", "--k", "3", "--region", "boundary"])
    obj = json.loads(sample)
    obj["edge_u"] = {key: 1.5 for key in obj["edge_u"]}
    code, text = run(["beta"], json.dumps(obj))
    assert code == 2 and "invariant" in json.loads(text)
    code, _ = run(["check-seams", "--k", "2"])
    assert code == 2


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(k=1)
    with pytest.raises(ValueError):
        RunConfig(tol=0.0)
