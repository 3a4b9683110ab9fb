import json

import pytest

from qrlab import cli
from qrlab.wirtinger import jets


def run(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path)])


def load(tmp_path, name):
    return json.loads((tmp_path / f"{name}.json").read_text())


def test_analyze_identity(tmp_path):
    assert run(tmp_path, "analyze", "--map", "fixture:identity") == 0
    rep = load(tmp_path, "analyze")
    assert rep["schema_version"] == 1 and rep["command"] == "analyze"
    assert rep["report"]["k_hat"] == 0


def test_analyze_branch_qr(tmp_path):
    assert run(tmp_path, "analyze", "--map", "fixture:branch?eps=2", "--assert", "qr") == 0
    assert load(tmp_path, "analyze")["report"]["k_hat"] == pytest.approx(5 ** -0.5, abs=1e-6)


def test_analyze_assert_fails(tmp_path):
    assert run(tmp_path, "analyze", "--map", "fixture:branch?eps=1", "--assert", "re_fz>=0") == 1
    rep = load(tmp_path, "analyze")["report"]
    delta = 1 / (2 + 3 ** 0.5)
    for p in rep["violation_points"]:
        assert p["re"] < -delta * p["im"] + 1e-9


def test_usage_errors(tmp_path, capsys):
    assert run(tmp_path, "analyze", "--map", "fixture:nope") == 2
    assert run(tmp_path, "analyze", "--map", "expr:z +") == 2
    assert run(tmp_path, "analyze", "--map", "fixture:noninj?M=0.5") == 2
    assert run(tmp_path, "analyze", "--map", "fixture:identity", "--tolerance", "nope=1") == 2
    assert run(tmp_path, "analyze") == 2
    assert run(tmp_path, "bogus") == 2
    assert run(tmp_path, "verify", "--only", "nothing") == 2


def test_index(tmp_path):
    assert run(tmp_path, "index", "--map", "fixture:grad2d", "--center", "0", "--radius", "0.3",
               "--assert", "-3") == 0
    assert load(tmp_path, "index")["report"]["index"] == -3


def test_sectors(tmp_path):
    assert run(tmp_path, "sectors", "--map", "fixture:power?n=2", "--center", "0") == 0
    rep = load(tmp_path, "sectors")["report"]
    assert (rep["n_e"], rep["n_h"], rep["agreement"]) == (2, 0, True)


def test_collide(tmp_path):
    assert run(tmp_path, "collide", "--map", "fixture:noninj?M=1", "--image", "-7", "--assert", "found") == 0
    w = load(tmp_path, "collide")["report"]["witnesses"][0]
    assert abs(complex(w["z1"]["re"], w["z1"]["im"]) - (1 - 4j)) <= 1e-3
    assert abs(complex(w["z2"]["re"], w["z2"]["im"]) - (1 + 4j)) <= 1e-3
    assert (tmp_path / "collide.csv").exists()
    assert run(tmp_path, "collide", "--map", "fixture:identity", "--region", "0 1 0 1", "--grid", "64",
               "--assert", "none") == 0


def test_portrait(tmp_path):
    assert run(tmp_path, "portrait", "--map", "fixture:power?n=2", "--seeds", "8") == 0
    svg = (tmp_path / "portrait.svg").read_text()
    assert "<circle" in svg and "traj-0" in svg
    assert (tmp_path / "portrait.csv").read_text().startswith("id,")


def test_potential_and_hessian(tmp_path):
    assert run(tmp_path, "potential", "--map", "fixture:iz", "--assert", "negative") == 0
    assert run(tmp_path, "potential", "--map", "fixture:identity") == 1  # hypothesis violated
    assert run(tmp_path, "hessian3d", "--samples", "200", "--assert", "bounds") == 0
    assert load(tmp_path, "hessian3d")["report"]["det_psi_min"] >= 16 - 1e-9


def test_homotopy_and_bilipschitz(tmp_path):
    assert run(tmp_path, "homotopy", "--map", "fixture:iz", "--ts", "0,0.5") == 0
    assert run(tmp_path, "bilipschitz", "--map", "expr:2*z + 0.5*conj(z)", "--lam", "1.9364916731",
               "--K", "1.6666666667") == 0
    assert run(tmp_path, "bilipschitz", "--map", "expr:2*z", "--lam", "3", "--K", "1") == 1


def test_tolerance_header(tmp_path):
    assert run(tmp_path, "analyze", "--map", "fixture:identity", "--tolerance", "band=1e-7") == 0
    assert load(tmp_path, "analyze")["tolerances"]["band"] == 1e-7


def test_env_out(tmp_path, monkeypatch):
    monkeypatch.setenv("QRLAB_OUT", str(tmp_path / "env"))
    assert cli.main(["analyze", "--map", "fixture:identity"]) == 0
    assert (tmp_path / "env" / "analyze.json").exists()


def test_map_file(tmp_path):
    src = tmp_path / "square.qr"
    src.write_text("name: square\ndomain: disk(0, 2)\npiece: true -> z^2\n")
    assert run(tmp_path, "index", "--map", str(src), "--radius", "0.2") == 0
    assert load(tmp_path, "index")["report"]["index"] == 2


def test_deterministic_reports(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out, jobs in ((a, "1"), (b, "3")):
        assert cli.main(["analyze", "--map", "fixture:branch?eps=1", "--jobs", jobs, "--out", str(out)]) == 0
    assert (a / "analyze.json").read_bytes() == (b / "analyze.json").read_bytes()


def test_verify_only_flow(tmp_path, capsys):
    assert run(tmp_path, "verify", "--only", "flow") == 0
    out = capsys.readouterr().out
    assert "[ 5]" in out and "[ 6]" in out and "[ 4]" not in out


def test_verify_catches_jet_sign_bug(tmp_path, monkeypatch):
    def bad_quot(da, db, v, b):
        if da is None and db is None:
            return None
        return jets._add(da, jets._scale(v, db)) / b  # sign flipped

    monkeypatch.setattr(jets, "_quot", bad_quot)
    assert run(tmp_path, "verify", "--only", "preflight") == 1
    rep = load(tmp_path, "verify")["report"]
    assert rep["results"][0]["details"]["max_fzbar_hidden_holomorphic"] > 0.1


def test_reports_match_schema(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    from pathlib import Path

    schema = json.loads((Path(__file__).parents[1] / "docs" / "report-schema.json").read_text())
    assert run(tmp_path, "analyze", "--map", "fixture:identity", "--grid", "32") == 0
    assert run(tmp_path, "sectors", "--map", "fixture:power?n=2") == 0
    assert run(tmp_path, "hessian3d", "--samples", "10") == 0
    for name in ("analyze", "sectors", "hessian3d"):
        jsonschema.validate(load(tmp_path, name), schema)
