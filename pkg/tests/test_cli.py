import json

import pytest

from ncbrst.cli import main
from ncbrst.scenario import ScenarioError, build, emit, load_report, load_scenario, preset, run


def test_presets_resolve():
    for name in ("jordan", "genus-g", "gauge", "laurent", "group-group", "star"):
        sc = preset(name)
        assert build(sc).A.quiver.arrows


def test_jordan_preset():
    sc = load_scenario("jordan")
    assert sc.dimension == [2] and sc.max_weight == 4
    assert build(sc).quiver.names == ["x", "y"]


def test_genus_preset_moment():
    sc = load_scenario("genus-g", g=2)
    b = build(sc)
    assert b.ham.deltas[1] == b.A.ctx.parse("x1 y1 - y1 x1 + x2 y2 - y2 x2")
    assert load_scenario("genus-3").name == "genus-3"


def test_unknown_preset():
    with pytest.raises(ScenarioError, match="unknown preset"):
        load_scenario("nonesuch")


def test_malformed_arrow_names_field(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("quiver:\n  vertices: [1]\n  arrows:\n    - {name: x, source: 1}\n"
                 "bracket: {standard: cotangent}\n")
    with pytest.raises(ScenarioError, match=r"quiver.arrows\[0\]: missing field 'target'"):
        load_scenario(p)


def test_parse_error_reports_line(tmp_path):
    p = tmp_path / "broken.yaml"
    p.write_text("quiver:\n  vertices: [1\n  arrows: []\n")
    with pytest.raises(ScenarioError, match="line"):
        load_scenario(p)


SCENARIO = """
name: custom-jordan
quiver:
  vertices: [1]
  arrows:
    - {name: x, source: 1, target: 1}
    - {name: y, source: 1, target: 1}
bracket:
  entries:
    - lhs: x
      rhs: y
      terms: [{left_word: e_1, right_word: e_1, coeff: 1}]
    - {lhs: x, rhs: x, terms: []}
    - {lhs: y, rhs: y, terms: []}
hamiltonian:
  per_vertex: {1: "x y - y x"}
dimension: [1]
max_weight: 2
checks: [bracket, brst, rep, homology, decomposition]
"""


def test_custom_scenario_file(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text(SCENARIO)
    sc = load_scenario(p)
    rep = run(sc)
    assert rep.ok, emit(rep)
    assert [2, 1, 1] in rep.data["betti_K"]


def test_jordan_n1_all():
    sc = preset("jordan")
    sc.dimension, sc.max_weight = [1], 3
    rep = run(sc)
    assert rep.ok
    assert rep.data["betti_B"]


def test_gauge_rep_checks():
    rep = run(preset("gauge"), ["rep"])
    names = [c.name for c in rep.checks]
    assert "rep: {tr t², tr t³} = 0" in names
    assert rep.ok


def test_laurent_homology_rejected():
    sc = preset("laurent")
    sc.dimension = [2]
    with pytest.raises(ScenarioError, match="out of scope"):
        run(sc, ["homology"])


def test_failing_hamiltonian_stops_pipeline(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text(SCENARIO.replace('"x y - y x"', '"x"'))
    rep = run(load_scenario(p), ["rep"])
    assert not rep.ok
    assert rep.checks[-1].name == "rep: not run"


def test_csv_betti_row():
    sc = preset("jordan")
    sc.dimension, sc.max_weight = [1], 2
    out = emit(run(sc, ["homology"]), "csv")
    block = out.split("# betti_K\n")[1].split("\n\n")[0].splitlines()
    assert block[0] == "weight,degree,dim"
    assert "2,1,1" in block


def test_text_lists_checks():
    out = emit(run(preset("jordan"), ["bracket"]), "text")
    assert "[PASS] bracket: double Jacobi" in out


def test_json_round_trip_and_determinism():
    sc = preset("star")
    a, b = run(sc, ["homology"]), run(sc, ["homology"])
    ja = emit(a, "json")
    assert emit(load_report(ja), "json") == ja
    strip = lambda r: {k: v for k, v in json.loads(emit(r, "json"))["data"].items() if k != "timing"}
    assert strip(a) == strip(b)


def test_main_exit_codes(tmp_path, capsys):
    assert main(["verify-bracket", "--preset", "jordan"]) == 0
    assert "PASS" in capsys.readouterr().out
    assert main(["homology", "--preset", "laurent", "--dim", "2"]) == 2
    p = tmp_path / "s.yaml"
    p.write_text(SCENARIO.replace('"x y - y x"', '"x"'))
    assert main(["verify-bracket", "--scenario", str(p)]) == 1


def test_main_writes_csv(tmp_path):
    out = tmp_path / "b.csv"
    rc = main(["homology", "--preset", "jordan", "--dim", "1", "--max-weight", "2", "--format", "csv",
               "--output", str(out)])
    assert rc == 0
    assert "weight,degree,dim" in out.read_text()
