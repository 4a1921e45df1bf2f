import json

import pytest

from crossbench.approx import ApproxTable, DisjointArray
from crossbench.cli import main
from crossbench.crosstree import full_tree
from crossbench.gammaspace import ZETA0, Coloring, elem_to_dict, zeta


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


@pytest.fixture
def full_n1(tmp_path):
    return write(tmp_path, "full_n1.json", full_tree(1, 1).dumps())


def test_leftfull_on_full_tree(capsys, full_n1):
    code, rep = run(capsys, "tree", "leftfull", "--input", full_n1, "--rho", "", "--sigma", "")
    assert code == 0 and rep["outcome"] == "yes" and rep["verified"]


def test_validate_reports_missing_root(capsys, tmp_path, full_n1):
    doc = json.loads(open(full_n1).read())
    doc["nodes"] = [x for x in doc["nodes"] if x["left"]]
    code, rep = run(capsys, "tree", "validate", "--input", write(tmp_path, "missing_root.json", doc))
    assert code == 1 and rep["outcome"] == "invalid" and rep["result"]["problems"]


def test_from_forbidden_emits_a_tree(capsys, tmp_path):
    w = write(tmp_path, "w.json", [{"left": "0", "right": ["1"]}])
    code, rep = run(capsys, "tree", "from-forbidden", "--forbidden", w, "--height", "2", "--r", "1")
    assert code == 0 and rep["outcome"] == "tree"
    assert {"left": "0", "right": ["1"]} not in rep["result"]["nodes"]


def test_prune_slice_and_extend(capsys, full_n1):
    assert run(capsys, "tree", "prune", "--input", full_n1)[0] == 0
    code, rep = run(capsys, "tree", "slice", "--input", full_n1, "--rho", "2")
    assert code == 0 and ["1"] in rep["result"]
    code, rep = run(capsys, "tree", "extend", "--input", full_n1, "--sigma", "", "--n", "1")
    assert code == 0 and rep["verified"]


def test_malformed_json_names_the_location(capsys, tmp_path):
    bad = write(tmp_path, "bad.json", '{"height": 1,\n "r": }')
    code = main(["tree", "validate", "--input", bad])
    captured = capsys.readouterr()
    assert code == 2
    assert "line 2" in captured.err


def test_solve_and_oracle(capsys, full_n1):
    code, rep = run(capsys, "solve", "--input", full_n1)
    assert code == 0 and rep["result"]["agreement"] == [[0]]
    code, rep = run(capsys, "solve", "--input", full_n1, "--oracle")
    assert code == 0 and rep["certificate"]["consistent"] is True


def test_solve_rejects_trees_that_are_not_leftfull(capsys, tmp_path):
    t = {"height": 1, "r": 1, "nodes": [{"left": "", "right": [""]}, {"left": "0", "right": ["0"]}]}
    code = main(["solve", "--input", write(tmp_path, "t.json", t)])
    capsys.readouterr()
    assert code == 2


def test_sweep_height_one(capsys):
    code, rep = run(capsys, "solve", "--sweep", "1", "1")
    assert code == 0
    assert rep["result"]["note"] == "no exclusions at N=1, r=1"
    assert rep["result"]["trees"] == 27 and rep["result"]["empty_agreement"] == 0


def test_gamma_interpret_root(capsys, tmp_path):
    code, rep = run(capsys, "gamma", "interpret", "--input", write(tmp_path, "zeta2.json", elem_to_dict(zeta(2))))
    assert code == 0 and rep["result"] == [{"level": 0, "support": [], "values": []}]


def test_gamma_diagonalize(capsys, tmp_path):
    t1 = ApproxTable(0, [[ZETA0, Coloring.of({1: 2})], [ZETA0, ZETA0]]).to_dict()
    t2 = ApproxTable(0, [[ZETA0, ZETA0]] * 2 + [[ZETA0, Coloring.of({3: 1})]]).to_dict()
    code, rep = run(capsys, "gamma", "diagonalize", "--tables",
                    write(tmp_path, "t1.json", t1), write(tmp_path, "t2.json", t2))
    assert code == 0 and rep["result"] == "0201" and rep["verified"]
    assert [e["row"] for e in rep["certificate"]] == [0, 2]


def test_gamma_longest_chain(capsys):
    code, rep = run(capsys, "gamma", "longest-chain", "--m", "1", "--B", "1", "--S", "0")
    assert code == 0 and rep["result"]["length"] == 2 and rep["verified"]


def test_gamma_variations_and_validation(capsys, tmp_path):
    v = write(tmp_path, "v.json", {"t0": [[], [0], [1]], "t1": [[], [0]]})
    code, rep = run(capsys, "gamma", "variations", "--input", v)
    assert code == 0 and rep["result"] == {"move": "cut", "node": [], "F": [0]}
    same = write(tmp_path, "s.json", {"t0": [[]], "t1": [[]]})
    assert run(capsys, "gamma", "variations", "--input", same)[0] == 1
    code, rep = run(capsys, "gamma", "validate-path", "--input", write(tmp_path, "z.json", elem_to_dict(zeta(1))))
    assert code == 0


def test_gamma_hyperimmune(capsys, tmp_path):
    arr = write(tmp_path, "a.json", DisjointArray.of([({1}, set(), {2})]).to_dict())
    code, rep = run(capsys, "gamma", "hyperimmune", "--input", arr, "--prefix", "002")
    assert code == 0 and rep["result"] == 0
    code, rep = run(capsys, "gamma", "hyperimmune", "--input", arr, "--prefix", "000")
    assert code == 1 and rep["outcome"] == "none within prefix"


def test_gamma_normalize(capsys, tmp_path):
    xi = {"m": 0, "rows": [[{"value": {"level": 0, "support": [], "values": []}, "stage": 0}, None]]}
    code, rep = run(capsys, "gamma", "normalize", "--input", write(tmp_path, "x.json", xi))
    assert code == 0 and rep["verified"]


def test_output_file_and_text_format(capsys, tmp_path, full_n1):
    out = tmp_path / "report.json"
    assert main(["solve", "--input", full_n1, "--output", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert set(rep) >= {"command", "inputs_digest", "seed", "outcome", "wall_time"}
    capsys.readouterr()
    assert main(["solve", "--input", full_n1, "--format", "text"]) == 0
    assert "outcome: solved" in capsys.readouterr().out


def test_reports_are_deterministic(capsys, full_n1):
    a = run(capsys, "solve", "--input", full_n1, "--seed", "4")[1]
    b = run(capsys, "solve", "--input", full_n1, "--seed", "4")[1]
    a.pop("wall_time"), b.pop("wall_time")
    assert a == b
