import itertools
import json

import pytest

from hamsat.cli import main

from conftest import PETERSEN_N

INSTANCE = ["--k", "5", "--l", "2", "--N", str(PETERSEN_N), "--relaxed"]


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_nu_value(capsys):
    rc, out, _ = run(capsys, "nu", "--k", "5", "--l", "2", "--x", "8")
    assert rc == 0 and out.strip() == "11"


def test_nu_table_and_mu(capsys):
    rc, out, _ = run(capsys, "nu", "table", "--k", "5", "--l", "2", "--x-max", "6")
    assert rc == 0 and out.splitlines()[-1] == "6\t8"
    rc, out, _ = run(capsys, "nu", "--k", "5", "--l", "2", "--z", "9")
    assert json.loads(out) == {"z": "9", "mu": 7, "mu_star": 8}
    assert run(capsys, "nu", "--k", "9", "--l", "2", "--z", "5")[0] == 64


def test_usage_errors_exit_64(capsys):
    assert run(capsys, "nu", "--k", "5", "--l", "2", "--bogus")[0] == 64
    assert run(capsys, "nu", "--k", "5", "--l", "2")[0] == 64
    assert run(capsys)[0] == 64


def test_params_and_battery_failure(capsys, tmp_path):
    rc, out, _ = run(capsys, "params", "--k", "7", "--l", "3", "--N", "1848772", "--relaxed")
    assert rc == 0 and json.loads(out)["p"] == 3
    manifest = tmp_path / "m.json"
    rc, _, _ = run(capsys, "params", "--k", "5", "--l", "2", "--N", "999", "--relaxed", "--n", "2", "--manifest", str(manifest))
    assert rc == 1
    data = json.loads(manifest.read_text())
    assert data["exit_code"] == 1 and data["battery"]["pass"] is False


def test_scan(capsys):
    rc, out, _ = run(capsys, "scan-min-N", "--k", "5", "--l", "2", "--n-target", "10")
    assert rc == 0 and json.loads(out)["N"] == PETERSEN_N


def test_g1_commands(capsys):
    rc, out, _ = run(capsys, "g1", "verify", "--g1", "petersen")
    assert rc == 0 and json.loads(out)["status"] == "verified_true"
    rc, out, _ = run(capsys, "g1", "hampath", "--u", "1", "--v", "3")
    path = json.loads(out)["path"]
    assert rc == 0 and (path[0], path[-1]) == (1, 3)
    assert run(capsys, "g1", "hampath", "--u", "1", "--v", "2")[0] == 2


def test_g1_file_input(capsys, tmp_path):
    g = tmp_path / "k23.txt"
    g.write_text("5 6\n1 3\n1 4\n1 5\n2 3\n2 4\n2 5\n")
    rc, out, _ = run(capsys, "g1", "verify", "--g1-file", str(g))
    assert rc == 2 and json.loads(out)["status"] == "verified_false"


@pytest.fixture(scope="module")
def layout(instance):
    return instance[1]


def edge_file(tmp_path, edge):
    path = tmp_path / "e.txt"
    path.write_text(" ".join(map(str, edge)))
    return str(path)


def test_classify_and_count(capsys, tmp_path, layout):
    h2 = list(layout.u_range(1))[:4] + list(layout.u_range(2))[:1]
    rc, out, _ = run(capsys, "classify", *INSTANCE, "--edge-file", edge_file(tmp_path, h2))
    assert rc == 0 and "H2" in out.strip().split(",")
    rc, out, _ = run(capsys, "count-h3", *INSTANCE)
    assert rc == 0 and int(out) == 39953186055790066904523000


def test_graph_mismatch_is_usage_error(capsys, tmp_path, layout):
    e = edge_file(tmp_path, range(5))
    assert run(capsys, "classify", *INSTANCE, "--g1", "j5", "--edge-file", e)[0] == 64


def test_build_then_validate(capsys, tmp_path, layout):
    n = layout.n
    # parts 1, 3, 9 are independent in Petersen
    e = list(layout.a_range(n + 1))[:1] + list(layout.u_range(n + 3))[:2] + list(layout.u_range(n + 9))[:2]
    ef = edge_file(tmp_path, e)
    out_path = tmp_path / "cycle.bin"
    rc, out, _ = run(capsys, "build-cycle", *INSTANCE, "--edge-file", ef, "--out", str(out_path))
    assert rc == 0 and json.loads(out)["valid"]
    manifest = json.loads((tmp_path / "cycle.bin.manifest.json").read_text())
    assert str(out_path) in manifest["outputs"] and manifest["exit_code"] == 0
    rc, out, _ = run(capsys, "validate", "--cycle", str(out_path), "--edge-file", ef, "--relaxed")
    assert rc == 0 and json.loads(out)["valid"]
    other = edge_file(tmp_path, list(layout.a_range(n + 1))[1:2] + e[1:])
    assert run(capsys, "validate", "--cycle", str(out_path), "--edge-file", other, "--relaxed")[0] == 2


def test_build_rejects_h3_edge(capsys, tmp_path, layout):
    e = list(layout.u_range(1))[:3] + list(layout.u_range(2))[:2]
    rc, _, err = run(capsys, "build-cycle", *INSTANCE, "--edge-file", edge_file(tmp_path, e), "--out", str(tmp_path / "x"))
    assert rc == 3 and "H3" in err


def test_satlab(capsys, tmp_path):
    rc, out, _ = run(capsys, "satlab", "saturate", "--k", "3", "--l", "1", "--N", "6")
    data = json.loads(out)
    assert rc == 0 and data["size"] == len(data["edges"]) and data["N"] == 6
    edges = tmp_path / "h.json"
    edges.write_text(json.dumps([list(c) for c in itertools.combinations(range(6), 3)]))
    rc, out, _ = run(capsys, "satlab", "ham", "--k", "3", "--l", "1", "--N", "6", "--edges-file", str(edges))
    assert rc == 0 and json.loads(out)["hamiltonian"] is True
    assert run(capsys, "satlab", "ham", "--k", "3", "--l", "1", "--N", "6")[0] == 64
    assert run(capsys, "satlab", "ham", "--k", "3", "--l", "1", "--N", "7", "--edges-file", str(edges))[0] == 64
