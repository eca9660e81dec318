import json
import os
import re
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from rzstrata import cli

GOLDEN = Path(__file__).parent / "golden"
DOT_NODE = re.compile(r'^  "([^"]+)" \[label="([^"]+)"\];$')
DOT_EDGE = re.compile(r'^  "([^"]+)" -- "([^"]+)"(?: \[label="([^"]+)"\])?;$')


def run(args, capsys):
    code = cli.main(args)
    out, err = capsys.readouterr()
    return code, out, err


def schema(name):
    return json.loads(resources.files("rzstrata").joinpath(f"schemas/{name}.schema.json").read_text())


def parse_dot(text):
    lines = text.splitlines()
    assert re.match(r"^graph \w+ \{$", lines[0])
    assert lines[-1] == "}"
    nodes, edges = {}, []
    for ln in lines[1:-1]:
        if ln.startswith("  node "):
            continue
        m = DOT_NODE.match(ln)
        if m:
            nodes[m.group(1)] = m.group(2)
            continue
        m = DOT_EDGE.match(ln)
        assert m, ln
        edges.append((m.group(1), m.group(2), m.group(3)))
    for a, b, _ in edges:
        assert a in nodes and b in nodes
    return nodes, edges


@pytest.mark.parametrize("case", ["split", "inert"])
@pytest.mark.parametrize("fmt,ext", [("text", "txt"), ("csv", "csv"), ("json", "json")])
def test_tables_golden(case, fmt, ext, capsys):
    code, out, _ = run(["tables", "--case", case, "--format", fmt], capsys)
    assert code == 0
    assert out == (GOLDEN / f"tables_{case}.{ext}").read_text()
    if fmt == "json":
        jsonschema.validate(json.loads(out), schema("tables"))


def test_tables_default_is_text(capsys):
    code, out, _ = run(["tables", "--case", "split"], capsys)
    assert code == 0 and out.startswith("case split\n")
    assert len(out.strip().splitlines()) == 4


def test_dl_m1(capsys):
    code, out, _ = run(["dl", "--p", "3", "--m", "1", "--side", "minus"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d == {"unit": 280, "w1": 0, "w2": 0}
    jsonschema.validate(d, schema("dl"))


def test_dl_plus_m2(capsys):
    code, out, _ = run(["dl", "--side", "plus", "--format", "csv"], capsys)
    assert code == 0
    assert out == "stratum,count\nunit,280\nw1,8064\nw2,0\n"


def test_tree_radius1_dot(capsys):
    code, out, _ = run(["tree", "--p", "3", "--radius", "1"], capsys)
    assert code == 0
    nodes, edges = parse_dot(out)
    assert len(nodes) == 11
    assert len(edges) == 10


def test_tree_json(capsys):
    code, out, _ = run(["tree", "--radius", "2", "--format", "json"], capsys)
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, schema("tree"))
    assert len(d["nodes"]) == 101
    assert len(d["edges"]) == 100


def test_lattices_star(capsys):
    code, out, _ = run(["lattices", "--format", "dot"], capsys)
    assert code == 0
    nodes, edges = parse_dot(out)
    kinds = [lab.split()[0] for lab in nodes.values()]
    assert kinds.count("1") == 1
    assert kinds.count("02") == 280
    assert kinds.count("3") == 112
    code, out, _ = run(["lattices", "--format", "json"], capsys)
    d = json.loads(out)
    jsonschema.validate(d, schema("lattices"))
    assert len(d["nodes"]) == 393


def test_lattices_split_star(capsys):
    code, out, _ = run(["lattices", "--case", "split", "--format", "json"], capsys)
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, schema("lattices"))
    assert len(d["nodes"]) == 11
    assert len(d["edges"]) == 10
    code, out, _ = run(["lattices", "--case", "split", "--format", "dot"], capsys)
    nodes, edges = parse_dot(out)
    assert len(nodes) == 11 and all(lab == "adjacent" for _, _, lab in edges)


def test_lattices_split_window_a0(capsys):
    code, out, _ = run(["lattices", "--case", "split", "--scope", "window", "--a", "0"], capsys)
    assert code == 0
    assert out.startswith("split=")


def test_suite_names_match_verify():
    from rzstrata import verify as vf
    assert cli.SUITE_ORDER == vf.SUITES


def test_verify_json(capsys):
    code, out, _ = run(["verify", "--suite", "weyl,dl,adlv", "--m", "1", "--format", "json"], capsys)
    assert code == 0
    d = json.loads(out)
    jsonschema.validate(d, schema("verify"))
    assert d["passed"]
    assert [r["check"] for r in d["reports"]] == ["weyl_tables", "dl_partition", "compare_bt_adlv",
                                                  "compare_bt_adlv"]


def test_verify_text(capsys):
    code, out, _ = run(["verify", "--suite", "f1", "--m", "1", "--no-strict-tau"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("[PASS] check_f1 p=3 m=1")
    assert out.rstrip().endswith("ALL PASS")


def test_verify_failure_exit_code(capsys, monkeypatch):
    from rzstrata import verify as vf

    def broken(name, p, m, a, strict_tau):
        f = vf._Failures()
        f.add("forced", "witness-0")
        return [f.report("forced", {"p": p}, {})]

    monkeypatch.setattr(vf, "run_suite", broken)
    code, out, _ = run(["verify", "--suite", "weyl", "--format", "json"], capsys)
    assert code == 1
    d = json.loads(out)
    jsonschema.validate(d, schema("verify"))
    assert d["reports"][0]["witnesses"] == ["forced: witness-0"]


@pytest.mark.parametrize("args", [
    ["tables", "--case", "ramified"],
    ["tables", "--format", "dot"],
    ["dl", "--p", "4"],
    ["dl", "--m", "0"],
    ["dl", "--side", "up"],
    ["dl", "--p", "5", "--m", "3"],
    ["tree", "--radius", "-1"],
    ["verify", "--suite", "bogus"],
    ["lattices", "--scope", "everything"],
    ["--p", "3"],
    [],
])
def test_usage_errors(args, capsys):
    code, _, err = run(args, capsys)
    assert code == 2
    assert err.startswith("rzstrata: error:")


def test_output_file(tmp_path, capsys):
    target = tmp_path / "t.csv"
    code, out, _ = run(["tables", "--case", "inert", "--format", "csv", "--output", str(target)], capsys)
    assert code == 0 and out == ""
    assert target.read_bytes() == (GOLDEN / "tables_inert.csv").read_bytes()


def test_byte_identical_across_runs(capsys):
    outs = []
    for _ in range(2):
        _, out, _ = run(["lattices", "--format", "dot"], capsys)
        outs.append(out)
    assert outs[0] == outs[1]


def test_byte_identical_across_processes():
    env = dict(os.environ, RZ_STRATA_THREADS="2")
    cmd = [sys.executable, "-m", "rzstrata.cli", "verify", "--suite", "weyl,dl", "--m", "1", "--format", "json"]

    def once(_):
        return subprocess.run(cmd, env=env, capture_output=True, check=True).stdout

    with ThreadPoolExecutor(2) as ex:
        a, b = ex.map(once, range(2))
    assert a == b
    assert json.loads(a)["passed"]


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "rzstrata.cli", "tables", "--case", "split"],
                         capture_output=True, check=True)
    assert res.stdout == (GOLDEN / "tables_split.txt").read_bytes()
