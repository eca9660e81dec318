"""One test per acceptance criterion; each prints a [PASS]/[FAIL] line to the terminal."""

import subprocess
import sys
import time
from pathlib import Path

import pytest

from rzstrata import cli
from rzstrata import hermitian as hm
from rzstrata import verify as vf
from rzstrata import weyl as W

GOLDEN = Path(__file__).parent / "golden"
P = 3


@pytest.fixture
def announce(capsys):
    def _announce(n, ok, detail, elapsed):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail} ({elapsed:.1f} s)")
    return _announce


def test_criterion_01_tables(announce, capsys):
    mismatched = []
    for case in ("split", "inert"):
        for fmt, ext in (("text", "txt"), ("csv", "csv"), ("json", "json")):
            code = cli.main(["tables", "--case", case, "--format", fmt])
            out, _ = capsys.readouterr()
            if code != 0 or out != (GOLDEN / f"tables_{case}.{ext}").read_text():
                mismatched.append(f"{case}/{fmt}")
    # wall time of a fresh process per case, interpreter start-up included
    times = {}
    for case in ("split", "inert"):
        t = time.perf_counter()
        res = subprocess.run([sys.executable, "-m", "rzstrata.cli", "tables", "--case", case],
                             capture_output=True, check=True)
        times[case] = time.perf_counter() - t
        if res.stdout != (GOLDEN / f"tables_{case}.txt").read_bytes():
            mismatched.append(f"{case}/process")
    elapsed = max(times.values())
    ok = not mismatched and elapsed < 1.0
    announce(1, ok, f"tables byte-match golden files, mismatched={mismatched}, slowest case", elapsed)
    assert not mismatched
    assert elapsed < 1.0


def test_criterion_02_hermitian_counts(announce):
    t = time.perf_counter()
    got = {p: hm.count_isotropic_bruteforce(p, 1) for p in (3, 5)}
    formula = {p: (p ** 3 + 1) * (p ** 2 + 1) for p in (3, 5)}
    elapsed = time.perf_counter() - t
    ok = got == formula == {3: 280, 5: 3276} and elapsed < 10
    announce(2, ok, f"brute force {got} vs (p^3+1)(p^2+1) {formula}", elapsed)
    assert got == formula == {3: 280, 5: 3276}
    assert all(hm.hermitian_surface_count(p, 1) == formula[p] for p in (3, 5))
    assert elapsed < 10


def test_criterion_03_dl_partition(announce):
    t = time.perf_counter()
    counts = {}
    for m in (1, 2, 3):
        for side in ("minus", "plus"):
            c = hm.stratum_counts(P, m, side)
            assert sum(c.values()) == hm.hermitian_surface_count(P, m)
            counts[m, side] = c
    elapsed = time.perf_counter() - t
    shape_ok = all(
        (m != 1 or (c["w1"] == 0 and c["w2"] == 0))
        and (m != 2 or c["w2"] == 0)
        and (m != 3 or min(c.values()) > 0)
        for (m, _), c in counts.items()
    )
    ok = shape_ok and elapsed < 300
    announce(3, ok, f"minus m=3 {counts[3, 'minus']}, plus m=3 {counts[3, 'plus']}", elapsed)
    assert shape_ok
    assert counts[3, "minus"] == {"unit": 280, "w1": 80640, "w2": 466560}
    assert elapsed < 300


@pytest.mark.parametrize("m", [1, 2, 3])
def test_criterion_04_f1_f3(m, announce):
    t = time.perf_counter()
    reports = [vf.check_f1(P, m), vf.check_f3(P, m)]
    elapsed = time.perf_counter() - t
    ok = all(r.passed for r in reports)
    announce(4, ok, f"m={m}; " + "; ".join(r.line() for r in reports), elapsed)
    for r, tags in zip(reports, (vf.F1_TAGS, vf.F3_TAGS)):
        assert r.passed, r.witnesses[:5]
        y, lat = r.counts["y_side"], r.counts["lattice_side"]
        assert sum(y.values()) == hm.hermitian_surface_count(P, m)
        assert [y[k] for k in ("unit", "w1", "w2")] == [lat[t] for t in tags]


@pytest.mark.parametrize("m", [2, 3])
def test_criterion_05_vertex_hulls(m, announce):
    t = time.perf_counter()
    vertices = vf.local_vertices(P) if m == 2 else None
    r = vf.check_vertex_hulls(P, m, vertices)
    elapsed = time.perf_counter() - t
    ok = r.passed and r.counts["contradictions"] == 0
    announce(5, ok, f"m={m}; {r.line()}", elapsed)
    assert r.passed, r.witnesses[:5]
    assert r.counts["contradictions"] == 0


def test_criterion_06_split_suite(announce):
    t = time.perf_counter()
    r = vf.check_split(P, 2, 1)
    elapsed = time.perf_counter() - t
    announce(6, r.passed, r.line(), elapsed)
    assert r.passed, r.witnesses[:5]


def test_criterion_07_intersections(announce):
    t = time.perf_counter()
    r = vf.check_intersections(P, 2, 1)
    elapsed = time.perf_counter() - t
    nested = [c for c in r.counts["mixed"] if c["nested"]]
    announce(7, r.passed, f"{r.line()}; nested mixed pairs {len(nested)}", elapsed)
    assert r.passed, r.witnesses[:5]
    assert nested and all(c["common"] == P ** 4 + 1 and c["tau_fixed"] == P ** 2 + 1 for c in nested)
    assert all(n == 1 for n in r.counts["type1_pairs"] + r.counts["type3_pairs"] if n)


def test_criterion_08_weyl_oracles(announce):
    t = time.perf_counter()
    dist = W.bfs_lengths(6)
    length_ok = all(W.length(z) == d for z, d in dist.items())
    small = list(W.bfs_lengths(4))
    bruhat_ok = True
    for y in small:
        lower = W.bruhat_lower_set_by_deletion(y)
        bruhat_ok = bruhat_ok and all(W.bruhat_leq(x, y) == (x in lower) for x in small)
    adm_ok = W.adm() == W.permissible_set()
    elapsed = time.perf_counter() - t
    ok = length_ok and bruhat_ok and adm_ok and elapsed < 30
    announce(8, ok, f"{len(dist)} elements to length 6, |Adm|={len(W.adm())}", elapsed)
    assert length_ok and bruhat_ok and adm_ok
    assert elapsed < 30


def test_criterion_09_dimensions(announce):
    t = time.perf_counter()
    reports = [vf.compare_bt_adlv("split", P, 2), vf.compare_bt_adlv("inert", P, 3)]
    elapsed = time.perf_counter() - t
    ok = all(r.passed for r in reports)
    announce(9, ok, "; ".join(r.line() for r in reports), elapsed)
    for r in reports:
        assert r.passed, r.witnesses[:5]
    dims = [max(row["dimension"] for row in r.counts["rows"]) for r in reports]
    assert dims == [1, 2]


def test_criterion_10_open_question_reports(announce):
    t = time.perf_counter()
    reports = [vf.check_strict_tau_necessity(P, 2, 1), vf.type1_over_02_report(P)]
    elapsed = time.perf_counter() - t
    ok = all(r.passed and r.witnesses for r in reports)
    announce(10, ok, "; ".join(r.line() for r in reports), elapsed)
    for r in reports:
        assert r.passed
        assert r.witnesses
