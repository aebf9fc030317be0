import csv
import io

from blindvass.reductions import TreeSet
from blindvass.suites import (
    ExperimentConfig,
    bench,
    run_suite,
    shrink,
    suite_a2law,
    suite_cross,
    suite_extremal,
)


def test_t2_exhaustive_depth_two():
    report = run_suite(ExperimentConfig("t2", max_depth=2))
    assert len(report.records) == 128 and report.failed == 0


def test_t1_small_random():
    report = run_suite(ExperimentConfig("t1", max_depth=3, samples=20, seed=4))
    assert report.failed == 0 and len(report.records) == 128 + 4 + 20


def test_cross_small():
    report = suite_cross(ExperimentConfig("cross", max_depth=3, samples=6), a2_depth=4)
    assert report.failed == 0 and report.passed == 2 * (4 + 6)


def test_reports_are_deterministic():
    a = run_suite(ExperimentConfig("t1", max_depth=3, samples=10, seed=9))
    b = run_suite(ExperimentConfig("t1", max_depth=3, samples=10, seed=9))
    c = run_suite(ExperimentConfig("t1", max_depth=3, samples=10, seed=10))
    assert a.dumps(with_timings=False) == b.dumps(with_timings=False)
    assert a.dumps(with_timings=False) != c.dumps(with_timings=False)


def test_small_suites_pass():
    assert suite_a2law(ExperimentConfig("a2law", samples=5), depth=4).failed == 0
    assert suite_extremal(ExperimentConfig("extremal"), top=5).failed == 0
    assert run_suite(ExperimentConfig("orders", max_depth=3)).failed == 0


def test_shrink_finds_small_case():
    X = TreeSet.of(4, ["", "L", "RR", "RLR", "LLLL"])
    # pretend anything containing RR with at least three phases fails
    fails = lambda Y, n: n >= 3 and "RR" in Y.members
    Y, n = shrink(X, 5, fails)
    assert (Y.members, n, Y.depth) == ({"RR"}, 3, 2)


def test_unknown_suite():
    import pytest

    with pytest.raises(ValueError):
        run_suite(ExperimentConfig("nope"))


def test_bench_rows():
    report, table = bench(ExperimentConfig("bench"), symbolic_phases=(0, 40), oracle_phases=(0, 8))
    rows = list(csv.DictReader(io.StringIO(table)))
    assert [r["task"] for r in rows] == ["symbolic_a1", "symbolic_a1", "oracle_good_steps", "oracle_branch_hits",
                                        "oracle_good_steps", "oracle_branch_hits"]
    assert rows[0]["value"] == "0" and rows[0]["counter_bits"] == "0"
    assert 815 <= int(rows[1]["counter_bits"]) <= 820
    assert report.failed == 0
