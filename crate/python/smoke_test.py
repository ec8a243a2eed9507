"""Smoke test for the Python bindings.

Build the extension first, e.g. `maturin develop -m crates/python/Cargo.toml`
with the `extension-module` feature, then run `python python/smoke_test.py`.
"""

import os
import sys

import blockfree_py as bf

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT, "crates", "core", "fixtures")


def fixture(name):
    return os.path.join(FIXTURES, name)


def main():
    m0 = bf.Epda.load(fixture("running.epda"))
    assert m0 == bf.Epda.running_example()
    assert m0.is_dpda()
    assert [" ".join(w) for w in m0.language(5)] == ["b", "a a b b d"]
    assert not bf.lifelock_free(m0)
    print("input:", repr(m0), "marking", m0.marking)

    run = bf.run_pipeline(m0)
    assert run.ok, run.error
    assert len(run.stages) == len(bf.STEP_NAMES) == 13
    assert run.artifact(3).startswith("cfg")
    assert run.artifact(7).startswith("parser")
    m12 = run.output()
    assert bf.Epda.parse(m12.to_text(), lenient=True) == m12
    print(run.summary(), end="")

    report = bf.verify_solution(m0, m12, n=12, depth=60, horizon=40)
    print(report.render(), end="")
    assert report.passed and len(report.items) == 5
    assert bf.deadlock_free(m12) and bf.lifelock_free(m12) and bf.deterministic(m12)
    assert bf.equiv(m0, m12, 10) is None

    prefixes = bf.reach_prefixes(m0, 1)
    assert prefixes["p4"] == [] and prefixes["p3"] == [["$bot"]]
    pruned, removed = bf.prune(m0, 1)
    assert removed == ["p4"] and "p4" not in pruned.states

    small = bf.Epda("p", [("p", "a", ["$bot"], ["$bot"], "f")], ["f"])
    assert bf.solve(small).language(3) == [["a"]]

    try:
        bf.solve(bf.Epda.load(fixture("empty.epda")))
    except bf.EmptyLanguageError as e:
        print("empty:", e)
    else:
        raise AssertionError("empty language was not reported")

    try:
        bf.Epda.load(fixture("broken.epda"))
    except bf.ParseError as e:
        print("broken:", e)
    else:
        raise AssertionError("broken fixture parsed")

    print("smoke test ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
