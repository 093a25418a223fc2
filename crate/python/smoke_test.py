"""Smoke test for the `bhs` extension module.

Build it first with `cargo build --release -p bhs-py`. The script imports an
installed `bhs` if there is one, otherwise the freshly built library from
target/release (or the path in BHS_LIB).
"""

import importlib.machinery
import importlib.util
import json
import os
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import bhs

        return bhs
    except ImportError:
        pass
    path = os.environ.get("BHS_LIB")
    if path is None:
        for build in ("release", "debug"):
            candidate = ROOT / "target" / build / "libbhs.so"
            if candidate.exists():
                path = str(candidate)
                break
    if path is None:
        sys.exit("bhs extension not found; run `cargo build --release -p bhs-py`")
    loader = importlib.machinery.ExtensionFileLoader("bhs", path)
    spec = importlib.util.spec_from_file_location("bhs", path, loader=loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def main():
    bhs = load()

    s = bhs.Scenario("ring1", 7, [2, 4, 5])
    trace = s.run()
    verdict = trace.verdict()
    assert verdict["success"], verdict
    assert trace.dead == 2
    assert trace.violations() == []
    assert trace.reproduces()

    back = bhs.Trace.from_jsonl(trace.to_jsonl())
    assert back.verdict() == verdict
    assert bhs.Scenario.from_json(s.to_json()) == s

    s3 = bhs.Scenario("ring3", 9, [1, 3, 5, 6, 8], labeling="ccacaacac")
    v3 = bhs.run(s3).verdict()
    assert v3["success"] and v3["dead_count"] == 4, v3

    report = bhs.sweep("ring2", 5, 8, mode="oriented", jobs=2)
    assert report["scenarios"] == report["successes"] > 0, report
    assert report["traces_with_violations"] == 0

    hit = bhs.adversary("ring1", 2, nmax=8)
    assert hit is not None and not hit.run().verdict()["success"]

    for c in bhs.construction("mirror-four", t=2, x=1):
        assert not c.run().verdict()["success"]

    assert bhs.dump("ring3").startswith("automaton BHS-Ring-3")

    try:
        bhs.Scenario("ring2", 5, [0, 1, 2, 3])
    except ValueError as e:
        assert "black hole" in str(e), e
    else:
        raise AssertionError("homebase on the black hole accepted")

    print(json.dumps({"ring1": verdict, "ring2_scenarios": report["scenarios"]}))
    print("smoke test passed")


if __name__ == "__main__":
    main()
