"""Smoke test for the ldic extension module.

Uses an installed `ldic` when importable, otherwise the library built by
`cargo build -p ldic-py --features extension-module`.
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import ldic

        return ldic
    except ImportError:
        pass
    for profile in ("release", "debug"):
        built = ROOT / "target" / profile / "libldic.so"
        if built.exists():
            tmp = pathlib.Path(tempfile.mkdtemp())
            target = tmp / "ldic.so"
            shutil.copy(built, target)
            spec = importlib.util.spec_from_file_location("ldic", target)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("ldic not built: cargo build -p ldic-py --features extension-module")


def main():
    ldic = load()

    many_to_one = ldic.GainMatrix(3, [(1, 1, 1), (2, 2, 1), (3, 3, 1), (1, 2, 1), (3, 2, 1)])
    assert many_to_one.levels == 1
    assert ldic.classify(many_to_one) == [([1, 2, 3], "other")]
    assert ldic.oracle(many_to_one)["sum"] == 2
    run = ldic.simulate(many_to_one)
    assert run["decodable"] and run["sum"] <= 2

    hub = ldic.GainMatrix.parse("K = 3\nlinks = [[1,1,2],[2,2,1],[3,3,1],[1,2,1],[1,3,1]]\n")
    run = ldic.simulate(hub)
    assert run["rates"] == [1, 1, 1], run
    assert run["cases"][0] == "hub"
    assert ldic.view(many_to_one, "R2")[(3, 2)] == 1

    classes = ldic.enumerate_classes()
    assert len(classes) == 16 and sum(c[1] for c in classes) == 64

    replays = {r["label"]: r for r in ldic.counterexamples()}
    assert len(replays) == 11
    assert replays["g"]["passed"]
    assert replays["h"]["failed_steps"] == ["oracle-matches"]

    assert ldic.search_universal("e") == "infeasible"
    assert ldic.search_universal("p") == "feasible"

    chain = ldic.GainMatrix(4, [(1, 1, 1), (2, 2, 1), (3, 3, 1), (4, 4, 1), (1, 2, 1), (4, 2, 1), (3, 4, 1)])
    assert ldic.genie_reduce(chain) == ([1, 2, 4], "partial-degree")

    wide = ldic.GainMatrix(2, [(1, 1, 7), (2, 2, 7), (1, 2, 7)])
    try:
        ldic.oracle(wide)
    except ldic.GuardRefused:
        pass
    else:
        raise AssertionError("oracle should refuse q = 7")
    try:
        ldic.GainMatrix(2, [(1, 1, 1)])
    except ValueError:
        pass
    else:
        raise AssertionError("missing direct link accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
