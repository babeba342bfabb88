"""Smoke test for the qentropy Python extension.

Build and install first, e.g.
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/qentropy-*.whl
"""

import math

import qentropy


def column(vector):
    return [vector.exact(row) for row in qentropy.TABLE1_ROWS]


def main():
    for idx, tag in enumerate(["R0", "R1", "R2", "R3", "R4", "R5", "R6"]):
        group = qentropy.StabiliserGroup.named(tag)
        vec = group.entropy_vector()
        assert [n for n, d in column(vec)] == qentropy.TABLE1[idx], tag
        again = qentropy.StabiliserGroup.from_text(group.to_text()).entropy_vector()
        assert again.to_csv() == vec.to_csv(), tag

    expected = -(5 - 3 * math.log2(3)) / 2
    for vec in [qentropy.classical_counterexample(), qentropy.named_entropy("quantum_counterexample")]:
        margins = qentropy.check(vec, ["ingleton"])
        worst = min(bits for _, bits, _ in margins)
        assert abs(worst - expected) < 1e-9, worst
        assert all(ok for _, _, ok in qentropy.check(vec, ["quantum"]))

    pure = qentropy.random_pure_entropy([2, 3, 2], seed=7)
    assert abs(pure.bits("a") - pure.bits("bc")) < 1e-9

    rays = qentropy.extreme_rays(2, [[1, 0], [0, 1]])
    assert sorted(rays) == [[0, 1], [1, 0]], rays

    rays = qentropy.cone_rays("quantum-ingleton-4")
    assert len(rays) == 46
    assert qentropy.lift_to_pure(rays[0]) is not None

    passed, detail = qentropy.verify(8)
    assert passed, detail
    print("qentropy smoke test passed")


if __name__ == "__main__":
    main()
