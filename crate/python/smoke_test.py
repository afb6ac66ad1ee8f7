"""Smoke test for the reskit extension module; run after `maturin develop -m crates/reskit-py/Cargo.toml`."""

import json
import pathlib

import reskit

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "crates" / "reskit-core" / "fixtures"


def main():
    segments = reskit.Family([[[0], [1]], [[0], [1]]])
    cert = segments.residue()
    assert cert.determinant == "a0*b1*x - a1*b0*x", cert.determinant
    assert abs(cert.cdeg) == 1

    second = reskit.Family([[[0, 0], [1, 0]], [[0, 0], [1, 0], [0, 1]], [[0, 0], [1, 1]]])
    assert second.is_essential() and not second.is_exceptional()
    part = second.partition()
    assert part.violation() is None
    assert part.strategy == "dim2"
    cert = part.residue()
    assert cert.determinant == "a1*b2*c0*x*y + a0*b1*c1*x^2*y - a1*b0*c1*x^2*y", cert.determinant
    assert cert.support == [[1, 1], [2, 1]]
    assert second.residue().planar_case == "PartiallyUnmixed2a"
    assert json.loads(cert.to_json())["cdeg"] == 1

    first = reskit.Family.from_json((FIXTURES / "example1.json").read_text())
    assert first.residue(seed=5).cdeg == 1

    third = reskit.Family.from_json((FIXTURES / "example3.json").read_text())
    assert third.is_exceptional()
    try:
        third.partition()
    except reskit.ExceptionalFamilyError:
        pass
    else:
        raise AssertionError("exceptional family was partitioned")

    bad = segments.partition_from_cells([[[[0]], [[1]]], [[[1]], [[0]]]])
    assert bad.violation() is not None
    try:
        bad.cdeg()
    except reskit.IncompatibleError:
        pass
    else:
        raise AssertionError("incompatible partition has a degree")

    assert reskit.canonical([[0, 0, 1], [1, 0, 1], [0, 0, 1]]) == ([1], [0, 1])
    assert reskit.admissible([[0, 1, 0], [1, 1, 0], [1, 0, 0]]) == [[2]]
    print("smoke test passed")


if __name__ == "__main__":
    main()
