"""Acceptance criteria: one suite per criterion, each with its tolerance
checks (inside the suite) and its wall-clock budget in seconds.

Run with ``pytest tests/test_acceptance.py -v`` to see one PASS/FAIL line
per criterion.
"""

import pytest

from diffgeo import suites

CRITERIA = [
    (1, "helix", 1),
    (2, "fenchel", 30),
    (3, "fary-milnor", 5),
    (4, "dna", 20),
    (5, "umlaufsatz", 10),
    (6, "crofton", 30),
    (7, "reconstruction", 20),
    (8, "surface-oracles", 10),
    (9, "shape-operator", 20),
    (10, "geodesic", 30),
    (11, "usov", 30),
    (12, "gauss-bonnet", 60),
    (13, "holonomy", 20),
    (14, "jacobi", 60),
    (15, "comparison", 300),
    (16, "busemann", 60),
]


@pytest.mark.parametrize("number,name,budget", CRITERIA, ids=[f"{n:02d}-{s}" for n, s, _ in CRITERIA])
def test_criterion(number, name, budget, capsys):
    result = suites.run_suite(name, seed=0)
    with capsys.disabled():
        print(f"\n  criterion {number:2d} {result.line()} budget={budget}s")
    assert result.passed, result.details
    assert result.seconds < budget
