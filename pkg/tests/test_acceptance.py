"""End-to-end acceptance: every numbered check in the verification
registry must pass within its time budget.

One status line is printed per criterion through the capture-disabled
stream so it shows up in a plain `pytest -v` run.
"""

import pytest

from curvametric.verification import run_check

BUDGETS = {
    "circle-equality": 1.0,
    "sphere-equality": 30.0,
    "ellipsoid-minimality": 30.0,
    "menger-oracle": 120.0,
    "menger-beta": 120.0,
    "beta-decay": 10.0,
    "ahlfors-regularity": 60.0,
    "simplex-identities": 30.0,
    "grassmann-constants": 30.0,
    "graph-sobolev": 120.0,
    "invariance": 60.0,
}


def _run(name, capfd):
    res = run_check(name)
    with capfd.disabled():
        print(
            "criterion %2d %-22s %s  [%6.2fs]  %s"
            % (
                res.criterion,
                res.name,
                "PASS" if res.passed else "FAIL",
                res.elapsed,
                res.detail,
            ),
            flush=True,
        )
    assert res.passed, "criterion %d (%s) failed: %s" % (res.criterion, name, res.detail)
    budget = BUDGETS[name]
    assert res.elapsed < budget, (
        "criterion %d (%s) took %.2fs, budget %.0fs"
        % (res.criterion, name, res.elapsed, budget)
    )


def test_criterion_01_circle_equality(capfd):
    _run("circle-equality", capfd)


def test_criterion_02_sphere_equality(capfd):
    _run("sphere-equality", capfd)


def test_criterion_03_ellipsoid_minimality(capfd):
    _run("ellipsoid-minimality", capfd)


def test_criterion_04_menger_oracle(capfd):
    _run("menger-oracle", capfd)


def test_criterion_05_menger_beta(capfd):
    _run("menger-beta", capfd)


def test_criterion_06_beta_decay(capfd):
    _run("beta-decay", capfd)


def test_criterion_07_ahlfors_regularity(capfd):
    _run("ahlfors-regularity", capfd)


def test_criterion_08_simplex_identities(capfd):
    _run("simplex-identities", capfd)


def test_criterion_09_grassmann_constants(capfd):
    _run("grassmann-constants", capfd)


def test_criterion_10_graph_sobolev(capfd):
    _run("graph-sobolev", capfd)


def test_criterion_11_invariance(capfd):
    _run("invariance", capfd)
