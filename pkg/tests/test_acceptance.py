"""One test per built-in verification scenario, printed as PASS/FAIL
lines.

The scenarios run once for the whole module.  Eleven must pass; the
all-pairs boundary pairing identity is a strict expected failure (the
cross term it assumes away is symmetric, not antisymmetric, so it does
not cancel on partitions where pairs exchange on their own pieces), and
a sibling test checks the partition-matched identity that does hold.
"""
from __future__ import annotations

import numpy as np
import pytest

from fhnet.acceptance import run_scenarios
from fhnet.diagnostics import boundary_pairing_sums
from fhnet.geometry import (EdgeRule, PartitionSpec, build_boundary_partition,
                            build_mesh, rectangle)


@pytest.fixture(scope="module")
def results():
    return {r.name: r for r in run_scenarios()}


def _check(results, capsys, name):
    r = results[name]
    with capsys.disabled():
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: {r.detail}")
        if r.note:
            print(f"  note: {r.note}")
    assert r.passed, f"{r.name}: {r.detail}"


def test_operator_structure(results, capsys):
    _check(results, capsys, "operator_structure")


def test_manufactured_solution_orders(results, capsys):
    _check(results, capsys, "manufactured_solution_orders")


def test_ode_reduction(results, capsys):
    _check(results, capsys, "ode_reduction")


def test_identical_neuron_symmetry(results, capsys):
    _check(results, capsys, "identical_neuron_symmetry")


def test_dissipative_absorbing_ball(results, capsys):
    _check(results, capsys, "dissipative_absorbing_ball")


def test_gronwall_energy_structure(results, capsys):
    _check(results, capsys, "gronwall_energy_structure")


def test_constants_regression(results, capsys):
    _check(results, capsys, "constants_regression")


def test_poincare_discrete_gap(results, capsys):
    _check(results, capsys, "poincare_discrete_gap")


@pytest.mark.xfail(strict=True, reason="the all-pairs form assumes a cross "
                   "term cancels, but that term is symmetric under swapping "
                   "the pair and only vanishes when every pair exchanges "
                   "over the whole boundary")
def test_boundary_pairing_identity(results, capsys):
    _check(results, capsys, "boundary_pairing_identity")


def test_partition_matched_pairing_identity(results):
    # sibling of the expected failure above: pairing each exchange piece
    # with its own pair of neurons does reproduce the double sum
    mesh = build_mesh(rectangle(1.0, 1.0, 9, 9))
    specs = {
        2: PartitionSpec(m=2, default="all_to_all"),
        3: PartitionSpec(m=3, default="zero_flux",
                         rules=(EdgeRule(edge="bottom", table=(2, 1, 3)),
                                EdgeRule(edge="top", table=(1, 3, 2)),
                                EdgeRule(edge="left", table=(3, 2, 1)))),
        4: PartitionSpec(m=4, default="zero_flux",
                         rules=(EdgeRule(edge="bottom", table=(2, 1, 4, 3)),
                                EdgeRule(edge="top", table=(4, 3, 2, 1)),
                                EdgeRule(edge="left", table=(3, 4, 1, 2)))),
    }
    worst = 0.0
    for k in range(12):
        m = (2, 3, 4)[k % 3]
        part = build_boundary_partition(mesh, specs[m])
        u = np.random.default_rng([909, k]).normal(size=(m, mesh.n_nodes))
        sums = boundary_pairing_sums(u, mesh, part)
        worst = max(worst, abs(sums["double_sum"] - sums["paired_pieces"])
                    / abs(sums["double_sum"]))
    assert worst <= 1e-10


def test_synchronization_threshold(results, capsys):
    _check(results, capsys, "synchronization_threshold")


def test_decay_rate_fitter(results, capsys):
    _check(results, capsys, "decay_rate_fitter")


def test_deterministic_outputs(results, capsys):
    _check(results, capsys, "deterministic_outputs")


def test_exactly_one_expected_failure(results):
    failed = [name for name, r in results.items() if not r.passed]
    assert failed == ["boundary_pairing_identity"]
