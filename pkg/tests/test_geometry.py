"""Meshes, boundary faces, and boundary label partitions."""
from __future__ import annotations

import numpy as np
import pytest

from fhnet.errors import ValidationError
from fhnet.geometry import (BoundaryPartition, DomainSpec, EdgeRule,
                            PartitionSpec, all_to_all_partition, build_mesh,
                            build_boundary_partition, faces_for_pair,
                            interval, piece_measure, rectangle,
                            validate_domain, zero_flux_partition)


def test_interval_mesh_layout():
    mesh = build_mesh(interval(2.0, 5))
    assert mesh.dim == 1
    assert mesh.shape == (5,)
    assert mesh.spacing == (0.5,)
    np.testing.assert_allclose(mesh.coords[:, 0], [0.0, 0.5, 1.0, 1.5, 2.0])
    # trapezoid weights: half weight at the endpoints
    np.testing.assert_allclose(mesh.weights, [0.25, 0.5, 0.5, 0.5, 0.25])
    assert mesh.domain_measure == pytest.approx(2.0)
    assert mesh.n_nodes == 5


def test_interval_boundary_is_two_unit_atoms():
    mesh = build_mesh(interval(7.0, 9))
    assert len(mesh.faces) == 2
    assert [f.edge for f in mesh.faces] == ["left", "right"]
    assert [f.measure for f in mesh.faces] == [1.0, 1.0]
    assert mesh.boundary_measure == pytest.approx(2.0)
    assert mesh.faces[0].nodes == (0,)
    assert mesh.faces[1].nodes == (8,)
    np.testing.assert_array_equal(mesh.boundary_nodes, [0, 8])


def test_unit_square_4x4_faces():
    # 4x4 unit square: perimeter 4 split into 12 faces of measure 1/3
    mesh = build_mesh(rectangle(1.0, 1.0, 4, 4))
    assert mesh.domain_measure == pytest.approx(1.0)
    assert len(mesh.faces) == 12
    np.testing.assert_allclose([f.measure for f in mesh.faces],
                               np.full(12, 1.0 / 3.0), rtol=1e-12)
    assert mesh.boundary_measure == pytest.approx(4.0, rel=1e-12)


def test_rectangle_boundary_measure_is_perimeter():
    mesh = build_mesh(rectangle(2.0, 3.0, 5, 7))
    assert mesh.boundary_measure == pytest.approx(2.0 * (2.0 + 3.0), rel=1e-12)
    assert mesh.domain_measure == pytest.approx(6.0)


def test_rectangle_volume_weights_sum_to_area():
    mesh = build_mesh(rectangle(1.5, 0.5, 6, 4))
    assert float(np.sum(mesh.weights)) == pytest.approx(0.75, rel=1e-12)
    # corner node carries hx*hy/4
    hx, hy = mesh.spacing
    assert mesh.weights[0] == pytest.approx(hx * hy / 4.0, rel=1e-12)


def test_flat_index_is_x_major():
    mesh = build_mesh(rectangle(1.0, 1.0, 3, 4))
    assert mesh.flat_index(0, 0) == 0
    assert mesh.flat_index(0, 3) == 3
    assert mesh.flat_index(1, 0) == 4
    assert mesh.flat_index(2, 3) == 11
    np.testing.assert_allclose(mesh.coords[mesh.flat_index(2, 1)], [1.0, 1.0 / 3.0])


def test_interior_and_boundary_nodes_partition_the_mesh():
    mesh = build_mesh(rectangle(1.0, 1.0, 5, 5))
    assert len(mesh.boundary_nodes) == 16
    assert len(mesh.interior_nodes) == 9
    together = np.sort(np.concatenate([mesh.boundary_nodes,
                                       mesh.interior_nodes]))
    np.testing.assert_array_equal(together, np.arange(25))


@pytest.mark.parametrize("domain,message", [
    (DomainSpec("disk", (1.0,), (5,)), "unknown domain kind"),
    (DomainSpec("interval", (0.0,), (5,)), "lengths must be > 0"),
    (DomainSpec("interval", (1.0,), (1,)), "resolution must be >= 2"),
    (DomainSpec("rectangle", (1.0,), (5, 5)), "needs 2 length"),
])
def test_domain_validation(domain, message):
    with pytest.raises(ValidationError, match=message):
        validate_domain(domain)


# ---------------------------------------------------------------------------
# partitions


def test_zero_flux_partition_keeps_everything_reflexive():
    mesh = build_mesh(rectangle(1.0, 1.0, 4, 4))
    part = zero_flux_partition(mesh, 3)
    assert part.m == 3
    for i in range(3):
        assert np.all(part.partners[:, i] == i)
        # all of the boundary is the neuron's own zero-flux piece
        assert piece_measure(mesh, part, i, i) == pytest.approx(4.0, rel=1e-12)
    assert piece_measure(mesh, part, 0, 1) == 0.0


def test_all_to_all_two_neuron_square():
    mesh = build_mesh(rectangle(1.0, 1.0, 4, 4))
    part = all_to_all_partition(mesh)
    # whole perimeter is the exchange piece
    assert piece_measure(mesh, part, 0, 1) == pytest.approx(4.0, rel=1e-12)
    assert piece_measure(mesh, part, 0, 0) == 0.0
    assert len(faces_for_pair(mesh, part, 0, 1)) == 12


def test_all_to_all_requires_two_neurons():
    mesh = build_mesh(rectangle(1.0, 1.0, 4, 4))
    with pytest.raises(ValidationError, match="all_to_all preset requires"):
        build_boundary_partition(mesh, PartitionSpec(m=3, default="all_to_all"))


def test_bottom_edge_exchange_piece():
    # bottom edge couples neurons 1 and 2, the rest stays zero flux
    mesh = build_mesh(rectangle(1.0, 1.0, 5, 5))
    spec = PartitionSpec(m=2, rules=(EdgeRule("bottom", (2, 1)),))
    part = build_boundary_partition(mesh, spec)
    assert piece_measure(mesh, part, 0, 1) == pytest.approx(1.0, rel=1e-12)
    assert piece_measure(mesh, part, 0, 0) == pytest.approx(3.0, rel=1e-12)


def test_piece_measures_are_symmetric_and_total():
    mesh = build_mesh(rectangle(1.0, 2.0, 5, 7))
    spec = PartitionSpec(m=3, rules=(
        EdgeRule("bottom", (2, 1, 3)),
        EdgeRule("top", (3, 2, 1)),
    ))
    part = build_boundary_partition(mesh, spec)
    for i in range(3):
        total = sum(piece_measure(mesh, part, i, j) for j in range(3))
        assert total == pytest.approx(mesh.boundary_measure, rel=1e-12)
        for j in range(3):
            assert piece_measure(mesh, part, i, j) == pytest.approx(
                piece_measure(mesh, part, j, i), rel=1e-12)


def test_span_rule_splits_an_edge():
    mesh = build_mesh(rectangle(1.0, 1.0, 5, 5))
    spec = PartitionSpec(m=2, rules=(
        EdgeRule("bottom", (2, 1), span=(0.0, 0.5)),
    ))
    part = build_boundary_partition(mesh, spec)
    assert piece_measure(mesh, part, 0, 1) == pytest.approx(0.5, rel=1e-12)


def test_span_must_align_with_mesh_nodes():
    mesh = build_mesh(rectangle(1.0, 1.0, 5, 5))
    spec = PartitionSpec(m=2, rules=(
        EdgeRule("bottom", (2, 1), span=(0.0, 0.4)),
    ))
    with pytest.raises(ValidationError, match="spans must align"):
        build_boundary_partition(mesh, spec)


def test_unknown_edge_rejected():
    mesh = build_mesh(interval(1.0, 5))
    spec = PartitionSpec(m=2, rules=(EdgeRule("bottom", (2, 1)),))
    with pytest.raises(ValidationError, match="unknown edge 'bottom'"):
        build_boundary_partition(mesh, spec)


def test_table_length_must_match_network_size():
    mesh = build_mesh(interval(1.0, 5))
    spec = PartitionSpec(m=3, rules=(EdgeRule("left", (2, 1)),))
    with pytest.raises(ValidationError, match="partner for each"):
        build_boundary_partition(mesh, spec)


def test_table_entries_must_be_in_range():
    mesh = build_mesh(interval(1.0, 5))
    spec = PartitionSpec(m=2, rules=(EdgeRule("left", (3, 1)),))
    with pytest.raises(ValidationError, match=r"entries must lie in 1\.\.2"):
        build_boundary_partition(mesh, spec)


def test_non_involutive_table_rejected():
    mesh = build_mesh(rectangle(1.0, 1.0, 4, 4))
    # 1 -> 2 but 2 -> 3: not an involution
    spec = PartitionSpec(m=3, rules=(EdgeRule("bottom", (2, 3, 1)),))
    with pytest.raises(ValidationError, match="not .*involutive"):
        build_boundary_partition(mesh, spec)


def test_rule_matching_no_face_rejected():
    mesh = build_mesh(rectangle(1.0, 1.0, 5, 5))
    spec = PartitionSpec(m=2, rules=(
        EdgeRule("bottom", (2, 1), span=(0.25, 0.25)),
    ))
    with pytest.raises(ValidationError, match="matches no face"):
        build_boundary_partition(mesh, spec)


def test_unlabeled_faces_rejected_without_default():
    mesh = build_mesh(rectangle(1.0, 1.0, 4, 4))
    spec = PartitionSpec(m=2, default=None,
                         rules=(EdgeRule("bottom", (2, 1)),))
    with pytest.raises(ValidationError, match="has no label"):
        build_boundary_partition(mesh, spec)


def test_rules_override_the_default():
    mesh = build_mesh(rectangle(1.0, 1.0, 4, 4))
    spec = PartitionSpec(m=2, default="all_to_all",
                         rules=(EdgeRule("top", (1, 2)),))
    part = build_boundary_partition(mesh, spec)
    assert piece_measure(mesh, part, 0, 1) == pytest.approx(3.0, rel=1e-12)


def test_partition_rejects_small_networks():
    mesh = build_mesh(interval(1.0, 5))
    with pytest.raises(ValidationError, match="m must be >= 2"):
        build_boundary_partition(mesh, PartitionSpec(m=1))


def test_explicit_partners_roundtrip():
    mesh = build_mesh(interval(1.0, 5))
    spec = PartitionSpec(m=2, rules=(
        EdgeRule("left", (2, 1)), EdgeRule("right", (2, 1))))
    part = build_boundary_partition(mesh, spec)
    assert isinstance(part, BoundaryPartition)
    np.testing.assert_array_equal(part.partners, [[1, 0], [1, 0]])
