"""Uniform tensor meshes, boundary faces, and boundary label partitions.

The domain is an interval or an axis-aligned rectangle.  Its boundary is
decomposed into faces: in 2D each face is the segment between two adjacent
boundary nodes on one edge; in 1D the two endpoint atoms are the faces,
carrying counting measure 1 each so that |Gamma| = 2 for any interval.

A BoundaryPartition assigns to every face f and neuron i a partner neuron
partners[f, i] = j, meaning u_i exchanges flux with u_j across f (j == i
means zero flux there).  The assignment must be involutive face by face:
partners[f, partners[f, i]] == i.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

_EDGES_1D = ("left", "right")
_EDGES_2D = ("left", "right", "bottom", "top")
_SPAN_TOL = 1e-9


@dataclass(frozen=True)
class DomainSpec:
    """Shape, physical lengths, and node counts of the computational domain."""

    kind: str                       # "interval" | "rectangle"
    lengths: tuple[float, ...]
    resolution: tuple[int, ...]     # nodes per axis


def interval(length: float, n: int) -> DomainSpec:
    return DomainSpec(kind="interval", lengths=(float(length),),
                      resolution=(int(n),))


def rectangle(lx: float, ly: float, nx: int, ny: int) -> DomainSpec:
    return DomainSpec(kind="rectangle", lengths=(float(lx), float(ly)),
                      resolution=(int(nx), int(ny)))


def validate_domain(domain: DomainSpec) -> DomainSpec:
    if domain.kind not in ("interval", "rectangle"):
        raise ValidationError(f"unknown domain kind '{domain.kind}'")
    dim = 1 if domain.kind == "interval" else 2
    if len(domain.lengths) != dim or len(domain.resolution) != dim:
        raise ValidationError(
            f"{domain.kind} needs {dim} length(s) and {dim} resolution(s)")
    for length in domain.lengths:
        if not length > 0:
            raise ValidationError("domain lengths must be > 0")
    for n in domain.resolution:
        if n < 2:
            raise ValidationError("resolution must be >= 2 nodes per axis")
    return domain


@dataclass(frozen=True)
class BoundaryFace:
    """One boundary face: its edge, nodes, and quadrature weights.

    `span` is the extent of the face along its edge's running coordinate
    (x for bottom/top, y for left/right); 1D endpoint atoms carry a
    degenerate span at the endpoint location.
    """

    index: int
    edge: str
    nodes: tuple[int, ...]
    node_weights: tuple[float, ...]
    measure: float
    span: tuple[float, float]


@dataclass(frozen=True)
class Mesh:
    """Uniform tensor-product mesh with trapezoid quadrature weights."""

    dim: int
    lengths: tuple[float, ...]
    shape: tuple[int, ...]
    spacing: tuple[float, ...]
    coords: np.ndarray              # (n_nodes, dim)
    weights: np.ndarray             # (n_nodes,) volume quadrature
    axis_weights: tuple[np.ndarray, ...]
    faces: tuple[BoundaryFace, ...]
    boundary_nodes: np.ndarray
    interior_nodes: np.ndarray
    domain_measure: float
    boundary_measure: float

    @property
    def n_nodes(self) -> int:
        return self.weights.size

    def flat_index(self, *multi: int) -> int:
        """Flat node id for per-axis indices (C order, x-major)."""
        if self.dim == 1:
            return multi[0]
        return multi[0] * self.shape[1] + multi[1]


def _axis_trapezoid(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = h / 2.0
    return w


def build_mesh(domain: DomainSpec) -> Mesh:
    """Construct the mesh, quadrature weights, and boundary faces."""
    validate_domain(domain)
    dim = len(domain.lengths)
    shape = tuple(domain.resolution)
    spacing = tuple(L / (n - 1) for L, n in zip(domain.lengths, shape))
    axes = [np.linspace(0.0, L, n) for L, n in zip(domain.lengths, shape)]

    if dim == 1:
        coords = axes[0][:, None]
        axis_weights = (_axis_trapezoid(shape[0], spacing[0]),)
        weights = axis_weights[0].copy()
    else:
        gx, gy = np.meshgrid(axes[0], axes[1], indexing="ij")
        coords = np.column_stack([gx.ravel(), gy.ravel()])
        axis_weights = (_axis_trapezoid(shape[0], spacing[0]),
                        _axis_trapezoid(shape[1], spacing[1]))
        weights = np.outer(axis_weights[0], axis_weights[1]).ravel()

    faces = _build_faces(dim, shape, spacing, axes)

    if dim == 1:
        boundary = np.array([0, shape[0] - 1])
    else:
        nx, ny = shape
        ids = np.arange(nx * ny).reshape(nx, ny)
        boundary = np.unique(np.concatenate([
            ids[0, :], ids[-1, :], ids[:, 0], ids[:, -1]]))
    all_ids = np.arange(int(np.prod(shape)))
    interior = np.setdiff1d(all_ids, boundary)

    return Mesh(dim=dim, lengths=tuple(domain.lengths), shape=shape,
                spacing=spacing, coords=coords, weights=weights,
                axis_weights=axis_weights, faces=tuple(faces),
                boundary_nodes=boundary, interior_nodes=interior,
                domain_measure=float(np.prod(domain.lengths)),
                boundary_measure=float(sum(f.measure for f in faces)))


def _build_faces(dim, shape, spacing, axes) -> list[BoundaryFace]:
    faces: list[BoundaryFace] = []
    if dim == 1:
        n = shape[0]
        L = axes[0][-1]
        # endpoint atoms with counting measure 1
        faces.append(BoundaryFace(0, "left", (0,), (1.0,), 1.0, (0.0, 0.0)))
        faces.append(BoundaryFace(1, "right", (n - 1,), (1.0,), 1.0, (L, L)))
        return faces

    nx, ny = shape
    hx, hy = spacing
    x, y = axes

    def flat(ix, iy):
        return ix * ny + iy

    index = 0
    for edge in _EDGES_2D:
        if edge in ("left", "right"):
            ix = 0 if edge == "left" else nx - 1
            for k in range(ny - 1):
                nodes = (flat(ix, k), flat(ix, k + 1))
                faces.append(BoundaryFace(index, edge, nodes,
                                          (hy / 2.0, hy / 2.0), hy,
                                          (y[k], y[k + 1])))
                index += 1
        else:
            iy = 0 if edge == "bottom" else ny - 1
            for k in range(nx - 1):
                nodes = (flat(k, iy), flat(k + 1, iy))
                faces.append(BoundaryFace(index, edge, nodes,
                                          (hx / 2.0, hx / 2.0), hx,
                                          (x[k], x[k + 1])))
                index += 1
    return faces


# ---------------------------------------------------------------------------
# boundary partitions


@dataclass(frozen=True)
class EdgeRule:
    """Partner table for (part of) one edge; table entries are 1-based."""

    edge: str
    table: tuple[int, ...]
    span: tuple[float, float] | None = None


@dataclass(frozen=True)
class PartitionSpec:
    """Declarative description of a boundary partition.

    `default` seeds every face: "zero_flux" (all partners identity) or
    "all_to_all" (two-neuron exchange on the whole boundary).  Rules are
    applied in order on top and may override earlier assignments.
    """

    m: int
    default: str | None = "zero_flux"
    rules: tuple[EdgeRule, ...] = ()


@dataclass(frozen=True)
class BoundaryPartition:
    """Resolved face-by-face partner assignment; partners are 0-based."""

    m: int
    partners: np.ndarray            # (n_faces, m) int


def build_boundary_partition(mesh: Mesh, spec: PartitionSpec) -> BoundaryPartition:
    """Resolve a PartitionSpec against a mesh and validate it.

    Raises ValidationError for unknown edges, tables of the wrong length,
    non-involutive tables, spans that cut through a face, or faces left
    without a label for some neuron.
    """
    if spec.m < 2:
        raise ValidationError("m must be >= 2")
    n_faces = len(mesh.faces)
    partners = np.full((n_faces, spec.m), -1, dtype=int)

    if spec.default == "zero_flux":
        partners[:] = np.arange(spec.m)
    elif spec.default == "all_to_all":
        if spec.m != 2:
            raise ValidationError(
                "all_to_all preset requires m == 2; give explicit edge "
                "rules for larger networks")
        partners[:] = [1, 0]
    elif spec.default is not None:
        raise ValidationError(f"unknown partition default '{spec.default}'")

    edge_names = _EDGES_1D if mesh.dim == 1 else _EDGES_2D
    for rule in spec.rules:
        if rule.edge not in edge_names:
            raise ValidationError(f"unknown edge '{rule.edge}'")
        if len(rule.table) != spec.m:
            raise ValidationError(
                f"edge '{rule.edge}': table must list a partner for each "
                f"of the {spec.m} neurons")
        table = _validated_table(rule)
        hit = False
        for f in mesh.faces:
            if f.edge != rule.edge:
                continue
            inside = _face_in_span(f, rule.span)
            if inside is None:
                raise ValidationError(
                    f"edge '{rule.edge}': span {rule.span} cuts through the "
                    f"face [{f.span[0]:g}, {f.span[1]:g}]; spans must align "
                    "with mesh nodes")
            if inside:
                partners[f.index] = table
                hit = True
        if not hit:
            raise ValidationError(
                f"edge '{rule.edge}': rule matches no face")

    for f in mesh.faces:
        for i in range(spec.m):
            j = partners[f.index, i]
            if j < 0:
                raise ValidationError(
                    f"face {f.index} on edge '{f.edge}' has no label for "
                    f"neuron {i + 1}")
            if partners[f.index, j] != i:
                raise ValidationError(
                    f"face {f.index} on edge '{f.edge}': table is not "
                    f"involutive at neurons {i + 1} -> {j + 1} -> "
                    f"{partners[f.index, j] + 1}")

    return BoundaryPartition(m=spec.m, partners=partners)


def _validated_table(rule: EdgeRule) -> np.ndarray:
    m = len(rule.table)
    table = np.asarray(rule.table, dtype=int) - 1   # 1-based -> 0-based
    if np.any(table < 0) or np.any(table >= m):
        raise ValidationError(
            f"edge '{rule.edge}': table entries must lie in 1..{m}")
    return table


def _face_in_span(face: BoundaryFace, span) -> bool | None:
    """True if the face lies in the span, False if outside, None if cut."""
    if span is None:
        return True
    a, b = min(span), max(span)
    s0, s1 = face.span
    if s0 >= a - _SPAN_TOL and s1 <= b + _SPAN_TOL:
        return True
    if s1 <= a + _SPAN_TOL or s0 >= b - _SPAN_TOL:
        return False
    return None


def piece_measure(mesh: Mesh, partition: BoundaryPartition,
                  i: int, j: int) -> float:
    """Measure of the boundary piece where neuron i is labeled with j.

    piece_measure(mesh, part, i, i) is the zero-flux piece of neuron i;
    summing over j returns the full boundary measure.
    """
    total = 0.0
    for f in mesh.faces:
        if partition.partners[f.index, i] == j:
            total += f.measure
    return total


def faces_for_pair(mesh: Mesh, partition: BoundaryPartition,
                   i: int, j: int) -> list[BoundaryFace]:
    """Faces across which neurons i and j exchange flux."""
    return [f for f in mesh.faces if partition.partners[f.index, i] == j]


def zero_flux_partition(mesh: Mesh, m: int) -> BoundaryPartition:
    return build_boundary_partition(mesh, PartitionSpec(m=m, default="zero_flux"))


def all_to_all_partition(mesh: Mesh) -> BoundaryPartition:
    return build_boundary_partition(
        mesh, PartitionSpec(m=2, default="all_to_all"))
