"""Discrete diffusion operators with flux-exchange boundary rows, and the
quadrature functionals used by the energy diagnostics.

Spatial discretization is second-order finite differences on the uniform
tensor mesh.  Boundary rows come from ghost-node elimination of the flux
condition du_i/dn + p*u_i = p*u_j, which for a boundary node b with inward
neighbour b' reads (2/h^2)(u_i(b') - u_i(b)) + (2p/h)(u_j(b) - u_i(b)) in
1D normal direction (tangential second differences unchanged in 2D).

All matrices are stored mass-scaled: with W = diag(volume weights), the
stored S satisfies  (nodal action) = W^{-1} (S u + coupling terms), which
makes S symmetric and the full network operator symmetric negative
semidefinite.  The quadratic form identity

    sum_i <S_i u_i, u_i> + cross terms
        = -d * sum_i |grad u_i|^2 - d*p * sum_{i<j} int_{Gamma_ij} (u_i-u_j)^2

holds exactly in exact arithmetic and is pinned by the operator tests.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .geometry import BoundaryPartition, Mesh
from .params import ModelParams

_POWERS = (1, 2, 4)


# ---------------------------------------------------------------------------
# quadrature functionals


def volume_integral(mesh: Mesh, field: np.ndarray, power: int = 1) -> float:
    """Trapezoid quadrature of field^power over the domain (power 1, 2 or 4)."""
    if power not in _POWERS:
        raise ValueError(f"power must be one of {_POWERS}")
    return float(np.dot(mesh.weights, np.asarray(field) ** power))


def boundary_integral_sq(mesh: Mesh, field: np.ndarray,
                         partition: BoundaryPartition | None = None,
                         neuron: int | None = None,
                         partner: int | None = None) -> float:
    """Face-wise trapezoid quadrature of field^2 over the boundary.

    With partition/neuron/partner given, the integral is restricted to the
    faces where `neuron` is labeled with `partner` (the piece Gamma_ij).
    """
    restrict = partition is not None
    if restrict and (neuron is None or partner is None):
        raise ValueError("restricted integral needs neuron and partner")
    total = 0.0
    for f in mesh.faces:
        if restrict and partition.partners[f.index, neuron] != partner:
            continue
        for node, wt in zip(f.nodes, f.node_weights):
            total += wt * float(field[node]) ** 2
    return total


def boundary_product_integral(mesh: Mesh, g: np.ndarray, h: np.ndarray,
                              partition: BoundaryPartition | None = None,
                              neuron: int | None = None,
                              partner: int | None = None) -> float:
    """Face-wise trapezoid quadrature of g*h over (a piece of) the boundary."""
    restrict = partition is not None
    if restrict and (neuron is None or partner is None):
        raise ValueError("restricted integral needs neuron and partner")
    total = 0.0
    for f in mesh.faces:
        if restrict and partition.partners[f.index, neuron] != partner:
            continue
        for node, wt in zip(f.nodes, f.node_weights):
            total += wt * float(g[node]) * float(h[node])
    return total


def grad_norm_sq(mesh: Mesh, field: np.ndarray) -> float:
    """Discrete |grad field|^2: link differences with trapezoid transverse
    weights; exactly the quadratic form of the scaled stiffness matrix."""
    if mesh.dim == 1:
        h = mesh.spacing[0]
        u = np.asarray(field)
        return float(np.sum((u[1:] - u[:-1]) ** 2) / h)
    nx, ny = mesh.shape
    hx, hy = mesh.spacing
    wx, wy = mesh.axis_weights
    u = np.asarray(field).reshape(nx, ny)
    dx = (u[1:, :] - u[:-1, :]) ** 2 / hx        # (nx-1, ny)
    dy = (u[:, 1:] - u[:, :-1]) ** 2 / hy        # (nx, ny-1)
    return float(np.sum(dx * wy[None, :]) + np.sum(dy * wx[:, None]))


# ---------------------------------------------------------------------------
# operator assembly


@dataclass(frozen=True)
class DiffusionOperator:
    """Mass-scaled diffusion + boundary-exchange operator for one neuron.

    matrix: S_i = -(scaled stiffness) + diag(robin_diag); symmetric.
    robin_diag: nonpositive diagonal from the self part of the exchange rows.
    coupling_* : flattened (boundary node, partner neuron, scaled weight)
    triples; the weight of (b, j) is d*p times the face quadrature weight
    summed over the faces at b labeled i->j.
    """

    neuron: int
    mode: str
    matrix: sp.csr_matrix
    robin_diag: np.ndarray
    coupling_nodes: np.ndarray
    coupling_partners: np.ndarray
    coupling_weights: np.ndarray


def _stiffness_1d(n: int, h: float) -> sp.csr_matrix:
    """Scaled 1D Neumann stiffness: quadratic form sum (u_{k+1}-u_k)^2 / h."""
    inv = 1.0 / h
    main = np.full(n, 2.0 * inv)
    main[0] = main[-1] = inv
    off = np.full(n - 1, -inv)
    return sp.diags([off, main, off], offsets=(-1, 0, 1), format="csr")


def scaled_stiffness(mesh: Mesh, d: float) -> sp.csr_matrix:
    """Mass-scaled stiffness of -d*lap with zero-flux boundary rows (PSD)."""
    if mesh.dim == 1:
        return (d * _stiffness_1d(mesh.shape[0], mesh.spacing[0])).tocsr()
    nx, ny = mesh.shape
    bx = _stiffness_1d(nx, mesh.spacing[0])
    by = _stiffness_1d(ny, mesh.spacing[1])
    wx = sp.diags(mesh.axis_weights[0])
    wy = sp.diags(mesh.axis_weights[1])
    return (d * (sp.kron(bx, wy) + sp.kron(wx, by))).tocsr()


def _coupling_tables(mesh: Mesh, partition: BoundaryPartition,
                     params: ModelParams, neuron: int):
    """Aggregate scaled exchange weights per (node, partner) for one neuron."""
    acc: dict[int, dict[int, float]] = {}
    scale = params.d * params.p
    if scale > 0:
        for f in mesh.faces:
            j = int(partition.partners[f.index, neuron])
            if j == neuron:
                continue
            for node, wt in zip(f.nodes, f.node_weights):
                entry = acc.setdefault(node, {})
                entry[j] = entry.get(j, 0.0) + scale * wt
    nodes, partners, weights = [], [], []
    robin = np.zeros(mesh.n_nodes)
    for node in sorted(acc):
        for j in sorted(acc[node]):
            nodes.append(node)
            partners.append(j)
            weights.append(acc[node][j])
        # aggregate in the same partner order so the self diagonal is the
        # exact negative of the summed coupling weights
        robin[node] = -sum(acc[node][j] for j in sorted(acc[node]))
    return (np.asarray(nodes, dtype=int), np.asarray(partners, dtype=int),
            np.asarray(weights, dtype=float), robin)


def assemble_diffusion(mesh: Mesh, partition: BoundaryPartition,
                       params: ModelParams, neuron: int,
                       mode: str = "monolithic") -> DiffusionOperator:
    """Assemble the mass-scaled operator for one neuron of the network."""
    if not 0 <= neuron < partition.m:
        raise ValueError(f"neuron index {neuron} out of range")
    nodes, partners, weights, robin = _coupling_tables(
        mesh, partition, params, neuron)
    matrix = -scaled_stiffness(mesh, params.d)
    if nodes.size:
        matrix = (matrix + sp.diags(robin)).tocsr()
    else:
        matrix = matrix.tocsr()
    return DiffusionOperator(neuron=neuron, mode=mode, matrix=matrix,
                             robin_diag=robin, coupling_nodes=nodes,
                             coupling_partners=partners,
                             coupling_weights=weights)


def assemble_network(mesh: Mesh, partition: BoundaryPartition,
                     params: ModelParams,
                     mode: str = "monolithic") -> list[DiffusionOperator]:
    return [assemble_diffusion(mesh, partition, params, i, mode)
            for i in range(partition.m)]


def assemble_monolithic(mesh: Mesh, partition: BoundaryPartition,
                        params: ModelParams) -> sp.csr_matrix:
    """Full (m n) x (m n) mass-scaled network operator; symmetric NSD."""
    m = partition.m
    n = mesh.n_nodes
    ops = assemble_network(mesh, partition, params, mode="monolithic")
    rows, cols, vals = [], [], []
    for i, op in enumerate(ops):
        coo = op.matrix.tocoo()
        rows.append(coo.row + i * n)
        cols.append(coo.col + i * n)
        vals.append(coo.data)
        rows.append(op.coupling_nodes + i * n)
        cols.append(op.coupling_nodes + op.coupling_partners * n)
        vals.append(op.coupling_weights)
    full = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(m * n, m * n))
    return full.tocsr()


def coupling_forcing_scaled(op: DiffusionOperator,
                            fields: np.ndarray) -> np.ndarray:
    """Mass-scaled exchange forcing from the partner traces (+ d p u_j part)."""
    out = np.zeros(fields.shape[-1])
    if op.coupling_nodes.size:
        np.add.at(out, op.coupling_nodes,
                  op.coupling_weights
                  * fields[op.coupling_partners, op.coupling_nodes])
    return out


def apply_coupling(op: DiffusionOperator, mesh: Mesh,
                   fields: np.ndarray) -> np.ndarray:
    """Nodal exchange forcing for neuron i given all fields (m, n)."""
    return coupling_forcing_scaled(op, fields) / mesh.weights


def apply_robin_self(op: DiffusionOperator, mesh: Mesh,
                     u: np.ndarray) -> np.ndarray:
    """Nodal self part of the exchange rows, accumulated with the identical
    operation order as apply_coupling so the two cancel exactly on equal
    fields."""
    out = np.zeros(u.shape[-1])
    if op.coupling_nodes.size:
        np.add.at(out, op.coupling_nodes,
                  -op.coupling_weights * u[op.coupling_nodes])
    return out / mesh.weights


def apply_operator(op: DiffusionOperator, mesh: Mesh,
                   fields: np.ndarray) -> np.ndarray:
    """Nodal action d*lap(u_i) + exchange terms for neuron op.neuron."""
    u = fields[op.neuron]
    scaled = op.matrix @ u + coupling_forcing_scaled(op, fields)
    return scaled / mesh.weights
