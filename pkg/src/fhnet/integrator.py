"""Time stepping: IMEX schemes with implicit diffusion/exchange rows.

The voltage step treats diffusion and the boundary-exchange rows implicitly
and the cubic reaction explicitly; the recovery step is solved exactly in
its linear part.  First-order scheme (imex_euler):

    (W - dt*S) u^{n+1} = W (u^n + dt*(f(u^n) - sigma*w^n + J)) [+ dt*C u^n]
    w^{n+1} = (w^n + dt*eps*(u^{n+1} + a)) / (1 + dt*eps*b)

imex_bdf2 is the second-order variant (BDF2 left side, extrapolated
reaction), bootstrapped by one Euler step.  In "lagged" coupling mode each
neuron solves against its neighbours' previous traces; "monolithic" solves
the full network system, whose matrix is symmetric positive definite either
way, so a Jacobi-preconditioned conjugate gradient with warm starts does
the solves.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import SolverError, ValidationError
from .geometry import BoundaryPartition, Mesh
from .kinetics import Kinetics, eval_f
from .operators import (assemble_monolithic, assemble_network,
                        coupling_forcing_scaled)
from .params import ModelParams, RunParams


@dataclass(frozen=True)
class NetworkState:
    """Nodal fields of the whole network at one time; arrays are (m, n)."""

    t: float
    u: np.ndarray
    w: np.ndarray

    def copy(self) -> "NetworkState":
        return NetworkState(t=self.t, u=self.u.copy(), w=self.w.copy())


def solve_spd(matrix: sp.spmatrix, rhs: np.ndarray, tol: float,
              max_iter: int, x0: np.ndarray | None = None,
              diag: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """Jacobi-preconditioned conjugate gradients for SPD systems.

    Converges when the residual norm drops below tol * ||rhs||.  Returns
    (solution, iteration count); raises SolverError with the achieved
    residual when max_iter is exhausted.
    """
    b_norm = float(np.linalg.norm(rhs))
    if not np.isfinite(b_norm):
        # without this check an infinite rhs would satisfy the relative
        # residual test vacuously and return the warm start unchanged
        raise SolverError("right-hand side contains non-finite values",
                          residual=float("inf"), iterations=0)
    if b_norm == 0.0:
        return np.zeros_like(rhs), 0
    if diag is None:
        diag = matrix.diagonal()
    inv_diag = 1.0 / diag

    x = np.zeros_like(rhs) if x0 is None else x0.copy()
    r = rhs - matrix @ x
    z = inv_diag * r
    p = z.copy()
    rz = float(np.dot(r, z))
    res = float(np.linalg.norm(r))
    if res <= tol * b_norm:
        return x, 0

    for k in range(1, max_iter + 1):
        ap = matrix @ p
        alpha = rz / float(np.dot(p, ap))
        x += alpha * p
        r -= alpha * ap
        res = float(np.linalg.norm(r))
        if res <= tol * b_norm:
            return x, k
        z = inv_diag * r
        rz_next = float(np.dot(r, z))
        p = z + (rz_next / rz) * p
        rz = rz_next
    raise SolverError(
        f"conjugate gradient did not converge in {max_iter} iterations "
        f"(relative residual {res / b_norm:.3e})",
        residual=res / b_norm, iterations=max_iter)


def advance_recovery(w: np.ndarray, u_new: np.ndarray, dt: float,
                     epsilon: float, a: float, b: float,
                     source=0.0) -> np.ndarray:
    """Recovery update, exact in the linear part; unconditionally stable."""
    return (w + dt * (epsilon * (u_new + a) + source)) \
        / (1.0 + dt * epsilon * b)


class TimeStepper:
    """Prepared matrices and workspace to advance a network state by dt.

    A stepper instance assumes sequential use on one trajectory: the BDF2
    variant keeps the previous state as history and every scheme keeps the
    last solution as CG warm start.
    """

    def __init__(self, mesh: Mesh, partition: BoundaryPartition,
                 params: ModelParams, run: RunParams, kinetics: Kinetics):
        if partition.m != params.m:
            raise ValidationError(
                f"partition is for m={partition.m} but params.m={params.m}")
        self.mesh = mesh
        self.partition = partition
        self.params = params
        self.run = run
        self.kinetics = kinetics
        self.m = params.m
        self.n = mesh.n_nodes
        self.mode = run.coupling_mode
        self.scheme = run.scheme
        self.dt = run.dt
        self.omega = mesh.weights
        self.ops = assemble_network(mesh, partition, params, mode=self.mode)
        # implicit weight: Euler solves (W - dt S), BDF2 (W - (2dt/3) S)
        self.dt_eff = self.dt if self.scheme == "imex_euler" else 2.0 * self.dt / 3.0
        if self.mode == "monolithic":
            s_full = assemble_monolithic(mesh, partition, params)
            self.omega_full = np.tile(self.omega, self.m)
            self.system_full = (sp.diags(self.omega_full)
                                - self.dt_eff * s_full).tocsr()
            self.diag_full = self.system_full.diagonal()
        else:
            self.systems = []
            self.diags = []
            for op in self.ops:
                mat = (sp.diags(self.omega) - self.dt_eff * op.matrix).tocsr()
                self.systems.append(mat)
                self.diags.append(mat.diagonal())
        self._prev: NetworkState | None = None
        self._warm: np.ndarray | None = None
        self.total_solver_iterations = 0
        # optional manufactured sources, callables t -> (m, n) arrays;
        # used by convergence studies, never by production runs
        self.u_source = None
        self.w_source = None

    # -- reaction -----------------------------------------------------------

    def reaction(self, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        p = self.params
        return eval_f(self.kinetics, u) - p.sigma * w + p.J

    # -- one step -----------------------------------------------------------

    def advance(self, state: NetworkState) -> NetworkState:
        if self.scheme == "imex_bdf2" and self._prev is not None:
            new = self._advance_bdf2(state, self._prev)
        else:
            new = self._advance_euler(state)
        if self.scheme == "imex_bdf2":
            self._prev = state
        return new

    def _solve_u(self, explicit: np.ndarray,
                 coupling_src: np.ndarray) -> np.ndarray:
        """Solve the implicit voltage system; explicit is the (m, n) right
        side in nodal form, coupling_src the traces for lagged coupling."""
        run = self.run
        if self.mode == "monolithic":
            rhs = (self.omega_full * explicit.ravel())
            x0 = self._warm if self._warm is not None else explicit.ravel()
            sol, iters = solve_spd(self.system_full, rhs, run.solver_tol,
                                   run.solver_max_iter, x0=x0,
                                   diag=self.diag_full)
            self.total_solver_iterations += iters
            self._warm = sol
            return sol.reshape(self.m, self.n)
        out = np.empty_like(explicit)
        if self._warm is None:
            self._warm = explicit.copy()
        for i, op in enumerate(self.ops):
            rhs = self.omega * explicit[i] \
                + self.dt_eff * coupling_forcing_scaled(op, coupling_src)
            sol, iters = solve_spd(self.systems[i], rhs, run.solver_tol,
                                   run.solver_max_iter, x0=self._warm[i],
                                   diag=self.diags[i])
            self.total_solver_iterations += iters
            self._warm[i] = sol
            out[i] = sol
        return out

    def _advance_euler(self, state: NetworkState) -> NetworkState:
        p = self.params
        dt = self.dt
        rhs = self.reaction(state.u, state.w)
        if self.u_source is not None:
            rhs = rhs + self.u_source(state.t)
        explicit = state.u + dt * rhs
        u_new = self._solve_u(explicit, state.u)
        w_src = self.w_source(state.t + dt) if self.w_source is not None \
            else 0.0
        w_new = advance_recovery(state.w, u_new, dt, p.epsilon, p.a, p.b,
                                 source=w_src)
        return NetworkState(t=state.t + dt, u=u_new, w=w_new)

    def _advance_bdf2(self, state: NetworkState,
                      prev: NetworkState) -> NetworkState:
        p = self.params
        dt = self.dt
        f_now = self.reaction(state.u, state.w)
        f_prev = self.reaction(prev.u, prev.w)
        if self.u_source is not None:
            f_now = f_now + self.u_source(state.t)
            f_prev = f_prev + self.u_source(prev.t)
        explicit = (4.0 * state.u - prev.u) / 3.0 \
            + self.dt_eff * (2.0 * f_now - f_prev)
        traces = 2.0 * state.u - prev.u     # extrapolated neighbour traces
        u_new = self._solve_u(explicit, traces)
        w_src = self.w_source(state.t + dt) if self.w_source is not None \
            else 0.0
        denom = 1.0 + self.dt_eff * p.epsilon * p.b
        w_new = ((4.0 * state.w - prev.w) / 3.0
                 + self.dt_eff * (p.epsilon * (u_new + p.a) + w_src)) / denom
        return NetworkState(t=state.t + dt, u=u_new, w=w_new)


def step(state: NetworkState, stepper: TimeStepper) -> NetworkState:
    """Advance one time step with the prepared stepper."""
    return stepper.advance(state)
