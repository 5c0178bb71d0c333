# SPDX-FileCopyrightText: Copyright (c) 2025 NVIDIA CORPORATION & AFFILIATES. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

'''
Flow backend.

Simulates the stochastic flow phi of -X (d phi = -X0 dt - sum_k X^k(phi) o dW_k)
at the grid nodes and solves the equation for v(t, y) = u(t, phi(y)),

    dv/dt = R:D^2 v + S.grad v - F'(v)/eps^2,

    R = (D phi)^-1 (D phi)^-T,   S = lap(phi^-1) evaluated at phi(y),

which carries no noise term. The direct solution is recovered as
u = v o phi^-1. On shared Brownian paths both backends approximate the same
solution, which makes this module an independent check of the Ito
correction terms of the direct solver.

The inverse map is advanced by composing with the backward Heun step of each
increment, psi_{t+dt} = psi_t o z, so that psi stays a flow of its own.
'''

from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .diagnostics import energy, snapshot_report
from .exceptions import BlowupError, ContractError, DegenerateFlowError, DomainError
from .grid import Grid
from .localization import TestFunction
from .noise import IncrementSource, NoiseModel
from .potential import STANDARD_QUARTIC, DoubleWell, f_prime
from .solver import SolverConfig, Trajectory, TrajectoryResult

logger = logging.getLogger()

SPLINE_ORDER = 3


@dataclass
class FlowMap:
    '''
    Node samples of a stochastic flow and its inverse.

    Attributes:
        grid: The grid.
        forward: phi_{0,t}(x) at the nodes, shape (dim, *S); not wrapped on the torus.
        inverse: phi_{0,t}^-1(x) at the nodes, shape (dim, *S); not wrapped on the torus.
        tangent: D phi_{0,t}(x) at the nodes, shape (dim, dim, *S).
        t: Flow time.
    '''

    grid: Grid
    forward: np.ndarray
    inverse: np.ndarray
    tangent: np.ndarray
    t: float = 0.0

    @classmethod
    def identity(cls, grid: Grid) -> FlowMap:
        points = grid.coordinates.copy()
        tangent = np.zeros((grid.dim, grid.dim) + grid.shape)
        for i in range(grid.dim):
            tangent[i, i] = 1.0
        return cls(grid, points, points.copy(), tangent, 0.0)

    @property
    def determinant(self) -> np.ndarray:
        return _determinant(self.tangent)


def _determinant(matrix: np.ndarray) -> np.ndarray:
    if matrix.shape[0] == 1:
        return matrix[0, 0]
    return matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0]


def _inverse(matrix: np.ndarray) -> np.ndarray:
    '''
    Pointwise inverse of a (dim, dim, *S) matrix field.
    '''
    moved = np.moveaxis(matrix, (0, 1), (-2, -1))
    return np.moveaxis(np.linalg.inv(moved), (-2, -1), (0, 1))


def _matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum('ij...,jk...->ik...', a, b)


def _evaluation_points(grid: Grid, points: np.ndarray) -> np.ndarray:
    return np.mod(points, 1.0) if grid.periodic else points


def _noise_terms(
    model: NoiseModel, grid: Grid, t: float, points: np.ndarray, increments: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    '''
    xi = sum_k X^k dW_k and its Jacobian at arbitrary points.
    '''
    values, jacobians, _ = model.sample(t, _evaluation_points(grid, points))
    if not model.n_modes:
        return np.zeros_like(points), np.zeros((grid.dim,) + points.shape)
    return np.tensordot(increments, values, axes=1), np.tensordot(increments, jacobians, axes=1)


def interpolate(grid: Grid, values: np.ndarray, points: np.ndarray) -> np.ndarray:
    '''
    Cubic spline interpolation of nodal values at arbitrary points.

    Periodic grids wrap; Neumann grids mirror about the boundary nodes.

    Raises:
        DomainError: If a point leaves the unit box of a Neumann grid.
    '''
    if not grid.periodic and (np.any(points < -1e-12) or np.any(points > 1.0 + 1e-12)):
        raise DomainError('Interpolation point outside the unit box')
    mode = 'grid-wrap' if grid.periodic else 'mirror'
    coordinates = points / grid.h
    return ndimage.map_coordinates(values, coordinates, order=SPLINE_ORDER, mode=mode)


def forward_step(
    model: NoiseModel, grid: Grid, t: float, dt: float, points: np.ndarray, increments: np.ndarray
) -> np.ndarray:
    '''
    One Heun step of d phi = -X0 dt - sum_k X^k(phi) o dW_k for a set of points.
    '''
    drift, _ = model.drift_sample(t, _evaluation_points(grid, points))
    xi, _ = _noise_terms(model, grid, t, points, increments)
    predicted, _ = _noise_terms(model, grid, t, points - xi, increments)
    return points - drift * dt - 0.5 * (xi + predicted)


def backward_step(
    model: NoiseModel, grid: Grid, t: float, dt: float, points: np.ndarray, increments: np.ndarray
) -> np.ndarray:
    '''
    One backward Heun step undoing forward_step up to higher order terms.
    '''
    drift, _ = model.drift_sample(t, _evaluation_points(grid, points))
    xi, _ = _noise_terms(model, grid, t, points, increments)
    predicted, _ = _noise_terms(model, grid, t, points + xi, increments)
    return points + drift * dt + 0.5 * (xi + predicted)


def advance_flow(
    fm: FlowMap, model: NoiseModel, t: float, dt: float, increments: np.ndarray
) -> FlowMap:
    '''
    Advance forward positions, tangent maps and inverse positions by one step.

    Args:
        fm: The flow at time t.
        model: Noise model.
        t: Start time of the step.
        dt: Step size.
        increments: Brownian increments of the step, shape (N,).

    Returns:
        The flow at time t + dt.

    Raises:
        DegenerateFlowError: If det D phi <= 0 at some node.
    '''
    grid = fm.grid
    position, tangent = fm.forward, fm.tangent
    drift, drift_jacobian = model.drift_sample(t, _evaluation_points(grid, position))
    xi, xi_jacobian = _noise_terms(model, grid, t, position, increments)
    predictor = position - xi
    tangent_predictor = tangent - _matmul(xi_jacobian, tangent)
    xi_predicted, xi_jacobian_predicted = _noise_terms(model, grid, t, predictor, increments)

    forward = position - drift * dt - 0.5 * (xi + xi_predicted)
    tangent_next = (
        tangent
        - dt * _matmul(drift_jacobian, tangent)
        - 0.5 * (_matmul(xi_jacobian, tangent) + _matmul(xi_jacobian_predicted, tangent_predictor))
    )
    if np.any(_determinant(tangent_next) <= 0.0):
        raise DegenerateFlowError(f'D phi lost orientation at t={t + dt:.6g}; reduce dt')

    z = backward_step(model, grid, t, dt, grid.coordinates, increments)
    displacement = fm.inverse - grid.coordinates
    inverse = z + np.stack([interpolate(grid, d, z) for d in displacement])
    return FlowMap(grid, forward, inverse, tangent_next, t + dt)


def transformed_coefficients(fm: FlowMap) -> tuple[np.ndarray, np.ndarray]:
    '''
    Coefficients of the noise-free equation for v = u o phi.

    Returns:
        (R, S) with R = (D phi)^-1 (D phi)^-T of shape (dim, dim, *S) and
        S = lap(phi^-1) at phi(x) of shape (dim, *S).
    '''
    grid = fm.grid
    inverse_tangent = _inverse(fm.tangent)
    matrix = np.einsum('ik...,jk...->ij...', inverse_tangent, inverse_tangent)
    displacement = fm.inverse - grid.coordinates
    vector = np.stack(
        [interpolate(grid, grid.laplacian(d), fm.forward) for d in displacement]
    )
    return matrix, vector


def flow_consistency_defect(fm: FlowMap, margin: float = 0.1) -> float:
    '''
    max |D phi (D phi^-1 o phi) - I| over nodes at least `margin` from the boundary.

    D phi^-1 is taken from central differences of the inverse samples.
    '''
    grid = fm.grid
    displacement = fm.inverse - grid.coordinates
    jacobian = np.stack([grid.gradient(d) for d in displacement])
    for i in range(grid.dim):
        jacobian[i, i] = jacobian[i, i] + 1.0
    at_forward = np.stack(
        [np.stack([interpolate(grid, entry, fm.forward) for entry in row]) for row in jacobian]
    )
    product = _matmul(at_forward, fm.tangent)
    for i in range(grid.dim):
        product[i, i] = product[i, i] - 1.0
    interior = grid.distance_to_boundary() >= margin
    return float(np.max(np.abs(product[:, :, interior])))


def flow_property_defect(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    model: NoiseModel,
    grid: Grid,
    stream: IncrementSource,
    dt: float,
    steps: tuple[int, int, int],
    probes: np.ndarray,
) -> float:
    '''
    Defect of the flow property phi_{s,t} o phi_{r,s} = phi_{r,t} at probe points.

    Probe points are carried forward from step r to t, then back from t to s
    with backward steps, and compared with the forward positions at s.

    Args:
        model: Noise model.
        grid: The grid.
        stream: Increment source of the path.
        dt: Step size of the stream.
        steps: Step indices (r, s, t) with r < s < t.
        probes: Probe points of shape (dim, K).

    Returns:
        Maximum distance over probes.
    '''
    r, s, t = steps
    if not r < s < t:
        raise ContractError(f'Flow property needs r < s < t, got {steps}')
    points = np.array(probes, dtype=float)
    at_s = points
    for step in range(r, t):
        points = forward_step(model, grid, step * dt, dt, points, stream.increments(step))
        if step + 1 == s:
            at_s = points.copy()
    for step in range(t - 1, s - 1, -1):
        points = backward_step(model, grid, step * dt, dt, points, stream.increments(step))
    return float(np.max(np.linalg.norm(points - at_s, axis=0)))


def compose(grid: Grid, v: np.ndarray, fm: FlowMap) -> np.ndarray:
    '''
    u = v o phi^-1 at the nodes.
    '''
    return interpolate(grid, v, fm.inverse)


def solve_transformed(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    stream: IncrementSource,
    model: NoiseModel,
    grid: Grid,
    config: SolverConfig,
    u0: np.ndarray,
    potential: DoubleWell = STANDARD_QUARTIC,
    test_functions: Sequence[TestFunction] = (),
    circle_center: Optional[Sequence[float]] = None,
) -> TrajectoryResult:
    '''
    Solve the equation through the flow backend on a given Brownian path.

    The v equation is stepped with explicit Euler on the time grid of the
    configuration; with semi-implicit diffusion the Laplacian part of R:D^2 v
    is implicit and (R - I):D^2 v stays explicit.

    Args:
        stream: Increments of the path, typically a RecordedNoiseStream.
        model: Noise model, autonomous.
        grid: The grid.
        config: Solver configuration (scheme is ignored).
        u0: Initial nodal field.
        potential: Double-well potential.
        test_functions: Test functions for the snapshot reports.
        circle_center: Center for the radius diagnostic, if any.

    Returns:
        A TrajectoryResult without identity ledger.

    Raises:
        DegenerateFlowError: If the flow degenerates.
        BlowupError: If v leaves the admissible range.
    '''
    # pylint: disable=too-many-locals
    if model.time_dependent:
        raise DomainError('the flow backend needs autonomous noise fields')
    model.validate(grid)
    holder = Trajectory(
        config, grid, model, u0, stream, potential, track_identity=False, keep_snapshots=False
    )
    fm = FlowMap.identity(grid)
    v = holder.u0.copy()
    times: list[float] = []
    snapshots: list[np.ndarray] = []
    reports = []

    def record(u: np.ndarray) -> None:
        times.append(fm.t)
        snapshots.append(u.copy())
        reports.append(
            snapshot_report(grid, potential, u, config.eps, fm.t, test_functions, circle_center)
        )

    logger.info(f'Flow backend: m={grid.m} eps={config.eps} dt={config.dt} steps={config.steps}')
    record(holder.u0)
    u = holder.u0
    for step in range(config.steps):
        increments = stream.increments(step)
        if config.diffusion or config.reaction:
            v = _transformed_step(holder, fm, v)
        fm = advance_flow(fm, model, step * config.dt, config.dt, increments)
        holder.increments[step] = increments
        holder.step_index = step + 1
        holder.u = v
        if holder.blown_up:
            logger.error(f'Flow backend blowup at step {step}')
            raise BlowupError(f'Transformed solution blew up at step {step}', step, fm.t)
        if holder.step_index % config.snapshot_stride == 0 or holder.step_index == config.steps:
            u = compose(grid, v, fm)
            record(u)

    return TrajectoryResult(
        config=config,
        grid=grid,
        final=u.copy(),
        times=times,
        snapshots=snapshots,
        reports=reports,
        increments=holder.increments.copy(),
        ledger=None,
        initial_energy=energy(grid, potential, holder.u0, config.eps),
    )


def _transformed_step(holder: Trajectory, fm: FlowMap, v: np.ndarray) -> np.ndarray:
    config, grid = holder.config, holder.grid
    matrix, vector = transformed_coefficients(fm)
    for i in range(grid.dim):
        matrix[i, i] = matrix[i, i] - 1.0
    rate = np.zeros_like(v)
    if config.diffusion:
        if not config.semi_implicit:
            rate = rate + grid.laplacian(v)
        rate = rate + np.einsum('ij...,ij...->...', matrix, grid.hessian(v))
        rate = rate + np.einsum('i...,i...->...', vector, grid.gradient(v))
    if config.reaction:
        rate = rate - f_prime(holder.potential, v) / config.eps**2
    v_next = v + config.dt * rate
    if config.diffusion and config.semi_implicit:
        v_next = holder.solve_implicit(v_next, v)
    return v_next
