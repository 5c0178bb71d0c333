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
Pathwise time integration of the stochastic Allen-Cahn equation.

Two steppers share one drift evaluation:

- ito_euler: Euler-Maruyama step of the Ito form
      du = [lap u - F'(u)/eps^2 + 1/2 A:D^2 u + 1/2 c.grad u + b.grad u] dt
           + grad u . sum_k X^k dW_k
- stratonovich_heun: predictor-corrector step of the Stratonovich form, drift
      lap u - F'(u)/eps^2 + b.grad u stepped explicitly and the noise term
      averaged between the current state and an Euler predictor.

The Laplacian is explicit or semi-implicit; A:D^2 u is always explicit. With
no modes and no drift both steppers reduce to the deterministic Allen-Cahn
equation, bitwise identical to each other.
'''

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import StrEnum
import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import linalg

from .diagnostics import EnergyReport, energy, snapshot_report
from .exceptions import BlowupError, ContractError, DomainError, LinearSolveError, StabilityError
from .grid import Grid
from .identity import GLOBAL, IdentityLedger, LedgerChannel, LedgerRecorder
from .localization import TestFunction
from .noise import IncrementSource, LocalCharacteristic, NoiseModel
from .potential import STANDARD_QUARTIC, DoubleWell, f_prime, max_abs_f_second

logger = logging.getLogger()


class Scheme(StrEnum):
    '''
    Time stepping schemes.
    '''

    ITO_EULER = 'ito_euler'
    STRATONOVICH_HEUN = 'stratonovich_heun'


class DiffusionTreatment(StrEnum):
    '''
    Treatment of the Laplacian.
    '''

    EXPLICIT = 'explicit'
    SEMI_IMPLICIT = 'semi_implicit'


class Mutation(StrEnum):
    '''
    Debug mutations that disable one correction term, used to show that the
    validation checks can fail.
    '''

    ZERO_A = 'zero-A'
    ZERO_C = 'zero-c'
    ZERO_PSI = 'zero-Psi-psi'


@dataclass(frozen=True)
class SolverConfig:  # pylint: disable=too-many-instance-attributes
    '''
    Time integration parameters.

    Attributes:
        eps: Interface width.
        dt: Step size.
        t_end: Final time, a multiple of dt.
        scheme: Time stepping scheme.
        diffusion_treatment: Explicit or semi-implicit Laplacian.
        blowup_threshold: Largest admissible |u|.
        snapshot_stride: Steps between snapshots.
        reaction: Whether the term -F'(u)/eps^2 is present.
        diffusion: Whether the Laplacian is present.
        mutations: Debug mutations in effect.
    '''

    eps: float
    dt: float
    t_end: float
    scheme: Scheme = Scheme.ITO_EULER
    diffusion_treatment: DiffusionTreatment = DiffusionTreatment.EXPLICIT
    blowup_threshold: float = 10.0
    snapshot_stride: int = 1
    reaction: bool = True
    diffusion: bool = True
    mutations: frozenset[Mutation] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'scheme', Scheme(self.scheme))
        object.__setattr__(
            self, 'diffusion_treatment', DiffusionTreatment(self.diffusion_treatment)
        )
        object.__setattr__(self, 'mutations', frozenset(Mutation(m) for m in self.mutations))
        if self.eps <= 0.0 or self.dt <= 0.0 or self.t_end < 0.0:
            raise DomainError(
                f'eps and dt must be positive and t_end non-negative, got '
                f'eps={self.eps}, dt={self.dt}, t_end={self.t_end}'
            )
        if self.snapshot_stride < 1:
            raise DomainError(f'snapshot_stride must be positive, got {self.snapshot_stride}')
        if self.blowup_threshold <= 1.0:
            raise DomainError(f'blowup_threshold must exceed 1, got {self.blowup_threshold}')
        if abs(self.steps * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise DomainError(f't_end={self.t_end} is not a multiple of dt={self.dt}')

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def semi_implicit(self) -> bool:
        return self.diffusion_treatment == DiffusionTreatment.SEMI_IMPLICIT


def stability_bound(
    config: SolverConfig, grid: Grid, model: NoiseModel, potential: DoubleWell = STANDARD_QUARTIC
) -> float:
    '''
    Largest admissible step for a configuration.

    Explicit diffusion: min(h^2 / (2 n (1 + lambda/2)), eps^2 / max|F''|) with
    lambda the largest eigenvalue of A and max|F''| taken on [-1.2, 1.2].
    Semi-implicit diffusion keeps the reaction bound and the bound
    h^2 / (n lambda) of the explicit A:D^2 u term. Absent terms drop out.

    Returns:
        The bound, infinity when no term constrains the step.
    '''
    lam = model.characteristic(0.0, grid.coordinates).largest_eigenvalue_of_A()
    h2, n = grid.h * grid.h, grid.dim
    ito = config.scheme == Scheme.ITO_EULER
    bounds = [math.inf]
    if config.diffusion and not config.semi_implicit:
        bounds.append(h2 / (2.0 * n * (1.0 + (0.5 * lam if ito else 0.0))))
    elif ito and lam > 0.0:
        bounds.append(h2 / (n * lam))
    if config.reaction:
        bounds.append(config.eps**2 / max_abs_f_second(potential))
    return min(bounds)


def check_stability(
    config: SolverConfig, grid: Grid, model: NoiseModel, potential: DoubleWell = STANDARD_QUARTIC
) -> None:
    '''
    Raise StabilityError if dt exceeds the stability bound; warn if eps < 2h.
    '''
    bound = stability_bound(config, grid, model, potential)
    if config.dt > bound * (1.0 + 1e-12):
        raise StabilityError(f'dt={config.dt} exceeds the stability bound {bound:.6g}')
    if config.reaction and config.eps < 2.0 * grid.h:
        logger.warning(
            f'eps={config.eps} is below 2h={2.0 * grid.h:.4g}; interface is under-resolved'
        )


@dataclass
class TrajectoryResult:  # pylint: disable=too-many-instance-attributes
    '''
    Outcome of one trajectory.

    Attributes:
        config: Solver configuration.
        grid: The grid.
        final: Final nodal field.
        times: Snapshot times.
        snapshots: Nodal fields at the snapshot times (empty if not kept).
        reports: Diagnostics at the snapshot times.
        increments: Brownian increments per step, shape (steps, N).
        ledger: Energy identity ledger, if tracked.
        initial_energy: Lambda = E_eps(u0).
        sample_index: Index of the sample path.
    '''

    config: SolverConfig
    grid: Grid
    final: np.ndarray
    times: list[float]
    snapshots: list[np.ndarray]
    reports: list[EnergyReport]
    increments: np.ndarray
    ledger: Optional[IdentityLedger]
    initial_energy: float
    sample_index: int = 0

    def series(self, name: str) -> np.ndarray:
        '''
        One EnergyReport attribute over the snapshots.
        '''
        return np.array([getattr(report, name) for report in self.reports])


class Trajectory:  # pylint: disable=too-many-instance-attributes
    '''
    State of one sample path, advanced in place by the steppers.

    Args:
        config: Solver configuration.
        grid: The grid.
        model: Noise model.
        u0: Initial nodal field.
        stream: Source of Brownian increments.
        potential: Double-well potential.
        test_functions: Test functions tracked by reports and the identity ledger.
        track_identity: Whether to record the energy identity ledger.
        circle_center: Center for the radius diagnostic, if any.
        keep_snapshots: Whether to keep nodal fields at the snapshot times.
        sample_index: Index of the sample path.
    '''

    def __init__(  # pylint: disable=too-many-arguments,too-many-positional-arguments
        self,
        config: SolverConfig,
        grid: Grid,
        model: NoiseModel,
        u0: np.ndarray,
        stream: IncrementSource,
        potential: DoubleWell = STANDARD_QUARTIC,
        test_functions: Sequence[TestFunction] = (),
        track_identity: bool = True,
        circle_center: Optional[Sequence[float]] = None,
        keep_snapshots: bool = True,
        sample_index: int = 0,
    ) -> None:
        model.validate(grid)
        if stream.n_modes != model.n_modes:
            raise ContractError(
                f'Increment source has {stream.n_modes} modes, noise model {model.n_modes}'
            )
        if model.time_dependent:
            raise DomainError('time-dependent noise fields are not supported by the solver')

        self.config = config
        self.grid = grid
        self.model = model
        self.stream = stream
        self.potential = potential
        self.test_functions = tuple(test_functions)
        self.circle_center = circle_center
        self.keep_snapshots = keep_snapshots
        self.sample_index = sample_index

        self.u0 = np.array(u0, dtype=float).reshape(grid.shape)
        self.u = self.u0.copy()
        self.step_index = 0
        self.initial_energy = energy(grid, potential, self.u0, config.eps)
        self.increments = np.zeros((config.steps, model.n_modes))
        self.reports: list[EnergyReport] = []
        self.times: list[float] = []
        self.snapshots: list[np.ndarray] = []

        characteristic = model.characteristic(0.0, grid.coordinates)
        self.modes = characteristic.X
        self.drift = characteristic.b
        zeros = np.zeros_like(characteristic.A)
        self.a_term = zeros if Mutation.ZERO_A in config.mutations else characteristic.A
        self.c_term = (
            np.zeros_like(characteristic.c)
            if Mutation.ZERO_C in config.mutations
            else characteristic.c
        )
        self._operator: Optional[sparse.csr_matrix] = None

        self.recorder: Optional[LedgerRecorder] = None
        if track_identity:
            channels = self._ledger_channels(characteristic)
            self.recorder = LedgerRecorder(
                grid, potential, config.eps, config.dt, channels, self.modes, self.drift
            )

    @property
    def t(self) -> float:
        return self.step_index * self.config.dt

    @property
    def blown_up(self) -> bool:
        if not np.all(np.isfinite(self.u)):
            return True
        return bool(np.max(np.abs(self.u)) > self.config.blowup_threshold)

    def _ledger_channels(self, characteristic: LocalCharacteristic) -> list[LedgerChannel]:
        zeroed = Mutation.ZERO_PSI in self.config.mutations
        psi_matrix = np.zeros_like(characteristic.A) if zeroed else characteristic.Psi
        psi_scalar = np.zeros(self.grid.shape) if zeroed else characteristic.psi
        channels = [LedgerChannel(GLOBAL, None, None, psi_matrix, psi_scalar)]
        for eta in self.test_functions:
            values, grad, hess = eta.evaluate(self.grid.coordinates)
            matrix, scalar = characteristic.localized_bracket(values, grad, hess)
            if zeroed:
                matrix, scalar = np.zeros_like(matrix), np.zeros_like(scalar)
            channels.append(LedgerChannel(eta.label, values, grad, matrix, scalar))
        return channels

    @property
    def operator(self) -> sparse.csr_matrix:
        if self._operator is None:
            self._operator = self.grid.implicit_operator(self.config.dt)
        return self._operator

    def drift_term(self, u: np.ndarray, grad: np.ndarray, corrections: bool) -> np.ndarray:
        '''
        Deterministic part of the right-hand side.

        Args:
            u: Nodal field.
            grad: Its central gradient.
            corrections: Whether to add the Ito correction terms.
        '''
        config = self.config
        result = np.zeros_like(u)
        if config.diffusion and not config.semi_implicit:
            result = result + self.grid.laplacian(u)
        if config.reaction:
            result = result - f_prime(self.potential, u) / config.eps**2
        if corrections and self.model.n_modes:
            result = result + 0.5 * np.einsum('ij...,ij...->...', self.a_term, self.grid.hessian(u))
            result = result + 0.5 * np.einsum('i...,i...->...', self.c_term, grad)
        if self.model.drift is not None:
            result = result + np.einsum('i...,i...->...', self.drift, grad)
        return result

    def noise_field(self, increments: np.ndarray) -> np.ndarray:
        '''
        sum_k X^k dW_k at the nodes.
        '''
        if not self.model.n_modes:
            return np.zeros((self.grid.dim,) + self.grid.shape)
        return np.tensordot(increments, self.modes, axes=1)

    def solve_implicit(self, rhs: np.ndarray, guess: np.ndarray) -> np.ndarray:
        '''
        Solve (I - dt lap) x = rhs by conjugate gradients on the weighted system.

        Raises:
            LinearSolveError: If the solver does not converge.
        '''
        weights = self.grid.weights.ravel()
        solution, info = linalg.cg(
            self.operator, weights * rhs.ravel(), x0=guess.ravel(), rtol=1e-10, atol=0.0
        )
        if info != 0:
            raise LinearSolveError(f'Conjugate gradient stopped with info={info} at t={self.t}')
        return solution.reshape(self.grid.shape)

    def commit(self, u_next: np.ndarray, increments: np.ndarray, noise: np.ndarray) -> None:
        '''
        Accept a new state, recording increments and identity terms.

        Raises:
            BlowupError: If the new state is not admissible.
        '''
        step = self.step_index
        self.increments[step] = increments
        self.u = u_next
        self.step_index += 1
        if self.blown_up:
            logger.error(f'Blowup at step {step} (t={self.t:.6g}) of sample {self.sample_index}')
            raise BlowupError(f'Trajectory blew up at step {step}', step, self.t)
        if self.recorder is not None:
            self.recorder.advance(u_next, noise)

    def snapshot(self) -> None:
        '''
        Evaluate diagnostics of the current state.
        '''
        report = snapshot_report(
            self.grid,
            self.potential,
            self.u,
            self.config.eps,
            self.t,
            self.test_functions,
            self.circle_center,
        )
        self.reports.append(report)
        self.times.append(self.t)
        if self.keep_snapshots:
            self.snapshots.append(self.u.copy())
        logger.debug(f't={self.t:.6g} E={report.energy:.6g} bv_g={report.bv_g:.6g}')


def step_ito(traj: Trajectory) -> Trajectory:
    '''
    One Euler-Maruyama step of the Ito form.

    Raises:
        BlowupError: If the new state is not admissible.
    '''
    config = traj.config
    increments = traj.stream.increments(traj.step_index)
    noise = traj.noise_field(increments)
    u = traj.u
    grad = traj.grid.gradient(u)
    u_next = u + config.dt * traj.drift_term(u, grad, corrections=True)
    u_next = u_next + np.einsum('i...,i...->...', grad, noise)
    if config.diffusion and config.semi_implicit:
        u_next = traj.solve_implicit(u_next, u)
    traj.commit(u_next, increments, noise)
    return traj


def step_stratonovich_heun(traj: Trajectory) -> Trajectory:
    '''
    One Heun predictor-corrector step of the Stratonovich form.

    The drift is stepped explicitly from the current state; the noise term is
    the average of grad u . X dW at the current state and at the predictor.

    Raises:
        BlowupError: If the new state is not admissible.
    '''
    config = traj.config
    increments = traj.stream.increments(traj.step_index)
    noise = traj.noise_field(increments)
    u = traj.u
    grad = traj.grid.gradient(u)
    base = u + config.dt * traj.drift_term(u, grad, corrections=False)
    transport = np.einsum('i...,i...->...', grad, noise)
    if traj.model.n_modes:
        predictor = base + transport
        transport_predicted = np.einsum(
            'i...,i...->...', traj.grid.gradient(predictor), noise
        )
        u_next = base + 0.5 * (transport + transport_predicted)
    else:
        u_next = base + transport
    if config.diffusion and config.semi_implicit:
        u_next = traj.solve_implicit(u_next, u)
    traj.commit(u_next, increments, noise)
    return traj


STEPPERS = {
    Scheme.ITO_EULER: step_ito,
    Scheme.STRATONOVICH_HEUN: step_stratonovich_heun,
}


def run(traj: Trajectory) -> TrajectoryResult:
    '''
    Advance a trajectory to t_end.

    Diagnostics are evaluated at step 0, every snapshot_stride steps, and at
    the final step. Results are deterministic given the configuration, the
    grid, the noise model and the increment source.

    Raises:
        BlowupError: With the failing step, if the trajectory leaves the admissible range.
    '''
    config, grid = traj.config, traj.grid
    logger.info(
        f'Running sample {traj.sample_index}: dim={grid.dim} m={grid.m} eps={config.eps} '
        f'dt={config.dt} steps={config.steps} scheme={config.scheme}'
    )
    stepper = STEPPERS[config.scheme]
    if traj.recorder is not None and traj.step_index == 0:
        traj.recorder.start(traj.u)
    traj.snapshot()
    while traj.step_index < config.steps:
        stepper(traj)
        if traj.step_index % config.snapshot_stride == 0 or traj.step_index == config.steps:
            traj.snapshot()

    return TrajectoryResult(
        config=config,
        grid=grid,
        final=traj.u.copy(),
        times=list(traj.times),
        snapshots=list(traj.snapshots),
        reports=list(traj.reports),
        increments=traj.increments.copy(),
        ledger=traj.recorder.ledger if traj.recorder is not None else None,
        initial_energy=traj.initial_energy,
        sample_index=traj.sample_index,
    )


def transport_config(config: SolverConfig) -> SolverConfig:
    '''
    The same configuration with reaction and Laplacian switched off.
    '''
    return replace(config, reaction=False, diffusion=False)


def run_transport(traj: Trajectory) -> TrajectoryResult:
    '''
    Integrate the pure transport equation du = grad u . X(o dt).

    The trajectory must be built with a transport configuration (see
    transport_config); the exact solution is u0 composed with the inverse
    stochastic flow.

    Raises:
        ContractError: If reaction or diffusion is enabled, or the model has no modes.
    '''
    if traj.config.reaction or traj.config.diffusion:
        raise ContractError('run_transport needs reaction and diffusion disabled')
    if not traj.model.n_modes:
        raise ContractError('run_transport needs at least one noise mode')
    return run(traj)
