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
Noise module: the finite-mode vector field valued Brownian motion.

    X(t, x) = X0(t, x) t + sum_k X^k(x) W_k(t)

NoiseModel holds the drift X0 and the Brownian modes X^k. LocalCharacteristic
evaluates, at a set of points, everything the solvers and the energy identities
derive from the local characteristic a_ij(x, y) = sum_k X^k_i(x) X^k_j(y):
the Ito-Stratonovich corrections A and c, their derivatives, and the
coefficients Psi, psi of the global energy identity.

Brownian increments come from counter-based Philox streams keyed by
(master seed, sample index) with the step index in the counter, so any step of
any sample can be drawn independently of the schedule.
'''

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import logging
from typing import Any, Optional, Protocol

import numpy as np

from .exceptions import DomainError, NoiseStreamExhausted
from .grid import Grid, VectorFieldSample
from .modes import ModeFactory, VectorMode

logger = logging.getLogger()


@dataclass(frozen=True)
class NoiseModel:
    '''
    Drift field and Brownian modes of the noise.

    Attributes:
        dim: Spatial dimension.
        modes: The Brownian mode fields X^1..X^N (N = 0 is the deterministic equation).
        drift: The drift field X0, or None for zero drift.
        support_margin: Width of the boundary collar on which every mode vanishes
            under Neumann closure.
    '''

    dim: int
    modes: tuple[VectorMode, ...] = ()
    drift: Optional[VectorMode] = None
    support_margin: float = 0.05

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def time_dependent(self) -> bool:
        fields = self.modes + ((self.drift,) if self.drift is not None else ())
        return any(f.time_dependent for f in fields)

    @classmethod
    def from_dict(cls, data: dict[str, Any], dim: int) -> NoiseModel:
        '''
        Build a noise model from its configuration section.

        Args:
            data: Mapping with 'modes' (list of field mappings), 'drift'
                (field mapping, kind 'zero' for none) and 'support_margin'.
            dim: Spatial dimension.
        '''
        modes = tuple(ModeFactory.create(mode, dim) for mode in data.get('modes', []))
        drift_data = dict(data.get('drift', {'kind': 'zero'}))
        drift = None if drift_data.get('kind', 'zero') == 'zero' else ModeFactory.create(
            drift_data, dim
        )
        return cls(dim, modes, drift, float(data.get('support_margin', 0.05)))

    def validate(self, grid: Grid) -> None:
        '''
        Check that the model fits the grid.

        Raises:
            DomainError: On dimension mismatch, periodic-only fields on a Neumann grid,
                or modes that do not vanish in the boundary collar.
        '''
        if self.dim != grid.dim:
            raise DomainError(f'noise dimension {self.dim} does not match grid {grid.dim}')
        fields = self.modes + ((self.drift,) if self.drift is not None else ())
        if grid.periodic:
            return

        for mode in fields:
            if mode.periodic_only:
                raise DomainError(f'{mode.kind} fields need periodic closure')

        collar = grid.distance_to_boundary() <= self.support_margin
        for index, mode in enumerate(self.modes):
            support = mode.support()
            if support is not None:
                center, radius = support
                if np.any(center - radius < self.support_margin) or np.any(
                    center + radius > 1.0 - self.support_margin
                ):
                    raise DomainError(
                        f'mode {index} ({mode.kind}) reaches into the boundary collar '
                        f'of width {self.support_margin}'
                    )
            value, _, _ = mode.evaluate(0.0, grid.coordinates)
            if np.any(value[:, collar] != 0.0):
                raise DomainError(f'mode {index} ({mode.kind}) does not vanish near the boundary')

    def sample(self, t: float, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        '''
        Values and derivatives of all modes, stacked along a leading mode axis.

        Returns:
            (X, J, H) with shapes (N, dim, *S), (N, dim, dim, *S), (N, dim, dim, dim, *S).
        '''
        shape = points.shape[1:]
        if not self.modes:
            return (
                np.zeros((0, self.dim) + shape),
                np.zeros((0, self.dim, self.dim) + shape),
                np.zeros((0, self.dim, self.dim, self.dim) + shape),
            )
        samples = [mode.evaluate(t, points) for mode in self.modes]
        return (
            np.stack([s[0] for s in samples]),
            np.stack([s[1] for s in samples]),
            np.stack([s[2] for s in samples]),
        )

    def drift_sample(self, t: float, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        '''
        Drift value and Jacobian, zeros when the model has no drift.
        '''
        shape = points.shape[1:]
        if self.drift is None:
            return np.zeros((self.dim,) + shape), np.zeros((self.dim, self.dim) + shape)
        value, jacobian, _ = self.drift.evaluate(t, points)
        return value, jacobian

    def characteristic(self, t: float, points: np.ndarray) -> LocalCharacteristic:
        '''
        The local characteristic and derived fields at the given points.
        '''
        values, jacobians, hessians = self.sample(t, points)
        drift, drift_jacobian = self.drift_sample(t, points)
        return LocalCharacteristic(values, jacobians, hessians, drift, drift_jacobian)


@dataclass(frozen=True)
class LocalCharacteristic:  # pylint: disable=too-many-instance-attributes
    '''
    Derived view of a noise model at a set of points.

    Index conventions follow the module docstring; the mode axis comes first in
    the raw samples and is summed out in every derived field.

    Attributes:
        X: Mode values (N, dim, *S).
        J: Mode Jacobians (N, dim, dim, *S).
        H: Mode second derivatives (N, dim, dim, dim, *S).
        b: Drift value (dim, *S).
        Db: Drift Jacobian (dim, dim, *S).
    '''

    X: np.ndarray
    J: np.ndarray
    H: np.ndarray
    b: np.ndarray
    Db: np.ndarray

    @cached_property
    def A(self) -> np.ndarray:
        '''
        A_ij = sum_k X^k_i X^k_j, shape (dim, dim, *S).
        '''
        return np.einsum('ki...,kj...->ij...', self.X, self.X)

    @cached_property
    def c(self) -> np.ndarray:
        '''
        c_j = sum_k sum_i X^k_i d_i X^k_j, shape (dim, *S).
        '''
        return np.einsum('ki...,kji...->j...', self.X, self.J)

    @cached_property
    def mode_divergence(self) -> np.ndarray:
        return np.einsum('kii...->k...', self.J)

    @cached_property
    def div_A(self) -> np.ndarray:
        '''
        (div A)_j = sum_i d_i A_ij = sum_k (div X^k) X^k_j + c_j.
        '''
        return np.einsum('k...,kj...->j...', self.mode_divergence, self.X) + self.c

    @cached_property
    def dA(self) -> np.ndarray:
        '''
        dA[i, j, l] = d_l A_ij = sum_k (J_il X_j + X_i J_jl), shape (dim, dim, dim, *S).
        '''
        half = np.einsum('kil...,kj...->ijl...', self.J, self.X)
        return half + np.swapaxes(half, 0, 1)

    @cached_property
    def Dc(self) -> np.ndarray:
        '''
        (Dc)_jl = d_l c_j = sum_k sum_i (J_il J_ji + X_i H_jil), shape (dim, dim, *S).
        '''
        return np.einsum('kil...,kji...->jl...', self.J, self.J) + np.einsum(
            'ki...,kjil...->jl...', self.X, self.H
        )

    @cached_property
    def div_c(self) -> np.ndarray:
        return np.einsum('jj...->...', self.Dc)

    @cached_property
    def cross_gradient(self) -> np.ndarray:
        '''
        sum_k sum_m d_m X^k_i d_m X^k_j, the mixed derivative of a(x, y) on the diagonal.
        '''
        return np.einsum('kim...,kjm...->ij...', self.J, self.J)

    @cached_property
    def D_div_A(self) -> np.ndarray:
        '''
        d_l (div A)_j = sum_k (d_l div X^k) X^k_j + (div X^k) J_jl + (Dc)_jl.
        '''
        grad_divergence = np.einsum('kiil...->kl...', self.H)
        return (
            np.einsum('kl...,kj...->jl...', grad_divergence, self.X)
            + np.einsum('k...,kjl...->jl...', self.mode_divergence, self.J)
            + self.Dc
        )

    @cached_property
    def div_div_A(self) -> np.ndarray:
        return np.einsum('jj...->...', self.D_div_A)

    @cached_property
    def Psi(self) -> np.ndarray:
        '''
        Symmetric matrix field of the gradient term in the global energy identity.

            Psi = 1/2 (Dc + cross_gradient - D(div A)) + 1/4 (div div A - div c) Id
        '''
        dim = self.A.shape[0]
        matrix = 0.5 * (self.Dc + self.cross_gradient - self.D_div_A)
        matrix = 0.5 * (matrix + np.swapaxes(matrix, 0, 1))
        trace_part = 0.25 * (self.div_div_A - self.div_c)
        for j in range(dim):
            matrix[j, j] = matrix[j, j] + trace_part
        return matrix

    @cached_property
    def psi(self) -> np.ndarray:
        '''
        Scalar field of the potential term in the global energy identity.
        '''
        return 0.5 * (-self.div_c + self.div_div_A)

    def localized_bracket(
        self, eta: np.ndarray, grad_eta: np.ndarray, hess_eta: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        '''
        Matrix and scalar coefficients of the localized energy identity remainder.

        The remainder density is eps grad u . Q grad u + q F(u)/eps with

            Q = eta Psi - 1/2 sym(M) + (-1/4 grad eta.c + 1/4 A:D^2 eta
                + 1/2 grad eta.div A) Id
            q = eta psi - 1/2 grad eta.c + 1/2 A:D^2 eta + grad eta.div A

        where M_lj = sum_i d_i eta d_l A_ij. For eta = 1 all correction terms
        vanish and (Q, q) reduce to (Psi, psi).

        Args:
            eta: Test function values (*S).
            grad_eta: Its gradient (dim, *S).
            hess_eta: Its Hessian (dim, dim, *S).

        Returns:
            (Q, q) with shapes (dim, dim, *S) and (*S).
        '''
        dim = self.A.shape[0]
        eta_c = np.einsum('i...,i...->...', grad_eta, self.c)
        a_hess = np.einsum('ij...,ij...->...', self.A, hess_eta)
        eta_div_a = np.einsum('i...,i...->...', grad_eta, self.div_A)
        mixed = np.einsum('i...,ijl...->lj...', grad_eta, self.dA)
        mixed = 0.5 * (mixed + np.swapaxes(mixed, 0, 1))

        matrix = eta * self.Psi - 0.5 * mixed
        trace_part = -0.25 * eta_c + 0.25 * a_hess + 0.5 * eta_div_a
        for j in range(dim):
            matrix[j, j] = matrix[j, j] + trace_part
        scalar = eta * self.psi + (-0.5 * eta_c + 0.5 * a_hess + eta_div_a)
        return matrix, scalar

    def largest_eigenvalue_of_A(self) -> float:
        '''
        Maximum over points of the largest eigenvalue of A.
        '''
        if self.X.shape[0] == 0:
            return 0.0
        matrices = np.moveaxis(self.A.reshape(self.A.shape[:2] + (-1,)), -1, 0)
        return float(np.max(np.linalg.eigvalsh(matrices)))


def _point_array(x: Any, dim: int) -> np.ndarray:
    point = np.asarray(x, dtype=float).reshape(dim, 1)
    return point


def a_tilde(model: NoiseModel, t: float, x: Any, y: Any) -> np.ndarray:
    '''
    The local characteristic a_ij(t, x, y) = sum_k X^k_i(x) X^k_j(y) as a dim x dim matrix.
    '''
    values_x, _, _ = model.sample(t, _point_array(x, model.dim))
    values_y, _, _ = model.sample(t, _point_array(y, model.dim))
    return np.einsum('ki,kj->ij', values_x[..., 0], values_y[..., 0])


def correction_A(model: NoiseModel, t: float, x: Any) -> np.ndarray:  # pylint: disable=invalid-name
    return model.characteristic(t, _point_array(x, model.dim)).A[..., 0]


def correction_c(model: NoiseModel, t: float, x: Any) -> np.ndarray:
    return model.characteristic(t, _point_array(x, model.dim)).c[..., 0]


def psi_fields(model: NoiseModel, t: float, x: Any) -> tuple[np.ndarray, float]:
    '''
    The pair (Psi, psi) of the global energy identity at a point.
    '''
    characteristic = model.characteristic(t, _point_array(x, model.dim))
    return characteristic.Psi[..., 0], float(characteristic.psi[0])


class IncrementSource(Protocol):  # pylint: disable=too-few-public-methods
    '''
    Anything that yields the Brownian increments of a numbered step.
    '''

    n_modes: int

    def increments(self, step: int) -> np.ndarray: ...


@dataclass
class NoiseStream:
    '''
    Counter-based stream of Brownian increments for one sample path.

    Increments of step s are the sums of `refinement` consecutive base increments
    of variance base_dt, so streams with the same key and different refinement
    are coarsenings of one Brownian path.

    Attributes:
        master_seed: Seed of the whole experiment.
        sample_index: Index of the sample path.
        n_modes: Number of Brownian modes N.
        base_dt: Variance of one base increment.
        refinement: Number of base increments per step.
    '''

    master_seed: int
    sample_index: int
    n_modes: int
    base_dt: float
    refinement: int = 1

    _key: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.base_dt <= 0.0 or self.refinement < 1:
            raise DomainError('base_dt must be positive and refinement at least 1')
        sequence = np.random.SeedSequence([self.master_seed, self.sample_index])
        self._key = sequence.generate_state(2, dtype=np.uint64)

    @property
    def dt(self) -> float:
        return self.base_dt * self.refinement

    def base_increments(self, base_step: int) -> np.ndarray:
        '''
        Standard normal draws scaled to variance base_dt for one base step.
        '''
        counter = np.array([0, 0, 0, base_step], dtype=np.uint64)
        generator = np.random.Generator(np.random.Philox(key=self._key, counter=counter))
        return np.sqrt(self.base_dt) * generator.standard_normal(self.n_modes)

    def increments(self, step: int) -> np.ndarray:
        total = np.zeros(self.n_modes)
        for base_step in range(step * self.refinement, (step + 1) * self.refinement):
            total = total + self.base_increments(base_step)
        return total

    def coarsened(self, refinement: int) -> NoiseStream:
        '''
        A stream of the same path with `refinement` base steps per step.
        '''
        return NoiseStream(
            self.master_seed, self.sample_index, self.n_modes, self.base_dt, refinement
        )


@dataclass
class RecordedNoiseStream:
    '''
    Replay of a recorded increment table of shape (steps, N).
    '''

    record: np.ndarray

    @property
    def n_modes(self) -> int:
        return int(self.record.shape[1])

    def increments(self, step: int) -> np.ndarray:
        if step >= self.record.shape[0]:
            raise NoiseStreamExhausted(
                f'Increment record has {self.record.shape[0]} steps, step {step} requested'
            )
        return self.record[step]


def sample_noise_increment(
    model: NoiseModel,
    grid: Grid,
    t: float,
    dt: float,
    rng_stream: IncrementSource,
    step: int = 0,
) -> tuple[VectorFieldSample, np.ndarray]:
    '''
    Draw the increments of one step and assemble the nodal noise field.

    Args:
        model: The noise model.
        grid: Grid whose nodes sample the field.
        t: Start time of the step.
        dt: Step size; must match the stream's step size.
        rng_stream: Source of increments.
        step: Step index.

    Returns:
        (sum_k X^k dW_k at the nodes, the raw increments dW).
    '''
    if dt <= 0.0:
        raise DomainError(f'dt must be positive, got {dt}')
    increments = rng_stream.increments(step)
    values, _, _ = model.sample(t, grid.coordinates)
    field_values = np.tensordot(increments, values, axes=1) if model.n_modes else np.zeros(
        (grid.dim,) + grid.shape
    )
    return VectorFieldSample(grid, field_values), increments
