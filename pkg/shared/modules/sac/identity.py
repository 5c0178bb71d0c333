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
Energy identity bookkeeping.

Along a trajectory the (localized) energy obeys

    d mu(eta) = - int eta w^2/eps dt + int w grad eta . grad u dt
                + int (eta w - eps grad eta . grad u) grad u . (X dW + b dt)
                + int eps grad u . Q grad u + q F(u)/eps dt

with (Q, q) = (Psi, psi) for eta = 1. The IdentityLedger accumulates each term
step by step while the solver runs, so that residuals over any window of step
times can be read off afterwards:

    residual = delta mu + dissipation - flux - martingale - remainder

Time integrals use the trapezoid rule over each step; the stochastic integral
and its quadratic variation use the start-of-step state.
'''

from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .diagnostics import diffuse_mean_curvature, energy_density
from .exceptions import ContractError
from .grid import Grid
from .localization import TestFunction
from .potential import DoubleWell, f_eval

if TYPE_CHECKING:
    from .solver import TrajectoryResult

logger = logging.getLogger()

GLOBAL = 'global'


def remainder_density(
    matrix: np.ndarray, scalar: np.ndarray, grad: np.ndarray, f_values: np.ndarray, eps: float
) -> np.ndarray:
    '''
    eps grad u . M grad u + s F(u)/eps for a matrix field M and a scalar field s.
    '''
    quadratic = np.einsum('i...,ij...,j...->...', grad, matrix, grad)
    return eps * quadratic + scalar * f_values / eps


@dataclass(frozen=True)
class LedgerChannel:
    '''
    Static fields of one tracked test function.

    The global channel carries eta = None and uses (Psi, psi) directly.

    Attributes:
        label: Channel name.
        eta: Nodal values of eta, or None for the global channel.
        grad_eta: Nodal gradient of eta.
        matrix: Q (or Psi) at the nodes.
        scalar: q (or psi) at the nodes.
    '''

    label: str
    eta: np.ndarray | None
    grad_eta: np.ndarray | None
    matrix: np.ndarray
    scalar: np.ndarray


@dataclass
class _StateTerms:
    '''
    Integrals and start-of-step weights of one state, per channel.
    '''

    measure: dict[str, float]
    dissipation: dict[str, float]
    flux: dict[str, float]
    remainder: dict[str, float]
    weights: dict[str, np.ndarray]
    grad: np.ndarray


@dataclass
class IdentityLedger:  # pylint: disable=too-many-instance-attributes
    '''
    Cumulative energy identity terms per step and per channel.

    Every series has one entry per step time t_n = n dt, n = 0..steps. The
    measure series holds mu(eta) at t_n; the other series hold the integral of
    their term from 0 to t_n.

    Attributes:
        dt: Step size.
        labels: Channel names, 'global' first.
    '''

    dt: float
    labels: tuple[str, ...]
    measure: dict[str, list[float]] = field(default_factory=dict)
    dissipation: dict[str, list[float]] = field(default_factory=dict)
    flux: dict[str, list[float]] = field(default_factory=dict)
    martingale: dict[str, list[float]] = field(default_factory=dict)
    remainder: dict[str, list[float]] = field(default_factory=dict)
    quadratic_variation: dict[str, list[float]] = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.measure[GLOBAL]) - 1

    def index(self, t: float) -> int:
        '''
        Step index of a step time.

        Raises:
            ContractError: If t is not a recorded step time.
        '''
        n = int(round(t / self.dt))
        if n < 0 or n > self.steps or abs(n * self.dt - t) > 1e-9 * max(1.0, abs(t)):
            raise ContractError(f'{t} is not a recorded step time')
        return n

    def window(self, label: str, t0: float, t1: float) -> tuple[float, float, float]:
        '''
        Identity residual, martingale term and its quadratic variation on [t0, t1].

        Raises:
            ContractError: If the channel is not tracked or the window is invalid.
        '''
        if label not in self.labels:
            raise ContractError(f'Test function {label} was not tracked by this run')
        if not t0 < t1:
            raise ContractError(f'Empty identity window [{t0}, {t1}]')
        i0, i1 = self.index(t0), self.index(t1)

        def delta(series: dict[str, list[float]]) -> float:
            return series[label][i1] - series[label][i0]

        martingale = delta(self.martingale)
        residual = (
            delta(self.measure)
            + delta(self.dissipation)
            - delta(self.flux)
            - martingale
            - delta(self.remainder)
        )
        return residual, martingale, delta(self.quadratic_variation)


class LedgerRecorder:
    '''
    Feeds an IdentityLedger from consecutive solver states.

    Args:
        grid: The grid.
        potential: The double-well potential.
        eps: Interface width.
        dt: Step size.
        channels: Global channel followed by one channel per tracked test function.
        modes: Nodal mode values X of shape (N, dim, *S).
        drift: Nodal drift b of shape (dim, *S).
    '''

    def __init__(  # pylint: disable=too-many-arguments,too-many-positional-arguments
        self,
        grid: Grid,
        potential: DoubleWell,
        eps: float,
        dt: float,
        channels: Sequence[LedgerChannel],
        modes: np.ndarray,
        drift: np.ndarray,
    ) -> None:
        self.grid = grid
        self.potential = potential
        self.eps = eps
        self.dt = dt
        self.channels = tuple(channels)
        self.modes = modes
        self.drift = drift
        labels = tuple(channel.label for channel in self.channels)
        self.ledger = IdentityLedger(dt, labels)
        self._previous: _StateTerms | None = None

    def _terms(self, u: np.ndarray) -> _StateTerms:
        grid, eps = self.grid, self.eps
        density = energy_density(grid, self.potential, u, eps)
        w = diffuse_mean_curvature(grid, self.potential, u, eps)
        grad = grid.gradient(u)
        f_values = f_eval(self.potential, u)
        terms = _StateTerms({}, {}, {}, {}, {}, grad)
        for channel in self.channels:
            rest = remainder_density(channel.matrix, channel.scalar, grad, f_values, eps)
            if channel.eta is None or channel.grad_eta is None:
                terms.measure[channel.label] = grid.integrate(density)
                terms.dissipation[channel.label] = grid.integrate(w * w / eps)
                terms.flux[channel.label] = 0.0
                terms.weights[channel.label] = w
            else:
                eta_grad_u = np.einsum('i...,i...->...', channel.grad_eta, grad)
                terms.measure[channel.label] = grid.integrate(channel.eta * density)
                terms.dissipation[channel.label] = grid.integrate(channel.eta * (w * w / eps))
                terms.flux[channel.label] = grid.integrate(w * eta_grad_u)
                terms.weights[channel.label] = channel.eta * w - eps * eta_grad_u
            terms.remainder[channel.label] = grid.integrate(rest)
        return terms

    def start(self, u: np.ndarray) -> None:
        '''
        Record the initial state.
        '''
        self._previous = self._terms(u)
        ledger = self.ledger
        for label in ledger.labels:
            ledger.measure[label] = [self._previous.measure[label]]
            for series in (
                ledger.dissipation,
                ledger.flux,
                ledger.martingale,
                ledger.remainder,
                ledger.quadratic_variation,
            ):
                series[label] = [0.0]

    def advance(self, u_next: np.ndarray, noise: np.ndarray) -> None:
        '''
        Record one step.

        Args:
            u_next: State at the end of the step.
            noise: sum_k X^k dW_k at the nodes for this step, shape (dim, *S).
        '''
        if self._previous is None:
            raise ContractError('LedgerRecorder.start must be called before advance')
        before, after = self._previous, self._terms(u_next)
        grid, dt, ledger = self.grid, self.dt, self.ledger
        displacement = noise + self.drift * dt
        transport = np.einsum('i...,i...->...', before.grad, displacement)
        mode_transport = np.einsum('i...,ki...->k...', before.grad, self.modes)

        for label in ledger.labels:
            weight = before.weights[label]
            increment = grid.integrate(weight * transport)
            pairings = np.array([grid.integrate(weight * x) for x in mode_transport])

            ledger.measure[label].append(after.measure[label])
            ledger.dissipation[label].append(
                ledger.dissipation[label][-1]
                + 0.5 * dt * (before.dissipation[label] + after.dissipation[label])
            )
            ledger.flux[label].append(
                ledger.flux[label][-1] + 0.5 * dt * (before.flux[label] + after.flux[label])
            )
            ledger.remainder[label].append(
                ledger.remainder[label][-1]
                + 0.5 * dt * (before.remainder[label] + after.remainder[label])
            )
            ledger.martingale[label].append(ledger.martingale[label][-1] + increment)
            ledger.quadratic_variation[label].append(
                ledger.quadratic_variation[label][-1] + dt * float(np.sum(pairings * pairings))
            )
        self._previous = after


def _ledger(result: TrajectoryResult) -> IdentityLedger:
    if result.ledger is None or result.increments is None:
        raise ContractError('Trajectory result carries no increment record')
    return result.ledger


def global_identity_residual(
    result: TrajectoryResult, t0: float, t1: float
) -> tuple[float, float, float]:
    '''
    Residual of the global energy identity on [t0, t1].

    Args:
        result: A trajectory result recorded with its identity ledger.
        t0: Window start, a step time.
        t1: Window end, a step time.

    Returns:
        (residual, martingale term, quadratic variation estimate of the martingale term).

    Raises:
        ContractError: If the result has no increment record or the window is invalid.
    '''
    return _ledger(result).window(GLOBAL, t0, t1)


def localized_identity_residual(
    result: TrajectoryResult, t0: float, t1: float, eta: TestFunction
) -> float:
    '''
    Residual of the localized energy identity on [t0, t1] for a tracked test function.

    For eta = constant_one the residual equals the global one bitwise.

    Raises:
        ContractError: If eta was not tracked, the result has no increment record,
            or the window is invalid.
    '''
    residual, _, _ = _ledger(result).window(eta.label, t0, t1)
    return residual
