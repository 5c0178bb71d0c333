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
Energy and interface functionals of a phase field.

All functionals take nodal arrays on a Grid and use the grid quadrature, so
that surface_measure with eta = 1 and energy agree bitwise.

Functionals:
    energy                  int (eps/2)|grad u|^2 + F(u)/eps
    surface_measure         the same density weighted by a test function
    diffuse_mean_curvature  w = -eps lap u + F'(u)/eps
    normal_direction        grad u / |grad u| with a fixed tie vector
    g_diagnostics           G(u), int |grad G(u)|, int |G(u)|
    increment_statistic     scaling of E|<G(u(t + tau)) - G(u(t)), eta>|^(2p) in tau
'''

from __future__ import annotations

from dataclasses import asdict, dataclass, field
import logging
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .exceptions import ContractError
from .grid import Grid, VectorFieldSample
from .interface import circle_radius, interface_extract
from .localization import TestFunction
from .potential import DoubleWell, f_eval, f_prime, g_field

logger = logging.getLogger()

TIE_THRESHOLD = 1e-12


def energy_density(grid: Grid, w: DoubleWell, u: np.ndarray, eps: float) -> np.ndarray:
    return 0.5 * eps * grid.gradient_norm_sq(u) + f_eval(w, u) / eps


def energy(grid: Grid, w: DoubleWell, u: np.ndarray, eps: float) -> float:
    '''
    The Van der Waals-Cahn-Hilliard energy of u.
    '''
    return grid.integrate(energy_density(grid, w, u, eps))


def surface_measure(
    grid: Grid, w: DoubleWell, u: np.ndarray, eps: float, eta: TestFunction
) -> float:
    '''
    The diffuse surface measure mu_eps(eta) = int eta [(eps/2)|grad u|^2 + F(u)/eps].
    '''
    values, _, _ = eta.evaluate(grid.coordinates)
    return grid.integrate(values * energy_density(grid, w, u, eps))


def diffuse_mean_curvature(grid: Grid, w: DoubleWell, u: np.ndarray, eps: float) -> np.ndarray:
    '''
    The diffuse mean curvature w = -eps lap u + F'(u)/eps.
    '''
    return -eps * grid.laplacian(u) + f_prime(w, u) / eps


def willmore(grid: Grid, w: DoubleWell, u: np.ndarray, eps: float) -> float:
    '''
    int w^2 / eps.
    '''
    curvature = diffuse_mean_curvature(grid, w, u, eps)
    return grid.integrate(curvature * curvature / eps)


def normal_direction(grid: Grid, u: np.ndarray) -> VectorFieldSample:
    '''
    grad u / |grad u| where |grad u| exceeds the tie threshold, e1 elsewhere.
    '''
    grad = grid.gradient(u)
    norm = np.sqrt(np.sum(grad * grad, axis=0))
    tie = norm <= TIE_THRESHOLD
    normal = grad / np.where(tie, 1.0, norm)
    normal[:, tie] = 0.0
    normal[0, tie] = 1.0
    return VectorFieldSample(grid, normal)


def gradient_magnitude(grid: Grid, values: np.ndarray) -> np.ndarray:
    '''
    Nodal |grad v| from the compact one-sided differences.
    '''
    return np.sqrt(grid.gradient_norm_sq(values))


def g_diagnostics(
    grid: Grid, w: DoubleWell, u: np.ndarray
) -> tuple[np.ndarray, float, float]:
    '''
    Modica-Mortola transform of a field and its BV and L^1 norms.

    Returns:
        (G(u) nodewise, int |grad G(u)|, int |G(u)|).
    '''
    g_values = g_field(w, u)
    bv_g = grid.integrate(gradient_magnitude(grid, g_values))
    l1_g = grid.integrate(np.abs(g_values))
    return g_values, bv_g, l1_g


def w11_norm(grid: Grid, w: DoubleWell, u: np.ndarray) -> float:
    '''
    The W^{1,1} norm of G(u), int |G(u)| + int |grad G(u)|.
    '''
    _, bv_g, l1_g = g_diagnostics(grid, w, u)
    return l1_g + bv_g


def separation_fraction(grid: Grid, u: np.ndarray, level: float = 0.9) -> float:
    '''
    Volume fraction of the diffuse layer {|u| < level}.
    '''
    return grid.integrate((np.abs(u) < level).astype(float))


def g_pairing(grid: Grid, w: DoubleWell, u: np.ndarray, eta_values: np.ndarray) -> float:
    '''
    <G(u), eta> = int G(u) eta.
    '''
    return grid.integrate(g_field(w, u) * eta_values)


@dataclass
class EnergyReport:  # pylint: disable=too-many-instance-attributes
    '''
    Diagnostics of one snapshot.

    Attributes:
        t: Snapshot time.
        energy: E_eps(u).
        willmore: int w^2 / eps.
        bv_g: int |grad G(u)|.
        l1_g: int |G(u)|.
        l1_norm: int |u|.
        min_u: Minimum nodal value.
        max_u: Maximum nodal value.
        separation: Volume fraction of {|u| < 0.9}.
        mu_eta: Surface measure per tracked test function label.
        g_pairings: <G(u), eta> per tracked test function label.
        radius: Radius of the zero level set about a configured center, if any.
    '''

    t: float
    energy: float
    willmore: float
    bv_g: float
    l1_g: float
    l1_norm: float
    min_u: float
    max_u: float
    separation: float
    mu_eta: dict[str, float] = field(default_factory=dict)
    g_pairings: dict[str, float] = field(default_factory=dict)
    radius: Optional[float] = None

    def row(self) -> dict[str, float]:
        '''
        Flat mapping for the per-trajectory table.
        '''
        data = asdict(self)
        row = {k: v for k, v in data.items() if k not in ('mu_eta', 'g_pairings', 'radius')}
        if self.radius is not None:
            row['radius'] = self.radius
        return row


def snapshot_report(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    grid: Grid,
    w: DoubleWell,
    u: np.ndarray,
    eps: float,
    t: float,
    test_functions: Sequence[TestFunction] = (),
    circle_center: Optional[Sequence[float]] = None,
    separation_level: float = 0.9,
) -> EnergyReport:
    '''
    Evaluate every snapshot functional of a field.
    '''
    density = energy_density(grid, w, u, eps)
    _, bv_g, l1_g = g_diagnostics(grid, w, u)
    g_values = g_field(w, u)
    mu_eta = {}
    g_pairings = {}
    for eta in test_functions:
        values, _, _ = eta.evaluate(grid.coordinates)
        mu_eta[eta.label] = grid.integrate(values * density)
        g_pairings[eta.label] = grid.integrate(g_values * values)

    radius = None
    if circle_center is not None:
        radius = circle_radius(interface_extract(grid, u), circle_center)

    return EnergyReport(
        t=t,
        energy=grid.integrate(density),
        willmore=willmore(grid, w, u, eps),
        bv_g=bv_g,
        l1_g=l1_g,
        l1_norm=grid.integrate(np.abs(u)),
        min_u=float(np.min(u)),
        max_u=float(np.max(u)),
        separation=separation_fraction(grid, u, separation_level),
        mu_eta=mu_eta,
        g_pairings=g_pairings,
        radius=radius,
    )


@dataclass
class IncrementFit:
    '''
    Result of an increment scaling fit.

    Attributes:
        lags: Lags tau (in time units) with a defined moment.
        moments: Empirical E|<G(u(t + tau)) - G(u(t)), eta>|^(2p) per lag.
        slope: Fitted log-log slope of moments against lags.
        intercept: Fitted log intercept.
        order: Moment order p.
    '''

    lags: np.ndarray
    moments: np.ndarray
    slope: float
    intercept: float
    order: int


def increment_statistic(
    pairings: np.ndarray,
    times: np.ndarray,
    lag_steps: Sequence[int],
    order: int = 1,
    min_samples: int = 100,
) -> IncrementFit:
    '''
    Fit the scaling of G-increments against the lag.

    For each lag tau = lag_steps[i] snapshot intervals, averages
    |<G(u(t + tau)), eta> - <G(u(t)), eta>|^(2p) over all start times and
    samples, then fits a line to log moment versus log tau.

    Args:
        pairings: Array (samples, snapshots) of <G(u(t_j)), eta>.
        times: Snapshot times, equally spaced.
        lag_steps: Lags as multiples of the snapshot spacing.
        order: Moment order p.
        min_samples: Smallest admissible number of samples.

    Returns:
        The fit. The slope and intercept are NaN unless at least two distinct
        lags have a positive moment.

    Raises:
        ContractError: With too few samples or lags beyond the snapshot grid.
    '''
    pairings = np.atleast_2d(pairings)
    if pairings.shape[0] < min_samples:
        raise ContractError(
            f'Increment statistic needs {min_samples} samples, got {pairings.shape[0]}'
        )
    if max(lag_steps) >= pairings.shape[1]:
        raise ContractError(f'Lag {max(lag_steps)} exceeds the snapshot grid')

    spacing = float(times[1] - times[0])
    lags = np.array([spacing * k for k in lag_steps])
    moments = np.array(
        [
            np.mean(np.abs(pairings[:, k:] - pairings[:, :-k]) ** (2 * order))
            for k in lag_steps
        ]
    )
    positive = moments > 0.0
    if len(np.unique(lags[positive])) < 2:
        return IncrementFit(lags, moments, float('nan'), float('nan'), order)

    fit = stats.linregress(np.log(lags[positive]), np.log(moments[positive]))
    logger.debug(f'Increment fit p={order}: slope {fit.slope:.3f}')
    return IncrementFit(lags, moments, float(fit.slope), float(fit.intercept), order)
