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
Double-well potential module.

This module provides the DoubleWell description of the potential F, its first
two derivatives, the Modica-Mortola transform G(r) = integral of sqrt(2F) from
0 to r, the inverse of G, and the sharp-interface constants derived from them.

The standard quartic F(r) = (1 - r^2)^2 / 4 is evaluated in closed form. Custom
potentials are even polynomials given by their coefficients in r^0, r^2, r^4, ...
'''

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
import logging
import math
from typing import Any

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from .exceptions import DomainError, RangeError

logger = logging.getLogger()

SQRT2 = math.sqrt(2.0)


class PotentialKind(StrEnum):
    '''
    Supported families of double-well potentials.
    '''

    STANDARD_QUARTIC = 'standard_quartic'
    CUSTOM = 'custom'


@dataclass(frozen=True)
class DoubleWell:
    '''
    Description of a smooth, even double-well potential.

    Attributes:
        kind: Potential family.
        coefficients: For custom potentials, coefficients of r^0, r^2, r^4, ...
        growth_exponent: The delta of the growth condition F(r) >= C |r|^(2 + delta).
        growth_constant: The C of the growth condition.
        growth_threshold: |r| above which the growth condition is required.
    '''

    kind: PotentialKind = PotentialKind.STANDARD_QUARTIC
    coefficients: tuple[float, ...] = field(default=())
    growth_exponent: float = 2.0
    growth_constant: float = 0.1
    growth_threshold: float = 2.0

    SAMPLING_GRID = np.linspace(-4.0, 4.0, 8001)
    GAUSS_NODES = 24

    @cached_property
    def polynomial(self) -> Polynomial:
        '''
        The potential as a full numpy Polynomial in r.
        '''
        if self.kind == PotentialKind.STANDARD_QUARTIC:
            return Polynomial([0.25, 0.0, -0.5, 0.0, 0.25])

        full = np.zeros(2 * len(self.coefficients) - 1 if self.coefficients else 1)
        full[::2] = self.coefficients
        return Polynomial(full)

    @cached_property
    def _first(self) -> Polynomial:
        return self.polynomial.deriv(1)

    @cached_property
    def _second(self) -> Polynomial:
        return self.polynomial.deriv(2)

    def validate(self) -> None:
        '''
        Check the invariants of a double-well potential on the sampling grid.

        Raises:
            DomainError: If any invariant fails, naming the first failing one.
        '''
        r = self.SAMPLING_GRID
        values = f_eval(self, r)
        slopes = f_prime(self, r)

        if np.any(values < -1e-14):
            raise DomainError('F must be non-negative')
        if abs(f_eval(self, 1.0)) > 1e-14 or abs(f_eval(self, -1.0)) > 1e-14:
            raise DomainError('F must vanish at r = +/-1')
        wells = np.isclose(np.abs(r), 1.0, atol=1e-9)
        if np.any(values[~wells] <= 0.0):
            raise DomainError('F must vanish only at r = +/-1')

        for root in (-1.0, 0.0, 1.0):
            if abs(f_prime(self, root)) > 1e-12:
                raise DomainError(f'F\' must vanish at r = {root}')
        sign_changes = np.count_nonzero(np.diff(np.sign(slopes[slopes != 0.0])))
        if sign_changes != 3:
            raise DomainError(f'F\' must have exactly three zeros, found {sign_changes}')

        if f_second(self, 0.0) >= 0.0:
            raise DomainError('F\'\'(0) must be negative')
        if f_second(self, 1.0) <= 0.0 or f_second(self, -1.0) <= 0.0:
            raise DomainError('F\'\'(+/-1) must be positive')

        if not np.allclose(values, f_eval(self, -r), rtol=1e-12, atol=1e-14):
            raise DomainError('F must be even')

        tail = np.abs(r) >= self.growth_threshold
        bound = self.growth_constant * np.abs(r[tail]) ** (2.0 + self.growth_exponent)
        if np.any(values[tail] < bound):
            raise DomainError(
                f'F violates the growth condition C |r|^(2 + delta) with '
                f'C = {self.growth_constant}, delta = {self.growth_exponent}'
            )

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DoubleWell:
        '''
        Build a potential from its configuration section.

        Args:
            data: Mapping with the keys kind, coefficients, growth_exponent,
                growth_constant and growth_threshold (all optional).

        Returns:
            A validated DoubleWell.
        '''
        well = cls(
            kind=PotentialKind(data.get('kind', PotentialKind.STANDARD_QUARTIC)),
            coefficients=tuple(float(c) for c in data.get('coefficients', ())),
            growth_exponent=float(data.get('growth_exponent', 2.0)),
            growth_constant=float(data.get('growth_constant', 0.1)),
            growth_threshold=float(data.get('growth_threshold', 2.0)),
        )
        if well.kind == PotentialKind.CUSTOM and not well.coefficients:
            raise DomainError('custom potentials need coefficients')
        well.validate()
        return well


STANDARD_QUARTIC = DoubleWell()


def _check_finite(r: Any) -> None:
    if not np.all(np.isfinite(r)):
        raise DomainError(f'Potential evaluated at non-finite argument: {r}')


def f_eval(w: DoubleWell, r: Any) -> Any:
    '''
    Evaluate F(r) for a scalar or an array.

    Raises:
        DomainError: If r is not finite.
    '''
    _check_finite(r)
    if w.kind == PotentialKind.STANDARD_QUARTIC:
        s = 1.0 - r * r
        return 0.25 * s * s
    return w.polynomial(r)


def f_prime(w: DoubleWell, r: Any) -> Any:
    '''
    Evaluate F'(r) for a scalar or an array.
    '''
    _check_finite(r)
    if w.kind == PotentialKind.STANDARD_QUARTIC:
        return r * r * r - r
    return w._first(r)  # pylint: disable=protected-access


def f_second(w: DoubleWell, r: Any) -> Any:
    '''
    Evaluate F''(r) for a scalar or an array.
    '''
    _check_finite(r)
    if w.kind == PotentialKind.STANDARD_QUARTIC:
        return 3.0 * r * r - 1.0
    return w._second(r)  # pylint: disable=protected-access


def max_abs_f_second(w: DoubleWell, bound: float = 1.2) -> float:
    '''
    Maximum of |F''| on [-bound, bound], used by the reaction stability bound.
    '''
    r = np.linspace(-bound, bound, 2401)
    return float(np.max(np.abs(f_second(w, r))))


def _surface_density(w: DoubleWell, s: Any) -> Any:
    return np.sqrt(2.0 * np.maximum(f_eval(w, s), 0.0))


def g_transform(w: DoubleWell, r: float) -> float:
    '''
    Evaluate the Modica-Mortola transform G(r) = int_0^r sqrt(2 F(s)) ds.

    Uses the closed form (r - r^3/3)/sqrt(2) for the standard quartic on
    [-1, 1] and adaptive quadrature otherwise. G is odd, so negative arguments
    are reflected.

    Args:
        w: The potential.
        r: Upper integration limit.

    Returns:
        G(r).

    Raises:
        DomainError: If r is not finite.
    '''
    _check_finite(r)
    r = float(r)
    if r < 0.0:
        return -g_transform(w, -r)
    if w.kind == PotentialKind.STANDARD_QUARTIC and r <= 1.0:
        return (r - r**3 / 3.0) / SQRT2

    points = [1.0] if r > 1.0 else None
    value, _ = integrate.quad(
        lambda s: float(_surface_density(w, s)),
        0.0,
        r,
        points=points,
        epsabs=1e-13,
        epsrel=1e-12,
        limit=200,
    )
    return float(value)


def _gauss_legendre(w: DoubleWell, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    nodes, weights = np.polynomial.legendre.leggauss(w.GAUSS_NODES)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    s = mid[..., None] + half[..., None] * nodes
    return half * np.sum(weights * _surface_density(w, s), axis=-1)


def g_field(w: DoubleWell, u: np.ndarray) -> np.ndarray:
    '''
    Evaluate G nodewise on an array.

    For the standard quartic G is piecewise polynomial and is evaluated in
    closed form everywhere. Custom potentials use Gauss-Legendre quadrature on
    [0, min(|r|, 1)] and [1, |r|], the pieces on which sqrt(2F) is smooth.
    '''
    _check_finite(u)
    r = np.abs(u)
    if w.kind == PotentialKind.STANDARD_QUARTIC:
        inner = np.minimum(r, 1.0)
        outer = np.maximum(r, 1.0)
        value = (inner - inner**3 / 3.0) / SQRT2
        value = value + ((outer**3 - 1.0) / 3.0 - (outer - 1.0)) / SQRT2
        return np.sign(u) * value

    inner = np.minimum(r, 1.0)
    value = _gauss_legendre(w, np.zeros_like(r), inner)
    value = value + _gauss_legendre(w, np.ones_like(r), np.maximum(r, 1.0))
    return np.sign(u) * value


def g_inverse(w: DoubleWell, y: float, max_abs: float = 1e3) -> float:
    '''
    Invert the Modica-Mortola transform.

    Brackets the root by doubling, bisects down to a bracket of width 1e-6 and
    polishes with Newton steps on G' = sqrt(2F) until
    |G(r) - y| <= 1e-12 (1 + |y|). Newton steps leaving the bracket fall back
    to bisection, which keeps the iteration safe near the wells where G' = 0.

    Args:
        w: The potential.
        y: Target value of G.
        max_abs: Largest |r| considered part of the range.

    Returns:
        r with G(r) = y.

    Raises:
        RangeError: If y is not finite or G^-1(y) lies beyond max_abs.
    '''
    if not math.isfinite(y):
        raise RangeError(f'G^-1 evaluated at non-finite value: {y}')
    if y == 0.0:
        return 0.0
    if y < 0.0:
        return -g_inverse(w, -y, max_abs)
    if y > g_transform(w, max_abs):
        raise RangeError(f'{y} lies outside the range of G on [-{max_abs}, {max_abs}]')

    tolerance = 1e-12 * (1.0 + abs(y))
    lo, hi = 0.0, 1.0
    while g_transform(w, hi) < y:
        lo, hi = hi, min(2.0 * hi, max_abs)

    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if g_transform(w, mid) < y:
            lo = mid
        else:
            hi = mid

    r = 0.5 * (lo + hi)
    for _ in range(100):
        residual = g_transform(w, r) - y
        if abs(residual) <= tolerance:
            return r
        if residual < 0.0:
            lo = r
        else:
            hi = r
        slope = float(_surface_density(w, r))
        candidate = r - residual / slope if slope > 0.0 else math.nan
        r = candidate if lo < candidate < hi else 0.5 * (lo + hi)

    logger.debug(f'G^-1({y}) stopped at residual {g_transform(w, r) - y}')
    return r


def surface_tension(w: DoubleWell) -> float:
    '''
    The sharp-interface constant c0 = int_{-1}^{1} sqrt(2F) = G(1) - G(-1).
    '''
    return g_transform(w, 1.0) - g_transform(w, -1.0)


def optimal_profile(w: DoubleWell, x: Any, eps: float) -> Any:
    '''
    The 1D standing wave solving eps u'' = F'(u)/eps with u(+/-inf) = +/-1.

    For the standard quartic this is tanh(x / (sqrt(2) eps)). For custom
    potentials the first integral eps u' = sqrt(2F(u)) is integrated with
    scipy's solve_ivp from u(0) = 0.

    Args:
        w: The potential.
        x: Scalar or array of signed distances to the interface.
        eps: Interface width.

    Returns:
        Profile values with the shape of x.
    '''
    if eps <= 0.0:
        raise DomainError(f'eps must be positive, got {eps}')
    if w.kind == PotentialKind.STANDARD_QUARTIC:
        if np.ndim(x) == 0:
            return math.tanh(float(x) / (SQRT2 * eps))
        return np.tanh(np.asarray(x, dtype=float) / (SQRT2 * eps))

    distance = np.abs(np.atleast_1d(np.asarray(x, dtype=float))).ravel()
    # solve_ivp needs strictly increasing output times
    targets, inverse = np.unique(distance, return_inverse=True)
    solution = integrate.solve_ivp(
        lambda _, u: _surface_density(w, u) / eps,
        (0.0, float(targets[-1]) if targets[-1] > 0.0 else 1.0),
        [0.0],
        t_eval=targets,
        rtol=1e-10,
        atol=1e-12,
    )
    values = np.minimum(solution.y[0], 1.0)[inverse]
    values = np.sign(np.asarray(x, dtype=float)).ravel() * values
    if np.ndim(x) == 0:
        return float(values[0])
    return values.reshape(np.shape(x))


def young_slack(w: DoubleWell, a: Any, r: Any, eps: float) -> Any:
    '''
    Slack of the pointwise inequality sqrt(2F(r)) a <= (eps/2) a^2 + F(r)/eps.

    The slack equals (sqrt(eps/2) a - sqrt(F(r)/eps))^2 and is non-negative
    for every a >= 0.
    '''
    f = f_eval(w, r)
    return 0.5 * eps * a * a + f / eps - np.sqrt(2.0 * f) * a


def growth_check(w: DoubleWell, r: np.ndarray) -> float:
    '''
    Smallest C_G with |G(r)| <= C_G (1 + F(r)) on the given sample.

    This linear bound transfers L^1 bounds of F(u)/eps to L^1 bounds of G(u).
    '''
    return float(np.max(np.abs(g_field(w, r)) / (1.0 + f_eval(w, r))))
