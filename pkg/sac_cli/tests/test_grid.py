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

# pylint: disable=missing-class-docstring, missing-function-docstring, missing-module-docstring
# mypy: disable-error-code=no-untyped-def

from abc import ABC
from dataclasses import dataclass

import numpy as np
import pytest

from sac.exceptions import DomainError
from sac.grid import Closure, Grid, ScalarField, VectorFieldSample, divergence, gradient


@dataclass
class Scenario(ABC):
    name: str

    def __init__(self, name: str):
        self.name = name

    def __str__(self):
        return self.name


@dataclass
class GridScenario(Scenario):
    dim: int = 1
    m: int = 16
    closure: Closure = Closure.NEUMANN

    def grid(self) -> Grid:
        return Grid(self.dim, self.m, self.closure)


GRID_SCENARIOS = [
    GridScenario(name='neumann_1d', dim=1, m=17, closure=Closure.NEUMANN),
    GridScenario(name='periodic_1d', dim=1, m=16, closure=Closure.PERIODIC),
    GridScenario(name='neumann_2d', dim=2, m=9, closure=Closure.NEUMANN),
    GridScenario(name='periodic_2d', dim=2, m=8, closure=Closure.PERIODIC),
]


def random_field(grid: Grid, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal(grid.shape)


@pytest.mark.parametrize('test_case', GRID_SCENARIOS, ids=str)
def test_summation_by_parts(test_case: GridScenario):
    grid = test_case.grid()
    u = random_field(grid, 1)
    v = random_field(grid, 2)
    lhs = grid.integrate(grid.laplacian(u) * v)
    rhs = -grid.integrate(grid.gradient_dot(u, v))
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-9)


@pytest.mark.parametrize('test_case', GRID_SCENARIOS, ids=str)
def test_laplacian_matrix_matches_stencil(test_case: GridScenario):
    grid = test_case.grid()
    u = random_field(grid, 3)
    np.testing.assert_allclose(
        grid.laplacian_matrix @ u.ravel(), grid.laplacian(u).ravel(), rtol=1e-12, atol=1e-8
    )


@pytest.mark.parametrize('test_case', GRID_SCENARIOS, ids=str)
def test_implicit_operator_is_symmetric(test_case: GridScenario):
    grid = test_case.grid()
    operator = grid.implicit_operator(1e-3).toarray()
    np.testing.assert_allclose(operator, operator.T, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(operator) > 0.0)


@pytest.mark.parametrize('test_case', GRID_SCENARIOS, ids=str)
def test_weights_integrate_constants(test_case: GridScenario):
    grid = test_case.grid()
    assert grid.integrate(np.ones(grid.shape)) == pytest.approx(1.0)
    assert grid.gradient_norm_sq(np.full(grid.shape, 0.7)) == pytest.approx(0.0)


def test_gradient_and_divergence_of_linear_field():
    grid = Grid(2, 11)
    x = grid.coordinates
    u = 2.0 * x[0] - x[1]
    grad = gradient(ScalarField(grid, u)).components
    inner = (slice(1, -1), slice(1, -1))
    np.testing.assert_allclose(grad[0][inner], 2.0)
    np.testing.assert_allclose(grad[1][inner], -1.0)
    div = divergence(VectorFieldSample(grid, x)).values
    np.testing.assert_allclose(div[inner], 2.0)


def test_hessian_of_quadratic():
    grid = Grid(2, 11, Closure.NEUMANN)
    x = grid.coordinates
    hess = grid.hessian(x[0] * x[1])
    inner = (slice(1, -1), slice(1, -1))
    np.testing.assert_allclose(hess[0, 1][inner], 1.0)
    np.testing.assert_allclose(hess[0, 0][inner], 0.0, atol=1e-9)


def test_grid_spacing():
    assert Grid(1, 11).h == pytest.approx(0.1)
    assert Grid(1, 10, Closure.PERIODIC).h == pytest.approx(0.1)
    assert Grid(2, 9).distance_to_boundary()[4, 4] == pytest.approx(0.5)


@pytest.mark.parametrize(
    'dim, m',
    [(3, 16), (0, 16), (1, 7)],
    ids=['three_dimensions', 'zero_dimensions', 'too_few_nodes'],
)
def test_invalid_grid(dim: int, m: int):
    with pytest.raises(DomainError):
        Grid(dim, m)


def test_non_finite_field_is_rejected():
    grid = Grid(1, 8)
    values = np.zeros(grid.shape)
    values[3] = np.inf
    with pytest.raises(DomainError):
        ScalarField(grid, values)
