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
Grid module with rectangular grids, nodal fields and finite difference operators.

Grids cover the unit box (0, 1)^n for n in {1, 2}. Node arrays are indexed
[i] or [i, j] for the coordinates (x1) or (x1, x2) and stored row-major.
Neumann closure reflects ghost nodes (u[-1] = u[1]); periodic closure wraps.

Two gradient flavours are provided:
    gradient: central differences, node collocated, used for transport terms.
    gradient_dot / gradient_norm_sq: the compact one-sided form
        1/2 sum_axis (D+u D+v + D-u D-v), which satisfies discrete integration by
        parts against laplacian exactly under the grid's quadrature weights.
'''

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property
import logging

import numpy as np
from scipy import sparse

from .exceptions import DomainError

logger = logging.getLogger()


class Closure(StrEnum):
    '''
    Boundary closure of a grid.
    '''

    NEUMANN = 'neumann'
    PERIODIC = 'periodic'


@dataclass(frozen=True)
class Grid:
    '''
    Rectangular grid of m^dim nodes on the unit box.

    Attributes:
        dim: Spatial dimension, 1 or 2.
        m: Nodes per axis, at least 8.
        closure: Boundary closure.
    '''

    dim: int
    m: int
    closure: Closure = Closure.NEUMANN

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise DomainError(f'Grid dimension must be 1 or 2, got {self.dim}')
        if self.m < 8:
            raise DomainError(f'Grid needs at least 8 nodes per axis, got {self.m}')
        object.__setattr__(self, 'closure', Closure(self.closure))

    @property
    def h(self) -> float:
        '''
        Node spacing: 1/(m - 1) under Neumann closure, 1/m under periodic closure.
        '''
        return 1.0 / (self.m - 1) if self.closure == Closure.NEUMANN else 1.0 / self.m

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.m,) * self.dim

    @property
    def node_count(self) -> int:
        return self.m**self.dim

    @property
    def periodic(self) -> bool:
        return self.closure == Closure.PERIODIC

    @cached_property
    def axis_coordinates(self) -> np.ndarray:
        return np.arange(self.m) * self.h

    @cached_property
    def coordinates(self) -> np.ndarray:
        '''
        Node coordinates as an array of shape (dim, *shape).
        '''
        axes = [self.axis_coordinates] * self.dim
        return np.stack(np.meshgrid(*axes, indexing='ij'))

    @cached_property
    def weights(self) -> np.ndarray:
        '''
        Quadrature weights: trapezoid under Neumann closure, rectangle under periodic.
        '''
        axis = np.full(self.m, self.h)
        if not self.periodic:
            axis[0] = axis[-1] = 0.5 * self.h
        weights = axis
        for _ in range(self.dim - 1):
            weights = np.multiply.outer(weights, axis)
        return weights

    def distance_to_boundary(self) -> np.ndarray:
        '''
        Distance of every node to the boundary of the unit box.
        '''
        x = self.coordinates
        return np.min(np.minimum(x, 1.0 - x), axis=0)

    def pad(self, values: np.ndarray) -> np.ndarray:
        '''
        Pad a nodal array with one ghost layer per spatial axis.
        '''
        mode = 'wrap' if self.periodic else 'reflect'
        lead = values.ndim - self.dim
        return np.pad(values, [(0, 0)] * lead + [(1, 1)] * self.dim, mode=mode)

    def _shifted(self, padded: np.ndarray, axis: int, offset: int) -> np.ndarray:
        lead = padded.ndim - self.dim
        index = [slice(None)] * lead + [slice(1, -1)] * self.dim
        index[lead + axis] = slice(1 + offset, padded.shape[lead + axis] - 1 + offset)
        return padded[tuple(index)]

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        '''
        3-point (1D) or 5-point (2D) Laplacian of a nodal array.
        '''
        padded = self.pad(values)
        result = -2.0 * self.dim * values
        for axis in range(self.dim):
            result = result + self._shifted(padded, axis, 1) + self._shifted(padded, axis, -1)
        return result / (self.h * self.h)

    def gradient(self, values: np.ndarray) -> np.ndarray:
        '''
        Central difference gradient of shape (dim, *shape).
        '''
        padded = self.pad(values)
        return np.stack(
            [
                (self._shifted(padded, axis, 1) - self._shifted(padded, axis, -1)) / (2.0 * self.h)
                for axis in range(self.dim)
            ]
        )

    def one_sided_differences(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        '''
        Forward and backward differences, each of shape (dim, *shape).
        '''
        padded = self.pad(values)
        forward = np.stack(
            [(self._shifted(padded, a, 1) - values) / self.h for a in range(self.dim)]
        )
        backward = np.stack(
            [(values - self._shifted(padded, a, -1)) / self.h for a in range(self.dim)]
        )
        return forward, backward

    def gradient_dot(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        '''
        Compact nodal density of grad u . grad v.
        '''
        u_forward, u_backward = self.one_sided_differences(u)
        v_forward, v_backward = self.one_sided_differences(v)
        return 0.5 * np.sum(u_forward * v_forward + u_backward * v_backward, axis=0)

    def gradient_norm_sq(self, u: np.ndarray) -> np.ndarray:
        '''
        Compact nodal density of |grad u|^2.
        '''
        forward, backward = self.one_sided_differences(u)
        return 0.5 * np.sum(forward * forward + backward * backward, axis=0)

    def hessian(self, values: np.ndarray) -> np.ndarray:
        '''
        Hessian samples of shape (dim, dim, *shape); mixed terms by nested central differences.
        '''
        padded = self.pad(values)
        h2 = self.h * self.h
        result = np.empty((self.dim, self.dim) + values.shape)
        for axis in range(self.dim):
            result[axis, axis] = (
                self._shifted(padded, axis, 1) - 2.0 * values + self._shifted(padded, axis, -1)
            ) / h2
        if self.dim == 2:
            mixed = (
                padded[2:, 2:] - padded[2:, :-2] - padded[:-2, 2:] + padded[:-2, :-2]
            ) / (4.0 * h2)
            result[0, 1] = result[1, 0] = mixed
        return result

    def divergence(self, field: np.ndarray) -> np.ndarray:
        '''
        Central difference divergence of a vector field of shape (dim, *shape).
        '''
        result = np.zeros(field.shape[1:])
        for axis in range(self.dim):
            padded = self.pad(field[axis])
            result = result + (
                self._shifted(padded, axis, 1) - self._shifted(padded, axis, -1)
            ) / (2.0 * self.h)
        return result

    def integrate(self, values: np.ndarray) -> float:
        '''
        Quadrature of a nodal array over the unit box.
        '''
        return float(np.sum(self.weights * values))

    @cached_property
    def laplacian_matrix(self) -> sparse.csr_matrix:
        '''
        Sparse matrix of laplacian acting on row-major flattened nodal arrays.
        '''
        m = self.m
        main = np.full(m, -2.0)
        upper = np.ones(m - 1)
        lower = np.ones(m - 1)
        one_d = sparse.diags([lower, main, upper], [-1, 0, 1], format='lil')
        if self.periodic:
            one_d[0, m - 1] = 1.0
            one_d[m - 1, 0] = 1.0
        else:
            one_d[0, 1] = 2.0
            one_d[m - 1, m - 2] = 2.0
        one_d = one_d.tocsr() / (self.h * self.h)
        if self.dim == 1:
            return one_d
        identity = sparse.identity(m, format='csr')
        return (sparse.kron(one_d, identity) + sparse.kron(identity, one_d)).tocsr()

    def implicit_operator(self, dt: float) -> sparse.csr_matrix:
        '''
        Weighted operator W (I - dt L), symmetric positive definite for both closures.
        '''
        weights = sparse.diags(self.weights.ravel())
        identity = sparse.identity(self.node_count, format='csr')
        return (weights @ (identity - dt * self.laplacian_matrix)).tocsr()


@dataclass
class ScalarField:
    '''
    Nodal values of a scalar function on a grid.
    '''

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float).reshape(self.grid.shape)
        if not np.all(np.isfinite(self.values)):
            raise DomainError('ScalarField values must be finite')


@dataclass
class VectorFieldSample:
    '''
    Nodal values of a vector field, components stacked along the first axis.
    '''

    grid: Grid
    components: np.ndarray

    def __post_init__(self) -> None:
        self.components = np.asarray(self.components, dtype=float).reshape(
            (self.grid.dim,) + self.grid.shape
        )
        if not np.all(np.isfinite(self.components)):
            raise DomainError('VectorFieldSample components must be finite')


def laplacian(u: ScalarField) -> ScalarField:
    return ScalarField(u.grid, u.grid.laplacian(u.values))


def gradient(u: ScalarField) -> VectorFieldSample:
    return VectorFieldSample(u.grid, u.grid.gradient(u.values))


def hessian(u: ScalarField) -> np.ndarray:
    '''
    Per-node symmetric Hessian samples of shape (dim, dim, *shape).
    '''
    return u.grid.hessian(u.values)


def divergence(v: VectorFieldSample) -> ScalarField:
    return ScalarField(v.grid, v.grid.divergence(v.components))


def integrate(f: ScalarField) -> float:
    return f.grid.integrate(f.values)
