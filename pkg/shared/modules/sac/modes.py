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
Analytic vector fields used as Brownian modes and drift of the noise.

Every field returns its value together with closed-form first and second
spatial derivatives, evaluated on arrays of points of shape (dim, *S):
    X[i]        value component i
    J[i, j]     d X_i / d x_j
    H[i, j, l]  d^2 X_i / d x_j d x_l

Field kinds register themselves with ModeFactory when this module is imported:
    constant  amplitude * direction (periodic closure only)
    bump      amplitude * phi(|x - c|^2 / R^2) * direction, phi a C-infinity cutoff
    rotation  amplitude * phi(|x - c|^2 / R^2) * (-(x2 - c2), x1 - c1), 2D only
    trig      amplitude * sin(2 pi k.x + phase) * direction (periodic closure only)
'''

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
import logging
from typing import Any, ClassVar, Dict, Optional, Type

import numpy as np

from .exceptions import DomainError

logger = logging.getLogger()

FieldSample = tuple[np.ndarray, np.ndarray, np.ndarray]


class ModeFactory:  # pylint: disable=too-few-public-methods
    '''
    Factory for vector fields described by configuration mappings.

    Field classes self-register by adding themselves to `mode_kinds` when
    their module is imported. The key is the `kind` entry of the mapping.

    Example:
        mode = ModeFactory.create({'kind': 'bump', 'center': [0.5], 'radius': 0.3})
    '''

    class UndefinedKind(DomainError):
        '''
        Exception raised when a mapping names an unregistered field kind.
        '''

    mode_kinds: Dict[str, Type[VectorMode]] = {}

    @classmethod
    def create(cls, data: dict[str, Any], dim: int) -> VectorMode:
        '''
        Create a vector field from its configuration mapping.

        Args:
            data: Mapping with a 'kind' entry and the kind's parameters.
            dim: Spatial dimension the field lives in.

        Returns:
            The field instance.

        Raises:
            UndefinedKind: If the kind is not registered.
            DomainError: If the parameters do not fit the dimension.
        '''
        params = dict(data)
        kind = params.pop('kind', None)
        if kind not in cls.mode_kinds:
            raise cls.UndefinedKind(f'Unknown vector field kind: {kind}')
        mode = cls.mode_kinds[kind].from_params(params, dim)
        mode.check_dimension(dim)
        return mode


@dataclass(frozen=True)
class VectorMode(ABC):
    '''
    Base class of analytic vector fields with closed-form derivatives.

    Attributes:
        amplitude: Scalar factor applied to the whole field.
    '''

    kind: ClassVar[str]
    periodic_only: ClassVar[bool] = False
    time_dependent: ClassVar[bool] = False

    amplitude: float = 1.0

    @classmethod
    def from_params(cls, params: dict[str, Any], dim: int) -> VectorMode:
        '''
        Build the field from configuration parameters.
        '''
        _ = dim
        values = {k: tuple(v) if isinstance(v, list) else v for k, v in params.items()}
        try:
            return cls(**values)
        except TypeError as e:
            raise DomainError(f'Invalid parameters for {cls.kind} field: {e}') from e

    @abstractmethod
    def check_dimension(self, dim: int) -> None:
        '''
        Raise DomainError if the parameters do not fit the spatial dimension.
        '''

    @abstractmethod
    def evaluate(self, t: float, points: np.ndarray) -> FieldSample:
        '''
        Evaluate the field and its derivatives.

        Args:
            t: Time; autonomous fields ignore it.
            points: Array of shape (dim, *S).

        Returns:
            (X, J, H) with shapes (dim, *S), (dim, dim, *S), (dim, dim, dim, *S).
        '''

    def support(self) -> Optional[tuple[np.ndarray, float]]:
        '''
        Center and radius of a disk containing the support, None if unbounded.
        '''
        return None

    def to_dict(self) -> dict[str, Any]:
        '''
        Configuration mapping that recreates this field.
        '''
        data: dict[str, Any] = {'kind': self.kind}
        for name in self.__dataclass_fields__:  # pylint: disable=no-member
            value = getattr(self, name)
            data[name] = list(value) if isinstance(value, tuple) else value
        return data


def _unit(direction: tuple[float, ...], dim: int) -> np.ndarray:
    vector = np.asarray(direction, dtype=float)
    if vector.shape != (dim,):
        raise DomainError(f'direction must have {dim} components, got {direction}')
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise DomainError('direction must be non-zero')
    return vector / norm


def _broadcast(vector: np.ndarray, points: np.ndarray) -> np.ndarray:
    return vector.reshape(vector.shape + (1,) * (points.ndim - 1))


def cutoff(q: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    '''
    The C-infinity cutoff phi(q) = exp(1 - 1/(1 - q)) for q < 1, else 0.

    Args:
        q: Squared normalized radius |x - c|^2 / R^2.

    Returns:
        (phi, phi', phi'') as functions of q.
    '''
    inside = q < 1.0
    gap = np.where(inside, 1.0 - q, 1.0)
    inverse = 1.0 / gap
    phi = np.where(inside, np.exp(1.0 - inverse), 0.0)
    first = -phi * inverse**2
    second = phi * (inverse**4 - 2.0 * inverse**3)
    return phi, first, second


def radial_cutoff(
    points: np.ndarray, center: np.ndarray, radius: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    '''
    Cutoff phi(|x - c|^2 / R^2) with gradient and Hessian in x.

    Returns:
        (phi, grad phi, Hessian of phi, x - c) with shapes (*S), (dim, *S),
        (dim, dim, *S), (dim, *S).
    '''
    offset = points - _broadcast(center, points)
    r2 = radius * radius
    q = np.sum(offset * offset, axis=0) / r2
    phi, first, second = cutoff(q)
    dim = points.shape[0]
    grad = first * 2.0 * offset / r2
    hess = second * 4.0 * offset[:, None] * offset[None, :] / (r2 * r2)
    for j in range(dim):
        hess[j, j] = hess[j, j] + first * 2.0 / r2
    return phi, grad, hess, offset


@dataclass(frozen=True)
class ConstantMode(VectorMode):
    '''
    Spatially constant field amplitude * direction.
    '''

    kind: ClassVar[str] = 'constant'
    periodic_only: ClassVar[bool] = True

    direction: tuple[float, ...] = (1.0,)

    def check_dimension(self, dim: int) -> None:
        _unit(self.direction, dim)

    def evaluate(self, t: float, points: np.ndarray) -> FieldSample:
        dim = points.shape[0]
        vector = self.amplitude * _unit(self.direction, dim)
        value = np.broadcast_to(_broadcast(vector, points), points.shape).copy()
        zeros = np.zeros((dim, dim) + points.shape[1:])
        return value, zeros, np.zeros((dim,) + zeros.shape)


@dataclass(frozen=True)
class BumpMode(VectorMode):
    '''
    Compactly supported field amplitude * phi(|x - c|^2 / R^2) * direction.
    '''

    kind: ClassVar[str] = 'bump'

    center: tuple[float, ...] = (0.5,)
    radius: float = 0.3
    direction: tuple[float, ...] = (1.0,)

    def check_dimension(self, dim: int) -> None:
        _unit(self.direction, dim)
        if len(self.center) != dim:
            raise DomainError(f'center must have {dim} components, got {self.center}')
        if self.radius <= 0.0:
            raise DomainError(f'radius must be positive, got {self.radius}')

    def evaluate(self, t: float, points: np.ndarray) -> FieldSample:
        dim = points.shape[0]
        d = self.amplitude * _unit(self.direction, dim)
        phi, grad, hess, _ = radial_cutoff(points, np.asarray(self.center), self.radius)
        value = _broadcast(d, points) * phi
        jacobian = d.reshape((dim, 1) + (1,) * (points.ndim - 1)) * grad[None]
        second = d.reshape((dim, 1, 1) + (1,) * (points.ndim - 1)) * hess[None]
        return value, jacobian, second

    def support(self) -> Optional[tuple[np.ndarray, float]]:
        return np.asarray(self.center, dtype=float), self.radius


@dataclass(frozen=True)
class RotationMode(VectorMode):
    '''
    Divergence-free swirl amplitude * phi(|x - c|^2 / R^2) * (-(x2 - c2), x1 - c1).
    '''

    kind: ClassVar[str] = 'rotation'

    center: tuple[float, ...] = (0.5, 0.5)
    radius: float = 0.3

    def check_dimension(self, dim: int) -> None:
        if dim != 2:
            raise DomainError('rotation fields exist in 2D only')
        if len(self.center) != 2 or self.radius <= 0.0:
            raise DomainError(f'invalid rotation center/radius: {self.center}, {self.radius}')

    def evaluate(self, t: float, points: np.ndarray) -> FieldSample:
        phi, grad, hess, offset = radial_cutoff(points, np.asarray(self.center), self.radius)
        swirl = np.stack([-offset[1], offset[0]])
        # d swirl_i / d x_j
        swirl_jacobian = np.array([[0.0, -1.0], [1.0, 0.0]])

        a = self.amplitude
        value = a * phi * swirl
        jacobian = np.empty((2, 2) + points.shape[1:])
        second = np.empty((2, 2, 2) + points.shape[1:])
        for i in range(2):
            for j in range(2):
                jacobian[i, j] = a * (grad[j] * swirl[i] + phi * swirl_jacobian[i, j])
                for l in range(2):
                    second[i, j, l] = a * (
                        hess[j, l] * swirl[i]
                        + grad[j] * swirl_jacobian[i, l]
                        + grad[l] * swirl_jacobian[i, j]
                    )
        return value, jacobian, second

    def support(self) -> Optional[tuple[np.ndarray, float]]:
        return np.asarray(self.center, dtype=float), self.radius


@dataclass(frozen=True)
class TrigMode(VectorMode):
    '''
    Periodic field amplitude * sin(2 pi k.x + phase) * direction.
    '''

    kind: ClassVar[str] = 'trig'
    periodic_only: ClassVar[bool] = True

    wavenumber: tuple[int, ...] = (1,)
    direction: tuple[float, ...] = (1.0,)
    phase: float = 0.0

    def check_dimension(self, dim: int) -> None:
        _unit(self.direction, dim)
        if len(self.wavenumber) != dim or any(int(k) != k for k in self.wavenumber):
            raise DomainError(f'wavenumber must be {dim} integers, got {self.wavenumber}')

    def evaluate(self, t: float, points: np.ndarray) -> FieldSample:
        dim = points.shape[0]
        d = self.amplitude * _unit(self.direction, dim)
        k = 2.0 * np.pi * np.asarray(self.wavenumber, dtype=float)
        theta = np.tensordot(k, points, axes=1) + self.phase
        sin, cos = np.sin(theta), np.cos(theta)
        value = _broadcast(d, points) * sin
        jacobian = np.einsum('i,j,...->ij...', d, k, cos)
        second = -np.einsum('i,j,l,...->ijl...', d, k, k, sin)
        return value, jacobian, second


ModeFactory.mode_kinds[ConstantMode.kind] = ConstantMode
ModeFactory.mode_kinds[BumpMode.kind] = BumpMode
ModeFactory.mode_kinds[RotationMode.kind] = RotationMode
ModeFactory.mode_kinds[TrigMode.kind] = TrigMode
