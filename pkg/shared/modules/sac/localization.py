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
Test functions eta used to localize the energy.
'''

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
import logging
from typing import Any, ClassVar, Dict, Type

import numpy as np

from .exceptions import DomainError
from .modes import radial_cutoff

logger = logging.getLogger()

EtaSample = tuple[np.ndarray, np.ndarray, np.ndarray]


class TestFunctionFactory:  # pylint: disable=too-few-public-methods
    '''
    Factory for test functions described by configuration mappings.

    Test function classes self-register in `test_function_kinds` on import.
    '''

    __test__ = False

    class UndefinedKind(DomainError):
        '''
        Exception raised when a mapping names an unregistered test function kind.
        '''

    test_function_kinds: Dict[str, Type[TestFunction]] = {}

    @classmethod
    def create(cls, data: dict[str, Any], dim: int) -> TestFunction:
        params = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
        kind = params.pop('kind', None)
        if kind not in cls.test_function_kinds:
            raise cls.UndefinedKind(f'Unknown test function kind: {kind}')
        try:
            eta = cls.test_function_kinds[kind](**params)
        except TypeError as e:
            raise DomainError(f'Invalid parameters for {kind} test function: {e}') from e
        eta.check_dimension(dim)
        return eta


@dataclass(frozen=True)
class TestFunction(ABC):
    '''
    Analytic test function with closed-form gradient and Hessian.

    Attributes:
        name: Label used in ledgers and reports.
    '''

    __test__ = False

    kind: ClassVar[str]

    name: str = ''

    @property
    def label(self) -> str:
        return self.name or self.kind

    def check_dimension(self, dim: int) -> None:
        _ = dim

    @abstractmethod
    def evaluate(self, points: np.ndarray) -> EtaSample:
        '''
        Values, gradient and Hessian at points of shape (dim, *S).
        '''


@dataclass(frozen=True)
class ConstantOne(TestFunction):
    '''
    eta = 1, which turns the localized identity into the global one.
    '''

    kind: ClassVar[str] = 'constant_one'

    def evaluate(self, points: np.ndarray) -> EtaSample:
        dim = points.shape[0]
        shape = points.shape[1:]
        return np.ones(shape), np.zeros((dim,) + shape), np.zeros((dim, dim) + shape)


@dataclass(frozen=True)
class BumpTestFunction(TestFunction):
    '''
    eta = phi(|x - c|^2 / R^2) with the C-infinity cutoff of the noise modes.
    '''

    kind: ClassVar[str] = 'bump'

    center: tuple[float, ...] = (0.5,)
    radius: float = 0.25

    def check_dimension(self, dim: int) -> None:
        if len(self.center) != dim or self.radius <= 0.0:
            raise DomainError(f'invalid bump test function: {self.center}, {self.radius}')

    def evaluate(self, points: np.ndarray) -> EtaSample:
        phi, grad, hess, _ = radial_cutoff(points, np.asarray(self.center), self.radius)
        return phi, grad, hess


@dataclass(frozen=True)
class CoordinateWindow(TestFunction):
    '''
    eta = sin^4(pi (x_axis - start) / width) on [start, start + width], 0 elsewhere.

    The fourth power makes eta C^3 across the window edges.
    '''

    kind: ClassVar[str] = 'coordinate_window'

    axis: int = 0
    start: float = 0.25
    width: float = 0.5

    def check_dimension(self, dim: int) -> None:
        if not 0 <= self.axis < dim or self.width <= 0.0:
            raise DomainError(f'invalid coordinate window: axis {self.axis}, width {self.width}')

    def evaluate(self, points: np.ndarray) -> EtaSample:
        dim = points.shape[0]
        k = np.pi / self.width
        theta = k * (points[self.axis] - self.start)
        inside = (theta >= 0.0) & (theta <= np.pi)
        s = np.where(inside, np.sin(theta), 0.0)
        c = np.cos(theta)

        value = s**4
        grad = np.zeros((dim,) + value.shape)
        hess = np.zeros((dim, dim) + value.shape)
        grad[self.axis] = 4.0 * k * s**3 * c
        hess[self.axis, self.axis] = k * k * (12.0 * s * s * c * c - 4.0 * s**4)
        return value, grad, hess


TestFunctionFactory.test_function_kinds[ConstantOne.kind] = ConstantOne
TestFunctionFactory.test_function_kinds[BumpTestFunction.kind] = BumpTestFunction
TestFunctionFactory.test_function_kinds[CoordinateWindow.kind] = CoordinateWindow
