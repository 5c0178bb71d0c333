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
Initial data.

Kinds register themselves with InitialDataFactory:
    kink      1D optimal profile across x = position
    circle    2D radial profile, +1 outside a disk of the given radius
    stripe    band between two interfaces normal to x1 (an interval in 1D)
    constant  u = value everywhere
    random    seeded small perturbation of 0
    smooth    amplitude * cos(2 pi k.x), for transport tests
'''

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
import logging
from typing import Any, ClassVar, Dict, Optional, Type

import numpy as np

from .exceptions import DomainError
from .grid import Grid
from .potential import DoubleWell, optimal_profile

logger = logging.getLogger()


class InitialDataFactory:  # pylint: disable=too-few-public-methods
    '''
    Factory for initial data described by configuration mappings.
    '''

    class UndefinedKind(DomainError):
        '''
        Exception raised when a mapping names an unregistered initial data kind.
        '''

    initial_kinds: Dict[str, Type[InitialData]] = {}

    @classmethod
    def create(cls, data: dict[str, Any]) -> InitialData:
        params = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
        kind = params.pop('kind', None)
        if kind not in cls.initial_kinds:
            raise cls.UndefinedKind(f'Unknown initial data kind: {kind}')
        try:
            return cls.initial_kinds[kind](**params)
        except TypeError as e:
            raise DomainError(f'Invalid parameters for {kind} initial data: {e}') from e


@dataclass(frozen=True)
class InitialData(ABC):
    '''
    Base class of initial data generators.
    '''

    kind: ClassVar[str]

    def check_dimension(self, dim: int) -> None:
        _ = dim

    def radial_center(self) -> Optional[tuple[float, ...]]:
        '''
        Center of a radially symmetric configuration, if any.
        '''
        return None

    @abstractmethod
    def sample(self, grid: Grid, potential: DoubleWell, eps: float) -> np.ndarray:
        '''
        Nodal values on the grid for interface width eps.
        '''


@dataclass(frozen=True)
class Kink(InitialData):
    kind: ClassVar[str] = 'kink'

    position: float = 0.5
    sign: float = 1.0

    def check_dimension(self, dim: int) -> None:
        if dim != 1:
            raise DomainError('kink initial data is 1D')

    def sample(self, grid: Grid, potential: DoubleWell, eps: float) -> np.ndarray:
        distance = self.sign * (grid.axis_coordinates - self.position)
        return np.asarray(optimal_profile(potential, distance, eps))


@dataclass(frozen=True)
class Circle(InitialData):
    '''
    optimal_profile(|x - center| - radius), so u = -1 inside the disk.
    '''

    kind: ClassVar[str] = 'circle'

    radius: float = 0.3
    center: tuple[float, ...] = (0.5, 0.5)

    def check_dimension(self, dim: int) -> None:
        if dim != 2 or len(self.center) != 2 or self.radius <= 0.0:
            raise DomainError(f'circle initial data needs 2D, got dim={dim}, {self.center}')

    def radial_center(self) -> Optional[tuple[float, ...]]:
        return tuple(float(c) for c in self.center)

    def sample(self, grid: Grid, potential: DoubleWell, eps: float) -> np.ndarray:
        offset = grid.coordinates - np.asarray(self.center, dtype=float).reshape(2, 1, 1)
        distance = np.sqrt(np.sum(offset * offset, axis=0)) - self.radius
        return np.asarray(optimal_profile(potential, distance, eps))


@dataclass(frozen=True)
class Stripe(InitialData):
    kind: ClassVar[str] = 'stripe'

    lower: float = 0.3
    upper: float = 0.7

    def check_dimension(self, dim: int) -> None:
        _ = dim
        if not 0.0 < self.lower < self.upper < 1.0:
            raise DomainError(
                f'stripe needs 0 < lower < upper < 1, got {self.lower}, {self.upper}'
            )

    def sample(self, grid: Grid, potential: DoubleWell, eps: float) -> np.ndarray:
        x = grid.coordinates[0]
        distance = np.minimum(x - self.lower, self.upper - x)
        return np.asarray(optimal_profile(potential, distance, eps))


@dataclass(frozen=True)
class Constant(InitialData):
    kind: ClassVar[str] = 'constant'

    value: float = 1.0

    def sample(self, grid: Grid, potential: DoubleWell, eps: float) -> np.ndarray:
        return np.full(grid.shape, float(self.value))


@dataclass(frozen=True)
class RandomPerturbation(InitialData):
    '''
    Uniform noise of the given amplitude around 0, seeded independently of the Brownian paths.
    '''

    kind: ClassVar[str] = 'random'

    amplitude: float = 0.05
    seed: int = 0

    def sample(self, grid: Grid, potential: DoubleWell, eps: float) -> np.ndarray:
        generator = np.random.default_rng(self.seed)
        return self.amplitude * generator.uniform(-1.0, 1.0, size=grid.shape)


@dataclass(frozen=True)
class Smooth(InitialData):
    kind: ClassVar[str] = 'smooth'

    amplitude: float = 0.5
    wavenumber: tuple[int, ...] = (1,)

    def check_dimension(self, dim: int) -> None:
        if len(self.wavenumber) != dim:
            raise DomainError(f'wavenumber must have {dim} entries, got {self.wavenumber}')

    def sample(self, grid: Grid, potential: DoubleWell, eps: float) -> np.ndarray:
        k = 2.0 * np.pi * np.asarray(self.wavenumber, dtype=float)
        return self.amplitude * np.cos(np.tensordot(k, grid.coordinates, axes=1))


InitialDataFactory.initial_kinds[Kink.kind] = Kink
InitialDataFactory.initial_kinds[Circle.kind] = Circle
InitialDataFactory.initial_kinds[Stripe.kind] = Stripe
InitialDataFactory.initial_kinds[Constant.kind] = Constant
InitialDataFactory.initial_kinds[RandomPerturbation.kind] = RandomPerturbation
InitialDataFactory.initial_kinds[Smooth.kind] = Smooth
