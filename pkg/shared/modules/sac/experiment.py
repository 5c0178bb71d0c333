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
Experiment template: everything needed to build a trajectory except the
interface width and the Brownian path.
'''

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import StrEnum
import logging
from typing import Optional

import numpy as np

from .flow import solve_transformed
from .grid import Grid
from .initial import InitialData
from .localization import TestFunction
from .noise import IncrementSource, NoiseModel, NoiseStream
from .potential import DoubleWell
from .solver import SolverConfig, Trajectory, TrajectoryResult, check_stability, run

logger = logging.getLogger()


class Backend(StrEnum):
    DIRECT = 'direct'
    FLOW = 'flow'


@dataclass(frozen=True)
class DiagnosticsSettings:
    '''
    Attributes:
        test_functions: Test functions tracked by reports and identity ledgers.
        track_identity: Whether trajectories record the energy identity ledger.
        circle_center: Center of the radius diagnostic, None to disable.
    '''

    test_functions: tuple[TestFunction, ...] = ()
    track_identity: bool = True
    circle_center: Optional[tuple[float, ...]] = None


@dataclass(frozen=True)
class Experiment:
    '''
    Template of a trajectory.

    Attributes:
        grid: The grid.
        potential: The double-well potential.
        model: The noise model.
        solver: Solver configuration; its eps is the default interface width.
        initial: Initial data generator.
        diagnostics: Diagnostics settings.
        backend: direct finite differences, or the flow-transformed equation.
    '''

    grid: Grid
    potential: DoubleWell
    model: NoiseModel
    solver: SolverConfig
    initial: InitialData
    diagnostics: DiagnosticsSettings = DiagnosticsSettings()
    backend: Backend = Backend.DIRECT

    def solver_for(self, eps: Optional[float] = None) -> SolverConfig:
        return self.solver if eps is None else replace(self.solver, eps=eps)

    def check_stability(self, eps: Optional[float] = None) -> None:
        check_stability(self.solver_for(eps), self.grid, self.model, self.potential)

    def initial_field(self, eps: Optional[float] = None) -> np.ndarray:
        return self.initial.sample(self.grid, self.potential, self.solver_for(eps).eps)

    def stream(self, master_seed: int, sample_index: int) -> NoiseStream:
        '''
        Increment stream of one sample path, shared by every eps.
        '''
        return NoiseStream(master_seed, sample_index, self.model.n_modes, self.solver.dt)

    def trajectory(
        self,
        stream: IncrementSource,
        eps: Optional[float] = None,
        sample_index: int = 0,
        keep_snapshots: bool = True,
    ) -> Trajectory:
        '''
        Build a trajectory of this experiment on a given Brownian path.
        '''
        settings = self.diagnostics
        return Trajectory(
            self.solver_for(eps),
            self.grid,
            self.model,
            self.initial_field(eps),
            stream,
            self.potential,
            test_functions=settings.test_functions,
            track_identity=settings.track_identity,
            circle_center=settings.circle_center,
            keep_snapshots=keep_snapshots,
            sample_index=sample_index,
        )

    def solve(
        self,
        stream: IncrementSource,
        eps: Optional[float] = None,
        sample_index: int = 0,
        keep_snapshots: bool = True,
    ) -> TrajectoryResult:
        '''
        Run one trajectory with the configured backend.

        The flow backend records no identity ledger.
        '''
        if Backend(self.backend) == Backend.FLOW:
            settings = self.diagnostics
            result = solve_transformed(
                stream,
                self.model,
                self.grid,
                self.solver_for(eps),
                self.initial_field(eps),
                self.potential,
                settings.test_functions,
                settings.circle_center,
            )
            result.sample_index = sample_index
            return result
        return run(self.trajectory(stream, eps, sample_index, keep_snapshots))
