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
from functools import cache

import numpy as np
import pytest

from sac.exceptions import ContractError
from sac.grid import Grid
from sac.identity import GLOBAL, global_identity_residual, localized_identity_residual
from sac.initial import Kink, Smooth
from sac.localization import BumpTestFunction, ConstantOne, CoordinateWindow
from sac.modes import BumpMode
from sac.noise import NoiseModel, NoiseStream
from sac.potential import STANDARD_QUARTIC
from sac.solver import SolverConfig, Trajectory, TrajectoryResult, run

GRID = Grid(1, 129)
CONFIG = SolverConfig(eps=0.1, dt=1e-5, t_end=2e-3, snapshot_stride=50)
ONE = ConstantOne()
CENTER = BumpTestFunction(name='center', center=(0.5,), radius=0.25)
LEFT = CoordinateWindow(name='left', start=0.1, width=0.35)
TRACKED = (ONE, CENTER, LEFT)


@cache
def noisy_result() -> TrajectoryResult:
    model = NoiseModel(1, (BumpMode(amplitude=0.4, center=(0.5,), radius=0.3),))
    u0 = Kink(position=0.45).sample(GRID, STANDARD_QUARTIC, CONFIG.eps)
    stream = NoiseStream(21, 0, 1, CONFIG.dt)
    return run(Trajectory(CONFIG, GRID, model, u0, stream, test_functions=TRACKED))


@cache
def deterministic_result() -> TrajectoryResult:
    u0 = Smooth(amplitude=0.5, wavenumber=(1,)).sample(GRID, STANDARD_QUARTIC, CONFIG.eps)
    stream = NoiseStream(0, 0, 0, CONFIG.dt)
    return run(Trajectory(CONFIG, GRID, NoiseModel(1), u0, stream, test_functions=TRACKED))


@dataclass
class Scenario(ABC):
    name: str

    def __init__(self, name: str):
        self.name = name

    def __str__(self):
        return self.name


@dataclass
class WindowScenario(Scenario):
    t0: float = 0.0
    t1: float = 2e-3


WINDOW_SCENARIOS = [
    WindowScenario(name='whole_run'),
    WindowScenario(name='first_half', t1=1e-3),
    WindowScenario(name='single_step', t0=5e-4, t1=5.1e-4),
]


@pytest.mark.parametrize('test_case', WINDOW_SCENARIOS, ids=str)
def test_unit_test_function_reproduces_global_identity(test_case: WindowScenario):
    result = noisy_result()
    residual, _, _ = global_identity_residual(result, test_case.t0, test_case.t1)
    assert localized_identity_residual(result, test_case.t0, test_case.t1, ONE) == residual


def test_ledger_channels():
    ledger = noisy_result().ledger
    assert ledger is not None
    assert ledger.labels == (GLOBAL, 'constant_one', 'center', 'left')
    assert ledger.steps == 200
    assert ledger.index(1e-3) == 100
    assert ledger.measure['constant_one'] == ledger.measure[GLOBAL]
    assert ledger.martingale['constant_one'] == ledger.martingale[GLOBAL]
    assert ledger.measure[GLOBAL][0] == pytest.approx(noisy_result().initial_energy)
    assert ledger.quadratic_variation[GLOBAL][-1] > 0.0
    assert all(value == 0.0 for value in ledger.flux[GLOBAL])


def test_deterministic_global_identity_closes():
    result = deterministic_result()
    ledger = result.ledger
    assert ledger is not None
    residual, martingale, variation = global_identity_residual(result, 0.0, 2e-3)
    assert martingale == 0.0
    assert variation == 0.0
    assert abs(residual) <= 0.05 * ledger.dissipation[GLOBAL][-1]


@pytest.mark.parametrize('eta', [CENTER, LEFT], ids=lambda eta: eta.label)
def test_deterministic_localized_identity_closes(eta):
    result = deterministic_result()
    ledger = result.ledger
    assert ledger is not None
    residual = localized_identity_residual(result, 0.0, 2e-3, eta)
    scale = ledger.dissipation[eta.label][-1] + abs(ledger.flux[eta.label][-1])
    assert scale > 0.0
    assert abs(residual) <= 0.1 * scale


def test_identity_terms_are_cumulative():
    ledger = noisy_result().ledger
    assert ledger is not None
    dissipation = np.array(ledger.dissipation['center'])
    assert dissipation[0] == 0.0
    assert np.all(np.diff(dissipation) >= 0.0)


@pytest.mark.parametrize(
    't0, t1',
    [(1e-3, 1e-3), (1e-3, 5e-4), (0.0, 3e-3), (0.0, 1.5e-5)],
    ids=['empty', 'reversed', 'beyond_end', 'between_steps'],
)
def test_invalid_windows(t0: float, t1: float):
    with pytest.raises(ContractError):
        global_identity_residual(noisy_result(), t0, t1)


def test_untracked_test_function():
    other = BumpTestFunction(name='other', center=(0.3,), radius=0.1)
    with pytest.raises(ContractError):
        localized_identity_residual(noisy_result(), 0.0, 1e-3, other)


def test_result_without_ledger():
    u0 = Kink().sample(GRID, STANDARD_QUARTIC, CONFIG.eps)
    config = SolverConfig(eps=0.1, dt=1e-5, t_end=1e-4)
    stream = NoiseStream(0, 0, 0, config.dt)
    result = run(Trajectory(config, GRID, NoiseModel(1), u0, stream, track_identity=False))
    assert result.ledger is None
    with pytest.raises(ContractError):
        global_identity_residual(result, 0.0, 1e-4)
