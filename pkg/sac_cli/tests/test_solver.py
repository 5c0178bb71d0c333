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
from dataclasses import dataclass, field, replace
from typing import Any, ClassVar, Optional

import numpy as np
import pytest

from sac.exceptions import BlowupError, ContractError, DomainError, StabilityError
from sac.grid import Closure, Grid
from sac.initial import Constant, Kink, Smooth
from sac.modes import BumpMode, ConstantMode
from sac.noise import NoiseModel, NoiseStream
from sac.potential import STANDARD_QUARTIC
from sac.solver import (
    DiffusionTreatment,
    Mutation,
    Scheme,
    SolverConfig,
    Trajectory,
    check_stability,
    run,
    run_transport,
    stability_bound,
    transport_config,
)

GRID = Grid(1, 65)
BUMP = BumpMode(amplitude=0.5, center=(0.5,), radius=0.3)


@dataclass(frozen=True)
class PulsedBump(BumpMode):
    time_dependent: ClassVar[bool] = True


@dataclass
class Scenario(ABC):
    name: str

    def __init__(self, name: str):
        self.name = name

    def __str__(self):
        return self.name


@dataclass
class SolverConfigScenario(Scenario):
    params: dict[str, Any] = field(default_factory=dict)
    expected_exception: Optional[type] = None


SOLVER_CONFIG_SCENARIOS = [
    SolverConfigScenario(name='valid', params={}),
    SolverConfigScenario(
        name='zero_eps', params={'eps': 0.0}, expected_exception=DomainError
    ),
    SolverConfigScenario(
        name='negative_dt', params={'dt': -1e-5}, expected_exception=DomainError
    ),
    SolverConfigScenario(
        name='t_end_not_multiple', params={'t_end': 1.5e-4}, expected_exception=DomainError
    ),
    SolverConfigScenario(
        name='zero_stride', params={'snapshot_stride': 0}, expected_exception=DomainError
    ),
    SolverConfigScenario(
        name='threshold_below_wells',
        params={'blowup_threshold': 1.0},
        expected_exception=DomainError,
    ),
    SolverConfigScenario(
        name='unknown_scheme', params={'scheme': 'milstein'}, expected_exception=ValueError
    ),
    SolverConfigScenario(
        name='unknown_mutation', params={'mutations': {'zero-b'}}, expected_exception=ValueError
    ),
]


@pytest.mark.parametrize('test_case', SOLVER_CONFIG_SCENARIOS, ids=str)
def test_solver_config(test_case: SolverConfigScenario):
    params = {'eps': 0.1, 'dt': 1e-4, 't_end': 1e-3} | test_case.params
    if test_case.expected_exception:
        with pytest.raises(test_case.expected_exception):
            SolverConfig(**params)
    else:
        config = SolverConfig(**params)
        assert config.steps == 10
        assert config.scheme == Scheme.ITO_EULER


def make_trajectory(config: SolverConfig, model: NoiseModel, u0=None, **kwargs) -> Trajectory:
    if u0 is None:
        u0 = Kink().sample(GRID, STANDARD_QUARTIC, config.eps)
    stream = NoiseStream(3, 0, model.n_modes, config.dt)
    return Trajectory(config, GRID, model, u0, stream, **kwargs)


@dataclass
class StabilityScenario(Scenario):
    scheme: Scheme = Scheme.ITO_EULER
    treatment: DiffusionTreatment = DiffusionTreatment.EXPLICIT
    reaction: bool = True
    expected: float = 0.0


H2 = (1.0 / 64.0) ** 2
STABILITY_SCENARIOS = [
    StabilityScenario(name='explicit_ito', expected=H2 / (2.0 * (1.0 + 0.125))),
    StabilityScenario(
        name='explicit_heun', scheme=Scheme.STRATONOVICH_HEUN, expected=H2 / 2.0
    ),
    StabilityScenario(
        name='semi_implicit_ito',
        treatment=DiffusionTreatment.SEMI_IMPLICIT,
        expected=H2 / 0.25,
    ),
    StabilityScenario(
        name='semi_implicit_heun_is_reaction_bound',
        scheme=Scheme.STRATONOVICH_HEUN,
        treatment=DiffusionTreatment.SEMI_IMPLICIT,
        expected=0.01 / 3.32,
    ),
    StabilityScenario(
        name='semi_implicit_heun_without_reaction',
        scheme=Scheme.STRATONOVICH_HEUN,
        treatment=DiffusionTreatment.SEMI_IMPLICIT,
        reaction=False,
        expected=float('inf'),
    ),
]


@pytest.mark.parametrize('test_case', STABILITY_SCENARIOS, ids=str)
def test_stability_bound(test_case: StabilityScenario):
    config = SolverConfig(
        eps=0.1,
        dt=1e-5,
        t_end=1e-4,
        scheme=test_case.scheme,
        diffusion_treatment=test_case.treatment,
        reaction=test_case.reaction,
    )
    bound = stability_bound(config, GRID, NoiseModel(1, (BUMP,)))
    assert bound == pytest.approx(test_case.expected, rel=1e-6)


def test_check_stability_rejects_large_steps():
    model = NoiseModel(1, (BUMP,))
    with pytest.raises(StabilityError):
        check_stability(SolverConfig(eps=0.1, dt=2e-4, t_end=2e-3), GRID, model)
    check_stability(SolverConfig(eps=0.1, dt=1e-4, t_end=1e-3), GRID, model)


@pytest.mark.parametrize('treatment', list(DiffusionTreatment), ids=str)
def test_heun_matches_ito_without_noise(treatment: DiffusionTreatment):
    config = SolverConfig(eps=0.1, dt=5e-5, t_end=5e-3, diffusion_treatment=treatment)
    model = NoiseModel(1)
    ito = run(make_trajectory(config, model))
    heun = run(make_trajectory(replace(config, scheme=Scheme.STRATONOVICH_HEUN), model))
    np.testing.assert_array_equal(ito.final, heun.final)
    assert ito.series('energy').tolist() == heun.series('energy').tolist()


def test_deterministic_given_stream():
    config = SolverConfig(eps=0.1, dt=5e-5, t_end=2e-3, snapshot_stride=10)
    model = NoiseModel(1, (BUMP,))
    first = run(make_trajectory(config, model))
    second = run(make_trajectory(config, model))
    np.testing.assert_array_equal(first.final, second.final)
    np.testing.assert_array_equal(first.increments, second.increments)
    assert first.increments.shape == (40, 1)


def test_snapshot_schedule():
    config = SolverConfig(eps=0.1, dt=5e-5, t_end=1e-3, snapshot_stride=5)
    result = run(make_trajectory(config, NoiseModel(1, (BUMP,))))
    assert result.times == pytest.approx([0.0, 2.5e-4, 5e-4, 7.5e-4, 1e-3])
    assert len(result.snapshots) == len(result.reports) == 5
    assert result.initial_energy == pytest.approx(result.reports[0].energy)

    without = run(make_trajectory(config, NoiseModel(1, (BUMP,)), keep_snapshots=False))
    assert not without.snapshots
    assert len(without.reports) == 5


def test_energy_decays_without_noise():
    config = SolverConfig(eps=0.1, dt=5e-5, t_end=5e-3, snapshot_stride=1)
    u0 = Smooth(amplitude=0.5, wavenumber=(1,)).sample(GRID, STANDARD_QUARTIC, 0.1)
    result = run(make_trajectory(config, NoiseModel(1), u0=u0))
    energies = result.series('energy')
    assert len(energies) == config.steps + 1
    assert np.all(np.diff(energies) <= 1e-10)
    assert energies[-1] < energies[0]


@pytest.mark.parametrize('treatment', list(DiffusionTreatment), ids=str)
def test_wells_bound_the_solution_without_noise(treatment: DiffusionTreatment):
    config = SolverConfig(
        eps=0.05, dt=5e-5, t_end=5e-3, diffusion_treatment=treatment, snapshot_stride=1
    )
    u0 = Kink().sample(GRID, STANDARD_QUARTIC, config.eps)
    assert np.max(np.abs(u0)) <= 1.0
    result = run(make_trajectory(config, NoiseModel(1), u0=u0))
    assert len(result.snapshots) == config.steps + 1
    assert max(np.max(np.abs(u)) for u in result.snapshots) <= 1.0 + 1e-8


def test_blowup_reports_step():
    config = SolverConfig(eps=0.1, dt=0.05, t_end=0.1)
    u0 = Constant(2.0).sample(GRID, STANDARD_QUARTIC, 0.1)
    with pytest.raises(BlowupError) as error:
        run(make_trajectory(config, NoiseModel(1), u0=u0))
    assert error.value.step == 0
    assert error.value.time == pytest.approx(0.05)


@pytest.mark.parametrize('mutation', [Mutation.ZERO_A, Mutation.ZERO_C], ids=str)
def test_correction_mutations_change_the_path(mutation: Mutation):
    config = SolverConfig(eps=0.1, dt=5e-5, t_end=2e-3)
    model = NoiseModel(1, (BUMP,))
    reference = run(make_trajectory(config, model))
    mutated = run(make_trajectory(replace(config, mutations=frozenset({mutation})), model))
    assert not np.array_equal(reference.final, mutated.final)


def test_zero_psi_mutation_only_touches_the_ledger():
    config = SolverConfig(eps=0.1, dt=5e-5, t_end=2e-3)
    model = NoiseModel(1, (BUMP,))
    reference = run(make_trajectory(config, model))
    mutated = run(
        make_trajectory(replace(config, mutations=frozenset({Mutation.ZERO_PSI})), model)
    )
    np.testing.assert_array_equal(reference.final, mutated.final)
    assert reference.ledger is not None and mutated.ledger is not None
    assert any(value != 0.0 for value in reference.ledger.remainder['global'])
    assert all(value == 0.0 for value in mutated.ledger.remainder['global'])


def test_stream_must_match_modes():
    config = SolverConfig(eps=0.1, dt=5e-5, t_end=1e-3)
    u0 = Kink().sample(GRID, STANDARD_QUARTIC, 0.1)
    with pytest.raises(ContractError):
        Trajectory(config, GRID, NoiseModel(1, (BUMP,)), u0, NoiseStream(0, 0, 2, 5e-5))


def test_time_dependent_modes_are_rejected():
    config = SolverConfig(eps=0.1, dt=5e-5, t_end=1e-3)
    model = NoiseModel(1, (PulsedBump(amplitude=0.5, center=(0.5,), radius=0.3),))
    assert model.time_dependent
    with pytest.raises(DomainError):
        make_trajectory(config, model)


def test_transport_shifts_the_initial_profile():
    grid = Grid(1, 128, Closure.PERIODIC)
    amplitude = 0.2
    model = NoiseModel(1, (ConstantMode(amplitude=amplitude, direction=(1.0,)),))
    config = transport_config(
        SolverConfig(eps=0.1, dt=1e-4, t_end=1e-2, scheme=Scheme.STRATONOVICH_HEUN)
    )
    u0 = Smooth(amplitude=0.5, wavenumber=(1,)).sample(grid, STANDARD_QUARTIC, 0.1)
    stream = NoiseStream(8, 0, 1, config.dt)
    result = run_transport(
        Trajectory(config, grid, model, u0, stream, track_identity=False)
    )
    shift = amplitude * float(np.sum(result.increments[:, 0]))
    exact = 0.5 * np.cos(2.0 * np.pi * (grid.axis_coordinates + shift))
    np.testing.assert_allclose(result.final, exact, atol=2e-3)


def test_transport_needs_transport_config():
    config = SolverConfig(eps=0.1, dt=5e-5, t_end=1e-3)
    with pytest.raises(ContractError):
        run_transport(make_trajectory(config, NoiseModel(1, (BUMP,))))
    with pytest.raises(ContractError):
        run_transport(make_trajectory(transport_config(config), NoiseModel(1)))
