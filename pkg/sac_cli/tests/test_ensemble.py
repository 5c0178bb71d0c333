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
from functools import cache
import math
from typing import Any, Optional

import numpy as np
import pandas as pd
import pytest

from sac.ensemble import (
    EnsembleConfig,
    EnsembleStats,
    InlinePool,
    SampleSummary,
    fit_envelope,
    run_ensemble,
    sharp_interface_sweep,
    tail_table,
)
from sac.exceptions import BlowupError, ContractError, DomainError
from sac.experiment import DiagnosticsSettings, Experiment
from sac.grid import Grid
from sac.initial import Constant, Kink
from sac.localization import BumpTestFunction
from sac.modes import BumpMode
from sac.noise import NoiseModel
from sac.potential import STANDARD_QUARTIC
from sac.solver import SolverConfig

CENTER = BumpTestFunction(name='center', center=(0.5,), radius=0.25)
EXPERIMENT = Experiment(
    grid=Grid(1, 33),
    potential=STANDARD_QUARTIC,
    model=NoiseModel(1, (BumpMode(amplitude=0.4, center=(0.5,), radius=0.3),)),
    solver=SolverConfig(eps=0.1, dt=1e-4, t_end=2e-3, snapshot_stride=2),
    initial=Kink(),
    diagnostics=DiagnosticsSettings(test_functions=(CENTER,)),
)
WINDOWS = ((0.0, 1e-3), (1e-3, 2e-3))


def ensemble_config(**kwargs) -> EnsembleConfig:
    params: dict[str, Any] = {
        'experiment': EXPERIMENT,
        'samples': 6,
        'master_seed': 17,
        'eps_list': (0.1, 0.08),
        'residual_windows': WINDOWS,
        'gates': ('identity', 'compact_containment', 'uniform_energy'),
    }
    return EnsembleConfig(**(params | kwargs))


@cache
def default_stats() -> EnsembleStats:
    return run_ensemble(ensemble_config())


class ReversedPool:  # pylint: disable=too-few-public-methods
    def map(self, fn, tasks):
        results = {index: fn(task) for index, task in reversed(list(enumerate(tasks)))}
        return [results[index] for index in range(len(tasks))]


class FlakyPool:  # pylint: disable=too-few-public-methods
    def map(self, fn, tasks):
        return [
            (
                SampleSummary(task.eps, task.eps_index, 0, failed=True, failure='boom')
                if task.sample_index == 0
                else fn(task)
            )
            for task in tasks
        ]


@dataclass
class Scenario(ABC):
    name: str

    def __init__(self, name: str):
        self.name = name

    def __str__(self):
        return self.name


@dataclass
class EnsembleConfigScenario(Scenario):
    params: dict[str, Any] = field(default_factory=dict)
    expected_exception: Optional[type] = None


ENSEMBLE_CONFIG_SCENARIOS = [
    EnsembleConfigScenario(name='defaults', params={}),
    EnsembleConfigScenario(
        name='no_samples', params={'samples': 0}, expected_exception=DomainError
    ),
    EnsembleConfigScenario(
        name='increasing_eps',
        params={'eps_list': (0.05, 0.1)},
        expected_exception=DomainError,
    ),
    EnsembleConfigScenario(
        name='repeated_eps',
        params={'eps_list': (0.1, 0.1)},
        expected_exception=DomainError,
    ),
    EnsembleConfigScenario(
        name='unknown_gate', params={'gates': ('speed',)}, expected_exception=DomainError
    ),
    EnsembleConfigScenario(
        name='zero_moment_order', params={'p_list': (0, 1)}, expected_exception=DomainError
    ),
]


@pytest.mark.parametrize('test_case', ENSEMBLE_CONFIG_SCENARIOS, ids=str)
def test_ensemble_config(test_case: EnsembleConfigScenario):
    if test_case.expected_exception:
        with pytest.raises(test_case.expected_exception):
            ensemble_config(**test_case.params)
    else:
        config = ensemble_config(**test_case.params)
        assert config.eps_values == (0.1, 0.08)
        assert EnsembleConfig(EXPERIMENT).eps_values == (0.1,)


def test_ensemble_tables():
    ensemble_stats = default_stats()
    summary = ensemble_stats.summary
    assert summary['eps'].tolist() == [0.1, 0.08]
    assert summary['accepted'].tolist() == [6, 6]
    assert summary['failed'].tolist() == [0, 0]
    assert len(ensemble_stats.moments) == 4
    assert len(ensemble_stats.envelope) == 4
    assert np.all(ensemble_stats.moments['sup_energy_moment'] > 0.0)
    # eps x channel x window
    assert len(ensemble_stats.residual_summary) == 8
    assert len(ensemble_stats.residuals) == 6 * 8
    assert set(ensemble_stats.residual_summary['label']) == {'global', 'center'}
    assert ensemble_stats.increments.empty
    assert len(ensemble_stats.separation) == 2 * 11


def test_gates_are_evaluated():
    ensemble_stats = default_stats()
    assert set(ensemble_stats.gates) == {'identity', 'compact_containment', 'uniform_energy'}
    assert ensemble_stats.gates['compact_containment']
    assert ensemble_stats.failed_gates() == [
        name for name, passed in ensemble_stats.gates.items() if not passed
    ]


def test_statistics_do_not_depend_on_task_scheduling():
    reordered = run_ensemble(ensemble_config(), ReversedPool())
    pd.testing.assert_frame_equal(default_stats().summary, reordered.summary)
    pd.testing.assert_frame_equal(default_stats().residuals, reordered.residuals)


def test_samples_share_paths_across_eps():
    ensemble_stats = default_stats()
    coarse, fine = ensemble_stats.by_eps(0.1), ensemble_stats.by_eps(0.08)
    assert [s.sample_index for s in coarse] == list(range(6))
    assert [s.sample_index for s in fine] == list(range(6))
    assert coarse[0].initial_energy != fine[0].initial_energy


def test_tail_table():
    table = tail_table(default_stats(), [4.0, 0.5, 1.0])
    assert list(table.columns) == ['eps', 'lambda', 'energy_tail', 'w11_tail', 'w11_envelope']
    assert len(table) == 6
    for _, group in table.groupby('eps'):
        assert group['lambda'].tolist() == [0.5, 1.0, 4.0]
        assert np.all(np.diff(group['energy_tail'].to_numpy()) <= 0.0)
        assert np.all(group['energy_tail'].between(0.0, 1.0))


def test_failures_abort_unless_allowed():
    with pytest.raises(BlowupError):
        run_ensemble(ensemble_config(gates=()), FlakyPool())
    ensemble_stats = run_ensemble(ensemble_config(gates=(), allow_failures=True), FlakyPool())
    assert ensemble_stats.failures == ['boom', 'boom']
    assert ensemble_stats.summary['accepted'].tolist() == [5, 5]
    assert ensemble_stats.summary['failed'].tolist() == [1, 1]


def test_every_sample_failing_is_fatal():
    experiment = replace(
        EXPERIMENT,
        initial=Constant(1.2),
        solver=replace(EXPERIMENT.solver, blowup_threshold=1.1),
    )
    with pytest.raises(BlowupError):
        run_ensemble(
            ensemble_config(experiment=experiment, samples=2, allow_failures=True, gates=())
        )


def test_increment_statistic_per_eps():
    config = ensemble_config(
        increment_eta='center',
        increment_lags=(1, 2, 4),
        min_increment_samples=6,
        gates=('increment_slope',),
    )
    ensemble_stats = run_ensemble(config)
    assert ensemble_stats.increments['eps'].tolist() == [0.1, 0.08]
    assert np.all(np.isfinite(ensemble_stats.increments['slope']))
    assert len(ensemble_stats.increment_moments) == 6
    assert 'increment_slope' in ensemble_stats.gates


def test_untracked_increment_test_function():
    with pytest.raises(ContractError):
        run_ensemble(ensemble_config(increment_eta='edge'))


def test_sweep():
    with pytest.raises(ContractError):
        sharp_interface_sweep(ensemble_config())
    report = sharp_interface_sweep(
        ensemble_config(samples=2, eps_list=(0.12, 0.1, 0.08), residual_windows=()),
        InlinePool(),
    )
    assert report.table['eps'].tolist() == [0.12, 0.1, 0.08]
    assert math.isnan(report.table['coupling_distance'].iloc[-1])
    assert report.finest_distance == report.table['coupling_distance'].iloc[1]
    assert report.finest_distance > 0.0
    assert isinstance(report.monotone, bool)


def test_fit_envelope():
    times = np.linspace(0.0, 1.0, 11)
    assert fit_envelope(times, 2.0 * np.exp(0.3 * times)) == pytest.approx(0.3)
    assert fit_envelope(times, np.zeros(11)) == 0.0
    assert fit_envelope(times[:1], np.ones(1)) == 0.0
