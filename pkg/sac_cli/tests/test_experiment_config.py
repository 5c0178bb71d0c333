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
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, ClassVar
from unittest.mock import patch

import pytest

from sac.exceptions import ConfigError, StabilityError
from sac.experiment import Backend
from sac.experiment_config import (
    apply_overrides,
    build_experiment_config,
    load_experiment_config,
    parse_override,
)
from sac.grid import Closure
from sac.initial import Kink, Stripe
from sac.modes import BumpMode, ModeFactory
from sac.solver import Scheme

CONFIGS = Path(__file__).parents[2] / 'configs'

BUMP = {'kind': 'bump', 'amplitude': 0.5, 'center': [0.5], 'radius': 0.3, 'direction': [1.0]}
CENTER = {'kind': 'bump', 'name': 'center', 'center': [0.5], 'radius': 0.25}


@dataclass(frozen=True)
class PulsedBump(BumpMode):
    kind: ClassVar[str] = 'pulsed_bump'
    time_dependent: ClassVar[bool] = True


@dataclass
class Scenario(ABC):
    name: str

    def __init__(self, name: str):
        self.name = name

    def __str__(self):
        return self.name


@dataclass
class InvalidDocumentScenario(Scenario):
    document: dict[str, Any] = field(default_factory=dict)
    expected_key: str = ''


INVALID_DOCUMENT_SCENARIOS = [
    InvalidDocumentScenario(
        name='unknown_section', document={'solvers': {}}, expected_key='solvers'
    ),
    InvalidDocumentScenario(
        name='unknown_key', document={'solver': {'epsilon': 0.1}}, expected_key='solver.epsilon'
    ),
    InvalidDocumentScenario(
        name='section_not_a_table', document={'grid': 3}, expected_key='grid'
    ),
    InvalidDocumentScenario(
        name='bool_for_int', document={'grid': {'m': True}}, expected_key='grid.m'
    ),
    InvalidDocumentScenario(
        name='string_for_float', document={'solver': {'dt': '1e-5'}}, expected_key='solver.dt'
    ),
    InvalidDocumentScenario(
        name='stride_not_dividing_steps',
        document={'solver': {'snapshot_stride': 3}},
        expected_key='solver.snapshot_stride',
    ),
    InvalidDocumentScenario(
        name='unknown_scheme', document={'solver': {'scheme': 'milstein'}}, expected_key='solver'
    ),
    InvalidDocumentScenario(
        name='unknown_backend',
        document={'solver': {'backend': 'spectral'}},
        expected_key='solver.backend',
    ),
    InvalidDocumentScenario(
        name='unknown_closure', document={'grid': {'closure': 'dirichlet'}}, expected_key='grid'
    ),
    InvalidDocumentScenario(
        name='circle_in_1d', document={'initial': {'kind': 'circle'}}, expected_key='initial'
    ),
    InvalidDocumentScenario(
        name='unknown_mode',
        document={'noise': {'modes': [{'kind': 'swirl'}]}},
        expected_key='noise',
    ),
    InvalidDocumentScenario(
        name='mode_in_boundary_collar',
        document={'noise': {'modes': [BUMP | {'center': [0.2]}]}},
        expected_key='noise',
    ),
    InvalidDocumentScenario(
        name='custom_potential_without_coefficients',
        document={'potential': {'kind': 'custom'}},
        expected_key='potential',
    ),
    InvalidDocumentScenario(
        name='duplicate_test_function_labels',
        document={'diagnostics': {'test_functions': [CENTER, CENTER | {'radius': 0.1}]}},
        expected_key='diagnostics.test_functions',
    ),
    InvalidDocumentScenario(
        name='test_function_not_a_table',
        document={'diagnostics': {'test_functions': ['center']}},
        expected_key='diagnostics.test_functions[0]',
    ),
    InvalidDocumentScenario(
        name='circle_center_dimension',
        document={'diagnostics': {'circle_center': [0.5, 0.5]}},
        expected_key='diagnostics.circle_center',
    ),
    InvalidDocumentScenario(
        name='unknown_gate',
        document={'ensemble': {'gates': ['speed']}},
        expected_key='ensemble.gates',
    ),
    InvalidDocumentScenario(
        name='reversed_window',
        document={'ensemble': {'residual_windows': [[0.005, 0.001]]}},
        expected_key='ensemble.residual_windows[0]',
    ),
    InvalidDocumentScenario(
        name='window_between_steps',
        document={'ensemble': {'residual_windows': [[0.0, 1.5e-5]]}},
        expected_key='ensemble.residual_windows[0]',
    ),
    InvalidDocumentScenario(
        name='identity_gate_without_windows',
        document={'ensemble': {'gates': ['identity']}},
        expected_key='ensemble.gates',
    ),
    InvalidDocumentScenario(
        name='increment_gate_without_test_function',
        document={'ensemble': {'gates': ['increment_slope']}},
        expected_key='ensemble.gates',
    ),
    InvalidDocumentScenario(
        name='untracked_increment_test_function',
        document={'ensemble': {'increment_eta': 'center'}},
        expected_key='ensemble.increment_eta',
    ),
    InvalidDocumentScenario(
        name='lag_beyond_last_snapshot',
        document={
            'diagnostics': {'test_functions': [CENTER]},
            'ensemble': {'increment_eta': 'center', 'increment_lags': [1, 1001]},
        },
        expected_key='ensemble.increment_lags',
    ),
    InvalidDocumentScenario(
        name='single_lag',
        document={
            'diagnostics': {'test_functions': [CENTER]},
            'ensemble': {'increment_eta': 'center', 'increment_lags': [4]},
        },
        expected_key='ensemble.increment_lags',
    ),
    InvalidDocumentScenario(
        name='repeated_lag',
        document={'ensemble': {'increment_lags': [2, 2]}},
        expected_key='ensemble.increment_lags',
    ),
    InvalidDocumentScenario(
        name='increasing_eps_list',
        document={'ensemble': {'eps_list': [0.05, 0.1]}},
        expected_key='ensemble',
    ),
]


@pytest.mark.parametrize('test_case', INVALID_DOCUMENT_SCENARIOS, ids=str)
def test_invalid_documents(test_case: InvalidDocumentScenario):
    with pytest.raises(ConfigError) as error:
        build_experiment_config(test_case.document)
    assert error.value.key == test_case.expected_key
    assert str(error.value).startswith(f'{test_case.expected_key}: ')


def test_defaults():
    config = build_experiment_config({})
    experiment = config.experiment
    assert experiment.grid.dim == 1
    assert experiment.grid.m == 128
    assert experiment.grid.closure == Closure.NEUMANN
    assert experiment.initial == Kink()
    assert experiment.solver.eps == 0.05
    assert experiment.solver.scheme == Scheme.ITO_EULER
    assert experiment.backend == Backend.DIRECT
    assert experiment.model.n_modes == 0
    assert experiment.diagnostics.circle_center is None
    assert config.ensemble is None
    assert config.output.directory == Path('out')


def test_circle_center_follows_initial_data():
    config = build_experiment_config({'grid': {'dim': 2, 'm': 32}})
    assert config.experiment.diagnostics.circle_center == (0.5, 0.5)


def test_integers_are_accepted_for_floats():
    config = build_experiment_config({'solver': {'t_end': 1, 'dt': 1e-5, 'snapshot_stride': 1000}})
    assert isinstance(config.experiment.solver.t_end, float)


def test_ensemble_section():
    config = build_experiment_config(
        {
            'diagnostics': {'test_functions': [CENTER]},
            'ensemble': {
                'samples': 4,
                'eps_list': [0.05, 0.04],
                'residual_windows': [[0.0, 0.005]],
                'increment_eta': 'center',
                'gates': ['identity', 'increment_slope'],
                'workers': 0,
            },
        }
    )
    assert config.ensemble is not None
    assert config.ensemble.eps_values == (0.05, 0.04)
    assert config.ensemble.residual_windows == ((0.0, 0.005),)
    assert config.ensemble.workers == 1


def test_stability_is_checked_for_every_eps():
    with pytest.raises(StabilityError):
        build_experiment_config({'solver': {'dt': 1e-3}})
    with pytest.raises(StabilityError):
        build_experiment_config({'ensemble': {'eps_list': [0.05, 0.001]}})


def test_unknown_mutation():
    with pytest.raises(ConfigError) as error:
        build_experiment_config({}, mutations=['zero-b'])
    assert error.value.key == 'unsafe_debug'


def test_flow_backend_needs_autonomous_noise():
    pulsed = BUMP | {'kind': PulsedBump.kind}
    with patch.dict(ModeFactory.mode_kinds, {PulsedBump.kind: PulsedBump}):
        direct = build_experiment_config({'noise': {'modes': [pulsed]}})
        assert direct.experiment.model.time_dependent
        with pytest.raises(ConfigError) as error:
            build_experiment_config(
                {'noise': {'modes': [pulsed]}, 'solver': {'backend': 'flow'}}
            )
    assert error.value.key == 'solver.backend'


@pytest.mark.parametrize(
    'raw, keys, value',
    [
        ('solver.dt=2e-5', ['solver', 'dt'], 2e-5),
        ('grid.m = 64', ['grid', 'm'], 64),
        ("initial.kind='stripe'", ['initial', 'kind'], 'stripe'),
        ('solver.scheme=stratonovich_heun', ['solver', 'scheme'], 'stratonovich_heun'),
        ('noise.modes=[]', ['noise', 'modes'], []),
        ('output.plots=false', ['output', 'plots'], False),
    ],
)
def test_parse_override(raw: str, keys: list[str], value: Any):
    assert parse_override(raw) == (keys, value)


@pytest.mark.parametrize('raw', ['solver.dt', 'dt=1e-5', '.dt=1', 'solver.=1'])
def test_invalid_override(raw: str):
    with pytest.raises(ConfigError):
        parse_override(raw)


def test_apply_overrides():
    document: dict[str, Any] = {'solver': {'eps': 0.05}, 'grid': 2}
    apply_overrides(document, ['solver.eps=0.04', 'initial.kind="stripe"'])
    assert document['solver'] == {'eps': 0.04}
    assert document['initial'] == {'kind': 'stripe'}
    with pytest.raises(ConfigError):
        apply_overrides(document, ['grid.m=64'])


def test_load_with_overrides(tmp_path: Path):
    path = tmp_path / 'experiment.toml'
    path.write_text("[solver]\neps = 0.05\n\n[initial]\nkind = 'kink'\n", encoding='utf-8')
    config = load_experiment_config(
        path, overrides=['initial.kind="stripe"', 'solver.eps=0.04']
    )
    assert config.experiment.initial == Stripe()
    assert config.experiment.solver.eps == 0.04
    assert config.source == path


def test_load_missing_file(tmp_path: Path):
    path = tmp_path / 'missing.toml'
    with pytest.raises(ConfigError) as error:
        load_experiment_config(path)
    assert error.value.key == str(path)


def test_load_malformed_file(tmp_path: Path):
    path = tmp_path / 'broken.toml'
    path.write_text('[solver\neps = ', encoding='utf-8')
    with pytest.raises(ConfigError) as error:
        load_experiment_config(path)
    assert error.value.key == str(path)


@pytest.mark.parametrize('path', sorted(CONFIGS.glob('*.toml')), ids=lambda p: p.stem)
def test_shipped_configs_load(path: Path):
    config = load_experiment_config(path)
    assert config.output.directory.parts[0] == 'out'
