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
from typing import Any, Optional

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from sac.exceptions import DomainError, NoiseStreamExhausted
from sac.grid import Closure, Grid
from sac.localization import ConstantOne
from sac.modes import BumpMode, ModeFactory, cutoff
from sac.noise import (
    NoiseModel,
    NoiseStream,
    RecordedNoiseStream,
    a_tilde,
    correction_A,
    correction_c,
    psi_fields,
    sample_noise_increment,
)


@dataclass
class Scenario(ABC):
    name: str

    def __init__(self, name: str):
        self.name = name

    def __str__(self):
        return self.name


@dataclass
class ModeScenario(Scenario):
    data: dict[str, Any] = field(default_factory=dict)
    dim: int = 1
    expected_exception: Optional[type] = None


MODE_SCENARIOS = [
    ModeScenario(name='bump_1d', data={'kind': 'bump', 'center': [0.5], 'radius': 0.2}),
    ModeScenario(
        name='bump_2d',
        data={'kind': 'bump', 'center': [0.5, 0.4], 'direction': [1.0, 1.0]},
        dim=2,
    ),
    ModeScenario(name='rotation_2d', data={'kind': 'rotation'}, dim=2),
    ModeScenario(name='trig_1d', data={'kind': 'trig', 'wavenumber': [2]}),
    ModeScenario(
        name='rotation_in_1d',
        data={'kind': 'rotation'},
        expected_exception=DomainError,
    ),
    ModeScenario(
        name='bump_center_wrong_dimension',
        data={'kind': 'bump', 'center': [0.5, 0.5]},
        expected_exception=DomainError,
    ),
    ModeScenario(
        name='zero_direction',
        data={'kind': 'constant', 'direction': [0.0]},
        expected_exception=DomainError,
    ),
    ModeScenario(
        name='unknown_parameter',
        data={'kind': 'bump', 'width': 0.2},
        expected_exception=DomainError,
    ),
    ModeScenario(
        name='unknown_kind',
        data={'kind': 'vortex'},
        expected_exception=ModeFactory.UndefinedKind,
    ),
]


@pytest.mark.parametrize('test_case', MODE_SCENARIOS, ids=str)
def test_mode_factory(test_case: ModeScenario):
    if test_case.expected_exception:
        with pytest.raises(test_case.expected_exception):
            ModeFactory.create(test_case.data, test_case.dim)
    else:
        mode = ModeFactory.create(test_case.data, test_case.dim)
        assert ModeFactory.create(mode.to_dict(), test_case.dim) == mode


@pytest.mark.parametrize(
    'test_case', [s for s in MODE_SCENARIOS if s.expected_exception is None], ids=str
)
def test_mode_derivatives_match_finite_differences(test_case: ModeScenario):
    mode = ModeFactory.create(test_case.data, test_case.dim)
    dim = test_case.dim
    rng = np.random.default_rng(5)
    points = 0.3 + 0.4 * rng.random((dim, 12))
    _, jacobian, second = mode.evaluate(0.0, points)
    step = 1e-6
    for j in range(dim):
        shift = np.zeros((dim, 1))
        shift[j] = step
        plus, jac_plus, _ = mode.evaluate(0.0, points + shift)
        minus, jac_minus, _ = mode.evaluate(0.0, points - shift)
        np.testing.assert_allclose(
            (plus - minus) / (2.0 * step), jacobian[:, j], rtol=1e-5, atol=1e-6
        )
        np.testing.assert_allclose(
            (jac_plus - jac_minus) / (2.0 * step), second[:, :, j], rtol=1e-4, atol=1e-4
        )


def test_cutoff_is_compactly_supported():
    phi, first, second = cutoff(np.array([0.0, 0.5, 1.0, 2.0]))
    assert phi[0] == pytest.approx(1.0)
    assert np.all(phi[2:] == 0.0)
    assert np.all(first[2:] == 0.0)
    assert np.all(second[2:] == 0.0)
    assert first[1] < 0.0


@dataclass
class ValidateScenario(Scenario):
    data: dict[str, Any] = field(default_factory=dict)
    grid: Grid = field(default_factory=lambda: Grid(1, 64))
    expected_exception: Optional[type] = None


VALIDATE_SCENARIOS = [
    ValidateScenario(
        name='interior_bump',
        data={'modes': [{'kind': 'bump', 'center': [0.5], 'radius': 0.3}]},
    ),
    ValidateScenario(
        name='no_modes',
        data={},
    ),
    ValidateScenario(
        name='bump_in_collar',
        data={'modes': [{'kind': 'bump', 'center': [0.2], 'radius': 0.3}]},
        expected_exception=DomainError,
    ),
    ValidateScenario(
        name='trig_on_neumann_grid',
        data={'modes': [{'kind': 'trig', 'wavenumber': [1]}]},
        expected_exception=DomainError,
    ),
    ValidateScenario(
        name='trig_on_periodic_grid',
        data={'modes': [{'kind': 'trig', 'wavenumber': [1]}, {'kind': 'constant'}]},
        grid=Grid(1, 64, Closure.PERIODIC),
    ),
    ValidateScenario(
        name='dimension_mismatch',
        data={'modes': [{'kind': 'bump', 'center': [0.5], 'radius': 0.3}]},
        grid=Grid(2, 16),
        expected_exception=DomainError,
    ),
]


@pytest.mark.parametrize('test_case', VALIDATE_SCENARIOS, ids=str)
def test_noise_model_validate(test_case: ValidateScenario):
    model = NoiseModel.from_dict(test_case.data, 1)
    if test_case.expected_exception:
        with pytest.raises(test_case.expected_exception):
            model.validate(test_case.grid)
    else:
        model.validate(test_case.grid)


def test_drift_section():
    model = NoiseModel.from_dict(
        {'drift': {'kind': 'bump', 'center': [0.5], 'radius': 0.2, 'amplitude': 0.5}}, 1
    )
    assert model.n_modes == 0
    assert model.drift is not None
    value, _ = model.drift_sample(0.0, np.array([[0.5]]))
    assert value[0, 0] == pytest.approx(0.5)
    assert NoiseModel.from_dict({'drift': {'kind': 'zero'}}, 1).drift is None


def test_constant_mode_has_no_corrections():
    model = NoiseModel(1, (ModeFactory.create({'kind': 'constant', 'amplitude': 0.7}, 1),))
    characteristic = model.characteristic(0.0, np.linspace(0.0, 1.0, 9).reshape(1, 9))
    np.testing.assert_allclose(characteristic.A, 0.49)
    assert np.all(characteristic.c == 0.0)
    assert np.all(characteristic.Psi == 0.0)
    assert np.all(characteristic.psi == 0.0)


def test_one_dimensional_psi_closed_form():
    a, k = 0.3, 2.0 * np.pi
    model = NoiseModel(1, (ModeFactory.create({'kind': 'trig', 'amplitude': a}, 1),))
    x = np.linspace(0.0, 1.0, 17)
    characteristic = model.characteristic(0.0, x.reshape(1, -1))
    value = a * np.sin(k * x)
    first = a * k * np.cos(k * x)
    second = -a * k * k * np.sin(k * x)
    np.testing.assert_allclose(characteristic.A[0, 0], value**2, atol=1e-12)
    np.testing.assert_allclose(characteristic.c[0], value * first, atol=1e-12)
    np.testing.assert_allclose(
        characteristic.Psi[0, 0], 0.25 * (first**2 - value * second), atol=1e-10
    )
    np.testing.assert_allclose(
        characteristic.psi, 0.5 * (first**2 + value * second), atol=1e-10
    )


def test_localized_bracket_with_unit_eta_is_global():
    model = NoiseModel(
        2,
        (
            ModeFactory.create({'kind': 'rotation', 'radius': 0.35}, 2),
            ModeFactory.create({'kind': 'bump', 'center': [0.4, 0.6], 'direction': [0, 1]}, 2),
        ),
    )
    grid = Grid(2, 12)
    characteristic = model.characteristic(0.0, grid.coordinates)
    eta, grad, hess = ConstantOne().evaluate(grid.coordinates)
    matrix, scalar = characteristic.localized_bracket(eta, grad, hess)
    np.testing.assert_array_equal(matrix, characteristic.Psi)
    np.testing.assert_array_equal(scalar, characteristic.psi)
    np.testing.assert_allclose(characteristic.Psi, np.swapaxes(characteristic.Psi, 0, 1))


def test_point_helpers_agree():
    mode = BumpMode(amplitude=0.8, center=(0.5, 0.5), radius=0.3, direction=(1.0, 0.0))
    model = NoiseModel(2, (mode,))
    x = [0.55, 0.45]
    np.testing.assert_allclose(a_tilde(model, 0.0, x, x), correction_A(model, 0.0, x))
    assert correction_c(model, 0.0, x).shape == (2,)
    matrix, scalar = psi_fields(model, 0.0, x)
    assert matrix.shape == (2, 2)
    assert isinstance(scalar, float)
    assert a_tilde(model, 0.0, x, [0.95, 0.95])[0, 0] == 0.0


def test_largest_eigenvalue_at_bump_center():
    model = NoiseModel(1, (BumpMode(amplitude=0.6, center=(0.5,), radius=0.3),))
    characteristic = model.characteristic(0.0, np.array([[0.2, 0.5, 0.7]]))
    assert characteristic.largest_eigenvalue_of_A() == pytest.approx(0.36)
    assert NoiseModel(1).characteristic(0.0, np.zeros((1, 3))).largest_eigenvalue_of_A() == 0.0


def test_stream_is_deterministic_per_key():
    first = NoiseStream(11, 3, 2, 1e-3)
    second = NoiseStream(11, 3, 2, 1e-3)
    other = NoiseStream(11, 4, 2, 1e-3)
    for step in (0, 5, 1000):
        np.testing.assert_array_equal(first.increments(step), second.increments(step))
        assert not np.array_equal(first.increments(step), other.increments(step))
    np.testing.assert_array_equal(first.increments(7), first.increments(7))


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=6))
def test_coarsened_stream_sums_fine_increments(step: int, refinement: int):
    fine = NoiseStream(2, 0, 3, 1e-4)
    coarse = fine.coarsened(refinement)
    expected = np.zeros(3)
    for base in range(step * refinement, (step + 1) * refinement):
        expected = expected + fine.increments(base)
    np.testing.assert_array_equal(coarse.increments(step), expected)
    assert coarse.dt == pytest.approx(refinement * 1e-4)


def test_stream_variance():
    stream = NoiseStream(5, 0, 2, 1e-3)
    draws = np.array([stream.increments(step) for step in range(4000)])
    np.testing.assert_allclose(np.var(draws, axis=0), 1e-3, rtol=0.1)
    np.testing.assert_allclose(np.mean(draws, axis=0), 0.0, atol=3e-3)


def test_invalid_stream():
    with pytest.raises(DomainError):
        NoiseStream(0, 0, 1, 0.0)
    with pytest.raises(DomainError):
        NoiseStream(0, 0, 1, 1e-3, refinement=0)


def test_recorded_stream_replays_and_exhausts():
    record = np.arange(6.0).reshape(3, 2)
    stream = RecordedNoiseStream(record)
    assert stream.n_modes == 2
    np.testing.assert_array_equal(stream.increments(2), [4.0, 5.0])
    with pytest.raises(NoiseStreamExhausted):
        stream.increments(3)


def test_sample_noise_increment():
    grid = Grid(1, 32)
    model = NoiseModel(1, (BumpMode(amplitude=0.5, center=(0.5,), radius=0.3),))
    stream = NoiseStream(1, 0, 1, 1e-4)
    noise, increments = sample_noise_increment(model, grid, 0.0, 1e-4, stream, step=4)
    np.testing.assert_array_equal(increments, stream.increments(4))
    values, _, _ = model.sample(0.0, grid.coordinates)
    np.testing.assert_allclose(noise.components, increments[0] * values[0])
    with pytest.raises(DomainError):
        sample_noise_increment(model, grid, 0.0, 0.0, stream)
