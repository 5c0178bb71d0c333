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

from dataclasses import replace

import pytest

from sac.solver import Mutation
from sac.validation import (
    CHECKS,
    CheckResult,
    CheckStatus,
    ValidationReport,
    ValidationSettings,
    run_validation,
)

SMALL_TRANSPORT = ValidationSettings(
    samples=2,
    transport_m=64,
    refinement_levels=(16, 32, 64),
)


def test_checks_without_noise_are_skipped():
    report = run_validation(ValidationSettings(noise_amplitude=0.0))
    table = report.table()
    assert table['check'].tolist() == list(CHECKS)
    assert set(table['status']) == {'skipped'}
    assert report.passed
    assert not report.failed


def test_selected_checks_run_in_order():
    report = run_validation(
        ValidationSettings(noise_amplitude=0.0), ['flow_consistency', 'transport_exactness']
    )
    assert [r.name for r in report.results] == ['flow_consistency', 'transport_exactness']


def test_flow_consistency_passes():
    settings = ValidationSettings(
        noise_amplitude=0.6,
        master_seed=4,
        consistency_m=128,
        consistency_dt=1e-4,
        consistency_steps=100,
        consistency_tolerance=1e-2,
    )
    result = CHECKS['flow_consistency'](settings)
    assert result.status == CheckStatus.PASS
    assert 0.0 <= result.value <= 1e-2


def test_transport_without_the_correction_term_fails():
    settings = replace(SMALL_TRANSPORT, mutations=frozenset({Mutation.ZERO_A}))
    result = CHECKS['transport_exactness'](settings)
    assert result.status == CheckStatus.FAIL
    assert result.value > settings.transport_tolerance
    assert 'order=' in result.detail


def test_report_lists_failures():
    report = ValidationReport(
        [
            CheckResult('transport_exactness', CheckStatus.PASS, 1e-3),
            CheckResult('flow_property', CheckStatus.FAIL, 1.1),
            CheckResult('flow_consistency', CheckStatus.SKIPPED),
        ]
    )
    assert report.failed == ['flow_property']
    assert not report.passed
    assert report.table()['status'].tolist() == ['pass', 'fail', 'skipped']


@pytest.mark.slow
def test_ito_and_heun_converge_together():
    settings = ValidationSettings(
        samples=512,
        agreement_m=32,
        agreement_dt=1e-4,
        agreement_halvings=2,
        agreement_t_end=5e-3,
    )
    result = CHECKS['ito_heun_agreement'](settings)
    assert result.status == CheckStatus.PASS
    assert settings.agreement_band[0] <= result.value <= settings.agreement_band[1]


@pytest.mark.slow
def test_ito_without_the_drift_correction_disagrees_with_heun():
    settings = ValidationSettings(
        samples=2,
        mutations=frozenset({Mutation.ZERO_C}),
        agreement_m=32,
        agreement_dt=1e-4,
        agreement_halvings=2,
        agreement_t_end=0.1,
    )
    result = CHECKS['ito_heun_agreement'](settings)
    assert result.status == CheckStatus.FAIL
    assert result.value < settings.agreement_band[0]


def test_flow_property_defect_shrinks_with_dt():
    result = CHECKS['flow_property'](ValidationSettings(samples=8))
    assert result.status == CheckStatus.PASS
    assert result.value >= 1.5


@pytest.mark.slow
def test_backends_agree():
    settings = ValidationSettings(
        samples=256,
        backend_m=64,
        backend_eps=0.1,
        backend_dt=1e-4,
        backend_t_end=5e-3,
    )
    result = CHECKS['backend_equivalence'](settings)
    assert result.status == CheckStatus.PASS
    assert result.value <= settings.backend_tolerance
