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
Cross-backend validation suite.

Each check builds its own small experiment, runs it on shared Brownian paths
and compares against an oracle:

    transport_exactness   constant-mode transport on the torus against the exact
                          translate, plus the observed order under refinement
    ito_heun_agreement    the Ito scheme with correction terms against the
                          Stratonovich predictor-corrector on the same path
    flow_property         composition defect of the simulated flow under dt halving
    flow_consistency      D phi times D phi^-1 at phi against the identity
    backend_equivalence   direct solver against the flow-transformed equation

Checks that need noise report 'skipped' when the noise amplitude is zero.
'''

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import StrEnum
import logging
from typing import Callable, Optional

import numpy as np
import pandas as pd
from scipy import stats

from .experiment import Backend, DiagnosticsSettings, Experiment
from .flow import FlowMap, advance_flow, flow_consistency_defect, flow_property_defect
from .grid import Closure, Grid
from .initial import InitialData, Kink, Smooth
from .modes import BumpMode, ConstantMode, RotationMode
from .noise import IncrementSource, NoiseModel, NoiseStream
from .potential import STANDARD_QUARTIC
from .solver import (
    DiffusionTreatment,
    Mutation,
    Scheme,
    SolverConfig,
    Trajectory,
    run_transport,
    transport_config,
)

logger = logging.getLogger()


class CheckStatus(StrEnum):
    PASS = 'pass'
    FAIL = 'fail'
    SKIPPED = 'skipped'


@dataclass(frozen=True)
class CheckResult:
    '''
    Outcome of one validation check.

    Attributes:
        name: Check name.
        status: pass, fail or skipped.
        value: Headline measurement.
        criterion: Acceptance criterion in words.
        detail: Supporting measurements.
    '''

    name: str
    status: CheckStatus
    value: float = float('nan')
    criterion: str = ''
    detail: str = ''


@dataclass(frozen=True)
class ValidationSettings:  # pylint: disable=too-many-instance-attributes
    '''
    Sizes and tolerances of the validation suite. The defaults are the
    acceptance sizes; tests shrink them.
    '''

    noise_amplitude: float = 1.0
    master_seed: int = 20250101
    samples: int = 4
    mutations: frozenset[Mutation] = field(default_factory=frozenset)

    transport_sigma: float = 0.3
    transport_m: int = 256
    transport_dt: float = 1e-4
    transport_t_end: float = 0.1
    transport_tolerance: float = 1e-2
    refinement_levels: tuple[int, ...] = (64, 128, 256)
    refinement_t_end: float = 0.096
    refinement_order: float = 0.9

    agreement_m: int = 128
    agreement_eps: float = 0.1
    agreement_dt: float = 2.5e-5
    agreement_halvings: int = 3
    agreement_t_end: float = 0.1
    agreement_band: tuple[float, float] = (1.3, 3.0)

    flow_m: int = 32
    flow_dt: float = 1e-3
    flow_steps: tuple[int, int, int] = (0, 20, 40)
    flow_halvings: int = 2
    flow_factor: float = 1.5

    consistency_m: int = 128
    consistency_dt: float = 2.5e-5
    consistency_steps: int = 800
    consistency_tolerance: float = 1e-4

    backend_m: int = 256
    backend_eps: float = 0.05
    backend_dt: float = 2e-5
    backend_t_end: float = 0.05
    backend_tolerance: float = 5e-2


@dataclass
class ValidationReport:
    results: list[CheckResult]

    @property
    def failed(self) -> list[str]:
        return [r.name for r in self.results if r.status == CheckStatus.FAIL]

    @property
    def passed(self) -> bool:
        return not self.failed

    def table(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    'check': r.name,
                    'status': str(r.status),
                    'value': r.value,
                    'criterion': r.criterion,
                    'detail': r.detail,
                }
                for r in self.results
            ],
            columns=['check', 'status', 'value', 'criterion', 'detail'],
        )


def _bump_model(dim: int, amplitude: float) -> NoiseModel:
    if not amplitude:
        return NoiseModel(dim)
    if dim == 1:
        return NoiseModel(1, (BumpMode(amplitude, (0.5,), 0.3, (1.0,)),))
    return NoiseModel(
        2,
        (
            RotationMode(amplitude, (0.5, 0.5), 0.3),
            BumpMode(0.5 * amplitude, (0.5, 0.5), 0.3, (1.0, 0.0)),
        ),
    )


def _outcome(passed: bool) -> CheckStatus:
    return CheckStatus.PASS if passed else CheckStatus.FAIL


def _skipped(name: str) -> CheckResult:
    return CheckResult(name, CheckStatus.SKIPPED, detail='no noise modes')


def _final(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    grid: Grid,
    model: NoiseModel,
    config: SolverConfig,
    stream: IncrementSource,
    initial: InitialData,
    backend: Backend = Backend.DIRECT,
) -> np.ndarray:
    experiment = Experiment(
        grid,
        STANDARD_QUARTIC,
        model,
        replace(config, snapshot_stride=max(1, config.steps)),
        initial,
        DiagnosticsSettings(track_identity=False),
        backend,
    )
    return experiment.solve(stream, keep_snapshots=False).final


def transport_exactness(settings: ValidationSettings) -> CheckResult:
    '''
    u(t, x) = u0(x + sigma W_t) for a constant mode sigma e1 on the torus; the
    error must be small at the headline resolution and fall at the expected
    order when h is refined with dt proportional to h^2.
    '''
    name = 'transport_exactness'
    sigma = settings.transport_sigma * settings.noise_amplitude
    if not sigma:
        return _skipped(name)
    model = NoiseModel(1, (ConstantMode(sigma, (1.0,)),))
    initial = Smooth(0.5, (1,))

    def error(m: int, dt: float, t_end: float, stream: NoiseStream) -> float:
        grid = Grid(1, m, Closure.PERIODIC)
        config = transport_config(
            SolverConfig(eps=1.0, dt=dt, t_end=t_end, mutations=settings.mutations)
        )
        u0 = initial.sample(grid, STANDARD_QUARTIC, config.eps)
        trajectory = Trajectory(config, grid, model, u0, stream, track_identity=False)
        result = run_transport(trajectory)
        shift = sigma * float(np.sum(result.increments))
        exact = initial.amplitude * np.cos(2.0 * np.pi * (grid.axis_coordinates + shift))
        return grid.integrate(np.abs(result.final - exact))

    dt = settings.transport_dt
    headline = error(
        settings.transport_m,
        dt,
        settings.transport_t_end,
        NoiseStream(settings.master_seed, 0, 1, dt),
    )

    finest = max(settings.refinement_levels)
    errors = []
    for m in settings.refinement_levels:
        refinement = round((finest / m) ** 2)
        per_path = [
            error(
                m,
                dt * refinement,
                settings.refinement_t_end,
                NoiseStream(settings.master_seed, k, 1, dt).coarsened(refinement),
            )
            for k in range(settings.samples)
        ]
        errors.append(float(np.mean(per_path)))
    levels = np.array(settings.refinement_levels, dtype=float)
    order = -float(stats.linregress(np.log(levels), np.log(errors)).slope)
    return CheckResult(
        name,
        _outcome(headline < settings.transport_tolerance and order >= settings.refinement_order),
        headline,
        f'L1 < {settings.transport_tolerance}, order >= {settings.refinement_order}',
        f'order={order:.3f} errors={[f"{e:.3g}" for e in errors]}',
    )


def ito_heun_agreement(settings: ValidationSettings) -> CheckResult:
    '''
    The L1 gap between the Ito and Heun schemes on a shared path shrinks by a
    factor inside the band for every dt halving.
    '''
    name = 'ito_heun_agreement'
    model = _bump_model(1, 0.5 * settings.noise_amplitude)
    if not model.n_modes:
        return _skipped(name)
    grid = Grid(1, settings.agreement_m)
    halvings = settings.agreement_halvings
    finest = settings.agreement_dt / 2**halvings
    gaps = []
    for level in range(halvings + 1):
        refinement = 2 ** (halvings - level)
        per_path = []
        for k in range(settings.samples):
            stream = NoiseStream(settings.master_seed, k, model.n_modes, finest)
            finals = [
                _final(
                    grid,
                    model,
                    SolverConfig(
                        eps=settings.agreement_eps,
                        dt=finest * refinement,
                        t_end=settings.agreement_t_end,
                        scheme=scheme,
                        mutations=settings.mutations,
                    ),
                    stream.coarsened(refinement),
                    Kink(),
                )
                for scheme in (Scheme.ITO_EULER, Scheme.STRATONOVICH_HEUN)
            ]
            per_path.append(grid.integrate(np.abs(finals[0] - finals[1])))
        gaps.append(float(np.mean(per_path)))
        logger.debug(f'{name}: dt={finest * refinement:.4g} gap={gaps[-1]:.4g}')
    factors = [a / b for a, b in zip(gaps, gaps[1:])]
    low, high = settings.agreement_band
    return CheckResult(
        name,
        _outcome(all(low <= f <= high for f in factors)),
        min(factors),
        f'gap factor per halving in [{low}, {high}]',
        f'gaps={[f"{g:.3g}" for g in gaps]} factors={[f"{f:.3f}" for f in factors]}',
    )


def flow_property(settings: ValidationSettings) -> CheckResult:
    '''
    phi_{s,t} o phi_{r,s} = phi_{r,t} at interior probes; the mean defect over
    paths must fall by the given factor per dt halving.
    '''
    name = 'flow_property'
    model = _bump_model(2, settings.noise_amplitude)
    if not model.n_modes:
        return _skipped(name)
    grid = Grid(2, settings.flow_m)
    axis = np.linspace(0.35, 0.65, 5)
    probes = np.stack([p.ravel() for p in np.meshgrid(axis, axis, indexing='ij')])
    halvings = settings.flow_halvings
    finest = settings.flow_dt / 2**halvings
    defects = []
    for level in range(halvings + 1):
        scale = 2**level
        refinement = 2 ** (halvings - level)
        steps = tuple(s * scale for s in settings.flow_steps)
        per_path = [
            flow_property_defect(
                model,
                grid,
                NoiseStream(settings.master_seed, k, model.n_modes, finest).coarsened(refinement),
                finest * refinement,
                steps,  # type: ignore[arg-type]
                probes,
            )
            for k in range(settings.samples)
        ]
        defects.append(float(np.mean(per_path)))
    factors = [a / b for a, b in zip(defects, defects[1:])]
    return CheckResult(
        name,
        _outcome(all(f >= settings.flow_factor for f in factors)),
        min(factors),
        f'defect factor per halving >= {settings.flow_factor}',
        f'defects={[f"{d:.3g}" for d in defects]}',
    )


def flow_consistency(settings: ValidationSettings) -> CheckResult:
    '''
    D phi (D phi^-1 o phi) = I at interior nodes after the configured number of steps.
    '''
    name = 'flow_consistency'
    model = _bump_model(1, 0.5 * settings.noise_amplitude)
    if not model.n_modes:
        return _skipped(name)
    grid = Grid(1, settings.consistency_m)
    dt = settings.consistency_dt
    stream = NoiseStream(settings.master_seed, 0, model.n_modes, dt)
    fm = FlowMap.identity(grid)
    for step in range(settings.consistency_steps):
        fm = advance_flow(fm, model, step * dt, dt, stream.increments(step))
    defect = flow_consistency_defect(fm)
    return CheckResult(
        name,
        _outcome(defect <= settings.consistency_tolerance),
        defect,
        f'defect <= {settings.consistency_tolerance}',
    )


def backend_equivalence(settings: ValidationSettings) -> CheckResult:
    '''
    Direct and flow backends agree in L1 on shared paths, and agree better on
    the finer of two resolutions.
    '''
    name = 'backend_equivalence'
    model = _bump_model(1, 0.5 * settings.noise_amplitude)
    if not model.n_modes:
        return _skipped(name)
    dt = settings.backend_dt
    distances = []
    for m, refinement in ((settings.backend_m // 2, 2), (settings.backend_m, 1)):
        grid = Grid(1, m)
        config = SolverConfig(
            eps=settings.backend_eps,
            dt=dt * refinement,
            t_end=settings.backend_t_end,
            diffusion_treatment=DiffusionTreatment.SEMI_IMPLICIT,
            mutations=settings.mutations,
        )
        per_path = []
        for k in range(settings.samples):
            stream = NoiseStream(settings.master_seed, k, model.n_modes, dt).coarsened(refinement)
            direct, transformed = (
                _final(grid, model, config, stream, Kink(), backend)
                for backend in (Backend.DIRECT, Backend.FLOW)
            )
            per_path.append(grid.integrate(np.abs(direct - transformed)))
        distances.append(float(np.mean(per_path)))
    coarse, fine = distances
    return CheckResult(
        name,
        _outcome(fine <= settings.backend_tolerance and fine < coarse),
        fine,
        f'L1 <= {settings.backend_tolerance} and decreasing under refinement',
        f'coarse={coarse:.3g} fine={fine:.3g}',
    )


CHECKS: dict[str, Callable[[ValidationSettings], CheckResult]] = {
    'transport_exactness': transport_exactness,
    'ito_heun_agreement': ito_heun_agreement,
    'flow_property': flow_property,
    'flow_consistency': flow_consistency,
    'backend_equivalence': backend_equivalence,
}


def run_validation(
    settings: Optional[ValidationSettings] = None, checks: Optional[list[str]] = None
) -> ValidationReport:
    '''
    Run the selected checks, all of them by default.

    Args:
        settings: Sizes and tolerances.
        checks: Names of the checks to run.

    Returns:
        The report; failed checks are listed by ValidationReport.failed.
    '''
    settings = settings or ValidationSettings()
    results = []
    for name in checks or list(CHECKS):
        logger.info(f'Validation check {name}')
        result = CHECKS[name](settings)
        logger.info(f'{name}: {result.status} value={result.value:.4g} {result.detail}')
        results.append(result)
    return ValidationReport(results)
