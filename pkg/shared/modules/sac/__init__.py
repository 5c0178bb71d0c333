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
Stochastic Allen-Cahn numerical lab.

This package simulates the Allen-Cahn equation driven by multiplicative
transport noise, du = (lap u - F'(u)/eps^2) dt + grad u . X(o dt), and measures
the quantities that control its sharp-interface limit: the diffuse surface
energy, the diffuse mean curvature, BV bounds of the Modica-Mortola transform
and the stochastic energy identities.

Modules:
    potential    double-well potentials, G transform, surface tension
    grid         nodal finite differences on the unit box
    modes        analytic noise vector fields (self-registering)
    noise        noise models, local characteristics, Brownian streams
    localization test functions for localized identities (self-registering)
    initial      initial data (self-registering)
    solver       Ito and Stratonovich time steppers
    flow         stochastic flow backend
    diagnostics  energy, curvature, BV and increment diagnostics
    identity     global and localized energy identity ledgers
    interface    zero level set extraction
    experiment   trajectory templates
    ensemble     Monte Carlo statistics and sharp-interface sweeps
    experiment_config  TOML experiment documents
    validation   cross-backend validation suite

Usage:
    >>> from sac import load_experiment_config, run_ensemble
    >>> config = load_experiment_config(Path('configs/identity.toml'))
    >>> stats = run_ensemble(config.ensemble)
    >>> stats.residual_summary
'''

from .exceptions import (
    BlowupError,
    ConfigError,
    ContractError,
    DegenerateFlowError,
    DomainError,
    GateFailure,
    LinearSolveError,
    NoiseStreamExhausted,
    RangeError,
    SacError,
    StabilityError,
)
from .potential import DoubleWell, STANDARD_QUARTIC, surface_tension
from .grid import Closure, Grid
from .modes import ModeFactory
from .noise import NoiseModel, NoiseStream, RecordedNoiseStream
from .localization import TestFunctionFactory
from .initial import InitialDataFactory
from .solver import (
    Scheme,
    SolverConfig,
    Trajectory,
    TrajectoryResult,
    run,
    run_transport,
    step_ito,
    step_stratonovich_heun,
)
from .flow import FlowMap, advance_flow, solve_transformed
from .diagnostics import EnergyReport, increment_statistic, snapshot_report
from .identity import IdentityLedger, global_identity_residual, localized_identity_residual
from .interface import circle_radius, interface_extract
from .experiment import Backend, Experiment
from .ensemble import (
    EnsembleConfig,
    EnsembleStats,
    SweepReport,
    run_ensemble,
    sharp_interface_sweep,
    tail_table,
)
from .experiment_config import ExperimentConfig, build_experiment_config, load_experiment_config
from .validation import CheckStatus, ValidationReport, ValidationSettings, run_validation

__all__ = [
    'SacError',
    'DomainError',
    'RangeError',
    'StabilityError',
    'BlowupError',
    'LinearSolveError',
    'DegenerateFlowError',
    'ContractError',
    'NoiseStreamExhausted',
    'ConfigError',
    'GateFailure',
    'DoubleWell',
    'STANDARD_QUARTIC',
    'surface_tension',
    'Closure',
    'Grid',
    'ModeFactory',
    'NoiseModel',
    'NoiseStream',
    'RecordedNoiseStream',
    'TestFunctionFactory',
    'InitialDataFactory',
    'Scheme',
    'SolverConfig',
    'Trajectory',
    'TrajectoryResult',
    'run',
    'run_transport',
    'step_ito',
    'step_stratonovich_heun',
    'FlowMap',
    'advance_flow',
    'solve_transformed',
    'EnergyReport',
    'increment_statistic',
    'snapshot_report',
    'IdentityLedger',
    'global_identity_residual',
    'localized_identity_residual',
    'circle_radius',
    'interface_extract',
    'Backend',
    'Experiment',
    'EnsembleConfig',
    'EnsembleStats',
    'SweepReport',
    'run_ensemble',
    'sharp_interface_sweep',
    'tail_table',
    'ExperimentConfig',
    'build_experiment_config',
    'load_experiment_config',
    'CheckStatus',
    'ValidationReport',
    'ValidationSettings',
    'run_validation',
]
