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
Ensemble command module: M trajectories per eps and their statistics.
'''

from __future__ import annotations

import argparse
import logging
from typing import Any

import numpy as np

from sac.ensemble import EnsembleConfig, EnsembleStats, run_ensemble, tail_table
from sac.exceptions import GateFailure

from .command_factory import CommandFactory
from .experiment_command import ExperimentCommand
from .report_files import (
    ENSEMBLE_SUMMARY,
    ENVELOPE_TABLE,
    INCREMENT_MOMENTS_TABLE,
    INCREMENTS_TABLE,
    MOMENTS_TABLE,
    RESIDUAL_SUMMARY_TABLE,
    RESIDUALS_TABLE,
    SEPARATION_TABLE,
    SUMMARY_TABLE,
    TAILS_TABLE,
)

logger = logging.getLogger()

TAIL_MULTIPLES = (0.5, 1.0, 2.0, 4.0, 8.0)


def default_lambdas(ensemble_stats: EnsembleStats) -> tuple[float, ...]:
    '''
    Tail thresholds when none are configured: multiples of the mean initial energy.
    '''
    initial = float(np.mean([s.initial_energy for s in ensemble_stats.samples]))
    return tuple(m * initial for m in TAIL_MULTIPLES)


def ensemble_summary(ensemble_stats: EnsembleStats) -> dict[str, Any]:
    '''
    Machine-readable summary. Independent of the worker count.
    '''
    config = ensemble_stats.config
    return {
        'master_seed': config.master_seed,
        'samples': config.samples,
        'eps': list(config.eps_values),
        'accepted': len(ensemble_stats.samples),
        'failures': ensemble_stats.failures,
        'gates': ensemble_stats.gates,
    }


class EnsembleCommand(ExperimentCommand):
    '''
    Run the ensemble described by the [ensemble] section.

    Every table and the summary are written before the gates are judged, so a
    failing gate (exit code 5) still leaves a complete output directory.
    '''

    name: str = 'ensemble'
    ensemble: EnsembleConfig
    workers: int

    def _handle_experiment(self, args: argparse.Namespace) -> None:
        self.ensemble = self._ensemble_config()
        self.workers = self._pool_workers(args)

    def _execute(self) -> None:
        pool = self.pool_wrapper.resized(self.workers)
        ensemble_stats = run_ensemble(self.ensemble, pool)
        lambdas = self.ensemble.lambda_list or default_lambdas(ensemble_stats)
        tables = {
            SUMMARY_TABLE: ensemble_stats.summary,
            MOMENTS_TABLE: ensemble_stats.moments,
            ENVELOPE_TABLE: ensemble_stats.envelope,
            TAILS_TABLE: tail_table(ensemble_stats, lambdas),
            RESIDUALS_TABLE: ensemble_stats.residuals,
            RESIDUAL_SUMMARY_TABLE: ensemble_stats.residual_summary,
            INCREMENTS_TABLE: ensemble_stats.increments,
            INCREMENT_MOMENTS_TABLE: ensemble_stats.increment_moments,
            SEPARATION_TABLE: ensemble_stats.separation,
        }
        for file_name, table in tables.items():
            self.csv_wrapper.write_table(table, self.output / file_name)
        self.csv_wrapper.write_summary(
            ensemble_summary(ensemble_stats), self.output / ENSEMBLE_SUMMARY
        )
        self._render()

        failed = ensemble_stats.failed_gates()
        if failed:
            raise GateFailure(failed)


CommandFactory.commands[EnsembleCommand.name] = EnsembleCommand
