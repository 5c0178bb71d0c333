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
Sweep command module: the sharp-interface comparison across eps.
'''

from __future__ import annotations

import argparse
import logging

from sac.ensemble import EnsembleConfig, sharp_interface_sweep
from sac.exceptions import ConfigError

from .command_factory import CommandFactory
from .experiment_command import ExperimentCommand
from .report_files import SWEEP_SEPARATION_TABLE, SWEEP_SUMMARY, SWEEP_TABLE

logger = logging.getLogger()

MIN_SWEEP_EPS = 3


class SweepCommand(ExperimentCommand):
    '''
    Run the [ensemble] section as a sweep over decreasing eps on shared paths.
    '''

    name: str = 'sweep'
    ensemble: EnsembleConfig
    workers: int

    def _handle_experiment(self, args: argparse.Namespace) -> None:
        self.ensemble = self._ensemble_config()
        if len(self.ensemble.eps_list) < MIN_SWEEP_EPS:
            raise ConfigError(
                f'A sweep needs at least {MIN_SWEEP_EPS} eps values, '
                f'got {len(self.ensemble.eps_list)}',
                'ensemble.eps_list',
            )
        self.workers = self._pool_workers(args)

    def _execute(self) -> None:
        report = sharp_interface_sweep(self.ensemble, self.pool_wrapper.resized(self.workers))
        self.csv_wrapper.write_table(report.table, self.output / SWEEP_TABLE)
        self.csv_wrapper.write_table(report.separation, self.output / SWEEP_SEPARATION_TABLE)
        self.csv_wrapper.write_summary(
            {
                'master_seed': self.ensemble.master_seed,
                'samples': self.ensemble.samples,
                'eps': list(self.ensemble.eps_list),
                'finest_distance': report.finest_distance,
                'monotone': report.monotone,
            },
            self.output / SWEEP_SUMMARY,
        )
        self._render()


CommandFactory.commands[SweepCommand.name] = SweepCommand
