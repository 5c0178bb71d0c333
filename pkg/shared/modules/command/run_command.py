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
Run command module: a single trajectory.
'''

from __future__ import annotations

import logging

import pandas as pd

from sac.identity import IdentityLedger
from sac.solver import TrajectoryResult
from snapshot_store import SnapshotStore

from .command_factory import CommandFactory
from .experiment_command import ExperimentCommand
from .report_files import LEDGER_TABLE, SNAPSHOT_DIRECTORY, TRAJECTORY_TABLE

logger = logging.getLogger()


def trajectory_table(result: TrajectoryResult) -> pd.DataFrame:
    '''
    One row per snapshot: t, energy, willmore, bv_g, l1_g, l1_norm, min_u, max_u,
    separation and, for circle diagnostics, radius.
    '''
    return pd.DataFrame([report.row() for report in result.reports])


def ledger_table(ledger: IdentityLedger, times: list[float]) -> pd.DataFrame:
    '''
    Cumulative identity terms per channel at the snapshot times.
    '''
    rows = []
    for label in ledger.labels:
        for t in times:
            k = ledger.index(t)
            rows.append(
                {
                    'label': label,
                    't': t,
                    'measure': ledger.measure[label][k],
                    'dissipation': ledger.dissipation[label][k],
                    'flux': ledger.flux[label][k],
                    'martingale': ledger.martingale[label][k],
                    'remainder': ledger.remainder[label][k],
                    'quadratic_variation': ledger.quadratic_variation[label][k],
                }
            )
    return pd.DataFrame(rows)


class RunCommand(ExperimentCommand):
    '''
    Run one trajectory of the experiment on the configured sample path.

    Writes the per-trajectory table, the identity ledger when recorded, binary
    snapshots, and the energy and radius figures.
    '''

    name: str = 'run'

    def _execute(self) -> None:
        experiment = self.config.experiment
        stream = experiment.stream(self.config.master_seed, self.config.sample_index)
        result = experiment.solve(
            stream,
            sample_index=self.config.sample_index,
            keep_snapshots=self.config.output.snapshots,
        )
        self.csv_wrapper.write_table(trajectory_table(result), self.output / TRAJECTORY_TABLE)
        if result.ledger is not None:
            self.csv_wrapper.write_table(
                ledger_table(result.ledger, result.times), self.output / LEDGER_TABLE
            )
        if self.config.output.snapshots:
            SnapshotStore(self.output / SNAPSHOT_DIRECTORY).write_series(
                result.grid, result.snapshots, result.times, result.sample_index
            )
        self._render()


CommandFactory.commands[RunCommand.name] = RunCommand
