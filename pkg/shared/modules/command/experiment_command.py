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
Experiment command module: the common base of commands driven by an
experiment document.
'''

from __future__ import annotations

from abc import abstractmethod
import argparse
import logging
from pathlib import Path
from typing import Optional

from sac.ensemble import EnsembleConfig
from sac.exceptions import ConfigError
from sac.experiment_config import ExperimentConfig, load_experiment_config

from .command import Command
from .config import CONFIG
from .report_files import render_figures

logger = logging.getLogger()


def resolve_workers(cli: Optional[int], environment: int, document: int) -> int:
    '''
    Worker count: the command line wins, then SAC_THREADS, then the document.
    '''
    for value in (cli, environment):
        if value:
            return max(1, int(value))
    return max(1, document)


class ExperimentCommand(Command):
    '''
    Base class of commands that load an experiment document.

    Attributes:
        config: The loaded experiment.
        output: Output directory.
    '''

    config: ExperimentConfig
    output: Path

    def _handle_arguments(self, args: argparse.Namespace) -> None:
        '''
        Load the document named by args.config with overrides and debug mutations.

        Raises:
            ConfigError: If the document is missing or invalid.
            StabilityError: If dt exceeds the stability bound.
        '''
        self.config = load_experiment_config(
            Path(args.config), args.unsafe_debug or (), args.set or ()
        )
        self.output = Path(args.output) if args.output else self.config.output.directory
        self._handle_experiment(args)

    def _handle_experiment(self, args: argparse.Namespace) -> None:
        '''
        Hook for subcommand-specific checks of the loaded experiment.
        '''
        _ = args

    def _ensemble_config(self) -> EnsembleConfig:
        if self.config.ensemble is None:
            raise ConfigError(f'{self.name} needs an [ensemble] section', 'ensemble')
        return self.config.ensemble

    def _pool_workers(self, args: argparse.Namespace) -> int:
        document = self.config.ensemble.workers if self.config.ensemble else 1
        return resolve_workers(args.workers, CONFIG['threads'], document)

    def _render(self) -> None:
        if self.config.output.plots:
            render_figures(self.output, self.csv_wrapper, self.svg_plotter)

    @abstractmethod
    def _execute(self) -> None:
        '''
        Run the experiment and write its outputs under self.output.
        '''
