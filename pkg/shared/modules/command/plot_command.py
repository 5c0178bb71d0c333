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
Plot command module.
'''

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from sac.exceptions import ConfigError

from .command import Command
from .command_factory import CommandFactory
from .report_files import render_figures

logger = logging.getLogger()


class PlotCommand(Command):
    '''
    Redraw the figures of an existing output directory from its tables.
    '''

    name: str = 'plot'
    directory: Path

    def _handle_arguments(self, args: argparse.Namespace) -> None:
        self.directory = Path(args.directory)
        if not self.directory.is_dir():
            raise ConfigError(f'{self.directory} is not a directory', 'directory')

    def _execute(self) -> None:
        if not render_figures(self.directory, self.csv_wrapper, self.svg_plotter):
            raise ConfigError(f'No report tables found in {self.directory}', 'directory')


CommandFactory.commands[PlotCommand.name] = PlotCommand
