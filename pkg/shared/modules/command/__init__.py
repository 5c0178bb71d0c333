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
Command package for the sac command line.

Each subcommand is a Command subclass that parses its arguments at
construction and maps the library's failure categories to exit codes.

Command Hierarchy:
    Command (ABC)
    ├── ExperimentCommand - loads an experiment document
    │   ├── RunCommand - one trajectory
    │   ├── EnsembleCommand - ensemble statistics and gates
    │   └── SweepCommand - sharp-interface sweep
    ├── ValidateCommand - built-in numerical checks
    └── PlotCommand - figures from existing tables

Usage:
    >>> from command import CommandFactory
    >>> factory = CommandFactory(csv_wrapper, svg_plotter, pool_wrapper)
    >>> command = factory.create_command('run', args)
    >>> command.handle()
    0

Exit codes:
    0 success, 2 configuration error, 3 stability violation, 4 blow-up,
    5 failed gate. Anything else propagates.
'''

from .command import Command, exit_code
from .experiment_command import ExperimentCommand
from .run_command import RunCommand
from .ensemble_command import EnsembleCommand
from .sweep_command import SweepCommand
from .validate_command import ValidateCommand
from .plot_command import PlotCommand

from .command_factory import CommandFactory

__all__ = [
    'Command',
    'exit_code',
    'ExperimentCommand',
    'RunCommand',
    'EnsembleCommand',
    'SweepCommand',
    'ValidateCommand',
    'PlotCommand',
    'CommandFactory',
]
