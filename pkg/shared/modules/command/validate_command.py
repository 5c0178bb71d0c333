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
Validate command module: the built-in numerical checks.
'''

from __future__ import annotations

import argparse
from dataclasses import replace
import logging
from pathlib import Path
from typing import Optional

from sac.exceptions import ConfigError, GateFailure
from sac.solver import Mutation
from sac.validation import CHECKS, ValidationSettings, run_validation

from .command import Command
from .command_factory import CommandFactory
from .report_files import VALIDATION_TABLE

logger = logging.getLogger()


class ValidateCommand(Command):
    '''
    Run the validation suite and print its table.

    Attributes:
        settings: Sizes and tolerances, with the noise amplitude and debug
            mutations of the command line.
        checks: Names of the checks to run, all by default.
        output: Directory for validation.csv, if given.
    '''

    name: str = 'validate'
    settings: ValidationSettings
    checks: Optional[list[str]]
    output: Optional[Path]

    def _handle_arguments(self, args: argparse.Namespace) -> None:
        '''
        Raises:
            ConfigError: For an unknown check or a negative noise amplitude.
        '''
        unknown = [name for name in args.check or () if name not in CHECKS]
        if unknown:
            raise ConfigError(f'Unknown checks {unknown}, expected {list(CHECKS)}', 'check')
        if args.noise_amplitude < 0.0:
            raise ConfigError('The noise amplitude must not be negative', 'noise_amplitude')
        self.settings = replace(
            ValidationSettings(),
            noise_amplitude=args.noise_amplitude,
            mutations=frozenset(Mutation(m) for m in args.unsafe_debug or ()),
        )
        self.checks = list(args.check) if args.check else None
        self.output = Path(args.output) if args.output else None

    def _execute(self) -> None:
        report = run_validation(self.settings, self.checks)
        table = report.table()
        print(table.to_string(index=False))
        if self.output is not None:
            self.csv_wrapper.write_table(table, self.output / VALIDATION_TABLE)
        if report.failed:
            raise GateFailure(report.failed)


CommandFactory.commands[ValidateCommand.name] = ValidateCommand
