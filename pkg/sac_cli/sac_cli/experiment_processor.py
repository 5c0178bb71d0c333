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
Experiment processor module: turns a parsed command line into an exit code.
'''

from __future__ import annotations

import argparse
import logging
from typing import Optional

import command

logger = logging.getLogger()


class ExperimentProcessor:  # pylint: disable=too-few-public-methods
    '''
    Creates the command of a subcommand name and runs it.

    Arguments are parsed when the command is created, so configuration and
    stability errors surface here, before any work, and get the same exit
    codes as failures during the run.
    '''

    def __init__(
        self,
        command_factory: Optional[command.CommandFactory] = None,
    ) -> None:
        self.command_factory = command_factory

    def _create_command(self, name: str, args: argparse.Namespace) -> command.Command:
        if self.command_factory is None:
            raise ValueError('Command factory is not set')

        return self.command_factory.create_command(name, args)

    def process(self, name: str, args: argparse.Namespace) -> int:
        '''
        Run a subcommand.

        Args:
            name: Subcommand name.
            args: Parsed command line of the subcommand.

        Returns:
            The exit code.
        '''
        try:
            command_obj = self._create_command(name, args)
        except Exception as e:
            code = command.exit_code(e)
            if code is None:
                logger.error(f'Encountered exception while creating command {name}')
                raise
            logger.error(f'{name}: {e}')
            return code

        return command_obj.handle()
