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
Command factory module for creating subcommand objects.
'''

from __future__ import annotations

import argparse
import logging
from typing import TYPE_CHECKING, Dict, Type

if TYPE_CHECKING:
    from command import Command
    from csv_wrapper import CsvWrapper
    from process_pool_wrapper import ProcessPoolWrapper
    from svg_plotter import SvgPlotter

logger = logging.getLogger()


class CommandFactory:  # pylint: disable=too-few-public-methods
    '''
    Factory for creating command objects from parsed command lines.

    Command classes self-register by adding themselves to `commands` when
    their modules are imported, so new subcommands do not touch the factory.
    The factory injects the wrappers for files, figures and the worker pool.

    Attributes:
        commands: Dict mapping subcommand names to command classes.
        csv_wrapper: Wrapper for report tables.
        svg_plotter: Wrapper for figures.
        pool_wrapper: Wrapper for the worker pool.

    Example:
        factory = CommandFactory(csv_wrapper, svg_plotter, pool_wrapper)
        command = factory.create_command('run', args)
        exit_code = command.handle()
    '''

    class UndefinedCommand(Exception):
        '''
        Exception raised when a subcommand name is not registered.
        '''

    commands: Dict[str, Type[Command]] = {}

    def __init__(
        self,
        csv_wrapper: CsvWrapper,
        svg_plotter: SvgPlotter,
        pool_wrapper: ProcessPoolWrapper,
    ) -> None:
        self.csv_wrapper = csv_wrapper
        self.svg_plotter = svg_plotter
        self.pool_wrapper = pool_wrapper

    def create_command(self, name: str, args: argparse.Namespace) -> Command:
        '''
        Create the command registered under a name.

        Args:
            name: Subcommand name.
            args: Parsed command line of the subcommand.

        Returns:
            An instance of a concrete Command subclass.

        Raises:
            UndefinedCommand: If the name is not registered.
        '''
        if name not in self.commands:
            raise self.UndefinedCommand(f'Unknown command: {name}')
        logger.debug(f'Creating command {name} with {vars(args)}')
        return self.commands[name](
            args,
            csv_wrapper=self.csv_wrapper,
            svg_plotter=self.svg_plotter,
            pool_wrapper=self.pool_wrapper,
        )
