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
Command module for CLI subcommands with the template method pattern.

This module provides the base Command class, the metaclass enforcing its
construction contract, and the exit code contract of the CLI.
'''

from __future__ import annotations

from abc import ABC, ABCMeta, abstractmethod
import argparse
import logging
from typing import final, TYPE_CHECKING

from sac.exceptions import BlowupError, ConfigError, GateFailure, StabilityError

if TYPE_CHECKING:
    from csv_wrapper import CsvWrapper
    from process_pool_wrapper import ProcessPoolWrapper
    from svg_plotter import SvgPlotter

logger = logging.getLogger()

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STABILITY = 3
EXIT_BLOWUP = 4
EXIT_GATE = 5

# Checked in order; subclasses before their bases.
EXIT_CODES: tuple[tuple[type[Exception], int], ...] = (
    (ConfigError, EXIT_CONFIG),
    (StabilityError, EXIT_STABILITY),
    (BlowupError, EXIT_BLOWUP),
    (GateFailure, EXIT_GATE),
)


class NoInitOverride(ABCMeta):
    '''
    Metaclass that prevents subclasses from overriding __init__.

    Every Command is constructed the same way, by the factory, so that
    subcommands only differ in their hook methods.
    '''

    def __init__(cls, name: str, bases: tuple[type], namespace: dict):
        '''
        Raises:
            TypeError: If a subclass (non-ABC) defines __init__.
        '''
        if '__init__' in namespace and any(base is not ABC for base in bases):
            raise TypeError(f'{cls.__name__} must not define __init__')

        super().__init__(name, bases, namespace)


class Command(ABC, metaclass=NoInitOverride):
    '''
    Abstract base class of CLI subcommands using the template method pattern.

    Processing flow:
    1. Parse the subcommand arguments (_handle_arguments), at construction
    2. Execute the subcommand (_execute)
    3. Map the library's failure categories to exit codes

    Exceptions outside the contract propagate unchanged (exit code 1 at the
    process level).

    Attributes:
        name: Subcommand name, the factory key.
        csv_wrapper: Writes and reads report tables.
        svg_plotter: Renders figures.
        pool_wrapper: Maps ensemble tasks over worker processes.
    '''

    name: str
    # pylint: disable=undefined-variable
    csv_wrapper: CsvWrapper
    svg_plotter: SvgPlotter
    pool_wrapper: ProcessPoolWrapper

    @final
    def __init__(
        self,
        args: argparse.Namespace,
        csv_wrapper: CsvWrapper,
        svg_plotter: SvgPlotter,
        pool_wrapper: ProcessPoolWrapper,
    ) -> None:
        '''
        Store the wrappers and parse the arguments.

        Args:
            args: Parsed command line of the subcommand.
            csv_wrapper: Wrapper for report tables.
            svg_plotter: Wrapper for figures.
            pool_wrapper: Wrapper for the worker pool.

        Raises:
            ConfigError: If the arguments or the documents they name are invalid.
            StabilityError: If a loaded experiment violates the stability bound.
        '''
        self.csv_wrapper = csv_wrapper
        self.svg_plotter = svg_plotter
        self.pool_wrapper = pool_wrapper
        self._handle_arguments(args)

    @abstractmethod
    def _handle_arguments(self, args: argparse.Namespace) -> None:
        '''
        Parse and validate the subcommand arguments into instance attributes.
        '''

    @abstractmethod
    def _execute(self) -> None:
        '''
        Do the work of the subcommand.

        Raises:
            GateFailure: After writing every output, if a gate failed.
            BlowupError: If a trajectory blew up.
        '''

    @final
    def handle(self) -> int:
        '''
        Execute the command and map the outcome to an exit code.

        Returns:
            0 on success, otherwise the code of the failure category.
        '''
        try:
            self._execute()
        except Exception as e:
            code = exit_code(e)
            if code is None:
                raise
            logger.error(f'{self.name} failed: {e}')
            return code
        logger.info(f'{self.name} finished')
        return EXIT_OK


def exit_code(error: Exception) -> int | None:
    '''
    Exit code of a failure category, None for exceptions outside the contract.
    '''
    for category, code in EXIT_CODES:
        if isinstance(error, category):
            return code
    return None
