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
Command line entry point of the stochastic Allen-Cahn lab.

This module builds the argument parser, configures logging, constructs the
file, figure and pool wrappers, and hands the parsed subcommand to the
ExperimentProcessor.
'''

from __future__ import annotations

import argparse
import logging
from typing import Optional, Sequence

import command
from command.config import CONFIG

from csv_wrapper import CsvWrapper
from process_pool_wrapper import ProcessPoolWrapper
from sac.solver import Mutation
from sac.validation import CHECKS
from svg_plotter import SvgPlotter

from .experiment_processor import ExperimentProcessor

logger = logging.getLogger()

LOG_FORMAT = '%(asctime)s %(levelname)s %(message)s'


def _add_experiment_arguments(parser: argparse.ArgumentParser, workers: bool) -> None:
    parser.add_argument('config', help='experiment document (TOML)')
    parser.add_argument(
        '--set',
        action='append',
        default=[],
        metavar='SECTION.KEY=VALUE',
        help='override one document value; repeatable',
    )
    parser.add_argument(
        '--unsafe-debug',
        action='append',
        default=[],
        choices=[str(m) for m in Mutation],
        help='disable one correction term (debugging only); repeatable',
    )
    parser.add_argument('--output', help='output directory, overriding output.directory')
    if workers:
        parser.add_argument('--workers', type=int, help='worker processes')


def build_parser() -> argparse.ArgumentParser:
    '''
    Parser of the `sac` command line with its five subcommands.
    '''
    parser = argparse.ArgumentParser(
        prog='sac', description='Stochastic Allen-Cahn numerical lab'
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='debug logging')
    subparsers = parser.add_subparsers(dest='command', required=True)

    _add_experiment_arguments(subparsers.add_parser('run', help='one trajectory'), False)
    _add_experiment_arguments(
        subparsers.add_parser('ensemble', help='ensemble statistics and gates'), True
    )
    _add_experiment_arguments(subparsers.add_parser('sweep', help='sharp-interface sweep'), True)

    validate = subparsers.add_parser('validate', help='built-in numerical checks')
    validate.add_argument(
        '--check', action='append', choices=list(CHECKS), help='check to run; repeatable'
    )
    validate.add_argument('--noise-amplitude', type=float, default=1.0)
    validate.add_argument(
        '--unsafe-debug', action='append', default=[], choices=[str(m) for m in Mutation]
    )
    validate.add_argument('--output', help='directory for validation.csv')

    plot = subparsers.add_parser('plot', help='figures from an output directory')
    plot.add_argument('directory')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    '''
    Run the command line.

    Args:
        argv: Arguments without the program name; sys.argv when omitted.

    Returns:
        The exit code: 0 success, 2 configuration, 3 stability, 4 blow-up,
        5 failed gate.
    '''
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT, force=True
    )
    logger.debug(f'Settings: {CONFIG}')

    command_factory = command.CommandFactory(
        CsvWrapper(CONFIG['float_format']),
        SvgPlotter(),
        ProcessPoolWrapper(retries=CONFIG['pool_retries']),
    )
    processor = ExperimentProcessor(command_factory)
    return processor.process(args.command, args)
