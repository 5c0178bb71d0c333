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
Names of the files in an output directory, and figure rendering from them.

Figures are only ever drawn from the CSV tables on disk, never from results
in memory, so `plot` reproduces what `run`, `ensemble` and `sweep` drew.
'''

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, TYPE_CHECKING

import pandas as pd

if TYPE_CHECKING:
    from csv_wrapper import CsvWrapper
    from svg_plotter import SvgPlotter

logger = logging.getLogger()

TRAJECTORY_TABLE = 'trajectory.csv'
LEDGER_TABLE = 'ledger.csv'
SNAPSHOT_DIRECTORY = 'snapshots'

SUMMARY_TABLE = 'summary.csv'
MOMENTS_TABLE = 'moments.csv'
ENVELOPE_TABLE = 'envelope.csv'
TAILS_TABLE = 'tails.csv'
RESIDUALS_TABLE = 'residuals.csv'
RESIDUAL_SUMMARY_TABLE = 'residual_summary.csv'
INCREMENTS_TABLE = 'increments.csv'
INCREMENT_MOMENTS_TABLE = 'increment_moments.csv'
SEPARATION_TABLE = 'separation.csv'
ENSEMBLE_SUMMARY = 'ensemble.json'

SWEEP_TABLE = 'sweep.csv'
SWEEP_SEPARATION_TABLE = 'sweep_separation.csv'
SWEEP_SUMMARY = 'sweep.json'

VALIDATION_TABLE = 'validation.csv'

ENERGY_FIGURE = 'energy.svg'
RADIUS_FIGURE = 'radius.svg'
RESIDUAL_FIGURE = 'residuals.svg'
MOMENTS_FIGURE = 'moments.svg'
INCREMENTS_FIGURE = 'increments.svg'
SWEEP_FIGURE = 'sweep.svg'


def render_figures(
    directory: Path, csv_wrapper: CsvWrapper, svg_plotter: SvgPlotter
) -> list[Path]:
    '''
    Render every figure whose tables exist in a directory.

    Args:
        directory: Output directory of a run, ensemble or sweep.
        csv_wrapper: Reads the tables.
        svg_plotter: Draws the figures.

    Returns:
        Paths of the figures written.
    '''

    def table(name: str) -> Optional[pd.DataFrame]:
        path = directory / name
        return csv_wrapper.read_table(path) if path.exists() else None

    figures = []
    trajectory = table(TRAJECTORY_TABLE)
    if trajectory is not None and len(trajectory):
        figures.append(svg_plotter.energy_trace(trajectory, directory / ENERGY_FIGURE))
        if 'radius' in trajectory and trajectory['radius'].notna().all():
            figures.append(svg_plotter.radius_law(trajectory, directory / RADIUS_FIGURE))

    residuals, summary = table(RESIDUALS_TABLE), table(RESIDUAL_SUMMARY_TABLE)
    if residuals is not None and summary is not None and len(residuals):
        figures.append(
            svg_plotter.residual_histogram(residuals, summary, directory / RESIDUAL_FIGURE)
        )

    moments = table(MOMENTS_TABLE)
    if moments is not None and len(moments):
        figures.append(svg_plotter.moments_by_eps(moments, directory / MOMENTS_FIGURE))

    points, fits = table(INCREMENT_MOMENTS_TABLE), table(INCREMENTS_TABLE)
    if points is not None and fits is not None and len(points):
        figures.append(svg_plotter.increment_fit(points, fits, directory / INCREMENTS_FIGURE))

    sweep = table(SWEEP_TABLE)
    if sweep is not None and len(sweep):
        figures.append(svg_plotter.sweep_separation(sweep, directory / SWEEP_FIGURE))

    logger.info(f'Rendered {len(figures)} figures in {directory}')
    return figures
