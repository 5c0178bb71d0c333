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
SVG figures.

Every figure is drawn from report tables only. SVG output uses a fixed hash
salt and no date metadata, so identical tables give identical files.
'''

from __future__ import annotations

import logging
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure
import numpy as np
import pandas as pd

matplotlib.use('Agg')
matplotlib.rcParams['svg.hashsalt'] = 'sac'

logger = logging.getLogger()


class SvgPlotter:
    '''
    A wrapper class for SVG figure emission.

    Attributes:
        size: Figure size in inches.
    '''

    def __init__(self, size: tuple[float, float] = (6.0, 4.0)) -> None:
        self.size = size

    def _save(self, figure: Figure, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        figure.tight_layout()
        figure.savefig(path, format='svg', metadata={'Date': None})
        logger.debug(f'Wrote figure {path}')
        return path

    def energy_trace(self, table: pd.DataFrame, path: Path) -> Path:
        '''
        E_eps and int w^2/eps against t from a per-trajectory table.
        '''
        figure = Figure(figsize=self.size)
        axes = figure.add_subplot()
        axes.plot(table['t'], table['energy'], label='energy')
        axes.plot(table['t'], table['bv_g'], label='BV(G(u))', linestyle='--')
        axes.set_xlabel('t')
        axes.set_ylabel('energy')
        twin = axes.twinx()
        twin.plot(table['t'], table['willmore'], color='tab:red', linewidth=0.8)
        twin.set_ylabel('int w^2/eps', color='tab:red')
        axes.legend(loc='upper right')
        return self._save(figure, path)

    def radius_law(self, table: pd.DataFrame, path: Path) -> Path:
        '''
        Extracted radius squared against the mean curvature law r0^2 - 2t.
        '''
        figure = Figure(figsize=self.size)
        axes = figure.add_subplot()
        t = table['t'].to_numpy()
        radius = table['radius'].to_numpy()
        axes.plot(t, radius**2, marker='o', markersize=2, linestyle='', label='extracted')
        axes.plot(t, radius[0] ** 2 - 2.0 * t, label='r0^2 - 2t')
        axes.set_xlabel('t')
        axes.set_ylabel('r^2')
        axes.legend()
        return self._save(figure, path)

    def residual_histogram(
        self, residuals: pd.DataFrame, summary: pd.DataFrame, path: Path
    ) -> Path:
        '''
        Identity residuals per channel with the ensemble mean and its CLT band.
        '''
        figure = Figure(figsize=self.size)
        axes = figure.add_subplot()
        for (label, group), (_, row) in zip(
            residuals.groupby('label', sort=True), summary.groupby('label', sort=True)
        ):
            axes.hist(group['residual'], bins=30, alpha=0.5, label=str(label))
            mean = float(row['mean'].iloc[0])
            band = float(row['clt_band'].iloc[0])
            axes.axvline(mean, linewidth=1.0)
            axes.axvspan(-band, band, alpha=0.1)
        axes.set_xlabel('residual')
        axes.set_ylabel('samples')
        axes.legend()
        return self._save(figure, path)

    def moments_by_eps(self, moments: pd.DataFrame, path: Path) -> Path:
        '''
        E[sup E^p]^(1/p) bars grouped by eps.
        '''
        figure = Figure(figsize=self.size)
        axes = figure.add_subplot()
        orders = sorted(moments['p'].unique())
        eps_values = sorted(moments['eps'].unique(), reverse=True)
        width = 0.8 / max(1, len(orders))
        positions = np.arange(len(eps_values))
        for index, p in enumerate(orders):
            rows = moments[moments['p'] == p].set_index('eps').loc[eps_values]
            axes.bar(positions + index * width, rows['sup_energy_root'], width, label=f'p={p}')
        axes.set_xticks(positions + 0.4 - width / 2, [f'{e:g}' for e in eps_values])
        axes.set_xlabel('eps')
        axes.set_ylabel('E[sup E^p]^(1/p)')
        axes.legend()
        return self._save(figure, path)

    def increment_fit(self, points: pd.DataFrame, fits: pd.DataFrame, path: Path) -> Path:
        '''
        Increment moments against the lag on log-log axes, with the fitted lines.
        '''
        figure = Figure(figsize=self.size)
        axes = figure.add_subplot()
        for eps, group in points.groupby('eps', sort=True):
            lags = group['lag'].to_numpy()
            axes.loglog(lags, group['moment'], marker='o', linestyle='', label=f'eps={eps:g}')
            fit = fits[fits['eps'] == eps].iloc[0]
            if np.isfinite(fit['slope']):
                axes.loglog(lags, np.exp(fit['intercept']) * lags ** fit['slope'], linewidth=0.8)
        axes.set_xlabel('lag')
        axes.set_ylabel('increment moment')
        axes.legend()
        return self._save(figure, path)

    def sweep_separation(self, sweep: pd.DataFrame, path: Path) -> Path:
        '''
        Time-averaged separation fraction and BV(G)/c0 against eps.
        '''
        figure = Figure(figsize=self.size)
        axes = figure.add_subplot()
        axes.plot(sweep['eps'], sweep['separation'], marker='o', label='separation fraction')
        axes.plot(sweep['eps'], sweep['bv_g_final_c0'], marker='s', label='BV(G)/c0 at T')
        axes.set_xscale('log')
        axes.set_xlabel('eps')
        axes.legend()
        return self._save(figure, path)
