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
Monte Carlo ensembles over sample paths and interface widths.

Every (eps, sample) pair is one task. Sample k uses the Brownian path keyed by
(master_seed, k) for every eps, so trajectories of different widths are
coupled through shared increments. Tasks are mapped by an injected pool that
returns results in task order; reductions then run over that fixed order, so
statistics do not depend on the worker count.
'''

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import Callable, Optional, Protocol, Sequence, TypeVar

import numpy as np
import pandas as pd
from scipy import stats

from .diagnostics import increment_statistic
from .exceptions import BlowupError, ContractError, DomainError
from .experiment import Experiment
from .identity import GLOBAL
from .potential import growth_check, surface_tension

logger = logging.getLogger()

T = TypeVar('T')
R = TypeVar('R')

CONTAINMENT_SLACK = 20.0
UNIFORM_RATIO = 1.5
SLOPE_BAND = (0.7, 1.5)
DETERMINISTIC_TOLERANCE = 1e-3

GROWTH_SAMPLE = np.linspace(-3.0, 3.0, 1201)

GATES = ('identity', 'uniform_energy', 'compact_containment', 'increment_slope')


class TaskPool(Protocol):  # pylint: disable=too-few-public-methods
    '''
    Anything that maps a function over tasks and returns results in task order.
    '''

    def map(self, fn: Callable[[T], R], tasks: Sequence[T]) -> list[R]: ...


class InlinePool:  # pylint: disable=too-few-public-methods
    '''
    Runs tasks one after the other in the calling process.
    '''

    def map(self, fn: Callable[[T], R], tasks: Sequence[T]) -> list[R]:
        return [fn(task) for task in tasks]


@dataclass(frozen=True)
class EnsembleConfig:  # pylint: disable=too-many-instance-attributes
    '''
    Monte Carlo settings on top of an experiment template.

    Attributes:
        experiment: Trajectory template.
        samples: Number of sample paths M per eps.
        master_seed: Seed of the whole ensemble.
        eps_list: Interface widths, strictly decreasing; empty means the template's eps.
        workers: Worker processes.
        p_list: Moment orders.
        lambda_list: Tail thresholds.
        residual_windows: (t0, t1) windows of the identity residuals.
        increment_lags: Lags of the increment statistic, in snapshot intervals.
        increment_eta: Label of the tracked test function paired with G(u); empty to skip.
        increment_order: Moment order of the increment statistic.
        min_increment_samples: Smallest sample count accepted by the increment statistic.
        allow_failures: Exclude blown-up samples instead of failing the ensemble.
        gates: Acceptance gates to evaluate.
    '''

    experiment: Experiment
    samples: int = 1
    master_seed: int = 0
    eps_list: tuple[float, ...] = ()
    workers: int = 1
    p_list: tuple[int, ...] = (1, 2)
    lambda_list: tuple[float, ...] = ()
    residual_windows: tuple[tuple[float, float], ...] = ()
    increment_lags: tuple[int, ...] = (1, 2, 4, 8)
    increment_eta: str = ''
    increment_order: int = 1
    min_increment_samples: int = 100
    allow_failures: bool = False
    gates: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise DomainError(f'samples must be positive, got {self.samples}')
        if any(b >= a for a, b in zip(self.eps_list, self.eps_list[1:])):
            raise DomainError(f'eps_list must be strictly decreasing, got {self.eps_list}')
        unknown = set(self.gates) - set(GATES)
        if unknown:
            raise DomainError(f'Unknown gates: {sorted(unknown)}')
        if any(p < 1 for p in self.p_list):
            raise DomainError(f'moment orders must be positive integers, got {self.p_list}')

    @property
    def eps_values(self) -> tuple[float, ...]:
        return self.eps_list or (self.experiment.solver.eps,)


@dataclass(frozen=True)
class SampleTask:
    '''
    One (eps, sample) pair with what the worker needs to summarize it.
    '''

    experiment: Experiment
    eps: float
    eps_index: int
    sample_index: int
    master_seed: int
    residual_windows: tuple[tuple[float, float], ...] = ()
    pairing_label: str = ''
    p_list: tuple[int, ...] = (1,)
    keep_final: bool = False


@dataclass
class SampleSummary:  # pylint: disable=too-many-instance-attributes
    '''
    Reduced outcome of one trajectory.

    Attributes:
        eps: Interface width.
        eps_index: Position of eps in the eps list.
        sample_index: Sample path index.
        failed: Whether the trajectory blew up.
        failure: Failure message.
        times: Snapshot times.
        energy: E_eps at the snapshots.
        willmore: int w^2/eps at the snapshots.
        bv_g: int |grad G(u)| at the snapshots.
        w11: ||G(u)||_W11 at the snapshots.
        separation: Volume fraction of {|u| < 0.9} at the snapshots.
        pairings: <G(u), eta> at the snapshots for the increment statistic.
        initial_energy: Lambda = E_eps(u0).
        dissipation: int_0^T int w^2/eps.
        weighted_curvature: int_0^T E^(p-1) int w^2/eps per moment order p.
        residuals: Rows (label, t0, t1, residual, martingale, qv).
        contained: Whether bv_g <= E + 20h held on every snapshot.
        final: Final field, kept for sweeps.
    '''

    eps: float
    eps_index: int
    sample_index: int
    failed: bool = False
    failure: str = ''
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    energy: np.ndarray = field(default_factory=lambda: np.zeros(0))
    willmore: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bv_g: np.ndarray = field(default_factory=lambda: np.zeros(0))
    w11: np.ndarray = field(default_factory=lambda: np.zeros(0))
    separation: np.ndarray = field(default_factory=lambda: np.zeros(0))
    pairings: Optional[np.ndarray] = None
    initial_energy: float = math.nan
    dissipation: float = math.nan
    weighted_curvature: dict[int, float] = field(default_factory=dict)
    residuals: list[tuple[str, float, float, float, float, float]] = field(default_factory=list)
    contained: bool = True
    final: Optional[np.ndarray] = None

    @property
    def sup_energy(self) -> float:
        return float(np.max(self.energy))


def run_sample(task: SampleTask) -> SampleSummary:
    '''
    Run one trajectory and reduce it to a SampleSummary.

    Blowups are caught and reported in the summary; every other error propagates.
    '''
    experiment = task.experiment
    stream = experiment.stream(task.master_seed, task.sample_index)
    try:
        result = experiment.solve(
            stream, task.eps, sample_index=task.sample_index, keep_snapshots=False
        )
    except BlowupError as e:
        return SampleSummary(
            task.eps,
            task.eps_index,
            task.sample_index,
            failed=True,
            failure=f'{e} (master_seed={task.master_seed}, sample={task.sample_index})',
        )

    times = np.array(result.times)
    energy = result.series('energy')
    willmore = result.series('willmore')
    bv_g = result.series('bv_g')
    summary = SampleSummary(
        task.eps,
        task.eps_index,
        task.sample_index,
        times=times,
        energy=energy,
        willmore=willmore,
        bv_g=bv_g,
        w11=bv_g + result.series('l1_g'),
        separation=result.series('separation'),
        initial_energy=result.initial_energy,
        contained=bool(np.all(bv_g <= energy + CONTAINMENT_SLACK * experiment.grid.h)),
        final=result.final if task.keep_final else None,
    )
    if result.ledger is not None:
        summary.dissipation = result.ledger.dissipation[GLOBAL][-1]
        for t0, t1 in task.residual_windows:
            for label in result.ledger.labels:
                residual, martingale, qv = result.ledger.window(label, t0, t1)
                summary.residuals.append((label, t0, t1, residual, martingale, qv))
    else:
        summary.dissipation = float(np.trapezoid(willmore, times)) if len(times) > 1 else 0.0
    for p in task.p_list:
        weighted = energy ** (p - 1) * willmore
        summary.weighted_curvature[p] = (
            float(np.trapezoid(weighted, times)) if len(times) > 1 else 0.0
        )
    if task.pairing_label:
        summary.pairings = np.array([r.g_pairings[task.pairing_label] for r in result.reports])
    logger.debug(f'Sample {task.sample_index} eps={task.eps} done, sup E={summary.sup_energy:.6g}')
    return summary


@dataclass
class EnsembleStats:  # pylint: disable=too-many-instance-attributes
    '''
    Statistics of an ensemble.

    All tables are pandas DataFrames with one row per (eps, ...) combination.

    Attributes:
        config: The ensemble configuration.
        samples: Accepted sample summaries in task order.
        failures: Failure messages of excluded samples.
        summary: Per eps: accepted and failed counts, E[sup E], E[int int w^2/eps], mean Lambda.
        moments: Per eps and p: E[sup E^p], E[(int int w^2/eps)^p], the weighted curvature
            moment and E[sup E^p]^(1/p).
        envelope: Per eps and p: fitted C_est, Lambda^p, K and the tail envelope check.
        residuals: Per sample identity residual rows.
        residual_summary: Per eps, channel and window: mean, standard error and CLT band.
        increments: Per eps: fitted increment slope.
        increment_moments: Per eps and lag: the empirical increment moment.
        separation: Mean separation fraction per eps and snapshot time.
        gates: Outcome of each requested gate.
    '''

    config: EnsembleConfig
    samples: list[SampleSummary]
    failures: list[str]
    summary: pd.DataFrame
    moments: pd.DataFrame
    envelope: pd.DataFrame
    residuals: pd.DataFrame
    residual_summary: pd.DataFrame
    increments: pd.DataFrame
    increment_moments: pd.DataFrame
    separation: pd.DataFrame
    gates: dict[str, bool] = field(default_factory=dict)

    def by_eps(self, eps: float) -> list[SampleSummary]:
        return [s for s in self.samples if s.eps == eps]

    def failed_gates(self) -> list[str]:
        return [name for name, passed in self.gates.items() if not passed]


def sample_tasks(config: EnsembleConfig, keep_final: bool = False) -> list[SampleTask]:
    '''
    Tasks ordered by eps index, then sample index.
    '''
    return [
        SampleTask(
            config.experiment,
            eps,
            eps_index,
            sample_index,
            config.master_seed,
            config.residual_windows,
            config.increment_eta,
            config.p_list,
            keep_final,
        )
        for eps_index, eps in enumerate(config.eps_values)
        for sample_index in range(config.samples)
    ]


def execute(
    config: EnsembleConfig, pool: Optional[TaskPool] = None, keep_final: bool = False
) -> tuple[list[SampleSummary], list[str]]:
    '''
    Run every task and apply the failure policy.

    Returns:
        (accepted summaries in task order, failure messages).

    Raises:
        BlowupError: If a sample failed and failures are not allowed.
    '''
    tracked = {eta.label for eta in config.experiment.diagnostics.test_functions}
    if config.increment_eta and config.increment_eta not in tracked:
        raise ContractError(f'Test function {config.increment_eta} is not tracked')
    for eps in config.eps_values:
        config.experiment.check_stability(eps)

    tasks = sample_tasks(config, keep_final)
    logger.info(
        f'Ensemble: {config.samples} samples x {len(config.eps_values)} eps, '
        f'master_seed={config.master_seed}'
    )
    results = (pool or InlinePool()).map(run_sample, tasks)
    failed = [r for r in results if r.failed]
    failures = [r.failure for r in failed]
    for message in failures:
        logger.error(f'Failed sample: {message}')
    if failed and not config.allow_failures:
        raise BlowupError(f'{len(failed)} samples failed: {failures[0]}', -1, math.nan)
    for eps in config.eps_values:
        if all(r.failed for r in results if r.eps == eps):
            raise BlowupError(f'Every sample failed for eps={eps}', -1, math.nan)
    return [r for r in results if not r.failed], failures


def fit_envelope(times: np.ndarray, mean_energy_power: np.ndarray) -> float:
    '''
    C_est: least squares slope of log E[E(t)^p] against t.
    '''
    if len(times) < 2 or np.any(mean_energy_power <= 0.0):
        return 0.0
    return float(stats.linregress(times, np.log(mean_energy_power)).slope)


def _stderr(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def _summary_table(config: EnsembleConfig, samples: list[SampleSummary]) -> pd.DataFrame:
    rows = []
    for eps in config.eps_values:
        group = [s for s in samples if s.eps == eps]
        rows.append(
            {
                'eps': eps,
                'accepted': len(group),
                'failed': config.samples - len(group),
                'mean_sup_energy': float(np.mean([s.sup_energy for s in group])),
                'mean_dissipation': float(np.mean([s.dissipation for s in group])),
                'mean_initial_energy': float(np.mean([s.initial_energy for s in group])),
            }
        )
    return pd.DataFrame(rows)


def _moment_tables(
    config: EnsembleConfig, samples: list[SampleSummary]
) -> tuple[pd.DataFrame, pd.DataFrame]:
    moment_rows, envelope_rows = [], []
    t_end = config.experiment.solver.t_end
    for eps in config.eps_values:
        group = [s for s in samples if s.eps == eps]
        sup_energy = np.array([s.sup_energy for s in group])
        dissipation = np.array([s.dissipation for s in group])
        initial = float(np.mean([s.initial_energy for s in group]))
        times = group[0].times
        energies = np.stack([s.energy for s in group])
        for p in config.p_list:
            sup_moment = float(np.mean(sup_energy**p))
            moment_rows.append(
                {
                    'eps': eps,
                    'p': p,
                    'sup_energy_moment': sup_moment,
                    'dissipation_moment': float(np.mean(dissipation**p)),
                    'weighted_curvature': float(
                        np.mean([s.weighted_curvature[p] for s in group])
                    ),
                    'sup_energy_root': sup_moment ** (1.0 / p),
                }
            )
            c_est = fit_envelope(times, np.mean(energies**p, axis=0))
            scale = initial**p * math.exp(c_est * t_end)
            threshold = 2.0 * initial * math.exp(c_est * t_end)
            bound_ratio = sup_moment / scale if scale > 0.0 else math.inf
            tail = float(np.mean(sup_energy > threshold))
            envelope_rows.append(
                {
                    'eps': eps,
                    'p': p,
                    'c_est': c_est,
                    'lambda_power': initial**p,
                    'bound_ratio': bound_ratio,
                    'threshold': threshold,
                    'tail_at_threshold': tail,
                    'envelope': max(bound_ratio, 1.0) * scale / threshold**p,
                }
            )
    return pd.DataFrame(moment_rows), pd.DataFrame(envelope_rows)


def _residual_tables(
    config: EnsembleConfig, samples: list[SampleSummary]
) -> tuple[pd.DataFrame, pd.DataFrame]:
    columns = ['label', 't0', 't1', 'residual', 'martingale_term', 'qv_estimate']
    rows = [
        {'sample': s.sample_index, 'eps': s.eps, **dict(zip(columns, row))}
        for s in samples
        for row in s.residuals
    ]
    table = pd.DataFrame(rows, columns=['sample', 'eps'] + columns)
    summary_rows = []
    for (eps, label, t0, t1), group in table.groupby(['eps', 'label', 't0', 't1'], sort=False):
        residual = group['residual'].to_numpy()
        count = len(residual)
        band = 2.0 * math.sqrt(float(np.mean(group['qv_estimate'])) / count)
        energy_t0 = float(
            np.mean([np.interp(t0, s.times, s.energy) for s in samples if s.eps == eps])
        )
        band = band + DETERMINISTIC_TOLERANCE * (1.0 + energy_t0) * (t1 - t0)
        mean = float(np.mean(residual))
        summary_rows.append(
            {
                'eps': eps,
                'label': label,
                't0': t0,
                't1': t1,
                'samples': count,
                'mean': mean,
                'stderr': _stderr(residual),
                'clt_band': band,
                'within': abs(mean) <= band,
            }
        )
    summary_columns = [
        'eps', 'label', 't0', 't1', 'samples', 'mean', 'stderr', 'clt_band', 'within'
    ]
    return table, pd.DataFrame(summary_rows, columns=summary_columns)


def _increment_tables(
    config: EnsembleConfig, samples: list[SampleSummary]
) -> tuple[pd.DataFrame, pd.DataFrame]:
    rows: list[dict] = []
    points: list[dict] = []
    fit_columns = ['eps', 'label', 'order', 'slope', 'intercept']
    if not config.increment_eta:
        return pd.DataFrame(rows, columns=fit_columns), pd.DataFrame(
            points, columns=['eps', 'lag', 'moment']
        )
    for eps in config.eps_values:
        group = [s for s in samples if s.eps == eps]
        pairings = np.stack([s.pairings for s in group if s.pairings is not None])
        fit = increment_statistic(
            pairings,
            group[0].times,
            config.increment_lags,
            config.increment_order,
            config.min_increment_samples,
        )
        rows.append(
            {
                'eps': eps,
                'label': config.increment_eta,
                'order': fit.order,
                'slope': fit.slope,
                'intercept': fit.intercept,
            }
        )
        points.extend(
            {'eps': eps, 'lag': float(lag), 'moment': float(moment)}
            for lag, moment in zip(fit.lags, fit.moments)
        )
    return pd.DataFrame(rows, columns=fit_columns), pd.DataFrame(points)


def _separation_table(config: EnsembleConfig, samples: list[SampleSummary]) -> pd.DataFrame:
    frames = []
    for eps in config.eps_values:
        group = [s for s in samples if s.eps == eps]
        frames.append(
            pd.DataFrame(
                {
                    'eps': eps,
                    't': group[0].times,
                    'separation': np.mean(np.stack([s.separation for s in group]), axis=0),
                }
            )
        )
    return pd.concat(frames, ignore_index=True)


def evaluate_gates(stats_: EnsembleStats) -> dict[str, bool]:
    '''
    Evaluate the requested gates.

    identity: every ensemble-mean residual lies in its CLT band.
    uniform_energy: E[sup E] and E[int int w^2/eps] vary by at most 1.5 across eps.
    compact_containment: bv_g <= E + 20h on every snapshot of every accepted sample.
    increment_slope: every fitted slope lies in [0.7 p, 1.5 p].
    '''
    config = stats_.config
    gates: dict[str, bool] = {}
    for name in config.gates:
        if name == 'identity':
            gates[name] = bool(stats_.residual_summary['within'].all())
        elif name == 'uniform_energy':
            ratios = [
                stats_.summary[column].max() / stats_.summary[column].min()
                for column in ('mean_sup_energy', 'mean_dissipation')
            ]
            gates[name] = all(ratio <= UNIFORM_RATIO for ratio in ratios)
        elif name == 'compact_containment':
            gates[name] = all(s.contained for s in stats_.samples)
        elif name == 'increment_slope':
            low, high = SLOPE_BAND
            order = config.increment_order
            slopes = stats_.increments['slope'].to_numpy()
            gates[name] = bool(
                len(slopes) > 0 and np.all((slopes >= low * order) & (slopes <= high * order))
            )
    for name, passed in gates.items():
        logger.info(f'Gate {name}: {"pass" if passed else "FAIL"}')
    return gates


def run_ensemble(config: EnsembleConfig, pool: Optional[TaskPool] = None) -> EnsembleStats:
    '''
    Run M trajectories per eps and compute every requested statistic.

    Args:
        config: Ensemble configuration.
        pool: Task pool; runs inline when omitted.

    Returns:
        The statistics, with gate outcomes.

    Raises:
        BlowupError: If a sample failed and failures are not allowed.
        ContractError: If the increment statistic cannot be computed.
    '''
    samples, failures = execute(config, pool)
    moments, envelope = _moment_tables(config, samples)
    residuals, residual_summary = _residual_tables(config, samples)
    increments, increment_moments = _increment_tables(config, samples)
    ensemble_stats = EnsembleStats(
        config=config,
        samples=samples,
        failures=failures,
        summary=_summary_table(config, samples),
        moments=moments,
        envelope=envelope,
        residuals=residuals,
        residual_summary=residual_summary,
        increments=increments,
        increment_moments=increment_moments,
        separation=_separation_table(config, samples),
    )
    ensemble_stats.gates = evaluate_gates(ensemble_stats)
    return ensemble_stats


def tail_table(ensemble_stats: EnsembleStats, lambda_list: Sequence[float]) -> pd.DataFrame:
    '''
    Tail probabilities per eps and threshold.

    Columns: P[sup_t E > lambda], P[sup_t ||G(u)||_W11 >= lambda] and its Markov
    envelope (C_G + E[sup E]) / lambda.
    '''
    potential = ensemble_stats.config.experiment.potential
    c_g = growth_check(potential, GROWTH_SAMPLE)
    rows = []
    for eps in ensemble_stats.config.eps_values:
        group = ensemble_stats.by_eps(eps)
        sup_energy = np.array([s.sup_energy for s in group])
        sup_w11 = np.array([float(np.max(s.w11)) for s in group])
        for lam in sorted(lambda_list):
            rows.append(
                {
                    'eps': eps,
                    'lambda': lam,
                    'energy_tail': float(np.mean(sup_energy > lam)),
                    'w11_tail': float(np.mean(sup_w11 >= lam)),
                    'w11_envelope': (
                        (c_g + float(np.mean(sup_energy))) / lam if lam > 0.0 else math.inf
                    ),
                }
            )
    return pd.DataFrame(rows, columns=['eps', 'lambda', 'energy_tail', 'w11_tail', 'w11_envelope'])


@dataclass
class SweepReport:
    '''
    Sharp-interface sweep outcome.

    Attributes:
        table: Per eps: time-averaged separation fraction, bv_g in units of c0
            (final mean and maximum over time) and the coupling distance to the next eps.
        finest_distance: Mean L1 distance between the solutions of the two finest eps.
        monotone: Whether the separation fraction decreases with eps.
        separation: Mean separation fraction time series per eps.
    '''

    table: pd.DataFrame
    finest_distance: float
    monotone: bool
    separation: pd.DataFrame


def sharp_interface_sweep(config: EnsembleConfig, pool: Optional[TaskPool] = None) -> SweepReport:
    '''
    Compare solutions across decreasing eps on shared Brownian paths.

    Raises:
        ContractError: With fewer than three eps values.
    '''
    if len(config.eps_list) < 3:
        raise ContractError(f'A sweep needs at least 3 eps values, got {len(config.eps_list)}')
    samples, _ = execute(config, pool, keep_final=True)
    grid = config.experiment.grid
    c0 = surface_tension(config.experiment.potential)
    t_end = config.experiment.solver.t_end

    def final_fields(eps: float) -> dict[int, np.ndarray]:
        return {s.sample_index: s.final for s in samples if s.eps == eps and s.final is not None}

    rows = []
    for index, eps in enumerate(config.eps_list):
        group = [s for s in samples if s.eps == eps]
        averaged = [
            float(np.trapezoid(s.separation, s.times) / t_end) if t_end > 0.0 else s.separation[0]
            for s in group
        ]
        distance = math.nan
        if index + 1 < len(config.eps_list):
            coarse, fine = final_fields(eps), final_fields(config.eps_list[index + 1])
            shared = sorted(set(coarse) & set(fine))
            if shared:
                distance = float(
                    np.mean([grid.integrate(np.abs(coarse[k] - fine[k])) for k in shared])
                )
        rows.append(
            {
                'eps': eps,
                'separation': float(np.mean(averaged)),
                'bv_g_final_c0': float(np.mean([s.bv_g[-1] for s in group])) / c0,
                'bv_g_max_c0': float(np.mean([np.max(s.bv_g) for s in group])) / c0,
                'coupling_distance': distance,
            }
        )
    table = pd.DataFrame(rows)
    separation = table['separation'].to_numpy()
    report = SweepReport(
        table=table,
        finest_distance=float(table['coupling_distance'].iloc[-2]),
        monotone=bool(np.all(np.diff(separation) < 0.0)),
        separation=_separation_table(config, samples),
    )
    logger.info(
        f'Sweep: separation monotone={report.monotone}, '
        f'finest distance={report.finest_distance:.4g}'
    )
    return report
