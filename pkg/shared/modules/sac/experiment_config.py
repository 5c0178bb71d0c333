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
Experiment documents.

An experiment is a TOML document with the sections [grid], [potential], [noise],
[solver], [initial], [diagnostics], [ensemble] and [output]. Every key has a
default; unknown sections and keys are rejected with their dotted path. All
cross-field constraints are checked here, so a document that loads can run.
'''

from __future__ import annotations

from dataclasses import dataclass, field
import logging
from pathlib import Path
import tomllib
from typing import Any, Iterable, Optional, Sequence

from .ensemble import GATES, EnsembleConfig
from .exceptions import ConfigError, DomainError
from .experiment import Backend, DiagnosticsSettings, Experiment
from .grid import Grid
from .initial import InitialData, InitialDataFactory
from .localization import TestFunctionFactory
from .noise import NoiseModel
from .potential import DoubleWell
from .solver import Mutation, SolverConfig

logger = logging.getLogger()

# key: (accepted types, default)
SCHEMA: dict[str, dict[str, tuple[tuple[type, ...], Any]]] = {
    'grid': {
        'dim': ((int,), 1),
        'm': ((int,), 128),
        'closure': ((str,), 'neumann'),
    },
    'potential': {
        'kind': ((str,), 'standard_quartic'),
        'coefficients': ((list,), []),
        'growth_exponent': ((float, int), 2.0),
        'growth_constant': ((float, int), 0.1),
        'growth_threshold': ((float, int), 2.0),
    },
    'noise': {
        'modes': ((list,), []),
        'drift': ((dict,), {'kind': 'zero'}),
        'support_margin': ((float, int), 0.05),
        'master_seed': ((int,), 0),
        'sample_index': ((int,), 0),
    },
    'solver': {
        'eps': ((float, int), 0.05),
        'dt': ((float, int), 1e-5),
        't_end': ((float, int), 0.01),
        'scheme': ((str,), 'ito_euler'),
        'diffusion_treatment': ((str,), 'explicit'),
        'blowup_threshold': ((float, int), 10.0),
        'snapshot_stride': ((int,), 1),
        'reaction': ((bool,), True),
        'diffusion': ((bool,), True),
        'backend': ((str,), 'direct'),
    },
    'initial': {},
    'diagnostics': {
        'test_functions': ((list,), []),
        'track_identity': ((bool,), True),
        'circle_center': ((list,), []),
    },
    'ensemble': {
        'samples': ((int,), 1),
        'eps_list': ((list,), []),
        'workers': ((int,), 1),
        'p_list': ((list,), [1, 2]),
        'lambda_list': ((list,), []),
        'residual_windows': ((list,), []),
        'increment_lags': ((list,), [1, 2, 4, 8]),
        'increment_eta': ((str,), ''),
        'increment_order': ((int,), 1),
        'min_increment_samples': ((int,), 100),
        'allow_failures': ((bool,), False),
        'gates': ((list,), []),
    },
    'output': {
        'directory': ((str,), 'out'),
        'snapshots': ((bool,), True),
        'plots': ((bool,), True),
    },
}


@dataclass(frozen=True)
class OutputSettings:
    '''
    Attributes:
        directory: Directory receiving CSV tables, snapshots and figures.
        snapshots: Whether binary snapshots are written.
        plots: Whether SVG figures are rendered.
    '''

    directory: Path = Path('out')
    snapshots: bool = True
    plots: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    '''
    A loaded and validated experiment document.

    Attributes:
        experiment: Trajectory template.
        master_seed: Seed of the Brownian paths.
        sample_index: Sample path used by single runs.
        ensemble: Ensemble settings, None without an [ensemble] section.
        output: Output settings.
        source: Path of the document, if loaded from a file.
    '''

    experiment: Experiment
    master_seed: int = 0
    sample_index: int = 0
    ensemble: Optional[EnsembleConfig] = None
    output: OutputSettings = field(default_factory=OutputSettings)
    source: Optional[Path] = None


def _check_type(key: str, value: Any, types: tuple[type, ...]) -> Any:
    if isinstance(value, bool) and bool not in types:
        raise ConfigError(f'expected {"/".join(t.__name__ for t in types)}, got bool', key)
    if not isinstance(value, types):
        raise ConfigError(
            f'expected {"/".join(t.__name__ for t in types)}, got {type(value).__name__}', key
        )
    return float(value) if float in types and not isinstance(value, bool) else value


def resolve_sections(document: dict[str, Any]) -> dict[str, dict[str, Any]]:
    '''
    Merge a parsed document with the defaults.

    Returns:
        Section name -> key -> value, with every key present. [initial] is passed
        through untouched since its keys depend on the kind.

    Raises:
        ConfigError: On unknown sections or keys and on type mismatches.
    '''
    unknown = sorted(set(document) - set(SCHEMA))
    if unknown:
        raise ConfigError('unknown section', unknown[0])
    sections: dict[str, dict[str, Any]] = {}
    for name, schema in SCHEMA.items():
        given = document.get(name, {})
        if not isinstance(given, dict):
            raise ConfigError('expected a table', name)
        if name == 'initial':
            sections[name] = dict(given)
            continue
        extra = sorted(set(given) - set(schema))
        if extra:
            raise ConfigError('unknown key', f'{name}.{extra[0]}')
        sections[name] = {
            key: (
                _check_type(f'{name}.{key}', given[key], types) if key in given else default
            )
            for key, (types, default) in schema.items()
        }
    return sections


def parse_override(raw: str) -> tuple[list[str], Any]:
    '''
    Parse a dotted 'section.key=value' override. Values are TOML literals;
    anything that does not parse as one is taken as a string.
    '''
    path, sep, text = raw.partition('=')
    keys = [k.strip() for k in path.split('.')]
    if not sep or len(keys) < 2 or not all(keys):
        raise ConfigError(f'invalid override {raw!r}, expected section.key=value', path)
    try:
        value = tomllib.loads(f'value = {text.strip()}')['value']
    except tomllib.TOMLDecodeError:
        value = text.strip()
    return keys, value


def apply_overrides(document: dict[str, Any], overrides: Iterable[str]) -> dict[str, Any]:
    for raw in overrides:
        keys, value = parse_override(raw)
        target = document
        for key in keys[:-1]:
            target = target.setdefault(key, {})
            if not isinstance(target, dict):
                raise ConfigError('cannot override inside a non-table value', '.'.join(keys))
        target[keys[-1]] = value
        logger.info(f'Override {".".join(keys)} = {value!r}')
    return document


def _built(key: str, factory: Any, *args: Any) -> Any:
    try:
        return factory(*args)
    except (DomainError, ValueError) as e:
        raise ConfigError(str(e), key) from e


def _float_tuple(key: str, values: Sequence[Any]) -> tuple[float, ...]:
    return tuple(_check_type(key, v, (float, int)) for v in values)


def _int_tuple(key: str, values: Sequence[Any]) -> tuple[int, ...]:
    return tuple(_check_type(key, v, (int,)) for v in values)


def _initial(sections: dict[str, dict[str, Any]], dim: int) -> InitialData:
    data = sections['initial'] or {'kind': 'kink' if dim == 1 else 'circle'}
    initial = _built('initial', InitialDataFactory.create, data)
    _built('initial', initial.check_dimension, dim)
    return initial


def _diagnostics(
    sections: dict[str, dict[str, Any]], dim: int, initial: InitialData
) -> DiagnosticsSettings:
    section = sections['diagnostics']
    test_functions = []
    for index, data in enumerate(section['test_functions']):
        key = f'diagnostics.test_functions[{index}]'
        if not isinstance(data, dict):
            raise ConfigError('expected a table', key)
        test_functions.append(_built(key, TestFunctionFactory.create, data, dim))
    labels = [eta.label for eta in test_functions]
    if len(set(labels)) != len(labels):
        raise ConfigError(f'duplicate test function labels {labels}', 'diagnostics.test_functions')
    center = (
        _float_tuple('diagnostics.circle_center', section['circle_center'])
        or initial.radial_center()
    )
    if center is not None and len(center) != dim:
        raise ConfigError(f'needs {dim} coordinates', 'diagnostics.circle_center')
    return DiagnosticsSettings(tuple(test_functions), section['track_identity'], center)


def _solver(section: dict[str, Any], mutations: Iterable[str]) -> SolverConfig:
    try:
        mutation_set = frozenset(Mutation(m) for m in mutations)
    except ValueError as e:
        raise ConfigError(str(e), 'unsafe_debug') from e
    return _built(
        'solver',
        lambda: SolverConfig(
            eps=section['eps'],
            dt=section['dt'],
            t_end=section['t_end'],
            scheme=section['scheme'],
            diffusion_treatment=section['diffusion_treatment'],
            blowup_threshold=section['blowup_threshold'],
            snapshot_stride=section['snapshot_stride'],
            reaction=section['reaction'],
            diffusion=section['diffusion'],
            mutations=mutation_set,
        ),
    )


def _check_step_times(key: str, times: Iterable[float], config: SolverConfig) -> None:
    for t in times:
        steps = t / config.dt
        if t < 0.0 or t > config.t_end or abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ConfigError(f'{t} is not a step time in [0, {config.t_end}]', key)


def _ensemble(
    section: dict[str, Any], experiment: Experiment, master_seed: int
) -> EnsembleConfig:
    solver = experiment.solver
    windows = []
    for index, window in enumerate(section['residual_windows']):
        key = f'ensemble.residual_windows[{index}]'
        if not isinstance(window, list) or len(window) != 2:
            raise ConfigError('expected [t0, t1]', key)
        t0, t1 = _float_tuple(key, window)
        if t0 >= t1:
            raise ConfigError(f'needs t0 < t1, got [{t0}, {t1}]', key)
        _check_step_times(key, (t0, t1), solver)
        windows.append((t0, t1))

    gates = tuple(section['gates'])
    unknown = sorted(set(gates) - set(GATES))
    if unknown:
        raise ConfigError(f'unknown gates {unknown}, expected {list(GATES)}', 'ensemble.gates')

    labels = {eta.label for eta in experiment.diagnostics.test_functions}
    if section['increment_eta'] and section['increment_eta'] not in labels:
        raise ConfigError(
            f'{section["increment_eta"]} is not a tracked test function', 'ensemble.increment_eta'
        )
    lags = _int_tuple('ensemble.increment_lags', section['increment_lags'])
    if len(set(lags)) < 2:
        raise ConfigError(
            f'the increment fit needs two distinct lags, got {list(lags)}',
            'ensemble.increment_lags',
        )
    snapshots = solver.steps // solver.snapshot_stride + 1
    if section['increment_eta'] and any(lag < 1 or lag >= snapshots for lag in lags):
        raise ConfigError(f'lags must lie in [1, {snapshots - 1}]', 'ensemble.increment_lags')
    if 'identity' in gates and (not windows or not experiment.diagnostics.track_identity):
        raise ConfigError('the identity gate needs residual windows and a ledger', 'ensemble.gates')
    if 'increment_slope' in gates and not section['increment_eta']:
        raise ConfigError('the increment gate needs increment_eta', 'ensemble.gates')

    return _built(
        'ensemble',
        lambda: EnsembleConfig(
            experiment=experiment,
            samples=section['samples'],
            master_seed=master_seed,
            eps_list=_float_tuple('ensemble.eps_list', section['eps_list']),
            workers=max(1, section['workers']),
            p_list=_int_tuple('ensemble.p_list', section['p_list']),
            lambda_list=_float_tuple('ensemble.lambda_list', section['lambda_list']),
            residual_windows=tuple(windows),
            increment_lags=lags,
            increment_eta=section['increment_eta'],
            increment_order=section['increment_order'],
            min_increment_samples=section['min_increment_samples'],
            allow_failures=section['allow_failures'],
            gates=gates,
        ),
    )


def build_experiment_config(
    document: dict[str, Any],
    mutations: Iterable[str] = (),
    source: Optional[Path] = None,
) -> ExperimentConfig:
    '''
    Validate a parsed document and build the experiment it describes.

    Args:
        document: Parsed TOML document.
        mutations: Debug mutations to apply to the solver.
        source: Path the document came from.

    Returns:
        The validated configuration.

    Raises:
        ConfigError: On any schema or cross-field violation.
        StabilityError: If dt exceeds the stability bound for some eps.
    '''
    sections = resolve_sections(document)
    grid_section = sections['grid']
    grid = _built(
        'grid', Grid, grid_section['dim'], grid_section['m'], grid_section['closure']
    )
    potential = _built('potential', DoubleWell.from_dict, sections['potential'])
    model = _built('noise', NoiseModel.from_dict, sections['noise'], grid.dim)
    _built('noise', model.validate, grid)
    solver = _solver(sections['solver'], mutations)
    if solver.steps % solver.snapshot_stride != 0:
        raise ConfigError(
            f'must divide the step count {solver.steps}', 'solver.snapshot_stride'
        )
    initial = _initial(sections, grid.dim)
    backend = _built('solver.backend', Backend, sections['solver']['backend'])
    if backend == Backend.FLOW and model.time_dependent:
        raise ConfigError('the flow backend needs time-independent noise', 'solver.backend')
    experiment = Experiment(
        grid,
        potential,
        model,
        solver,
        initial,
        _diagnostics(sections, grid.dim, initial),
        backend,
    )

    noise = sections['noise']
    ensemble = None
    if 'ensemble' in document:
        ensemble = _ensemble(sections['ensemble'], experiment, noise['master_seed'])
        for eps in ensemble.eps_values:
            experiment.check_stability(eps)
    else:
        experiment.check_stability()

    output = sections['output']
    return ExperimentConfig(
        experiment=experiment,
        master_seed=noise['master_seed'],
        sample_index=noise['sample_index'],
        ensemble=ensemble,
        output=OutputSettings(Path(output['directory']), output['snapshots'], output['plots']),
        source=source,
    )


def load_experiment_config(
    path: Path, mutations: Iterable[str] = (), overrides: Iterable[str] = ()
) -> ExperimentConfig:
    '''
    Read, override and validate an experiment document.

    Raises:
        ConfigError: If the file is missing or unreadable, or fails validation.
        StabilityError: If dt exceeds the stability bound for some eps.
    '''
    try:
        with open(path, 'rb') as f:
            document = tomllib.load(f)
    except FileNotFoundError as e:
        raise ConfigError('no such file', str(path)) from e
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(str(e), str(path)) from e
    apply_overrides(document, overrides)
    config = build_experiment_config(document, mutations, path)
    logger.info(f'Loaded experiment {path}')
    return config
