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

# pylint: disable=missing-class-docstring, missing-function-docstring, missing-module-docstring
# mypy: disable-error-code=no-untyped-def

from concurrent.futures.process import BrokenProcessPool
from unittest.mock import patch

import pandas as pd
import pytest

from process_pool_wrapper import ProcessPoolWrapper
from sac.ensemble import EnsembleConfig, run_ensemble
from sac.experiment import Experiment
from sac.grid import Grid
from sac.initial import Kink
from sac.modes import BumpMode
from sac.noise import NoiseModel
from sac.potential import STANDARD_QUARTIC
from sac.solver import SolverConfig


def square(x: int) -> int:
    return x * x


def test_inline_map():
    with patch('process_pool_wrapper.ProcessPoolExecutor') as executor:
        assert ProcessPoolWrapper(1).map(square, [1, 2, 3]) == [1, 4, 9]
        assert ProcessPoolWrapper(4).map(square, [5]) == [25]
    executor.assert_not_called()


def test_results_keep_task_order():
    assert ProcessPoolWrapper(2).map(square, list(range(8))) == [k * k for k in range(8)]


def test_broken_pool_is_retried():
    with patch(
        'process_pool_wrapper.ProcessPoolExecutor', side_effect=BrokenProcessPool('killed')
    ) as executor:
        with pytest.raises(BrokenProcessPool):
            ProcessPoolWrapper(2, retries=2).map(square, [1, 2])
    assert executor.call_count == 2


def test_resized_keeps_retries():
    pool = ProcessPoolWrapper(0, retries=5).resized(3)
    assert (pool.workers, pool.retries) == (3, 5)
    assert ProcessPoolWrapper(0).workers == 1


def test_ensemble_does_not_depend_on_worker_count():
    experiment = Experiment(
        grid=Grid(1, 33),
        potential=STANDARD_QUARTIC,
        model=NoiseModel(1, (BumpMode(amplitude=0.4, center=(0.5,), radius=0.3),)),
        solver=SolverConfig(eps=0.1, dt=1e-4, t_end=1e-3),
        initial=Kink(),
    )
    config = EnsembleConfig(experiment, samples=4, master_seed=9, eps_list=(0.1, 0.08))
    inline = run_ensemble(config)
    pooled = run_ensemble(config, ProcessPoolWrapper(2))
    pd.testing.assert_frame_equal(inline.summary, pooled.summary)
    pd.testing.assert_frame_equal(inline.moments, pooled.moments)
