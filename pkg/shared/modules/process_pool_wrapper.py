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
Process pool wrapper module for ensemble tasks.

This module maps a picklable function over tasks with a process pool and
returns the results in task order. A pool that breaks (a worker killed by the
OS, for example) is rebuilt and the whole map retried.
'''

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
import logging
from typing import Callable, Sequence, TypeVar

from tenacity import (
    before_sleep_log,
    retry,
    retry_if_exception_type,
    stop_after_attempt,
    wait_fixed,
)

logger = logging.getLogger()

T = TypeVar('T')
R = TypeVar('R')


class ProcessPoolWrapper:
    '''
    A wrapper class for process pool execution.

    Attributes:
        workers: Number of worker processes; 1 runs inline.
        retries: Attempts of a map whose pool broke.
    '''

    def __init__(self, workers: int = 1, retries: int = 3) -> None:
        self.workers = max(1, workers)
        self.retries = max(1, retries)

    def resized(self, workers: int) -> ProcessPoolWrapper:
        return ProcessPoolWrapper(workers, self.retries)

    def map(self, fn: Callable[[T], R], tasks: Sequence[T]) -> list[R]:
        '''
        Apply fn to every task.

        Args:
            fn: Module-level function, so that it pickles.
            tasks: Picklable tasks.

        Returns:
            Results in task order.

        Raises:
            BrokenProcessPool: If the pool broke on every attempt.
        '''
        if self.workers == 1 or len(tasks) < 2:
            return [fn(task) for task in tasks]

        @retry(
            stop=stop_after_attempt(self.retries),
            wait=wait_fixed(1),
            retry=retry_if_exception_type(BrokenProcessPool),
            before_sleep=before_sleep_log(logger, logging.WARNING),
            reraise=True,
        )
        def run_pool() -> list[R]:
            with ProcessPoolExecutor(max_workers=min(self.workers, len(tasks))) as executor:
                return list(executor.map(fn, tasks))

        logger.info(f'Mapping {len(tasks)} tasks over {self.workers} workers')
        return run_pool()
