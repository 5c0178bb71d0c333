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
CSV wrapper module for report tables.

This module writes pandas tables and JSON summaries with a fixed float format
and line terminator, so that identical results produce identical bytes.
'''

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import pandas as pd

logger = logging.getLogger()


class CsvWrapper:
    '''
    A wrapper class for report table files.

    Attributes:
        float_format: printf-style format of floating point cells.
    '''

    def __init__(self, float_format: str = '%.17g') -> None:
        self.float_format = float_format

    def write_table(self, frame: pd.DataFrame, path: Path) -> Path:
        '''
        Write a table without its index.

        Args:
            frame: The table.
            path: Destination file; parent directories are created.

        Returns:
            The path written.
        '''
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=self.float_format, lineterminator='\n')
        logger.debug(f'Wrote {len(frame)} rows to {path}')
        return path

    def read_table(self, path: Path) -> pd.DataFrame:
        return pd.read_csv(path)

    def write_summary(self, summary: dict[str, Any], path: Path) -> Path:
        '''
        Write a summary mapping as sorted, indented JSON.
        '''
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(summary, indent=2, sort_keys=True) + '\n', encoding='utf-8')
        return path

    def read_summary(self, path: Path) -> dict[str, Any]:
        return json.loads(path.read_text(encoding='utf-8'))
