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
Runtime settings of the command layer.

Experiment parameters live in TOML documents; this module only holds settings
of the machine a run happens on.

Configuration Keys:
    threads: Worker processes for ensembles; 0 keeps the document's value
    pool_retries: Attempts of an ensemble map whose process pool broke
    float_format: printf-style format of floats in CSV tables

Loading Strategy:
    1. Attempts to load from config.json in the same directory
    2. Falls back to environment variables if the JSON file fails

Environment Variables (fallback):
    SAC_THREADS: Worker processes
    SAC_POOL_RETRIES: Pool retry attempts
    SAC_FLOAT_FORMAT: CSV float format

Usage:
    >>> from command.config import CONFIG
    >>> CONFIG['float_format']
    '%.17g'
'''

from pathlib import Path
import json
import logging
import os

CONFIG_FILE = Path(Path(__file__).parent, 'config.json')
logger = logging.getLogger()

try:
    with CONFIG_FILE.open(encoding='utf-8') as config_file:
        CONFIG = json.load(config_file)
except Exception as e:  # pylint: disable=bare-except
    logger.debug(f'No config file {CONFIG_FILE} ({e}), using environment')
    CONFIG = {
        'threads': int(os.getenv('SAC_THREADS', '0')),
        'pool_retries': int(os.getenv('SAC_POOL_RETRIES', '3')),
        'float_format': os.getenv('SAC_FLOAT_FORMAT', '%.17g'),
    }
