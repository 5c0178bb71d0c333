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
Binary snapshot files.

Layout, all little-endian:
    magic    4 bytes  b'SACF'
    version  u16
    dim      u8
    m        u32
    closure  u8       0 neumann, 1 periodic
    time     f64
    values   m^dim f64 in C order
'''

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from sac.exceptions import DomainError
from sac.grid import Closure, Grid

logger = logging.getLogger()

SNAPSHOT_MAGIC = b'SACF'
SNAPSHOT_VERSION = 1
HEADER = np.dtype(
    [
        ('magic', 'S4'),
        ('version', '<u2'),
        ('dim', 'u1'),
        ('m', '<u4'),
        ('closure', 'u1'),
        ('time', '<f8'),
    ]
)
CLOSURE_CODES = {Closure.NEUMANN: 0, Closure.PERIODIC: 1}


def encode_snapshot(grid: Grid, values: np.ndarray, t: float) -> bytes:
    header = np.zeros(1, dtype=HEADER)
    header[0] = (SNAPSHOT_MAGIC, SNAPSHOT_VERSION, grid.dim, grid.m, CLOSURE_CODES[grid.closure], t)
    body = np.ascontiguousarray(np.reshape(values, grid.shape), dtype='<f8')
    return header.tobytes() + body.tobytes()


def decode_snapshot(data: bytes) -> tuple[Grid, float, np.ndarray]:
    '''
    Inverse of encode_snapshot.

    Raises:
        DomainError: On a wrong magic, an unknown version or a truncated body.
    '''
    if len(data) < HEADER.itemsize:
        raise DomainError('Snapshot shorter than its header')
    header = np.frombuffer(data, dtype=HEADER, count=1)[0]
    if bytes(header['magic']) != SNAPSHOT_MAGIC:
        raise DomainError('Not a SACF snapshot')
    if int(header['version']) != SNAPSHOT_VERSION:
        raise DomainError(f'Unsupported snapshot version {int(header["version"])}')
    closures = {code: closure for closure, code in CLOSURE_CODES.items()}
    grid = Grid(int(header['dim']), int(header['m']), closures[int(header['closure'])])
    body = np.frombuffer(data, dtype='<f8', offset=HEADER.itemsize)
    if body.size != grid.node_count:
        raise DomainError(f'Snapshot holds {body.size} values, grid needs {grid.node_count}')
    return grid, float(header['time']), body.reshape(grid.shape).astype(float)


class SnapshotStore:
    '''
    Directory of snapshot files.

    Attributes:
        directory: Where snapshots are written.
    '''

    def __init__(self, directory: Path) -> None:
        self.directory = directory

    def path(self, sample_index: int, snapshot_index: int) -> Path:
        return self.directory / f'sample_{sample_index:04d}_{snapshot_index:05d}.sacf'

    def write(self, grid: Grid, values: np.ndarray, t: float, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(encode_snapshot(grid, values, t))
        return path

    def write_series(
        self, grid: Grid, snapshots: list[np.ndarray], times: list[float], sample_index: int = 0
    ) -> list[Path]:
        paths = [
            self.write(grid, values, t, self.path(sample_index, index))
            for index, (values, t) in enumerate(zip(snapshots, times))
        ]
        logger.info(f'Wrote {len(paths)} snapshots to {self.directory}')
        return paths

    def read(self, path: Path) -> tuple[Grid, float, np.ndarray]:
        return decode_snapshot(path.read_bytes())
