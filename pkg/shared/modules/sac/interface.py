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
Zero level set extraction.

1D fields yield crossing points; 2D fields yield polylines traced by marching
squares, with saddle cells resolved by the sign of the cell average. Positive
values count as inside the +1 phase.
'''

from __future__ import annotations

import logging
from typing import Sequence

import numba
import numpy as np

from .grid import Grid

logger = logging.getLogger()


@numba.njit(cache=True)
def _edge_point(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    edge: int, i: int, j: int, v00: float, v10: float, v11: float, v01: float, h: float
) -> tuple[float, float]:
    # edges: 0 bottom (00-10), 1 right (10-11), 2 top (01-11), 3 left (00-01)
    if edge == 0:
        return (i + v00 / (v00 - v10)) * h, j * h
    if edge == 1:
        return (i + 1) * h, (j + v10 / (v10 - v11)) * h
    if edge == 2:
        return (i + v01 / (v01 - v11)) * h, (j + 1) * h
    return i * h, (j + v00 / (v00 - v01)) * h


@numba.njit(cache=True)
def _edge_id(edge: int, i: int, j: int, m: int) -> int:
    if edge == 0:
        return 2 * (i * m + j)
    if edge == 1:
        return 2 * ((i + 1) * m + j) + 1
    if edge == 2:
        return 2 * (i * m + j + 1)
    return 2 * (i * m + j) + 1


@numba.njit(cache=True)
def _cell_segments(values: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    '''
    Segments of the zero level set, one or two per crossed cell.

    Returns:
        (points, edges): segment end points of shape (K, 4) as x0, y0, x1, y1 and the
        ids of the grid edges the end points lie on, shape (K, 2).
    '''
    m = values.shape[0]
    points = np.empty((2 * (m - 1) * (m - 1), 4))
    edges = np.empty((2 * (m - 1) * (m - 1), 2), dtype=np.int64)
    count = 0
    crossed = np.empty(4, dtype=np.int64)
    for i in range(m - 1):
        for j in range(m - 1):
            v00 = values[i, j]
            v10 = values[i + 1, j]
            v11 = values[i + 1, j + 1]
            v01 = values[i, j + 1]
            p00, p10, p11, p01 = v00 > 0.0, v10 > 0.0, v11 > 0.0, v01 > 0.0
            n = 0
            if p00 != p10:
                crossed[n] = 0
                n += 1
            if p10 != p11:
                crossed[n] = 1
                n += 1
            if p01 != p11:
                crossed[n] = 2
                n += 1
            if p00 != p01:
                crossed[n] = 3
                n += 1
            if n == 0:
                continue

            pairs = np.empty((2, 2), dtype=np.int64)
            n_pairs = 1
            if n == 2:
                pairs[0, 0], pairs[0, 1] = crossed[0], crossed[1]
            else:
                n_pairs = 2
                center = 0.25 * (v00 + v10 + v11 + v01)
                if (center > 0.0) == p00:
                    # corners 10 and 01 are cut off
                    pairs[0, 0], pairs[0, 1] = 0, 1
                    pairs[1, 0], pairs[1, 1] = 2, 3
                else:
                    # corners 00 and 11 are cut off
                    pairs[0, 0], pairs[0, 1] = 3, 0
                    pairs[1, 0], pairs[1, 1] = 1, 2

            for p in range(n_pairs):
                a, b = pairs[p, 0], pairs[p, 1]
                xa, ya = _edge_point(a, i, j, v00, v10, v11, v01, h)
                xb, yb = _edge_point(b, i, j, v00, v10, v11, v01, h)
                points[count, 0], points[count, 1] = xa, ya
                points[count, 2], points[count, 3] = xb, yb
                edges[count, 0] = _edge_id(a, i, j, m)
                edges[count, 1] = _edge_id(b, i, j, m)
                count += 1
    return points[:count], edges[:count]


def _chain(points: np.ndarray, edges: np.ndarray) -> list[np.ndarray]:
    neighbours: dict[int, list[int]] = {}
    for index, (a, b) in enumerate(edges):
        neighbours.setdefault(int(a), []).append(index)
        neighbours.setdefault(int(b), []).append(index)

    used = np.zeros(len(edges), dtype=bool)
    polylines = []
    # open chains start at edges touched once
    starts = [e for e, segs in neighbours.items() if len(segs) == 1] + list(neighbours)
    for start_edge in starts:
        for first in neighbours[start_edge]:
            if used[first]:
                continue
            chain = []
            edge, segment = start_edge, first
            while segment is not None and not used[segment]:
                used[segment] = True
                a, b = edges[segment]
                if a == edge:
                    chain.append(points[segment, 0:2])
                    edge = int(b)
                else:
                    chain.append(points[segment, 2:4])
                    edge = int(a)
                following = [s for s in neighbours[edge] if not used[s]]
                segment = following[0] if following else None
            chain.append(_edge_location(points, edges, edge))
            polylines.append(np.array(chain))
    return polylines


def _edge_location(points: np.ndarray, edges: np.ndarray, edge: int) -> np.ndarray:
    row, column = np.argwhere(edges == edge)[0]
    return points[row, 2 * column : 2 * column + 2]


def interface_extract(grid: Grid, u: np.ndarray) -> list[np.ndarray]:
    '''
    Zero level set of a nodal field.

    Args:
        grid: The grid.
        u: Nodal values.

    Returns:
        1D: a single array of crossing coordinates. 2D: a list of polylines, each an
        array of shape (K, 2). Empty when u does not change sign.
    '''
    if grid.dim == 1:
        x = grid.axis_coordinates
        crossings = list(x[u == 0.0])
        left, right = u[:-1], u[1:]
        mask = (left * right < 0.0)
        crossings.extend(x[:-1][mask] + grid.h * left[mask] / (left[mask] - right[mask]))
        return [np.sort(np.asarray(crossings))] if crossings else []

    points, edges = _cell_segments(np.ascontiguousarray(u, dtype=np.float64), grid.h)
    if len(points) == 0:
        return []
    return _chain(points, edges)


def circle_radius(polylines: Sequence[np.ndarray], center: Sequence[float]) -> float:
    '''
    Mean distance of the polyline vertices to a center, NaN for an empty level set.
    '''
    if not polylines:
        return float('nan')
    vertices = np.concatenate(list(polylines))
    if vertices.ndim == 1:
        vertices = vertices[:, None]
    offset = vertices - np.asarray(center, dtype=float)
    return float(np.mean(np.linalg.norm(offset, axis=1)))
