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
Custom exceptions for the stochastic Allen-Cahn laboratory.

This module defines the failure categories raised by the numerical library.
Each category maps to one reaction of the command layer (an exit code, a
skipped sample, or a plain propagation), so callers can decide what to do from
the exception type alone.
'''

from __future__ import annotations

from typing import Optional


class SacError(Exception):
    '''
    Base class of every error raised by the library.

    Command code catches this type last, after the specific categories below,
    and reports it with exit code 1.
    '''


class DomainError(SacError):
    '''
    Exception raised when an input lies outside the domain of an operation.

    Typical sources:
    - Non-finite arguments to the potential (NaN, +/-inf)
    - Grids with fewer than 8 nodes per axis or an unsupported dimension
    - Positions that leave the grid during interpolation

    The operation has no meaningful result, so the error always propagates.
    '''


class RangeError(SacError):
    '''
    Exception raised when a value lies outside the range of an inverted map.

    Raised by the inverse of the Modica-Mortola transform for non-finite
    targets and targets beyond the bracketing limit.

    Example:
        >>> g_inverse(STANDARD_QUARTIC, float('nan'))
        Traceback (most recent call last):
        RangeError: ...
    '''


class StabilityError(SacError):
    '''
    Exception raised when a time step violates the stability bound.

    Detected while an experiment document is validated, before any stepping
    happens. The command layer reports it with exit code 3 and names both the
    requested step and the bound.
    '''


class BlowupError(SacError):
    '''
    Exception raised when a trajectory leaves the admissible range.

    A trajectory blows up when any nodal value is non-finite or exceeds the
    configured blowup threshold. The failing step index and time are carried
    so that ensembles can report the failing seed.

    When this exception is raised:
    - A single run ends with exit code 4
    - An ensemble fails, unless the configuration allows excluding failures

    Attributes:
        step: Index of the step that produced the inadmissible state.
        time: Simulation time reached by that step.
    '''

    def __init__(self, message: str, step: int, time: float) -> None:
        super().__init__(message)
        self.step = step
        self.time = time


class LinearSolveError(SacError):
    '''
    Exception raised when the conjugate gradient solve of an implicit step
    does not reach its tolerance.
    '''


class DegenerateFlowError(SacError):
    '''
    Exception raised when the simulated stochastic flow stops being a
    diffeomorphism.

    Detected as a non-positive Jacobian determinant of the forward map at some
    node, which means the step is too large for the noise amplitude.
    '''


class ContractError(SacError):
    '''
    Exception raised when a caller breaks the usage contract of an operation.

    For example:
    - Requesting an identity residual from a result without increment record
    - Requesting a localized residual for a test function that was not tracked
    - Fitting increment scaling with too few samples
    '''


class NoiseStreamExhausted(SacError):
    '''
    Exception raised when a replayed increment record has no steps left.

    Replays drive the flow backend with the increments recorded by the direct
    solver; running past the end of the record is a programming error.
    '''


class ConfigError(SacError):
    '''
    Exception raised for unreadable or invalid experiment documents.

    The message names the offending dotted key (e.g. `solver.dt`) and what
    was expected. The command layer reports it with exit code 2.

    Attributes:
        key: Dotted key path of the offending entry, if known.
    '''

    def __init__(self, message: str, key: Optional[str] = None) -> None:
        super().__init__(f'{key}: {message}' if key else message)
        self.key = key


class GateFailure(SacError):
    '''
    Exception raised when a statistical or validation gate fails.

    Gates compare measured quantities (ensemble residual means, moment ratios,
    fitted slopes, cross-backend distances) with their acceptance bands.
    All outputs are still written before the exception is raised, and the
    command layer reports it with exit code 5.

    Attributes:
        failed_gates: Names of the gates that failed.
    '''

    def __init__(self, failed_gates: list[str]) -> None:
        super().__init__(f'Failed gates: {", ".join(failed_gates)}')
        self.failed_gates = failed_gates
