# Copyright 2026 The cmrf Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Censored Markov random fields: exact oracles, gadgets, metrics, experiments."""

import json as _json

from ._cmrf import (
    Cmrf,
    ConfigError,
    IsingModel,
    acceptance_criteria,
    delta_b,
    emd,
    nand_gadget,
    parity_gadget,
    parity_gadget_law,
    run_criterion,
    tv_distance,
)
from ._cmrf import run_experiment as _run_experiment

__all__ = [
    "Cmrf",
    "ConfigError",
    "IsingModel",
    "acceptance_criteria",
    "delta_b",
    "emd",
    "nand_gadget",
    "parity_gadget",
    "parity_gadget_law",
    "run_criterion",
    "run_experiment",
    "tv_distance",
]


def run_experiment(config):
    """Runs an experiment given its config as a dict or a JSON string."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run_experiment(config)
