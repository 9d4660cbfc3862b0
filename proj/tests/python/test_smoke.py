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

import itertools
import math

import numpy as np
import pytest

import cmrf


def brute_marginal(n, biases, edges, visible):
    probs = np.zeros(1 << len(visible))
    for spins in itertools.product((-1, 1), repeat=n):
        energy = sum(b * x for b, x in zip(biases, spins))
        energy += sum(w * spins[i] * spins[j] for i, j, w in edges)
        index = sum(1 << k for k, v in enumerate(visible) if spins[v] == 1)
        probs[index] += math.exp(energy)
    return probs / probs.sum()


def test_visible_marginal_matches_direct_enumeration():
    biases = [0.1, -0.2, 0.3, 0.0]
    edges = [(0, 1, 0.4), (1, 2, -0.3), (2, 3, 0.5), (0, 3, 0.2)]
    model = cmrf.IsingModel(4, biases, edges)
    c = cmrf.Cmrf(model, [0, 2])
    np.testing.assert_allclose(c.visible_marginal(), brute_marginal(4, biases, edges, [0, 2]), atol=1e-12)
    assert c.visible_marginal().sum() == pytest.approx(1.0)


def test_parity_gadget_law_closed_form():
    for b in (0.05, 0.1, 0.2):
        law = cmrf.parity_gadget(b).visible_marginal()
        delta = math.sinh(2 * b) ** 4 / (2 * math.cosh(2 * b) ** 4 - math.sinh(2 * b) ** 4)
        assert cmrf.delta_b(b) == pytest.approx(delta, rel=1e-12)
        for s, p in enumerate(law):
            parity = (-1) ** (4 - bin(s).count("1"))
            assert p == pytest.approx((1 + delta * parity) / 16, abs=1e-12)


def test_metrics_on_point_masses():
    p = np.array([1.0, 0.0, 0.0, 0.0])
    q = np.array([0.0, 0.0, 0.0, 1.0])
    assert cmrf.tv_distance(p, q) == pytest.approx(1.0)
    assert cmrf.emd(p, q) == pytest.approx(2.0)
    assert cmrf.emd(p, p) == 0.0
    with pytest.raises(ValueError):
        cmrf.tv_distance(np.ones(3) / 3, np.ones(3) / 3)


def test_model_text_round_trip():
    c = cmrf.parity_gadget(0.1, 2)
    again = cmrf.Cmrf.from_text(c.to_text())
    assert again.to_text() == c.to_text()
    assert again.visible == c.visible


def test_run_experiment_report_and_determinism():
    config = {"kind": "gadget-verify", "seed": 1, "params": {"b": 0.1, "k": 1}}
    report = cmrf.run_experiment(config)
    assert report["passed"]
    assert report["checks"][0]["value"] < 1e-10
    assert cmrf.run_experiment(config)["text"] == report["text"]


def test_bad_config_raises():
    with pytest.raises(cmrf.ConfigError):
        cmrf.run_experiment({"kind": "gadget-verify"})
    with pytest.raises(ValueError):
        cmrf.run_experiment("{not json")


def test_acceptance_criterion_by_id():
    result = cmrf.run_criterion(1)
    assert result["passed"]
    assert result["summary"].startswith("AC1 PASS")
