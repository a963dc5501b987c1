# Copyright 2026 The Leduc Workbench Authors
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


"""Smoke tests for the leduc_workbench Python bindings."""

import math

import pytest

import leduc_workbench as lw


@pytest.fixture(scope="module")
def gto():
    table, exploitability, _ = lw.cfr_solve(
        iterations=200000, target=1e-6, check_every=500, algorithm="cfr-plus")
    assert exploitability < 1e-6
    return table


def test_info_state_count():
    keys = lw.enumerate_info_states()
    assert len(keys) == 936
    assert len(set(keys)) == 936


def test_hand_plays_to_terminal_zero_sum():
    state = lw.GameState.from_seed(lw.derive_seed(1, "hand", [0]))
    while not state.is_terminal():
        legal = state.legal_actions()
        assert legal
        state = state.apply(legal[-1] if len(state.history) < 4 else legal[0])
    p0, p1 = state.payoffs()
    assert p0 + p1 == pytest.approx(0.0)


def test_illegal_action_raises():
    state = lw.GameState.from_seed(3)
    with pytest.raises(ValueError):
        state.apply("nonsense")


def test_derive_seed_is_deterministic():
    assert lw.derive_seed(7, "trial", [1, 2]) == lw.derive_seed(7, "trial", [1, 2])
    assert lw.derive_seed(7, "trial", [1, 2]) != lw.derive_seed(7, "trial", [2, 1])


def test_uniform_table_round_trip():
    table = lw.StrategyTable.uniform()
    assert table.num_entries() == 936
    assert table.is_valid()
    assert lw.StrategyTable.parse(table.serialize()) == table


def test_cfr_solution(gto):
    assert gto.is_valid()
    assert lw.nash_conv(gto) < 2e-6
    value = lw.GameValue.from_equilibrium(gto)
    assert value.v_star_p0 + value.v_star_p1 == pytest.approx(0.0, abs=1e-9)
    assert value.v_star_p0 < 0.0


def test_lambda_schedule_endpoints():
    assert lw.lambda_schedule(0.0) == pytest.approx(0.35)
    assert lw.lambda_schedule(0.20) == pytest.approx(0.175)
    assert lw.lambda_schedule(0.40) == pytest.approx(0.0)
    assert lw.lambda_schedule(1.0) == pytest.approx(0.0)


def test_eval_suite_and_gto_self_gain(gto):
    value = lw.GameValue.from_equilibrium(gto)
    suite = lw.build_eval_suite(gto, value, seed=42)
    assert len(suite) == 12
    assert all(r["strategy"].is_valid() for r in suite)
    assert all(r["exploitability"] > 0.0 for r in suite)
    results = lw.evaluate_tabular(gto, gto, suite[:2], hands_per_trial=200, trials=2)
    assert len(results) == 3
    assert results[0]["opponent"] == "gto"
    for r in results:
        assert r["gain"] == 0.0
        assert not r["significant"]
        assert math.isfinite(r["model_ev"])


def test_model_parameter_count_positive():
    assert lw.token_dim() > 0
    assert lw.model_parameter_count(1, 16, 2, 32) > 0
    with pytest.raises(ValueError):
        lw.model_parameter_count(1, 15, 2, 32)
