"""Container bookkeeping and pressing: thresholds, queueing, overflow."""

from __future__ import annotations

import pytest

from sortplant.config import EnvConfig
from sortplant.env import Container, reset, update_containers_and_presses


def fresh_state(t=0, **cfg_kwargs):
    state, _ = reset(EnvConfig(**cfg_kwargs), 0)
    state.t = t
    return state


def deposit_only(material, amount):
    deposits = [[0.0] * 4 for _ in range(5)]
    deposits[material][material] = amount
    return deposits


def test_threshold_crossing_presses_immediately_when_idle():
    state = fresh_state(t=6)
    state.containers[0] = Container([150.0, 0.0, 0.0, 0.0])
    bales = update_containers_and_presses(state, deposit_only(0, 60.0))
    assert len(bales) == 1
    bale = bales[0]
    assert bale.material == 0
    assert bale.size == pytest.approx(210.0, rel=1e-12)
    assert bale.purity == 1.0
    assert bale.pressed_at == 6
    assert state.containers[0].total == 0.0
    assert not state.containers[0].pending
    assert state.presses[0].busy_until == 6 + 3


def test_busy_presses_defer_until_one_frees():
    state = fresh_state(t=0)
    state.presses[0].busy_until = 2
    state.presses[1].busy_until = 4
    state.containers[2] = Container([0.0, 0.0, 190.0, 20.0])
    bales = update_containers_and_presses(state, deposit_only(2, 10.0))
    assert bales == []
    assert state.containers[2].pending
    assert state.containers[2].total == pytest.approx(220.0)

    # nothing frees at t=1
    state.t = 1
    assert update_containers_and_presses(state, [[0.0] * 4 for _ in range(5)]) == []
    # press 0 frees at t=2: the pending container is baled on that step
    state.t = 2
    bales = update_containers_and_presses(state, [[0.0] * 4 for _ in range(5)])
    assert len(bales) == 1
    assert bales[0].size == pytest.approx(220.0)
    assert bales[0].pressed_at == 2
    assert state.presses[0].busy_until == 2 + 3


def test_fifo_order_with_index_tiebreak():
    state = fresh_state(t=0)
    state.presses[0].busy_until = 5
    state.presses[1].busy_until = 5
    # containers 1 and 3 cross on step 0, container 0 on step 1
    deposits = [[0.0] * 4 for _ in range(5)]
    deposits[1][1] = 250.0
    deposits[3][3] = 240.0
    assert update_containers_and_presses(state, deposits) == []
    state.t = 1
    assert update_containers_and_presses(state, deposit_only(0, 260.0)) == []
    state.t = 5
    bales = update_containers_and_presses(state, [[0.0] * 4 for _ in range(5)])
    # two presses free together: first-crossed first, ties by container index
    assert [b.material for b in bales] == [1, 3]
    state.t = 8
    bales = update_containers_and_presses(state, [[0.0] * 4 for _ in range(5)])
    assert [b.material for b in bales] == [0]


def test_overflow_above_capacity_diverts_to_e():
    state = fresh_state(t=0)
    state.presses[0].busy_until = 10
    state.presses[1].busy_until = 10
    state.containers[1] = Container([0.0, 300.0, 0.0, 0.0])
    state.containers[1].pending = True  # crossed earlier, never pressed
    bales = update_containers_and_presses(state, deposit_only(1, 40.0))
    assert bales == []
    assert state.containers[1].total == pytest.approx(300.0)
    assert state.containers[4].contents[1] == pytest.approx(40.0)


def test_partial_overflow_fills_to_capacity_then_diverts():
    state = fresh_state(t=0)
    state.presses[0].busy_until = 10
    state.presses[1].busy_until = 10
    state.containers[1] = Container([0.0, 290.0, 0.0, 0.0])
    state.containers[1].pending = True
    deposits = [[0.0] * 4 for _ in range(5)]
    deposits[1] = [30.0, 20.0, 10.0, 0.0]  # 60 units arriving, 10 of headroom
    update_containers_and_presses(state, deposits)
    assert state.containers[1].total == pytest.approx(300.0)
    # the diverted 50 units keep the deposit's material mix
    assert state.containers[4].contents == pytest.approx([25.0, 16.666666666666668, 8.333333333333334, 0.0])
    total = state.containers[1].total + state.containers[4].total
    assert total == pytest.approx(290.0 + 60.0, rel=1e-12)


def test_container_e_is_pressed_with_zero_purity():
    state = fresh_state(t=3)
    deposits = [[0.0] * 4 for _ in range(5)]
    deposits[4] = [100.0, 60.0, 30.0, 20.0]
    bales = update_containers_and_presses(state, deposits)
    assert len(bales) == 1
    assert bales[0].material == 4
    assert bales[0].purity == 0.0
    assert bales[0].size == pytest.approx(210.0)


def test_bale_purity_reflects_contents():
    state = fresh_state(t=0)
    state.containers[2] = Container([10.0, 0.0, 160.0, 10.0])
    bales = update_containers_and_presses(state, deposit_only(2, 20.0))
    assert len(bales) == 1
    assert bales[0].purity == pytest.approx(180.0 / 200.0, rel=1e-12)
