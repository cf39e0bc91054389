"""Station accuracy law: baseline, boost, load degradation, clamping."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sortplant.config import EnvConfig
from sortplant.env import ContractViolation, effective_accuracy

CFG = EnvConfig()


def test_unboosted_baseline_at_zero_load():
    assert effective_accuracy(1, 0, 0.0, CFG, 0.0) == 0.80


def test_boosted_ceiling_is_one_minus_noise():
    assert effective_accuracy(0, 0, 0.0, CFG, 0.0) == pytest.approx(0.98, rel=1e-15)
    assert effective_accuracy(1, 3, 0.0, CFG, 0.0) == pytest.approx(0.98, rel=1e-15)


def test_full_load_degradation():
    # 0.80 * (1 - 0.3) = 0.56
    assert effective_accuracy(1, 0, 1.0, CFG, 0.0) == pytest.approx(0.56, rel=1e-15)


def test_mode_pairs():
    boosted_0 = [m for m in range(4) if effective_accuracy(0, m, 0.0, CFG, 0.0) > 0.9]
    boosted_1 = [m for m in range(4) if effective_accuracy(1, m, 0.0, CFG, 0.0) > 0.9]
    assert boosted_0 == [0, 2]
    assert boosted_1 == [1, 3]


def test_load_out_of_range_rejected():
    with pytest.raises(ContractViolation):
        effective_accuracy(0, 0, -0.01, CFG, 0.0)
    with pytest.raises(ContractViolation):
        effective_accuracy(0, 0, 1.01, CFG, 0.0)


def test_clamped_to_unit_interval():
    assert effective_accuracy(0, 0, 0.0, CFG, 0.5) == 1.0
    hot = EnvConfig(degradation_coeff=1.0)
    assert effective_accuracy(0, 1, 1.0, hot, -0.5) == 0.0


@settings(max_examples=300, deadline=None)
@given(
    mode=st.integers(0, 1),
    material=st.integers(0, 3),
    l1=st.floats(0.0, 1.0),
    l2=st.floats(0.0, 1.0),
    eta=st.floats(-0.02, 0.02),
)
def test_non_increasing_in_load(mode, material, l1, l2, eta):
    lo, hi = sorted((l1, l2))
    a_lo = effective_accuracy(mode, material, lo, CFG, eta)
    a_hi = effective_accuracy(mode, material, hi, CFG, eta)
    assert a_hi <= a_lo + 1e-15
