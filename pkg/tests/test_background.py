"""Class schedules, extinction times, and regularity moduli."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maflow import background as bgmod, grid as gridmod


def test_t_max_nkrf_closed_form():
    # 2x2 diagonal: the (1,1) entry 3 e^{-t} - 1 vanishes first, at log 3
    sched = bgmod.ClassSchedule(np.diag([2.0, 1.0]).astype(complex),
                                np.diag([-1.0, 1.0]).astype(complex),
                                rule="nkrf")
    assert bgmod.t_max(sched) == pytest.approx(math.log(3.0), abs=1e-8)


def test_t_max_krf_closed_form():
    sched = bgmod.ClassSchedule(np.array([[1.0]], dtype=complex),
                                np.array([[-0.5]], dtype=complex),
                                rule="krf")
    assert bgmod.t_max(sched) == pytest.approx(2.0, abs=1e-8)


def test_t_max_infinite_when_target_psd():
    sched = bgmod.ClassSchedule(np.eye(2, dtype=complex),
                                np.eye(2, dtype=complex), rule="nkrf")
    assert bgmod.t_max(sched) == math.inf


def test_t_max_constant_rule_rejected():
    sched = bgmod.ClassSchedule(np.eye(1, dtype=complex), rule="constant")
    with pytest.raises(ValueError, match="never degenerates"):
        bgmod.t_max(sched)


def test_t_max_monotone_in_target():
    A = np.array([[2.0]], dtype=complex)
    early = bgmod.t_max(bgmod.ClassSchedule(A, np.array([[-2.0]]), "nkrf"))
    late = bgmod.t_max(bgmod.ClassSchedule(A, np.array([[-1.0]]), "nkrf"))
    assert early == pytest.approx(math.log(2.0), abs=1e-8)
    assert late == pytest.approx(math.log(3.0), abs=1e-8)
    assert early < late


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.5, max_value=8.0),
       st.floats(min_value=-8.0, max_value=-0.1))
def test_t_max_scalar_oracle_property(a, b):
    # a e^{-t} + b (1 - e^{-t}) = 0  <=>  t = log((a - b) / (-b))
    sched = bgmod.ClassSchedule(np.array([[a]], dtype=complex),
                                np.array([[b]], dtype=complex), "nkrf")
    want = math.log((a - b) / (-b))
    assert bgmod.t_max(sched) == pytest.approx(want, abs=1e-7)


def test_schedule_validation():
    with pytest.raises(ValueError, match="rule"):
        bgmod.ClassSchedule(np.eye(1), rule="bogus")
    with pytest.raises(ValueError, match="target"):
        bgmod.ClassSchedule(np.eye(1), rule="nkrf")
    with pytest.raises(ValueError, match="positive definite"):
        bgmod.ClassSchedule(-np.eye(1), np.eye(1), rule="nkrf")


def test_regularity_modulus_constant_family_is_zero():
    fam = bgmod.ConstantFamily(np.eye(2, dtype=complex))
    assert bgmod.regularity_modulus(fam, 0.1, 2.0) == 0.0


def test_regularity_modulus_lipschitz_schedule():
    # omega_t = diag(1 + e^{-t}, 1): log-derivative bounded by 1/2, so
    # E(eps) <= e^{eps/2} - 1 <= 0.52 eps on eps <= 0.1
    sched = bgmod.ClassSchedule(np.diag([2.0, 1.0]).astype(complex),
                                np.diag([1.0, 1.0]).astype(complex),
                                rule="nkrf")
    fam = bgmod.BackgroundFamily(sched)
    prev = math.inf
    for eps in (0.1, 0.05, 0.025):
        E = bgmod.regularity_modulus(fam, eps, 2.0)
        assert 0.0 < E <= 0.52 * eps
        assert E < prev
        prev = E


def test_jump_family_fails_regularity():
    fam = bgmod.CallableFamily(
        lambda t: (np.eye(1, dtype=complex) if t < 0.5
                   else 3.0 * np.eye(1, dtype=complex)))
    E = bgmod.regularity_modulus(fam, 0.1, 1.0)
    assert E >= 1.0


def test_very_regular_constant_and_decay():
    const = bgmod.ConstantFamily(np.eye(1, dtype=complex))
    rep = bgmod.very_regular_check(const, 2.0)
    assert rep.passed and rep.eta == pytest.approx(1.0)

    # omega_t = (1 + e^{-t}) I decays toward half its initial size:
    # eta = 1 - sup eps = (1 + e^{-T}) / 2
    sched = bgmod.ClassSchedule(2.0 * np.eye(1, dtype=complex),
                                np.eye(1, dtype=complex), rule="nkrf")
    rep = bgmod.very_regular_check(bgmod.BackgroundFamily(sched), 2.0)
    assert rep.passed
    assert rep.eta == pytest.approx(0.5 * (1.0 + math.exp(-2.0)), abs=1e-4)


def test_very_regular_fails_on_collapse():
    # omega_t = (1 - t)_+ I degenerates at t = 1, inside the horizon
    fam = bgmod.CallableFamily(
        lambda t: max(1.0 - t, 0.0) * np.eye(1, dtype=complex))
    rep = bgmod.very_regular_check(fam, 2.0)
    assert not rep.passed
    assert "sup eps" in rep.failure


def test_is_nondecreasing():
    grow = bgmod.BackgroundFamily(
        bgmod.ClassSchedule(np.eye(1, dtype=complex),
                            np.eye(1, dtype=complex), rule="krf"))
    decay = bgmod.BackgroundFamily(
        bgmod.ClassSchedule(2.0 * np.eye(1, dtype=complex),
                            np.eye(1, dtype=complex), rule="nkrf"))
    assert bgmod.is_nondecreasing(grow, 2.0)
    assert not bgmod.is_nondecreasing(decay, 2.0)


def test_cosine_bump_profile():
    g = gridmod.TorusGrid(1, 16)
    bump = bgmod.CosineBump(0.2, frequency=2, axis=1, decay=0.5)
    prof = bump.components_at(0.0, g)
    x = g.axis_coords(1)
    want = 0.2 * np.cos(4.0 * math.pi * x)
    assert np.max(np.abs(prof - want)) < 1e-12
    assert abs(np.sum(prof)) < 1e-10  # mean zero: class unchanged
    later = bump.components_at(1.0, g)
    assert np.max(np.abs(later)) == pytest.approx(
        0.2 * math.exp(-0.5), abs=1e-12)
    with pytest.raises(ValueError, match="axis"):
        bgmod.CosineBump(0.1, axis=2).components_at(0.0, g)
    with pytest.raises(ValueError, match="frequency"):
        bgmod.CosineBump(0.1, frequency=0)


def test_perturbed_family_omega_at():
    g = gridmod.TorusGrid(1, 16)
    fam = bgmod.ConstantFamily(np.eye(1, dtype=complex),
                               perturbation=bgmod.CosineBump(0.1))
    om = fam.omega_at(0.0, g)
    x = g.axis_coords(0)
    want = 1.0 + 0.1 * np.cos(2.0 * math.pi * x)
    assert np.max(np.abs(om.matrices[..., 0, 0].real
                         - np.broadcast_to(want, g.shape))) < 1e-12


def test_scaled_and_shifted_families():
    base = bgmod.ConstantFamily(np.eye(1, dtype=complex))
    scaled = bgmod.ScaledFamily(base, lambda t: 1.0 + 0.2 * math.sin(t))
    assert scaled.class_at(0.5)[0, 0].real == pytest.approx(
        1.0 + 0.2 * math.sin(0.5))
    shifted = bgmod.ShiftedFamily(base, 0.3 * np.eye(1, dtype=complex))
    assert shifted.class_at(2.0)[0, 0].real == pytest.approx(1.3)
    g = gridmod.TorusGrid(1, 8)
    comp = shifted.components_at(0.0, g)
    assert np.allclose(np.asarray(comp), 1.3)
