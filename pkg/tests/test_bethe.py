import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubbard_scatter.bethe import (
    ScatteringParams,
    collision_angle,
    dispersion,
    fold_angle,
    lambda_param,
    phase_shift,
    reflection,
    scattering_state,
)
from hubbard_scatter.hamiltonian import build_equivalent_chain

finite = st.floats(-50, 50, allow_nan=False)
momenta = st.floats(0.05, math.pi - 0.05)


@given(st.floats(-100, 100))
def test_fold_angle_range_and_congruence(x):
    y = fold_angle(x)
    assert -math.pi < y <= math.pi
    assert abs(math.remainder(x - y, 2 * math.pi)) < 1e-9


def test_fold_angle_branch():
    assert fold_angle(math.pi) == math.pi
    assert fold_angle(-math.pi) == math.pi
    assert fold_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


@given(finite, finite)
def test_reflection_has_unit_modulus_and_phase_delta(U, lam):
    if U == 0 and lam == 0:
        return
    R = reflection(U, lam)
    assert abs(abs(R) - 1) < 1e-12
    assert abs(math.remainder(np.angle(R) - phase_shift(U, lam), 2 * math.pi)) < 1e-9


def test_reflection_limits():
    assert reflection(0.0, 2.0) == 1
    assert reflection(1e12, 2.0) == pytest.approx(-1)
    # U = lambda gives a quarter turn
    assert phase_shift(4.0, 4.0) == pytest.approx(-math.pi / 2)
    with pytest.raises(ValueError):
        reflection(0.0, 0.0)
    with pytest.raises(ValueError):
        phase_shift(0.0, 0.0)


def test_collision_angle_values():
    assert collision_angle(1.0, 1.0) == pytest.approx(math.pi / 2)
    assert collision_angle(0.0, -3.0) == 0.0
    assert collision_angle(4.0, -4.0) == pytest.approx(-math.pi / 2)
    assert collision_angle(0.0, 3.0) == 0.0
    assert collision_angle(-2.0, 2.0) == pytest.approx(-math.pi / 2)
    with pytest.raises(ValueError):
        collision_angle(1.0, 0.0)


@given(finite, st.floats(0.1, 20))
def test_collision_angle_is_twice_arctan(U, v):
    assert collision_angle(U, v) == pytest.approx(2 * math.atan(U / v), abs=1e-12)


@pytest.mark.parametrize("U", [-3.0, 0.5, 1.0, 2.0, 4.0])
@pytest.mark.parametrize("K", [0.0, 0.9, -2.1])
@pytest.mark.parametrize("k", [math.pi / 3, 0.4, 2.5])
def test_scattering_state_solves_singlet_chain(U, K, k):
    # oracle: the chain eigen-equation row by row, including the boundary rows
    M = 40
    lam = lambda_param(1.0, K, k)
    R = reflection(U, lam)
    f = scattering_state(k, R, M).astype(complex)
    f[0] = (1 + R) / math.sqrt(2)
    h = build_equivalent_chain(K, 1.0, U, M, "singlet").toarray()
    residual = h @ f - dispersion(1.0, K, k) * f
    assert np.max(np.abs(residual[:-1])) < 1e-12


def test_triplet_chain_is_a_hard_wall():
    k, M = 0.8, 30
    f = scattering_state(k, -1.0, M + 1)  # f(0) = 0
    h = build_equivalent_chain(0.3, 1.0, 5.0, M, "triplet").toarray()
    residual = h @ f[1:] - dispersion(1.0, 0.3, k) * f[1:]
    assert abs(f[0]) < 1e-15 and np.max(np.abs(residual[:-1])) < 1e-12


def test_scattering_state_rejects_band_edges():
    with pytest.raises(ValueError):
        scattering_state(0.0, 1.0, 5)
    with pytest.raises(ValueError):
        scattering_state(math.pi, 1.0, 5)


@given(st.floats(-10, 10), st.floats(-3, 3), momenta)
@settings(max_examples=50)
def test_scattering_params_bundle(U, K, k):
    p = ScatteringParams(1.0, U, K, k)
    if p.lam == 0 and U == 0:
        return
    assert p.theta == p.delta
    assert p.energy == pytest.approx(-4 * math.cos(K / 2) * math.cos(k))
