import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubbard_scatter.basis import DOWN, UP, BasisMismatchError, enumerate_sector
from hubbard_scatter.metrics import (
    PartitionError,
    all_spin_strings,
    build_target_state,
    concurrence,
    fidelity,
    pure_concurrence,
    region_labels,
    ring_halves,
    spin_configuration_probabilities,
    spin_reduced_dm,
)
from hubbard_scatter.wavepacket import PacketWarning, WavepacketSpec, product_state

BELL = np.array([0, 1, 1, 0]) / math.sqrt(2)


def test_concurrence_reference_states():
    assert concurrence(np.outer(BELL, BELL)) == pytest.approx(1.0)
    prod = np.kron([1, 0], [0, 1]).astype(complex)
    assert concurrence(np.outer(prod, prod)) == pytest.approx(0.0, abs=1e-12)
    assert concurrence(np.eye(4) / 4) == 0.0


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.5, 0.8, 1.0])
def test_werner_state(p):
    rho = p * np.outer(BELL, BELL) + (1 - p) * np.eye(4) / 4
    assert concurrence(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-7)


@given(st.integers(0, 10_000))
@settings(max_examples=30)
def test_pure_state_concurrence_agrees(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    assert concurrence(np.outer(v, v.conj())) == pytest.approx(pure_concurrence(v), abs=1e-6)


def test_concurrence_rejects_invalid_input():
    with pytest.raises(ValueError):
        concurrence(np.eye(2))
    with pytest.raises(ValueError):
        concurrence(np.eye(4))
    with pytest.raises(ValueError):
        concurrence(np.diag([1.5, -0.5, 0, 0]))


@pytest.fixture(scope="module")
def pair():
    b = enumerate_sector(60, 1, 1)
    left = WavepacketSpec(15, 0.2, 1.0, UP)
    right = WavepacketSpec(45, 0.2, -1.0, DOWN)
    return b, left, right


def test_fidelity_properties(pair):
    b, left, right = pair
    a = product_state([left, right], b)
    c = product_state([left.with_(spin=DOWN), right.with_(spin=UP)], b)
    assert fidelity(a, a) == pytest.approx(1.0)
    assert fidelity(a, c) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(BasisMismatchError):
        fidelity(a, product_state([left], enumerate_sector(60, 1, 0)))


@pytest.mark.parametrize("theta", [0.0, 0.4, math.pi / 2, -2.0, math.pi])
def test_target_state_spin_content(pair, theta):
    b, left, right = pair
    target = build_target_state(left, right, theta, b)
    rho = spin_reduced_dm(target, 30).rho
    assert rho[1, 1].real == pytest.approx(math.sin(theta / 2) ** 2, abs=1e-12)
    assert rho[2, 2].real == pytest.approx(math.cos(theta / 2) ** 2, abs=1e-12)
    assert concurrence(rho) == pytest.approx(abs(math.sin(theta)), abs=1e-6)


def test_reduced_dm_independent_of_creation_order(pair):
    b, left, right = pair
    for spins in ((UP, DOWN), (DOWN, UP)):
        a = product_state([left.with_(spin=spins[0]), right.with_(spin=spins[1])], b)
        c = product_state([right.with_(spin=spins[1]), left.with_(spin=spins[0])], b)
        ra, rc = spin_reduced_dm(a, 30), spin_reduced_dm(c, 30)
        assert np.allclose(ra.rho, rc.rho)
        idx = 1 if spins == (UP, DOWN) else 2
        assert ra.rho[idx, idx].real == pytest.approx(1.0)
        assert ra.separated_probability == pytest.approx(1.0)


def test_singlet_superposition_is_maximally_entangled(pair):
    b, left, right = pair
    ud = product_state([left, right], b)
    du = product_state([left.with_(spin=DOWN), right.with_(spin=UP)], b)
    singlet = ud.with_amplitudes((ud.amplitudes - du.amplitudes) / math.sqrt(2))
    rho = spin_reduced_dm(singlet, 30).rho
    assert concurrence(rho) == pytest.approx(1.0, abs=1e-6)
    assert rho[1, 2].real == pytest.approx(-0.5)


def test_partition_error(pair):
    b, left, _ = pair
    with pytest.warns(PacketWarning):
        same_side = product_state([left, left.with_(center=20, spin=DOWN)], b)
    with pytest.raises(PartitionError):
        spin_reduced_dm(same_side, 30)
    with pytest.raises(ValueError):
        spin_reduced_dm(product_state([left], enumerate_sector(60, 1, 0)), 30)


def test_ring_halves():
    mask = ring_halves(81, 41.0)
    assert mask.sum() == 40 and mask[40] and not mask[41]
    wrapped = ring_halves(10, 2.0)
    assert wrapped.sum() == 5 and wrapped[9] and wrapped[1] and not wrapped[2]


def test_region_labels_wrap():
    labels = region_labels(20, [2.0, 12.0])
    assert labels[19] == 0 and labels[8] == 1 and labels[0] == 0


def test_spin_configuration_probabilities_three_packets():
    b = enumerate_sector(45, 1, 2)
    specs = [WavepacketSpec(7, 0.4, 0.5, DOWN), WavepacketSpec(22, 0.4, 0.5, UP), WavepacketSpec(37, 0.4, 0.5, DOWN)]
    probs, weight = spin_configuration_probabilities(product_state(specs, b), [7, 22, 37])
    assert probs["dud"] == pytest.approx(1.0) and weight == pytest.approx(1.0)
    with pytest.raises(ValueError):
        spin_configuration_probabilities(product_state(specs, b), [7, 22])


def test_all_spin_strings():
    assert all_spin_strings(1, 2) == ["ddu", "dud", "udd"]
