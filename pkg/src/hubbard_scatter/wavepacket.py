"""Gaussian wavepackets on the ring, antisymmetrized products, and momentum decomposition."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import DOWN, UP, ManyBodyState, SectorBasis, translation_matrix
from .bethe import lambda_param, reflection

# Sign of d(energy)/dk for H = -kappa sum (c+_i c_{i+1} + h.c.): a packet
# exp(ikj) drifts toward larger j for 0 < k < pi (checked by the centroid test).
VELOCITY_SIGN = +1.0
TRUNCATION = 6.0  # envelope cut at |j - center| > TRUNCATION / alpha

SPIN_LABELS = {"up": UP, "down": DOWN, "↑": UP, "↓": DOWN, UP: UP, DOWN: DOWN}


class PacketWarning(UserWarning):
    pass


@dataclass(frozen=True)
class WavepacketSpec:
    center: float
    alpha: float
    k: float
    spin: int = UP

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.spin not in SPIN_LABELS:
            raise ValueError(f"unknown spin {self.spin!r}")
        object.__setattr__(self, "spin", SPIN_LABELS[self.spin])

    def with_(self, **changes) -> "WavepacketSpec":
        fields = dict(center=self.center, alpha=self.alpha, k=self.k, spin=self.spin)
        fields.update(changes)
        return WavepacketSpec(**fields)


@dataclass(frozen=True)
class CompositeFrame:
    """Center-of-mass and relative coordinates of two packets a, b."""

    N_c: float
    r_c: float
    k_c: float
    q_c: float

    @classmethod
    def of(cls, a: WavepacketSpec, b: WavepacketSpec) -> "CompositeFrame":
        return cls((a.center + b.center) / 2, b.center - a.center, (a.k + b.k) / 2, b.k - a.k)


def minimal_image(x: np.ndarray, L: int) -> np.ndarray:
    return (x + L / 2) % L - L / 2


def gaussian_wavepacket(spec: WavepacketSpec, L: int) -> np.ndarray:
    """Normalized amplitudes proportional to exp(-alpha^2 d^2) exp(ik(center + d)).

    d is the minimal-image distance from the center, so the envelope and phase stay
    smooth across the ring seam.
    """
    if spec.alpha * L < TRUNCATION:
        warnings.warn(
            f"packet support {TRUNCATION}/alpha exceeds the ring (alpha*L={spec.alpha * L:.2f})",
            PacketWarning,
            stacklevel=2,
        )
    d = minimal_image(np.arange(L) - spec.center, L)
    amp = np.exp(-(spec.alpha * d) ** 2) * np.exp(1j * spec.k * (spec.center + d))
    amp[np.abs(d) > TRUNCATION / spec.alpha] = 0
    return amp / np.linalg.norm(amp)


def group_velocity(k: float, kappa: float = 1.0) -> float:
    return VELOCITY_SIGN * 2.0 * kappa * math.sin(k)


def relative_velocity(k_left: float, k_right: float, kappa: float = 1.0) -> float:
    """v_R - v_L for a left/right packet pair; the argument of ``collision_angle``.

    Negative for packets approaching each other.
    """
    return group_velocity(k_right, kappa) - group_velocity(k_left, kappa)


def pair_reflection(U: float, k_left: float, k_right: float, kappa: float = 1.0) -> complex:
    """Reflection amplitude of the dominant momentum subspace of a colliding pair.

    Evaluated at total momentum k_left + k_right and relative momentum
    (k_left - k_right)/2, where lambda equals the closing speed v_L - v_R.
    """
    lam = lambda_param(kappa, k_left + k_right, (k_left - k_right) / 2)
    return reflection(U, lam)


def _check_separation(specs) -> None:
    for i, a in enumerate(specs):
        for b in specs[i + 1:]:
            gap = abs(a.center - b.center)
            if gap * min(a.alpha, b.alpha) < 2.0:
                warnings.warn(
                    f"packets at {a.center} and {b.center} overlap (gap*alpha < 2)", PacketWarning, stacklevel=3
                )


def slater_state(orbitals: list[tuple[np.ndarray, int]], basis: SectorBasis) -> ManyBodyState:
    """c+(phi_1) c+(phi_2) ... |vac> for single-particle orbitals of definite spin.

    ``orbitals`` is a list of ``(site amplitudes, spin)`` in creation order.  The
    result is not normalized.
    """
    spins = [s for _, s in orbitals]
    if spins.count(UP) != basis.n_up or spins.count(DOWN) != basis.n_down:
        raise ValueError("orbital spins do not match the sector particle numbers")
    # stable sort to up-first order; its parity is the reordering sign
    order = sorted(range(len(spins)), key=lambda i: spins[i])
    inversions = sum(1 for a in range(len(order)) for b in range(a + 1, len(order)) if order[a] > order[b])
    sign = -1.0 if inversions % 2 else 1.0
    ups = [orbitals[i][0] for i in order if spins[i] == UP]
    downs = [orbitals[i][0] for i in order if spins[i] == DOWN]

    def det_block(orbs, space):
        if not orbs:
            return np.ones(space.dim, dtype=complex)
        phi = np.array(orbs)  # (n, L)
        mats = phi[:, space.sites]  # (n, dim, n): orbital a at occupied site b
        mats = np.transpose(mats, (1, 0, 2))
        return np.linalg.det(mats)

    amp = sign * np.kron(det_block(ups, basis.up), det_block(downs, basis.down))
    return ManyBodyState(basis, amp)


def product_state(specs, basis: SectorBasis) -> ManyBodyState:
    """Normalized antisymmetrized product of Gaussian packets, created in the given order."""
    specs = list(specs)
    _check_separation(specs)
    orbitals = [(gaussian_wavepacket(s, basis.L), s.spin) for s in specs]
    return slater_state(orbitals, basis).normalize()


def k_decompose(psi: ManyBodyState) -> tuple[np.ndarray, np.ndarray]:
    """Weights of psi in each total-momentum subspace.

    Returns ``(K, w)`` with K on the 2 pi n / L grid folded into (-pi, pi] and
    w(K) = |P_K psi|^2, where T1 acts on the K subspace as exp(-iK).
    """
    L = psi.basis.L
    T = translation_matrix(psi.basis)
    shifted = np.empty((L, psi.basis.dim), dtype=complex)
    v = psi.amplitudes
    for m in range(L):
        shifted[m] = v
        v = T @ v
    # P_n psi = (1/L) sum_m exp(i 2 pi n m / L) T^m psi
    proj = np.fft.ifft(shifted, axis=0)
    w = np.sum(np.abs(proj) ** 2, axis=1) / np.vdot(psi.amplitudes, psi.amplitudes).real
    n = np.arange(L)
    K = 2 * np.pi * np.where(n > L // 2, n - L, n) / L
    order = np.argsort(K)
    return K[order], w[order]


def analytic_post_collision(
    specs: tuple[WavepacketSpec, WavepacketSpec],
    R: complex,
    final_centers: tuple[float, float],
    basis: SectorBasis,
) -> ManyBodyState:
    """Predicted two-packet state long after an up(a) / down(b) collision.

    Left packet at ``final_centers[0]`` carries momentum k_b, right packet at
    ``final_centers[1]`` carries k_a; spin amplitude (1 - R) on left-up/right-down and
    (1 + R) on left-down/right-up.  Global phase dropped.
    """
    a, b = specs
    na, nb = final_centers
    left = a.with_(center=na, k=b.k)
    right = b.with_(center=nb, k=a.k)
    unchanged = product_state([left.with_(spin=UP), right.with_(spin=DOWN)], basis)
    swapped = product_state([left.with_(spin=DOWN), right.with_(spin=UP)], basis)
    amp = (1 - R) * unchanged.amplitudes + (1 + R) * swapped.amplitudes
    return ManyBodyState(basis, amp).normalize()
