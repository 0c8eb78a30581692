"""Closed-form two-particle scattering on the relative-coordinate chain."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def fold_angle(x: float) -> float:
    """Map an angle into (-pi, pi]."""
    y = math.pi - math.fmod(math.pi - x, 2 * math.pi)
    if y <= -math.pi:
        y += 2 * math.pi
    elif y > math.pi:
        y -= 2 * math.pi
    return y


def lambda_param(kappa: float, K: float, k: float) -> float:
    return 4.0 * kappa * math.cos(K / 2) * math.sin(k)


def reflection(U: float, lam: float) -> complex:
    """R = (i lam + U) / (i lam - U); unit modulus."""
    if U == 0 and lam == 0:
        raise ValueError("reflection amplitude undefined at U = lambda = 0")
    return (1j * lam + U) / (1j * lam - U)


def phase_shift(U: float, lam: float) -> float:
    """Delta = 2 arctan(-U / lam) on a two-argument branch, folded into (-pi, pi]."""
    if U == 0 and lam == 0:
        raise ValueError("phase shift undefined at U = lambda = 0")
    return fold_angle(2.0 * math.atan2(-U, lam))


def collision_angle(U: float, v_rel: float) -> float:
    """theta = 2 arctan(U / v_rel) folded into (-pi, pi].

    ``v_rel`` is the relative velocity entering the spin S-matrix; see
    :func:`hubbard_scatter.wavepacket.relative_velocity` for how it follows from
    the packet momenta.
    """
    if v_rel == 0:
        raise ValueError("collision angle undefined for zero relative velocity")
    return fold_angle(2.0 * math.atan2(U, v_rel))


def dispersion(kappa: float, K: float, k: float) -> float:
    """Scattering-band energy -4 kappa cos(K/2) cos k."""
    return -4.0 * kappa * math.cos(K / 2) * math.cos(k)


def scattering_state(k: float, R: complex, M: int) -> np.ndarray:
    """Plane-wave amplitudes f(j) = exp(-ikj) + R exp(ikj), j = 0..M-1.

    On the singlet chain this solves every row with r >= 2; the r = 0 amplitude of
    the true eigenvector is (1 + R)/sqrt(2) because of the enhanced first bond.
    """
    if math.sin(k) == 0 or not 0 < k < math.pi:
        raise ValueError(f"k={k} must lie strictly inside (0, pi)")
    j = np.arange(M)
    return np.exp(-1j * k * j) + R * np.exp(1j * k * j)


@dataclass(frozen=True)
class ScatteringParams:
    kappa: float
    U: float
    K: float
    k: float

    @property
    def lam(self) -> float:
        return lambda_param(self.kappa, self.K, self.k)

    @property
    def R(self) -> complex:
        return reflection(self.U, self.lam)

    @property
    def delta(self) -> float:
        return phase_shift(self.U, self.lam)

    @property
    def energy(self) -> float:
        return dispersion(self.kappa, self.K, self.k)

    @property
    def theta(self) -> float:
        """Collision angle of the pair; equal to the reflection phase."""
        return self.delta
