"""Lattice experiments shared by the CLI and the acceptance suite."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import DOWN, UP, enumerate_sector
from .bethe import collision_angle, lambda_param, phase_shift, reflection
from .hamiltonian import SparseOperator, build_equivalent_chain, build_hardcore_hubbard, build_hubbard
from .metrics import (
    build_target_state,
    concurrence,
    fidelity,
    spin_configuration_probabilities,
    spin_reduced_dm,
)
from .propagator import DEFAULT_TOL, evolve, evolve_series, evolve_vector
from .spin_smatrix import SpinTrainState, cascade, collision_schedule
from .wavepacket import (
    PacketWarning,
    WavepacketSpec,
    analytic_post_collision,
    group_velocity,
    pair_reflection,
    product_state,
    relative_velocity,
)

# |U| at or above this (in units of kappa) is evolved in the hard-core limit
HARDCORE_THRESHOLD = 1e6


def hubbard_operator(L: int, kappa: float, U: float, sector) -> SparseOperator:
    if abs(U) >= HARDCORE_THRESHOLD * abs(kappa):
        return build_hardcore_hubbard(L, kappa, "ring", sector)
    return build_hubbard(L, kappa, U, "ring", sector)


@dataclass(frozen=True)
class PairSetup:
    """Two packets, up on the left and down on the right, on an L-site ring."""

    L: int
    kappa: float
    left: WavepacketSpec
    right: WavepacketSpec

    @classmethod
    def fig2(cls, alpha: float, L: int = 81, kappa: float = 1.0) -> "PairSetup":
        return cls(L, kappa, WavepacketSpec(20, alpha, math.pi / 2, UP), WavepacketSpec(62, alpha, -math.pi / 2, DOWN))

    @property
    def v_rel(self) -> float:
        return relative_velocity(self.left.k, self.right.k, self.kappa)

    @property
    def closing_speed(self) -> float:
        return -self.v_rel

    @property
    def return_time(self) -> float:
        """Time until the reflected packets are back at the starting centers."""
        gap = self.right.center - self.left.center
        return 2 * gap / self.closing_speed

    @property
    def cut(self) -> float:
        return (self.left.center + self.right.center) / 2

    def sector(self):
        return enumerate_sector(self.L, 1, 1)

    def initial_state(self, sector):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PacketWarning)
            return product_state([self.left, self.right], sector)

    def target(self, theta: float, sector):
        """Packets back at the starting centers with exchanged momenta."""
        left = self.left.with_(k=self.right.k)
        right = self.right.with_(k=self.left.k)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PacketWarning)
            return build_target_state(left, right, theta, sector)

    def post_collision(self, U: float, sector):
        R = -1.0 if abs(U) >= HARDCORE_THRESHOLD * abs(self.kappa) else pair_reflection(U, self.left.k, self.right.k, self.kappa)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PacketWarning)
            return analytic_post_collision((self.left, self.right), R, (self.left.center, self.right.center), sector)


def fidelity_curve(setup: PairSetup, U: float, times, tol: float = DEFAULT_TOL) -> dict:
    """|<Psi_T|Psi(t)>| with Psi_T built from the collision angle of (U, v_rel)."""
    sector = setup.sector()
    H = hubbard_operator(setup.L, setup.kappa, U, sector)
    psi = setup.initial_state(sector)
    theta = collision_angle(U, setup.v_rel)
    target = setup.target(theta, sector)
    table = evolve_series(
        H,
        psi,
        times,
        {
            "fidelity": lambda s: fidelity(target, s),
            "norm": lambda s: s.norm(),
            "energy": H.expectation,
        },
        tol=tol,
    )
    table["theta"] = theta
    return table


def collision_summary(setup: PairSetup, U: float, t_final: float | None = None, tol: float = DEFAULT_TOL) -> dict:
    """Spin content of the pair after one collision, evolved to ``t_final`` (default: return time)."""
    sector = setup.sector()
    H = hubbard_operator(setup.L, setup.kappa, U, sector)
    t_final = setup.return_time if t_final is None else t_final
    out = evolve(H, setup.initial_state(sector), t_final, tol)
    sd = spin_reduced_dm(out, setup.cut)
    rho = sd.rho
    hardcore = abs(U) >= HARDCORE_THRESHOLD * abs(setup.kappa)
    theta = math.copysign(math.pi, U) if hardcore else collision_angle(U, setup.v_rel)
    return {
        "U": U,
        "U_over_vr": U / setup.closing_speed,
        "theta": theta,
        "p_unchanged": float(rho[1, 1].real),
        "p_swapped": float(rho[2, 2].real),
        "concurrence": concurrence(rho),
        "concurrence_analytic": abs(math.sin(theta)),
        "p_swapped_analytic": math.cos(theta / 2) ** 2,
        "fidelity_post_collision": fidelity(setup.post_collision(U, sector), out),
        "separated_probability": sd.separated_probability,
        "norm": out.norm(),
        "hardcore": hardcore,
    }


def bethe_phase_check(
    U: float,
    k: float = math.pi / 3,
    K: float = 0.0,
    alpha: float = 0.05,
    length: int = 600,
    kappa: float = 1.0,
    tol: float = DEFAULT_TOL,
) -> dict:
    """Scatter a Gaussian packet off the end of the singlet chain and read off R.

    The same packet is also reflected off the triplet chain (a hard wall, R = -1).
    The ratio of the two outgoing packets' Fourier components at k gives -R(k)
    for the singlet chain.
    """
    r0 = length / 2
    r = np.arange(length + 1)
    # incoming wave exp(-ikr) travels toward r = 0
    packet = np.exp(-((alpha * (r - r0)) ** 2)) * np.exp(-1j * k * r)
    packet /= np.linalg.norm(packet)
    speed = abs(4 * kappa * math.cos(K / 2) * math.sin(k))
    t_final = 2 * r0 / speed
    singlet = build_equivalent_chain(K, kappa, U, length + 1, "singlet")  # r = 0..length
    triplet = build_equivalent_chain(K, kappa, U, length, "triplet")  # r = 1..length
    out_s = evolve_vector(singlet, packet, t_final, tol)
    out_t = evolve_vector(triplet, packet[1:], t_final, tol)
    # reflected wave exp(+ikr)
    probe = np.exp(1j * k * r)
    amp_s = np.vdot(probe, out_s)
    amp_t = np.vdot(probe[1:], out_t)
    R_num = -amp_s / amp_t
    lam = lambda_param(kappa, K, k)
    R_exact = reflection(U, lam)
    delta = phase_shift(U, lam)
    err = abs(math.remainder(np.angle(R_num) - delta, 2 * math.pi))
    return {
        "U": U,
        "lambda": lam,
        "delta_analytic": delta,
        "delta_numeric": float(np.angle(R_num)),
        "phase_error": err,
        "abs_R_numeric": float(abs(R_num)),
        "R_exact_re": R_exact.real,
        "R_exact_im": R_exact.imag,
        "t_final": t_final,
    }


@dataclass(frozen=True)
class TrainSetup:
    """A single up fermion (left) meeting a train of N down fermions (right) on a ring."""

    L: int
    kappa: float
    alpha: float
    left_center: float
    right_centers: tuple[float, ...]
    k: float = math.pi / 2

    @classmethod
    def one_vs_two(cls, alpha: float = 0.1) -> "TrainSetup":
        return cls(60, 1.0, alpha, 10.0, (30.0, 50.0))

    @property
    def N(self) -> int:
        return len(self.right_centers)

    @property
    def closing_speed(self) -> float:
        return group_velocity(self.k, self.kappa) - group_velocity(-self.k, self.kappa)

    def specs(self):
        left = WavepacketSpec(self.left_center, self.alpha, self.k, UP)
        rights = [WavepacketSpec(c, self.alpha, -self.k, DOWN) for c in self.right_centers]
        return [left] + rights

    def final_centers(self, t: float) -> list[float]:
        """Packet centers at time t in spatial order (reflecting picture, unwrapped)."""
        v = group_velocity(self.k, self.kappa)
        outgoing_left = [c - v * t for c in self.right_centers]
        outgoing_right = [self.left_center + v * t]
        return [x % self.L for x in outgoing_left + outgoing_right]


def train_collision_check(setup: TrainSetup, theta: float, t_final: float | None = None, tol: float = DEFAULT_TOL) -> dict:
    """Spin-configuration probabilities after 1-vs-N collisions: lattice vs cascade."""
    U = setup.closing_speed * math.tan(theta / 2)
    sector = enumerate_sector(setup.L, 1, setup.N)
    H = build_hubbard(setup.L, setup.kappa, U, "ring", sector)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PacketWarning)
        psi = product_state(setup.specs(), sector)
    if t_final is None:
        last_meeting = (max(setup.right_centers) - setup.left_center) / setup.closing_speed
        first_gap = min(setup.right_centers) - setup.left_center
        t_final = last_meeting + first_gap / setup.closing_speed
    out = evolve(H, psi, t_final, tol)
    lattice, weight = spin_configuration_probabilities(out, setup.final_centers(t_final))
    schedule = collision_schedule([setup.left_center], group_velocity(setup.k), list(setup.right_centers), group_velocity(-setup.k))
    # S-matrix angle with v_rel = v_R - v_L; probabilities depend on |theta| only
    predicted = cascade(SpinTrainState.product("u", "d" * setup.N), schedule, theta).probabilities()
    keys = sorted(set(lattice) | set(predicted))
    return {
        "U": U,
        "t_final": t_final,
        "separated_probability": weight,
        "lattice": {k: lattice.get(k, 0.0) for k in keys},
        "cascade": {k: predicted.get(k, 0.0) for k in keys},
        "max_abs_diff": max(abs(lattice.get(k, 0.0) - predicted.get(k, 0.0)) for k in keys),
    }
