"""Spin part of packet collisions: the pair S-matrix, its Heisenberg-gate form,
collision schedules for two trains of packets, and the closed forms for a single
fermion crossing an N-fermion train.

Spin vectors are indexed by strings of 0 (up) / 1 (down), most significant bit
first, so the two-spin basis is (uu, ud, du, dd).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

_SX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
_SZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2
SPIN_DOT = sum(np.kron(s, s) for s in (_SX, _SY, _SZ))  # s_L . s_R
_SINGLET = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
SINGLET_PROJECTOR = np.outer(_SINGLET, _SINGLET.conj())


class ScheduleError(ValueError):
    pass


def pair_smatrix(theta: float) -> np.ndarray:
    """exp[-i(theta - pi)(s_L.s_R - 1/4)] = 1 + (exp(i(theta - pi)) - 1) P_singlet."""
    return np.eye(4, dtype=complex) + (np.exp(1j * (theta - math.pi)) - 1) * SINGLET_PROJECTOR


def heisenberg_gate(t: float) -> np.ndarray:
    """exp(-i s_L.s_R t) from the spectral decomposition of s_L.s_R."""
    vals, vecs = np.linalg.eigh(SPIN_DOT)
    return (vecs * np.exp(-1j * vals * t)) @ vecs.conj().T


def gate_time(U: float, v_closing: float) -> float:
    """Heisenberg evolution time 2 arccot(U / v_closing) in (0, 2 pi).

    ``v_closing`` is v_L - v_R, i.e. ``-relative_velocity``; with
    theta = collision_angle(U, -v_closing) the S-matrix equals
    exp(i t/4) heisenberg_gate(t) and t = theta - pi mod 2 pi.
    """
    if U == 0 and v_closing == 0:
        raise ValueError("gate time undefined for U = v = 0")
    if v_closing == 0:
        return 0.0 if U > 0 else 2 * math.pi
    x = U / v_closing
    # principal arccot in (0, pi)
    return 2 * (math.pi / 2 - math.atan(x))


@dataclass(frozen=True)
class Collision:
    left: int  # 1-based index into the left train
    right: int  # 1-based index into the right train
    time: float
    theta: float | None = None


@dataclass(frozen=True)
class CollisionSchedule:
    M: int
    N: int
    collisions: tuple[Collision, ...]

    def pairs(self) -> list[tuple[int, int]]:
        return [(c.left, c.right) for c in self.collisions]


def collision_schedule(
    left_positions,
    v_left: float,
    right_positions,
    v_right: float,
    atol: float = 1e-9,
) -> CollisionSchedule:
    """Meeting times of every left/right pair under straight-line motion.

    Trains are indexed left to right: ``left_positions[0]`` is the far end of the
    left train, ``right_positions[0]`` the near end of the right train.  Ties between
    disjoint pairs are ordered index-lexicographically; ties sharing a particle
    (three-body coincidences) are rejected.
    """
    left = [float(x) for x in left_positions]
    right = [float(x) for x in right_positions]
    closing = v_left - v_right
    if closing <= 0:
        raise ScheduleError("trains must approach each other (v_left > v_right)")
    if len(set(left)) != len(left) or len(set(right)) != len(right):
        raise ScheduleError("coincident starting positions within a train")
    if max(left) >= min(right):
        raise ScheduleError("left train must start entirely left of the right train")
    events = []
    for l, xl in enumerate(left, start=1):
        for n, xr in enumerate(right, start=1):
            events.append(Collision(l, n, (xr - xl) / closing))
    events.sort(key=lambda c: (round(c.time / atol), c.left, c.right))
    for a, b in itertools.combinations(events, 2):
        if abs(a.time - b.time) <= atol and (a.left == b.left or a.right == b.right):
            raise ScheduleError(
                f"three-body coincidence at t={a.time:.6g}: pairs {(a.left, a.right)} and {(b.left, b.right)}"
            )
    return CollisionSchedule(len(left), len(right), tuple(events))


def equal_spacing_schedule(M: int, N: int, spacing: float = 1.0, gap: float = 1.0, speed: float = 1.0) -> CollisionSchedule:
    """Schedule for equally spaced trains moving toward each other at equal speed."""
    left = [-(gap / 2) - spacing * (M - 1 - i) for i in range(M)]
    right = [gap / 2 + spacing * n for n in range(N)]
    return collision_schedule(left, speed, right, -speed)


@dataclass
class SpinTrainState:
    """Spin amplitudes of M + N packets listed in spatial order, left to right.

    Before the collisions the first M packets carry momentum p (moving right) and
    the last N carry q; afterwards the first N carry q and the last M carry p.
    """

    M: int
    N: int
    amplitudes: np.ndarray
    collided: bool = False
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** (self.M + self.N),):
            raise ValueError(f"need 2**{self.M + self.N} amplitudes, got {self.amplitudes.shape}")
        if not self.labels:
            self.labels = self.momentum_labels()

    @property
    def n_spins(self) -> int:
        return self.M + self.N

    def momentum_labels(self) -> tuple[str, ...]:
        if self.collided:
            return ("q",) * self.N + ("p",) * self.M
        return ("p",) * self.M + ("q",) * self.N

    @classmethod
    def product(cls, left_spins: str, right_spins: str) -> "SpinTrainState":
        """Basis state from strings like ``"uu"`` / ``"dd"`` (u = up, d = down)."""
        spins = left_spins + right_spins
        if set(spins) - {"u", "d"}:
            raise ValueError("spins must be written with 'u' and 'd'")
        amps = np.zeros(2 ** len(spins), dtype=complex)
        amps[int(spins.replace("u", "0").replace("d", "1"), 2)] = 1
        return cls(len(left_spins), len(right_spins), amps)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_spins)

    def probabilities(self) -> dict[str, float]:
        out = {}
        for idx, a in enumerate(self.amplitudes):
            p = abs(a) ** 2
            if p > 0:
                out[spin_string(idx, self.n_spins)] = p
        return out

    def total_sz(self) -> float:
        n_down = np.array([bin(i).count("1") for i in range(self.amplitudes.size)])
        return float(np.sum(np.abs(self.amplitudes) ** 2 * (self.n_spins / 2 - n_down)))

    def reduced_density(self, slot: int) -> np.ndarray:
        """2x2 density matrix of one packet's spin (slot is 0-based, spatial order)."""
        psi = np.moveaxis(self.tensor(), slot, 0).reshape(2, -1)
        return psi @ psi.conj().T


def spin_string(index: int, n: int) -> str:
    return format(index, f"0{n}b").replace("0", "u").replace("1", "d")


def _apply_pair(amps: np.ndarray, n: int, i: int, gate: np.ndarray) -> np.ndarray:
    """Apply a 4x4 gate to neighbouring spins (i, i+1)."""
    psi = amps.reshape((2,) * n)
    psi = np.moveaxis(psi, (i, i + 1), (0, 1)).reshape(4, -1)
    psi = (gate @ psi).reshape((2, 2) + (2,) * (n - 2))
    psi = np.moveaxis(psi, (0, 1), (i, i + 1))
    return psi.reshape(-1)


def cascade(initial: SpinTrainState, schedule: CollisionSchedule, theta: float) -> SpinTrainState:
    """Apply the pair S-matrix for every scheduled collision, in schedule order.

    Packets reflect off each other in the spatial picture, so a collision always
    involves two packets that are neighbours in space; the pair S-matrix acts on
    those two slots.  A per-collision ``theta`` on the schedule overrides the
    global one.
    """
    if initial.collided:
        raise ScheduleError("state has already been through the collisions")
    if (schedule.M, schedule.N) != (initial.M, initial.N):
        raise ScheduleError(f"schedule is for M={schedule.M}, N={schedule.N}; state has M={initial.M}, N={initial.N}")
    order = [("L", l) for l in range(1, initial.M + 1)] + [("R", n) for n in range(1, initial.N + 1)]
    amps = initial.amplitudes.copy()
    n = initial.n_spins
    for c in schedule.collisions:
        try:
            i = order.index(("L", c.left))
            j = order.index(("R", c.right))
        except ValueError:
            raise ScheduleError(f"collision {(c.left, c.right)} refers to a missing particle") from None
        if j != i + 1:
            raise ScheduleError(f"collision {(c.left, c.right)} between non-neighbouring packets")
        amps = _apply_pair(amps, n, i, pair_smatrix(theta if c.theta is None else c.theta))
        order[i], order[j] = order[j], order[i]
    if any(tag != "R" for tag, _ in order[: initial.N]):
        raise ScheduleError("schedule leaves some pairs uncollided")
    return SpinTrainState(initial.M, initial.N, amps, collided=True)


def single_vs_train_amplitudes(N: int, theta: float) -> np.ndarray:
    """Final amplitudes for an up spin crossing N down spins.

    Entry j-1 (j = 1..N) is the amplitude for the up spin ending in packet j of the
    outgoing left train; entry N is the amplitude for it staying with the single
    fermion.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    half = theta / 2
    j = np.arange(1, N + 1)
    flips = -1j * np.exp(1j * half * j) * math.sin(half) * math.cos(half) ** (j - 1)
    stay = np.exp(1j * half * N) * math.cos(half) ** N
    return np.append(flips, stay)


def lambda_population(N: int, theta: float) -> float:
    return math.cos(theta / 2) ** (2 * N)


def reduced_single_spin(N: int, theta: float) -> np.ndarray:
    """diag(Lambda, 1 - Lambda) for the single fermion after crossing N spins."""
    if N < 1:
        raise ValueError("N must be >= 1")
    lam = lambda_population(N, theta)
    return np.diag([lam, 1 - lam]).astype(complex)


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho)
    tr = np.trace(rho)
    if abs(tr - 1) > 1e-10:
        raise ValueError(f"density matrix has trace {tr}")
    return float(np.real(np.trace(rho @ rho)))


def purity_from_lambda(lam: float) -> float:
    return 2 * (lam - 0.5) ** 2 + 0.5


def resonance_theta(N: int) -> float:
    """Collision angle that leaves the single fermion maximally mixed after N collisions."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return 2 * math.acos(2 ** (-1 / (2 * N)))


@dataclass(frozen=True)
class ResonantInteraction:
    exact: float
    large_n: float


def resonance_interaction(N: int, v_rel: float) -> ResonantInteraction:
    """U = v_rel tan[arccos(2^(-1/2N))] together with the large-N form v_rel sqrt(ln 2 / N)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if v_rel == 0:
        raise ValueError("v_rel must be nonzero")
    exact = v_rel * math.tan(math.acos(2 ** (-1 / (2 * N))))
    return ResonantInteraction(exact, v_rel * math.sqrt(math.log(2) / N))

