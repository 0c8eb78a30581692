"""Observables linking lattice states to the spin S-matrix picture."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .basis import DOWN, UP, BasisMismatchError, ManyBodyState, SectorBasis
from .wavepacket import WavepacketSpec, product_state

SEPARATION_THRESHOLD = 0.99

_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


class PartitionError(ValueError):
    """The packets are not cleanly separated by the requested cut."""


def fidelity(a: ManyBodyState, b: ManyBodyState) -> float:
    """|<a|b>|, not squared."""
    if not a.basis.same_sector(b.basis):
        raise BasisMismatchError("fidelity between states on different sectors")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes))))


def build_target_state(
    left: WavepacketSpec,
    right: WavepacketSpec,
    theta: float,
    basis: SectorBasis,
) -> ManyBodyState:
    """exp(i theta/2) (-i sin(theta/2) |L up>|R dn> + cos(theta/2) |L dn>|R up>).

    ``left`` and ``right`` fix position, width and momentum of the two packets; their
    spin fields are ignored.
    """
    unchanged = product_state([left.with_(spin=UP), right.with_(spin=DOWN)], basis)
    swapped = product_state([left.with_(spin=DOWN), right.with_(spin=UP)], basis)
    h = theta / 2
    amp = np.exp(1j * h) * (-1j * math.sin(h) * unchanged.amplitudes + math.cos(h) * swapped.amplitudes)
    return ManyBodyState(basis, amp).normalize()


def ring_halves(L: int, cut: float) -> np.ndarray:
    """Boolean mask of the left half: the floor(L/2) sites just below ``cut`` (cyclically)."""
    start = math.ceil(cut) - L // 2
    mask = np.zeros(L, dtype=bool)
    mask[np.arange(start, start + L // 2) % L] = True
    return mask


@dataclass(frozen=True)
class SpinDensity:
    rho: np.ndarray  # 4x4 over (left spin x right spin), basis uu, ud, du, dd
    separated_probability: float


def spin_reduced_dm(psi: ManyBodyState, cut: float, threshold: float = SEPARATION_THRESHOLD) -> SpinDensity:
    """Two-qubit spin state of the packets on either side of ``cut``, positions traced out.

    The state is written as sum psi(x_L s_L, x_R s_R) c+_{x_L s_L} c+_{x_R s_R}|vac>
    with the left particle created first; rho is normalized within the
    one-particle-per-side subspace whose weight is reported alongside.
    """
    b = psi.basis
    if b.n_particles != 2:
        raise ValueError("spin_reduced_dm needs a two-particle sector")
    left = ring_halves(b.L, cut)
    amps = psi.amplitudes / psi.norm()
    # wavefunction blocks indexed [spin_L, spin_R] -> dict (xL, xR) -> amplitude array
    block = np.zeros((2, 2, b.L, b.L), dtype=complex)
    for idx, (ups, downs) in enumerate(b.configs):
        a = amps[idx]
        if a == 0:
            continue
        particles = [(s, UP) for s in ups] + [(s, DOWN) for s in downs]
        (x1, s1), (x2, s2) = particles
        if left[x1] == left[x2]:
            continue
        if left[x1]:
            block[s1, s2, x1, x2] += a
        else:
            # canonical c+_1 c+_2 = -c+_2 c+_1 with particle 2 on the left
            block[s2, s1, x2, x1] -= a
    flat = block.reshape(4, -1)
    rho = flat @ flat.conj().T
    p_sep = float(np.trace(rho).real)
    if p_sep < threshold:
        raise PartitionError(f"one-particle-per-side probability {p_sep:.4f} below {threshold}")
    return SpinDensity(rho / p_sep, p_sep)


def concurrence(rho: np.ndarray, atol: float = 1e-10) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("concurrence needs a 4x4 density matrix")
    if abs(np.trace(rho) - 1) > atol or np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -atol:
        raise ValueError("not a valid density matrix")
    tilde = _YY @ rho.conj() @ _YY
    ev = np.sqrt(np.abs(np.sort(np.linalg.eigvals(rho @ tilde).real)[::-1]))
    return float(max(0.0, ev[0] - ev[1] - ev[2] - ev[3]))


def pure_concurrence(amplitudes: np.ndarray) -> float:
    """Concurrence 2|ad - bc| of a pure two-qubit state (uu, ud, du, dd)."""
    a, b, c, d = np.asarray(amplitudes, dtype=complex)
    return float(2 * abs(a * d - b * c))


def region_labels(L: int, centers) -> np.ndarray:
    """Assign every site to the nearest center on the ring (cuts at midpoints)."""
    centers = np.asarray(centers, dtype=float)
    d = np.abs((np.arange(L)[:, None] - centers[None, :] + L / 2) % L - L / 2)
    return np.argmin(d, axis=1)


def spin_configuration_probabilities(psi: ManyBodyState, centers) -> tuple[dict[str, float], float]:
    """Probability of each spin string over packets ordered as ``centers``.

    Only configurations with exactly one fermion per region contribute; the
    probabilities are renormalized within that subspace, whose weight is returned
    second.  Same-site double counting is impossible because regions are disjoint.
    """
    b = psi.basis
    labels = region_labels(b.L, centers)
    n = len(centers)
    if b.n_particles != n:
        raise ValueError(f"{n} regions for {b.n_particles} particles")
    probs = np.abs(psi.amplitudes) ** 2 / psi.norm() ** 2
    up_regions = labels[b.up.sites] if b.n_up else np.zeros((b.up.dim, 0), dtype=int)
    dn_regions = labels[b.down.sites] if b.n_down else np.zeros((b.down.dim, 0), dtype=int)
    out: dict[str, float] = {}
    total = 0.0
    for iu in range(b.up.dim):
        ur = up_regions[iu]
        if len(set(ur)) != len(ur):
            continue
        row = probs[iu * b.down.dim:(iu + 1) * b.down.dim]
        for idn in np.nonzero(row)[0]:
            regions = list(ur) + list(dn_regions[idn])
            if len(set(regions)) != n:
                continue
            spins = ["u"] * b.n_up + ["d"] * b.n_down
            key = "".join(s for _, s in sorted(zip(regions, spins)))
            out[key] = out.get(key, 0.0) + row[idn]
            total += row[idn]
    return {k: v / total for k, v in sorted(out.items())}, total


def all_spin_strings(n_up: int, n_down: int) -> list[str]:
    return sorted({"".join(p) for p in itertools.permutations("u" * n_up + "d" * n_down)})
