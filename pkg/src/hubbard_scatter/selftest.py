"""Fast invariant checks run by ``hubbard-scatter selftest``."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .basis import ManyBodyState, enumerate_sector, spin_matrix, translation_matrix
from .hamiltonian import build_equivalent_chain, build_hubbard, build_k_subspace_basis, commutator_norm, momentum_grid
from .propagator import evolve
from .spin_smatrix import (
    SpinTrainState,
    cascade,
    equal_spacing_schedule,
    heisenberg_gate,
    pair_smatrix,
    single_vs_train_amplitudes,
)


def check_symmetries() -> float:
    L = 5
    sector = enumerate_sector(L, 2, 2)
    H = build_hubbard(L, 1.0, 3.0, "ring", sector).matrix
    ops = [translation_matrix(sector), spin_matrix(sector, "S2")[0], spin_matrix(sector, "Sz")[0]]
    return max(commutator_norm(H, op) for op in ops)


def check_chain_spectra() -> float:
    L, U = 7, 2.5
    H = build_hubbard(L, 1.0, U, "ring", enumerate_sector(L, 1, 1))
    worst = 0.0
    for K in momentum_grid(L):
        for channel in ("singlet", "triplet"):
            block = build_k_subspace_basis(L, K, channel).project(H)
            chain = build_equivalent_chain(K, 1.0, U, L, channel, geometry="ring-exact").toarray()
            worst = max(worst, float(np.max(np.abs(np.linalg.eigvalsh(block) - np.linalg.eigvalsh(chain)))))
    return worst


def check_propagator() -> float:
    L = 6
    sector = enumerate_sector(L, 2, 1)
    H = build_hubbard(L, 1.0, 1.7, "ring", sector)
    rng = np.random.default_rng(7)
    v = rng.normal(size=sector.dim) + 1j * rng.normal(size=sector.dim)
    psi = ManyBodyState(sector, v).normalize()
    exact = sla.expm(-1j * 3.3 * H.toarray()) @ psi.amplitudes
    return float(np.max(np.abs(evolve(H, psi, 3.3).amplitudes - exact)))


def check_smatrix() -> float:
    thetas = np.linspace(-math.pi, math.pi, 25)
    return max(
        float(np.max(np.abs(pair_smatrix(t) - np.exp(1j * (t - math.pi) / 4) * heisenberg_gate(t - math.pi))))
        for t in thetas
    )


def check_cascade() -> float:
    worst = 0.0
    for N in (1, 3, 6):
        theta = 0.7
        final = cascade(SpinTrainState.product("u", "d" * N), equal_spacing_schedule(1, N), theta)
        slots = ["d" * (j - 1) + "u" + "d" * (N + 1 - j) for j in range(1, N + 2)]
        amps = np.array([final.amplitudes[int(s.replace("u", "0").replace("d", "1"), 2)] for s in slots])
        worst = max(worst, float(np.max(np.abs(amps - single_vs_train_amplitudes(N, theta)))))
    return worst


def check_bethe() -> float:
    from .experiments import bethe_phase_check

    return bethe_phase_check(2.0, length=300, alpha=0.08)["phase_error"]


CHECKS: list[tuple[str, Callable[[], float], float, bool]] = [
    ("symmetry commutators (L=5)", check_symmetries, 1e-12, False),
    ("reduced-chain spectra (L=7)", check_chain_spectra, 1e-10, False),
    ("Chebyshev vs dense expm", check_propagator, 1e-9, False),
    ("S-matrix = phase x Heisenberg gate", check_smatrix, 1e-14, False),
    ("cascade vs closed form", check_cascade, 1e-12, False),
    ("Bethe reflection phase", check_bethe, 1e-2, True),
]


def run_selftest(quick: bool = False, echo: Callable[[str], None] = print) -> bool:
    ok = True
    for name, fn, bound, slow in CHECKS:
        if quick and slow:
            continue
        err = fn()
        passed = err < bound
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name}: {err:.3e} (bound {bound:.0e})")
    return ok
