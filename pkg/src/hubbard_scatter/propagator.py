"""Chebyshev propagation psi(t) = exp(-iHt) psi for sparse Hermitian operators.

Spectral bounds come from Gershgorin discs, widened by a 5% margin.  The
expansion uses Bessel coefficients J_n(a dt) and is truncated once the
coefficients fall below a fraction of the error budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.special import jv

from .basis import ManyBodyState
from .hamiltonian import SparseOperator

DEFAULT_TOL = 1e-10
SPECTRAL_MARGIN = 0.05
# a*dt per Chebyshev step; keeps the expansion order moderate
MAX_STEP_PHASE = 40.0


class NumericContractError(RuntimeError):
    """A conservation or accuracy contract was violated."""


@dataclass(frozen=True)
class SpectralBounds:
    lo: float
    hi: float

    @property
    def center(self) -> float:
        return 0.5 * (self.hi + self.lo)

    @property
    def half_width(self) -> float:
        return max(0.5 * (self.hi - self.lo), 1e-12)


def spectral_bounds(h: sp.csr_matrix, margin: float = SPECTRAL_MARGIN) -> SpectralBounds:
    diag = h.diagonal().real
    radius = np.asarray(abs(h).sum(axis=1)).ravel() - np.abs(diag)
    lo = float(np.min(diag - radius))
    hi = float(np.max(diag + radius))
    pad = margin * max(hi - lo, 1e-12) / 2
    return SpectralBounds(lo - pad, hi + pad)


def _coefficients(x: float, tol: float) -> np.ndarray:
    ax = abs(x)
    n_max = int(ax + 20 + 8 * ax ** (1 / 3)) + 10
    c = jv(np.arange(n_max + 1), x)
    cutoff = tol * 1e-3
    tail = np.nonzero(np.abs(c) > cutoff)[0]
    last = int(tail[-1]) + 2 if tail.size else 1
    return c[: min(last, n_max) + 1]


def _cheb_step(h: sp.csr_matrix, v: np.ndarray, dt: float, bounds: SpectralBounds, tol: float) -> np.ndarray:
    a, b = bounds.half_width, bounds.center
    coeffs = _coefficients(a * dt, tol)

    def scaled(x: np.ndarray) -> np.ndarray:
        return (h @ x - b * x) / a

    t_prev = v
    out = coeffs[0] * v
    if len(coeffs) > 1:
        t_cur = scaled(v)
        out = out + 2 * (-1j) * coeffs[1] * t_cur
        phase = -1j
        for n in range(2, len(coeffs)):
            t_next = 2 * scaled(t_cur) - t_prev
            t_prev, t_cur = t_cur, t_next
            phase *= -1j
            out = out + 2 * phase * coeffs[n] * t_cur
    return np.exp(-1j * b * dt) * out


def _check_operator(H: SparseOperator, psi: ManyBodyState) -> None:
    if not H.hermitian:
        raise ValueError("evolve requires a Hermitian operator")
    if H.dim != psi.basis.dim:
        raise ValueError(f"operator dim {H.dim} does not match state dim {psi.basis.dim}")


def _propagate(h, vec, t, bounds, tol):
    if t == 0:
        return vec.copy()
    steps = max(1, math.ceil(bounds.half_width * abs(t) / MAX_STEP_PHASE))
    dt = t / steps
    for _ in range(steps):
        vec = _cheb_step(h, vec, dt, bounds, tol / steps)
    return vec


def evolve_vector(H: SparseOperator, vec: np.ndarray, t: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """exp(-iHt) applied to a bare amplitude vector (e.g. on a relative-coordinate chain)."""
    if tol < 1e-14:
        raise ValueError(f"tol={tol} is below attainable double precision accuracy")
    if not H.hermitian:
        raise ValueError("evolve requires a Hermitian operator")
    vec = np.asarray(vec, dtype=complex)
    if vec.shape != (H.dim,):
        raise ValueError(f"operator dim {H.dim} does not match vector shape {vec.shape}")
    return _propagate(H.matrix, vec, float(t), spectral_bounds(H.matrix), tol)


def evolve(H: SparseOperator, psi: ManyBodyState, t: float, tol: float = DEFAULT_TOL) -> ManyBodyState:
    """exp(-iHt) psi with error below ``tol`` (time in units of 1/kappa)."""
    _check_operator(H, psi)
    vec = evolve_vector(H, psi.amplitudes, t, tol)
    out = psi.with_amplitudes(vec)
    drift = abs(out.norm() - psi.norm())
    if drift > max(tol, 1e-12) * max(1.0, abs(t)):
        raise NumericContractError(f"norm drift {drift:.3e} exceeds budget at t={t}")
    return out


def evolve_series(
    H: SparseOperator,
    psi: ManyBodyState,
    times,
    observables: Mapping[str, Callable[[ManyBodyState], float]] | None = None,
    tol: float = DEFAULT_TOL,
    keep_states: bool = False,
) -> dict:
    """Evaluate observables along a non-decreasing time grid, starting from psi at t = 0.

    Returns ``{"t": array, name: array, ...}``; with ``keep_states`` the evolved
    states are included under ``"states"``.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("time grid must be a non-empty 1-d sequence")
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("time grid must be non-negative and non-decreasing")
    _check_operator(H, psi)
    observables = dict(observables or {})
    bounds = spectral_bounds(H.matrix)
    table: dict = {"t": times}
    cols: dict[str, list] = {name: [] for name in observables}
    states = []
    vec, now = psi.amplitudes, 0.0
    norm0 = psi.norm()
    for t in times:
        vec = _propagate(H.matrix, vec, t - now, bounds, tol)
        now = t
        state = psi.with_amplitudes(vec)
        if abs(state.norm() - norm0) > max(tol, 1e-12) * max(1.0, t):
            raise NumericContractError(f"norm drift {abs(state.norm() - norm0):.3e} at t={t}")
        for name, fn in observables.items():
            cols[name].append(fn(state))
        if keep_states:
            states.append(state)
    for name, vals in cols.items():
        table[name] = np.asarray(vals)
    if keep_states:
        table["states"] = states
    return table
