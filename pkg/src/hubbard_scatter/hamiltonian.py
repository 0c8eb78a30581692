"""Hubbard Hamiltonian in a particle-number sector, two-particle momentum bases,
and the equivalent single-particle chains in the relative coordinate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .basis import (
    DOWN,
    UP,
    ManyBodyState,
    SectorBasis,
    apply_spin_op,
    enumerate_sector,
    state_from_terms,
)

HERMITIAN_ATOL = 1e-14


@dataclass(frozen=True)
class SparseOperator:
    """Read-only compressed-row matrix with sorted columns and no duplicate entries."""

    matrix: sp.csr_matrix
    hermitian: bool = True

    def __post_init__(self) -> None:
        m = sp.csr_matrix(self.matrix, dtype=complex)
        m.sum_duplicates()
        m.sort_indices()
        m.eliminate_zeros()
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got {m.shape}")
        if self.hermitian:
            diff = abs(m - m.conj().T)
            if diff.nnz and diff.max() > HERMITIAN_ATOL:
                raise ValueError(f"operator flagged Hermitian deviates by {diff.max():.3e}")
        m.data.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        if isinstance(other, ManyBodyState):
            return other.with_amplitudes(self.matrix @ other.amplitudes)
        return self.matrix @ other

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def expectation(self, psi: ManyBodyState) -> float:
        return float(np.vdot(psi.amplitudes, self.matrix @ psi.amplitudes).real)

    def dump(self, path: str | Path) -> None:
        """Write ``row col re im`` triplets, one nonzero per line (debugging aid)."""
        coo = self.matrix.tocoo()
        with open(path, "w", encoding="utf-8") as fh:
            for r, c, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{r} {c} {float(v.real)!r} {float(v.imag)!r}\n")


def _bonds(L: int, boundary: str) -> list[tuple[int, int]]:
    if boundary == "ring":
        return [(i, (i + 1) % L) for i in range(L)] if L > 1 else []
    if boundary == "open":
        return [(i, i + 1) for i in range(L - 1)]
    raise ValueError(f"boundary must be 'ring' or 'open', got {boundary!r}")


def _hopping_matrix(sector: SectorBasis, boundary: str) -> sp.csr_matrix:
    bonds = _bonds(sector.L, boundary)
    h_up = sector.up.hopping(bonds)
    h_dn = sector.down.hopping(bonds)
    eye_up = sp.identity(sector.up.dim, format="csr")
    eye_dn = sp.identity(sector.down.dim, format="csr")
    return (sp.kron(h_up, eye_dn) + sp.kron(eye_up, h_dn)).tocsr()


def build_hubbard(L: int, kappa: float, U: float, boundary: str, sector: SectorBasis) -> SparseOperator:
    """H = -kappa sum_<ij>,s (c+_is c_js + h.c.) + U sum_i n_i,up n_i,dn."""
    if not (math.isfinite(kappa) and math.isfinite(U)):
        raise ValueError(f"kappa and U must be finite, got kappa={kappa}, U={U}")
    if sector.L != L:
        raise ValueError(f"sector lives on {sector.L} sites, Hamiltonian on {L}")
    h = -kappa * _hopping_matrix(sector, boundary)
    h = h + sp.diags(U * sector.double_occupancy.astype(float))
    return SparseOperator(h.tocsr())


def build_hardcore_hubbard(L: int, kappa: float, boundary: str, sector: SectorBasis) -> SparseOperator:
    """The U -> infinity limit P H P, with P projecting out doubly occupied sites.

    Doublon configurations stay in the basis but are decoupled with zero energy,
    so states built on ``sector`` can be evolved directly.
    """
    if not math.isfinite(kappa):
        raise ValueError(f"kappa must be finite, got {kappa}")
    keep = (sector.double_occupancy == 0).astype(float)
    proj = sp.diags(keep)
    h = proj @ (-kappa * _hopping_matrix(sector, boundary)) @ proj
    return SparseOperator(h.tocsr())


def commutator_norm(a: sp.spmatrix, b: sp.spmatrix) -> float:
    """Largest entry magnitude of [a, b] (both square on the same space)."""
    c = (a @ b - b @ a).tocsr()
    c.eliminate_zeros()
    return float(abs(c).max()) if c.nnz else 0.0


# --- two-particle momentum bases -------------------------------------------------


def momentum_index(K: float, L: int) -> int:
    """Integer n with K = 2 pi n / L; raises if K is off the grid."""
    n = K * L / (2 * math.pi)
    if abs(n - round(n)) > 1e-9:
        raise ValueError(f"K={K} is not on the 2*pi*n/{L} grid")
    return int(round(n))


def momentum_grid(L: int) -> np.ndarray:
    """Allowed total momenta folded into (-pi, pi]."""
    n = np.arange(L)
    n = np.where(n > L // 2, n - L, n)
    return np.sort(2 * np.pi * n / L)


@dataclass(frozen=True)
class ReducedBasis:
    """Orthonormal T1 eigenvectors |phi_r(K)> indexed by relative distance r."""

    K: float
    channel: str  # "singlet" or "triplet"
    sz: int
    r_values: tuple[int, ...]
    vectors: tuple[ManyBodyState, ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def sector(self) -> SectorBasis:
        return self.vectors[0].basis

    def matrix(self) -> np.ndarray:
        """Columns are the basis vectors, shape (sector dim, dim)."""
        return np.column_stack([v.amplitudes for v in self.vectors])

    def project(self, op: SparseOperator) -> np.ndarray:
        v = self.matrix()
        return v.conj().T @ (op.matrix @ v)


def build_k_subspace_basis(L: int, K: float, channel: str, sz: int = 0) -> ReducedBasis:
    """Momentum-K two-fermion basis for an odd ring of L = 2 N0 + 1 sites.

    ``channel="singlet"`` gives the doublon at r=0 plus r = 1..N0; ``"triplet"`` gives
    r = 1..N0, lifted to Sz = +1 or -1 by S+ / S- when ``sz`` is nonzero.
    """
    if L % 2 == 0:
        raise ValueError(f"L must be odd, got {L}")
    if channel not in ("singlet", "triplet"):
        raise ValueError(f"channel must be 'singlet' or 'triplet', got {channel!r}")
    if channel == "singlet" and sz != 0:
        raise ValueError("singlet channel has Sz = 0 only")
    if sz not in (-1, 0, 1):
        raise ValueError(f"sz must be -1, 0 or 1, got {sz}")
    momentum_index(K, L)
    n0 = (L - 1) // 2
    sector = enumerate_sector(L, 1, 1)
    sign = -1.0 if channel == "singlet" else 1.0
    r_values = tuple(range(0, n0 + 1)) if channel == "singlet" else tuple(range(1, n0 + 1))
    vectors = []
    for r in r_values:
        if r == 0:
            terms = [(np.exp(1j * K * j) / math.sqrt(L), [(j, UP), (j, DOWN)]) for j in range(L)]
        else:
            pref = np.exp(1j * K * r / 2) / math.sqrt(2 * L)
            terms = []
            for j in range(L):
                phase = pref * np.exp(1j * K * j)
                terms.append((phase, [(j, UP), (j + r, DOWN)]))
                terms.append((sign * phase, [(j, DOWN), (j + r, UP)]))
        vec = state_from_terms(sector, terms)
        if sz != 0:
            vec = apply_spin_op(sector, vec, "S+" if sz > 0 else "S-").normalize()
        vectors.append(vec)
    return ReducedBasis(K, channel, sz, r_values, tuple(vectors))


def hopping_factor(K: float, kappa: float, r: int) -> float:
    """Relative-coordinate hopping between r and r+1: -2 sqrt2 kappa cos(K/2) at r=0, else -2 kappa cos(K/2)."""
    base = -2.0 * kappa * math.cos(K / 2)
    return math.sqrt(2.0) * base if r == 0 else base


def ring_boundary_sign(K: float, L: int, channel: str) -> int:
    """Sign s of the on-site term s * Q at r = N0 on the ring-exact chain.

    Folding r = N0+1 back onto r = N0 multiplies the singlet vector by (-1)^n and
    the triplet vector by -(-1)^n, K = 2 pi n / L.
    """
    n = momentum_index(K, L)
    parity = -1 if n % 2 else 1
    return parity if channel == "singlet" else -parity


def build_equivalent_chain(
    K: float,
    kappa: float,
    U: float,
    length: int,
    channel: str,
    geometry: str = "semi-infinite",
) -> SparseOperator:
    """Tight-binding chain in the relative coordinate r for total momentum K.

    geometry="semi-infinite": ``length`` chain sites, r = 0..length-1 (singlet) or
    r = 1..length (triplet), open far end.
    geometry="ring-exact": ``length`` is the odd ring size L; r runs to N0 and the
    folded boundary term at r = N0 is included, so the spectrum equals the
    (K, channel) block of the full ring Hamiltonian.
    """
    if length < 3:
        raise ValueError(f"length must be >= 3, got {length}")
    if channel not in ("singlet", "triplet"):
        raise ValueError(f"channel must be 'singlet' or 'triplet', got {channel!r}")
    if geometry == "ring-exact":
        if length % 2 == 0:
            raise ValueError(f"ring-exact geometry needs an odd ring size, got {length}")
        n0 = (length - 1) // 2
        r_max = n0
    elif geometry == "semi-infinite":
        r_max = length - 1 if channel == "singlet" else length
    else:
        raise ValueError(f"geometry must be 'ring-exact' or 'semi-infinite', got {geometry!r}")
    r_min = 0 if channel == "singlet" else 1
    r_values = np.arange(r_min, r_max + 1)
    n = len(r_values)
    off = np.array([hopping_factor(K, kappa, int(r)) for r in r_values[:-1]])
    diag = np.zeros(n)
    if channel == "singlet":
        diag[0] = U
    if geometry == "ring-exact":
        diag[-1] += ring_boundary_sign(K, length, channel) * hopping_factor(K, kappa, r_max)
    h = sp.diags([off, diag, off], [-1, 0, 1], shape=(n, n), format="csr")
    return SparseOperator(h)
