"""Fixed-particle-number fermionic bases on an L-site ring.

A configuration is a pair ``(up_sites, down_sites)`` of sorted site tuples.
The state it labels is

    c+_{u1,up} c+_{u2,up} ... c+_{d1,dn} c+_{d2,dn} ... |vac>

with creation operators sorted site-ascending and every spin-up operator to
the left of every spin-down operator.  All fermionic signs in the package
derive from this one ordering.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb

import numpy as np
import scipy.sparse as sp

UP, DOWN = 0, 1


class BasisMismatchError(ValueError):
    """Raised when a state is combined with an operator or state on a different basis."""


@dataclass(frozen=True)
class SpeciesSpace:
    """All ways to place ``n`` identical fermions on ``L`` sites, lexicographic."""

    L: int
    n: int
    combos: tuple[tuple[int, ...], ...] = field(repr=False)

    @classmethod
    def build(cls, L: int, n: int) -> "SpeciesSpace":
        return cls(L, n, tuple(itertools.combinations(range(L), n)))

    @property
    def dim(self) -> int:
        return len(self.combos)

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {c: i for i, c in enumerate(self.combos)}

    @cached_property
    def sites(self) -> np.ndarray:
        """Occupied sites as an integer array of shape (dim, n)."""
        return np.array(self.combos, dtype=np.int64).reshape(self.dim, self.n)

    @cached_property
    def occupation(self) -> np.ndarray:
        """Occupation numbers, shape (dim, L)."""
        occ = np.zeros((self.dim, self.L), dtype=np.int8)
        if self.n:
            rows = np.repeat(np.arange(self.dim), self.n)
            occ[rows, self.sites.ravel()] = 1
        return occ

    def hopping(self, bonds: list[tuple[int, int]]) -> sp.csr_matrix:
        """Matrix of sum over bonds of (c+_i c_j + c+_j c_i) in this species space."""
        rows, cols, vals = [], [], []
        for col, combo in enumerate(self.combos):
            occupied = set(combo)
            for i, j in bonds:
                for src, dst in ((j, i), (i, j)):
                    if src not in occupied or dst in occupied:
                        continue
                    lo, hi = min(src, dst), max(src, dst)
                    between = sum(1 for s in combo if lo < s < hi)
                    new = tuple(sorted((occupied - {src}) | {dst}))
                    rows.append(self.index[new])
                    cols.append(col)
                    vals.append(-1.0 if between % 2 else 1.0)
        m = sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))
        m.sum_duplicates()
        return m

    def translation(self) -> sp.csr_matrix:
        """Signed permutation realizing c+_i -> c+_{i+1 mod L}."""
        rows, vals = [], []
        for combo in self.combos:
            shifted = [(s + 1) % self.L for s in combo]
            sign = 1.0
            if self.L - 1 in combo:
                # the wrapped operator moves from last to first place
                sign = -1.0 if (self.n - 1) % 2 else 1.0
            rows.append(self.index[tuple(sorted(shifted))])
            vals.append(sign)
        cols = np.arange(self.dim)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))


@dataclass(frozen=True)
class SectorBasis:
    """Configurations with ``n_up`` spin-up and ``n_down`` spin-down fermions on ``L`` sites.

    Ordinals are up-major: ``index = i_up * dim_down + i_down``.
    """

    L: int
    n_up: int
    n_down: int
    up: SpeciesSpace = field(repr=False, compare=False)
    down: SpeciesSpace = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.up.dim * self.down.dim

    @property
    def n_particles(self) -> int:
        return self.n_up + self.n_down

    @property
    def configs(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        return [(u, d) for u in self.up.combos for d in self.down.combos]

    def config(self, ordinal: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        if not 0 <= ordinal < self.dim:
            raise IndexError(ordinal)
        iu, idn = divmod(ordinal, self.down.dim)
        return self.up.combos[iu], self.down.combos[idn]

    def index(self, config: tuple[tuple[int, ...], tuple[int, ...]]) -> int:
        ups, downs = (tuple(sorted(c)) for c in config)
        return self.up.index[ups] * self.down.dim + self.down.index[downs]

    @cached_property
    def double_occupancy(self) -> np.ndarray:
        """Number of doubly occupied sites per configuration."""
        return (self.up.occupation.astype(np.int64) @ self.down.occupation.T.astype(np.int64)).ravel()

    def site_density(self, spin: int) -> np.ndarray:
        """Occupation of every site for every configuration, shape (dim, L), for one spin."""
        if spin == UP:
            return np.repeat(self.up.occupation, self.down.dim, axis=0)
        return np.tile(self.down.occupation, (self.up.dim, 1))

    def same_sector(self, other: "SectorBasis") -> bool:
        return (self.L, self.n_up, self.n_down) == (other.L, other.n_up, other.n_down)


def enumerate_sector(L: int, n_up: int, n_down: int) -> SectorBasis:
    if L <= 0:
        raise ValueError(f"ring needs at least one site, got L={L}")
    for name, n in (("n_up", n_up), ("n_down", n_down)):
        if not 0 <= n <= L:
            raise ValueError(f"{name}={n} outside [0, {L}]")
    return SectorBasis(L, n_up, n_down, SpeciesSpace.build(L, n_up), SpeciesSpace.build(L, n_down))


@dataclass
class ManyBodyState:
    """Complex amplitudes over the configurations of a sector basis."""

    basis: SectorBasis
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.basis.dim,):
            raise BasisMismatchError(
                f"amplitude vector of shape {self.amplitudes.shape} for basis of dim {self.basis.dim}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "ManyBodyState":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero state")
        return ManyBodyState(self.basis, self.amplitudes / n)

    def inner(self, other: "ManyBodyState") -> complex:
        """<self|other>."""
        _check_same(self.basis, other.basis)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def with_amplitudes(self, amplitudes: np.ndarray) -> "ManyBodyState":
        return ManyBodyState(self.basis, amplitudes)


def _check_same(a: SectorBasis, b: SectorBasis) -> None:
    if not a.same_sector(b):
        raise BasisMismatchError(
            f"sector (L={a.L}, {a.n_up}up, {a.n_down}dn) vs (L={b.L}, {b.n_up}up, {b.n_down}dn)"
        )


def canonical_sign(operators: list[tuple[int, int]]) -> tuple[int, tuple[tuple[int, ...], tuple[int, ...]] | None]:
    """Reorder a product of creation operators ``[(site, spin), ...]`` into canonical order.

    Returns ``(sign, config)``, or ``(0, None)`` when an operator repeats.
    """
    keys = [(spin, site) for site, spin in operators]
    if len(set(keys)) != len(keys):
        return 0, None
    order = sorted(range(len(keys)), key=keys.__getitem__)
    # parity of the sorting permutation by counting inversions
    inversions = sum(1 for a in range(len(order)) for b in range(a + 1, len(order)) if order[a] > order[b])
    ups = tuple(site for spin, site in sorted(keys) if spin == UP)
    downs = tuple(site for spin, site in sorted(keys) if spin == DOWN)
    return (-1 if inversions % 2 else 1), (ups, downs)


def state_from_terms(basis: SectorBasis, terms) -> ManyBodyState:
    """Build an (unnormalized) state from ``[(coefficient, [(site, spin), ...]), ...]``.

    Each operator list is read left to right as a product of creation operators.
    """
    amps = np.zeros(basis.dim, dtype=complex)
    for coef, ops in terms:
        sign, config = canonical_sign([(site % basis.L, spin) for site, spin in ops])
        if sign == 0:
            continue
        amps[basis.index(config)] += sign * coef
    return ManyBodyState(basis, amps)


def translation_matrix(basis: SectorBasis) -> sp.csr_matrix:
    return sp.kron(basis.up.translation(), basis.down.translation(), format="csr")


def apply_translation(basis: SectorBasis, psi: ManyBodyState) -> ManyBodyState:
    """Shift every fermion by one site around the ring (site i -> i+1 mod L)."""
    _check_same(basis, psi.basis)
    return ManyBodyState(psi.basis, translation_matrix(basis) @ psi.amplitudes)


def _raising_matrix(basis: SectorBasis) -> tuple[sp.csr_matrix, SectorBasis]:
    """Matrix of S+ = sum_i c+_{i,up} c_{i,dn} from ``basis`` into the (n_up+1, n_down-1) sector."""
    if basis.n_down == 0 or basis.n_up == basis.L:
        raise ValueError("S+ has no target sector: needs n_down >= 1 and n_up < L")
    target = enumerate_sector(basis.L, basis.n_up + 1, basis.n_down - 1)
    rows, cols, vals = [], [], []
    for col, (ups, downs) in enumerate(basis.configs):
        for pos, site in enumerate(downs):
            if site in ups:
                continue
            # c_{i,dn} passes all n_up up-operators and the downs left of it
            sign = (-1) ** (basis.n_up + pos)
            # c+_{i,up} is inserted behind the ups left of it
            sign *= (-1) ** sum(1 for u in ups if u < site)
            new_ups = tuple(sorted(ups + (site,)))
            new_downs = downs[:pos] + downs[pos + 1:]
            rows.append(target.index((new_ups, new_downs)))
            cols.append(col)
            vals.append(float(sign))
    m = sp.csr_matrix((vals, (rows, cols)), shape=(target.dim, basis.dim), dtype=complex)
    return m, target


def spin_matrix(basis: SectorBasis, which: str) -> tuple[sp.csr_matrix, SectorBasis]:
    """Sparse matrix of a total-spin operator on ``basis`` and the sector it maps into."""
    if which == "Sz":
        sz = 0.5 * (basis.n_up - basis.n_down)
        return sp.identity(basis.dim, dtype=complex, format="csr") * sz, basis
    if which == "S+":
        return _raising_matrix(basis)
    if which == "S-":
        if basis.n_up == 0 or basis.n_down == basis.L:
            raise ValueError("S- has no target sector: needs n_up >= 1 and n_down < L")
        lower = enumerate_sector(basis.L, basis.n_up - 1, basis.n_down + 1)
        raise_back, _ = _raising_matrix(lower)
        return raise_back.conj().T.tocsr(), lower
    if which == "S2":
        sz = 0.5 * (basis.n_up - basis.n_down)
        s2 = sp.identity(basis.dim, dtype=complex, format="csr") * (sz * (sz + 1))
        if basis.n_down > 0 and basis.n_up < basis.L:
            plus, _ = _raising_matrix(basis)
            s2 = s2 + (plus.conj().T @ plus)
        return s2.tocsr(), basis
    raise ValueError(f"unknown spin operator {which!r}; expected one of S+, S-, Sz, S2")


def apply_spin_op(basis: SectorBasis, psi: ManyBodyState, which: str) -> ManyBodyState:
    """Apply S+, S-, Sz or S2 (``"S2"`` or ``"S²"``) with exact fermionic signs."""
    _check_same(basis, psi.basis)
    m, target = spin_matrix(basis, "S2" if which == "S²" else which)
    return ManyBodyState(target, m @ psi.amplitudes)
