"""Transverse-field Ising chain on a ring: exact solution and exact diagonalization.

The Hamiltonian is

    H = - sum_j sigma^z_j sigma^z_{j+1} - field * sum_j sigma^x_j,

with periodic boundaries (site n_sites + 1 identified with site 1). The model is
ferromagnetic for field < 1, critical at field = 1, and paramagnetic beyond.

Two independent ground-state oracles live here. ``exact_ising_ground_energy``
evaluates the closed-form free-fermion spectrum in the even-fermion-parity
(antiperiodic) sector, which holds the global ground state for every field > 0.
``ed_ground_state`` diagonalizes the 2^n many-body matrix directly. The two are
cross-checked in the test suite; everything downstream (energy benchmarks,
correlator references at small n) leans on them.

Basis convention used throughout the package: basis index b encodes spins via
bit j of b, with bit value 0 meaning sigma_j = +1 and bit value 1 meaning
sigma_j = -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

ED_MAX_SITES = 14
DENSE_MAX_SITES = 10
# eigenvalues within this window of the minimum count as the ground manifold
# (the ferromagnetic doublet splits only like field^n)
_GROUND_MANIFOLD_TOL = 1e-9


@dataclass(frozen=True)
class IsingChain:
    """Ring of n_sites spins in a transverse field of strength ``field``."""

    n_sites: int
    field: float

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 3:
            raise ValueError(f"n_sites must be an integer >= 3, got {self.n_sites}")
        if not np.isfinite(self.field) or self.field < 0:
            raise ValueError(f"field must be finite and >= 0, got {self.field}")

    @property
    def exact_ground_energy(self) -> float:
        return exact_ising_ground_energy(self.n_sites, self.field)


def exact_ising_ground_energy(n_sites: int, field: float) -> float:
    """Ground-state energy from the free-fermion spectrum.

    E = -(1/2) sum_k eps(k) with eps(k) = 2 sqrt(1 + field^2 - 2 field cos k),
    summed over the antiperiodic momenta k = pi (2m + 1) / n_sites,
    m = 0 .. n_sites - 1. These momenta quantize the even-fermion-parity
    sector, whose vacuum is the global ground state.
    """
    chain = IsingChain(n_sites, field)
    k = np.pi * (2.0 * np.arange(chain.n_sites) + 1.0) / chain.n_sites
    eps = 2.0 * np.sqrt(1.0 + field * field - 2.0 * field * np.cos(k))
    return float(-0.5 * np.sum(eps))


def exact_ising_energy_density(n_sites: int, field: float) -> float:
    """Ground-state energy per site."""
    return exact_ising_ground_energy(n_sites, field) / n_sites


def all_spin_configurations(n_sites: int) -> np.ndarray:
    """(2^n, n) array of spin values +-1, row b matching basis index b."""
    idx = np.arange(2**n_sites)
    bits = (idx[:, None] >> np.arange(n_sites)) & 1
    return (1 - 2 * bits).astype(np.int8)


def apply_ising_hamiltonian(vec: np.ndarray, n_sites: int, field: float) -> np.ndarray:
    """H @ vec without materializing H; vec has length 2^n."""
    dim = 2**n_sites
    if vec.shape != (dim,):
        raise ValueError(f"vector length {vec.shape} does not match 2^{n_sites}")
    spins = all_spin_configurations(n_sites)
    diag = -np.sum(spins * np.roll(spins, -1, axis=1), axis=1).astype(float)
    out = diag * vec
    idx = np.arange(dim)
    for j in range(n_sites):
        out -= field * vec[idx ^ (1 << j)]
    return out


def _dense_hamiltonian(n_sites: int, field: float) -> np.ndarray:
    dim = 2**n_sites
    spins = all_spin_configurations(n_sites)
    h = np.diag(-np.sum(spins * np.roll(spins, -1, axis=1), axis=1).astype(float))
    idx = np.arange(dim)
    for j in range(n_sites):
        h[idx, idx ^ (1 << j)] -= field
    return h


@dataclass(frozen=True)
class EdGroundState:
    """Even-sector ground state of a finite chain.

    ``vector`` is the ground state projected onto the spin-flip-even sector
    (the global flip sum_b v[b] -> v[~b] acts as +1 on it), normalized.
    ``energy`` is its Rayleigh quotient.
    """

    n_sites: int
    field: float
    energy: float
    vector: np.ndarray


def ed_ground_state(n_sites: int, field: float, method: str = "auto") -> EdGroundState:
    """Diagonalize the chain and return the even-sector ground state.

    method: "auto" uses the matrix-free Lanczos path and falls back to dense
    on non-convergence (dense needs n_sites <= 10); "iterative" and "dense"
    force one path.
    """
    chain = IsingChain(n_sites, field)
    if n_sites > ED_MAX_SITES:
        raise ValueError(f"ed_ground_state supports n_sites <= {ED_MAX_SITES}, got {n_sites}")
    if method not in ("auto", "iterative", "dense"):
        raise ValueError(f"unknown method {method!r}")
    if method == "dense" and n_sites > DENSE_MAX_SITES:
        raise ValueError(f"dense path supports n_sites <= {DENSE_MAX_SITES}, got {n_sites}")

    dim = 2**n_sites
    n_low = min(4, dim - 2)
    if method == "dense":
        vals, vecs = np.linalg.eigh(_dense_hamiltonian(n_sites, field))
        vals, vecs = vals[:n_low], vecs[:, :n_low]
    else:
        spins = all_spin_configurations(n_sites)
        diag = -np.sum(spins * np.roll(spins, -1, axis=1), axis=1).astype(float)
        flips = [np.arange(dim) ^ (1 << j) for j in range(n_sites)]

        def matvec(v):
            out = diag * v
            for f in flips:
                out = out - field * v[f]
            return out

        op = LinearOperator((dim, dim), matvec=matvec, dtype=float)
        try:
            vals, vecs = eigsh(op, k=n_low, which="SA")
        except ArpackNoConvergence:
            if method == "iterative" or n_sites > DENSE_MAX_SITES:
                raise
            vals, vecs = np.linalg.eigh(_dense_hamiltonian(n_sites, field))
            vals, vecs = vals[:n_low], vecs[:, :n_low]
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]

    window = _GROUND_MANIFOLD_TOL * max(1.0, abs(vals[0]))
    manifold = vecs[:, vals <= vals[0] + window]
    even = _project_spin_flip_even(manifold, n_sites)
    hv = apply_ising_hamiltonian(even, n_sites, field)
    energy = float(even @ hv)
    return EdGroundState(n_sites=n_sites, field=field, energy=energy, vector=even)


def _project_spin_flip_even(manifold: np.ndarray, n_sites: int) -> np.ndarray:
    """Even-sector unit vector inside the ground manifold."""
    mask = 2**n_sites - 1
    flip_index = np.arange(2**n_sites) ^ mask
    projected = manifold + manifold[flip_index, :]
    norms = np.linalg.norm(projected, axis=0)
    best = int(np.argmax(norms))
    if norms[best] < 1e-8:
        raise RuntimeError("ground manifold has no spin-flip-even component")
    return projected[:, best] / norms[best]


def ed_z_magnetization(state: EdGroundState, site: int = 0) -> float:
    """<sigma^z_site>; identically zero in the even sector up to roundoff."""
    if not 0 <= site < state.n_sites:
        raise ValueError(f"site {site} outside chain of {state.n_sites} sites")
    spins = all_spin_configurations(state.n_sites)
    weights = state.vector**2
    return float(np.sum(weights * spins[:, site]))


def ed_zz_connected_correlator(state: EdGroundState, r: int) -> float:
    """<sigma^z_1 sigma^z_{1+r}> - <sigma^z_1><sigma^z_{1+r}> on the ring."""
    n = state.n_sites
    if not 1 <= r <= n - 1:
        raise ValueError(f"separation r must satisfy 1 <= r <= {n - 1}, got {r}")
    spins = all_spin_configurations(n)
    weights = state.vector**2
    zz = float(np.sum(weights * spins[:, 0] * spins[:, r % n]))
    m0 = float(np.sum(weights * spins[:, 0]))
    mr = float(np.sum(weights * spins[:, r % n]))
    return zz - m0 * mr
