"""Square-lattice Boltzmann-machine states as constrained PEPS on a torus.

The 2D uRBM attaches l hidden layers to an L x L torus of visible spins with
nearest-neighbor bonds inside every layer (both lattice directions), an
on-site tie between the visible layer and layer 1, and on-site ties between
consecutive hidden layers:

    phi(sigma, h) = sum_{i,j} [ k0 (sigma_{i,j} sigma_{i,j+1}
                                    + sigma_{i,j} sigma_{i+1,j})
                                + sum_g k_g (h^g_{i,j} h^g_{i,j+1}
                                             + h^g_{i,j} h^g_{i+1,j})
                                + j_1 sigma_{i,j} h^1_{i,j}
                                + sum_{g>=2} j_g h^{g-1}_{i,j} h^g_{i,j} ].

The index sums wrap literally, so on an L = 2 torus each neighbor pair is
counted twice; the network below reproduces exactly that convention.

Summing out the hidden layers produces a uniform PEPS block with bond
dimension 2^{l+1} per direction: a visible factor AA_{ab,gd} = A_ab A_gd
(one A per lattice direction) times a hidden factor
BB_{a'b',g'd'} = delta_{a'g'} T_{a'b'} T_{g'd'}, where T is the hidden
transfer rung with all on-site couplings at half strength -- each site's
on-site terms appear once per direction, so halving restores the single
count (for one layer this is literally the B matrix evaluated at sigma/2).

Amplitudes on the torus are evaluated by row transfer matrices acting on the
chi^L composite space of one horizontal cut.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .ansatz import hidden_spin_table, urbm_rung_matrix

TORUS_SIZES = (2, 3)
MAX_DIRECT_2D_BITS = 18
MAX_ROW_SPACE = 4096


@dataclass(frozen=True)
class Urbm2dParameters:
    """Translation-invariant 2D uRBM couplings: k0, and per-layer k, j."""

    k0: float
    k: np.ndarray
    j: np.ndarray

    def __post_init__(self):
        k = np.atleast_1d(np.asarray(self.k, dtype=float))
        j = np.atleast_1d(np.asarray(self.j, dtype=float))
        if k.ndim != 1 or k.shape != j.shape:
            raise ValueError(f"k and j must share shape (l,); got {k.shape} vs {j.shape}")
        if not (np.isfinite(self.k0) and np.all(np.isfinite(k)) and np.all(np.isfinite(j))):
            raise ValueError("couplings must be finite")
        object.__setattr__(self, "k0", float(self.k0))
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "j", j)

    @property
    def layers(self) -> int:
        return len(self.k)

    @property
    def chi(self) -> int:
        return 2 ** (self.layers + 1)


def copeps_visible_factor(k0: float, sigma: int) -> np.ndarray:
    """AA^sigma_{a b g d} = A^sigma_{ab} A^sigma_{gd}: one visible bond factor
    for the horizontal pair (a, b) and one for the vertical pair (g, d)."""
    if sigma not in (1, -1):
        raise ValueError(f"sigma must be +-1, got {sigma}")
    c, s = np.cosh(k0), np.sinh(k0)
    a = np.array([[c, -s * sigma], [c * sigma, -s]])
    return np.einsum("ab,gd->abgd", a, a)


def copeps_hidden_factor(params: Urbm2dParameters, sigma: int) -> np.ndarray:
    """BB^sigma with the on-site couplings split evenly between directions.

    BB_{a' b' g' d'} = delta_{a' g'} T_{a' b'} T_{g' d'} with T the rung at
    onsite_scale = 1/2; the delta ties both incoming legs to the site's own
    hidden column.
    """
    if sigma not in (1, -1):
        raise ValueError(f"sigma must be +-1, got {sigma}")
    rung = urbm_rung_matrix(params.k, params.j, sigma, onsite_scale=0.5)
    eye = np.eye(rung.shape[0])
    return np.einsum("ab,gd,ag->abgd", rung, rung, eye)


@dataclass(frozen=True)
class CopepsBlock:
    """Uniform torus block: entries[s] has legs (left, right, up, down)."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 5 or entries.shape[0] != 2 or len(set(entries.shape[1:])) != 1:
            raise ValueError(f"block must have shape (2, chi, chi, chi, chi), got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("block entries must be finite")
        object.__setattr__(self, "entries", entries)

    @property
    def chi(self) -> int:
        return self.entries.shape[1]


def build_copeps_block(params: Urbm2dParameters) -> CopepsBlock:
    """Fused block C^sigma = AA^sigma * BB^sigma with legs (left,right,up,down).

    Fused leg index is (visible, hidden) with the visible bit leading:
    left = a * 2^l + a', and likewise for the other three legs.
    """
    chi_h = 2**params.layers
    slices = []
    for sigma in (1, -1):
        aa = copeps_visible_factor(params.k0, sigma)
        bb = copeps_hidden_factor(params, sigma)
        fused = np.einsum("abgd,ABGD->aAbBgGdD", aa, bb).reshape(
            2 * chi_h, 2 * chi_h, 2 * chi_h, 2 * chi_h
        )
        slices.append(fused)
    return CopepsBlock(np.stack(slices))


def _row_transfer(blocks: list[np.ndarray]) -> np.ndarray:
    """Contract one row's horizontal ring; returns the (chi^L, chi^L) map
    from the row's up legs to its down legs."""
    width = len(blocks)
    chi = blocks[0].shape[0]
    t = blocks[0]  # legs (left, right, u0, d0)
    for j in range(1, width):
        t = np.tensordot(t, blocks[j], axes=([1], [0]))
        # legs now (left, u0, d0, ..., right, uj, dj): bring right next to left
        t = np.moveaxis(t, -3, 1)
    t = np.trace(t, axis1=0, axis2=1)  # close the horizontal ring
    # legs (u0, d0, u1, d1, ...) -> (u0..u_{L-1}, d0..d_{L-1})
    order = list(range(0, 2 * width, 2)) + list(range(1, 2 * width, 2))
    return np.transpose(t, order).reshape(chi**width, chi**width)


def copeps_amplitude_torus(block: CopepsBlock, grid) -> float:
    """Contract the block network over an L x L torus of spins (L in {2, 3})."""
    grid = np.asarray(grid, dtype=int)
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
        raise ValueError(f"grid must be square, got shape {grid.shape}")
    size = grid.shape[0]
    if size not in TORUS_SIZES:
        raise ValueError(f"torus contraction supports L in {TORUS_SIZES}, got {size}")
    if not np.all(np.isin(grid, (1, -1))):
        raise ValueError("grid entries must be +-1 spins")
    if block.chi**size > MAX_ROW_SPACE:
        raise ValueError(
            f"row space chi^L = {block.chi**size} exceeds {MAX_ROW_SPACE}; reduce layers"
        )
    product = np.eye(block.chi**size)
    for i in range(size):
        row = [block.entries[(1 - int(s)) // 2] for s in grid[i]]
        product = product @ _row_transfer(row)
    return float(np.trace(product))


def urbm2d_amplitude_direct(params: Urbm2dParameters, grid) -> float:
    """Amplitude by exhaustive hidden summation with the literal wrapped sums.

    Every (i, j) term is added exactly as written, so L = 2 double-counts
    each bond -- matching the network convention. Cost 2^(L^2 l), guarded.
    """
    grid = np.asarray(grid, dtype=int)
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
        raise ValueError(f"grid must be square, got shape {grid.shape}")
    if not np.all(np.isin(grid, (1, -1))):
        raise ValueError("grid entries must be +-1 spins")
    size = grid.shape[0]
    layers = params.layers
    bits = size * size * layers
    if bits > MAX_DIRECT_2D_BITS:
        raise ValueError(f"direct summation limited to L^2 * layers <= {MAX_DIRECT_2D_BITS}")

    sigma = grid.astype(float)
    visible = params.k0 * float(
        np.sum(sigma * np.roll(sigma, -1, axis=1)) + np.sum(sigma * np.roll(sigma, -1, axis=0))
    )
    table = hidden_spin_table(bits)
    h = table.reshape(-1, layers, size, size)
    phi = np.full(h.shape[0], visible)
    for g in range(layers):
        hg = h[:, g]
        phi = phi + params.k[g] * (
            np.einsum("xij,xij->x", hg, np.roll(hg, -1, axis=2))
            + np.einsum("xij,xij->x", hg, np.roll(hg, -1, axis=1))
        )
    phi = phi + params.j[0] * np.einsum("ij,xij->x", sigma, h[:, 0])
    for g in range(1, layers):
        phi = phi + params.j[g] * np.einsum("xij,xij->x", h[:, g - 1], h[:, g])
    return float(np.sum(np.exp(-phi)))
