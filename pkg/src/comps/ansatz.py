"""Boltzmann-machine wave functions and their ring tensor-network forms.

Two families live here, both for chains of n Ising spins sigma_j = +-1.

Restricted Boltzmann machine (RBM): visible spins coupled to m hidden units,

    Psi(sigma) = sum_h exp[ -sum_j a_j sigma_j - sum_i b_i h_i
                            - sum_{ij} Gamma_ij h_i sigma_j ].

Tracing out the hidden layer gives the closed form
Psi(sigma) = exp(-sum_j a_j sigma_j) prod_i 2 cosh(b_i + sum_j Gamma_ij sigma_j),
and, equivalently, a ring of diagonal 2^m x 2^m matrices

    Sigma^sigma_j = exp(-a_j sigma) kron_i diag(e^{-b_i/n - Gamma_ij sigma},
                                                e^{+b_i/n + Gamma_ij sigma}),

whose ring trace reproduces Psi exactly.

Unrestricted Boltzmann machine (uRBM): l hidden layers with the same ring
geometry as the visible layer and nearest-neighbor couplings only,

    phi(sigma, h) = sum_j [ K0_j sigma_j sigma_{j+1}
                            + sum_g Kg_j h^g_j h^g_{j+1}
                            + J1_j sigma_j h^1_j
                            + sum_{g>=2} Jg_j h^{g-1}_j h^g_j ],

with Phi(sigma) = sum_h exp(-phi). The hidden sum factorizes exactly into a
ring of (2^{l+1}) x (2^{l+1}) site matrices A^sigma kron T^sigma, where A
carries the visible bond and T is a transfer rung over one column of hidden
spins. No approximation is made anywhere in this module: mapping equals
direct summation to machine precision, which the tests enforce.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .transfer import SiteTensor

RBM_MAX_HIDDEN_DIAGONAL = 12
RBM_MAX_HIDDEN_DENSE = 8
URBM_MAX_DIRECT_BITS = 20


def _as_spins(configuration) -> np.ndarray:
    config = np.asarray(configuration, dtype=int)
    if config.ndim != 1 or not np.all(np.isin(config, (1, -1))):
        raise ValueError("configuration must be a 1d array of +-1 spins")
    return config


def hidden_spin_table(n_units: int) -> np.ndarray:
    """(2^n, n) table of hidden spin values +-1; bit g of the row index is unit g."""
    idx = np.arange(2**n_units)
    bits = (idx[:, None] >> np.arange(n_units)) & 1
    return (1 - 2 * bits).astype(float)


# ---------------------------------------------------------------------------
# RBM
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RbmParameters:
    """RBM couplings for n_visible spins and n_hidden units.

    visible_bias: shape (n_visible,), or a scalar in the translation-invariant
        reduction.
    hidden_bias: shape (n_hidden,).
    couplings: Gamma with shape (n_hidden, n_visible) -- row i is hidden unit
        i -- or shape (n_hidden,) in the translation-invariant reduction,
        meaning Gamma_ij = gamma_i for every site j (2 n_hidden + 1 free
        reals in total).
    """

    n_visible: int
    n_hidden: int
    visible_bias: np.ndarray
    hidden_bias: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        if self.n_visible < 1 or self.n_hidden < 1:
            raise ValueError("n_visible and n_hidden must be >= 1")
        a = np.atleast_1d(np.asarray(self.visible_bias, dtype=float))
        b = np.asarray(self.hidden_bias, dtype=float)
        g = np.asarray(self.couplings, dtype=float)
        if a.shape not in ((1,), (self.n_visible,)):
            raise ValueError(f"visible_bias must have shape (1,) or ({self.n_visible},)")
        if b.shape != (self.n_hidden,):
            raise ValueError(f"hidden_bias must have shape ({self.n_hidden},)")
        if g.shape not in ((self.n_hidden,), (self.n_hidden, self.n_visible)):
            raise ValueError(
                f"couplings must have shape ({self.n_hidden},) or "
                f"({self.n_hidden}, {self.n_visible})"
            )
        for arr, name in ((a, "visible_bias"), (b, "hidden_bias"), (g, "couplings")):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "visible_bias", a)
        object.__setattr__(self, "hidden_bias", b)
        object.__setattr__(self, "couplings", g)

    @property
    def is_translation_invariant(self) -> bool:
        return self.visible_bias.shape == (1,) and self.couplings.ndim == 1

    @property
    def hidden_density(self) -> float:
        """Hidden-to-visible ratio m/n."""
        return self.n_hidden / self.n_visible

    def site_bias(self, site: int) -> float:
        return float(self.visible_bias[0 if self.visible_bias.shape == (1,) else site])

    def site_couplings(self, site: int) -> np.ndarray:
        """Column Gamma[:, site] as a length-n_hidden vector."""
        if self.couplings.ndim == 1:
            return self.couplings
        return self.couplings[:, site]


def random_rbm_parameters(
    n_visible: int,
    n_hidden: int,
    scale: float = 0.5,
    rng: Optional[np.random.Generator] = None,
    translation_invariant: bool = False,
) -> RbmParameters:
    """Uniform(-scale, scale) parameter draw, for checks and initialization."""
    rng = np.random.default_rng(rng)
    if translation_invariant:
        a = rng.uniform(-scale, scale, 1)
        g = rng.uniform(-scale, scale, n_hidden)
    else:
        a = rng.uniform(-scale, scale, n_visible)
        g = rng.uniform(-scale, scale, (n_hidden, n_visible))
    return RbmParameters(
        n_visible=n_visible,
        n_hidden=n_hidden,
        visible_bias=a,
        hidden_bias=rng.uniform(-scale, scale, n_hidden),
        couplings=g,
    )


def rbm_amplitude(params: RbmParameters, configuration) -> float:
    """Closed-form amplitude: the hidden trace collapses to a cosh product."""
    sigma = _as_spins(configuration)
    if len(sigma) != params.n_visible:
        raise ValueError(f"configuration length {len(sigma)} != n_visible {params.n_visible}")
    if params.couplings.ndim == 1:
        theta = params.hidden_bias + params.couplings * np.sum(sigma)
        bias_term = params.visible_bias[0] * np.sum(sigma)
    else:
        theta = params.hidden_bias + params.couplings @ sigma
        bias_term = float(params.visible_bias @ sigma)
    return float(np.exp(-bias_term) * np.prod(2.0 * np.cosh(theta)))


def rbm_sigma_diagonals(params: RbmParameters, site: int) -> np.ndarray:
    """Diagonals (2, 2^m) of the local matrix Sigma^sigma at ``site``.

    Row 0 is sigma = +1, row 1 is sigma = -1. The hidden bias enters as
    b_i / n_visible per site so the ring product over n sites restores e^{b_i}.
    """
    if params.n_hidden > RBM_MAX_HIDDEN_DIAGONAL:
        raise ValueError(
            f"diagonal construction supports n_hidden <= {RBM_MAX_HIDDEN_DIAGONAL}, "
            f"got {params.n_hidden}"
        )
    if not 0 <= site < params.n_visible:
        raise ValueError(f"site {site} outside chain of {params.n_visible} sites")
    table = hidden_spin_table(params.n_hidden)  # (2^m, m), unit g = bit g
    b_split = params.hidden_bias / params.n_visible
    gamma = params.site_couplings(site)
    a_site = params.site_bias(site)
    out = np.empty((2, 2**params.n_hidden))
    for row, sigma in enumerate((1, -1)):
        # kron_i diag(e^{-b_i/n - G_i s}, e^{+b_i/n + G_i s}): hidden value +1
        # picks the first entry, so the exponent is -h_i (b_i/n + G_i s)
        out[row] = np.exp(-a_site * sigma - table @ (b_split + gamma * sigma))
    return out


def build_rbm_sigma(params: RbmParameters, site: int) -> SiteTensor:
    """Dense SiteTensor of the diagonal Sigma matrices (n_hidden <= 8)."""
    if params.n_hidden > RBM_MAX_HIDDEN_DENSE:
        raise ValueError(
            f"dense Sigma tensors support n_hidden <= {RBM_MAX_HIDDEN_DENSE}, "
            f"got {params.n_hidden}; use rbm_sigma_diagonals"
        )
    return SiteTensor.from_diagonals(rbm_sigma_diagonals(params, site))


def rbm_trace_amplitude(params: RbmParameters, configuration) -> float:
    """Amplitude via the diagonal ring trace sum_d prod_j Sigma^{sigma_j}_j[d]."""
    sigma = _as_spins(configuration)
    if len(sigma) != params.n_visible:
        raise ValueError(f"configuration length {len(sigma)} != n_visible {params.n_visible}")
    running = np.ones(2**params.n_hidden)
    for site, spin in enumerate(sigma):
        running = running * rbm_sigma_diagonals(params, site)[(1 - int(spin)) // 2]
    return float(np.sum(running))


# ---------------------------------------------------------------------------
# uRBM
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UrbmParameters:
    """Couplings of an l-layer uRBM on a ring.

    k0: visible-visible bond coupling; scalar, or shape (n_sites,) for
        site-dependent couplings (then n_sites must be given).
    k: intra-layer bond couplings, shape (l,) or (l, n_sites).
    j: on-site inter-layer couplings, shape (l,) or (l, n_sites); j[0] ties
        the visible layer to layer 1, j[g] ties layer g to layer g+1.
    """

    k0: Union[float, np.ndarray]
    k: np.ndarray
    j: np.ndarray
    n_sites: Optional[int] = None

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        j = np.asarray(self.j, dtype=float)
        if k.ndim not in (1, 2) or k.shape != j.shape:
            raise ValueError(f"k and j must share shape (l,) or (l, n_sites); got {k.shape} vs {j.shape}")
        if k.shape[0] < 1:
            raise ValueError("at least one hidden layer is required")
        k0 = np.asarray(self.k0, dtype=float)
        per_site = k.ndim == 2 or k0.ndim == 1
        if per_site:
            if self.n_sites is None:
                raise ValueError("site-dependent parameters require n_sites")
            n = self.n_sites
            k0 = np.broadcast_to(k0, (n,)).astype(float)
            k = np.broadcast_to(k[:, None] if k.ndim == 1 else k, (k.shape[0], n)).astype(float)
            j = np.broadcast_to(j[:, None] if j.ndim == 1 else j, (j.shape[0], n)).astype(float)
        for arr, name in ((k0, "k0"), (k, "k"), (j, "j")):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "k0", k0 if per_site else float(k0))
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "j", j)

    @property
    def layers(self) -> int:
        return self.k.shape[0]

    @property
    def is_translation_invariant(self) -> bool:
        return self.k.ndim == 1

    @property
    def chi(self) -> int:
        """Bond dimension of the equivalent ring tensor, 2^{l+1}."""
        return 2 ** (self.layers + 1)

    def site_values(self, site: int) -> tuple[float, np.ndarray, np.ndarray]:
        if self.is_translation_invariant:
            return float(self.k0), self.k, self.j
        return float(self.k0[site]), self.k[:, site], self.j[:, site]

    @classmethod
    def from_vector(cls, vector: np.ndarray, layers: int) -> "UrbmParameters":
        """Translation-invariant parameters from the flat layout [k0, k, j]."""
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (2 * layers + 1,):
            raise ValueError(f"expected {2 * layers + 1} entries for {layers} layers")
        return cls(k0=float(vector[0]), k=vector[1 : 1 + layers], j=vector[1 + layers :])

    def to_vector(self) -> np.ndarray:
        if not self.is_translation_invariant:
            raise ValueError("only translation-invariant parameters have a flat vector form")
        return np.concatenate([[self.k0], self.k, self.j])


def build_urbm_ab(k0: float, k1: float, j1: float, sigma: int) -> tuple[np.ndarray, np.ndarray]:
    """The 2x2 factors of the single-layer site matrix A^sigma kron B^sigma.

    A carries the visible bond: contracting A^{s} against A^{s'} yields
    exp(-k0 s s'). B is the hidden transfer rung exp(-k1 h h' - j1 sigma h)
    with row index h and column index h' (h = +1 first).
    """
    if sigma not in (1, -1):
        raise ValueError(f"sigma must be +-1, got {sigma}")
    c, s = np.cosh(k0), np.sinh(k0)
    a = np.array([[c, -s * sigma], [c * sigma, -s]])
    b = np.array(
        [
            [np.exp(-k1 - j1 * sigma), np.exp(k1 - j1 * sigma)],
            [np.exp(k1 + j1 * sigma), np.exp(-k1 + j1 * sigma)],
        ]
    )
    return a, b


def urbm_rung_matrix(
    k: np.ndarray,
    j: np.ndarray,
    sigma: Union[int, float],
    onsite_scale: float = 1.0,
) -> np.ndarray:
    """Hidden-column transfer rung T^sigma over l layers, a 2^l x 2^l matrix.

    T^sigma_{h,h'} = exp[ -sum_g k_g h^g h'^g
                          - onsite_scale (j_1 sigma h^1
                                          + sum_{g>=2} j_g h^{g-1} h^g) ],

    with the on-site couplings attached to the row (left) rung h. Layer g is
    bit g-1 of the rung index, so l = 1 with onsite_scale = 1 reproduces the
    B matrix of ``build_urbm_ab`` entrywise.
    """
    return np.exp(_rung_exponent(k, j, sigma, onsite_scale))


def _rung_exponent(k, j, sigma, onsite_scale=1.0) -> np.ndarray:
    """Entrywise exponent of urbm_rung_matrix: T = exp(exponent)."""
    k = np.asarray(k, dtype=float)
    j = np.asarray(j, dtype=float)
    layers = len(k)
    table = hidden_spin_table(layers)
    bond = np.zeros((2**layers, 2**layers))
    for g in range(layers):
        bond += k[g] * np.outer(table[:, g], table[:, g])
    onsite = j[0] * sigma * table[:, 0]
    for g in range(1, layers):
        onsite = onsite + j[g] * table[:, g - 1] * table[:, g]
    return -(bond + onsite_scale * onsite[:, None])


def build_urbm_site_tensor(
    params: UrbmParameters,
    site: int = 0,
    rescaled: bool = False,
) -> SiteTensor:
    """Site tensor M^sigma = A^sigma kron T^sigma with chi = 2^{l+1}.

    rescaled=True divides out a leading exponential scale (one common factor
    for both sigma values, so the state is unchanged) before any exp is
    evaluated, keeping entries representable for arbitrarily large couplings.
    """
    k0, k, j = params.site_values(site)
    if not rescaled:
        slices = []
        for sigma in (1, -1):
            c, s = np.cosh(k0), np.sinh(k0)
            a = np.array([[c, -s * sigma], [c * sigma, -s]])
            slices.append(np.kron(a, urbm_rung_matrix(k, j, sigma)))
        return SiteTensor(np.stack(slices))

    # A e^{-|k0|} in closed form: cosh, sinh never materialize
    decay = np.exp(-2.0 * abs(k0))
    c = 0.5 * (1.0 + decay)
    s = np.sign(k0) * 0.5 * (1.0 - decay)
    exponents = [_rung_exponent(k, j, sigma) for sigma in (1, -1)]
    peak = max(e.max() for e in exponents)
    slices = []
    for sigma, exponent in zip((1, -1), exponents):
        a = np.array([[c, -s * sigma], [c * sigma, -s]])
        slices.append(np.kron(a, np.exp(exponent - peak)))
    return SiteTensor(np.stack(slices))


def urbm_site_tensors(params: UrbmParameters, n_sites: int, rescaled: bool = False) -> list[SiteTensor]:
    """Per-site tensor list for possibly site-dependent parameters."""
    if params.is_translation_invariant:
        return [build_urbm_site_tensor(params, 0, rescaled)] * n_sites
    if params.n_sites != n_sites:
        raise ValueError(f"parameters are for {params.n_sites} sites, requested {n_sites}")
    return [build_urbm_site_tensor(params, site, rescaled) for site in range(n_sites)]


def urbm_amplitude_direct(params: UrbmParameters, configuration) -> float:
    """Amplitude by exhaustive summation over all hidden configurations.

    The oracle for the tensor mapping: cost 2^(n*l), guarded at n*l <= 20.
    """
    sigma = _as_spins(configuration)
    n = len(sigma)
    layers = params.layers
    if n * layers > URBM_MAX_DIRECT_BITS:
        raise ValueError(f"direct summation limited to n_sites * layers <= {URBM_MAX_DIRECT_BITS}")
    if not params.is_translation_invariant and params.n_sites != n:
        raise ValueError(f"parameters are for {params.n_sites} sites, got {n}")

    k0 = np.full(n, params.k0) if params.is_translation_invariant else params.k0
    k = np.tile(params.k[:, None], (1, n)) if params.is_translation_invariant else params.k
    j = np.tile(params.j[:, None], (1, n)) if params.is_translation_invariant else params.j

    table = hidden_spin_table(n * layers)  # rows: joint hidden configs
    h = table.reshape(-1, layers, n)  # bit (g*n + site) -> layer g, site
    sigma_f = sigma.astype(float)

    phi = np.full(h.shape[0], float(np.sum(k0 * sigma_f * np.roll(sigma_f, -1))))
    phi = phi + np.einsum("gs,xgs->x", k, h * np.roll(h, -1, axis=2))
    phi = phi + h[:, 0, :] @ (j[0] * sigma_f)
    for g in range(1, layers):
        phi = phi + np.einsum("s,xs->x", j[g], h[:, g - 1, :] * h[:, g, :])
    return float(np.sum(np.exp(-phi)))
