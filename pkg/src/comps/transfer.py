"""Ring contraction engine for translation-invariant two-level tensor networks.

A state on a ring of n sites is encoded by a rank-3 site tensor M^sigma (one
chi x chi matrix per spin value); its amplitude for a configuration
(sigma_1 .. sigma_n) is the ring trace Tr[M^{sigma_1} ... M^{sigma_n}].
Expectation values of local operators reduce to traces of products of doubled
transfer operators

    T_O = sum_{s', s} <s'|O|s>  M^{s'} (x) M^{s},

so the energy density of the transverse-field Ising ring is

    e = -( Tr[T_z T_z T_I^{n-2}] + field * Tr[T_x T_I^{n-1}] ) / Tr[T_I^n],

and the connected zz correlator at separation r is

    ( Tr[T_z T_I^{r-1} T_z T_I^{n-r-1}] - Tr[T_z T_I^{n-1}]^2 / Tr[T_I^n] )
      / Tr[T_I^n].

Two evaluation paths are provided and cross-checked: scaled repeated
multiplication (binary exponentiation with per-step max-abs rescaling) and a
spectral decomposition of T_I. Ring traces of long products are prone to
catastrophic cancellation for ill-conditioned tensors -- both paths validate
their traces and raise DegenerateEvaluationError rather than return noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

MAX_TRANSFER_CHI = 64
# |trace| below this fraction of the ring product's Frobenius norm means the
# trace is pure cancellation noise
_TRACE_CANCEL_RTOL = 1e-12
_TRACE_FLOOR = 1e-300
# power vs spectral paths must agree this well or the evaluation is rejected
_PATH_AGREEMENT_RTOL = 1e-9

PAULI_I = np.eye(2)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
OPERATORS = {"identity": PAULI_I, "x": PAULI_X, "z": PAULI_Z}


class DegenerateEvaluationError(RuntimeError):
    """Ring trace lost to cancellation, vanishing norm, or path disagreement."""


@dataclass(frozen=True)
class SiteTensor:
    """Local tensor M^sigma: entries[s] is the chi x chi matrix for spin s.

    Index convention: s = 0 means sigma = +1, s = 1 means sigma = -1.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 3 or entries.shape[0] != 2 or entries.shape[1] != entries.shape[2]:
            raise ValueError(f"site tensor must have shape (2, chi, chi), got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("site tensor entries must be finite")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_matrices(cls, plus: np.ndarray, minus: np.ndarray) -> "SiteTensor":
        return cls(np.stack([np.asarray(plus, float), np.asarray(minus, float)]))

    @classmethod
    def from_diagonals(cls, diagonals: np.ndarray) -> "SiteTensor":
        """Dense tensor from (2, chi) diagonal storage."""
        diagonals = np.asarray(diagonals, dtype=float)
        if diagonals.ndim != 2 or diagonals.shape[0] != 2:
            raise ValueError(f"diagonals must have shape (2, chi), got {diagonals.shape}")
        return cls(np.stack([np.diag(diagonals[0]), np.diag(diagonals[1])]))

    @property
    def chi(self) -> int:
        return self.entries.shape[1]

    def scaled(self, factor: float) -> "SiteTensor":
        return SiteTensor(self.entries * factor)

    def normalized(self) -> "SiteTensor":
        """Rescale so the largest entry magnitude is 1 (same state)."""
        peak = np.abs(self.entries).max()
        if peak <= 0:
            raise ValueError("cannot normalize an all-zero site tensor")
        return SiteTensor(self.entries / peak)


@dataclass(frozen=True)
class UniformRingMps:
    """One shared site tensor repeated around a ring of n_sites >= 3."""

    tensor: SiteTensor
    n_sites: int

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 3:
            raise ValueError(f"n_sites must be an integer >= 3, got {self.n_sites}")


def _operator_matrix(operator: Union[str, np.ndarray]) -> np.ndarray:
    if isinstance(operator, str):
        try:
            return OPERATORS[operator]
        except KeyError:
            raise ValueError(f"unknown operator {operator!r}; choose from {sorted(OPERATORS)}")
    mat = np.asarray(operator, dtype=float)
    if mat.shape != (2, 2):
        raise ValueError(f"operator must be 2x2, got shape {mat.shape}")
    return mat


def transfer_operator(tensor: SiteTensor, operator: Union[str, np.ndarray] = "identity") -> np.ndarray:
    """Doubled operator sum_{s',s} <s'|O|s> M^{s'} (x) M^{s} as a chi^2 matrix."""
    if tensor.chi > MAX_TRANSFER_CHI:
        raise ValueError(f"transfer operators support chi <= {MAX_TRANSFER_CHI}, got {tensor.chi}")
    op = _operator_matrix(operator)
    m = tensor.entries
    out = np.zeros((tensor.chi**2, tensor.chi**2))
    for sp in range(2):
        for s in range(2):
            if op[sp, s] != 0.0:
                out += op[sp, s] * np.kron(m[sp], m[s])
    return out


def scaled_matrix_power(matrix: np.ndarray, exponent: int) -> tuple[np.ndarray, float]:
    """matrix**exponent via binary exponentiation with max-abs rescaling.

    Returns (P, log_scale) with the true power equal to P * exp(log_scale).
    """
    if exponent < 0:
        raise ValueError("exponent must be >= 0")
    dim = matrix.shape[0]
    if exponent == 0:
        return np.eye(dim), 0.0

    def rescale(m, log):
        peak = np.abs(m).max()
        if not np.isfinite(peak) or peak <= 0.0:
            raise DegenerateEvaluationError("matrix power collapsed to zero or overflowed")
        return m / peak, log + np.log(peak)

    base, log_base = rescale(np.array(matrix, dtype=float), 0.0)
    result, log_result = None, 0.0
    e = exponent
    while e:
        if e & 1:
            result = base.copy() if result is None else result @ base
            log_result += log_base
            result, log_result = rescale(result, log_result)
        e >>= 1
        if e:
            base = base @ base
            log_base *= 2.0
            base, log_base = rescale(base, log_base)
    return result, log_result


def _checked_trace(product: np.ndarray, what: str) -> float:
    trace = float(np.trace(product))
    norm = float(np.linalg.norm(product))
    if not np.isfinite(trace):
        raise DegenerateEvaluationError(f"{what} is not finite")
    if abs(trace) < _TRACE_FLOOR or abs(trace) < _TRACE_CANCEL_RTOL * norm:
        raise DegenerateEvaluationError(
            f"{what} lost to cancellation (|trace| = {abs(trace):.3e}, norm = {norm:.3e})"
        )
    return trace


def _energy_power(t_i, t_z, t_x, field: float, n: int) -> float:
    p, _ = scaled_matrix_power(t_i, n - 2)
    norm_trace = _checked_trace(t_i @ t_i @ p, "ring norm trace")
    tr_zz = float(np.einsum("ij,ji->", t_z @ t_z, p))
    tr_x = float(np.einsum("ij,ji->", t_x @ t_i, p))
    energy = -(tr_zz + field * tr_x) / norm_trace
    if not np.isfinite(energy):
        raise DegenerateEvaluationError("energy evaluation produced a non-finite value")
    return energy


def _spectral_parts(t_i):
    w, v = np.linalg.eig(t_i)
    try:
        v_inv = np.linalg.inv(v)
    except np.linalg.LinAlgError as err:
        raise DegenerateEvaluationError("transfer spectrum is defective") from err
    peak = np.abs(w).max()
    if not np.isfinite(peak) or peak <= 0.0:
        raise DegenerateEvaluationError("transfer operator has no finite leading eigenvalue")
    return w / peak, v, v_inv, peak


def _energy_eig(t_i, t_z, t_x, field: float, n: int) -> float:
    wn, v, v_inv, _ = _spectral_parts(t_i)
    powers = wn ** (n - 2)
    tr_zz = np.einsum("ij,ji->i", v_inv @ (t_z @ t_z), v) @ powers
    tr_x = np.einsum("ij,ji->i", v_inv @ (t_x @ t_i), v) @ powers
    tr_0 = np.einsum("ij,ji->i", v_inv @ (t_i @ t_i), v) @ powers
    if abs(tr_0) < _TRACE_FLOOR:
        raise DegenerateEvaluationError("spectral ring norm vanished")
    energy = float(np.real(-(tr_zz + field * tr_x) / tr_0))
    if not np.isfinite(energy):
        raise DegenerateEvaluationError("spectral energy evaluation produced a non-finite value")
    return energy


def _resolve_method(method: str, chi: int) -> str:
    if method not in ("auto", "power", "eig", "checked"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        return "checked" if chi * chi <= 256 else "power"
    if method in ("eig", "checked") and chi * chi > 4096:
        raise ValueError(f"spectral path limited to chi^2 <= 4096, got chi = {chi}")
    return method


def energy_density(mps: UniformRingMps, field: float, method: str = "auto") -> float:
    """Variational energy per site of the Ising ring for this uniform state.

    method: "power" (scaled repeated multiplication), "eig" (spectral),
    "checked" (both, raising on disagreement), or "auto" (checked whenever
    chi^2 <= 256, power otherwise).
    """
    if field < 0 or not np.isfinite(field):
        raise ValueError(f"field must be finite and >= 0, got {field}")
    tensor = mps.tensor
    resolved = _resolve_method(method, tensor.chi)
    t_i = transfer_operator(tensor, "identity")
    t_z = transfer_operator(tensor, "z")
    t_x = transfer_operator(tensor, "x")
    n = mps.n_sites
    if resolved == "power":
        return _energy_power(t_i, t_z, t_x, field, n)
    if resolved == "eig":
        return _energy_eig(t_i, t_z, t_x, field, n)
    e_power = _energy_power(t_i, t_z, t_x, field, n)
    e_eig = _energy_eig(t_i, t_z, t_x, field, n)
    if abs(e_power - e_eig) > _PATH_AGREEMENT_RTOL * max(1.0, abs(e_power)):
        raise DegenerateEvaluationError(
            f"trace paths disagree (power {e_power:.12g} vs spectral {e_eig:.12g})"
        )
    return e_power


def _correlator_power(t_i, t_z, n: int, r: int) -> float:
    front, _ = scaled_matrix_power(t_i, r - 1)
    back, _ = scaled_matrix_power(t_i, n - r - 1)
    norm_trace = _checked_trace(t_i @ front @ t_i @ back, "ring norm trace")
    zz = float(np.einsum("ij,ji->", t_z @ front @ t_z, back))
    mag = float(np.einsum("ij,ji->", t_z @ front @ t_i, back))
    value = (zz - mag * mag / norm_trace) / norm_trace
    if not np.isfinite(value):
        raise DegenerateEvaluationError("correlator evaluation produced a non-finite value")
    return value


def _correlator_eig(t_i, t_z, n: int, r: int) -> float:
    wn, v, v_inv, peak = _spectral_parts(t_i)
    g_z = v_inv @ t_z @ v
    pw_front = wn ** (r - 1)
    pw_back = wn ** (n - r - 1)
    zz = np.einsum("ij,j,ji,i->", g_z, pw_front, g_z, pw_back)
    mag = np.einsum("ii,i->", g_z, wn ** (n - 1))
    norm = np.sum(wn**n)
    if abs(norm) < _TRACE_FLOOR:
        raise DegenerateEvaluationError("spectral ring norm vanished")
    # zz, mag, norm carry transfer powers n-2, n-1, n of w/peak, so the
    # connected ratio is peak^2 times the true value.
    value = float(np.real((zz - mag * mag / norm) / norm)) / (peak * peak)
    if not np.isfinite(value):
        raise DegenerateEvaluationError("spectral correlator produced a non-finite value")
    return value


def connected_zz_correlator(
    mps: UniformRingMps,
    separations: Union[int, Iterable[int]],
    method: str = "auto",
) -> np.ndarray:
    """Connected <z_1 z_{1+r}> on the ring for each requested separation r."""
    rs = np.atleast_1d(np.asarray(separations, dtype=int))
    n = mps.n_sites
    if np.any(rs < 1) or np.any(rs > n - 1):
        raise ValueError(f"separations must lie in [1, {n - 1}]")
    resolved = _resolve_method(method, mps.tensor.chi)
    t_i = transfer_operator(mps.tensor, "identity")
    t_z = transfer_operator(mps.tensor, "z")
    out = np.empty(len(rs))
    for i, r in enumerate(rs):
        if resolved == "power":
            out[i] = _correlator_power(t_i, t_z, n, int(r))
        elif resolved == "eig":
            out[i] = _correlator_eig(t_i, t_z, n, int(r))
        else:
            c_power = _correlator_power(t_i, t_z, n, int(r))
            c_eig = _correlator_eig(t_i, t_z, n, int(r))
            if abs(c_power - c_eig) > _PATH_AGREEMENT_RTOL * max(1.0, abs(c_power)):
                raise DegenerateEvaluationError(
                    f"correlator paths disagree at r={r} "
                    f"(power {c_power:.12g} vs spectral {c_eig:.12g})"
                )
            out[i] = c_power
    return out if np.ndim(separations) else float(out[0])


def magnetization(mps: UniformRingMps, operator: Union[str, np.ndarray] = "z") -> float:
    """<O_1> for a single-site operator on the ring."""
    t_i = transfer_operator(mps.tensor, "identity")
    t_o = transfer_operator(mps.tensor, operator)
    p, _ = scaled_matrix_power(t_i, mps.n_sites - 1)
    norm_trace = _checked_trace(t_i @ p, "ring norm trace")
    return float(np.einsum("ij,ji->", t_o, p)) / norm_trace


def _site_tensor_sequence(
    state: Union[UniformRingMps, SiteTensor, Sequence[SiteTensor]],
    configuration: np.ndarray,
) -> list[np.ndarray]:
    n = len(configuration)
    if isinstance(state, UniformRingMps):
        if n != state.n_sites:
            raise ValueError(f"configuration length {n} != ring size {state.n_sites}")
        return [state.tensor.entries] * n
    if isinstance(state, SiteTensor):
        return [state.entries] * n
    tensors = list(state)
    if len(tensors) != n:
        raise ValueError(f"expected {n} site tensors, got {len(tensors)}")
    return [t.entries for t in tensors]


def comps_log_amplitude(
    state: Union[UniformRingMps, SiteTensor, Sequence[SiteTensor]],
    configuration: Iterable[int],
) -> tuple[float, float]:
    """Ring-trace amplitude as (sign, log magnitude); sign 0 means exactly zero."""
    config = np.asarray(list(configuration), dtype=int)
    if config.ndim != 1 or not np.all(np.isin(config, (1, -1))):
        raise ValueError("configuration must be a 1d array of +-1 spins")
    entries = _site_tensor_sequence(state, config)
    chi = entries[0].shape[1]
    product = np.eye(chi)
    log_scale = 0.0
    for mats, spin in zip(entries, config):
        product = product @ mats[(1 - int(spin)) // 2]
        peak = np.abs(product).max()
        if peak == 0.0:
            return 0.0, -np.inf
        if not np.isfinite(peak):
            raise DegenerateEvaluationError("amplitude product overflowed")
        product /= peak
        log_scale += np.log(peak)
    trace = float(np.trace(product))
    if trace == 0.0:
        return 0.0, -np.inf
    return float(np.sign(trace)), float(np.log(abs(trace)) + log_scale)


def comps_amplitude(
    state: Union[UniformRingMps, SiteTensor, Sequence[SiteTensor]],
    configuration: Iterable[int],
) -> float:
    """Ring-trace amplitude Tr[M^{sigma_1} ... M^{sigma_n}] as a plain float."""
    sign, log_abs = comps_log_amplitude(state, configuration)
    if sign == 0.0:
        return 0.0
    return float(sign * np.exp(log_abs))
