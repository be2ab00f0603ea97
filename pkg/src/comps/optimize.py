"""Energy minimization by random subspace rotations with simplex local moves.

The global recipe: initialize the parameter vector K from a uniform box,
draw a random orthogonal matrix R, express the vector in the rotated frame
K' = R^T K, sweep the three-component subsets of K' with a derivative-free
simplex search accepting only strict improvements, then redraw R and repeat
until one full round improves the best energy by less than the stop
tolerance.

Ring-energy objectives are guarded: evaluation failures and energies below
the exact ground-state density map to a large finite penalty, and candidate
acceptances are re-validated with the cross-checked evaluation path, so the
search cannot descend into regions where the transfer-matrix arithmetic has
lost the true value.

The uniform-MPS driver prepends finite-difference quasi-Newton descent
stages (the objective is smooth away from the penalty walls) before the
subspace polish; bond dimensions are chained by embedding an optimized
tensor into the corner of a larger one plus small noise.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .ansatz import UrbmParameters, build_urbm_site_tensor
from .lattice import exact_ising_energy_density
from .transfer import (
    DegenerateEvaluationError,
    SiteTensor,
    UniformRingMps,
    energy_density,
)

PENALTY_ENERGY = 1.0e3
ORACLE_FLOOR_MARGIN = 1.0e-10
URBM_LAYER_CHOICES = (1, 2, 3)
MPS_CHI_CHOICES = (1, 2, 4, 8, 16, 32)
_ENUMERATION_CAP = 250_000
_EVAL_ERRORS = (
    DegenerateEvaluationError,
    FloatingPointError,
    OverflowError,
    ValueError,
    np.linalg.LinAlgError,
)


class NonFiniteObjectiveError(RuntimeError):
    """Objective returned NaN or infinity; message carries the parameters."""


@dataclass(frozen=True)
class SimplexSettings:
    """Nelder-Mead coefficients and budgets for the local subset searches."""

    initial_step: float = 0.25
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    max_iterations: int = 250
    f_tolerance: float = 1e-12
    x_tolerance: float = 1e-10
    restarts: int = 2

    def __post_init__(self):
        if self.initial_step <= 0:
            raise ValueError("initial_step must be positive")
        if self.reflection <= 0 or self.expansion <= 1:
            raise ValueError("need reflection > 0 and expansion > 1")
        if not (0 < self.contraction < 1 and 0 < self.shrink < 1):
            raise ValueError("contraction and shrink must lie in (0, 1)")
        if self.max_iterations < 1 or self.restarts < 1:
            raise ValueError("max_iterations and restarts must be >= 1")
        if self.f_tolerance < 0 or self.x_tolerance < 0:
            raise ValueError("tolerances must be nonnegative")


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the rotation recipe; subset size is fixed at three."""

    seed: int = 0
    subset_size: int = 3
    stop_tolerance: float = 1e-9
    max_rounds: int = 200
    init_range: float = 0.5
    local_search: SimplexSettings = field(default_factory=SimplexSettings)
    max_subsets_per_round: Optional[int] = None

    def __post_init__(self):
        if self.subset_size != 3:
            raise ValueError("the recipe is defined on three-component subsets")
        if self.stop_tolerance <= 0:
            raise ValueError("stop_tolerance must be positive")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.init_range <= 0:
            raise ValueError("init_range must be positive")
        if self.max_subsets_per_round is not None and self.max_subsets_per_round < 1:
            raise ValueError("max_subsets_per_round must be >= 1 when set")


@dataclass(frozen=True)
class OptimizationResult:
    best_params: np.ndarray
    best_energy_density: float
    rounds_used: int
    evaluations_used: int
    converged: bool
    history: np.ndarray

    def __post_init__(self):
        best_params = np.asarray(self.best_params, dtype=float)
        history = np.asarray(self.history, dtype=float)
        if history.size < 1 or np.any(np.diff(history) > 0):
            raise ValueError("history must be nonempty and non-increasing")
        object.__setattr__(self, "best_params", best_params)
        object.__setattr__(self, "history", history)


def _raise_non_finite(value: float, x: np.ndarray):
    shown = np.array2string(np.asarray(x, dtype=float), max_line_width=200, threshold=64)
    raise NonFiniteObjectiveError(f"objective returned {value!r} at parameters {shown}")


def _nelder_mead_once(objective, x0: np.ndarray, settings: SimplexSettings, step: float):
    dim = x0.size
    simplex = np.tile(x0, (dim + 1, 1))
    for i in range(dim):
        simplex[i + 1, i] += step
    values = np.empty(dim + 1)
    for i, vertex in enumerate(simplex):
        values[i] = objective(vertex)
    evals = dim + 1

    for _ in range(settings.max_iterations):
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        flat = values[-1] - values[0] <= settings.f_tolerance
        tight = np.max(np.abs(simplex[1:] - simplex[0])) <= settings.x_tolerance
        if flat and tight:
            break
        centroid = simplex[:-1].mean(axis=0)
        reflected = centroid + settings.reflection * (centroid - simplex[-1])
        f_reflected = objective(reflected)
        evals += 1
        if f_reflected < values[0]:
            expanded = centroid + settings.expansion * (reflected - centroid)
            f_expanded = objective(expanded)
            evals += 1
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
        else:
            if f_reflected < values[-1]:
                contracted = centroid + settings.contraction * (reflected - centroid)
            else:
                contracted = centroid - settings.contraction * (centroid - simplex[-1])
            f_contracted = objective(contracted)
            evals += 1
            if f_contracted < min(f_reflected, values[-1]):
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                for i in range(1, dim + 1):
                    simplex[i] = simplex[0] + settings.shrink * (simplex[i] - simplex[0])
                    values[i] = objective(simplex[i])
                evals += dim

    best = int(np.argmin(values))
    return simplex[best].copy(), float(values[best]), evals


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0,
    settings: SimplexSettings = SimplexSettings(),
):
    """Simplex minimization with restarts; returns (x_best, f_best, evaluations).

    Each restart rebuilds the simplex around the current best point with a
    reduced initial step, recovering from collapsed simplex geometry.
    """
    x = np.asarray(x0, dtype=float).ravel()
    if x.size < 1:
        raise ValueError("need at least one parameter")

    def checked(point):
        value = float(objective(point))
        if not np.isfinite(value):
            _raise_non_finite(value, point)
        return value

    total = 0
    best_x, best_f = x, None
    step = settings.initial_step
    for _ in range(settings.restarts):
        run_x, run_f, evals = _nelder_mead_once(checked, best_x, settings, step)
        total += evals
        if best_f is not None and run_f >= best_f - settings.f_tolerance:
            if run_f < best_f:
                best_x, best_f = run_x, run_f
            break
        best_x, best_f = run_x, run_f
        step *= 0.3
    return best_x, best_f, total


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal matrix from the QR of a Gaussian draw, sign-fixed so the
    factorization (hence the sampled matrix) is unique."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    signs = np.where(np.diag(r) >= 0, 1.0, -1.0)
    return q * signs


def _round_subsets(dim: int, size: int, limit: Optional[int], rng: np.random.Generator):
    total = math.comb(dim, size)
    if limit is None or total <= limit:
        if total > _ENUMERATION_CAP:
            raise ValueError(
                f"C({dim},{size}) = {total} subsets; set max_subsets_per_round to sample"
            )
        return list(itertools.combinations(range(dim), size))
    if total <= 2 * limit and total <= _ENUMERATION_CAP:
        everything = list(itertools.combinations(range(dim), size))
        picked = rng.choice(total, size=limit, replace=False)
        return [everything[i] for i in np.sort(picked)]
    chosen = set()
    while len(chosen) < limit:
        chosen.add(tuple(np.sort(rng.choice(dim, size=size, replace=False)).tolist()))
    return sorted(chosen)


def subspace_rotation_minimize(
    objective: Callable[[np.ndarray], float],
    dim: int,
    config: OptimizerConfig = OptimizerConfig(),
    *,
    initial_params=None,
    validator: Optional[Callable[[np.ndarray], bool]] = None,
) -> OptimizationResult:
    """Minimize over R^dim with the rotated three-component subset recipe.

    `validator`, when given, is called on every candidate that improves the
    best energy; rejection discards the candidate. Drivers use it to re-check
    accepted energies along the independent spectral evaluation path.
    """
    if dim < 3:
        raise ValueError("the subset recipe needs dim >= 3")
    rng = np.random.default_rng(config.seed)
    evaluations = 0

    def counted(point):
        nonlocal evaluations
        evaluations += 1
        value = float(objective(point))
        if not np.isfinite(value):
            _raise_non_finite(value, point)
        return value

    if initial_params is not None:
        params = np.asarray(initial_params, dtype=float).copy()
        if params.shape != (dim,):
            raise ValueError(f"initial_params must have shape ({dim},), got {params.shape}")
    else:
        params = rng.uniform(-config.init_range, config.init_range, dim)
    best_f = counted(params)

    history = []
    converged = False
    rounds_used = 0
    for _ in range(config.max_rounds):
        rounds_used += 1
        rotation = random_orthogonal(dim, rng)
        rotated = rotation.T @ params
        round_start = best_f
        for subset in _round_subsets(dim, config.subset_size, config.max_subsets_per_round, rng):
            index = np.asarray(subset)
            base = rotated.copy()

            def local(y, base=base, index=index, rotation=rotation):
                candidate = base.copy()
                candidate[index] = y
                return counted(rotation @ candidate)

            y_best, f_local, _ = nelder_mead(local, rotated[index], config.local_search)
            if f_local < best_f:
                candidate = base.copy()
                candidate[index] = y_best
                full = rotation @ candidate
                if validator is None or validator(full):
                    rotated = candidate
                    params = full
                    best_f = f_local
        history.append(best_f)
        if round_start - best_f < config.stop_tolerance:
            converged = True
            break

    return OptimizationResult(
        best_params=params,
        best_energy_density=best_f,
        rounds_used=rounds_used,
        evaluations_used=evaluations,
        converged=converged,
        history=np.asarray(history),
    )


def relative_energy_error(energy_density_value: float, n_sites: int, field_value: float) -> float:
    """delta-E = |(e - e_exact) / e_exact| in density units."""
    exact = exact_ising_energy_density(n_sites, field_value)
    return abs((energy_density_value - exact) / exact)


def default_descent_stages(chi: int) -> tuple:
    """Evaluation budgets for the two finite-difference descent stages.

    One energy evaluation costs roughly chi^6 arithmetic, so the budget
    shrinks with bond dimension; large chi relies on embedding warm starts.
    """
    budget = {16: 6_000, 32: 1_200}.get(chi, 20_000)
    return ((1e-7, budget), (1e-9, budget))


def _guarded_objective(build, field_value, n_sites, floor, method):
    def objective(vector):
        try:
            with np.errstate(all="ignore"):
                tensor = build(vector)
                value = energy_density(UniformRingMps(tensor, n_sites), field_value, method=method)
        except _EVAL_ERRORS:
            return PENALTY_ENERGY
        if not np.isfinite(value) or value < floor or value >= PENALTY_ENERGY:
            return PENALTY_ENERGY
        return value

    return objective


def _checked_validator(build, field_value, n_sites, floor):
    def validate(vector):
        try:
            with np.errstate(all="ignore"):
                tensor = build(vector)
                value = energy_density(
                    UniformRingMps(tensor, n_sites), field_value, method="checked"
                )
        except _EVAL_ERRORS:
            return False
        return bool(np.isfinite(value) and value >= floor)

    return validate


def _urbm_builder(layers):
    def build(vector):
        params = UrbmParameters.from_vector(vector, layers)
        return build_urbm_site_tensor(params, rescaled=True)

    return build


def _mps_builder(chi):
    def build(vector):
        return SiteTensor(np.asarray(vector, dtype=float).reshape(2, chi, chi))

    return build


def _urbm_start(layers, field_value, n_sites, config, initial):
    floor = exact_ising_energy_density(n_sites, field_value) - ORACLE_FLOOR_MARGIN
    build = _urbm_builder(layers)
    objective = _guarded_objective(build, field_value, n_sites, floor, "power")
    validator = _checked_validator(build, field_value, n_sites, floor)
    return subspace_rotation_minimize(
        objective, 2 * layers + 1, config, initial_params=initial, validator=validator
    )


def _run_jobs(worker, jobs, workers):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(worker, *zip(*jobs)))
    return [worker(*job) for job in jobs]


def optimize_urbm_starts(
    layers: int,
    field_value: float,
    n_sites: int,
    config: OptimizerConfig = OptimizerConfig(),
    n_starts: int = 8,
    warm_start=None,
    workers: int = 1,
) -> list[OptimizationResult]:
    """All multi-start results in seed order (warm start appended last)."""
    if layers not in URBM_LAYER_CHOICES:
        raise ValueError(f"layers must be one of {URBM_LAYER_CHOICES}")
    if n_starts < 1 and warm_start is None:
        raise ValueError("need at least one start")
    jobs = [
        (layers, field_value, n_sites, replace(config, seed=config.seed + i), None)
        for i in range(n_starts)
    ]
    if warm_start is not None:
        warm = np.asarray(warm_start, dtype=float)
        jobs.append((layers, field_value, n_sites, replace(config, seed=config.seed + n_starts), warm))
    return _run_jobs(_urbm_start, jobs, workers)


def optimize_urbm(
    layers: int,
    field_value: float,
    n_sites: int,
    config: OptimizerConfig = OptimizerConfig(),
    n_starts: int = 8,
    warm_start=None,
    workers: int = 1,
) -> OptimizationResult:
    """Best result over independent seeded starts (ties keep the first)."""
    results = optimize_urbm_starts(
        layers, field_value, n_sites, config, n_starts, warm_start, workers
    )
    return min(results, key=lambda r: r.best_energy_density)


def _mps_polish_config(config: OptimizerConfig, chi: int) -> OptimizerConfig:
    # a few sampled-subset rounds; full enumeration is hopeless at 2*chi^2
    # parameters and the descent stages already sit near a local optimum
    limit = config.max_subsets_per_round
    if limit is None:
        limit = 120
    rounds = 4 if chi <= 8 else 2
    local = replace(
        config.local_search,
        max_iterations=min(config.local_search.max_iterations, 150),
        restarts=1,
    )
    return replace(
        config,
        max_rounds=min(config.max_rounds, rounds),
        max_subsets_per_round=limit,
        local_search=local,
    )


def _mps_start(chi, field_value, n_sites, config, initial, descent_stages):
    dim = 2 * chi * chi
    floor = exact_ising_energy_density(n_sites, field_value) - ORACLE_FLOOR_MARGIN
    build = _mps_builder(chi)
    objective = _guarded_objective(build, field_value, n_sites, floor, "power")
    validator = _checked_validator(build, field_value, n_sites, floor)

    rng = np.random.default_rng(config.seed)
    if initial is not None:
        x = np.asarray(initial, dtype=float).copy()
        if x.shape != (dim,):
            raise ValueError(f"warm start must have {dim} entries, got {x.shape}")
    else:
        x = rng.uniform(-config.init_range, config.init_range, dim)

    evaluations = 1
    f_now = objective(x)
    if not np.isfinite(f_now):
        _raise_non_finite(f_now, x)
    for eps, max_evals in descent_stages:
        result = _scipy_minimize(
            objective,
            x,
            method="L-BFGS-B",
            options=dict(
                maxiter=10**6, maxfun=int(max_evals), ftol=1e-18, gtol=1e-14, eps=eps, maxcor=30
            ),
        )
        evaluations += int(result.nfev)
        if result.fun < f_now and validator(result.x):
            x, f_now = np.asarray(result.x, dtype=float), float(result.fun)

    if dim >= 3:
        polished = subspace_rotation_minimize(
            objective,
            dim,
            _mps_polish_config(config, chi),
            initial_params=x,
            validator=validator,
        )
        history = np.concatenate(([f_now], polished.history))
        return OptimizationResult(
            best_params=polished.best_params,
            best_energy_density=polished.best_energy_density,
            rounds_used=polished.rounds_used,
            evaluations_used=evaluations + polished.evaluations_used,
            converged=polished.converged,
            history=history,
        )
    x_best, f_best, evals = nelder_mead(objective, x, config.local_search)
    if f_best < f_now and validator(x_best):
        x, f_now = x_best, f_best
    return OptimizationResult(
        best_params=x,
        best_energy_density=f_now,
        rounds_used=1,
        evaluations_used=evaluations + evals,
        converged=True,
        history=np.asarray([f_now]),
    )


def optimize_uniform_mps_starts(
    chi: int,
    field_value: float,
    n_sites: int,
    config: OptimizerConfig = OptimizerConfig(),
    n_starts: int = 8,
    warm_start=None,
    descent_stages: Optional[Sequence[tuple]] = None,
    workers: int = 1,
) -> list[OptimizationResult]:
    """All uniform-ring starts in seed order (warm start appended last)."""
    if chi not in MPS_CHI_CHOICES:
        raise ValueError(f"chi must be one of {MPS_CHI_CHOICES}")
    if n_starts < 1 and warm_start is None:
        raise ValueError("need at least one start")
    if descent_stages is None:
        descent_stages = default_descent_stages(chi)
    stages = tuple((float(eps), int(budget)) for eps, budget in descent_stages)
    jobs = [
        (chi, field_value, n_sites, replace(config, seed=config.seed + i), None, stages)
        for i in range(n_starts)
    ]
    if warm_start is not None:
        warm = np.asarray(warm_start, dtype=float)
        jobs.append(
            (chi, field_value, n_sites, replace(config, seed=config.seed + n_starts), warm, stages)
        )
    return _run_jobs(_mps_start, jobs, workers)


def optimize_uniform_mps(
    chi: int,
    field_value: float,
    n_sites: int,
    config: OptimizerConfig = OptimizerConfig(),
    n_starts: int = 8,
    warm_start=None,
    descent_stages: Optional[Sequence[tuple]] = None,
    workers: int = 1,
) -> OptimizationResult:
    """Best uniform-ring result over seeded starts plus optional warm start."""
    results = optimize_uniform_mps_starts(
        chi, field_value, n_sites, config, n_starts, warm_start, descent_stages, workers
    )
    return min(results, key=lambda r: r.best_energy_density)


def embed_mps_params(params: np.ndarray, small_chi: int, chi: int, rng, noise_scale: float = 1e-2):
    """Parameter vector for bond dimension chi seeded from a smaller optimum:
    the normalized small tensor sits in the leading block, noise elsewhere."""
    if chi < small_chi:
        raise ValueError("target bond dimension must not shrink")
    small = np.asarray(params, dtype=float).reshape(2, small_chi, small_chi)
    small = small / np.abs(small).max()
    out = noise_scale * rng.standard_normal((2, chi, chi))
    out[:, :small_chi, :small_chi] += small
    return out.ravel()


def optimize_mps_chain(
    chis: Sequence[int],
    field_value: float,
    n_sites: int,
    config: OptimizerConfig = OptimizerConfig(),
    n_starts: int = 8,
    warm_starts: int = 2,
    descent_stages: Optional[Sequence[tuple]] = None,
    workers: int = 1,
) -> dict[int, OptimizationResult]:
    """Optimize increasing bond dimensions, embedding each optimum into the
    next size; larger sizes run `warm_starts` fresh seeds plus the embed."""
    chis = list(chis)
    if any(b <= a for a, b in zip(chis, chis[1:])):
        raise ValueError("bond dimensions must be strictly increasing")
    results: dict[int, OptimizationResult] = {}
    previous = None
    for chi in chis:
        if previous is None:
            best = optimize_uniform_mps(
                chi, field_value, n_sites, config, n_starts, None, descent_stages, workers
            )
        else:
            prev_chi, prev_params = previous
            rng = np.random.default_rng(config.seed + 10_000 + chi)
            warm = embed_mps_params(prev_params, prev_chi, chi, rng)
            best = optimize_uniform_mps(
                chi, field_value, n_sites, config, warm_starts, warm, descent_stages, workers
            )
        results[chi] = best
        previous = (chi, best.best_params)
    return results


def scan_urbm_lambda(
    layers: int,
    field_values: Sequence[float],
    n_sites: int,
    config: OptimizerConfig = OptimizerConfig(),
    n_starts: int = 8,
    workers: int = 1,
) -> list[OptimizationResult]:
    """Optimize along a field scan, warm-starting each point from the last."""
    results = []
    warm = None
    for field_value in field_values:
        best = optimize_urbm(
            layers, float(field_value), n_sites, config, n_starts, warm, workers
        )
        warm = best.best_params
        results.append(best)
    return results


def urbm_delta_curve(
    layers: int,
    field_value: float,
    n_grid: Sequence[int],
    config: OptimizerConfig = OptimizerConfig(),
    n_starts: int = 8,
    warm_starts: int = 1,
    workers: int = 1,
) -> list[tuple[int, float, OptimizationResult]]:
    """delta-E against system size, warm-chained along increasing N."""
    n_grid = list(n_grid)
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("system sizes must be strictly increasing")
    out = []
    warm = None
    for n in n_grid:
        k = n_starts if warm is None else warm_starts
        best = optimize_urbm(layers, field_value, int(n), config, k, warm, workers)
        warm = best.best_params
        out.append((int(n), relative_energy_error(best.best_energy_density, n, field_value), best))
    return out


def mps_delta_curve(
    chi: int,
    field_value: float,
    n_grid: Sequence[int],
    config: OptimizerConfig = OptimizerConfig(),
    n_starts: int = 8,
    warm_starts: int = 1,
    descent_stages: Optional[Sequence[tuple]] = None,
    workers: int = 1,
) -> list[tuple[int, float, OptimizationResult]]:
    """delta-E against system size for a uniform ring at fixed chi.

    The first size climbs a bond-dimension chain from chi = 4 (or lower);
    later sizes are warm-started from the previous size's optimum.
    """
    n_grid = list(n_grid)
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("system sizes must be strictly increasing")
    ladder = [c for c in MPS_CHI_CHOICES if 4 <= c <= chi] if chi > 4 else [chi]
    out = []
    warm = None
    for n in n_grid:
        if warm is None:
            chain = optimize_mps_chain(
                ladder, field_value, int(n), config, n_starts, warm_starts, descent_stages, workers
            )
            best = chain[chi]
        else:
            best = optimize_uniform_mps(
                chi, field_value, int(n), config, warm_starts, warm, descent_stages, workers
            )
        warm = best.best_params
        out.append((int(n), relative_energy_error(best.best_energy_density, n, field_value), best))
    return out


def build_mps_reference(
    field_value: float,
    n_sites: int,
    config: OptimizerConfig = OptimizerConfig(),
    workers: int = 1,
) -> tuple[SiteTensor, dict[int, OptimizationResult]]:
    """Converged chi = 32 uniform-ring state for use as a correlator reference.

    Climbs the bond-dimension ladder 4 -> 8 -> 16 with full descent budgets,
    then embeds into chi = 32 and polishes with the subspace recipe alone:
    at 2048 parameters one finite-difference gradient costs thousands of
    evaluations, while rotated three-component simplex moves still make
    progress at fixed per-round cost.
    """
    chain = optimize_mps_chain(
        (4, 8, 16), field_value, n_sites, config, n_starts=4, warm_starts=2, workers=workers
    )
    best16 = chain[16]
    rng = np.random.default_rng(config.seed + 10_032)
    warm = embed_mps_params(best16.best_params, 16, 32, rng, noise_scale=1e-3)
    polish_config = replace(
        config,
        max_rounds=min(config.max_rounds, 2),
        max_subsets_per_round=config.max_subsets_per_round or 25,
        local_search=replace(config.local_search, max_iterations=40, restarts=1),
    )
    best32 = optimize_uniform_mps(
        32,
        field_value,
        n_sites,
        polish_config,
        n_starts=0,
        warm_start=warm,
        descent_stages=(),
        workers=workers,
    )
    chain = dict(chain)
    chain[32] = best32
    tensor = SiteTensor(best32.best_params.reshape(2, 32, 32)).normalized()
    return tensor, chain
