"""Command-line entry point tying the library into reproduction pipelines.

Every subcommand emits a self-describing artifact: CSV output carries the
tool version, resolved configuration, and timestamp as comment lines ahead
of the labeled header row; JSON output wraps the payload in an envelope with
the same fields. Payloads are pure functions of (configuration, seed,
version); the timestamp is the only field that varies between identical
runs.

A flat key=value config file can supply defaults for any flag of the chosen
subcommand; explicit flags win. Exit codes: 0 success, 2 usage errors,
3 invalid parameter ranges or malformed config, 4 unwritable output,
1 unexpected failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Optional

import numpy as np

from . import __version__
from .ansatz import (
    URBM_MAX_DIRECT_BITS,
    UrbmParameters,
    build_urbm_site_tensor,
    random_rbm_parameters,
    rbm_amplitude,
    rbm_trace_amplitude,
    urbm_amplitude_direct,
    urbm_site_tensors,
)
from .copeps import (
    MAX_DIRECT_2D_BITS,
    Urbm2dParameters,
    build_copeps_block,
    copeps_amplitude_torus,
    urbm2d_amplitude_direct,
)
from .lattice import (
    ED_MAX_SITES,
    ed_ground_state,
    ed_zz_connected_correlator,
    exact_ising_energy_density,
    exact_ising_ground_energy,
)
from .optimize import (
    MPS_CHI_CHOICES,
    OptimizerConfig,
    build_mps_reference,
    mps_delta_curve,
    optimize_uniform_mps_starts,
    optimize_urbm,
    optimize_urbm_starts,
    relative_energy_error,
    scan_urbm_lambda,
    urbm_delta_curve,
)
from .scaling import (
    NoCrossingError,
    extract_nstar,
    fit_descriptive_exponent,
    fit_power_law,
)
from .transfer import SiteTensor, UniformRingMps, connected_zz_correlator, energy_density

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_UNWRITABLE = 4

_URBM_LAYERS_BY_CHI = {4: 1, 8: 2, 16: 3}
_FIT_WINDOW_RATIO = 1e-3


class CliInputError(ValueError):
    """Parameter outside the supported range, or malformed config input."""


class UnwritableOutputError(OSError):
    """Requested output location cannot be written."""


@dataclass(frozen=True)
class _Opt:
    name: str
    type: Callable
    default: object = None
    help: str = ""
    choices: Optional[tuple] = None


_COMMON_OPTS = (
    _Opt("seed", int, 0, "base random seed"),
    _Opt("workers", int, 1, "parallel workers across independent runs"),
    _Opt("format", str, None, "output format", ("csv", "json")),
    _Opt("config", str, None, "flat key=value defaults; flags win"),
)

_SUBCOMMANDS: dict[str, tuple[tuple[_Opt, ...], str, str]] = {
    "ising-exact": (
        (
            _Opt("n", int, None, "ring size"),
            _Opt("lambda", float, None, "transverse field"),
        ),
        "csv",
        "closed-form ground-state energy of the transverse-field Ising ring",
    ),
    "map-check": (
        (
            _Opt("ansatz", str, "urbm", "which mapping to check", ("urbm", "rbm")),
            _Opt("n", int, 8, "ring size"),
            _Opt("layers", int, 1, "hidden layers (urbm)"),
            _Opt("hidden", int, 4, "hidden units (rbm)"),
            _Opt("draws", int, 20, "random parameter draws"),
            _Opt("scale", float, 0.5, "half-width of the parameter draw"),
        ),
        "json",
        "network amplitudes against exhaustive hidden summation",
    ),
    "optimize-urbm": (
        (
            _Opt("layers", int, 1, "hidden layers"),
            _Opt("lambda", float, 1.0, "transverse field"),
            _Opt("n", int, 80, "ring size"),
            _Opt("seeds", int, 8, "independent starts"),
        ),
        "json",
        "variational energy minimization of the layered Boltzmann ansatz",
    ),
    "optimize-mps": (
        (
            _Opt("chi", int, 4, "bond dimension"),
            _Opt("lambda", float, 1.0, "transverse field"),
            _Opt("n", int, 80, "ring size"),
            _Opt("seeds", int, 8, "independent starts"),
        ),
        "json",
        "variational energy minimization of the unconstrained uniform ring",
    ),
    "scan-lambda": (
        (
            _Opt("layers", int, 1, "hidden layers"),
            _Opt("n", int, 80, "ring size"),
            _Opt("lambda-min", float, 0.5, "scan start"),
            _Opt("lambda-max", float, 1.5, "scan end"),
            _Opt("steps", int, 21, "grid points"),
            _Opt("seeds", int, 8, "independent starts per point"),
        ),
        "csv",
        "energy error across the field scan, warm-started point to point",
    ),
    "corr": (
        (
            _Opt("layers", int, 2, "hidden layers"),
            _Opt("lambda", float, 1.0, "transverse field"),
            _Opt("n", int, 80, "ring size"),
            _Opt("r-max", int, 20, "largest separation"),
            _Opt("seeds", int, 8, "independent starts"),
            _Opt("params", str, None, "comma-separated couplings; skips optimization"),
            _Opt("reference-cache", str, None, "path to cache the reference tensor (.npy)"),
        ),
        "csv",
        "connected ZZ correlator against an exact or converged reference",
    ),
    "fss": (
        (
            _Opt("ansatz", str, "urbm", "which family to scale", ("urbm", "mps")),
            _Opt("chis", str, "4,8,16", "comma-separated bond dimensions"),
            _Opt("n-grid", str, "10:200:10", "sizes as start:stop:step or comma list"),
            _Opt("goal", float, 1e-5, "accuracy goal for N*"),
            _Opt("lambda", float, 1.0, "transverse field"),
            _Opt("seeds", int, 8, "starts at the first size"),
            _Opt("warm-seeds", int, 1, "fresh starts at later sizes"),
        ),
        "json",
        "finite-size scaling of the energy error and descriptive power",
    ),
    "copeps-check": (
        (
            _Opt("size", int, 3, "torus edge length"),
            _Opt("layers", int, 1, "hidden layers"),
            _Opt("draws", int, 20, "random parameter draws"),
            _Opt("scale", float, 0.5, "half-width of the parameter draw"),
        ),
        "json",
        "torus network amplitudes against exhaustive hidden summation",
    ),
}


def _build_parser() -> tuple[argparse.ArgumentParser, dict[str, set]]:
    parser = argparse.ArgumentParser(
        prog="comps",
        description="Boltzmann-machine wave functions as constrained tensor networks.",
    )
    parser.add_argument("--version", action="version", version=f"comps {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    known_keys: dict[str, set] = {}
    for command, (opts, default_format, blurb) in _SUBCOMMANDS.items():
        sub = subparsers.add_parser(command, help=blurb)
        keys = set()
        for opt in opts + _COMMON_OPTS:
            kwargs = dict(type=opt.type, default=opt.default, help=opt.help)
            if opt.choices is not None:
                kwargs["choices"] = opt.choices
            sub.add_argument(f"--{opt.name}", **kwargs)
            keys.add(opt.name)
        sub.add_argument("--output", "-o", default=None, help="output path (fss: prefix)")
        keys.update({"output"})
        sub.set_defaults(default_format=default_format)
        known_keys[command] = keys
    return parser, known_keys


def _load_config_file(path: str) -> dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise CliInputError(f"cannot read config file {path}: {exc}") from exc
    mapping = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliInputError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        mapping[key.strip().replace("_", "-")] = value.strip()
    return mapping


def _merge_config(argv, args, parser, known_keys):
    mapping = _load_config_file(args.config)
    allowed = known_keys[args.command]
    flags = []
    for key, value in mapping.items():
        if key not in allowed:
            raise CliInputError(f"config key {key!r} not recognized for {args.command}")
        flags.extend([f"--{key}", value])
    merged = [argv[0]] + flags + list(argv[1:])
    try:
        return parser.parse_args(merged)
    except SystemExit as exc:
        raise CliInputError(f"config file {args.config} holds an invalid value") from exc


def _require(condition: bool, message: str):
    if not condition:
        raise CliInputError(message)


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _options_echo(args) -> dict:
    skip = {"command", "func", "default_format", "output"}
    echo = {k: _jsonable(v) for k, v in vars(args).items() if k not in skip}
    echo["output"] = getattr(args, "output", None)
    return echo


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _csv_text(command, options, header, rows, extra_comments=()) -> str:
    lines = [
        f"# tool: comps {__version__}",
        f"# command: {command}",
        f"# config: {json.dumps(options, sort_keys=True)}",
    ]
    lines.extend(f"# {comment}" for comment in extra_comments)
    lines.append(f"# timestamp: {_timestamp()}")
    lines.append(",".join(header))
    lines.extend(",".join(_format_cell(cell) for cell in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json_text(command, options, payload) -> str:
    envelope = {
        "tool": "comps",
        "version": __version__,
        "timestamp": _timestamp(),
        "command": command,
        "config": options,
        "payload": _jsonable(payload),
    }
    return json.dumps(envelope, indent=2, sort_keys=True) + "\n"


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_text(path: Optional[str], text: str):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise UnwritableOutputError(f"cannot write {path}: {exc}") from exc


def _emit(args, payload, header, rows, extra_comments=()) -> int:
    command = args.command
    options = _options_echo(args)
    fmt = args.format or args.default_format
    if fmt == "csv":
        text = _csv_text(command, options, header, rows, extra_comments)
    else:
        payload = dict(payload)
        payload.setdefault("columns", list(header))
        payload.setdefault("rows", [list(row) for row in rows])
        text = _json_text(command, options, payload)
    _write_text(args.output, text)
    return EXIT_OK


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(seed=args.seed)


def _seed_table(results, base_seed):
    rows = []
    for i, result in enumerate(results):
        rows.append(
            {
                "seed": base_seed + i,
                "energy_density": result.best_energy_density,
                "converged": result.converged,
                "rounds_used": result.rounds_used,
                "evaluations_used": result.evaluations_used,
            }
        )
    return rows


# ---------------------------------------------------------------- subcommands


def _cmd_ising_exact(args) -> int:
    n, lam = args.n, getattr(args, "lambda")
    _require(n is not None and lam is not None, "--n and --lambda are required")
    _require(n >= 3, "need at least 3 sites")
    _require(lam >= 0, "the field must be nonnegative")
    energy = exact_ising_ground_energy(n, lam)
    payload = {"n": n, "lambda": lam, "energy": energy, "energy_density": energy / n}
    header = ("n", "lambda", "energy", "energy_density")
    return _emit(args, payload, header, [(n, lam, energy, energy / n)])


def _check_urbm_draws(n, layers, draws, scale, seed):
    rng = np.random.default_rng(seed)
    spins = np.array(
        [[1 - 2 * ((index >> j) & 1) for j in range(n)] for index in range(2**n)]
    )
    worst = []
    homogeneity = 0.0
    for _ in range(draws):
        params = UrbmParameters.from_vector(rng.uniform(-scale, scale, 2 * layers + 1), layers)
        tensors = urbm_site_tensors(params, n)
        dev = 0.0
        for configuration in spins:
            product = np.eye(tensors[0].chi)
            for site, s in enumerate(configuration):
                product = product @ tensors[site].entries[(1 - s) // 2]
            traced = float(np.trace(product))
            direct = urbm_amplitude_direct(params, configuration)
            dev = max(dev, abs(traced - direct) / abs(direct))
        worst.append(dev)
        tensor = build_urbm_site_tensor(params, rescaled=True)
        ring = UniformRingMps(tensor, n)
        scaled = UniformRingMps(tensor.scaled(1.7), n)
        base = energy_density(ring, 1.0)
        homogeneity = max(homogeneity, abs(energy_density(scaled, 1.0) - base))
    return worst, homogeneity


def _check_rbm_draws(n, hidden, draws, scale, seed):
    rng = np.random.default_rng(seed)
    spins = np.array(
        [[1 - 2 * ((index >> j) & 1) for j in range(n)] for index in range(2**n)]
    )
    worst = []
    for _ in range(draws):
        params = random_rbm_parameters(n, hidden, scale=scale, rng=rng)
        dev = 0.0
        for configuration in spins:
            closed = rbm_amplitude(params, configuration)
            traced = rbm_trace_amplitude(params, configuration)
            dev = max(dev, abs(traced - closed) / abs(closed))
        worst.append(dev)
    return worst


def _cmd_map_check(args) -> int:
    n, draws, scale = args.n, args.draws, args.scale
    _require(n >= 3, "need at least 3 sites")
    _require(draws >= 1, "need at least one draw")
    _require(scale > 0, "scale must be positive")
    if args.ansatz == "urbm":
        layers = args.layers
        _require(layers in (1, 2, 3), "layers must be 1, 2, or 3")
        _require(n <= 12, "the exhaustive configuration sweep supports up to 12 sites")
        _require(
            n * layers <= URBM_MAX_DIRECT_BITS,
            f"direct summation needs n * layers <= {URBM_MAX_DIRECT_BITS}",
        )
        worst, homogeneity = _check_urbm_draws(n, layers, draws, scale, args.seed)
        payload = {
            "ansatz": "urbm",
            "n": n,
            "layers": layers,
            "draws": draws,
            "max_rel_dev": max(worst),
            "homogeneity_max_dev": homogeneity,
        }
    else:
        hidden = args.hidden
        _require(1 <= hidden <= 8, "rbm check supports 1..8 hidden units")
        _require(n <= 10, "rbm check supports up to 10 sites")
        worst = _check_rbm_draws(n, hidden, draws, scale, args.seed)
        payload = {
            "ansatz": "rbm",
            "n": n,
            "hidden": hidden,
            "draws": draws,
            "max_rel_dev": max(worst),
            "homogeneity_max_dev": None,
        }
    rows = [(i, dev) for i, dev in enumerate(worst)]
    return _emit(args, payload, ("draw", "rel_dev"), rows)


def _cmd_optimize_urbm(args) -> int:
    n, lam, layers = args.n, getattr(args, "lambda"), args.layers
    _require(n >= 3, "need at least 3 sites")
    _require(lam >= 0, "the field must be nonnegative")
    _require(layers in (1, 2, 3), "layers must be 1, 2, or 3")
    _require(args.seeds >= 1, "need at least one seed")
    results = optimize_urbm_starts(
        layers, lam, n, _optimizer_config(args), n_starts=args.seeds, workers=args.workers
    )
    best = min(results, key=lambda r: r.best_energy_density)
    exact = exact_ising_energy_density(n, lam)
    payload = {
        "layers": layers,
        "lambda": lam,
        "n": n,
        "best_params": best.best_params,
        "energy_density": best.best_energy_density,
        "exact_density": exact,
        "delta_E": relative_energy_error(best.best_energy_density, n, lam),
        "per_seed": _seed_table(results, args.seed),
    }
    rows = [
        (row["seed"], row["energy_density"], abs((row["energy_density"] - exact) / exact))
        for row in payload["per_seed"]
    ]
    return _emit(args, payload, ("seed", "energy_density", "delta_E"), rows)


def _cmd_optimize_mps(args) -> int:
    n, lam, chi = args.n, getattr(args, "lambda"), args.chi
    _require(n >= 3, "need at least 3 sites")
    _require(lam >= 0, "the field must be nonnegative")
    _require(chi in MPS_CHI_CHOICES, f"chi must be one of {MPS_CHI_CHOICES}")
    _require(args.seeds >= 1, "need at least one seed")
    results = optimize_uniform_mps_starts(
        chi, lam, n, _optimizer_config(args), n_starts=args.seeds, workers=args.workers
    )
    best = min(results, key=lambda r: r.best_energy_density)
    exact = exact_ising_energy_density(n, lam)
    payload = {
        "chi": chi,
        "lambda": lam,
        "n": n,
        "best_params": best.best_params,
        "energy_density": best.best_energy_density,
        "exact_density": exact,
        "delta_E": relative_energy_error(best.best_energy_density, n, lam),
        "per_seed": _seed_table(results, args.seed),
    }
    rows = [
        (row["seed"], row["energy_density"], abs((row["energy_density"] - exact) / exact))
        for row in payload["per_seed"]
    ]
    return _emit(args, payload, ("seed", "energy_density", "delta_E"), rows)


def _cmd_scan_lambda(args) -> int:
    n, layers = args.n, args.layers
    lo, hi, steps = args.lambda_min, args.lambda_max, args.steps
    _require(n >= 3, "need at least 3 sites")
    _require(layers in (1, 2, 3), "layers must be 1, 2, or 3")
    _require(steps >= 1, "need at least one grid point")
    _require(0 <= lo <= hi, "need 0 <= lambda-min <= lambda-max")
    _require(args.seeds >= 1, "need at least one seed")
    fields = np.linspace(lo, hi, steps)
    results = scan_urbm_lambda(
        layers, fields, n, _optimizer_config(args), n_starts=args.seeds, workers=args.workers
    )
    rows = []
    points = []
    for lam, result in zip(fields, results):
        exact = exact_ising_energy_density(n, lam)
        delta = relative_energy_error(result.best_energy_density, n, lam)
        rows.append((float(lam), result.best_energy_density, exact, delta))
        points.append(
            {
                "lambda": float(lam),
                "energy_density": result.best_energy_density,
                "exact_density": exact,
                "delta_E": delta,
                "params": result.best_params,
            }
        )
    payload = {"layers": layers, "n": n, "points": points}
    header = ("lambda", "energy_density", "exact_density", "delta_E")
    return _emit(args, payload, header, rows)


def _reference_correlator(args, separations):
    """ZZ reference: exact diagonalization when tractable, else the chi = 32
    uniform-ring state (optionally cached on disk); returns (values, meta)."""
    n, lam = args.n, getattr(args, "lambda")
    if n <= ED_MAX_SITES:
        state = ed_ground_state(n, lam)
        values = np.array([ed_zz_connected_correlator(state, r) for r in separations])
        return values, {"reference_source": "exact_diagonalization"}
    entries = None
    if args.reference_cache is not None:
        try:
            entries = np.load(args.reference_cache)
        except OSError:
            entries = None
    if entries is None:
        tensor, _ = build_mps_reference(lam, n, _optimizer_config(args), workers=args.workers)
        entries = tensor.entries
        if args.reference_cache is not None:
            try:
                np.save(args.reference_cache, entries)
            except OSError as exc:
                raise UnwritableOutputError(f"cannot write {args.reference_cache}: {exc}") from exc
    ring = UniformRingMps(SiteTensor(np.asarray(entries, dtype=float)), n)
    values = connected_zz_correlator(ring, separations)
    return values, {
        "reference_source": "uniform_mps_chi32",
        "reference_delta_E": relative_energy_error(energy_density(ring, lam), n, lam),
    }


def _cmd_corr(args) -> int:
    n, lam, layers = args.n, getattr(args, "lambda"), args.layers
    _require(n >= 3, "need at least 3 sites")
    _require(lam >= 0, "the field must be nonnegative")
    _require(layers in (1, 2, 3), "layers must be 1, 2, or 3")
    _require(1 <= args.r_max <= n - 1, "need 1 <= r-max <= n - 1")
    if args.params is not None:
        try:
            vector = np.array([float(v) for v in args.params.split(",")])
        except ValueError as exc:
            raise CliInputError(f"cannot parse --params: {exc}") from exc
        _require(vector.size == 2 * layers + 1, f"expected {2 * layers + 1} couplings")
        params = UrbmParameters.from_vector(vector, layers)
    else:
        _require(args.seeds >= 1, "need at least one seed")
        best = optimize_urbm(
            layers, lam, n, _optimizer_config(args), n_starts=args.seeds, workers=args.workers
        )
        params = UrbmParameters.from_vector(best.best_params, layers)
    tensor = build_urbm_site_tensor(params, rescaled=True)
    ring = UniformRingMps(tensor, n)
    separations = np.arange(1, args.r_max + 1)
    values = connected_zz_correlator(ring, separations)
    reference, metadata = _reference_correlator(args, separations)
    rel_error = np.abs(values - reference) / np.abs(reference)
    rows = [
        (int(r), float(c), float(ref), float(err))
        for r, c, ref, err in zip(separations, values, reference, rel_error)
    ]
    payload = {
        "layers": layers,
        "lambda": lam,
        "n": n,
        "params": params.to_vector(),
        "ansatz_delta_E": relative_energy_error(energy_density(ring, lam), n, lam),
        **metadata,
    }
    comments = [f"reference: {metadata['reference_source']}"]
    header = ("r", "correlator", "reference", "rel_error")
    return _emit(args, payload, header, rows, comments)


def _parse_grid(text: str) -> list[int]:
    try:
        if ":" in text:
            start, stop, step = (int(v) for v in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError("need start <= stop and step > 0")
            return list(range(start, stop + 1, step))
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise CliInputError(f"cannot parse size grid {text!r}: {exc}") from exc


def run_fss(
    ansatz: str,
    chis,
    n_grid,
    goal: float = 1e-5,
    field_value: float = 1.0,
    config: OptimizerConfig = OptimizerConfig(),
    n_starts: int = 8,
    warm_starts: int = 1,
    workers: int = 1,
) -> dict:
    """Full finite-size-scaling pipeline; returns detail rows, per-chi fits,
    N* crossings (explicit no-crossing records), and the exponent summary.

    Fits use uniform weighting in log delta-E and, when enough points allow,
    only sizes with delta-E >= goal/1000 -- the near-exact floor below that
    carries no information about where the curve meets the goal.
    """
    if ansatz not in ("urbm", "mps"):
        raise CliInputError("ansatz must be urbm or mps")
    chis = sorted(int(c) for c in chis)
    n_grid = sorted(int(n) for n in n_grid)
    if len(n_grid) < 4:
        raise CliInputError("need at least 4 sizes for the power-law fit")
    if ansatz == "urbm" and any(c not in _URBM_LAYERS_BY_CHI for c in chis):
        raise CliInputError(f"urbm bond dimensions must be among {sorted(_URBM_LAYERS_BY_CHI)}")
    if ansatz == "mps" and any(c not in MPS_CHI_CHOICES or c < 2 for c in chis):
        raise CliInputError(f"mps bond dimensions must be among {[c for c in MPS_CHI_CHOICES if c >= 2]}")

    detail_rows = []
    fits = {}
    crossings = []
    no_crossing = []
    for chi in chis:
        if ansatz == "urbm":
            curve = urbm_delta_curve(
                _URBM_LAYERS_BY_CHI[chi], field_value, n_grid, config, n_starts, warm_starts, workers
            )
        else:
            curve = mps_delta_curve(
                chi, field_value, n_grid, config, n_starts, warm_starts, workers=workers
            )
        points = np.array([(n, delta) for n, delta, _ in curve])
        detail_rows.extend((chi, int(n), float(delta)) for n, delta, _ in curve)
        window = points[points[:, 1] >= goal * _FIT_WINDOW_RATIO]
        fit_points = window if window.shape[0] >= 4 else points
        fit = fit_power_law(fit_points)
        fits[chi] = fit
        try:
            estimate = extract_nstar(fit, goal)
            crossings.append((chi, estimate))
        except NoCrossingError as exc:
            no_crossing.append(
                {
                    "chi": chi,
                    "reason": str(exc),
                    "max_n": int(points[-1, 0]),
                    "delta_at_max_n": float(points[-1, 1]),
                }
            )

    exponent = {"value": None, "stderr": None}
    note = None
    if len(crossings) >= 3:
        result = fit_descriptive_exponent(
            [(chi, est.value) for chi, est in crossings], accuracy_goal=goal
        )
        exponent = {"value": result.exponent, "stderr": result.exponent_std_error}
    else:
        note = (
            f"only {len(crossings)} of {len(chis)} curves cross the goal inside the "
            "size window; descriptive-power exponent needs at least 3"
        )

    summary = {
        "ansatz": ansatz,
        "goal": goal,
        "lambda": field_value,
        "chi": [chi for chi, _ in crossings],
        "nstar": [est.value for _, est in crossings],
        "nstar_stderr": [est.std_error for _, est in crossings],
        "exponent": exponent,
        "no_crossing": no_crossing,
        "fits": {
            str(chi): {
                "a": fit.a,
                "b": fit.b,
                "c": fit.c,
                "std_errors": fit.std_errors,
                "n_points": fit.n_points,
            }
            for chi, fit in fits.items()
        },
        "fit_weighting": "uniform in log delta-E",
        "fit_window": f"delta-E >= goal * {_FIT_WINDOW_RATIO:g} when >= 4 such points",
    }
    if note is not None:
        summary["note"] = note
    return {
        "detail_rows": detail_rows,
        "nstar_rows": [(chi, est.value) for chi, est in crossings],
        "summary": summary,
    }


def _cmd_fss(args) -> int:
    chis = _parse_grid(args.chis)
    n_grid = _parse_grid(args.n_grid)
    _require(args.goal > 0, "goal must be positive")
    _require(args.seeds >= 1 and args.warm_seeds >= 1, "seed counts must be >= 1")
    _require(getattr(args, "lambda") >= 0, "the field must be nonnegative")
    result = run_fss(
        args.ansatz,
        chis,
        n_grid,
        goal=args.goal,
        field_value=getattr(args, "lambda"),
        config=_optimizer_config(args),
        n_starts=args.seeds,
        warm_starts=args.warm_seeds,
        workers=args.workers,
    )
    options = _options_echo(args)
    if args.output is not None:
        detail = _csv_text(args.command, options, ("chi", "n", "delta_E"), result["detail_rows"])
        nstar = _csv_text(args.command, options, ("chi", "nstar"), result["nstar_rows"])
        summary = _json_text(args.command, options, result["summary"])
        _write_text(f"{args.output}_detail.csv", detail)
        _write_text(f"{args.output}_nstar.csv", nstar)
        _write_text(f"{args.output}_summary.json", summary)
        return EXIT_OK
    fmt = args.format or args.default_format
    if fmt == "csv":
        raise CliInputError("csv output for fss needs --output PREFIX (three files)")
    payload = dict(result["summary"])
    payload["detail"] = {"columns": ["chi", "n", "delta_E"], "rows": result["detail_rows"]}
    _write_text(None, _json_text(args.command, options, payload))
    return EXIT_OK


def _cmd_copeps_check(args) -> int:
    size, layers, draws, scale = args.size, args.layers, args.draws, args.scale
    _require(size in (2, 3), "torus edge must be 2 or 3")
    _require(layers >= 1, "need at least one hidden layer")
    bits = size * size * layers
    _require(bits <= 12, "the sweep needs size^2 * layers <= 12")
    _require(bits <= MAX_DIRECT_2D_BITS, f"direct summation limit is {MAX_DIRECT_2D_BITS} bits")
    _require(draws >= 1, "need at least one draw")
    _require(scale > 0, "scale must be positive")
    rng = np.random.default_rng(args.seed)
    cells = size * size
    if 2**cells <= 64:
        grids = [
            np.array([1 - 2 * ((index >> j) & 1) for j in range(cells)]).reshape(size, size)
            for index in range(2**cells)
        ]
    else:
        grids = [rng.choice((1, -1), size=(size, size)) for _ in range(64)]
    worst = []
    for _ in range(draws):
        params = Urbm2dParameters(
            k0=rng.uniform(-scale, scale),
            k=rng.uniform(-scale, scale, layers),
            j=rng.uniform(-scale, scale, layers),
        )
        block = build_copeps_block(params)
        dev = 0.0
        for grid in grids:
            network = copeps_amplitude_torus(block, grid)
            direct = urbm2d_amplitude_direct(params, grid)
            dev = max(dev, abs(network - direct) / abs(direct))
        worst.append(dev)
    payload = {
        "size": size,
        "layers": layers,
        "draws": draws,
        "grids_per_draw": len(grids),
        "max_rel_dev": max(worst),
    }
    rows = [(i, dev) for i, dev in enumerate(worst)]
    return _emit(args, payload, ("draw", "rel_dev"), rows)


_DISPATCH = {
    "ising-exact": _cmd_ising_exact,
    "map-check": _cmd_map_check,
    "optimize-urbm": _cmd_optimize_urbm,
    "optimize-mps": _cmd_optimize_mps,
    "scan-lambda": _cmd_scan_lambda,
    "corr": _cmd_corr,
    "fss": _cmd_fss,
    "copeps-check": _cmd_copeps_check,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, known_keys = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.config is not None:
            args = _merge_config(argv, args, parser, known_keys)
        return _DISPATCH[args.command](args)
    except CliInputError as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "exit_code": EXIT_INVALID}) + "\n")
        return EXIT_INVALID
    except UnwritableOutputError as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "exit_code": EXIT_UNWRITABLE}) + "\n")
        return EXIT_UNWRITABLE
    except Exception as exc:  # pragma: no cover - structured last resort
        sys.stderr.write(
            json.dumps({"error": f"{type(exc).__name__}: {exc}", "exit_code": EXIT_ERROR}) + "\n"
        )
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
