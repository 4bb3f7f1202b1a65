"""Parameter sweeps over the analytic steady state.

A sweep evaluates the closed-form photon statistics on a 1-D or 2-D grid
of parameter values, optionally re-solving the optimal-blockade (J, theta)
at every grid point.  Mirror asymmetry is preserved under a kappa1 axis by
sliding kappa2 = 2 kappa - kappa1, so the total linewidth stays the unit
of every other quantity.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import __version__
from . import optimizer, steady_state
from .params import (
    DETUNING_RATIO_MIN,
    WEAK_DRIVE_MAX,
    ConfigError,
    Direction,
    RegimeWarning,
    SystemParams,
)

#: Parameter names accepted as sweep axes and fixed overrides.
FIELD_NAMES = tuple(
    f.name
    for f in dataclasses.fields(SystemParams)
    if f.name not in ("direction", "delta_he")
)
AXIS_NAMES = FIELD_NAMES + ("J", "theta")

OBSERVABLES = ("g2", "n_paper", "n_full", "p1", "p2")

STAT_COLUMNS = ("p1", "p2", "g2", "n_paper", "n_full")


def effective_arrays(
    params: SystemParams, overrides: Mapping[str, object]
) -> dict[str, np.ndarray]:
    """Effective-model coefficient arrays with per-point overrides.

    Override values broadcast against each other; any SystemParams numeric
    field plus the direct couplings J and theta are accepted.  Overriding
    kappa1 (or kappa2) alone adjusts the opposite mirror to keep the total
    kappa fixed.
    """
    unknown = set(overrides) - set(AXIS_NAMES)
    if unknown:
        raise ConfigError(f"unknown override keys: {sorted(unknown)}")
    arrays = {k: np.asarray(v, dtype=float) for k, v in overrides.items()}

    def get(name: str) -> np.ndarray:
        if name in arrays:
            return arrays[name]
        return np.asarray(getattr(params, name), dtype=float)

    kappa = get("kappa")
    if "kappa1" in arrays and "kappa2" not in arrays:
        kappa1 = arrays["kappa1"]
        kappa2 = 2.0 * kappa - kappa1
    elif "kappa2" in arrays and "kappa1" not in arrays:
        kappa2 = arrays["kappa2"]
        kappa1 = 2.0 * kappa - kappa2
    else:
        kappa1, kappa2 = get("kappa1"), get("kappa2")
    if np.any(kappa <= 0.0) or np.any(kappa1 <= 0.0) or np.any(kappa2 <= 0.0):
        raise ConfigError("decay rates must stay positive over the grid")

    delta_p = get("delta_p")
    if np.any(delta_p == 0.0):
        raise ZeroDivisionError("delta_p must be nonzero")
    g = get("g")
    e_he = get("e_he")
    e_eg = get("e_eg")
    b_in = get("b_in")
    delta_e = get("delta_e")
    delta_c = get("delta_c")

    if "J" in arrays:
        j = arrays["J"]
    else:
        j = g * e_he / delta_p
    if "theta" in arrays:
        theta = arrays["theta"]
    else:
        # The statistics are 2*pi-periodic in theta, so no canonical wrap
        # is needed on the array path.
        theta = get("phi_p") - get("phi_he") - get("phi_eg")

    kappa_in = kappa1 if params.direction is Direction.FORWARD else kappa2
    omega = np.sqrt(kappa_in) * b_in
    g_shift = g**2 / delta_p
    half_loss = 0.5j * kappa
    m = delta_c - half_loss - g_shift
    n = delta_c - half_loss + delta_e

    out = {
        "omega": omega,
        "m": m,
        "n": n,
        "delta_e": delta_e,
        "j": j,
        "theta": theta,
        "e_eg": e_eg,
        "g_shift": g_shift,
        "kappa": kappa,
        "delta_c": delta_c,
        "e": e_eg,
    }
    _warn_regimes(g, delta_p, omega, e_eg, kappa)
    return out


def _warn_regimes(g, delta_p, omega, e_eg, kappa) -> None:
    """One aggregate RegimeWarning per violated condition, not per point."""
    checks = [
        (
            np.any((g > 0) & (np.abs(delta_p / np.maximum(g, 1e-300)) <= DETUNING_RATIO_MIN)),
            "grid points violate |delta_p/g| > 10",
        ),
        (
            np.any(omega / kappa >= WEAK_DRIVE_MAX),
            "grid points violate the weak cavity drive condition Omega/kappa < 0.1",
        ),
        (
            np.any(e_eg / kappa >= WEAK_DRIVE_MAX),
            "grid points violate the weak microwave condition E_eg/kappa < 0.1",
        ),
    ]
    for hit, message in checks:
        if bool(hit):
            warnings.warn(message, RegimeWarning, stacklevel=3)


@dataclass(frozen=True)
class SweepAxis:
    name: str
    minimum: float
    maximum: float
    count: int

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ConfigError(
                f"axis parameter {self.name!r} is not a system parameter, J, or theta"
            )
        if not (self.minimum < self.maximum):
            raise ConfigError(
                f"axis {self.name}: need minimum < maximum, got "
                f"[{self.minimum!r}, {self.maximum!r}]"
            )
        if self.count < 2:
            raise ConfigError(f"axis {self.name}: need at least 2 points")

    def values(self) -> np.ndarray:
        return np.linspace(self.minimum, self.maximum, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axis1: SweepAxis
    axis2: SweepAxis | None = None
    overrides: Mapping[str, float] = dataclasses.field(default_factory=dict)
    directions: tuple[Direction, ...] = (Direction.FORWARD, Direction.BACKWARD)
    observable: str = "g2"
    optimal_j_theta: bool = False

    def __post_init__(self) -> None:
        if self.observable not in OBSERVABLES:
            raise ConfigError(
                f"observable must be one of {OBSERVABLES}, got {self.observable!r}"
            )
        bad = set(self.overrides) - set(AXIS_NAMES)
        if bad:
            raise ConfigError(f"unknown override keys: {sorted(bad)}")
        if not self.directions:
            raise ConfigError("at least one direction is required")
        names = {self.axis1.name}
        if self.axis2 is not None:
            if self.axis2.name == self.axis1.name:
                raise ConfigError("axis1 and axis2 must differ")
            names.add(self.axis2.name)
        clash = names & set(self.overrides)
        if clash:
            raise ConfigError(f"override keys collide with axes: {sorted(clash)}")
        if self.optimal_j_theta and (names | set(self.overrides)) & {"J", "theta"}:
            raise ConfigError(
                "optimal_j_theta resolves J and theta; they cannot also be set"
            )

    @property
    def shape(self) -> tuple[int, ...]:
        if self.axis2 is None:
            return (self.axis1.count,)
        return (self.axis1.count, self.axis2.count)


def parse_directions(text: str) -> tuple[Direction, ...]:
    key = text.strip().lower()
    if key == "both":
        return (Direction.FORWARD, Direction.BACKWARD)
    try:
        return (Direction(key),)
    except ValueError:
        raise ConfigError(
            f"directions must be forward, backward, or both; got {text!r}"
        ) from None


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    base: SystemParams
    values1: np.ndarray
    values2: np.ndarray | None
    stats: Mapping[Direction, Mapping[str, np.ndarray]]
    valid: Mapping[Direction, np.ndarray]
    j_used: Mapping[Direction, np.ndarray]
    theta_used: Mapping[Direction, np.ndarray]
    delta_c_opt: Mapping[Direction, np.ndarray | None]
    provenance: Mapping[str, str]

    def observable_grid(self, direction: Direction) -> np.ndarray:
        return self.stats[direction][self.spec.observable]


def _provenance(spec: SweepSpec, base: SystemParams) -> dict[str, str]:
    canon = repr((spec, base)).encode()
    return {
        "version": __version__,
        "config_hash": hashlib.sha256(canon).hexdigest()[:16],
    }


def _axis_overrides(spec: SweepSpec) -> dict[str, np.ndarray]:
    v1 = spec.axis1.values()
    if spec.axis2 is None:
        return {spec.axis1.name: v1}
    v2 = spec.axis2.values()
    return {spec.axis1.name: v1[:, None], spec.axis2.name: v2[None, :]}


def _solve_optimal_grid(
    params: SystemParams, spec: SweepSpec, grid: Mapping[str, np.ndarray]
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Joint-optimal (J, theta) per grid point, solved over the reduced
    grid of parameters the optimum actually depends on (delta_c drops
    out of a joint solve)."""
    solver_grid = {k: v for k, v in grid.items() if k != "delta_c"}
    consts = effective_arrays(params, solver_grid)
    j, theta, dc_opt, ok = optimizer.solve_optimal_arrays(
        consts["e"],
        consts["omega"],
        consts["g_shift"],
        consts["delta_e"],
        consts["kappa"],
        fix_delta_c=False,
    )
    target = spec.shape
    return (
        np.broadcast_to(j, target),
        np.broadcast_to(theta, target),
        np.broadcast_to(dc_opt, target),
        np.broadcast_to(ok, target),
    )


def _evaluate_direction(
    params: SystemParams, spec: SweepSpec, jobs: int | None
) -> tuple[dict[str, np.ndarray], np.ndarray, np.ndarray, np.ndarray, np.ndarray | None]:
    grid = dict(_axis_overrides(spec))
    for key, value in spec.overrides.items():
        grid[key] = np.asarray(float(value))

    dc_opt = None
    solver_ok = None
    if spec.optimal_j_theta:
        j_arr, theta_arr, dc_opt, solver_ok = _solve_optimal_grid(params, spec, grid)
        grid["J"] = j_arr
        grid["theta"] = theta_arr
        if "delta_c" not in grid:
            # Without a detuning axis the natural operating point is the
            # per-point optimal detuning itself.
            grid["delta_c"] = dc_opt

    consts = effective_arrays(params, grid)
    full_shape = spec.shape

    def evaluate(rows: slice) -> tuple[dict[str, np.ndarray], np.ndarray]:
        def cut(a: np.ndarray) -> np.ndarray:
            a = np.broadcast_to(a, full_shape)
            return a[rows]

        with np.errstate(invalid="ignore"):
            amps, ok = steady_state.amplitude_arrays(
                cut(consts["omega"]),
                cut(consts["m"]),
                cut(consts["n"]),
                cut(consts["delta_e"]),
                cut(consts["j"]),
                cut(consts["theta"]),
                cut(consts["e_eg"]),
            )
            stats = steady_state.stats_arrays(amps)
        return stats, ok

    n_rows = spec.axis1.count
    workers = max(1, jobs or 1)
    if workers == 1 or n_rows < 4:
        chunks = [slice(0, n_rows)]
    else:
        per = math.ceil(n_rows / workers)
        chunks = [slice(i, min(i + per, n_rows)) for i in range(0, n_rows, per)]

    stat_out = {
        name: np.full(full_shape, np.nan)
        for name in STAT_COLUMNS + ("norm",)
    }
    valid = np.zeros(full_shape, dtype=bool)
    if len(chunks) == 1:
        results = [evaluate(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, chunks))
    for rows, (stats, ok) in zip(chunks, results):
        for name in stat_out:
            stat_out[name][rows] = stats[name]
        valid[rows] = ok
    if solver_ok is not None:
        valid &= solver_ok

    j_used = np.broadcast_to(consts["j"], full_shape)
    theta_used = np.broadcast_to(consts["theta"], full_shape)
    return stat_out, valid, np.array(j_used), np.array(theta_used), dc_opt


def run_sweep(
    spec: SweepSpec, base: SystemParams, *, jobs: int | None = None
) -> SweepResult:
    """Evaluate the analytic steady state over the requested grid.

    Work is split into row chunks when ``jobs`` > 1 and reassembled in
    index order, so parallel and serial runs produce identical arrays.
    """
    stats: dict[Direction, dict[str, np.ndarray]] = {}
    valid: dict[Direction, np.ndarray] = {}
    j_used: dict[Direction, np.ndarray] = {}
    theta_used: dict[Direction, np.ndarray] = {}
    dc_opt: dict[Direction, np.ndarray | None] = {}
    for direction in spec.directions:
        p = dataclasses.replace(base, direction=direction)
        s, ok, j_arr, theta_arr, dc = _evaluate_direction(p, spec, jobs)
        stats[direction] = s
        valid[direction] = ok
        j_used[direction] = j_arr
        theta_used[direction] = theta_arr
        dc_opt[direction] = None if dc is None else np.array(dc)
    return SweepResult(
        spec=spec,
        base=base,
        values1=spec.axis1.values(),
        values2=None if spec.axis2 is None else spec.axis2.values(),
        stats=stats,
        valid=valid,
        j_used=j_used,
        theta_used=theta_used,
        delta_c_opt=dc_opt,
        provenance=_provenance(spec, base),
    )


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        return ""
    return repr(float(x))


def _preamble(result: SweepResult) -> list[str]:
    spec = result.spec
    lines = [
        f"# version = {result.provenance['version']}",
        f"# config_hash = {result.provenance['config_hash']}",
        f"# axis1 = {spec.axis1.name}, {_fmt(spec.axis1.minimum)}, "
        f"{_fmt(spec.axis1.maximum)}, {spec.axis1.count}",
    ]
    if spec.axis2 is not None:
        lines.append(
            f"# axis2 = {spec.axis2.name}, {_fmt(spec.axis2.minimum)}, "
            f"{_fmt(spec.axis2.maximum)}, {spec.axis2.count}"
        )
    return lines


def write_sweep_csv(result: SweepResult, path) -> list[str]:
    """Serialize a sweep; 1-D grids go to one file, 2-D to one per direction.

    Returns the written file names.  Invalid or non-finite values are
    left as empty cells; the ``valid`` column makes the mask explicit.
    """
    import pathlib

    path = pathlib.Path(path)
    if result.spec.axis2 is None:
        lines = _preamble(result)
        header = [result.spec.axis1.name, "direction"] + list(STAT_COLUMNS) + ["valid"]
        lines.append(",".join(header))
        for direction in result.spec.directions:
            stats = result.stats[direction]
            ok = result.valid[direction]
            for i, x in enumerate(result.values1):
                cells = [_fmt(x), direction.value]
                for name in STAT_COLUMNS:
                    cells.append(_fmt(stats[name][i]) if ok[i] else "")
                cells.append("true" if ok[i] else "false")
                lines.append(",".join(cells))
        path.write_text("\n".join(lines) + "\n")
        return [path.name]

    written = []
    for direction in result.spec.directions:
        target = path.with_name(f"{path.stem}_{direction.value}{path.suffix}")
        lines = _preamble(result)
        lines.append(f"# observable = {result.spec.observable}")
        grid = result.observable_grid(direction)
        ok = result.valid[direction]
        for i in range(result.spec.axis1.count):
            row = [
                _fmt(grid[i, k]) if ok[i, k] else ""
                for k in range(result.spec.axis2.count)
            ]
            lines.append(",".join(row))
        target.write_text("\n".join(lines) + "\n")
        written.append(target.name)
    return written


__all__ = [
    "AXIS_NAMES",
    "FIELD_NAMES",
    "OBSERVABLES",
    "STAT_COLUMNS",
    "SweepAxis",
    "SweepResult",
    "SweepSpec",
    "effective_arrays",
    "parse_directions",
    "run_sweep",
    "write_sweep_csv",
]
