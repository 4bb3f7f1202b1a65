"""Optimal-blockade parameter search and nonreciprocity analysis.

The two-photon amplitude vanishes exactly when

    E^2 J^2 e^{-2 i theta} + E J Omega e^{-i theta} (M + N + delta_e)
        + Omega^2 (J^2 + N delta_e) = 0

with E the microwave amplitude and Omega the cavity drive; this is the
numerator of the closed-form c2g after clearing denominators.  Because the
expression mixes e^{-i theta} and e^{+i theta} (through the real J^2), it
is not holomorphic and is solved as two real equations in (J, theta), plus
the single-excitation resonance delta_c = G + J^2/delta_e when the cavity
detuning is free.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from . import steady_state
from .params import Direction, SystemParams, wrap_angle

#: Multi-start grid; every (J, theta) pair is tried.
DEFAULT_J_STARTS = (0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0)
DEFAULT_THETA_STARTS = (0.0, 0.5 * math.pi, -0.5 * math.pi, math.pi)

MAX_NEWTON_ITERS = 60
C2G_RESIDUAL_TOL = 1e-10
_ROOT_MERGE_TOL = 1e-6
_DET_FLOOR = 1e-300


class NoRealSolution(ValueError):
    """No real (J, theta) satisfies the cancellation condition."""


class DegenerateDetuning(ValueError):
    """delta_e = 0 leaves the optimal cavity detuning undefined."""


class NotNonreciprocal(UserWarning):
    """The polished working point is not photon-blockade nonreciprocal."""


@dataclass(frozen=True)
class OptimalPoint:
    """A converged zero of the two-photon amplitude.

    ``residual`` is the achieved |c2g| at the root; ``delta_c_opt`` equals
    G + J^2/delta_e for a joint solve and echoes the fixed detuning
    otherwise.
    """

    J: float
    theta: float
    delta_c_opt: float
    residual: float
    direction: Direction


@dataclass(frozen=True)
class NonreciprocityReport:
    delta_c: float
    g2_forward: float
    g2_backward: float
    contrast: float


@dataclass(frozen=True)
class JThetaScan:
    """Rectangular (J, theta) map of g2 for both drive directions."""

    j_values: np.ndarray
    theta_values: np.ndarray
    g2: Mapping[Direction, np.ndarray]
    valid: Mapping[Direction, np.ndarray]


def _consts(params: SystemParams) -> dict[str, float]:
    if params.delta_p == 0.0:
        raise ZeroDivisionError("delta_p must be nonzero")
    return {
        "e": params.e_eg,
        "omega": math.sqrt(params.kappa_in) * params.b_in,
        "g_shift": params.g**2 / params.delta_p,
        "delta_e": params.delta_e,
        "kappa": params.kappa,
    }


def _residual(j, theta, delta_c, c) -> np.ndarray:
    """Complex cancellation polynomial, broadcast over the inputs."""
    half_loss = 0.5j * c["kappa"]
    m = delta_c - half_loss - c["g_shift"]
    n = delta_c - half_loss + c["delta_e"]
    ph = np.exp(-1j * np.asarray(theta))
    e, omega = c["e"], c["omega"]
    return (
        e**2 * j**2 * ph**2
        + e * omega * j * ph * (m + n + c["delta_e"])
        + omega**2 * (j**2 + n * c["delta_e"])
    )


def _residual_scale(j, c) -> np.ndarray:
    e, omega = c["e"], c["omega"]
    j2 = np.asarray(j) ** 2
    return (
        e**2 * j2
        + e * omega * np.abs(j) * (2.0 + abs(c["delta_e"]))
        + omega**2 * (j2 + abs(c["delta_e"]) + 1.0)
        + 1e-300
    )


def _delta_c_of(x: np.ndarray, c, fix_delta_c: bool, delta_c_fixed: float):
    """Cavity detuning as a function of the unknowns.

    A joint solve substitutes the single-excitation resonance
    delta_c = G + J^2/delta_e, so the constraint holds by construction and
    the Newton iteration stays two-dimensional either way.
    """
    if fix_delta_c:
        return delta_c_fixed
    return c["g_shift"] + x[..., 0] ** 2 / c["delta_e"]


def _jacobian(j, theta, c, fix_delta_c: bool, delta_c_fixed: float) -> np.ndarray:
    """Real 2x2 Jacobian of (Re r, Im r) with respect to (J, theta)."""
    j = np.asarray(j, dtype=float)
    delta_c = (
        delta_c_fixed if fix_delta_c else c["g_shift"] + j**2 / c["delta_e"]
    )
    half_loss = 0.5j * c["kappa"]
    m = delta_c - half_loss - c["g_shift"]
    n = delta_c - half_loss + c["delta_e"]
    ph = np.exp(-1j * np.asarray(theta))
    e, omega, de = c["e"], c["omega"], c["delta_e"]

    dr_dj = 2.0 * e**2 * j * ph**2 + e * omega * ph * (m + n + de) + 2.0 * omega**2 * j
    if not fix_delta_c:
        # Chain rule through delta_c(J); dr/d(delta_c) = 2 E Omega J ph + Omega^2 de.
        dr_dj = dr_dj + (2.0 * e * omega * j * ph + omega**2 * de) * (2.0 * j / de)
    dr_dth = -2j * e**2 * j**2 * ph**2 - 1j * e * omega * j * ph * (m + n + de)

    shape = np.broadcast(j, theta).shape
    jac = np.empty(shape + (2, 2), dtype=float)
    jac[..., 0, 0] = np.broadcast_to(np.asarray(dr_dj).real, shape)
    jac[..., 1, 0] = np.broadcast_to(np.asarray(dr_dj).imag, shape)
    jac[..., 0, 1] = np.broadcast_to(np.asarray(dr_dth).real, shape)
    jac[..., 1, 1] = np.broadcast_to(np.asarray(dr_dth).imag, shape)
    return jac


def _solve_stack(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve stacked 2x2 systems by adjugate, flagging singular ones."""
    det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    ok = np.abs(det) > _DET_FLOOR
    safe = np.where(ok, det, 1.0)
    x = np.empty_like(b)
    x[..., 0] = (b[..., 0] * a[..., 1, 1] - b[..., 1] * a[..., 0, 1]) / safe
    x[..., 1] = (a[..., 0, 0] * b[..., 1] - a[..., 1, 0] * b[..., 0]) / safe
    return x, ok


def _residual_vector(
    x: np.ndarray, c, fix_delta_c: bool, delta_c_fixed: float
) -> np.ndarray:
    r = _residual(
        x[..., 0], x[..., 1], _delta_c_of(x, c, fix_delta_c, delta_c_fixed), c
    )
    return np.stack([r.real, r.imag], axis=-1)


def _newton(
    x0: np.ndarray, c, fix_delta_c: bool, delta_c_fixed: float
) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton iteration on a stack of (J, theta) start points.

    Returns the final points and a convergence mask.  Damping halves the
    step until the residual norm stops growing (at most six halvings); a
    start whose line search cannot improve simply stalls and is reported
    unconverged.
    """
    x = x0.astype(float).copy()
    res = _residual_vector(x, c, fix_delta_c, delta_c_fixed)
    norm = np.linalg.norm(res, axis=-1)
    for _ in range(MAX_NEWTON_ITERS):
        jac = _jacobian(x[..., 0], x[..., 1], c, fix_delta_c, delta_c_fixed)
        step, ok = _solve_stack(jac, -res)
        step = np.where(ok[..., None], step, 0.0)
        alpha = np.ones(x.shape[:-1])
        best_x, best_norm = x, norm
        improved = np.zeros(x.shape[:-1], dtype=bool)
        for _ in range(7):
            trial = x + alpha[..., None] * step
            tres = _residual_vector(trial, c, fix_delta_c, delta_c_fixed)
            tnorm = np.linalg.norm(tres, axis=-1)
            with np.errstate(invalid="ignore"):
                better = np.isfinite(tnorm) & (tnorm < best_norm)
            take = better & ~improved
            best_x = np.where(take[..., None], trial, best_x)
            best_norm = np.where(take, tnorm, best_norm)
            improved |= better
            alpha = np.where(improved, alpha, alpha / 2.0)
        x, norm = best_x, best_norm
        res = _residual_vector(x, c, fix_delta_c, delta_c_fixed)
        norm = np.linalg.norm(res, axis=-1)
        scale = _residual_scale(x[..., 0], c)
        if bool(np.all(norm <= 1e-11 * scale)):
            break
    scale = _residual_scale(x[..., 0], c)
    converged = np.isfinite(norm) & (norm <= 1e-11 * scale)
    return x, converged


def _canonical(j: float, theta: float) -> tuple[float, float]:
    """Pick, of the equivalent pair (J, theta) and (-J, theta+pi), the
    representative with theta closest to 0 (positive theta on an exact tie)."""
    theta = wrap_angle(theta)
    alt_theta = wrap_angle(theta + math.pi)
    candidates = [(j, theta), (-j, alt_theta)]
    candidates.sort(key=lambda jt: (abs(jt[1]), 0.0 if jt[1] >= 0.0 else 1.0))
    return candidates[0]


def _c2g_magnitude(params: SystemParams, j, theta, delta_c) -> float:
    c = _consts(params)
    half_loss = 0.5j * c["kappa"]
    m = delta_c - half_loss - c["g_shift"]
    n = delta_c - half_loss + c["delta_e"]
    amps, valid = steady_state.amplitude_arrays(
        c["omega"], m, n, c["delta_e"], j, theta, c["e"]
    )
    if not bool(np.all(valid)):
        return math.inf
    return float(np.abs(amps[..., 3]))


def find_roots(
    params: SystemParams,
    fix_delta_c: bool = False,
    *,
    j_starts: Sequence[float] = DEFAULT_J_STARTS,
    theta_starts: Sequence[float] = DEFAULT_THETA_STARTS,
) -> list[OptimalPoint]:
    """All distinct cancellation roots found from the multi-start grid.

    Roots are canonicalized (theta in (-pi, pi], the (J, theta) sign
    ambiguity resolved toward theta closest to 0), merged when closer than
    1e-6, and sorted by the selection rule: smallest |J| first, ties broken
    by theta closest to zero.
    """
    if params.e_eg == 0.0:
        raise NoRealSolution(
            "with the microwave drive off the cancellation condition reduces to "
            "J**2 + N*delta_e = 0, whose imaginary part -kappa*delta_e/2 cannot "
            "vanish for kappa > 0; no real (J, theta) exists"
        )
    if not fix_delta_c and params.delta_e == 0.0:
        raise DegenerateDetuning(
            "the optimal cavity detuning delta_c = G + J**2/delta_e is undefined "
            "for delta_e = 0"
        )
    c = _consts(params)

    starts = [(j0, th0) for j0 in j_starts for th0 in theta_starts]
    x0 = np.array(starts, dtype=float)
    x, converged = _newton(x0, c, fix_delta_c, params.delta_c)

    roots: list[OptimalPoint] = []
    for row, ok in zip(x, converged):
        if not ok:
            continue
        j_val, theta_val = _canonical(float(row[0]), float(row[1]))
        # The sign flip preserves J^2, so the joint detuning is unchanged.
        dc = (
            params.delta_c
            if fix_delta_c
            else c["g_shift"] + j_val**2 / c["delta_e"]
        )
        residual = _c2g_magnitude(params, j_val, theta_val, dc)
        if not (residual < C2G_RESIDUAL_TOL):
            continue
        if any(
            abs(r.J - j_val) < _ROOT_MERGE_TOL
            and abs(r.theta - theta_val) < _ROOT_MERGE_TOL
            and abs(r.delta_c_opt - dc) < _ROOT_MERGE_TOL
            for r in roots
        ):
            continue
        roots.append(
            OptimalPoint(
                J=j_val,
                theta=theta_val,
                delta_c_opt=dc,
                residual=residual,
                direction=params.direction,
            )
        )
    roots.sort(
        key=lambda r: (
            abs(r.J),
            abs(r.theta),
            0.0 if r.theta >= 0.0 else 1.0,
            r.delta_c_opt,
        )
    )
    return roots


def solve_optimal(params: SystemParams, fix_delta_c: bool = False) -> OptimalPoint:
    """The selected cancellation root (smallest |J|, then theta nearest 0).

    Use :func:`find_roots` for the full list of converged roots.
    """
    roots = find_roots(params, fix_delta_c)
    if not roots:
        raise NoRealSolution(
            "no multi-start Newton run converged to a real cancellation root"
        )
    return roots[0]


def solve_optimal_arrays(
    e,
    omega,
    g_shift,
    delta_e,
    kappa,
    *,
    fix_delta_c: bool = False,
    delta_c=0.0,
    j_starts: Sequence[float] = DEFAULT_J_STARTS,
    theta_starts: Sequence[float] = DEFAULT_THETA_STARTS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Column-wise cancellation roots over arrays of system constants.

    Broadcasts every constant to a common shape, runs the multi-start
    Newton on all columns at once, and applies the same canonicalization
    and selection rule as :func:`find_roots`.  Returns (J, theta,
    delta_c_opt, ok); columns without a real solution (microwave off,
    delta_e = 0 on a joint solve, or no converged start) have ok = False
    and NaN entries.
    """
    e, omega, g_shift, delta_e, kappa, delta_c = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (e, omega, g_shift, delta_e, kappa, delta_c))
    )
    shape = e.shape
    flat = lambda a: a.reshape(-1)
    c = {
        "e": flat(e),
        "omega": flat(omega),
        "g_shift": flat(g_shift),
        "delta_e": flat(delta_e),
        "kappa": flat(kappa),
    }
    dc_fixed = flat(delta_c)
    k = c["e"].size

    solvable = c["e"] != 0.0
    if not fix_delta_c:
        solvable &= c["delta_e"] != 0.0
    starts = [(j0, th0) for j0 in j_starts for th0 in theta_starts]
    x0 = np.array(starts, dtype=float)[:, None, :] * np.ones((1, k, 1))
    # Unsolvable columns (delta_e = 0 on a joint solve) divide by zero inside
    # the iteration; they are masked below, so silence numpy for the batch.
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        x, converged = _newton(x0, c, fix_delta_c, dc_fixed)
    converged &= solvable[None, :]

    # |c2g| = |r| / (sqrt(2) |d1 d2|): the cancellation polynomial is the
    # numerator of the closed-form two-photon amplitude.
    with np.errstate(invalid="ignore", divide="ignore"):
        dc_all = (
            dc_fixed if fix_delta_c else c["g_shift"] + x[..., 0] ** 2 / c["delta_e"]
        )
        r = _residual(x[..., 0], x[..., 1], dc_all, c)
        half_loss = 0.5j * c["kappa"]
        m = dc_all - half_loss - c["g_shift"]
        n = dc_all - half_loss + c["delta_e"]
        d1 = x[..., 0] ** 2 - m * c["delta_e"]
        d2 = x[..., 0] ** 2 - m * n
        c2g_mag = np.abs(r) / (math.sqrt(2.0) * np.abs(d1) * np.abs(d2))
    converged &= np.isfinite(c2g_mag) & (c2g_mag < C2G_RESIDUAL_TOL)

    j_out = np.full(k, np.nan)
    theta_out = np.full(k, np.nan)
    dc_out = np.full(k, np.nan)
    ok = np.zeros(k, dtype=bool)
    for col in range(k):
        roots: list[tuple[float, float, float]] = []
        for s in range(x.shape[0]):
            if not converged[s, col]:
                continue
            j_val, theta_val = _canonical(float(x[s, col, 0]), float(x[s, col, 1]))
            dc = (
                float(dc_fixed[col])
                if fix_delta_c
                else float(c["g_shift"][col] + j_val**2 / c["delta_e"][col])
            )
            if any(
                abs(r0 - j_val) < _ROOT_MERGE_TOL
                and abs(t0 - theta_val) < _ROOT_MERGE_TOL
                and abs(d0 - dc) < _ROOT_MERGE_TOL
                for r0, t0, d0 in roots
            ):
                continue
            roots.append((j_val, theta_val, dc))
        if not roots:
            continue
        roots.sort(key=lambda r0: (abs(r0[0]), abs(r0[1]), 0.0 if r0[1] >= 0.0 else 1.0, r0[2]))
        j_out[col], theta_out[col], dc_out[col] = roots[0]
        ok[col] = True
    return (
        j_out.reshape(shape),
        theta_out.reshape(shape),
        dc_out.reshape(shape),
        ok.reshape(shape),
    )


def scan_j_theta(
    params: SystemParams,
    j_range: tuple[float, float] = (-3.0, 3.0),
    theta_range: tuple[float, float] = (-math.pi, math.pi),
    resolution: int = 201,
) -> JThetaScan:
    """g2 over a rectangular (J, theta) grid for both drive directions."""
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    if not (j_range[0] < j_range[1]) or not (theta_range[0] < theta_range[1]):
        raise ValueError("ranges must be increasing (min, max) pairs")
    j_values = np.linspace(j_range[0], j_range[1], resolution)
    theta_values = np.linspace(theta_range[0], theta_range[1], resolution)
    jj = j_values[:, None]
    tt = theta_values[None, :]

    g2: dict[Direction, np.ndarray] = {}
    valid: dict[Direction, np.ndarray] = {}
    for direction in Direction:
        p = replace(params, direction=direction)
        c = _consts(p)
        half_loss = 0.5j * c["kappa"]
        m = p.delta_c - half_loss - c["g_shift"]
        n = p.delta_c - half_loss + c["delta_e"]
        amps, ok = steady_state.amplitude_arrays(
            c["omega"], m, n, c["delta_e"], jj, tt, c["e"]
        )
        stats = steady_state.stats_arrays(amps)
        g2[direction] = stats["g2"]
        valid[direction] = ok
    return JThetaScan(j_values=j_values, theta_values=theta_values, g2=g2, valid=valid)


def nonreciprocal_point(
    params: SystemParams,
    target_delta_c: float,
    *,
    j_limit: float = 5.0,
    resolution: int = 161,
) -> tuple[float, float, NonreciprocityReport]:
    """Working point (J, theta) for one-way blockade at a target detuning.

    Scans the (J, theta) plane at the target cavity detuning, restricts to
    the region where the reverse direction is bunched (g2 > 1) when that
    region exists, seeds a Newton polish of the forward cancellation root
    from the best grid point, and falls back to a direct simplex
    minimization of forward g2 if the polish fails.  Warns NotNonreciprocal
    when the final point does not separate the two directions.
    """
    at_target = replace(params, delta_c=float(target_delta_c))
    scan = scan_j_theta(
        at_target, (-j_limit, j_limit), (-math.pi, math.pi), resolution
    )
    fwd = scan.g2[Direction.FORWARD]
    bwd = scan.g2[Direction.BACKWARD]
    ok = scan.valid[Direction.FORWARD] & scan.valid[Direction.BACKWARD]
    ok &= np.isfinite(fwd) & np.isfinite(bwd)
    if not bool(np.any(ok)):
        raise NoRealSolution("the (J, theta) scan produced no valid points")
    bunched = ok & (bwd > 1.0)
    candidates = bunched if bool(np.any(bunched)) else ok
    masked = np.where(candidates, fwd, np.inf)
    i, k = np.unravel_index(int(np.argmin(masked)), masked.shape)
    j_seed, theta_seed = float(scan.j_values[i]), float(scan.theta_values[k])

    j_best, theta_best = j_seed, theta_seed
    forward = replace(at_target, direction=Direction.FORWARD)
    try:
        roots = find_roots(
            forward, fix_delta_c=True, j_starts=(j_seed,), theta_starts=(theta_seed,)
        )
    except (NoRealSolution, DegenerateDetuning):
        roots = []
    if roots:
        j_best, theta_best = roots[0].J, roots[0].theta
    else:
        def objective(x):
            val = _forward_g2(at_target, x[0], x[1])
            return math.log10(val) if val > 0.0 else -300.0

        sol = minimize(
            objective,
            x0=np.array([j_seed, theta_seed]),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000},
        )
        j_best, theta_best = _canonical(float(sol.x[0]), float(sol.x[1]))

    g2_f = _forward_g2(at_target, j_best, theta_best)
    g2_b = _backward_g2(at_target, j_best, theta_best)
    contrast = (
        math.log10(g2_b / g2_f)
        if g2_f > 0.0 and g2_b > 0.0 and math.isfinite(g2_f) and math.isfinite(g2_b)
        else math.nan
    )
    if not (g2_b > 1.0):
        warnings.warn(
            f"backward g2 = {g2_b:.3g} <= 1 at the selected point; "
            "the blockade is not nonreciprocal here",
            NotNonreciprocal,
            stacklevel=2,
        )
    report = NonreciprocityReport(
        delta_c=float(target_delta_c),
        g2_forward=g2_f,
        g2_backward=g2_b,
        contrast=contrast,
    )
    return j_best, theta_best, report


def _direction_g2(params: SystemParams, direction: Direction, j, theta) -> float:
    p = replace(params, direction=direction)
    c = _consts(p)
    half_loss = 0.5j * c["kappa"]
    m = p.delta_c - half_loss - c["g_shift"]
    n = p.delta_c - half_loss + c["delta_e"]
    amps, valid = steady_state.amplitude_arrays(
        c["omega"], m, n, c["delta_e"], j, theta, c["e"]
    )
    if not bool(np.all(valid)):
        return math.inf
    return float(steady_state.stats_arrays(amps)["g2"])


def _forward_g2(params: SystemParams, j, theta) -> float:
    return _direction_g2(params, Direction.FORWARD, j, theta)


def _backward_g2(params: SystemParams, j, theta) -> float:
    return _direction_g2(params, Direction.BACKWARD, j, theta)


__all__ = [
    "DEFAULT_J_STARTS",
    "DEFAULT_THETA_STARTS",
    "DegenerateDetuning",
    "JThetaScan",
    "NonreciprocityReport",
    "NoRealSolution",
    "NotNonreciprocal",
    "OptimalPoint",
    "find_roots",
    "nonreciprocal_point",
    "scan_j_theta",
    "solve_optimal",
]
