"""Perturbative steady-state amplitudes and photon statistics.

Under weak driving the amplitude hierarchy can be truncated order by
order: the single-excitation pair (c1g, c0e) is solved with the
two-excitation feedback dropped, then the two-excitation pair (c2g, c1e)
is slaved to it.  The resulting closed forms are what every sweep and the
optimality analysis run on; the RK4 integrator is the independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dynamics import AmplitudeState
from .params import Direction, EffectiveParams, SystemParams, derive_effective

SQRT2 = math.sqrt(2.0)

#: Denominators smaller than this (in kappa**2 units) are treated as singular.
SINGULAR_TOL = 1e-10

#: Below this total photonic occupation g2 is reported as undefined (NaN).
G2_OCCUPATION_FLOOR = 1e-30


class SingularDenominator(ValueError):
    """A steady-state denominator is too close to zero to invert."""

    def __init__(self, which: str, magnitude: float):
        self.which = which
        self.magnitude = magnitude
        super().__init__(
            f"steady-state denominator {which} has magnitude {magnitude:.3e} "
            f"<= {SINGULAR_TOL:g} kappa^2"
        )


@dataclass(frozen=True)
class PhotonStats:
    """Occupation probabilities and the equal-time two-photon correlation.

    ``g2`` is NaN when the photonic occupation p1 + 2 p2 vanishes; it is
    never silently reported as zero.  ``n_cavity_paper`` is the leading
    |c1g|**2 estimate of the photon number; ``n_cavity_full`` adds the
    dressed and two-photon contributions |c1e|**2 + 2 |c2g|**2.
    """

    p1: float
    p2: float
    g2: float
    n_cavity_paper: float
    n_cavity_full: float
    norm: float


def amplitude_arrays(
    omega,
    m,
    n,
    delta_e,
    j,
    theta,
    e_eg,
) -> tuple[np.ndarray, np.ndarray]:
    """Steady amplitudes for broadcastable parameter arrays.

    Returns ``(c, valid)`` where c has shape (*S, 5) ordered as
    dynamics.BASIS_LABELS and valid flags points whose denominators are
    safely away from zero.  Invalid points carry NaN amplitudes.
    """
    omega, m, n, delta_e, j, theta, e_eg = np.broadcast_arrays(
        np.asarray(omega, dtype=float),
        np.asarray(m, dtype=complex),
        np.asarray(n, dtype=complex),
        np.asarray(delta_e, dtype=float),
        np.asarray(j, dtype=float),
        np.asarray(theta, dtype=float),
        np.asarray(e_eg, dtype=float),
    )
    phase_minus = np.exp(-1j * theta)
    phase_plus = np.conj(phase_minus)

    d1 = j**2 - m * delta_e
    d2 = j**2 - m * n
    valid = (np.abs(d1) > SINGULAR_TOL) & (np.abs(d2) > SINGULAR_TOL)

    with np.errstate(divide="ignore", invalid="ignore"):
        safe1 = np.where(valid, d1, 1.0)
        safe2 = np.where(valid, d2, 1.0)
        c1g = (e_eg * j * phase_minus + omega * delta_e) / safe1
        c0e = (e_eg * m + omega * j * phase_plus) / safe1
        c2g = (
            (e_eg * j * phase_minus + omega * n) * c1g
            + omega * j * phase_minus * c0e
        ) / (SQRT2 * safe2)
        c1e = (
            (e_eg * m + omega * j * phase_plus) * c1g + omega * m * c0e
        ) / safe2

    c = np.stack(
        [np.ones_like(c1g), c1g, c0e, c2g, c1e],
        axis=-1,
    )
    c[~valid] = np.nan
    return c, valid


def stats_arrays(c: np.ndarray) -> dict[str, np.ndarray]:
    """Vectorized photon statistics for stacked amplitude vectors (*S, 5)."""
    p = np.abs(c) ** 2
    norm = p.sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        p1 = (p[..., 1] + p[..., 4]) / norm
        p2 = p[..., 3] / norm
        occupation = p1 + 2.0 * p2
        g2 = np.where(
            occupation >= G2_OCCUPATION_FLOOR,
            2.0 * p2 / occupation**2,
            np.nan,
        )
    return {
        "p1": p1,
        "p2": p2,
        "g2": g2,
        "n_paper": p[..., 1],
        "n_full": p[..., 1] + p[..., 4] + 2.0 * p[..., 3],
        "norm": norm,
    }


def analytic_amplitudes(eff: EffectiveParams, e_eg: float) -> AmplitudeState:
    """Closed-form steady state with c0g = 1.

    Raises SingularDenominator when either J**2 - M*delta_e or J**2 - M*N
    is within SINGULAR_TOL of zero.
    """
    d1 = eff.J**2 - eff.M * eff.delta_e
    if abs(d1) <= SINGULAR_TOL:
        raise SingularDenominator("J^2 - M*delta_e", abs(d1))
    d2 = eff.J**2 - eff.M * eff.N
    if abs(d2) <= SINGULAR_TOL:
        raise SingularDenominator("J^2 - M*N", abs(d2))
    c, _ = amplitude_arrays(
        eff.omega, eff.M, eff.N, eff.delta_e, eff.J, eff.theta, e_eg
    )
    return AmplitudeState(
        c0g=complex(c[0]),
        c1g=complex(c[1]),
        c0e=complex(c[2]),
        c2g=complex(c[3]),
        c1e=complex(c[4]),
        t=math.inf,
    )


def photon_stats(state: AmplitudeState) -> PhotonStats:
    """Occupations and g2 of an amplitude state, exactly as defined."""
    vec = state.as_vector()
    if not np.all(np.isfinite(vec.view(float))):
        raise ValueError("photon_stats requires finite amplitudes")
    if float(np.sum(np.abs(vec) ** 2)) == 0.0:
        return PhotonStats(0.0, 0.0, math.nan, 0.0, 0.0, 0.0)
    s = stats_arrays(vec)
    return PhotonStats(
        p1=float(s["p1"]),
        p2=float(s["p2"]),
        g2=float(s["g2"]),
        n_cavity_paper=float(s["n_paper"]),
        n_cavity_full=float(s["n_full"]),
        norm=float(s["norm"]),
    )


def steady_stats(
    params: SystemParams,
    *,
    j: float | None = None,
    theta: float | None = None,
) -> PhotonStats:
    """Convenience: derive the effective model and evaluate its steady stats."""
    eff = derive_effective(params, j=j, theta=theta)
    return photon_stats(analytic_amplitudes(eff, params.e_eg))


def g2_of_detuning(
    params: SystemParams,
    delta_c_values: Sequence[float] | np.ndarray,
) -> Mapping[Direction, list[tuple[float, PhotonStats | None]]]:
    """Steady statistics along a cavity-detuning grid for both directions.

    Singular points are reported as None entries instead of aborting the
    sweep.
    """
    out: dict[Direction, list[tuple[float, PhotonStats | None]]] = {}
    for direction in Direction:
        kappa_in = params.kappa1 if direction is Direction.FORWARD else params.kappa2
        omega = math.sqrt(kappa_in) * params.b_in
        rows: list[tuple[float, PhotonStats | None]] = []
        base_eff = derive_effective(params)
        for dc in np.asarray(delta_c_values, dtype=float):
            m = dc - 0.5j * params.kappa - base_eff.G
            n = dc - 0.5j * params.kappa + params.delta_e
            eff = EffectiveParams(
                delta_e=params.delta_e,
                G=base_eff.G,
                J=base_eff.J,
                theta=base_eff.theta,
                omega=omega,
                M=m,
                N=n,
            )
            try:
                stats = photon_stats(analytic_amplitudes(eff, params.e_eg))
            except SingularDenominator:
                stats = None
            rows.append((float(dc), stats))
        out[direction] = rows
    return out


__all__ = [
    "PhotonStats",
    "SingularDenominator",
    "amplitude_arrays",
    "analytic_amplitudes",
    "g2_of_detuning",
    "photon_stats",
    "stats_arrays",
    "steady_stats",
]
