"""Physical inputs and the reduction to the effective cavity-atom model.

Every rate and detuning in this package is expressed in units of the total
cavity decay rate kappa; input field amplitudes ``b_in`` carry units of
sqrt(kappa).  The two mirrors decay at ``kappa1`` (left) and ``kappa2``
(right) with ``kappa1 + kappa2 = 2 kappa``; driving the left mirror is the
FORWARD direction, driving the right mirror is BACKWARD.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields, replace
from enum import Enum
from pathlib import Path

from scipy.constants import hbar

TAU = 2.0 * math.pi

# Validity guard rails for the adiabatic elimination and the weak-driving
# truncation.  Violations warn (RegimeWarning) but never abort: the
# breakdown region is itself worth exploring.
DETUNING_RATIO_MIN = 10.0
WEAK_DRIVE_MAX = 0.1

KAPPA_SUM_TOL = 1e-9


class Direction(Enum):
    """Which mirror is driven: FORWARD uses kappa1, BACKWARD uses kappa2."""

    FORWARD = "forward"
    BACKWARD = "backward"

    def flipped(self) -> "Direction":
        return Direction.BACKWARD if self is Direction.FORWARD else Direction.FORWARD


class RegimeWarning(UserWarning):
    """A validity assumption of the effective model is not satisfied."""


class ConfigError(ValueError):
    """Malformed configuration text or parameter overrides."""


def wrap_angle(theta: float) -> float:
    """Reduce an angle to the canonical interval (-pi, pi]."""
    r = math.remainder(theta, TAU)
    return math.pi if r <= -math.pi else r


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """All physical inputs of the driven three-level cavity system.

    Fields (units of kappa unless noted):

    kappa      total cavity decay rate, 1.0 by convention
    kappa1     left-mirror decay rate
    kappa2     right-mirror decay rate (kappa1 + kappa2 = 2 kappa)
    g          single-photon coupling on the cavity leg
    delta_p    detuning of the upper level from the cavity drive
    delta_he   detuning of the atomic drive on the upper leg; None means
               "Raman resonant", i.e. delta_p - delta_eg is assumed
    delta_e    effective detuning of the intermediate level, an independent
               input (see ``delta_eg`` for the bare-level relation)
    delta_c    cavity detuning from the drive
    e_he       amplitude of the optical drive on the upper atomic leg
    e_eg       amplitude of the microwave drive between the ground levels
    b_in       input field amplitude, units sqrt(kappa)
    phi_p      phase of the cavity drive
    phi_he     phase of the upper-leg drive
    phi_eg     phase of the microwave drive
    direction  driven mirror
    """

    kappa: float = 1.0
    kappa1: float = 1.0
    kappa2: float = 1.0
    g: float = 0.0
    delta_p: float = 100.0
    delta_he: float | None = None
    delta_e: float = 0.0
    delta_c: float = 0.0
    e_he: float = 0.0
    e_eg: float = 0.0
    b_in: float = 0.0
    phi_p: float = 0.0
    phi_he: float = 0.0
    phi_eg: float = 0.0
    direction: Direction = Direction.FORWARD

    def __post_init__(self) -> None:
        for f in fields(self):
            if f.name == "direction":
                continue
            value = getattr(self, f.name)
            if value is None and f.name == "delta_he":
                continue
            _require_finite(f.name, value)
        if not isinstance(self.direction, Direction):
            raise ValueError(f"direction must be a Direction, got {self.direction!r}")
        if self.kappa <= 0.0:
            raise ValueError("kappa must be positive")
        if self.kappa1 <= 0.0 or self.kappa2 <= 0.0:
            raise ValueError("mirror decay rates kappa1, kappa2 must be positive")
        mismatch = abs(self.kappa1 + self.kappa2 - 2.0 * self.kappa)
        if mismatch > KAPPA_SUM_TOL * self.kappa:
            raise ValueError(
                "kappa1 + kappa2 must equal 2*kappa "
                f"(got {self.kappa1} + {self.kappa2} != {2 * self.kappa})"
            )
        for name in ("g", "e_he", "e_eg", "b_in"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def kappa_in(self) -> float:
        """Decay rate of the driven mirror."""
        return self.kappa1 if self.direction is Direction.FORWARD else self.kappa2

    @property
    def delta_eg(self) -> float:
        """Bare two-level detuning implied by delta_e: delta_e + e_he**2/delta_p.

        Documented for reference only; ``delta_e`` is always the independent
        input and is never recomputed from this relation.
        """
        if self.delta_p == 0.0:
            raise ZeroDivisionError("delta_p must be nonzero")
        return self.delta_e + self.e_he**2 / self.delta_p

    @property
    def delta_he_effective(self) -> float:
        """delta_he if supplied, else the Raman-resonant value delta_p - delta_eg."""
        if self.delta_he is not None:
            return self.delta_he
        return self.delta_p - self.delta_eg


@dataclass(frozen=True)
class EffectiveParams:
    """Derived quantities of the effective two-manifold model.

    delta_e  effective detuning of the intermediate level
    G        photon-number-dependent Stark shift, g**2/delta_p
    J        Raman coupling between |1,g>-like and |0,e>-like states
    theta    single gauge-invariant drive phase, reduced to (-pi, pi]
    omega    cavity drive amplitude sqrt(kappa_in)*b_in
    M        complex single-photon denominator delta_c - i*kappa/2 - G
    N        complex dressed denominator delta_c - i*kappa/2 + delta_e
    """

    delta_e: float
    G: float
    J: float
    theta: float
    omega: float
    M: complex
    N: complex

    @property
    def kappa(self) -> float:
        return -2.0 * self.M.imag

    @property
    def delta_c(self) -> float:
        return self.M.real + self.G


def derive_effective(
    params: SystemParams,
    *,
    j: float | None = None,
    theta: float | None = None,
) -> EffectiveParams:
    """Apply the large-detuning reduction to a parameter set.

    ``j`` overrides the Raman coupling g*e_he/delta_p (used by optimizer and
    sweep code that treats J as a direct control); ``theta`` overrides the
    phase combination phi_p - phi_he - phi_eg.

    Emits RegimeWarning when the elimination or the weak-driving truncation
    is not justified; the numbers are still produced.
    """
    if params.delta_p == 0.0:
        raise ZeroDivisionError("delta_p must be nonzero for the adiabatic elimination")

    g_shift = params.g**2 / params.delta_p
    j_val = params.g * params.e_he / params.delta_p if j is None else float(j)
    theta_val = wrap_angle(
        params.phi_p - params.phi_he - params.phi_eg if theta is None else float(theta)
    )
    omega = math.sqrt(params.kappa_in) * params.b_in

    half_loss = 0.5j * params.kappa
    m_val = params.delta_c - half_loss - g_shift
    n_val = params.delta_c - half_loss + params.delta_e

    if params.g > 0.0 and abs(params.delta_p / params.g) <= DETUNING_RATIO_MIN:
        warnings.warn(
            f"|delta_p/g| = {abs(params.delta_p / params.g):.3g} <= "
            f"{DETUNING_RATIO_MIN:g}; adiabatic elimination is marginal",
            RegimeWarning,
            stacklevel=2,
        )
    e_he_used = params.e_he if j is None else (
        abs(j_val) * abs(params.delta_p) / params.g if params.g > 0.0 else None
    )
    if e_he_used:
        ratio = abs(params.delta_he_effective / e_he_used)
        if ratio <= DETUNING_RATIO_MIN:
            warnings.warn(
                f"|delta_he/e_he| = {ratio:.3g} <= {DETUNING_RATIO_MIN:g}; "
                "upper-leg drive is not far detuned",
                RegimeWarning,
                stacklevel=2,
            )
    if omega / params.kappa >= WEAK_DRIVE_MAX:
        warnings.warn(
            f"omega/kappa = {omega / params.kappa:.3g} >= {WEAK_DRIVE_MAX:g}; "
            "weak-driving truncation is marginal",
            RegimeWarning,
            stacklevel=2,
        )
    if params.e_eg / params.kappa >= WEAK_DRIVE_MAX:
        warnings.warn(
            f"e_eg/kappa = {params.e_eg / params.kappa:.3g} >= {WEAK_DRIVE_MAX:g}; "
            "weak-driving truncation is marginal",
            RegimeWarning,
            stacklevel=2,
        )

    return EffectiveParams(
        delta_e=params.delta_e,
        G=g_shift,
        J=j_val,
        theta=theta_val,
        omega=omega,
        M=m_val,
        N=n_val,
    )


def implied_e_he(j: float, params: SystemParams) -> float:
    """Upper-leg drive amplitude that realizes a given Raman coupling.

    Back-solves e_he = |J|*delta_p/g; the sign of J is carried by a pi shift
    of theta, so the amplitude is reported non-negative.
    """
    if params.g == 0.0:
        raise ZeroDivisionError("cannot back-solve e_he when g = 0")
    return abs(j * params.delta_p / params.g)


def mirror_swap(params: SystemParams) -> SystemParams:
    """Exchange the mirror decay rates and flip the driven direction.

    The swapped system driven the opposite way is physically identical to
    the original, which makes this the natural reciprocity probe.
    """
    return replace(
        params,
        kappa1=params.kappa2,
        kappa2=params.kappa1,
        direction=params.direction.flipped(),
    )


def amplitude_from_power(p_in: float, omega_p: float) -> float:
    """Input amplitude sqrt(P_in/(hbar*omega_p)) in SI units, 1/sqrt(s).

    ``p_in`` is the input power in watts, ``omega_p`` the drive angular
    frequency in rad/s.  This is a unit-conversion convenience only; the
    rest of the package works in kappa units.
    """
    if p_in < 0.0:
        raise ValueError("input power must be non-negative")
    if omega_p <= 0.0:
        raise ValueError("drive frequency must be positive")
    return math.sqrt(p_in / (hbar * omega_p))


_FLOAT_FIELDS = tuple(
    f.name for f in fields(SystemParams) if f.name not in ("direction",)
)


def parse_config(text: str) -> dict[str, object]:
    """Parse ``key = value`` configuration text into a raw mapping.

    Lines are one assignment each; ``#`` starts a comment; blank lines are
    ignored.  Unknown keys, repeated keys and unparseable values raise
    ConfigError.
    """
    known = set(_FLOAT_FIELDS) | {"direction"}
    out: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key == "direction":
            try:
                out[key] = Direction(value)
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: direction must be 'forward' or 'backward', "
                    f"got {value!r}"
                ) from None
        else:
            try:
                out[key] = float(value)
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: could not parse {value!r} as a number for {key!r}"
                ) from None
    return out


def params_from_mapping(
    mapping: dict[str, object], base: SystemParams | None = None
) -> SystemParams:
    """Build SystemParams from a raw mapping, layered over ``base``."""
    base = base if base is not None else SystemParams()
    unknown = set(mapping) - set(_FLOAT_FIELDS) - {"direction"}
    if unknown:
        raise ConfigError(f"unknown parameter keys: {sorted(unknown)}")
    try:
        return replace(base, **mapping)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path, base: SystemParams | None = None) -> SystemParams:
    """Read a configuration file and return the resulting SystemParams."""
    text = Path(path).read_text(encoding="utf-8")
    return params_from_mapping(parse_config(text), base=base)


def reference_params(direction: Direction = Direction.FORWARD) -> SystemParams:
    """Asymmetric-cavity working point used throughout the figure presets.

    kappa1/kappa = 0.2, kappa2/kappa = 1.8, g = 10, delta_p = 100,
    delta_e = -0.5, b_in = 0.02 sqrt(kappa), e_eg = 0.01.  The Raman
    coupling is left at zero here; sweeps and the optimizer set J (or
    e_he) explicitly.
    """
    return SystemParams(
        kappa1=0.2,
        kappa2=1.8,
        g=10.0,
        delta_p=100.0,
        delta_e=-0.5,
        b_in=0.02,
        e_eg=0.01,
        direction=direction,
    )


def effective_phase(params: SystemParams) -> float:
    """The gauge-invariant drive phase phi_p - phi_he - phi_eg in (-pi, pi]."""
    return wrap_angle(params.phi_p - params.phi_he - params.phi_eg)


__all__ = [
    "ConfigError",
    "Direction",
    "EffectiveParams",
    "RegimeWarning",
    "SystemParams",
    "amplitude_from_power",
    "derive_effective",
    "effective_phase",
    "implied_e_he",
    "load_config",
    "mirror_swap",
    "params_from_mapping",
    "parse_config",
    "reference_params",
    "wrap_angle",
]
