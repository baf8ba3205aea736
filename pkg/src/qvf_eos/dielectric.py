"""Lossless dielectric functions and their band structure.

All models share the form

    eps(w) = eps_r * (1 - sum_j 4 g_j**2 / (w**2 - w_j**2))

which is real and even on the real axis.  ``Constant`` has no oscillators and
``Lorentz`` has exactly one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np
from scipy import constants as _codata

from .errors import PoleProximity
from .roots import bracketed_root, expand_upper

DEFAULT_POLE_RADIUS = 1e-9


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar [J s], eps0 [F/m] and c [m/s], or all equal to 1 in reduced units."""

    hbar: float = 1.0
    eps0: float = 1.0
    c: float = 1.0
    units: str = "reduced"

    def __post_init__(self):
        if self.units not in ("reduced", "SI"):
            raise ValueError(f"unknown units mode {self.units!r}")
        for name in ("hbar", "eps0", "c"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if self.units == "reduced" and (self.hbar, self.eps0, self.c) != (1.0, 1.0, 1.0):
            raise ValueError("reduced units require hbar = eps0 = c = 1")

    @classmethod
    def reduced(cls):
        return cls()

    @classmethod
    def si(cls, **overrides):
        values = dict(hbar=_codata.hbar, eps0=_codata.epsilon_0, c=_codata.c)
        values.update(overrides)
        return cls(units="SI", **values)


REDUCED = PhysicalConstants.reduced()


class DielectricModel:
    """Common behaviour of the dielectric variants.

    Subclasses provide ``eps_r`` and ``oscillators``, a tuple of
    ``(omega_j, g_j)`` pairs with strictly increasing ``omega_j``.
    """

    eps_r: float
    oscillators: tuple

    def _validate(self):
        if not (self.eps_r > 0 and math.isfinite(self.eps_r)):
            raise ValueError(f"eps_r must be positive, got {self.eps_r}")
        previous = 0.0
        for omega_j, g_j in self.oscillators:
            if not omega_j > previous:
                raise ValueError("oscillator frequencies must be positive and strictly increasing")
            if not g_j >= 0:
                raise ValueError(f"coupling must be non-negative, got {g_j}")
            previous = omega_j

    @property
    def poles(self):
        """Frequencies of the oscillators that actually couple (g > 0)."""
        return tuple(w for w, g in self.oscillators if g > 0)

    @property
    def reference_frequency(self):
        return self.oscillators[0][0] if self.oscillators else 1.0

    def raw_epsilon(self, omega):
        """Vectorised eps(w) without any pole check.

        Uncoupled oscillators (g = 0) contribute nothing, even at their own
        frequency.  Exactly at a coupled pole the result is +-inf.
        """
        w = np.abs(np.asarray(omega, dtype=float))
        total = np.zeros_like(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            for omega_j, g_j in self.oscillators:
                if g_j > 0:
                    # factored difference avoids cancellation close to the pole
                    total = total + 4.0 * g_j**2 / ((w - omega_j) * (w + omega_j))
        return self.eps_r * (1.0 - total)

    def raw_derivative(self, omega):
        w = np.asarray(omega, dtype=float)
        a = np.abs(w)
        total = np.zeros_like(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            for omega_j, g_j in self.oscillators:
                if g_j > 0:
                    total = total + 8.0 * g_j**2 * w / ((a - omega_j) * (a + omega_j)) ** 2
        return self.eps_r * total

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(DielectricModel):
    eps_r: float = 1.0

    def __post_init__(self):
        self._validate()

    @property
    def oscillators(self):
        return ()

    def to_dict(self):
        return {"kind": "constant", "eps_r": self.eps_r}


@dataclass(frozen=True)
class Lorentz(DielectricModel):
    """Single Lorentz oscillator at ``omega_x`` with vacuum Rabi frequency ``g``."""

    eps_r: float = 1.0
    omega_x: float = 1.0
    g: float = 0.5

    def __post_init__(self):
        self._validate()

    @property
    def oscillators(self):
        return ((self.omega_x, self.g),)

    @property
    def upper_edge(self):
        """Bottom of the upper band, sqrt(omega_x**2 + 4 g**2)."""
        return math.sqrt(self.omega_x**2 + 4.0 * self.g**2)

    def to_dict(self):
        return {"kind": "lorentz", "eps_r": self.eps_r, "omega_x": self.omega_x, "g": self.g}


@dataclass(frozen=True)
class MultiLorentz(DielectricModel):
    eps_r: float = 1.0
    oscillators: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(
            self, "oscillators", tuple((float(w), float(g)) for w, g in self.oscillators)
        )
        self._validate()

    def to_dict(self):
        return {
            "kind": "multi",
            "eps_r": self.eps_r,
            "oscillators": [list(pair) for pair in self.oscillators],
        }


def model_from_dict(spec):
    """Build a model from a mapping such as the one produced by ``to_dict``."""
    kind = spec.get("kind", "lorentz").lower()
    eps_r = float(spec.get("eps_r", 1.0))
    if kind == "constant":
        return Constant(eps_r)
    if kind == "lorentz":
        return Lorentz(eps_r, float(spec.get("omega_x", 1.0)), float(spec.get("g", 0.5)))
    if kind in ("multi", "multilorentz", "multi_lorentz"):
        return MultiLorentz(eps_r, tuple(tuple(p) for p in spec["oscillators"]))
    raise ValueError(f"unknown model kind {kind!r}")


def _check_poles(model, omega, radius):
    w = np.abs(np.asarray(omega, dtype=float))
    for pole in model.poles:
        close = np.abs(w - pole) < radius * pole
        if np.any(close):
            bad = np.asarray(omega, dtype=float)[close] if w.ndim else float(omega)
            raise PoleProximity(f"omega={np.ravel(bad)[0]!r} within {radius:g} (relative) of pole {pole}")


def _as_output(value, omega):
    return float(value) if np.ndim(omega) == 0 else value


def eval_epsilon(model, omega, pole_radius=DEFAULT_POLE_RADIUS):
    """Dielectric function at real frequency ``omega`` (scalar or array)."""
    _check_poles(model, omega, pole_radius)
    return _as_output(model.raw_epsilon(omega), omega)


def epsilon_derivative(model, omega, pole_radius=DEFAULT_POLE_RADIUS):
    """Analytic d eps / d omega; odd in ``omega``."""
    _check_poles(model, omega, pole_radius)
    return _as_output(model.raw_derivative(omega), omega)


@dataclass(frozen=True)
class BandStructure:
    """Propagative bands (eps > 0) and gaps (eps < 0) inside ``(0, omega_max)``.

    ``isolated_points`` lists frequencies of uncoupled oscillators, which are
    removable singularities lying inside a band.
    """

    bands: tuple
    gaps: tuple
    omega_max: float
    isolated_points: tuple = ()

    def in_band(self, omega):
        w = np.abs(np.asarray(omega, dtype=float))
        inside = np.zeros(w.shape, dtype=bool)
        for lo, hi in self.bands:
            inside |= (w > lo) & (w < hi)
        return inside


@lru_cache(maxsize=256)
def epsilon_zeros(model, pole_radius=DEFAULT_POLE_RADIUS):
    """Real positive zeros of eps, one above each coupled pole.

    eps increases monotonically from -inf just above a pole, so each zero is
    bracketed by that pole and the next one (or by a geometric search when
    it is the last pole).
    """
    poles = model.poles
    zeros = []
    f = lambda w: float(model.raw_epsilon(w))
    for i, pole in enumerate(poles):
        lo = pole * (1.0 + pole_radius)
        if i + 1 < len(poles):
            hi = poles[i + 1] * (1.0 - pole_radius)
        else:
            hi = expand_upper(f, lo, 2.0 * pole)
        zeros.append(bracketed_root(f, lo, hi))
    return tuple(zeros)


def factored_epsilon(model, omega):
    """eps(w) as eps_r prod(w^2 - z_j^2) / prod(w^2 - w_j^2) over coupled poles w_j.

    The numerator of eps after clearing denominators is monic in w^2 with the
    zeros z_j as roots, so this equals ``raw_epsilon`` exactly in exact
    arithmetic.  In floating point it keeps full relative accuracy next to a
    zero, where the direct sum cancels.
    """
    w = np.abs(np.asarray(omega, dtype=float))
    value = np.full(w.shape, float(model.eps_r))
    with np.errstate(divide="ignore", invalid="ignore"):
        for pole, zero in zip(model.poles, epsilon_zeros(model)):
            value = value * ((w - zero) * (w + zero)) / ((w - pole) * (w + pole))
    return _as_output(value, omega)


def propagative_bands(model, omega_max, pole_radius=DEFAULT_POLE_RADIUS):
    """Maximal intervals of ``(0, omega_max)`` where eps > 0."""
    poles = model.poles
    if not omega_max > 0:
        raise ValueError("omega_max must be positive")
    if poles and omega_max <= poles[-1]:
        raise ValueError(f"omega_max={omega_max} must exceed the highest pole {poles[-1]}")

    zeros = epsilon_zeros(model, pole_radius)
    bands, gaps = [], []
    lower = 0.0
    for pole, zero in zip(poles, zeros):
        bands.append((lower, pole))
        gaps.append((pole, min(zero, omega_max)))
        lower = zero
    if lower < omega_max:
        bands.append((lower, omega_max))

    isolated = tuple(
        w for w, g in model.oscillators
        if g == 0 and w < omega_max and any(lo < w < hi for lo, hi in bands)
    )
    return BandStructure(tuple(bands), tuple(gaps), float(omega_max), isolated)
