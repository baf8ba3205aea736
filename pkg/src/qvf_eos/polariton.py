"""Bulk polariton branches of a dispersive dielectric.

Modes satisfy c**2 k**2 = w**2 eps(w).  Each propagative band carries exactly
one branch at fixed k > 0, since w**2 eps(w) rises monotonically from 0 to
+inf across a band of a Lorentz sum.

The Hopfield coefficients are real (lossless medium) with the sign fixed by
X > 0.  They are built from the group velocity and the gauge condition,

    (X + Z)**2 = eps_r**1.5 * v_g / (c * eps(w)),
    (X - Z)    = (Omega_k / w) * (X + Z),      Omega_k = c k / sqrt(eps_r),

which normalises sum_mu (X**2 - Z**2) = 1 for any background eps_r and
reduces to v_g = c eps (X + Z)**2 when eps_r = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .dielectric import (
    DEFAULT_POLE_RADIUS,
    REDUCED,
    _check_poles,
    epsilon_zeros,
    factored_epsilon,
)
from .errors import (
    DegeneratePoint,
    GappedFrequency,
    InvalidWavevector,
    NotOnBranch,
    NumericalError,
)
from .roots import bracketed_root, expand_upper

ON_BRANCH_RTOL = 1e-8


@dataclass(frozen=True)
class ModeSolution:
    k: float
    branch: int
    omega: float
    X: float
    Z: float
    v_g: float
    bare_frequency: float
    epsilon: float

    @property
    def gauge_residual(self):
        """|Omega_k (X+Z) - w (X-Z)| / (w |X+Z|)."""
        s = self.X + self.Z
        return abs(self.bare_frequency * s - self.omega * (self.X - self.Z)) / (self.omega * abs(s))


def bare_frequency(model, k, constants=REDUCED):
    return constants.c * k / math.sqrt(model.eps_r)


def _band_brackets(model, pole_radius):
    """Yield (lo, hi) for every propagative band; hi is None for the last one."""
    lower = 0.0
    for pole, zero in zip(model.poles, epsilon_zeros(model, pole_radius)):
        yield lower, pole
        lower = zero
    yield lower, None


def branch_frequencies(model, k, constants=REDUCED, pole_radius=DEFAULT_POLE_RADIUS):
    """Polariton frequencies at wavevector ``k``, one per band, ascending."""
    if not k > 0:
        raise InvalidWavevector(f"k must be positive, got {k}")
    target = (constants.c * k) ** 2

    def f(w):
        return w * w * float(factored_epsilon(model, w)) - target

    roots = []
    below = None
    for lo, pole in _band_brackets(model, pole_radius):
        if lo > 0 and f(lo) >= 0.0:
            # the computed zero of eps can sit an ulp above a root hugging it
            lo = below * (1.0 + pole_radius)
        below = pole
        if pole is None:
            start = max(2.0 * lo, 2.0 * constants.c * k / math.sqrt(model.eps_r), 1e-300)
            hi = expand_upper(f, lo, start)
        else:
            radius = pole_radius
            hi = pole * (1.0 - radius)
            # very large k pushes the root into the exclusion zone
            while f(hi) <= 0.0 and radius > 1e-15:
                radius *= 0.1
                hi = pole * (1.0 - radius)
            if f(hi) <= 0.0:
                raise NumericalError(f"branch below pole {pole} unresolved at k={k}")
        w = bracketed_root(f, lo, hi)
        slope = 2.0 * w * float(factored_epsilon(model, w)) + w * w * float(model.raw_derivative(w))
        if not slope > 0:
            raise NumericalError(f"dispersion not increasing at w={w} (k={k})")
        roots.append(w)
    return roots


def wavevector_of(model, omega, constants=REDUCED, pole_radius=DEFAULT_POLE_RADIUS):
    """Inverse dispersion k = w sqrt(eps(w)) / c on a propagative band."""
    _check_poles(model, omega, pole_radius)
    eps = float(factored_epsilon(model, omega))
    if not eps > 0:
        raise GappedFrequency(f"eps({omega}) = {eps} <= 0, no propagating mode")
    return abs(omega) * math.sqrt(eps) / constants.c


def group_velocity(model, omega, constants=REDUCED, pole_radius=DEFAULT_POLE_RADIUS):
    """d w / d k from implicit differentiation of the dispersion relation."""
    k = wavevector_of(model, omega, constants, pole_radius)
    w = abs(omega)
    eps = float(factored_epsilon(model, w))
    deps = float(model.raw_derivative(w))
    return 2.0 * constants.c**2 * k / (2.0 * w * eps + w * w * deps)


def _coefficients(model, k, omega, constants):
    c = constants.c
    bare = c * k / math.sqrt(model.eps_r)
    # on the branch eps(w) = (c k / w)**2; this form stays accurate near zeros of eps
    eps = (c * k / omega) ** 2
    v_g = 2.0 * c * c * k / (2.0 * omega * eps + omega * omega * float(model.raw_derivative(omega)))
    s = math.sqrt(model.eps_r**1.5 * v_g / (c * eps))
    ratio = bare / omega
    return 0.5 * s * (1.0 + ratio), 0.5 * s * (1.0 - ratio), v_g, bare, eps


def hopfield_coefficients(model, k, omega, constants=REDUCED, rtol=ON_BRANCH_RTOL):
    """Real Hopfield coefficients (X, Z) of the mode (k, omega), with X > 0."""
    if k == 0:
        raise DegeneratePoint("k = 0 is excluded: coefficients are singular there")
    if not k > 0:
        raise InvalidWavevector(f"k must be positive, got {k}")
    if not omega > 0:
        raise NotOnBranch(f"omega must be positive, got {omega}")
    target = (constants.c * k) ** 2
    residual = omega * omega * float(factored_epsilon(model, omega)) - target
    if not abs(residual) <= rtol * target:
        raise NotOnBranch(f"(k={k}, omega={omega}) violates the dispersion relation by {residual:g}")
    X, Z, _, _, _ = _coefficients(model, k, omega, constants)
    return X, Z


def mode_solutions(model, k, constants=REDUCED, pole_radius=DEFAULT_POLE_RADIUS):
    """All polariton modes at wavevector ``k``, ordered by frequency."""
    out = []
    for index, omega in enumerate(branch_frequencies(model, k, constants, pole_radius)):
        X, Z, v_g, bare, eps = _coefficients(model, k, omega, constants)
        out.append(ModeSolution(k, index, omega, X, Z, v_g, bare, eps))
    return out


def indicator(model, omega):
    """1 where a propagating mode exists at ``omega`` (eps > 0), else 0."""
    with np.errstate(invalid="ignore"):
        eps = model.raw_epsilon(omega)
        value = (np.isfinite(eps) & (eps > 0)).astype(int)
    return int(value) if np.ndim(omega) == 0 else value
