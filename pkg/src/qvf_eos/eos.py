"""Electro-optic sampling observables of the vacuum and of polaritons.

Conventions
-----------
The correlation function and its spectrum are related by

    G(tau) = 1/(2 pi) * integral G(w) cos(w tau) dw   over the real line,

with G(w) even.  Paraxial modes are counted with one polarisation and k > 0,
so the discrete sum over modes turns into (L / 2 pi) * integral dk.  With
these choices the vacuum mode sum integrates exactly to

    G_vac(w) = hbar |w| |R(w)|**2 / (4 eps0 sqrt(eps_r) c S).

The conversion constant C multiplies the sampling operator and divides the
correlation function, so it is cancelled analytically and never enters a
computed number.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.integrate import quad_vec

from .dielectric import REDUCED, Constant, DielectricModel, epsilon_zeros, factored_epsilon
from .errors import BandEdge, DivergentIntegral
from .polariton import mode_solutions

EDGE_FLOOR = 1e-9
NEGLIGIBLE_POWER = 1e-12


@dataclass(frozen=True)
class GeometryConfig:
    """Probe area S [m^2], quantisation length L [m] and conversion constant C."""

    S: float = 1.0
    L: float = 1.0
    C: float = 1.0

    def __post_init__(self):
        for name in ("S", "L", "C"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def V(self):
        return self.L * self.S


# -- detection filters -------------------------------------------------------

@dataclass(frozen=True)
class Identity:
    def response(self, omega):
        return np.ones_like(np.asarray(omega, dtype=float))

    def negligible_beyond(self, omega_max):
        return False

    def default_cutoff(self):
        raise DivergentIntegral("identity filter does not decay; the correlation integral diverges")

    def to_dict(self):
        return {"kind": "identity"}


@dataclass(frozen=True)
class GaussianAutocorrelation:
    """R(w) = exp(-w**2 t_p**2 / 4) for a probe of duration ``t_p``."""

    t_p: float

    def __post_init__(self):
        if not self.t_p > 0:
            raise ValueError("t_p must be positive")

    def response(self, omega):
        w = np.asarray(omega, dtype=float)
        return np.exp(-(w * self.t_p) ** 2 / 4.0)

    def negligible_beyond(self, omega_max):
        return float(self.response(omega_max)) ** 2 < NEGLIGIBLE_POWER

    def default_cutoff(self):
        # |R|^2 = 1e-16 there, comfortably below the required 1e-12
        return math.sqrt(2.0 * math.log(1e16)) / self.t_p

    def to_dict(self):
        return {"kind": "gaussian", "t_p": self.t_p}


@dataclass(frozen=True)
class RectLowpass:
    omega_c: float

    def __post_init__(self):
        if not self.omega_c > 0:
            raise ValueError("omega_c must be positive")

    def response(self, omega):
        w = np.abs(np.asarray(omega, dtype=float))
        return (w <= self.omega_c).astype(float)

    def negligible_beyond(self, omega_max):
        return omega_max >= self.omega_c

    def default_cutoff(self):
        return self.omega_c

    def to_dict(self):
        return {"kind": "rect", "omega_c": self.omega_c}


def filter_from_dict(spec):
    kind = spec.get("kind", "gaussian").lower()
    if kind == "identity":
        return Identity()
    if kind == "gaussian":
        return GaussianAutocorrelation(float(spec["t_p"]))
    if kind == "rect":
        return RectLowpass(float(spec["omega_c"]))
    raise ValueError(f"unknown filter kind {kind!r}")


def filter_response(filt, omega):
    r = filt.response(omega)
    return float(r) if np.ndim(omega) == 0 else r


# -- traces ------------------------------------------------------------------

@dataclass
class SpectrumTrace:
    quantity: str
    omega: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    units: str = "reduced"

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.omega.ndim != 1 or self.omega.size == 0:
            raise ValueError("frequency grid must be a non-empty 1-d array")
        if np.any(np.diff(self.omega) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if self.values.shape != self.omega.shape:
            raise ValueError("values and grid differ in shape")

    @property
    def missing(self):
        return np.isnan(self.values)


@dataclass
class TimeTrace:
    tau: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    units: str = "reduced"


@dataclass(frozen=True)
class Vacuum:
    """Free-space-like reference medium of constant permittivity ``eps_r``."""

    eps_r: float = 1.0

    def as_model(self):
        return Constant(self.eps_r)


# -- spectra -----------------------------------------------------------------

def _prefactor(constants, geometry):
    return constants.hbar / (4.0 * constants.eps0 * constants.c * geometry.S)


def _maybe_scalar(value, omega):
    return float(value) if np.ndim(omega) == 0 else value


def vacuum_spectrum(constants, geometry, eps_r, filt, omega):
    """Vacuum correlation spectrum in a medium of constant ``eps_r``."""
    if not eps_r > 0:
        raise ValueError("eps_r must be positive")
    w = np.abs(np.asarray(omega, dtype=float))
    value = _prefactor(constants, geometry) * w / math.sqrt(eps_r) * np.abs(filt.response(w)) ** 2
    return _maybe_scalar(value, omega)


def polariton_spectrum(model, constants, geometry, filt, omega, edge_floor=EDGE_FLOOR):
    """Correlation spectrum in the polaritonic ground state; zero inside gaps."""
    w = np.abs(np.asarray(omega, dtype=float))
    with np.errstate(invalid="ignore"):
        eps = factored_epsilon(model, w)
        propagating = np.isfinite(eps) & (eps > 0)
    if np.any(propagating & (eps < edge_floor * model.eps_r)):
        raise BandEdge("frequency too close to a zero of eps; spectrum diverges there")
    safe = np.where(propagating, eps, 1.0)
    value = np.where(
        propagating,
        _prefactor(constants, geometry) * w / np.sqrt(safe) * np.abs(filt.response(w)) ** 2,
        0.0,
    )
    return _maybe_scalar(value, omega)


def ratio_spectrum(model, omega_grid, edge_floor=EDGE_FLOOR):
    """Polariton-to-vacuum spectral ratio sqrt(eps_r / eps(w)) I(w).

    Points whose permittivity is positive but below ``edge_floor * eps_r``
    sit on the divergence at a band edge and are reported as NaN.
    """
    w = np.abs(np.asarray(omega_grid, dtype=float))
    with np.errstate(invalid="ignore", divide="ignore"):
        eps = factored_epsilon(model, w)
        propagating = np.isfinite(eps) & (eps > 0)
        edge = propagating & (eps < edge_floor * model.eps_r)
        values = np.where(propagating, np.sqrt(model.eps_r / np.where(propagating, eps, 1.0)), 0.0)
    values[edge] = np.nan
    return SpectrumTrace("ratio", omega_grid, values, meta={"model": model.to_dict()})


# -- discrete mode sums ------------------------------------------------------

def discrete_spectrum_weights(model, constants, geometry, filt, k_list):
    """Delta-function weights of the spectrum for a finite set of modes.

    Returns ``(omega, weight)`` pairs, where ``weight`` multiplies
    delta(w - omega) + delta(w + omega).
    """
    out = []
    for k in k_list:
        for mode in mode_solutions(model, k, constants):
            amplitude2 = (
                constants.hbar * mode.bare_frequency * (mode.X + mode.Z) ** 2
                / (2.0 * constants.eps0 * model.eps_r * geometry.V)
            )
            r2 = float(filt.response(mode.omega)) ** 2
            out.append((mode.omega, math.pi * amplitude2 * r2))
    return out


def mode_sum_correlation(model, constants, geometry, filt, k_list, tau):
    """Time correlation summed over a finite set of polariton modes.

    Uses the group velocity and permittivity of each mode rather than its
    Hopfield coefficients.
    """
    tau = np.asarray(tau, dtype=float)
    total = np.zeros_like(tau)
    for k in k_list:
        for mode in mode_solutions(model, k, constants):
            weight = (
                constants.hbar * mode.bare_frequency * math.sqrt(model.eps_r) * mode.v_g
                / (2.0 * constants.eps0 * mode.epsilon * constants.c * geometry.V)
            )
            total = total + weight * float(filt.response(mode.omega)) ** 2 * np.cos(mode.omega * tau)
    return total


def vacuum_mode_sum(constants, geometry, eps_r, filt, k_list, tau):
    """Vacuum time correlation summed over bare modes of wavevectors ``k_list``."""
    tau = np.asarray(tau, dtype=float)
    total = np.zeros_like(tau)
    for k in k_list:
        bare = constants.c * k / math.sqrt(eps_r)
        weight = constants.hbar * bare / (2.0 * constants.eps0 * eps_r * geometry.V)
        total = total + weight * float(filt.response(bare)) ** 2 * np.cos(bare * tau)
    return total


# -- continuum time correlation ---------------------------------------------

def _eps_times_offset_sq_at_pole(model, pole, t2):
    """eps(pole - t2) * t2, free of the cancellation near the pole."""
    w = pole - t2
    w2 = w * w
    rest = 0.0
    own = 0.0
    for omega_j, g_j in model.oscillators:
        if g_j == 0:
            continue
        if omega_j == pole:
            own = 4.0 * g_j**2
        else:
            rest = rest + 4.0 * g_j**2 / (w2 - omega_j**2)
    # w^2 - pole^2 = -t2 (2 pole - t2)
    return model.eps_r * (own / (2.0 * pole - t2) + t2 * (1.0 - rest))


def _eps_over_offset_at_zero(model, zero, s2):
    """eps(zero + s2) / s2, using eps(zero) = 0 to avoid cancellation."""
    w = zero + s2
    w2 = w * w
    z2 = zero * zero
    total = 0.0
    for omega_j, g_j in model.oscillators:
        if g_j > 0:
            total = total + 4.0 * g_j**2 / ((z2 - omega_j**2) * (w2 - omega_j**2))
    # w^2 - zero^2 = s2 (2 zero + s2)
    return model.eps_r * (2.0 * zero + s2) * total


def _segments(model, omega_max):
    """Integration pieces (lo, hi, lower_kind, upper_kind) covering the bands."""
    poles = model.poles
    zeros = epsilon_zeros(model) if poles else ()
    edges = []
    lower, lower_kind = 0.0, "regular"
    for pole, zero in zip(poles, zeros):
        if lower >= omega_max:
            break
        if pole <= omega_max:
            edges.append((lower, pole, lower_kind, "pole"))
        else:
            edges.append((lower, omega_max, lower_kind, "regular"))
        lower, lower_kind = zero, "zero"
    if lower < omega_max:
        edges.append((lower, omega_max, lower_kind, "regular"))
    return edges


def _segment_integral(model, filt, lo, hi, lower_kind, upper_kind, tau, epsabs, epsrel):
    """integral_lo^hi w / sqrt(eps) |R|^2 cos(w tau) dw for every tau."""
    pieces = []
    mid = 0.5 * (lo + hi)
    if lower_kind == "zero":
        def f_lo(s):
            s2 = s * s
            w = lo + s2
            q = _eps_over_offset_at_zero(model, lo, s2)
            return 2.0 * w / math.sqrt(q) * float(filt.response(w)) ** 2 * np.cos(w * tau)
        pieces.append((f_lo, 0.0, math.sqrt(mid - lo)))
    else:
        def f_plain(w):
            eps = float(model.raw_epsilon(w))
            return w / math.sqrt(eps) * float(filt.response(w)) ** 2 * np.cos(w * tau)
        pieces.append((f_plain, lo, mid))
    if upper_kind == "pole":
        def f_hi(t):
            t2 = t * t
            w = hi - t2
            q = _eps_times_offset_sq_at_pole(model, hi, t2)
            return 2.0 * t2 * w / math.sqrt(q) * float(filt.response(w)) ** 2 * np.cos(w * tau)
        pieces.append((f_hi, 0.0, math.sqrt(hi - mid)))
    else:
        def f_plain_hi(w):
            eps = float(model.raw_epsilon(w))
            return w / math.sqrt(eps) * float(filt.response(w)) ** 2 * np.cos(w * tau)
        pieces.append((f_plain_hi, mid, hi))

    total = np.zeros_like(tau)
    for f, a, b in pieces:
        if b > a:
            value, _ = quad_vec(f, a, b, epsabs=epsabs, epsrel=epsrel, norm="max", limit=2000)
            total = total + value
    return total


def spectral_integral(model, filt, tau, omega_max, epsrel=1e-9):
    """(1/pi) integral_0^omega_max w/sqrt(eps) |R|^2 cos(w tau) dw, gaps excised."""
    tau = np.atleast_1d(np.abs(np.asarray(tau, dtype=float)))
    segments = _segments(model, omega_max)
    # absolute target scaled by the tau = 0 integral
    scale = sum(
        _segment_integral(model, filt, *seg, np.zeros(1), 0.0, 1e-6)[0] for seg in segments
    )
    total = np.zeros_like(tau)
    for seg in segments:
        total = total + _segment_integral(model, filt, *seg, tau, epsrel * abs(scale), epsrel)
    return total / math.pi


def time_correlation(source, constants, geometry, filt, tau_grid, omega_max=None):
    """Continuum correlation G(tau) for a vacuum or polariton source.

    ``source`` is a :class:`Vacuum` or any dielectric model.  The result is
    the cosine transform of the closed-form spectral density, evaluated with
    adaptive Gauss-Kronrod panels over the propagative bands only.
    """
    if isinstance(source, Vacuum):
        model, kind = source.as_model(), "vacuum"
    elif isinstance(source, DielectricModel):
        model, kind = source, "polariton"
    else:
        raise TypeError(f"unsupported source {source!r}")
    if omega_max is None:
        omega_max = filt.default_cutoff()
    elif not filt.negligible_beyond(omega_max):
        if isinstance(filt, Identity):
            raise DivergentIntegral("identity filter does not decay; the correlation integral diverges")
        raise ValueError(f"filter power at omega_max={omega_max} is not negligible")

    tau = np.asarray(tau_grid, dtype=float)
    values = _prefactor(constants, geometry) * spectral_integral(model, filt, tau, omega_max)
    meta = {
        "source": kind,
        "model": model.to_dict(),
        "filter": filt.to_dict(),
        "omega_max": omega_max,
        "S": geometry.S,
    }
    return TimeTrace(tau, values.reshape(tau.shape), meta, constants.units)


def kspace_time_correlation(model, constants, geometry, filt, tau_grid, k_max=None,
                            panels=160, order=20, tail_panels=40):
    """Continuum correlation from a direct quadrature over wavevectors.

    Sums the polariton mode contributions branch by branch with composite
    Gauss-Legendre rules: uniform panels on ``(0, k_max]`` and the map
    k = k_max / u on the tail, where the lower branches pile up below their
    poles.  Independent of the spectral-density route of
    :func:`time_correlation`, against which it is checked.
    """
    if isinstance(model, Vacuum):
        model = model.as_model()
    if k_max is None:
        k_max = 1.5 * filt.default_cutoff() * math.sqrt(model.eps_r) / constants.c
    x, w = np.polynomial.legendre.leggauss(order)

    def composite(a, b, n):
        edges = np.linspace(a, b, n + 1)
        half = 0.5 * np.diff(edges)[:, None]
        centre = 0.5 * (edges[:-1] + edges[1:])[:, None]
        return (centre + half * x).ravel(), (half * w).ravel()

    k_body, w_body = composite(0.0, k_max, panels)
    u, w_u = composite(0.0, 1.0, tail_panels)
    k_nodes = np.concatenate([k_body, k_max / u])
    k_weights = np.concatenate([w_body, w_u * k_max / u**2])

    tau = np.asarray(tau_grid, dtype=float)
    total = np.zeros_like(tau)
    for k, weight in zip(k_nodes, k_weights):
        for mode in mode_solutions(model, k, constants):
            r2 = float(filt.response(mode.omega)) ** 2
            if r2 == 0.0:
                continue
            amplitude = mode.bare_frequency * (mode.X + mode.Z) ** 2 / model.eps_r * r2
            total = total + weight * amplitude * np.cos(mode.omega * tau)
    scale = constants.hbar / (2.0 * constants.eps0 * geometry.S) / (2.0 * math.pi)
    return scale * total
