"""Numerical identity checks run by ``qvf-eos check``.

Each check returns a :class:`CheckResult`; ``run_checks`` runs them all for
one model.  Tolerances follow the library's documented accuracy targets.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .dielectric import (
    REDUCED,
    Constant,
    epsilon_derivative,
    epsilon_zeros,
    eval_epsilon,
    factored_epsilon,
    propagative_bands,
)
from .eos import (
    GaussianAutocorrelation,
    GeometryConfig,
    Vacuum,
    kspace_time_correlation,
    polariton_spectrum,
    ratio_spectrum,
    time_correlation,
    vacuum_spectrum,
)
from .polariton import branch_frequencies, group_velocity, mode_solutions, wavevector_of
from .vacuum import partition_identity


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _random_frequencies(model, n, rng, span):
    w = rng.uniform(-span, span, n)
    keep = np.ones(n, dtype=bool)
    for pole in model.poles:
        keep &= np.abs(np.abs(w) - pole) > 1e-6 * pole
    return w[keep]


def check_evenness(model, rng, n=1000):
    w = _random_frequencies(model, n, rng, 5.0 * model.reference_frequency)
    worst = float(np.max(np.abs(eval_epsilon(model, w) - eval_epsilon(model, -w))))
    return CheckResult("epsilon evenness", worst == 0.0, f"max |eps(w) - eps(-w)| = {worst:.3g}")


def five_point(f, x, h):
    """Fourth-order central difference of ``f`` at ``x`` with step ``h``."""
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def _pole_distance(model, w):
    d = np.full(np.shape(w), np.inf)
    for pole in model.poles:
        d = np.minimum(d, np.abs(np.abs(w) - pole))
    return d


def check_derivative(model, rng, n=1000):
    ref = model.reference_frequency
    w = _random_frequencies(model, n, rng, 5.0 * ref)
    d = _pole_distance(model, w)
    w = w[d > 1e-2 * ref]
    h = 1e-3 * np.minimum(_pole_distance(model, w), ref)
    fd = five_point(model.raw_epsilon, w, h)
    exact = epsilon_derivative(model, w)
    # epsilon' vanishes at w = 0, so compare against its typical size there
    scale = np.maximum(np.abs(exact), 1e-3 * np.max(np.abs(exact), initial=0.0))
    worst = float(np.max(np.abs(fd - exact) / np.where(scale > 0, scale, 1.0))) if w.size else 0.0
    return CheckResult("derivative vs finite differences", worst < 1e-6, f"max rel err = {worst:.3g}")


def check_bands(model, rng, n=1000):
    top = 10.0 * (model.poles[-1] if model.poles else 1.0)
    bands = propagative_bands(model, top)
    bad = 0
    for lo, hi in bands.bands:
        w = rng.uniform(lo, hi, n)
        w = w[np.all([np.abs(w - p) > 1e-9 * p for p in bands.isolated_points], axis=0)] if bands.isolated_points else w
        bad += int(np.count_nonzero(model.raw_epsilon(w) <= 0))
    for lo, hi in bands.gaps:
        w = rng.uniform(lo, hi, n)
        w = w[(w > lo) & (w < hi)]
        bad += int(np.count_nonzero(model.raw_epsilon(w) >= 0))
    return CheckResult("band/gap sign of eps", bad == 0, f"{bad} misclassified samples")


def _k_sweep(model, constants, n):
    scale = model.reference_frequency * math.sqrt(model.eps_r) / constants.c
    return np.geomspace(0.01, 10.0, n) * scale


def check_modes(model, constants, n=1000):
    """Normalisation, gauge condition, group-velocity relation and round trip."""
    norm = gauge = vg_rel = trip = 0.0
    c = constants.c
    for k in _k_sweep(model, constants, n):
        modes = mode_solutions(model, k, constants)
        norm = max(norm, abs(math.fsum(m.X**2 - m.Z**2 for m in modes) - 1.0))
        for m in modes:
            gauge = max(gauge, m.gauge_residual)
            eps = float(factored_epsilon(model, m.omega))
            # (X+Z)^2 relation, written relative to the background medium
            predicted = (c / math.sqrt(model.eps_r)) * (eps / model.eps_r) * (m.X + m.Z) ** 2
            vg_rel = max(vg_rel, abs(predicted - m.v_g) / m.v_g)
            trip = max(trip, abs(wavevector_of(model, m.omega, constants) - k) / k)
    return [
        CheckResult("Hopfield normalisation", norm < 1e-10, f"max |sum(X^2-Z^2) - 1| = {norm:.3g}"),
        CheckResult("gauge condition", gauge < 1e-10, f"max scaled residual = {gauge:.3g}"),
        CheckResult("v_g from Hopfield coefficients", vg_rel < 1e-10, f"max rel err = {vg_rel:.3g}"),
        CheckResult("dispersion round trip", trip < 1e-10, f"max rel err in k = {trip:.3g}"),
    ]


def check_group_velocity(model, constants, n=200):
    worst = 0.0
    for k in _k_sweep(model, constants, n):
        h = 1e-3 * k
        stencil = [branch_frequencies(model, k + j * h, constants) for j in (-2, -1, 1, 2)]
        for i, m in enumerate(mode_solutions(model, k, constants)):
            a2, a1, b1, b2 = (row[i] for row in stencil)
            fd = (a2 - 8 * a1 + 8 * b1 - b2) / (12 * h)
            analytic = group_velocity(model, m.omega, constants)
            worst = max(worst, abs(fd - analytic) / analytic, abs(m.v_g - analytic) / analytic)
    return CheckResult("v_g three-way agreement", worst < 1e-6, f"max rel err = {worst:.3g}")


def check_partition(model, constants, n=1000):
    worst = 0.0
    worst_background = 0.0
    for k in _k_sweep(model, constants, n):
        report = partition_identity(model, k, constants)
        worst = max(worst, abs(report.residual))
        worst_background = max(worst_background, abs(report.lhs_background - report.rhs))
    if model.eps_r == 1.0:
        return CheckResult("partition identity", worst < 1e-8, f"max |lhs - rhs| = {worst:.3g}")
    return CheckResult(
        "partition identity (background-rescaled)",
        worst_background < 1e-8,
        f"max |lhs' - rhs| = {worst_background:.3g}; unscaled form off by up to {worst:.3g} for eps_r != 1",
    )


def check_ratio_limits(model):
    if not model.poles:
        values = ratio_spectrum(model, np.linspace(0.01, 50.0, 100)).values
        worst = float(np.max(np.abs(values - 1.0)))
        return [CheckResult("ratio of a constant medium", worst < 1e-12, f"max |ratio - 1| = {worst:.3g}")]
    top = model.poles[-1]
    far = float(ratio_spectrum(model, [50.0 * top]).values[0])
    bands = propagative_bands(model, 100.0 * top)
    edge = bands.bands[-1][0]
    approach = edge + edge * np.geomspace(1e-1, 1e-7, 40)
    values = ratio_spectrum(model, approach[::-1]).values[::-1]
    rising = bool(np.all(np.diff(values) > 0))
    return [
        CheckResult("ratio -> 1 far above resonances", abs(far - 1.0) < 1e-3, f"ratio(50 w_top) = {far:.9f}"),
        CheckResult("ratio diverges at upper gap edge", rising, f"ratio at edge+1e-7 = {values[-1]:.4g}"),
    ]


def check_uncoupled(model, constants, geometry, filt):
    w = np.linspace(0.01, 5.0, 1000) * model.reference_frequency
    w = w[np.all([np.abs(w - p) > 1e-6 * p for p in (x for x, _ in model.oscillators)], axis=0)] if model.oscillators else w
    uncoupled = Constant(model.eps_r)
    a = polariton_spectrum(uncoupled, constants, geometry, filt, w)
    b = vacuum_spectrum(constants, geometry, model.eps_r, filt, w)
    worst = float(np.max(np.abs(a - b) / b))
    return CheckResult("uncoupled limit equals vacuum", worst < 1e-8, f"max rel err = {worst:.3g}")


def check_fourier(model, constants, geometry, filt, n_tau=128):
    tau = np.linspace(-10.0, 10.0, n_tau) / model.reference_frequency
    spectral = time_correlation(model, constants, geometry, filt, tau).values
    direct = kspace_time_correlation(model, constants, geometry, filt, tau)
    err = float(np.linalg.norm(spectral - direct) / np.linalg.norm(direct))
    return CheckResult("time correlation: spectral vs k-space", err < 1e-4, f"relative L2 = {err:.3g}")


def check_parseval(model, constants, geometry, filt):
    from scipy.integrate import quad

    g0 = float(time_correlation(model, constants, geometry, filt, [0.0]).values[0])
    top = filt.default_cutoff()
    points = sorted(p for p in (*model.poles, *epsilon_zeros(model)) if p < top)
    total, _ = quad(
        lambda w: polariton_spectrum(model, constants, geometry, filt, w, edge_floor=0.0),
        0.0, top, points=points or None, limit=500, epsabs=0.0, epsrel=1e-11,
    )
    reference = 2.0 * total / (2.0 * math.pi)
    err = abs(g0 - reference) / abs(reference)
    return CheckResult("Parseval at tau = 0", err < 1e-8, f"rel err = {err:.3g}")


def run_checks(model, constants=REDUCED, geometry=None, filt=None, seed=0, include_fourier=True):
    rng = np.random.default_rng(seed)
    geometry = geometry or GeometryConfig()
    filt = filt or GaussianAutocorrelation(1.0 / model.reference_frequency)
    results = [
        check_evenness(model, rng),
        check_derivative(model, rng),
        check_bands(model, rng),
        *check_modes(model, constants),
        check_group_velocity(model, constants),
        check_partition(model, constants),
        *check_ratio_limits(model),
        check_uncoupled(model, constants, geometry, filt),
    ]
    if include_fourier:
        results.append(check_parseval(model, constants, geometry, filt))
        results.append(check_fourier(model, constants, geometry, filt))
    return results


__all__ = ["CheckResult", "run_checks", "Vacuum"]
