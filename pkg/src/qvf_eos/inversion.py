"""Recover the dielectric function from measured vacuum/polariton ratios.

The measured ratio is sqrt(eps_r / eps(w)) on propagative bands and zero in
gaps, so eps follows algebraically wherever the ratio is non-zero.  A
single-oscillator model can also be fitted to the trace by damped
Gauss-Newton; the ratio itself does not depend on eps_r, which is therefore
taken from the trace as a known reference.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .dielectric import Lorentz
from .eos import ratio_spectrum
from .errors import AllGapped, EmptyTrace, NonConvergence, SingularJacobian

GAP_THRESHOLD = 0.02
_ROUNDOFF_COST = 1e-30


@dataclass
class MeasuredTrace:
    """Ratio samples on an increasing grid; NaN marks a missing sample."""

    omega: np.ndarray
    ratio: np.ndarray
    sigma: np.ndarray | None = None
    eps_r: float = 1.0

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        self.ratio = np.asarray(self.ratio, dtype=float)
        if self.omega.shape != self.ratio.shape or self.omega.ndim != 1:
            raise ValueError("omega and ratio must be 1-d arrays of equal length")
        if np.any(np.diff(self.omega) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if np.any(self.ratio[~np.isnan(self.ratio)] < 0):
            raise ValueError("ratio samples must be non-negative")
        if self.sigma is not None:
            self.sigma = np.broadcast_to(np.asarray(self.sigma, dtype=float), self.omega.shape).copy()
            if np.any(self.sigma < 0):
                raise ValueError("sigma must be non-negative")
        if not self.eps_r > 0:
            raise ValueError("reference eps_r must be positive")


@dataclass
class InversionResult:
    omega: np.ndarray
    epsilon: np.ndarray
    gaps: list
    gapped: np.ndarray


@dataclass
class FitResult:
    eps_r: float
    omega_x: float
    g: float
    rss: float
    iterations: int
    converged: bool
    gradient_norm: float
    stderr: tuple
    history: list = field(default_factory=list)

    @property
    def model(self):
        return Lorentz(self.eps_r, self.omega_x, self.g)


def synthesize_measurement(model, omega_grid, noise_sigma, seed=None):
    """Forward ratio with multiplicative Gaussian noise, clipped at zero.

    Band-edge points, where the true ratio is undefined, stay NaN.
    """
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    exact = ratio_spectrum(model, omega_grid).values
    rng = np.random.default_rng(seed)
    noisy = exact * (1.0 + noise_sigma * rng.standard_normal(exact.shape))
    noisy = np.where(np.isnan(noisy), np.nan, np.clip(noisy, 0.0, None))
    sigma = np.full(exact.shape, float(noise_sigma))
    return MeasuredTrace(np.asarray(omega_grid, dtype=float), noisy, sigma, model.eps_r)


def _gap_runs(gapped):
    runs, start = [], None
    for i, flag in enumerate(gapped):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(gapped) - 1))
    return runs


def invert_ratio(trace, gap_threshold=GAP_THRESHOLD):
    """eps(w) = eps_r / ratio**2, with sub-threshold runs reported as gaps.

    Gap edges are placed halfway between the last propagating sample and the
    first gapped one (or at the grid end when a run touches it).
    """
    omega, ratio = trace.omega, np.asarray(trace.ratio, dtype=float)
    if omega.size == 0:
        raise EmptyTrace("trace has no samples")
    valid = ~np.isnan(ratio)
    gapped = valid & (ratio < gap_threshold)
    if not np.any(valid & ~gapped):
        raise AllGapped("every sample lies below the gap threshold")

    epsilon = np.full(omega.shape, np.nan)
    usable = valid & ~gapped
    epsilon[usable] = trace.eps_r / ratio[usable] ** 2

    gaps = []
    for first, last in _gap_runs(gapped):
        lo = omega[0] if first == 0 else 0.5 * (omega[first - 1] + omega[first])
        hi = omega[-1] if last == len(omega) - 1 else 0.5 * (omega[last] + omega[last + 1])
        gaps.append((float(lo), float(hi)))
    return InversionResult(omega, epsilon, gaps, gapped)


def ratio_model(omega, omega_x, g):
    """Single-oscillator ratio and its Jacobian with respect to (omega_x, g).

    Returns ``(value, jac)``; gapped points have value and derivatives 0.
    """
    q, dq = _relative_permittivity(omega, omega_x, g)
    ok = np.isfinite(q) & (q > 0)
    qs = np.where(ok, q, 1.0)
    value = np.where(ok, qs**-0.5, 0.0)
    factor = np.where(ok, -0.5 * qs**-1.5, 0.0)
    return value, factor[:, None] * dq


def _relative_permittivity(omega, omega_x, g):
    """eps / eps_r = 1 - 4 g^2 / (w^2 - omega_x^2) and its parameter gradient."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    d = np.square(omega) - omega_x**2
    with np.errstate(divide="ignore", invalid="ignore"):
        q = 1.0 - 4.0 * g**2 / d
        dq = np.column_stack([-8.0 * g**2 * omega_x / d**2, -8.0 * g / d])
    return q, dq


def _edge_weights(omega, gaps, spacing):
    """Down-weight samples within a few grid steps of a detected band edge."""
    if not gaps:
        return np.ones_like(omega)
    edges = np.array([e for gap in gaps for e in gap])
    distance = np.min(np.abs(omega[:, None] - edges[None, :]), axis=1)
    scale = 2.0 * spacing
    return distance / (distance + scale)


def fit_lorentz(
    trace,
    initial_guess,
    bounds=((1e-6, 1e6), (0.0, 1e6)),
    gap_threshold=GAP_THRESHOLD,
    max_iter=200,
    gtol=1e-10,
):
    """Weighted least-squares fit of (omega_x, g) to a measured ratio trace.

    The residual of a sample ``d`` is (1 - d**2 eps(w)/eps_r) / 2.  It equals
    the relative ratio residual (d - ratio)/ratio to first order, which suits
    multiplicative noise, and unlike the ratio itself it stays smooth when a
    trial oscillator pushes its gap over a propagating sample.

    Steps are damped Levenberg-Marquardt style: a trial step is accepted
    only if it lowers the objective, otherwise the damping grows.
    Convergence means the scaled gradient max_i |(J^T r)_i| / (|J_i| |r|),
    the largest cosine between the residual and a Jacobian column, falls
    below ``gtol``; residuals at rounding level count as converged.
    """
    theta = np.asarray(initial_guess, dtype=float)
    lower = np.array([b[0] for b in bounds], dtype=float)
    upper = np.array([b[1] for b in bounds], dtype=float)
    if theta.shape != (2,):
        raise ValueError("initial_guess must be (omega_x, g)")
    if np.any(theta < lower) or np.any(theta > upper):
        raise ValueError(f"initial guess {tuple(theta)} outside bounds {bounds}")

    inv = invert_ratio(trace, gap_threshold)
    usable = ~inv.gapped & ~np.isnan(trace.ratio)
    if np.count_nonzero(usable) < 3:
        raise ValueError("at least 3 non-gapped samples are required")
    omega = trace.omega[usable]
    data = np.asarray(trace.ratio, dtype=float)[usable]
    spacing = float(np.median(np.diff(trace.omega))) if trace.omega.size > 1 else 1.0
    weight = _edge_weights(omega, inv.gaps, spacing)
    pole_lo, pole_hi = _pole_window(trace.omega, usable, theta[0])
    if not pole_lo < theta[0] < pole_hi:
        theta[0] = 0.5 * (pole_lo + pole_hi) if pole_hi < math.inf else pole_lo + spacing
    sqrt_w = np.sqrt(weight)
    d2 = data**2

    def evaluate(params):
        q, dq = _relative_permittivity(omega, *params)
        r = sqrt_w * 0.5 * (1.0 - d2 * q)
        J = -(sqrt_w * 0.5 * d2)[:, None] * dq
        return r, J, float(r @ r)

    def scaled_gradient(params, r, J, cost):
        if cost <= _ROUNDOFF_COST * len(r):
            return 0.0
        norms = np.linalg.norm(J, axis=0) * math.sqrt(cost)
        return float(np.max(np.abs(J.T @ r) / np.where(norms > 0, norms, 1.0)))

    r, J, cost = evaluate(theta)
    history = [cost]
    damping = 1e-3
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        grad = scaled_gradient(theta, r, J, cost)
        if grad < gtol:
            converged = True
            iterations -= 1
            break
        JTJ = J.T @ J
        if not np.all(np.isfinite(JTJ)) or np.linalg.matrix_rank(JTJ) < 2:
            raise SingularJacobian("Jacobian lost rank; parameters not identifiable from the data")
        g = J.T @ r
        accepted = False
        while damping < 1e16:
            A = JTJ + damping * np.diag(np.diag(JTJ))
            step = -np.linalg.solve(A, g)
            trial = np.clip(theta + step, lower, upper)
            if not pole_lo < trial[0] < pole_hi:
                damping *= 4.0
                continue
            r_t, J_t, cost_t = evaluate(trial)
            if cost_t < cost:
                theta, r, J, cost = trial, r_t, J_t, cost_t
                damping = max(damping / 3.0, 1e-12)
                accepted = True
                break
            damping *= 4.0
        if not accepted:
            theta, r, J, cost = _polish(evaluate, theta, r, J, cost, (lower, upper), (pole_lo, pole_hi),
                                        scaled_gradient)
            converged = scaled_gradient(theta, r, J, cost) < gtol
            break
        history.append(cost)
    else:
        if scaled_gradient(theta, r, J, cost) < gtol:
            converged = True
        else:
            raise NonConvergence(f"fit did not converge in {max_iter} iterations")

    dof = max(len(data) - 2, 1)
    s2 = cost / dof
    try:
        cov = np.linalg.inv(J.T @ J) * s2
        stderr = tuple(float(math.sqrt(max(v, 0.0))) for v in np.diag(cov))
    except np.linalg.LinAlgError as exc:
        raise SingularJacobian(str(exc)) from exc
    return FitResult(
        eps_r=trace.eps_r,
        omega_x=float(theta[0]),
        g=float(theta[1]),
        rss=cost,
        iterations=iterations,
        converged=bool(converged),
        gradient_norm=scaled_gradient(theta, r, J, cost),
        stderr=stderr,
        history=history,
    )


def _pole_window(omega, usable, guess):
    """Open interval between usable samples that should contain the pole.

    The ratio vanishes at an oscillator frequency, so the pole can only sit
    in a stretch without propagating samples.  The window containing
    ``guess`` is returned, or the nearest one if the guess lies among data.
    """
    windows = []
    for first, last in _gap_runs(~usable):
        lo = omega[first - 1] if first > 0 else 0.0
        hi = omega[last + 1] if last + 1 < len(omega) else math.inf
        windows.append((float(lo), float(hi)))
    if not windows:
        raise ValueError("no gap detected in the trace; the oscillator frequency is unconstrained")
    for lo, hi in windows:
        if lo < guess < hi:
            return lo, hi
    return min(windows, key=lambda win: min(abs(guess - win[0]), abs(guess - win[1])))


def _polish(evaluate, theta, r, J, cost, bounds, window, scaled_gradient, steps=3):
    """Undamped Gauss-Newton steps once damped steps stop lowering the cost.

    Near the minimum the cost is flat to rounding, so a step is kept when the
    cost stays within rounding of its previous value and the gradient shrinks.
    """
    for _ in range(steps):
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        trial = np.clip(theta + step, *bounds)
        if not window[0] < trial[0] < window[1]:
            break
        r_t, J_t, cost_t = evaluate(trial)
        if cost_t > cost * (1.0 + 64 * np.finfo(float).eps):
            break
        if scaled_gradient(trial, r_t, J_t, cost_t) >= scaled_gradient(theta, r, J, cost):
            break
        theta, r, J, cost = trial, r_t, J_t, cost_t
    return theta, r, J, cost
