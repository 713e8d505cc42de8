"""Monoexponential fitting with a damped Gauss-Newton loop.

The model is y = amplitude * exp(-t / tau) + offset.  The Jacobian is
analytic; damping follows the Marquardt convention of scaling the
normal-equation diagonal, which keeps the iteration exactly equivariant
under rescaling of the data.  The solver never raises on data that
merely fits badly: pathological inputs yield converged=False with a
diagnostic message.  Structural problems (too few points, bad segment
boundaries) raise FitError.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FitError

__all__ = [
    "FitResult",
    "PiecewiseRecoveryFit",
    "fit_mono_exponential",
    "fit_piecewise_recovery",
    "initial_guess",
    "bare_pump_time",
]

MAX_ITERATIONS = 200
REL_STEP_TOL = 1e-8


@dataclass
class FitResult:
    """Converged (or abandoned) state of a monoexponential fit."""

    amplitude: float
    tau: float
    offset: float
    std_errors: dict[str, float] = field(default_factory=dict)
    residual_norm: float = np.inf
    iterations: int = 0
    converged: bool = False
    message: str = ""

    def model(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.exp(-t / self.tau) + self.offset


@dataclass
class PiecewiseRecoveryFit:
    """Independent fits of the light-on and light-off trace segments.

    boundary_gap is the absolute mismatch of the two fitted models at
    the light-off time; continuity is diagnosed, not enforced.
    """

    during: FitResult
    after: FitResult
    boundary_gap: float


def _model_and_jacobian(theta: np.ndarray, t: np.ndarray):
    a, tau, c = theta
    e = np.exp(-t / tau)
    y = a * e + c
    jac = np.column_stack([e, a * t / tau**2 * e, np.ones_like(t)])
    return y, jac


def initial_guess(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Starting point from a log-linear regression on |y - tail mean|."""
    tail = max(3, len(y) // 10)
    c0 = float(np.mean(y[-tail:]))
    resid = y - c0
    a0 = float(resid[0])
    span = float(t[-1] - t[0])
    mag = np.abs(resid)
    mask = mag > 1e-3 * mag.max() if mag.max() > 0 else np.zeros(len(y), bool)
    tau0 = span / 3.0
    if mask.sum() >= 2:
        slope, _ = np.polyfit(t[mask], np.log(mag[mask]), 1)
        if slope < 0:
            tau0 = -1.0 / slope
    if a0 == 0.0:
        a0 = float(y.max() - y.min()) or 1.0
    return np.array([a0, tau0, c0])


def fit_mono_exponential(t: np.ndarray, y: np.ndarray,
                         p0: np.ndarray | None = None,
                         max_iterations: int = MAX_ITERATIONS,
                         rel_step_tol: float = REL_STEP_TOL) -> FitResult:
    """Fit y = A exp(-t/tau) + c by damped Gauss-Newton.

    Convergence: every parameter step below rel_step_tol in relative
    terms, or max_iterations reached (converged=False then).
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.ndim != 1 or y.shape != t.shape:
        raise FitError("t and y must be 1-D arrays of equal length")
    if len(t) < 4:
        raise FitError(f"need at least 4 samples to fit, got {len(t)}")
    if np.ptp(y) == 0.0:
        return FitResult(0.0, np.inf, float(y[0]), {}, 0.0, 0, False,
                         "constant data: time constant is undetermined")

    span = float(t[-1] - t[0])
    if span <= 0:
        raise FitError("time axis must be increasing")
    tau_min, tau_max = 1e-9 * span, 1e9 * span

    theta = np.asarray(p0, dtype=float) if p0 is not None else initial_guess(t, y)
    if theta[1] <= 0:
        theta[1] = span / 3.0
    resid = y - _model_and_jacobian(theta, t)[0]
    cost = float(resid @ resid)
    lam = 1e-3
    message = "did not converge within the iteration budget"
    converged = False
    iterations = 0

    for iterations in range(1, max_iterations + 1):
        _, jac = _model_and_jacobian(theta, t)
        jtj = jac.T @ jac
        grad = jac.T @ resid
        step = None
        for _ in range(50):
            damped = jtj + lam * np.diag(np.diag(jtj))
            try:
                cand = np.linalg.solve(damped, grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = theta + cand
            if trial[1] <= 0:
                lam *= 10.0
                continue
            trial_resid = y - _model_and_jacobian(trial, t)[0]
            trial_cost = float(trial_resid @ trial_resid)
            if trial_cost <= cost or not np.isfinite(cost):
                step = cand
                theta, resid, cost = trial, trial_resid, trial_cost
                lam = max(lam / 10.0, 1e-12)
                break
            lam *= 10.0
        if step is None:
            message = "damping saturated without an acceptable step"
            break
        rel = np.abs(step) / (np.abs(theta) + 1e-300)
        if np.all(rel < rel_step_tol):
            converged = True
            message = "converged"
            break

    if theta[1] <= tau_min or theta[1] >= tau_max:
        converged = False
        message = (f"tau driven to the search bound ({theta[1]:.3g} us); "
                   "data may not be exponential")

    std = _standard_errors(theta, t, resid)
    return FitResult(float(theta[0]), float(theta[1]), float(theta[2]), std,
                     float(np.linalg.norm(resid)), iterations, converged, message)


def _standard_errors(theta: np.ndarray, t: np.ndarray,
                     resid: np.ndarray) -> dict[str, float]:
    dof = len(t) - 3
    if dof <= 0:
        return {}
    _, jac = _model_and_jacobian(theta, t)
    try:
        cov = np.linalg.inv(jac.T @ jac) * (resid @ resid) / dof
    except np.linalg.LinAlgError:
        return {}
    diag = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return {"amplitude": float(diag[0]), "tau": float(diag[1]),
            "offset": float(diag[2])}


def fit_piecewise_recovery(t: np.ndarray, y: np.ndarray,
                           light_off_time: float,
                           light_on_time: float = 0.0) -> PiecewiseRecoveryFit:
    """Fit the light-on and light-off segments of a recovery trace.

    The light-on segment covers light_on_time <= t < light_off_time,
    the light-off segment t >= light_off_time.  Samples before
    light_on_time (pre-pulse baseline) are ignored.  Each segment is
    refitted with its own time origin, so the two time constants are
    directly the observed ones.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.ndim != 1 or y.shape != t.shape:
        raise FitError("t and y must be 1-D arrays of equal length")
    if light_off_time <= light_on_time:
        raise FitError("light_off_time must exceed light_on_time; "
                       "segments are swapped or empty")
    during_mask = (t >= light_on_time) & (t < light_off_time)
    after_mask = t >= light_off_time
    if during_mask.sum() < 4:
        raise FitError(
            f"during-light segment too short: {int(during_mask.sum())} samples "
            "between light_on_time and light_off_time (need >= 4)")
    if after_mask.sum() < 4:
        raise FitError(
            f"after-light segment too short: {int(after_mask.sum())} samples "
            "past light_off_time (need >= 4)")
    during = fit_mono_exponential(t[during_mask] - light_on_time, y[during_mask])
    after = fit_mono_exponential(t[after_mask] - light_off_time, y[after_mask])
    gap = abs(during.model(np.array([light_off_time - light_on_time]))[0]
              - after.model(np.array([0.0]))[0])
    return PiecewiseRecoveryFit(during, after, float(gap))


def bare_pump_time(effective_pump_time: float, t1: float) -> float:
    """Invert 1/T_eff = 1/T_op + 1/T_1 for the bare optical time T_op."""
    if effective_pump_time <= 0 or t1 <= 0:
        raise FitError("time constants must be positive")
    if effective_pump_time >= t1:
        raise FitError(
            "effective pump time must be shorter than t1 to solve for the "
            f"bare pump time (got {effective_pump_time} vs t1 {t1})")
    return 1.0 / (1.0 / effective_pump_time - 1.0 / t1)
