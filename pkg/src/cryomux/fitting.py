"""Damped least-squares (Levenberg-Marquardt) fitting of SEB lineshapes.

The Jacobian is built by central finite differences with a relative
step of 1e-6; iteration stops when the relative parameter change drops
below 1e-9 or after 200 iterations.  Initial guesses are deterministic
functions of the data, so fits are reproducible without tuning.
"""

from __future__ import annotations

import numpy as np
from scipy.constants import e as Q_E
from scipy.constants import k as K_B

from .errors import DegenerateData, NoConvergence

MAX_ITER = 200
REL_STEP = 1e-6
PARAM_RTOL = 1e-9


def _jacobian(residual, x):
    """Central finite-difference Jacobian of the residual vector."""
    n = x.size
    r0 = residual(x)
    jac = np.empty((r0.size, n))
    for k in range(n):
        h = REL_STEP * max(abs(x[k]), 1.0)
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        jac[:, k] = (residual(xp) - residual(xm)) / (2.0 * h)
    return jac


def levenberg_marquardt(residual, x0, max_iter=MAX_ITER, rtol=PARAM_RTOL):
    """Minimize sum(residual(x)^2) with adaptive damping.

    Returns (x, n_iter, converged).  Raises NoConvergence when the
    damping parameter explodes without producing an acceptable step.
    """
    x = np.asarray(x0, dtype=float).copy()
    lam = 1e-3
    cost = float(np.sum(residual(x) ** 2))
    for it in range(1, max_iter + 1):
        jac = _jacobian(residual, x)
        r = residual(x)
        jtj = jac.T @ jac
        jtr = jac.T @ r
        accepted = False
        while lam < 1e14:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(np.diag(jtj) + 1e-300), jtr)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            x_new = x - step
            cost_new = float(np.sum(residual(x_new) ** 2))
            if np.isfinite(cost_new) and cost_new <= cost:
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            raise NoConvergence(
                f"no acceptable step at iteration {it} (damping saturated)"
            )
        rel_change = float(np.max(np.abs(step) / (np.abs(x) + 1e-300)))
        x = x_new
        cost = cost_new
        lam = max(lam / 10.0, 1e-12)
        if rel_change < rtol:
            return x, it, True
    return x, max_iter, False


def sech2_model(vg, amplitude, v0, t_e, offset, alpha):
    """A sech^2(e a (vg - v0) / 2 kB Te) + offset."""
    x = Q_E * alpha * (vg - v0) / (2.0 * K_B * abs(t_e))
    return amplitude / np.cosh(x) ** 2 + offset


def fit_electron_temperature(vg, signal, alpha: float):
    """Fit the thermally broadened lineshape; returns a result dict.

    Keys: t_e (K), v0 (V), amplitude, offset, n_iter, converged.
    Initial guesses: v0 at the data extremum, Te from the second moment
    of the lineshape weight, amplitude/offset from the data extremes.
    """
    vg = np.asarray(vg, dtype=float)
    y = np.asarray(signal, dtype=float)
    if vg.size != y.size:
        raise ValueError("vg and signal must have the same length")
    if vg.size < 10:
        raise DegenerateData(f"need >= 10 samples spanning the peak, got {vg.size}")
    span = float(np.ptp(y))
    if span == 0.0:
        raise DegenerateData("signal is constant; no lineshape to fit")

    median = float(np.median(y))
    peak_up = float(y.max()) - median >= median - float(y.min())
    if peak_up:
        amplitude0 = float(y.max()) - float(y.min())
        offset0 = float(y.min())
        v00 = float(vg[np.argmax(y)])
    else:
        amplitude0 = float(y.min()) - float(y.max())
        offset0 = float(y.max())
        v00 = float(vg[np.argmin(y)])
    weight = np.abs(y - offset0)
    wsum = float(weight.sum())
    var = float(np.sum(weight * (vg - v00) ** 2) / wsum) if wsum > 0 else 0.0
    # sech^2 weight has gate-voltage variance (pi^2/12) (2 kB Te / e a)^2
    if var > 0:
        t_e0 = np.sqrt(12.0 * var / np.pi**2) * Q_E * alpha / (2.0 * K_B)
    else:
        t_e0 = 0.1
    x0 = np.array([amplitude0, v00, t_e0, offset0])

    def residual(params):
        a, v0, t_e, off = params
        return sech2_model(vg, a, v0, t_e, off, alpha) - y

    x, n_iter, converged = levenberg_marquardt(residual, x0)
    return {
        "amplitude": float(x[0]),
        "v0": float(x[1]),
        "t_e": float(abs(x[2])),
        "offset": float(x[3]),
        "n_iter": n_iter,
        "converged": converged,
    }
