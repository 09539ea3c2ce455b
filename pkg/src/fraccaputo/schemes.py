"""Streaming evaluators of the Caputo derivative on a uniform grid.

Four discretizations consume samples u^0, u^1, ... one step at a time:

* ``l1_step``   -- direct piecewise-linear rule, O(n) per step;
* ``fir_step``  -- fast rule compressing the integrated-by-parts history
  kernel t**-(1+alpha), O(N_modes) per step;
* ``fidr_step`` -- fast rule compressing t**-alpha directly against the
  sample increments, O(N_modes) per step;
* ``gl_step``   -- fractional-difference rule with binomial weights over
  the full history (the storage-hungry baseline).

Both fast rules reduce to the two-point local term at the first step and
start their mode recurrences at the second, where two back samples first
exist.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .quadrature import gauss_jacobi_power
from .soe import SoEApproximation

__all__ = [
    "TimeGrid",
    "L1Weights",
    "HistoryState",
    "l1_weights",
    "l1_step",
    "new_history",
    "fir_step",
    "fidr_step",
    "fidr_expanded_weights",
    "gl_coefficients",
    "gl_step",
    "caputo_reference",
    "ReferenceError",
]

_SERIES_CUT = 0.5  # switch point between Taylor series and closed forms


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid with step dt, n_steps steps, horizon = dt * n_steps."""

    dt: float
    n_steps: int

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1:
            raise ValueError("need at least one step")

    @classmethod
    def from_horizon(cls, horizon: float, n_steps: int) -> "TimeGrid":
        return cls(horizon / n_steps, n_steps)

    @property
    def horizon(self) -> float:
        return self.dt * self.n_steps

    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)


# ---------------------------------------------------------------------------
# numerically stable coefficient helpers (shared with the PDE stepper)

def phi(x):
    """(1 - exp(-x)) / x, the mode gain of the increment-based fast rule."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0.0, 1.0, x)
    out = np.where(x == 0.0, 1.0, -np.expm1(-x) / safe)
    return float(out) if out.ndim == 0 else out


def _series(coeffs, x):
    acc = np.zeros_like(x)
    for c in coeffs[::-1]:
        acc = acc * x + c
    return acc


def lam1(x):
    """(exp(-x) - 1 + x) / x**2; series below x=0.5 to dodge cancellation."""
    x = np.asarray(x, dtype=float)
    small = x < _SERIES_CUT
    xs = np.where(small, x, 1.0)
    coeffs = [(-1.0) ** k / math.factorial(k + 2) for k in range(19)]
    ser = _series(coeffs, xs)
    xb = np.where(small, 1.0, x)
    closed = (np.exp(-xb) - 1.0 + xb) / xb ** 2
    out = np.where(small, ser, closed)
    return float(out) if out.ndim == 0 else out


def lam2(x):
    """(1 - exp(-x) - x*exp(-x)) / x**2; series below x=0.5."""
    x = np.asarray(x, dtype=float)
    small = x < _SERIES_CUT
    xs = np.where(small, x, 1.0)
    coeffs = [(-1.0) ** k * (k + 1) / math.factorial(k + 2) for k in range(19)]
    ser = _series(coeffs, xs)
    xb = np.where(small, 1.0, x)
    ex = np.exp(-xb)
    closed = (1.0 - ex - xb * ex) / xb ** 2
    out = np.where(small, ser, closed)
    return float(out) if out.ndim == 0 else out


def mode_step_coeffs(scheme: str, nodes: np.ndarray, dt: float):
    """Per-mode (decay, c_prev, c_prev2) of the one-step recurrence
    ``modes <- decay*modes + c_prev*u_prev + c_prev2*u_prev2``.

    Both fast rules share this algebraic shape, and the stepper applies
    them identically, which keeps their per-step cost the same.
    """
    x = nodes * dt
    decay = np.exp(-x)
    if scheme == "fir":
        return decay, decay * dt * lam1(x), decay * dt * lam2(x)
    if scheme == "fidr":
        gain = phi(x) * decay
        return decay, gain, -gain
    raise ValueError(f"no mode recurrence for scheme {scheme!r}")


# ---------------------------------------------------------------------------
# direct L1 rule

@dataclass(frozen=True)
class L1Weights:
    """Coefficients a_l = (l+1)**(1-alpha) - l**(1-alpha), l = 0, 1, ..."""

    alpha: float
    a_coeffs: np.ndarray

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("order must lie in (0, 1)")


def l1_weights(alpha: float, n_max: int) -> L1Weights:
    """Coefficients a_0 .. a_{n_max-1} for grids of up to n_max steps."""
    l = np.arange(n_max, dtype=float)
    return L1Weights(alpha, (l + 1.0) ** (1.0 - alpha) - l ** (1.0 - alpha))


def l1_step(weights: L1Weights, buffer, dt: float) -> float:
    """Direct rule on the full history u^0..u^n (n = len(buffer) - 1).

    value = dt**-a/Gamma(2-a) * [u^n - sum_{j=1}^{n-1}(a_{j-1}-a_j)u^{n-j}
                                 - a_{n-1} u^0]
    """
    u = np.asarray(buffer, dtype=float)
    n = len(u) - 1
    if n < 1:
        raise ValueError("need at least two samples (one step)")
    a = weights.a_coeffs
    if len(a) < n:
        raise ValueError(f"coefficient table too short: have {len(a)}, need {n}")
    val = u[n]
    if n >= 2:
        val -= np.dot(a[: n - 1] - a[1:n], u[n - 1:0:-1])
    val -= a[n - 1] * u[0]
    return float(dt ** -weights.alpha / math.gamma(2.0 - weights.alpha) * val)


# ---------------------------------------------------------------------------
# streaming state shared by all schemes

@dataclass(frozen=True)
class HistoryState:
    """Per-scheme recurrence state between steps.

    ``modes`` carries the exponential history modes of the fast rules and
    stays all-zero through step 1; ``buffer`` holds the full sample path
    for the direct rules and is absent otherwise.  ``last_two`` is
    (u^{n-1}, u^{n-2}) with n = step_index; the first sample is kept in
    ``u0`` because the integrated-by-parts rule references it directly.
    """

    scheme: str
    alpha: float
    dt: float
    step_index: int
    modes: np.ndarray | None
    buffer: tuple | None
    last_two: tuple
    u0: float

    def __post_init__(self) -> None:
        if self.scheme not in ("L1", "FIR", "FIDR", "GL"):
            raise ValueError(f"unknown scheme tag {self.scheme!r}")


def new_history(scheme: str, alpha: float, dt: float, u0: float,
                n_modes: int = 0) -> HistoryState:
    """Fresh state at step 0 holding only the initial sample."""
    scheme = scheme.upper()
    fast = scheme in ("FIR", "FIDR")
    return HistoryState(
        scheme=scheme,
        alpha=alpha,
        dt=dt,
        step_index=0,
        modes=np.zeros(n_modes) if fast else None,
        buffer=None if fast else (u0,),
        last_two=(u0, math.nan),
        u0=u0,
    )


def _check_fast_state(state: HistoryState, soe: SoEApproximation, tag: str) -> None:
    if state.scheme != tag:
        raise ValueError(f"state built for {state.scheme}, stepped as {tag}")
    if state.modes is None or len(state.modes) != soe.n_modes:
        raise ValueError("mode count of state and kernel disagree")


def fir_step(state: HistoryState, soe: SoEApproximation, u_n: float):
    """One step of the integrated-by-parts fast rule (kernel t**-(1+a)).

    Returns (value, new_state).  Mode recurrence (from step 2 on):
    U_i <- e^{-s dt} U_i + (e^{-s dt}/(s^2 dt)) [(e^{-s dt}-1+s dt) u^{n-1}
          + (1-e^{-s dt}-s dt e^{-s dt}) u^{n-2}]
    """
    _check_fast_state(state, soe, "FIR")
    alpha, dt = state.alpha, state.dt
    n = state.step_index + 1
    u_prev, u_prev2 = state.last_two
    decay, c1, c2 = mode_step_coeffs("fir", soe.nodes, dt)
    modes = decay * state.modes + c1 * u_prev + c2 * u_prev2 if n >= 2 else state.modes.copy()
    t_n = n * dt
    value = (u_n - u_prev) / (dt ** alpha * math.gamma(2.0 - alpha)) + (
        u_prev / dt ** alpha
        - state.u0 / t_n ** alpha
        - alpha * float(np.dot(soe.weights, modes))
    ) / math.gamma(1.0 - alpha)
    new = replace(state, step_index=n, modes=modes, last_two=(u_n, u_prev))
    return value, new


def fidr_step(state: HistoryState, soe: SoEApproximation, u_n: float):
    """One step of the increment-based fast rule (kernel t**-a).

    Returns (value, new_state).  Mode recurrence (from step 2 on):
    Psi_i <- e^{-s dt} Psi_i + (u^{n-1}-u^{n-2}) (1-e^{-s dt}) e^{-s dt}/(s dt)
    """
    _check_fast_state(state, soe, "FIDR")
    alpha, dt = state.alpha, state.dt
    n = state.step_index + 1
    u_prev, u_prev2 = state.last_two
    if n >= 2:
        x = soe.nodes * dt
        decay = np.exp(-x)
        modes = decay * state.modes + (u_prev - u_prev2) * phi(x) * decay
    else:
        modes = state.modes.copy()
    value = (u_n - u_prev) / (dt ** alpha * math.gamma(2.0 - alpha)) + float(
        np.dot(soe.weights, modes)
    ) / math.gamma(1.0 - alpha)
    new = replace(state, step_index=n, modes=modes, last_two=(u_n, u_prev))
    return value, new


def fidr_expanded_weights(soe: SoEApproximation, dt: float, n: int) -> np.ndarray:
    """Coefficients a_l = sum_i w_i (1-e^{-s_i dt}) e^{-l s_i dt} / (s_i dt),
    l = 0..n-1, of the unrolled increment-based rule."""
    if n < 1:
        raise ValueError("need n >= 1")
    x = soe.nodes * dt
    base = soe.weights * phi(x)
    l = np.arange(n, dtype=float)
    return np.exp(-np.multiply.outer(l, x)) @ base


def gl_coefficients(p: float, n: int) -> np.ndarray:
    """Signed binomial weights c_m = (-1)^m C(p, m), m = 0..n, by the
    recurrence c_0 = 1, c_m = c_{m-1} * (1 - (p+1)/m)."""
    m = np.arange(1, n + 1, dtype=float)
    c = np.empty(n + 1)
    c[0] = 1.0
    c[1:] = np.cumprod(1.0 - (p + 1.0) / m)
    return c


def gl_step(state: HistoryState, u_n: float, p: float):
    """One fractional-difference step over the full buffer.

    value = dt**-p * sum_{m=0}^{n} c_m u^{n-m}.  Returns (value, new_state).
    """
    if state.scheme != "GL":
        raise ValueError(f"state built for {state.scheme}, stepped as GL")
    if not 0.0 < p < 1.0:
        raise ValueError("order must lie in (0, 1)")
    u = np.array(state.buffer + (u_n,))
    n = len(u) - 1
    c = gl_coefficients(p, n)
    value = float(state.dt ** -p * np.dot(c, u[::-1]))
    new = replace(state, step_index=n, buffer=tuple(u), last_two=(u_n, state.last_two[0]))
    return value, new


# ---------------------------------------------------------------------------
# independent reference values

class ReferenceError(RuntimeError):
    """Quadrature reference failed to converge; carries the achieved tol."""

    def __init__(self, achieved: float):
        super().__init__(f"reference quadrature stalled at rel. {achieved:.2e}")
        self.achieved = achieved


_FAMILIES = {
    "sin": np.cos,            # derivative of sin
    "exp": np.exp,            # derivative of exp
}


def caputo_reference(family: str, alpha: float, t: float, sigma: float | None = None,
                     rtol: float = 1e-10) -> float:
    """Fractional derivative of a few analytic sample paths at time t.

    ``family="power"`` uses the exact rule for u = t**sigma:
    Gamma(sigma+1)/Gamma(sigma+1-alpha) * t**(sigma-alpha).  The other
    families integrate u'(t-v) against v**-alpha with a power-weight
    Gauss rule (which absorbs the endpoint singularity), doubling the
    rule size until two consecutive sizes agree to rtol.
    """
    if t <= 0:
        raise ValueError("reference requires t > 0")
    if family == "power":
        if sigma is None:
            raise ValueError("power family needs the exponent sigma")
        return math.gamma(sigma + 1.0) / math.gamma(sigma + 1.0 - alpha) * t ** (sigma - alpha)
    try:
        du = _FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}") from None
    prev = None
    achieved = math.inf
    for n in (8, 16, 32, 64):
        rule = gauss_jacobi_power(n, -alpha, t)
        val = float(np.sum(rule.weights * du(t - rule.nodes))) / math.gamma(1.0 - alpha)
        if prev is not None:
            achieved = abs(val - prev) / max(abs(val), 1e-300)
            if achieved <= rtol:
                return val
        prev = val
    raise ReferenceError(achieved)
