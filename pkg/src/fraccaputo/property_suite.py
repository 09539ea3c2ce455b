"""Seeded numerical checks of the schemes' discrete inequalities.

Every suite draws its random instances from a seeded generator, checks a
closed-form inequality against quantities computed by the actual scheme
implementations, and reports a status:

* ``pass`` / ``fail``      -- the inequality held / was violated;
* ``inadmissible``        -- the kernel error is too large for the
  inequality to say anything (vacuous bound), so nothing was checked;
* ``out-of-contract``     -- the requested instances violate a
  precondition (e.g. growth coefficients with positive real part in the
  stability suite).
"""
from __future__ import annotations

import math

import numpy as np

from .analysis import truncation_bound
from .schemes import (
    caputo_reference,
    fidr_step,
    fir_step,
    gl_coefficients,
    l1_step,
    l1_weights,
    new_history,
)
from .soe import SoEParams, build_soe

__all__ = [
    "fir_coercivity_suite",
    "fidr_coercivity_suite",
    "mesh_sobolev_suite",
    "summation_by_parts_suite",
    "truncation_suite",
    "gl_stability_suite",
    "run_property_suite",
]

_SLACK = 1e-12  # absolute-plus-relative float slack on inequality checks


def _result(name: str, status: str, checked: int, violations: list, **extra) -> dict:
    out = {"name": name, "status": status, "checked": checked, "violations": violations}
    out.update(extra)
    return out


def _run_fast(scheme: str, alpha: float, g: np.ndarray, dt: float, soe) -> np.ndarray:
    step = fir_step if scheme == "FIR" else fidr_step
    state = new_history(scheme, alpha, dt, g[0], n_modes=soe.n_modes)
    vals = np.empty(len(g) - 1)
    for n in range(1, len(g)):
        vals[n - 1], state = step(state, soe, g[n])
    return vals


def fir_coercivity_suite(seed: int, n_funcs: int = 100, n_steps: int = 20,
                         alpha: float = 0.3, dt: float = 0.05,
                         params: SoEParams | None = None) -> dict:
    """Quadratic-form lower bound of the integrated-by-parts fast rule.

    dt * sum_k (D g^k) g^k >= (t_n^-a - 2 a eps t_{n-1})/(2 G(1-a)) * dt * sum (g^k)^2
                            - (t_n^{1-a} - a(1-a) eps t_{n-1} dt)/G(2-a) * (g^0)^2
    with eps the certified bound of the kernel built at delta = dt.
    """
    params = params or SoEParams.from_ladder(0, 12, 6, 10)
    t_n, t_prev = n_steps * dt, (n_steps - 1) * dt
    soe = build_soe(1.0 + alpha, params, dt, t_n)
    eps = soe.bound
    if t_n ** -alpha - 2.0 * alpha * eps * t_prev <= 0.0:
        return _result("fir_coercivity", "inadmissible", 0, [], eps=eps)
    g1, g2 = math.gamma(1.0 - alpha), math.gamma(2.0 - alpha)
    rng = np.random.default_rng(seed)
    violations = []
    for k in range(n_funcs):
        g = rng.normal(size=n_steps + 1)
        g[0] = 2.0 * rng.normal()
        vals = _run_fast("FIR", alpha, g, dt, soe)
        lhs = dt * float(np.dot(vals, g[1:]))
        rhs = (t_n ** -alpha - 2.0 * alpha * eps * t_prev) / (2.0 * g1) * dt * float(
            np.sum(g[1:] ** 2)
        ) - (t_n ** (1.0 - alpha) - alpha * (1.0 - alpha) * eps * t_prev * dt) / g2 * g[0] ** 2
        if lhs < rhs - _SLACK * max(1.0, abs(rhs)):
            violations.append({"instance": k, "lhs": lhs, "rhs": rhs})
    return _result("fir_coercivity", "pass" if not violations else "fail",
                   n_funcs, violations, eps=eps)


def fidr_coercivity_suite(seed: int, n_funcs: int = 100, n_steps: int = 20,
                          alpha: float = 0.3, dt: float = 0.05,
                          params: SoEParams | None = None,
                          eps_override: float | None = None) -> dict:
    """Quadratic-form lower bound of the increment-based fast rule.

    dt * sum_k (D g^k) g^k >= dt (t_n^-a - eps0)/(2 G(1-a)) * sum (g^k)^2
        - (dt^{1-a}/(1-a) + t_{n-1} dt^-a)/(2 G(1-a)) * (g^0)^2.

    Skipped as inadmissible when eps0 >= t_n^-a or when eps0 exceeds the
    slack a/((1-a) dt^a) that caps the leading unrolled coefficient.
    """
    params = params or SoEParams.from_ladder(0, 12, 6, 10)
    t_n, t_prev = n_steps * dt, (n_steps - 1) * dt
    soe = build_soe(alpha, params, dt, t_n)
    eps0 = soe.bound if eps_override is None else eps_override
    if eps0 >= t_n ** -alpha or eps0 > alpha / ((1.0 - alpha) * dt ** alpha):
        return _result("fidr_coercivity", "inadmissible", 0, [], eps0=eps0)
    g1 = math.gamma(1.0 - alpha)
    rng = np.random.default_rng(seed)
    violations = []
    for k in range(n_funcs):
        g = rng.normal(size=n_steps + 1)
        g[0] = 2.0 * rng.normal()
        vals = _run_fast("FIDR", alpha, g, dt, soe)
        lhs = dt * float(np.dot(vals, g[1:]))
        rhs = dt * (t_n ** -alpha - eps0) / (2.0 * g1) * float(np.sum(g[1:] ** 2)) - (
            dt ** (1.0 - alpha) / (1.0 - alpha) + t_prev * dt ** -alpha
        ) / (2.0 * g1) * g[0] ** 2
        if lhs < rhs - _SLACK * max(1.0, abs(rhs)):
            violations.append({"instance": k, "lhs": lhs, "rhs": rhs})
    return _result("fidr_coercivity", "pass" if not violations else "fail",
                   n_funcs, violations, eps0=eps0)


def mesh_sobolev_suite(seed: int, n_funcs: int = 100) -> dict:
    """Discrete max-norm bound: |u|_inf^2 <= th |d_x u|^2 + (1/th + 1/L) |u|^2
    for th in {0.1, 1, 10}, trapezoid-weighted L2 norms."""
    rng = np.random.default_rng(seed)
    violations = []
    checked = 0
    for k in range(n_funcs):
        n = int(rng.integers(4, 200))
        L = float(rng.uniform(0.5, 5.0))
        h = L / n
        u = rng.normal(size=n + 1) * float(rng.uniform(0.1, 10.0))
        wts = np.full(n + 1, h)
        wts[0] = wts[-1] = h / 2.0
        norm_sq = float(np.sum(wts * u ** 2))
        grad_sq = float(np.sum((np.diff(u) / h) ** 2) * h)
        sup_sq = float(np.max(np.abs(u))) ** 2
        for theta in (0.1, 1.0, 10.0):
            checked += 1
            rhs = theta * grad_sq + (1.0 / theta + 1.0 / L) * norm_sq
            if sup_sq > rhs + _SLACK * max(1.0, rhs):
                violations.append({"instance": k, "theta": theta, "lhs": sup_sq, "rhs": rhs})
    return _result("mesh_sobolev", "pass" if not violations else "fail",
                   checked, violations)


def summation_by_parts_suite(seed: int, n_funcs: int = 100) -> dict:
    """-(d_x u_{1/2}) u_0 - h sum (d_x^2 u_i) u_i + (d_x u_{N-1/2}) u_N
    equals |d_x u|^2 to 1e-11 relative."""
    rng = np.random.default_rng(seed)
    violations = []
    for k in range(n_funcs):
        n = int(rng.integers(4, 300))
        h = float(rng.uniform(0.01, 1.0))
        u = rng.normal(size=n + 1)
        dx = np.diff(u) / h
        d2 = (dx[1:] - dx[:-1]) / h
        lhs = -dx[0] * u[0] - h * float(np.dot(d2, u[1:-1])) + dx[-1] * u[-1]
        rhs = h * float(np.sum(dx ** 2))
        if abs(lhs - rhs) > 1e-11 * max(1.0, abs(rhs)):
            violations.append({"instance": k, "lhs": lhs, "rhs": rhs})
    return _result("summation_by_parts", "pass" if not violations else "fail",
                   n_funcs, violations)


def truncation_suite(alphas=(0.1, 0.5, 0.9), dt: float = 1e-3, n_max: int = 1000,
                     variant: str = "L1",
                     params: SoEParams | None = None,
                     step_filter=None) -> dict:
    """Consistency-bound check of the direct rule on u = t**2 and u = sin t.

    For every step n <= n_max the rule's output is compared against the
    analytic derivative; the gap must stay below the closed-form bound
    (plus the certified kernel term for the increment-based fast rule).
    """
    if variant not in ("L1", "FIDR"):
        raise ValueError("variant must be L1 or FIDR")
    steps = range(1, n_max + 1) if step_filter is None else step_filter
    steps = [int(n) for n in steps]
    violations = []
    checked = 0
    for alpha in alphas:
        soe = None
        if variant == "FIDR":
            p = params or SoEParams.from_ladder(0, 15, 8, 6)
            soe = build_soe(alpha, p, dt, n_max * dt)
        w = l1_weights(alpha, n_max)
        t = dt * np.arange(n_max + 1)
        for u, m2, ref in (
            (t ** 2, 2.0, lambda n: caputo_reference("power", alpha, t[n], sigma=2.0)),
            (np.sin(t), 1.0, lambda n: caputo_reference("sin", alpha, t[n])),
        ):
            vals = _l1_all_steps(w, u, dt) if variant == "L1" else _run_fast(
                "FIDR", alpha, u, dt, soe)
            for n in steps:
                checked += 1
                # max|u'| on [0, t_{n-1}]: 1 for sin, 2 t_{n-1} for t**2
                bnd = truncation_bound(variant, alpha, dt, m2,
                                       max_u1=1.0 if m2 == 1.0 else 2.0 * t[n - 1],
                                       t_prev=(n - 1) * dt,
                                       eps0=soe.bound if soe is not None else 0.0)
                gap = abs(vals[n - 1] - ref(n))
                if gap > bnd:
                    violations.append({"alpha": alpha, "n": n, "gap": gap, "bound": bnd})
    return _result(f"truncation_{variant.lower()}", "pass" if not violations else "fail",
                   checked, violations)


def _l1_all_steps(w, u, dt) -> np.ndarray:
    return np.array([l1_step(w, u[: n + 1], dt) for n in range(1, len(u))])


def gl_stability_suite(seed: int, n_pairs: int = 20, n_steps: int = 2000,
                       inject=None) -> dict:
    """Implicit fractional-difference solve of D^p u = c u must not grow.

    c is complex with Re(c) <= 0; pairs violating that precondition are
    reported as out-of-contract rather than failures.
    """
    rng = np.random.default_rng(seed)
    pairs = inject if inject is not None else [
        (float(rng.uniform(0.05, 0.95)),
         complex(-rng.uniform(0.0, 5.0), 3.0 * rng.normal()))
        for _ in range(n_pairs)
    ]
    bad_contract = [(p, str(c)) for p, c in pairs if c.real > 0.0]
    if bad_contract:
        return _result("gl_stability", "out-of-contract", 0, [],
                       offending=bad_contract)
    violations = []
    for p, c in pairs:
        dt = float(rng.uniform(1e-3, 1e-1))
        cm = gl_coefficients(p, n_steps)
        u = np.zeros(n_steps + 1, dtype=complex)
        u[0] = 1.0
        z = dt ** p * c
        for n in range(1, n_steps + 1):
            u[n] = -np.dot(cm[1: n + 1], u[n - 1:: -1]) / (1.0 - z)
        if float(np.max(np.abs(u))) > abs(u[0]) + 1e-12:
            violations.append({"p": p, "c": str(c), "max": float(np.max(np.abs(u)))})
    return _result("gl_stability", "pass" if not violations else "fail",
                   len(pairs), violations)


def run_property_suite(seed: int, quick: bool = False) -> dict:
    """All suites under one seed; ``quick`` thins the dense truncation scan."""
    step_filter = range(1, 1001, 13) if quick else None
    suites = [
        fir_coercivity_suite(seed),
        fidr_coercivity_suite(seed + 1),
        mesh_sobolev_suite(seed + 2),
        summation_by_parts_suite(seed + 3),
        truncation_suite(variant="L1", step_filter=step_filter),
        truncation_suite(variant="FIDR", step_filter=step_filter),
        gl_stability_suite(seed + 4),
    ]
    return {
        "seed": seed,
        "suites": suites,
        "all_pass": all(s["status"] in ("pass", "inadmissible") for s in suites),
    }
