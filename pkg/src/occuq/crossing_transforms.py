"""Transforms of the alternating sojourn times below and above the threshold.

The workload path decomposes into i.i.d. cycles: a spell ``D`` at or below
``tau`` ending in an upcrossing, then a spell ``U`` above ``tau`` ending at
the return to ``tau``.  Conditioning on the phase ``i`` active at the
upcrossing factorizes the joint transform:

    E exp(-theta1 D - theta2 U) = sum_i z_i(theta1) * w_i(theta2),

where ``z_i`` solves the upcrossing system (one equation per spectral root)
and ``w_i`` solves the return system.  Both systems are built from the
roots/vectors of :mod:`occuq.fluid_model`; the return side can also be
evaluated through explicit cofactor determinants, kept as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from weakref import WeakKeyDictionary

import numpy as np

from .errors import (DegenerateRoots, IllConditioned, SingularSolve,
                     ZeroDenominator)
from .fluid_model import FluidModel, Mg1Model, RootSystem, mg1_roots, roots

_COND_LIMIT = 1e12
_RETRY_STEPS = (1, 2, 3)
_CACHE_CAP = 8192

_root_cache: WeakKeyDictionary = WeakKeyDictionary()


@dataclass(frozen=True)
class UpcrossingSolution:
    """Transforms of the spell below the threshold.

    ``z[i]`` is the transform of the spell on the event that the upcrossing
    happens in ON phase i+2 (model numbering); ``ell`` is the discounted
    lower-boundary local time accumulated during the spell.
    """

    theta1: complex
    z: np.ndarray
    ell: complex


@dataclass(frozen=True)
class ReturnSolution:
    """Transforms of the spell above the threshold, all starting phases.

    ``w[i]`` is the return-time transform starting from ON phase i+2.
    ``ell_bar[i]`` is the matching vector of discounted upper-boundary local
    times by occupying phase; it is conditional on the starting phase, so a
    full matrix is kept (row per starting phase).
    """

    theta2: complex
    w: np.ndarray
    ell_bar: np.ndarray


def root_system(model: FluidModel | Mg1Model, q: complex) -> RootSystem:
    """Cached roots/vectors at ``q`` with the degenerate-argument retry.

    If the roots collide (or a vector solve degenerates) at ``q``, the
    evaluation is retried at q * (1 + 1e-7i u) for u = 1, 2, 3; the
    perturbation sits far below inversion tolerances.
    """
    per_model = _root_cache.get(model)
    if per_model is None:
        per_model = {}
        _root_cache[model] = per_model
    key = complex(q)
    hit = per_model.get(key)
    if hit is not None:
        return hit
    compute = roots if isinstance(model, FluidModel) else mg1_roots
    try:
        rs = compute(model, key)
    except (DegenerateRoots, SingularSolve):
        rs = None
        for u in _RETRY_STEPS:
            try:
                rs = compute(model, key * (1.0 + 1e-7j * u))
                break
            except (DegenerateRoots, SingularSolve):
                continue
        if rs is None:
            raise
    if len(per_model) >= _CACHE_CAP:
        per_model.clear()
    per_model[key] = rs
    return rs


def _equilibrated_solve(A: np.ndarray, B: np.ndarray, what: str):
    """Row-equilibrated solve with condition and residual guards."""
    scale = np.max(np.abs(A), axis=1)
    scale[scale == 0.0] = 1.0
    As = A / scale[:, None]
    Bs = B / scale[:, None] if B.ndim == 2 else B / scale
    cond = np.linalg.cond(As)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise IllConditioned(
            f"{what}: condition estimate {cond:.3e} exceeds {_COND_LIMIT:.0e}"
        )
    x = np.linalg.solve(As, Bs)
    resid = np.max(np.abs(As @ x - Bs))
    bound = 1e-10 * max(1.0, float(np.max(np.abs(Bs))))
    if resid > bound:
        raise IllConditioned(f"{what}: solve residual {resid:.3e} above {bound:.3e}")
    return x


def solve_upcrossing(rs: RootSystem, tau: float, theta1: complex) -> UpcrossingSolution:
    """Solve the upcrossing system at the root system's argument.

    Row k reads: sum_j z_j h[k, j] + e^{rho_k tau} rho_k ell = 1.  At a
    snapped zero root the row degenerates to sum_j z_j = 1, which pins the
    total upcrossing probability exactly in the theta1 = 0 limit.
    """
    m = rs.roots.shape[0]
    A = np.empty((m, m), dtype=complex)
    A[:, : m - 1] = rs.h[:, 1:]
    A[:, m - 1] = np.exp(rs.roots * tau) * rs.roots
    b = np.ones(m, dtype=complex)
    x = _equilibrated_solve(A, b, "upcrossing system")
    return UpcrossingSolution(theta1=theta1, z=x[: m - 1], ell=complex(x[m - 1]))


def _return_solution_all(rs: RootSystem, K: float, tau: float,
                         theta2: complex) -> ReturnSolution:
    m = rs.roots.shape[0]
    n = m - 1
    if tau == K:
        # empty excursion above the threshold: immediate return
        return ReturnSolution(theta2=theta2, w=np.ones(n, dtype=complex),
                              ell_bar=np.zeros((n, n), dtype=complex))
    A = np.empty((m, m), dtype=complex)
    A[:, 0] = 1.0
    coeff = rs.roots * np.exp(-rs.roots * (K - tau))
    A[:, 1:] = -coeff[:, None] * rs.h[:, 1:]
    B = rs.h[:, 1:]  # one right-hand side per starting phase
    X = _equilibrated_solve(A, B, "return system")
    return ReturnSolution(theta2=theta2, w=X[0, :].copy(),
                          ell_bar=X[1:, :].T.copy())


def solve_return(rs: RootSystem, K: float, tau: float, theta2: complex,
                 i: int):
    """Return-time transform from ON phase ``i`` (model numbering 2..n+1).

    Returns ``(w_i, ell_bar)`` where ``ell_bar[j]`` is the discounted
    upper-boundary local time spent in ON phase j+2 before the return,
    conditional on starting in phase ``i``.
    """
    n = rs.roots.shape[0] - 1
    if not 2 <= i <= n + 1:
        raise ValueError("i must be an ON phase index in 2..n+1")
    sol = _return_solution_all(rs, K, tau, theta2)
    return complex(sol.w[i - 2]), sol.ell_bar[i - 2].copy()


def w_via_determinants(rs: RootSystem, K: float, tau: float, theta2: complex,
                       i: int) -> complex:
    """Cofactor-expansion form of the return-time transform.

    w_i = sum_k (-1)^{1+k} c_k h[k, i] / sum_k (-1)^{1+k} c_k with c_k the
    minor over rows m != k of the matrix rho_m e^{-rho_m (K - tau)} h[m, j].
    Rows are rescaled before the determinants; the common factor cancels in
    the ratio.
    """
    m = rs.roots.shape[0]
    n = m - 1
    if not 2 <= i <= n + 1:
        raise ValueError("i must be an ON phase index in 2..n+1")
    if tau == K:
        return 1.0 + 0.0j
    coeff = rs.roots * np.exp(-rs.roots * (K - tau))
    Mt = coeff[:, None] * rs.h[:, 1:]
    scale = np.max(np.abs(Mt), axis=1)
    scale[scale == 0.0] = 1.0
    Ms = Mt / scale[:, None]
    d = np.empty(m, dtype=complex)
    for k in range(m):
        rows = np.delete(Ms, k, axis=0)
        d[k] = np.linalg.det(rows) / scale[k]
    signs = np.array([(-1.0) ** k for k in range(m)])
    C = np.sum(signs * d)
    mag = np.sum(np.abs(d))
    if abs(C) <= 1e-14 * max(mag, 1e-300):
        raise ZeroDenominator(
            f"cofactor sum cancels at theta2={theta2!r} (|C|={abs(C):.3e})"
        )
    return complex(np.sum(signs * d * rs.h[:, i - 1]) / C)


def joint_transform(model: FluidModel | Mg1Model, theta1: complex,
                    theta2: complex) -> complex:
    """E exp(-theta1 D - theta2 U) via the factorized linear systems."""
    up = solve_upcrossing(root_system(model, theta1), model.tau, theta1)
    ret = _return_solution_all(root_system(model, theta2), model.K,
                               model.tau, theta2)
    return complex(np.sum(up.z * ret.w))


def l1(model: FluidModel | Mg1Model, theta1: complex) -> complex:
    """E exp(-theta1 D); the return side collapses to w = 1."""
    up = solve_upcrossing(root_system(model, theta1), model.tau, theta1)
    return complex(np.sum(up.z))
