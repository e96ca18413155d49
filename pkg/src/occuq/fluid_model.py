"""Model assembly and spectral machinery.

Two workload models share one spectral interface:

* ``FluidModel``: an ON/OFF Markov-modulated fluid with one draining state
  (rate ``r1 < 0``) and phase-type ON periods inflowing at per-phase rates,
  doubly reflected in ``[0, K]``.
* ``Mg1Model``: the finite-buffer M/G/1 workload, a compound Poisson process
  with drain rate ``r1 < 0`` and phase-type upward jumps, reflected in
  ``[0, K]``.

For a transform argument ``q`` the machinery produces the n+1 roots and
associated vectors that drive every linear system downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateRoots, SingularSolve
from .phase_type import PhaseType, lst, mean

RESIDUAL_TOL_FLUID = 1e-8  # times ||Q||_inf
RESIDUAL_TOL_MG1 = 1e-9  # times (1 + |q|)
_DEGENERATE_RTOL = 1e-9
_ZERO_SNAP = 1e-12


@dataclass(frozen=True, eq=False)
class FluidModel:
    """Doubly-reflected ON/OFF fluid queue.

    Parameters
    ----------
    lam : float
        OFF-period rate (OFF durations are Exp(lam)).
    on : PhaseType
        ON-period law with n phases.
    r1 : float
        Drain rate during OFF periods, strictly negative.
    r_pos : ndarray, shape (n,)
        Inflow rates during ON phases, strictly positive.
    K : float
        Buffer capacity.
    tau : float
        Occupation threshold, in [0, K].
    """

    lam: float
    on: PhaseType
    r1: float
    r_pos: np.ndarray
    K: float
    tau: float

    def __post_init__(self) -> None:
        r_pos = np.asarray(self.r_pos, dtype=float).reshape(-1)
        object.__setattr__(self, "r_pos", r_pos)
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.r1 >= 0:
            raise ValueError("r1 must be negative")
        if r_pos.shape != (self.on.n,):
            raise ValueError("r_pos must provide one rate per ON phase")
        if np.any(r_pos <= 0):
            raise ValueError("all ON rates must be positive")
        if self.K <= 0:
            raise ValueError("K must be positive")
        if not 0.0 <= self.tau <= self.K:
            raise ValueError("tau must lie in [0, K]")

    @property
    def n(self) -> int:
        return self.on.n


@dataclass(frozen=True, eq=False)
class Mg1Model:
    """Finite-buffer M/G/1 workload with phase-type service."""

    lam: float
    jump: PhaseType
    r1: float
    K: float
    tau: float

    def __post_init__(self) -> None:
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.r1 >= 0:
            raise ValueError("r1 must be negative")
        if self.K <= 0:
            raise ValueError("K must be positive")
        if not 0.0 <= self.tau <= self.K:
            raise ValueError("tau must lie in [0, K]")

    @property
    def n(self) -> int:
        return self.jump.n


@dataclass(frozen=True, eq=False)
class RootSystem:
    """Roots and vectors of the spectral problem at one argument ``q``.

    ``roots[k]`` are the n+1 roots, ``h[k]`` the matching row vectors with
    ``h[k, 0] == 1``, and ``residuals[k]`` the defect norms certifying each
    pair (fluid: eigen-equation defect; M/G/1: |phi(p_k) - q|).
    """

    q: complex
    roots: np.ndarray
    h: np.ndarray
    residuals: np.ndarray
    kind: str = field(default="fluid")


def generator(model: FluidModel) -> np.ndarray:
    """Modulating-chain generator [[-lam, lam*alpha0'], [t_exit, T]]."""
    n = model.n
    Q = np.zeros((n + 1, n + 1))
    Q[0, 0] = -model.lam
    Q[0, 1:] = model.lam * model.on.alpha0
    Q[1:, 0] = model.on.t_exit
    Q[1:, 1:] = model.on.T
    return Q


def drift_vector(model: FluidModel) -> np.ndarray:
    return np.concatenate(([model.r1], model.r_pos))


def matrix_exponent(model: FluidModel, z: complex) -> np.ndarray:
    """F(z) = Q - z * diag(r1, r2, ..., r_{n+1})."""
    Q = generator(model).astype(complex)
    return Q - z * np.diag(drift_vector(model))


def _check_distinct(roots: np.ndarray, q: complex) -> None:
    m = roots.shape[0]
    for a in range(m):
        for b in range(a + 1, m):
            scale = max(1.0, abs(roots[a]), abs(roots[b]))
            if abs(roots[a] - roots[b]) <= _DEGENERATE_RTOL * scale:
                raise DegenerateRoots(
                    f"roots {roots[a]:.12g} and {roots[b]:.12g} coincide at q={q!r}"
                )


def roots(model: FluidModel, q: complex) -> RootSystem:
    """Spectral roots and vectors of det(Q - z*Delta_r - q*I) = 0.

    The n+1 roots are the eigenvalues of Delta_r^{-1} (Q - q I); the vectors
    satisfy (Q - rho_k Delta_r - q I) h_k = 0 with h_k[0] = 1.  A root with
    |rho| below the snap threshold (the q -> 0 limit) is frozen at exactly
    zero, where the vector is analytically the all-ones vector.
    """
    n = model.n
    Q = generator(model)
    r = drift_vector(model)
    A = (Q - q * np.eye(n + 1)) / r[:, None]
    rho = np.linalg.eigvals(A.astype(complex))
    scale = max(np.max(np.abs(A)), 1.0)
    rho = np.where(np.abs(rho) < _ZERO_SNAP * scale, 0.0 + 0.0j, rho)
    rho = rho[np.argsort(rho.real + 1e-9 * rho.imag)]  # deterministic order
    _check_distinct(rho, q)

    T = model.on.T
    t_exit = model.on.t_exit
    d_bar = np.diag(model.r_pos)
    h = np.ones((n + 1, n + 1), dtype=complex)
    for k in range(n + 1):
        if rho[k] == 0.0 and q == 0.0:
            continue  # h_k is exactly the all-ones vector
        M = T - rho[k] * d_bar - q * np.eye(n)
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > 1e13:
            raise SingularSolve(
                f"inner vector solve singular at root {rho[k]:.12g}, q={q!r}"
            )
        h[k, 1:] = -np.linalg.solve(M, t_exit.astype(complex))

    Qnorm = np.linalg.norm(Q, np.inf)
    F = Q.astype(complex)[None, :, :] - rho[:, None, None] * np.diag(r)[None, :, :] \
        - q * np.eye(n + 1)[None, :, :]
    residuals = np.abs(np.einsum("kij,kj->ki", F, h)).max(axis=1)
    if np.any(residuals > RESIDUAL_TOL_FLUID * Qnorm):
        raise SingularSolve(
            f"root/vector residual {residuals.max():.3e} exceeds "
            f"{RESIDUAL_TOL_FLUID * Qnorm:.3e} at q={q!r}"
        )
    return RootSystem(q=q, roots=rho, h=h, residuals=residuals, kind="fluid")


def laplace_exponent(model: Mg1Model, s: complex) -> complex:
    """phi(s) = -s*r1 - lam + lam * Bhat[s]."""
    return -s * model.r1 - model.lam + model.lam * lst(model.jump, s)


def mg1_roots(model: Mg1Model, q: complex) -> RootSystem:
    """The n+1 roots of phi(s) = q with their transform vectors.

    Clearing the denominator of phi(s) - q turns the root search into the
    eigenvalue problem of an (n+1) x (n+1) companion-like matrix

        [[-(lam+q)/r1, (lam/r1) * alpha0'], [t_exit, T]],

    whose characteristic polynomial is det(sI - T) (phi(s) - q) / (-r1).
    Vectors: h[k, 0] = 1 and h[k, j] = Bhat_j[p_k] for j >= 1.
    """
    n = model.n
    T = model.jump.T
    t_exit = model.jump.t_exit
    A = np.zeros((n + 1, n + 1), dtype=complex)
    A[0, 0] = -(model.lam + q) / model.r1
    A[0, 1:] = (model.lam / model.r1) * model.jump.alpha0
    A[1:, 0] = t_exit
    A[1:, 1:] = T
    p = np.linalg.eigvals(A)
    scale = max(np.max(np.abs(A)), 1.0)
    p = np.where(np.abs(p) < _ZERO_SNAP * scale, 0.0 + 0.0j, p)
    p = p[np.argsort(p.real + 1e-9 * p.imag)]
    _check_distinct(p, q)

    h = np.ones((n + 1, n + 1), dtype=complex)
    for k in range(n + 1):
        if p[k] == 0.0 and q == 0.0:
            continue  # Bhat_j[0] = 1 for every phase
        M = p[k] * np.eye(n) - T
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > 1e13:
            raise SingularSolve(
                f"(p I - T) singular at root {p[k]:.12g}, q={q!r}"
            )
        h[k, 1:] = np.linalg.solve(M, t_exit.astype(complex))

    residuals = np.array(
        [abs(laplace_exponent(model, pk) - q) for pk in p]
    )
    if np.any(residuals > RESIDUAL_TOL_MG1 * (1.0 + abs(q))):
        raise SingularSolve(
            f"phi(p)-q residual {residuals.max():.3e} exceeds tolerance at q={q!r}"
        )
    return RootSystem(q=q, roots=p, h=h, residuals=residuals, kind="mg1")


def load(model: FluidModel | Mg1Model) -> float:
    """Long-run input-to-service ratio.

    Fluid: lam * sum_j E[time in ON phase j] * r_{j+1} / |r1|.
    M/G/1: lam * E[jump] / |r1|.
    """
    if isinstance(model, FluidModel):
        # expected time in phase j per ON period: (alpha0' (-T)^-1)_j
        occ = np.linalg.solve(-model.on.T.T, model.on.alpha0)
        return float(model.lam * (occ @ model.r_pos) / abs(model.r1))
    return float(model.lam * mean(model.jump) / abs(model.r1))
