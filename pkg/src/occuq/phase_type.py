"""Phase-type distributions: construction, evaluation, and sampling.

A phase-type law is the absorption time of a transient Markov chain with
``n`` states, initial distribution ``alpha0``, and sub-generator ``T``.
The exit-rate vector is ``t_exit = -T @ 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import SingularSolve

_ATOL = 1e-12
_COND_LIMIT = 1e14


@dataclass(frozen=True, eq=False)
class PhaseType:
    """Representation (n, alpha0, T) of a phase-type distribution.

    Parameters
    ----------
    n : int
        Number of transient phases.
    alpha0 : ndarray, shape (n,)
        Initial phase distribution; nonnegative, sums to one.
    T : ndarray, shape (n, n)
        Phase generator; nonnegative off-diagonal, negative diagonal,
        invertible (all phases transient).
    t_exit : ndarray, shape (n,)
        Exit rates, always equal to ``-T @ 1``.
    """

    n: int
    alpha0: np.ndarray
    T: np.ndarray
    t_exit: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        alpha0 = np.asarray(self.alpha0, dtype=float).reshape(-1)
        T = np.asarray(self.T, dtype=float)
        object.__setattr__(self, "alpha0", alpha0)
        object.__setattr__(self, "T", T)
        if self.n <= 0:
            raise ValueError("n must be a positive integer")
        if alpha0.shape != (self.n,) or T.shape != (self.n, self.n):
            raise ValueError("alpha0 and T shapes must match n")
        if np.any(alpha0 < -_ATOL) or abs(alpha0.sum() - 1.0) > _ATOL:
            raise ValueError("alpha0 must be a probability vector")
        if np.any(np.diag(T) >= 0.0):
            raise ValueError("diagonal of T must be negative")
        off = T - np.diag(np.diag(T))
        if np.any(off < -_ATOL):
            raise ValueError("off-diagonal of T must be nonnegative")
        t_exit = -T @ np.ones(self.n)
        if np.any(t_exit < -_ATOL):
            raise ValueError("row sums of T must be nonpositive")
        t_exit = np.maximum(t_exit, 0.0)
        object.__setattr__(self, "t_exit", t_exit)
        if abs(np.linalg.det(T)) == 0.0:
            raise ValueError("T must be invertible (all phases transient)")


def make_exponential(mu: float) -> PhaseType:
    """Exponential(mu) as a one-phase law."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    return PhaseType(1, np.array([1.0]), np.array([[-mu]]))


def make_erlang(m: int, mu: float) -> PhaseType:
    """Erlang with m stages of rate mu, entered at stage 1."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    if mu <= 0:
        raise ValueError("mu must be positive")
    T = np.diag(np.full(m, -mu)) + np.diag(np.full(m - 1, mu), k=1)
    alpha0 = np.zeros(m)
    alpha0[0] = 1.0
    return PhaseType(m, alpha0, T)


def make_coxian(m: int, p_vec, mu_vec) -> PhaseType:
    """Coxian chain: after stage k, continue with probability p_k, else exit.

    Parameters
    ----------
    m : int
        Number of stages.
    p_vec : sequence of m-1 floats in (0, 1]
        Continuation probabilities after stages 1..m-1.
    mu_vec : sequence of m positive floats
        Stage rates.
    """
    p = np.asarray(p_vec, dtype=float).reshape(-1)
    mu = np.asarray(mu_vec, dtype=float).reshape(-1)
    if m < 1 or mu.shape != (m,) or p.shape != (m - 1,):
        raise ValueError("need m rates and m-1 continuation probabilities")
    if np.any(mu <= 0):
        raise ValueError("stage rates must be positive")
    if np.any(p <= 0) or np.any(p > 1):
        raise ValueError("continuation probabilities must lie in (0, 1]")
    T = np.diag(-mu)
    for k in range(m - 1):
        T[k, k + 1] = p[k] * mu[k]
    alpha0 = np.zeros(m)
    alpha0[0] = 1.0
    return PhaseType(m, alpha0, T)


def survival(pt: PhaseType, x: float) -> float:
    """P(B > x) = alpha0' exp(T x) 1 for x >= 0."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    value = float(pt.alpha0 @ expm(pt.T * x) @ np.ones(pt.n))
    return min(max(value, 0.0), 1.0)


def lst(pt: PhaseType, s: complex, init: int | None = None) -> complex:
    """Laplace-Stieltjes transform alpha0' (sI - T)^-1 t_exit.

    With ``init=i`` (1-based phase index) the initial distribution is
    replaced by the unit vector at phase i, giving the transform of the
    residual absorption time from that phase.
    """
    M = s * np.eye(pt.n) - pt.T
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise SingularSolve(f"sI - T is numerically singular at s={s!r}")
    x = np.linalg.solve(M, pt.t_exit.astype(complex))
    if init is None:
        return complex(pt.alpha0 @ x)
    if not 1 <= init <= pt.n:
        raise ValueError("init must be a phase index in 1..n")
    return complex(x[init - 1])


def mean(pt: PhaseType) -> float:
    """Expected absorption time alpha0' (-T)^-1 1."""
    cond = np.linalg.cond(pt.T)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise SingularSolve("T is numerically singular")
    return float(pt.alpha0 @ np.linalg.solve(-pt.T, np.ones(pt.n)))


def sample(pt: PhaseType, rng: np.random.Generator):
    """Draw one absorption time along with its phase path.

    Returns
    -------
    total_time : float
    phase_path : list of (phase, sojourn)
        1-based phase indices in visiting order.
    """
    # embedded jump chain: from phase j go to phase m w.p. T[j,m]/-T[j,j],
    # absorb w.p. t_exit[j]/-T[j,j]
    phase = int(rng.choice(pt.n, p=pt.alpha0)) if pt.n > 1 else 0
    path = []
    total = 0.0
    while True:
        rate = -pt.T[phase, phase]
        soj = rng.exponential(1.0 / rate)
        path.append((phase + 1, soj))
        total += soj
        u = rng.random()
        acc = pt.t_exit[phase] / rate
        if u < acc:
            return total, path
        nxt = phase
        for m_ in range(pt.n):
            if m_ == phase:
                continue
            acc += pt.T[phase, m_] / rate
            if u < acc:
                nxt = m_
                break
        phase = nxt
