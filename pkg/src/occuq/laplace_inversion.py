"""Euler-summation Laplace inversion, one- and two-dimensional.

The 1-D routine is the classical Fourier-series method on the Bromwich
contour Re q = A/(2t) with alternating-series (Euler/binomial) acceleration.
The 2-D routine nests one inversion inside the other: the outer sum fixes
complex nodes q_m, and for each node the inner transform theta -> ghat(q_m,
theta) is inverted at s.  Because the inner "time-domain" values are complex,
the inner sum runs over both half-contours symmetrically and the real-part
projection is applied only at the outer level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvaluationFailure, OccuqError

_LN10 = math.log(10.0)


@dataclass(frozen=True)
class EulerParams:
    """Euler-summation parameters.

    M is the number of binomial averaging terms, N the base partial-sum
    length, and gamma the target decimal precision: the contour abscissa is
    A = gamma * ln 10.  gamma is kept in [6, 12]; outside that range double
    precision either wastes accuracy or amplifies round-off.
    """

    M: int = 10
    N: int = 15
    gamma: float = 8.0

    def __post_init__(self) -> None:
        if self.M < 0:
            raise ValueError("M must be nonnegative")
        if self.N < 1:
            raise ValueError("N must be positive")
        if not 6.0 <= self.gamma <= 12.0:
            raise ValueError("gamma must lie in [6, 12]")


def _binomial_weights(M: int) -> np.ndarray:
    w = np.array([math.comb(M, m) for m in range(M + 1)], dtype=float)
    return w / 2.0 ** M


def _call(fhat: Callable, arg: complex) -> complex:
    try:
        return complex(fhat(arg))
    except OccuqError as exc:
        raise EvaluationFailure(
            f"transform evaluation failed at node {arg!r}: {exc}"
        ) from exc


def euler_invert_1d(fhat: Callable[[complex], complex], t: float,
                    p: EulerParams | None = None) -> float:
    """Invert a Laplace transform of a real-valued function at t > 0.

    f(t) ~ (e^{A/2} / 2t) [f^(a0) + 2 sum_k (-1)^k Re f^(a0 + i k pi / t)]
    with a0 = A/(2t), the tail accelerated by binomially averaging partial
    sums S_N .. S_{N+M}.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    p = p or EulerParams()
    A = p.gamma * _LN10
    a0 = A / (2.0 * t)
    total = _call(fhat, complex(a0, 0.0)).real
    n_terms = p.N + p.M
    partial = np.empty(p.M + 1)
    for k in range(1, n_terms + 1):
        term = 2.0 * ((-1.0) ** k) * _call(fhat, complex(a0, k * math.pi / t)).real
        total += term
        if k >= p.N:
            partial[k - p.N] = total
    accel = float(_binomial_weights(p.M) @ partial)
    return math.exp(A / 2.0) / (2.0 * t) * accel


def _euler_invert_complex(ghat_fixed: Callable[[complex], complex], s: float,
                          p: EulerParams) -> complex:
    """Two-sided Euler inversion returning a complex value.

    Used for the inner stage of the 2-D method where the original function
    of s is complex-valued; conjugate symmetry is unavailable so both
    half-contours are summed explicitly.
    """
    B = p.gamma * _LN10
    b0 = B / (2.0 * s)
    step = math.pi / s
    total = _call(ghat_fixed, complex(b0, 0.0))
    n_terms = p.N + p.M
    partial = np.empty(p.M + 1, dtype=complex)
    for k in range(1, n_terms + 1):
        pair = _call(ghat_fixed, complex(b0, k * step)) \
            + _call(ghat_fixed, complex(b0, -k * step))
        total += ((-1.0) ** k) * pair
        if k >= p.N:
            partial[k - p.N] = total
    accel = complex(_binomial_weights(p.M) @ partial)
    return math.exp(B / 2.0) / (2.0 * s) * accel


def euler_invert_2d(ghat: Callable[[complex, complex], complex], t: float,
                    s: float, p_outer: EulerParams | None = None,
                    p_inner: EulerParams | None = None) -> float:
    """Invert a double transform ghat(q, theta) at (t, s), both > 0.

    Outer Euler sum in the t-variable over nodes q_m = A/(2t) + i m pi / t;
    each node's value is the inner complex inversion of theta -> ghat(q_m,
    theta) at s.  The real-part projection happens only in the outer sum.
    """
    if t <= 0 or s <= 0:
        raise ValueError("t and s must be positive")
    p_outer = p_outer or EulerParams(gamma=8.0)
    p_inner = p_inner or EulerParams(gamma=10.0)
    A = p_outer.gamma * _LN10
    a0 = A / (2.0 * t)

    def inner(q: complex) -> complex:
        return _euler_invert_complex(lambda th: ghat(q, th), s, p_inner)

    total = inner(complex(a0, 0.0)).real
    n_terms = p_outer.N + p_outer.M
    partial = np.empty(p_outer.M + 1)
    for k in range(1, n_terms + 1):
        term = 2.0 * ((-1.0) ** k) * inner(complex(a0, k * math.pi / t)).real
        total += term
        if k >= p_outer.N:
            partial[k - p_outer.N] = total
    accel = float(_binomial_weights(p_outer.M) @ partial)
    return math.exp(A / 2.0) / (2.0 * t) * accel
