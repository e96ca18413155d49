"""Event-driven Monte Carlo of the reflected workload paths.

Paths are piecewise linear; boundary hits and threshold crossings are
computed in closed form, so there is no discretization error and the
empirical estimates are unbiased oracles for the transform pipeline.

Replications use independent splitmix64 streams derived from
``numpy.random.SeedSequence(seed)``, one stream per replication, so results
are reproducible and independent of evaluation order.  The kernel backend
(numba or pure numpy) is selected by ``OCCUQ_BACKEND``; both produce
bit-identical samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import backend_name
from .fluid_model import FluidModel, Mg1Model

__all__ = [
    "PathState", "PathRecord", "CycleSample", "CycleSamples",
    "simulate_path", "simulate_mg1_path", "simulate_cycles",
    "simulate_occupation", "mean_with_se", "backend_name",
]


@dataclass(frozen=True)
class PathState:
    """Snapshot at one event instant."""

    time: float
    workload: float
    phase: int
    local_time_lower: float
    local_time_upper: float


@dataclass(frozen=True)
class PathRecord:
    """Exact piecewise-linear path.

    ``phases[i]`` is the phase driving the segment [times[i], times[i+1]):
    1 is OFF (drain), 2..n+1 are ON phases; M/G/1 records use 1 throughout
    and represent jumps as duplicated time points.  Local times are
    cumulative at each event.
    """

    times: np.ndarray
    workloads: np.ndarray
    phases: np.ndarray
    local_time_lower: np.ndarray
    local_time_upper: np.ndarray
    horizon: float

    def __len__(self) -> int:
        return int(self.times.shape[0])

    def state(self, i: int) -> PathState:
        return PathState(float(self.times[i]), float(self.workloads[i]),
                         int(self.phases[i]),
                         float(self.local_time_lower[i]),
                         float(self.local_time_upper[i]))


@dataclass(frozen=True)
class CycleSample:
    """One regenerative cycle: spell below tau, spell above, crossing phase."""

    d: float
    u: float
    upcross_phase: int


class CycleSamples:
    """Column store of i.i.d. regenerative cycles."""

    def __init__(self, d: np.ndarray, u: np.ndarray,
                 upcross_phase: np.ndarray) -> None:
        self.d = d
        self.u = u
        self.upcross_phase = upcross_phase

    def __len__(self) -> int:
        return int(self.d.shape[0])

    def __getitem__(self, i: int) -> CycleSample:
        return CycleSample(float(self.d[i]), float(self.u[i]),
                           int(self.upcross_phase[i]))

    def empirical_transform(self, theta1: float, theta2: float):
        """Estimate of E exp(-theta1 D - theta2 U) with its standard error."""
        x = np.exp(-theta1 * self.d - theta2 * self.u)
        n = x.shape[0]
        se = float(np.std(x, ddof=1) / np.sqrt(n)) if n > 1 else float("inf")
        return float(np.mean(x)), se


def mean_with_se(samples: np.ndarray):
    """Sample mean and standard error of a 1-D sample array."""
    x = np.asarray(samples, dtype=float)
    n = x.shape[0]
    se = float(np.std(x, ddof=1) / np.sqrt(n)) if n > 1 else float("inf")
    return float(np.mean(x)), se


def _streams(seed, n: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)


def _ph_arrays(pt):
    a0c = np.cumsum(np.asarray(pt.alpha0, dtype=float))
    Tm = np.ascontiguousarray(pt.T, dtype=float)
    texit = np.ascontiguousarray(pt.t_exit, dtype=float)
    return a0c, Tm, texit


def simulate_cycles(model: FluidModel | Mg1Model, n_cycles: int,
                    seed=0) -> CycleSamples:
    """I.i.d. (D, U, upcrossing phase) cycles from fresh regenerations."""
    if n_cycles < 1:
        raise ValueError("n_cycles must be >= 1")
    seeds = _streams(seed, n_cycles)
    out_d = np.empty(n_cycles, dtype=float)
    out_u = np.empty(n_cycles, dtype=float)
    out_ph = np.empty(n_cycles, dtype=np.int64)
    if isinstance(model, FluidModel):
        a0c, Tm, texit = _ph_arrays(model.on)
        _kernels.fluid_cycles(seeds, model.lam, a0c, Tm, texit, model.r1,
                              np.ascontiguousarray(model.r_pos, dtype=float),
                              model.K, model.tau, out_d, out_u, out_ph)
    else:
        a0c, Tm, texit = _ph_arrays(model.jump)
        _kernels.mg1_cycles(seeds, model.lam, a0c, Tm, texit, model.r1,
                            model.K, model.tau, out_d, out_u, out_ph)
    return CycleSamples(out_d, out_u, out_ph)


def simulate_occupation(model: FluidModel | Mg1Model, t: float,
                        tau: float | None = None, n_paths: int = 10000,
                        seed=0) -> np.ndarray:
    """Exact samples of the occupation time of [0, tau] up to horizon t."""
    if not t > 0:
        raise ValueError("t must be positive")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    level = model.tau if tau is None else float(tau)
    if not 0.0 <= level <= model.K:
        raise ValueError("tau must lie in [0, K]")
    seeds = _streams(seed, n_paths)
    out = np.empty(n_paths, dtype=float)
    if isinstance(model, FluidModel):
        a0c, Tm, texit = _ph_arrays(model.on)
        _kernels.fluid_alpha(seeds, model.lam, a0c, Tm, texit, model.r1,
                             np.ascontiguousarray(model.r_pos, dtype=float),
                             model.K, level, t, out)
    else:
        a0c, Tm, texit = _ph_arrays(model.jump)
        _kernels.mg1_alpha(seeds, model.lam, a0c, Tm, texit, model.r1,
                           model.K, level, t, out)
    return out


def _run_path(kernel, args, horizon: float, cap0: int) -> PathRecord:
    cap = cap0
    while True:
        out_t = np.empty(cap, dtype=float)
        out_w = np.empty(cap, dtype=float)
        out_ph = np.empty(cap, dtype=np.int64)
        out_L = np.empty(cap, dtype=float)
        out_Lb = np.empty(cap, dtype=float)
        ret = kernel(*args, out_t, out_w, out_ph, out_L, out_Lb)
        if ret >= 0:
            sl = slice(0, int(ret))
            return PathRecord(out_t[sl].copy(), out_w[sl].copy(),
                              out_ph[sl].copy(), out_L[sl].copy(),
                              out_Lb[sl].copy(), horizon)
        cap *= 2


def simulate_path(model: FluidModel, horizon: float, seed=0) -> PathRecord:
    """Exact reflected fluid path from (tau, OFF) up to the horizon."""
    if not isinstance(model, FluidModel):
        raise TypeError("simulate_path takes a FluidModel; "
                        "use simulate_mg1_path for Mg1Model")
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    a0c, Tm, texit = _ph_arrays(model.on)
    n = model.on.n
    cap0 = 64 + int(horizon * model.lam * (4 + 4 * n))
    seed_word = _streams(seed, 1)[0]
    args = (seed_word, model.lam, a0c, Tm, texit, model.r1,
            np.ascontiguousarray(model.r_pos, dtype=float), model.K,
            model.tau, horizon)
    return _run_path(_kernels.fluid_path, args, horizon, cap0)


def simulate_mg1_path(model: Mg1Model, horizon: float, seed=0) -> PathRecord:
    """Exact reflected compound-Poisson path from (tau,) up to the horizon."""
    if not isinstance(model, Mg1Model):
        raise TypeError("simulate_mg1_path takes an Mg1Model")
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    a0c, Tm, texit = _ph_arrays(model.jump)
    cap0 = 64 + int(horizon * model.lam * 6)
    seed_word = _streams(seed, 1)[0]
    args = (seed_word, model.lam, a0c, Tm, texit, model.r1, model.K,
            model.tau, horizon)
    return _run_path(_kernels.mg1_path, args, horizon, cap0)
