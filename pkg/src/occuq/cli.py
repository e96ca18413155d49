"""Command-line front end: model configs in, CSV tables out.

Config files are flat ``key = value`` text: dotted lowercase keys, values
parsed as Python literals (numbers, lists) with bare words taken as
strings.  Example::

    model.kind = fluid
    model.lambda = 1.05
    on.kind = coxian
    on.p = [0.5]
    on.mu = [18, 2.25]
    rates.r1 = -1
    rates.pos = [1.8, 3.6]
    buffer.K = 2
    level.tau = 0.8

Commands: transform, cdf, density, simulate, compare, limit-study.  All
output is CSV with a header row and 17-significant-digit values; files are
written atomically and removed on failure.
"""

from __future__ import annotations

import argparse
import ast
import os
import sys
import tempfile

import numpy as np

from .errors import ConfigError, OccuqError
from .fluid_model import FluidModel, Mg1Model
from .laplace_inversion import EulerParams
from .phase_type import PhaseType, make_coxian, make_erlang, make_exponential
from .crossing_transforms import joint_transform, l1
from .occupation_transform import cdf_curve, density_curve
from . import simulator


# ---------------------------------------------------------------- config

def parse_config(path: str) -> dict:
    """Flat dotted key/value file -> {key: (value, line_number)}."""
    entries: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if not key or not val:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        try:
            value = ast.literal_eval(val)
        except (ValueError, SyntaxError):
            value = val  # bare word (e.g. coxian, fluid)
        if key in entries:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = (value, lineno)
    return entries


class _Config:
    """Typed accessors over parsed entries with line-precise errors."""

    def __init__(self, path: str, entries: dict) -> None:
        self.path = path
        self.entries = entries
        self.used: set = set()

    def _fail(self, key: str, msg: str):
        if key in self.entries:
            lineno = self.entries[key][1]
            raise ConfigError(f"{self.path}:{lineno}: {key}: {msg}")
        raise ConfigError(f"{self.path}: {key}: {msg}")

    def has(self, key: str) -> bool:
        return key in self.entries

    def get(self, key: str, default=None):
        if key not in self.entries:
            if default is not None:
                return default
            self._fail(key, "missing required key")
        self.used.add(key)
        return self.entries[key][0]

    def number(self, key: str, default=None) -> float:
        val = self.get(key, default)
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self._fail(key, f"expected a number, got {val!r}")
        return float(val)

    def integer(self, key: str, default=None) -> int:
        val = self.get(key, default)
        if isinstance(val, bool) or not isinstance(val, int):
            self._fail(key, f"expected an integer, got {val!r}")
        return int(val)

    def word(self, key: str, default=None) -> str:
        val = self.get(key, default)
        if not isinstance(val, str):
            self._fail(key, f"expected a word, got {val!r}")
        return val

    def vector(self, key: str, default=None) -> list:
        val = self.get(key, default)
        if isinstance(val, (int, float)) and not isinstance(val, bool):
            return [float(val)]
        if not isinstance(val, (list, tuple)) or not val or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool)
                for x in val):
            self._fail(key, f"expected a number list, got {val!r}")
        return [float(x) for x in val]

    def grid(self, key: str, default=None) -> np.ndarray:
        vec = self.vector(key, default)
        arr = np.asarray(vec, dtype=float)
        if arr.size == 0 or np.any(np.diff(arr) <= 0):
            self._fail(key, "grid must be nonempty and strictly increasing")
        return arr


def _build_phase(cfg: _Config) -> PhaseType:
    kind = cfg.word("on.kind")
    try:
        if kind == "exponential":
            return make_exponential(cfg.number("on.mu"))
        if kind == "erlang":
            return make_erlang(cfg.integer("on.m"), cfg.number("on.mu"))
        if kind == "coxian":
            mu = cfg.vector("on.mu")
            p = cfg.vector("on.p") if len(mu) > 1 else []
            return make_coxian(len(mu), p, mu)
    except (ValueError, TypeError) as exc:
        cfg._fail("on.kind", str(exc))
    cfg._fail("on.kind", f"unknown distribution kind {kind!r}")


def build_model(cfg: _Config):
    kind = cfg.word("model.kind")
    if kind not in ("fluid", "mg1"):
        cfg._fail("model.kind", f"expected fluid or mg1, got {kind!r}")
    lam = cfg.number("model.lambda")
    if lam <= 0:
        cfg._fail("model.lambda", "must be positive")
    on = _build_phase(cfg)
    r1 = cfg.number("rates.r1")
    if r1 >= 0:
        cfg._fail("rates.r1", "must be negative")
    K = cfg.number("buffer.K")
    if K <= 0:
        cfg._fail("buffer.K", "must be positive")
    tau = cfg.number("level.tau")
    if not 0.0 <= tau <= K:
        cfg._fail("level.tau", f"tau must lie in [0, K]={K}")
    try:
        if kind == "fluid":
            pos = np.asarray(cfg.vector("rates.pos"), dtype=float)
            return FluidModel(lam=lam, on=on, r1=r1, r_pos=pos, K=K, tau=tau)
        return Mg1Model(lam=lam, jump=on, r1=r1, K=K, tau=tau)
    except ValueError as exc:
        raise ConfigError(f"{cfg.path}: {exc}") from exc


def _euler_params(cfg: _Config, args) -> tuple[EulerParams, EulerParams]:
    M = args.euler_m if args.euler_m is not None else cfg.integer(
        "inversion.M", 10)
    N = cfg.integer("inversion.N", 15)
    gamma = args.gamma if args.gamma is not None else cfg.number(
        "inversion.gamma", 8.0)
    gamma_inner = cfg.number("inversion.gamma_inner", 10.0)
    try:
        outer = EulerParams(M=M, N=N, gamma=gamma)
        inner = EulerParams(M=M, N=N, gamma=gamma_inner)
    except ValueError as exc:
        raise ConfigError(f"{cfg.path}: inversion: {exc}") from exc
    return outer, inner


def _s_grid(cfg: _Config) -> np.ndarray:
    if cfg.has("grid.s"):
        return cfg.grid("grid.s")
    lo = cfg.number("grid.s_min")
    hi = cfg.number("grid.s_max")
    count = cfg.integer("grid.s_count")
    if not (hi > lo and count >= 2):
        cfg._fail("grid.s_count", "need s_max > s_min and s_count >= 2")
    return np.linspace(lo, hi, count)


def _write_csv(path: str, header: list, rows) -> None:
    """Atomic CSV write: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".occuq-", suffix=".csv",
                               dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(
                    x if isinstance(x, str) else format(x, ".17g")
                    for x in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# ---------------------------------------------------------------- commands

def cmd_transform(cfg: _Config, args) -> None:
    model = build_model(cfg)
    th1s = cfg.grid("grid.theta1")
    th2s = cfg.grid("grid.theta2")
    rows = []
    for th1 in th1s:
        L1 = l1(model, complex(th1)).real
        for th2 in th2s:
            try:
                L12 = joint_transform(model, complex(th1), complex(th2)).real
            except OccuqError as exc:
                raise OccuqError(
                    f"transform failed at theta1={th1}, theta2={th2}: {exc}"
                ) from exc
            rows.append((th1, th2, L12, L1))
    _write_csv(args.out, ["theta1", "theta2", "L12", "L1"], rows)


def _cdf_rows(cfg: _Config, args, want_density: bool):
    model = build_model(cfg)
    outer, inner = _euler_params(cfg, args)
    t_vals = cfg.vector("grid.t")
    s = _s_grid(cfg)
    rows = []
    for t in t_vals:
        if want_density:
            vals = density_curve(model, t, s, outer, inner)
        else:
            vals = cdf_curve(model, t, s, outer, inner)
        rows.extend((t, si, vi) for si, vi in zip(s, vals))
    return rows


def cmd_cdf(cfg: _Config, args) -> None:
    _write_csv(args.out, ["t", "s", "F"], _cdf_rows(cfg, args, False))


def cmd_density(cfg: _Config, args) -> None:
    _write_csv(args.out, ["t", "s", "f"], _cdf_rows(cfg, args, True))


def cmd_simulate(cfg: _Config, args) -> None:
    model = build_model(cfg)
    reps = args.reps if args.reps is not None else cfg.integer(
        "simulate.reps", 10000)
    seed = args.seed if args.seed is not None else cfg.integer(
        "simulate.seed", 0)
    kind = cfg.word("simulate.kind", "occupation")
    if kind == "occupation":
        horizon = cfg.number("simulate.horizon",
                             cfg.number("grid.t", 100.0))
        samples = simulator.simulate_occupation(model, horizon,
                                                n_paths=reps, seed=seed)
        mean, se = simulator.mean_with_se(samples)
        rows = [(i, a) for i, a in enumerate(samples)]
        _write_csv(args.out, ["rep", "alpha"], rows)
        print(f"alpha({horizon:g}): mean={mean:.6g} se={se:.3g} "
              f"reps={reps} backend={simulator.backend_name()}")
        return
    if kind == "cycles":
        cycles = simulator.simulate_cycles(model, reps, seed=seed)
        rows = [(i, cycles.d[i], cycles.u[i], int(cycles.upcross_phase[i]))
                for i in range(len(cycles))]
        _write_csv(args.out, ["rep", "d", "u", "upcross_phase"], rows)
        dm, dse = simulator.mean_with_se(cycles.d)
        um, use_ = simulator.mean_with_se(cycles.u)
        print(f"cycles: E[D]={dm:.6g} se={dse:.3g}, E[U]={um:.6g} "
              f"se={use_:.3g}, reps={reps} backend={simulator.backend_name()}")
        return
    cfg._fail("simulate.kind", f"expected occupation or cycles, got {kind!r}")


def cmd_compare(cfg: _Config, args) -> None:
    model = build_model(cfg)
    reps = args.reps if args.reps is not None else cfg.integer(
        "simulate.reps", 10000)
    seed = args.seed if args.seed is not None else cfg.integer(
        "simulate.seed", 0)
    th1s = cfg.grid("grid.theta1")
    th2s = cfg.grid("grid.theta2")
    cycles = simulator.simulate_cycles(model, reps, seed=seed)
    rows = []
    worst = 0.0
    for th1 in th1s:
        for th2 in th2s:
            exact = joint_transform(model, complex(th1), complex(th2)).real
            est, se = cycles.empirical_transform(float(th1), float(th2))
            gap = abs(est - exact)
            if se > 0.0:
                dev = gap / se
            else:
                dev = 0.0 if gap <= 1e-12 else float("inf")
            worst = max(worst, dev)
            rows.append((th1, th2, exact, est, se, dev,
                         "pass" if dev <= 3.0 else "fail"))
    _write_csv(args.out, ["theta1", "theta2", "analytic", "empirical",
                          "se", "dev_se", "status"], rows)
    print(f"compare: {len(rows)} points, worst |dev|={worst:.2f} s.e., "
          f"reps={reps}")


def cmd_limit_study(cfg: _Config, args) -> None:
    model = build_model(cfg)
    if not isinstance(model, FluidModel):
        raise ConfigError(f"{cfg.path}: limit-study requires model.kind "
                          "= fluid")
    pos = np.asarray(model.r_pos, dtype=float)
    if not np.allclose(pos, pos[0], rtol=1e-12, atol=0.0):
        cfg._fail("rates.pos", "limit-study requires equal positive rates")
    r0 = float(pos[0])
    base = PhaseType(n=model.on.n, alpha0=model.on.alpha0,
                     T=model.on.T / r0)
    mg1 = Mg1Model(lam=model.lam, jump=base, r1=model.r1, K=model.K,
                   tau=model.tau)
    outer, inner = _euler_params(cfg, args)
    rs = cfg.grid("grid.r")
    t_vals = cfg.vector("grid.t")
    s = _s_grid(cfg)
    rows = []
    for t in t_vals:
        F_mg1 = cdf_curve(mg1, t, s, outer, inner)
        for r in rs:
            scaled = FluidModel(
                lam=model.lam,
                on=PhaseType(n=base.n, alpha0=base.alpha0, T=r * base.T),
                r1=model.r1, r_pos=np.full(base.n, r), K=model.K,
                tau=model.tau)
            F_fluid = cdf_curve(scaled, t, s, outer, inner)
            rows.extend(
                (r, t, si, ff, fm, abs(ff - fm))
                for si, ff, fm in zip(s, F_fluid, F_mg1))
    _write_csv(args.out, ["r", "t", "s", "F_fluid", "F_mg1", "abs_diff"],
               rows)


_COMMANDS = {
    "transform": cmd_transform,
    "cdf": cmd_cdf,
    "density": cmd_density,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "limit-study": cmd_limit_study,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="occuq",
        description="Occupation-time transforms, inversion and simulation "
                    "for finite-buffer fluid and M/G/1 queues.")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="model config file")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--reps", type=int, default=None)
    parser.add_argument("--gamma", type=float, default=None)
    parser.add_argument("--euler-m", dest="euler_m", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        cfg = _Config(args.config, parse_config(args.config))
        _COMMANDS[args.command](cfg, args)
    except (OccuqError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
