"""Hot simulation kernels with a numba backend and a pure-numpy fallback.

The same source functions are either compiled with ``numba.njit`` or run as
plain Python under ``np.errstate(over="ignore")`` (uint64 RNG arithmetic
relies on wraparound).  Backend choice: environment variable
``OCCUQ_BACKEND`` in {"auto", "numba", "numpy"}; "auto" takes numba when
importable.  Both backends draw bit-identical random streams.

RNG is splitmix64: one u64 state word per replication, seeded externally.
"""

from __future__ import annotations

import functools
import math
import os

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_U53 = 1.0 / 9007199254740992.0

_BACKEND_ENV = os.environ.get("OCCUQ_BACKEND", "auto").lower()
if _BACKEND_ENV not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"OCCUQ_BACKEND must be auto, numba or numpy (got {_BACKEND_ENV!r})"
    )

if _BACKEND_ENV in ("auto", "numba"):
    try:
        from numba import njit as _njit
        _HAVE_NUMBA = True
    except ImportError:
        if _BACKEND_ENV == "numba":
            raise
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False

USING_NUMBA = _HAVE_NUMBA


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"


def _inner(fn):
    """Helpers called from inside kernels: compiled, never wrapped."""
    return _njit(fn, cache=True) if USING_NUMBA else fn


def _kernel(fn):
    """Entry-point kernels: compiled, or errstate-wrapped plain Python."""
    if USING_NUMBA:
        return _njit(fn, cache=True)

    @functools.wraps(fn)
    def wrapper(*args):
        with np.errstate(over="ignore"):
            return fn(*args)

    return wrapper


def _u01_src(st):
    st[0] += _GOLDEN
    z = st[0]
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return float(z >> _S11) * _U53


_u01 = _inner(_u01_src)


def _exp_src(st, rate):
    # math.log1p lowers to the same libm call under numba, so both
    # backends round identically (the numpy ufunc does not)
    return -math.log1p(-_u01(st)) / rate


_exp = _inner(_exp_src)


def _ph_init_src(st, a0c):
    u = _u01(st)
    n = a0c.shape[0]
    for m in range(n):
        if u < a0c[m]:
            return m
    return n - 1


_ph_init = _inner(_ph_init_src)


def _ph_next_src(st, Tm, texit, ph):
    # embedded-chain step: -1 means absorption (ON period ends)
    n = texit.shape[0]
    rate = -Tm[ph, ph]
    u = _u01(st) * rate
    acc = texit[ph]
    if u < acc:
        return -1
    for m in range(n):
        if m == ph:
            continue
        acc += Tm[ph, m]
        if u < acc:
            return m
    return -1


_ph_next = _inner(_ph_next_src)


def _ph_jump_src(st, a0c, Tm, texit):
    tot = 0.0
    ph = _ph_init(st, a0c)
    while ph >= 0:
        tot += _exp(st, -Tm[ph, ph])
        ph = _ph_next(st, Tm, texit, ph)
    return tot


_ph_jump = _inner(_ph_jump_src)


# ---------------------------------------------------------------- fluid

def _fluid_cycles_src(seeds, lam, a0c, Tm, texit, r1, rpos, K, tau,
                      out_d, out_u, out_ph):
    st = np.empty(1, np.uint64)
    for c in range(seeds.shape[0]):
        st[0] = seeds[c]
        # spell below tau, from (tau, OFF) to the upcrossing
        level = tau
        d = 0.0
        up = -1
        rem = 0.0
        while up < 0:
            soj = _exp(st, lam)
            d += soj
            level += r1 * soj
            if level < 0.0:
                level = 0.0
            ph = _ph_init(st, a0c)
            while ph >= 0:
                rate = -Tm[ph, ph]
                soj = _exp(st, rate)
                r = rpos[ph]
                if level + r * soj >= tau:
                    tc = (tau - level) / r
                    d += tc
                    rem = soj - tc
                    up = ph
                    break
                level += r * soj
                d += soj
                ph = _ph_next(st, Tm, texit, ph)
        # spell above tau, to the return
        u = 0.0
        if tau < K:
            level = tau
            ph = up
            while True:
                while ph >= 0:
                    level += rpos[ph] * rem
                    if level > K:
                        level = K
                    u += rem
                    ph = _ph_next(st, Tm, texit, ph)
                    if ph >= 0:
                        rem = _exp(st, -Tm[ph, ph])
                soj = _exp(st, lam)
                if level + r1 * soj <= tau:
                    u += (level - tau) / (-r1)
                    break
                level += r1 * soj
                u += soj
                ph = _ph_init(st, a0c)
                rem = _exp(st, -Tm[ph, ph])
        out_d[c] = d
        out_u[c] = u
        out_ph[c] = up + 2


fluid_cycles = _kernel(_fluid_cycles_src)


def _fluid_alpha_src(seeds, lam, a0c, Tm, texit, r1, rpos, K, tau, horizon,
                     out_alpha):
    st = np.empty(1, np.uint64)
    for c in range(seeds.shape[0]):
        st[0] = seeds[c]
        tnow = 0.0
        level = tau
        alpha = 0.0
        ph = -1
        while tnow < horizon:
            if ph < 0:
                soj = _exp(st, lam)
                rate = r1
            else:
                soj = _exp(st, -Tm[ph, ph])
                rate = rpos[ph]
            seg = soj
            if tnow + seg > horizon:
                seg = horizon - tnow
            if rate < 0.0:
                if level <= tau:
                    alpha += seg
                else:
                    ttau = (level - tau) / (-rate)
                    if ttau < seg:
                        alpha += seg - ttau
                level += rate * seg
                if level < 0.0:
                    level = 0.0
            else:
                if tau >= K:
                    alpha += seg
                elif level <= tau:
                    ttau = (tau - level) / rate
                    if ttau >= seg:
                        alpha += seg
                    else:
                        alpha += ttau
                level += rate * seg
                if level > K:
                    level = K
            tnow += soj
            if tnow >= horizon:
                break
            if ph < 0:
                ph = _ph_init(st, a0c)
            else:
                ph = _ph_next(st, Tm, texit, ph)
        out_alpha[c] = alpha


fluid_alpha = _kernel(_fluid_alpha_src)


def _fluid_path_src(seed, lam, a0c, Tm, texit, r1, rpos, K, tau, horizon,
                    out_t, out_w, out_ph, out_L, out_Lb):
    cap = out_t.shape[0]
    st = np.empty(1, np.uint64)
    st[0] = seed
    tnow = 0.0
    level = tau
    L = 0.0
    Lb = 0.0
    ph = -1
    out_t[0] = 0.0
    out_w[0] = tau
    out_ph[0] = 1
    out_L[0] = 0.0
    out_Lb[0] = 0.0
    idx = 1
    code = 1
    while tnow < horizon:
        if ph < 0:
            soj = _exp(st, lam)
            rate = r1
            code = 1
        else:
            soj = _exp(st, -Tm[ph, ph])
            rate = rpos[ph]
            code = ph + 2
        seg = soj
        if tnow + seg > horizon:
            seg = horizon - tnow
        if rate < 0.0:
            tb = level / (-rate)
            if tb < seg:
                if tb > 0.0:
                    if idx >= cap:
                        return -1
                    out_t[idx] = tnow + tb
                    out_w[idx] = 0.0
                    out_ph[idx] = code
                    out_L[idx] = L
                    out_Lb[idx] = Lb
                    idx += 1
                L += (-rate) * (seg - tb)
                level = 0.0
            else:
                level += rate * seg
        else:
            if level < K:
                tb = (K - level) / rate
            else:
                tb = 0.0
            if tb < seg:
                if tb > 0.0:
                    if idx >= cap:
                        return -1
                    out_t[idx] = tnow + tb
                    out_w[idx] = K
                    out_ph[idx] = code
                    out_L[idx] = L
                    out_Lb[idx] = Lb
                    idx += 1
                Lb += rate * (seg - tb)
                level = K
            else:
                level += rate * seg
        tnow += soj
        if tnow >= horizon:
            break
        if ph < 0:
            ph = _ph_init(st, a0c)
        else:
            ph = _ph_next(st, Tm, texit, ph)
        if ph < 0:
            code = 1
        else:
            code = ph + 2
        if idx >= cap:
            return -1
        out_t[idx] = tnow
        out_w[idx] = level
        out_ph[idx] = code
        out_L[idx] = L
        out_Lb[idx] = Lb
        idx += 1
    if idx >= cap:
        return -1
    out_t[idx] = horizon
    out_w[idx] = level
    out_ph[idx] = code
    out_L[idx] = L
    out_Lb[idx] = Lb
    idx += 1
    return idx


fluid_path = _kernel(_fluid_path_src)


# ---------------------------------------------------------------- M/G/1

def _mg1_cycles_src(seeds, lam, a0c, Tm, texit, r1, K, tau,
                    out_d, out_u, out_ph):
    st = np.empty(1, np.uint64)
    for c in range(seeds.shape[0]):
        st[0] = seeds[c]
        level = tau
        d = 0.0
        up = -1
        post = tau
        while up < 0:
            a = _exp(st, lam)
            d += a
            level += r1 * a
            if level < 0.0:
                level = 0.0
            # deposit the jump phase by phase, catching the crossing quantum
            cum = level
            cross = -1
            ph = _ph_init(st, a0c)
            while ph >= 0:
                w = _exp(st, -Tm[ph, ph])
                if cross < 0 and cum < tau and cum + w > tau:
                    cross = ph
                cum += w
                ph = _ph_next(st, Tm, texit, ph)
            if cum > tau:
                if cross < 0:
                    cross = 0  # exact-touch tie, probability zero
                up = cross
                post = cum
                if post > K:
                    post = K
            else:
                level = cum
        u = 0.0
        if tau < K:
            level = post
            while True:
                a = _exp(st, lam)
                if level + r1 * a <= tau:
                    u += (level - tau) / (-r1)
                    break
                level += r1 * a
                u += a
                level += _ph_jump(st, a0c, Tm, texit)
                if level > K:
                    level = K
        out_d[c] = d
        out_u[c] = u
        out_ph[c] = up + 2


mg1_cycles = _kernel(_mg1_cycles_src)


def _mg1_alpha_src(seeds, lam, a0c, Tm, texit, r1, K, tau, horizon,
                   out_alpha):
    st = np.empty(1, np.uint64)
    for c in range(seeds.shape[0]):
        st[0] = seeds[c]
        tnow = 0.0
        level = tau
        alpha = 0.0
        while True:
            a = _exp(st, lam)
            seg = a
            if tnow + seg > horizon:
                seg = horizon - tnow
            if level <= tau:
                alpha += seg
            else:
                ttau = (level - tau) / (-r1)
                if ttau < seg:
                    alpha += seg - ttau
            level += r1 * seg
            if level < 0.0:
                level = 0.0
            tnow += a
            if tnow >= horizon:
                break
            level += _ph_jump(st, a0c, Tm, texit)
            if level > K:
                level = K
        out_alpha[c] = alpha


mg1_alpha = _kernel(_mg1_alpha_src)


def _mg1_path_src(seed, lam, a0c, Tm, texit, r1, K, tau, horizon,
                  out_t, out_w, out_ph, out_L, out_Lb):
    cap = out_t.shape[0]
    st = np.empty(1, np.uint64)
    st[0] = seed
    tnow = 0.0
    level = tau
    L = 0.0
    Lb = 0.0
    out_t[0] = 0.0
    out_w[0] = tau
    out_ph[0] = 1
    out_L[0] = 0.0
    out_Lb[0] = 0.0
    idx = 1
    while True:
        a = _exp(st, lam)
        seg = a
        if tnow + seg > horizon:
            seg = horizon - tnow
        tb = level / (-r1)
        if tb < seg:
            if tb > 0.0:
                if idx >= cap:
                    return -1
                out_t[idx] = tnow + tb
                out_w[idx] = 0.0
                out_ph[idx] = 1
                out_L[idx] = L
                out_Lb[idx] = Lb
                idx += 1
            L += (-r1) * (seg - tb)
            level = 0.0
        else:
            level += r1 * seg
        tnow += a
        if tnow >= horizon:
            break
        if idx + 1 >= cap:
            return -1
        out_t[idx] = tnow
        out_w[idx] = level
        out_ph[idx] = 1
        out_L[idx] = L
        out_Lb[idx] = Lb
        idx += 1
        post = level + _ph_jump(st, a0c, Tm, texit)
        if post > K:
            Lb += post - K
            post = K
        out_t[idx] = tnow
        out_w[idx] = post
        out_ph[idx] = 1
        out_L[idx] = L
        out_Lb[idx] = Lb
        idx += 1
        level = post
    if idx >= cap:
        return -1
    out_t[idx] = horizon
    out_w[idx] = level
    out_ph[idx] = 1
    out_L[idx] = L
    out_Lb[idx] = Lb
    idx += 1
    return idx


mg1_path = _kernel(_mg1_path_src)
