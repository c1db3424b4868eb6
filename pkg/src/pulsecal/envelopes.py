"""Pulse envelopes and their integral functionals."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import erf

from .model import Envelope, Shape

SQRT_PI = math.sqrt(math.pi)
SQRT_2PI = math.sqrt(2 * math.pi)


def _edge(env: Envelope) -> float:
    # gaussian value at t = 0 (and t = T)
    return math.exp(-0.5 * (env.duration / (2 * env.sigma)) ** 2)


def evaluate(env: Envelope, t):
    """Envelope amplitude d(t); zero outside ``[0, T]``. Accepts scalars or arrays."""
    t_arr = np.asarray(t, dtype=float)
    inside = (t_arr >= 0) & (t_arr <= env.duration)
    if env.shape is Shape.SQUARE:
        out = inside.astype(float)
    else:
        g = np.exp(-0.5 * ((t_arr - env.duration / 2) / env.sigma) ** 2)
        if env.shape is Shape.SHIFTED_GAUSSIAN:
            g0 = _edge(env)
            g = (g - g0) / (1 - g0)
        out = np.where(inside, np.clip(g, 0.0, 1.0), 0.0)
    return float(out) if out.ndim == 0 else out


def scalar_fn(env: Envelope):
    """Fast pure-Python ``d(t)`` for quadrature loops, valid on ``[0, T]``."""
    if env.shape is Shape.SQUARE:
        return lambda t: 1.0
    c, s = env.duration / 2, env.sigma
    if env.shape is Shape.GAUSSIAN:
        return lambda t: math.exp(-0.5 * ((t - c) / s) ** 2)
    g0 = _edge(env)
    norm = 1.0 / (1 - g0)
    return lambda t: (math.exp(-0.5 * ((t - c) / s) ** 2) - g0) * norm


def adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 60) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``."""
    if b == a:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4 * fm + fb) / 6
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) * (flo + 4 * flm + fmid) / 6
        right = (hi - mid) * (fmid + 4 * frm + fhi) / 6
        diff = left + right - est
        if depth >= max_depth or abs(diff) <= 15 * eps:
            total += left + right + diff / 15
        else:
            stack.append((lo, mid, flo, flm, fmid, left, eps / 2, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, eps / 2, depth + 1))
    return total


def _tol(env: Envelope, rtol: float = 1e-12) -> float:
    return rtol * env.duration


def _integrate(env: Envelope, f, upper: float | None = None, rtol: float = 1e-12) -> float:
    hi = env.duration if upper is None else min(max(upper, 0.0), env.duration)
    # split at the centre so the first panel never straddles the peak symmetrically
    mid = min(env.duration / 2, hi)
    tol = _tol(env, rtol) / 2
    return adaptive_simpson(f, 0.0, mid, tol) + adaptive_simpson(f, mid, hi, tol)


def area(env: Envelope, rtol: float = 1e-12) -> float:
    """Time integral of the envelope over the pulse."""
    if env.shape is Shape.SQUARE:
        return env.duration
    return _integrate(env, scalar_fn(env), rtol=rtol)


def corrected_area(env: Envelope, Omega_d: float) -> float:
    """Rotation angle including the RWA+ Rabi-frequency enhancement."""
    d = scalar_fn(env)
    k = 3 * Omega_d**2 / 8

    def f(t):
        x = d(t)
        return x * (1 + k * x * x)

    if env.shape is Shape.SQUARE:
        return Omega_d * env.duration * f(0.0)
    return Omega_d * _integrate(env, f)


def square_integral(env: Envelope, upper: float | None = None) -> float:
    """Quadrature of ``d(t)**2`` from 0 to ``upper`` (default: whole pulse)."""
    if env.shape is Shape.SQUARE:
        hi = env.duration if upper is None else min(max(upper, 0.0), env.duration)
        return hi
    d = scalar_fn(env)
    return _integrate(env, lambda t: d(t) ** 2, upper=upper)


def mean_square_fraction(env: Envelope) -> float:
    """``c1 = (1/T) * int_0^T d(t)**2 dt``."""
    return square_integral(env) / env.duration


def cumulative_square(env: Envelope, t) -> np.ndarray:
    """Closed-form ``int_0^t d(t')**2 dt'`` on an array of times (clipped to the pulse)."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, env.duration)
    if env.shape is Shape.SQUARE:
        return t
    c, s = env.duration / 2, env.sigma
    # int g^2 and int g with g the unshifted gaussian
    g2 = 0.5 * SQRT_PI * s * (erf((t - c) / s) + erf(c / s))
    if env.shape is Shape.GAUSSIAN:
        return g2
    g1 = SQRT_2PI / 2 * s * (erf((t - c) / (s * math.sqrt(2))) + erf(c / (s * math.sqrt(2))))
    g0 = _edge(env)
    return (g2 - 2 * g0 * g1 + g0 * g0 * t) / (1 - g0) ** 2
