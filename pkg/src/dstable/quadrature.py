"""Double-exponential quadrature rules used by the special functions and CDF inversion.

Two rules live here:

* ``tanh_sinh`` -- adaptive integration on a finite interval, robust to integrable
  endpoint singularities (the CDF inversion integrand blows up like t**(alpha-1) at 0).
* ``exp_sinh_rule`` -- a fixed node/weight table for integrals over (0, inf) whose
  integrand decays at least algebraically; used for the oscillatory-tail integral of
  the unit-circle polylogarithm after contour rotation.
"""

from __future__ import annotations

import numpy as np

from .errors import PrecisionError

# Node positions are kept as offsets from the nearer endpoint so that values such as
# 1 - tanh(z) are not rounded away; beyond Z_MAX the offsets underflow usefulness.
_Z_MAX = 320.0
_T_MAX = float(np.arcsinh(2.0 * _Z_MAX / np.pi))


def _half_nodes(h: float, odd_only: bool):
    """Offsets/weights for the nonnegative abscissas t = k h of the tanh-sinh rule.

    offset = 1 - tanh((pi/2) sinh(kh)) is the node's distance from the endpoint of
    the canonical (-1, 1) interval; weight = (pi/2) cosh(kh) sech^2((pi/2) sinh(kh)).
    With ``odd_only`` only odd k are produced (the nodes new after halving h).
    """
    k = np.arange(1 if odd_only else 0, int(_T_MAX / h) + 1, 2 if odd_only else 1)
    t = k * h
    z = 0.5 * np.pi * np.sinh(t)
    ez = np.exp(-2.0 * z)
    offset = 2.0 * ez / (1.0 + ez)  # 1 - tanh(z) without cancellation
    sech2 = (2.0 * np.exp(-z) / (1.0 + ez)) ** 2
    weight = 0.5 * np.pi * np.cosh(t) * sech2
    good = (offset > 0) & (weight > 0)
    return k[good], offset[good], weight[good]


def tanh_sinh(f, a: float, b: float, tol: float = 1e-12, max_level: int = 12):
    """Integrate ``f`` over (a, b) with the tanh-sinh rule, doubling until converged.

    ``f`` must accept an ndarray of points strictly inside (a, b) and may return an
    array with extra leading axes (integration runs over the last axis), so a whole
    grid of integrals can share one set of nodes.  Returns ``(value, err_estimate)``
    where the estimate is the last level-to-level change.  Raises PrecisionError if
    that change never reaches ``tol``.
    """
    if not b > a:
        raise ValueError("tanh_sinh needs b > a")
    half = 0.5 * (b - a)

    running = None  # sum of w * f over all nodes seen so far (no h factor)
    previous = None
    for level in range(max_level + 1):
        h = 1.0 / (1 << level)
        k, offset, weight = _half_nodes(h, odd_only=level > 0)
        x_hi = b - half * offset
        x_lo = a + half * offset
        part = np.sum(f(x_hi) * weight, axis=-1)
        # k = 0 is the midpoint and must be counted once, not mirrored
        lo = k > 0
        part = part + np.sum(f(x_lo[lo]) * weight[lo], axis=-1)
        running = part if running is None else running + part
        value = half * h * running
        if previous is not None:
            err = float(np.max(np.abs(value - previous)))
            if err <= tol:
                return value, err
        previous = value
    raise PrecisionError(
        f"tanh-sinh quadrature did not reach tol={tol:g} after {max_level} doublings"
    )


def exp_sinh_rule(h: float = 1.0 / 12.0, t_lo: float = -3.95, t_hi: float = 6.78):
    """Fixed exp-sinh nodes/weights for ``int_0^inf g(u) du`` with u = exp((pi/2) sinh t).

    Returns ``(u, w)`` with ``sum(w * g(u))`` approximating the integral, provided
    g decays algebraically faster than 1/u (times any exponential).  The upper
    cutoff keeps u inside float64 range (u_max ~ 1e300).
    """
    t = np.arange(t_lo, t_hi + 0.5 * h, h)
    z = 0.5 * np.pi * np.sinh(t)
    u = np.exp(z)
    w = h * 0.5 * np.pi * np.cosh(t) * u
    return u, w
