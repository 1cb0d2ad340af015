"""The six lattice families: parameters, exact characteristic functions,
compound-Poisson views, Levy weights, and their limiting stable laws.

Every family lives on the lattice a*Z and has a CF of the form
exp(-Lambda (1 - h(t))) for a total jump intensity Lambda and a single-jump
CF h; `char_fn` evaluates the closed form directly and
`compound_poisson_view` exposes the (Lambda, h) decomposition, which agree
to rounding by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import DomainError
from .special import polylog_unit, riemann_zeta, sibuya_pmf, sibuya_survival

__all__ = [
    "StableParams",
    "AttractionTarget",
    "CompoundPoissonView",
    "SymmetricDS",
    "TruncatedSDS",
    "DiscreteStable",
    "TemperedDS",
    "PolylogDS",
    "TruncatedPolylogDS",
    "FamilyParams",
    "char_fn",
    "stable_cf",
    "derived_intensities",
    "compound_poisson_view",
    "levy_weight",
    "target_stable",
    "symmetric_levy_weights",
]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def _finite(x: float) -> bool:
    return math.isfinite(x)


# ---------------------------------------------------------------------------
# parameter types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StableParams:
    """Strictly stable law: index alpha, skew beta, scale sigma."""

    alpha: float
    beta: float
    sigma: float

    def __post_init__(self):
        _require(_finite(self.alpha) and 0.0 < self.alpha <= 2.0,
                 f"alpha must be in (0, 2], got {self.alpha!r}")
        _require(_finite(self.beta) and -1.0 <= self.beta <= 1.0,
                 f"beta must be in [-1, 1], got {self.beta!r}")
        _require(_finite(self.sigma) and self.sigma > 0.0,
                 f"sigma must be > 0, got {self.sigma!r}")


@dataclass(frozen=True)
class AttractionTarget:
    """Limit law of normalized sums: a stable law, a Gaussian, or both.

    `stable` is the formal stable law whose tails the family's Levy measure
    mimics (None when no such law exists); `gaussian` is True when the family
    has finite variance and therefore sums into the Gaussian domain.
    """

    stable: Optional[StableParams]
    gaussian: bool


@dataclass(frozen=True)
class CompoundPoissonView:
    """Total jump intensity and single-jump CF: char_fn = exp(-Lambda(1 - h))."""

    total_intensity: float
    jump_cf: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SymmetricDS:
    """Symmetric lattice law with CF exp{-sigma^2g (2/a^2)^g (1-cos at)^g}, g = gamma."""

    gamma: float
    sigma: float
    a: float

    def __post_init__(self):
        _require(_finite(self.gamma) and 0.0 < self.gamma <= 1.0,
                 f"gamma must be in (0, 1], got {self.gamma!r}")
        _require(_finite(self.sigma) and self.sigma > 0.0,
                 f"sigma must be > 0, got {self.sigma!r}")
        _require(_finite(self.a) and self.a > 0.0,
                 f"a must be > 0, got {self.a!r}")


@dataclass(frozen=True)
class TruncatedSDS:
    """SymmetricDS with the jump-size series truncated at m steps."""

    gamma: float
    sigma: float
    a: float
    m: int

    def __post_init__(self):
        _require(_finite(self.gamma) and 0.0 < self.gamma <= 1.0,
                 f"gamma must be in (0, 1], got {self.gamma!r}")
        _require(_finite(self.sigma) and self.sigma > 0.0,
                 f"sigma must be > 0, got {self.sigma!r}")
        _require(_finite(self.a) and self.a > 0.0,
                 f"a must be > 0, got {self.a!r}")
        _require(isinstance(self.m, (int, np.integer)) and not isinstance(self.m, bool)
                 and self.m >= 1, f"m must be an integer >= 1, got {self.m!r}")


@dataclass(frozen=True)
class DiscreteStable:
    """Two-sided lattice law with log CF -l1 (1-e^{iat})^alpha - l2 (1-e^{-iat})^alpha."""

    alpha: float
    beta: float
    sigma: float
    a: float

    def __post_init__(self):
        _require(_finite(self.alpha) and 0.0 < self.alpha < 1.0,
                 f"alpha must be in (0, 1), got {self.alpha!r}")
        _require(_finite(self.beta) and -1.0 <= self.beta <= 1.0,
                 f"beta must be in [-1, 1], got {self.beta!r}")
        _require(_finite(self.sigma) and self.sigma > 0.0,
                 f"sigma must be > 0, got {self.sigma!r}")
        _require(_finite(self.a) and self.a > 0.0,
                 f"a must be > 0, got {self.a!r}")


@dataclass(frozen=True)
class TemperedDS:
    """DiscreteStable with per-index exponential tempering e^{-theta k} on each side."""

    alpha: float
    beta: float
    sigma: float
    a: float
    theta1: float
    theta2: float

    def __post_init__(self):
        _require(_finite(self.alpha) and 0.0 < self.alpha < 1.0,
                 f"alpha must be in (0, 1), got {self.alpha!r}")
        _require(_finite(self.beta) and -1.0 <= self.beta <= 1.0,
                 f"beta must be in [-1, 1], got {self.beta!r}")
        _require(_finite(self.sigma) and self.sigma > 0.0,
                 f"sigma must be > 0, got {self.sigma!r}")
        _require(_finite(self.a) and self.a > 0.0,
                 f"a must be > 0, got {self.a!r}")
        _require(_finite(self.theta1) and self.theta1 >= 0.0,
                 f"theta1 must be >= 0, got {self.theta1!r}")
        _require(_finite(self.theta2) and self.theta2 >= 0.0,
                 f"theta2 must be >= 0, got {self.theta2!r}")
        _require(self.theta1 + self.theta2 > 0.0,
                 "theta1 + theta2 must be > 0 (otherwise use DiscreteStable)")


@dataclass(frozen=True)
class PolylogDS:
    """Lattice law whose Levy weights are P k^{-1-alpha} (right) and Q (left)."""

    alpha: float
    p: float
    q: float
    a: float

    def __post_init__(self):
        _require(_finite(self.alpha) and self.alpha > 0.0,
                 f"alpha must be > 0, got {self.alpha!r}")
        _require(_finite(self.p) and self.p >= 0.0,
                 f"P must be >= 0, got {self.p!r}")
        _require(_finite(self.q) and self.q >= 0.0,
                 f"Q must be >= 0, got {self.q!r}")
        _require(self.p + self.q > 0.0, "P + Q must be > 0")
        _require(_finite(self.a) and self.a > 0.0,
                 f"a must be > 0, got {self.a!r}")


@dataclass(frozen=True)
class TruncatedPolylogDS:
    """PolylogDS with jump magnitudes capped at m lattice steps."""

    alpha: float
    p: float
    q: float
    a: float
    m: int

    def __post_init__(self):
        _require(_finite(self.alpha) and self.alpha > 0.0,
                 f"alpha must be > 0, got {self.alpha!r}")
        _require(_finite(self.p) and self.p >= 0.0,
                 f"P must be >= 0, got {self.p!r}")
        _require(_finite(self.q) and self.q >= 0.0,
                 f"Q must be >= 0, got {self.q!r}")
        _require(self.p + self.q > 0.0, "P + Q must be > 0")
        _require(_finite(self.a) and self.a > 0.0,
                 f"a must be > 0, got {self.a!r}")
        _require(isinstance(self.m, (int, np.integer)) and not isinstance(self.m, bool)
                 and self.m >= 1, f"m must be an integer >= 1, got {self.m!r}")


FamilyParams = Union[
    SymmetricDS, TruncatedSDS, DiscreteStable, TemperedDS, PolylogDS, TruncatedPolylogDS
]


# ---------------------------------------------------------------------------
# shared numerics
# ---------------------------------------------------------------------------


def _sibuya_weights(gamma: float, m: int) -> np.ndarray:
    """w_1..w_m with w_k = sibuya_pmf(gamma, k), via the stable ratio recurrence."""
    w = np.empty(m)
    w[0] = gamma
    k = np.arange(1.0, m)
    if m > 1:
        w[1:] = gamma * np.cumprod((k - gamma) / (k + 1.0))
    return w


def _cos_poly(w: np.ndarray, c: np.ndarray):
    """sum_k w[k-1] * c**k evaluated by Horner (c may be any ndarray)."""
    acc = np.zeros_like(c)
    for wk in w[::-1]:
        acc = (acc + wk) * c
    return acc


def _one_minus_exp(theta: float, at: np.ndarray) -> np.ndarray:
    """1 - e^{-theta} e^{i at}, with the real part formed without cancellation."""
    damp = math.exp(-theta)
    re = -math.expm1(-theta) + damp * 2.0 * np.sin(0.5 * at) ** 2
    return re - 1j * damp * np.sin(at)


def _cpow(z: np.ndarray, alpha: float) -> np.ndarray:
    """z**alpha on the principal branch with 0**alpha = 0 exactly."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(alpha * np.log(z))
    return np.where(z == 0, 0.0 + 0.0j, out)


def _finite_polylog(s: float, theta, m: int) -> np.ndarray:
    """sum_{k=1}^{m} e^{i k theta} k^{-s}, vectorized over theta."""
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.zeros(th.shape, dtype=complex)
    block = max(1, (1 << 20) // max(th.size, 1))
    for lo in range(0, m, block):
        k = np.arange(lo + 1.0, min(lo + block, m) + 1.0)
        out += np.exp(1j * th[..., None] * k) @ (k**-s).astype(complex)
    return out


def _intensities(p: FamilyParams):
    """One-sided jump intensities (lambda1, lambda2) entering the CF."""
    if isinstance(p, SymmetricDS):
        lam = p.sigma ** (2 * p.gamma) * 2.0**p.gamma / p.a ** (2 * p.gamma)
        return 0.5 * lam, 0.5 * lam
    if isinstance(p, TruncatedSDS):
        lam = p.sigma ** (2 * p.gamma) * 2.0**p.gamma / p.a ** (2 * p.gamma)
        lam_m = lam * (1.0 - sibuya_survival(p.gamma, p.m))
        return 0.5 * lam_m, 0.5 * lam_m
    if isinstance(p, (DiscreteStable, TemperedDS)):
        scale = p.sigma**p.alpha / (2.0 * math.cos(0.5 * math.pi * p.alpha) * p.a**p.alpha)
        return scale * (1.0 + p.beta), scale * (1.0 - p.beta)
    if isinstance(p, PolylogDS):
        z = riemann_zeta(1.0 + p.alpha) * p.a**-p.alpha
        return p.p * z, p.q * z
    if isinstance(p, TruncatedPolylogDS):
        h = float(np.real(_finite_polylog(1.0 + p.alpha, 0.0, p.m)[0])) * p.a**-p.alpha
        return p.p * h, p.q * h
    raise DomainError(f"not a family parameter object: {p!r}")


def derived_intensities(p: FamilyParams):
    """(lambda1, lambda2): one-sided jump intensities; their sum need not be the
    compound-Poisson rate for tempered families (see compound_poisson_view)."""
    return _intensities(p)


# ---------------------------------------------------------------------------
# characteristic functions
# ---------------------------------------------------------------------------


def char_fn(p: FamilyParams, t) -> np.ndarray:
    """Exact characteristic function of the family at real t (scalar or array)."""
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    at = np.atleast_1d(t_arr) * p.a

    if isinstance(p, SymmetricDS):
        lam = 2.0 * _intensities(p)[0]
        log_g = -lam * (2.0 * np.sin(0.5 * at) ** 2) ** p.gamma + 0.0j
    elif isinstance(p, TruncatedSDS):
        lam = p.sigma ** (2 * p.gamma) * 2.0**p.gamma / p.a ** (2 * p.gamma)
        w = _sibuya_weights(p.gamma, p.m)
        c = np.cos(at)
        log_g = lam * (_cos_poly(w, c) - _cos_poly(w, np.array(1.0))) + 0.0j
    elif isinstance(p, DiscreteStable):
        l1, l2 = _intensities(p)
        z = 2.0 * np.sin(0.5 * at) ** 2 - 1j * np.sin(at)  # 1 - e^{i at}
        log_g = -l1 * _cpow(z, p.alpha) - l2 * _cpow(np.conj(z), p.alpha)
    elif isinstance(p, TemperedDS):
        l1, l2 = _intensities(p)
        z1 = _one_minus_exp(p.theta1, at)
        z2 = np.conj(_one_minus_exp(p.theta2, at))
        base1 = _cpow(_one_minus_exp(p.theta1, np.array(0.0)), p.alpha)
        base2 = _cpow(np.conj(_one_minus_exp(p.theta2, np.array(0.0))), p.alpha)
        # grouped per side so the exponent vanishes identically at t = 0
        log_g = -l1 * (_cpow(z1, p.alpha) - base1) - l2 * (_cpow(z2, p.alpha) - base2)
    elif isinstance(p, PolylogDS):
        s = 1.0 + p.alpha
        li = polylog_unit(s, at)
        z = riemann_zeta(s)
        log_g = p.a**-p.alpha * (p.p * (li - z) + p.q * (np.conj(li) - z))
    elif isinstance(p, TruncatedPolylogDS):
        s = 1.0 + p.alpha
        fin = _finite_polylog(s, at, p.m)
        fin0 = _finite_polylog(s, 0.0, p.m)[0]
        log_g = p.a**-p.alpha * (p.p * (fin - fin0) + p.q * (np.conj(fin) - fin0))
    else:
        raise DomainError(f"not a family parameter object: {p!r}")

    g = np.exp(log_g)
    return complex(g[0]) if scalar else g.reshape(t_arr.shape)


def stable_cf(s: StableParams, t, symmetric: bool = False) -> np.ndarray:
    """CF of the limiting strictly stable law.

    With `symmetric` (or beta = 0): exp(-sigma^alpha |t|^alpha), alpha in (0, 2].
    Otherwise the skewed strictly stable form, which requires alpha in (0, 1).
    """
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    tt = np.atleast_1d(t_arr)
    mag = (s.sigma * np.abs(tt)) ** s.alpha
    if symmetric or s.beta == 0.0:
        g = np.exp(-mag).astype(complex)
    else:
        if s.alpha == 1.0:
            raise DomainError("skewed stable CF undefined at alpha = 1 (tan pole)")
        if s.alpha > 1.0:
            raise DomainError(
                "skewed stable CF implemented for alpha in (0, 1) only"
            )
        skew = s.beta * math.tan(0.5 * math.pi * s.alpha)
        g = np.exp(-mag * (1.0 - 1j * skew * np.sign(tt)))
    return complex(g[0]) if scalar else g.reshape(t_arr.shape)


# ---------------------------------------------------------------------------
# compound-Poisson decomposition
# ---------------------------------------------------------------------------


def compound_poisson_view(p: FamilyParams) -> CompoundPoissonView:
    """(Lambda, h) with char_fn(p, t) = exp(-Lambda (1 - h(t))) identically."""
    if isinstance(p, SymmetricDS):
        lam = 2.0 * _intensities(p)[0]
        gamma = p.gamma
        a = p.a

        def h(t):
            return 1.0 - (2.0 * np.sin(0.5 * a * np.asarray(t, dtype=float)) ** 2) ** gamma + 0.0j

        return CompoundPoissonView(lam, h)

    if isinstance(p, TruncatedSDS):
        w = _sibuya_weights(p.gamma, p.m)
        w_total = float(_cos_poly(w, np.array(1.0)))
        lam = p.sigma ** (2 * p.gamma) * 2.0**p.gamma / p.a ** (2 * p.gamma)
        a = p.a

        def h(t):
            c = np.cos(a * np.asarray(t, dtype=float))
            return _cos_poly(w, c) / w_total + 0.0j

        return CompoundPoissonView(lam * w_total, h)

    if isinstance(p, DiscreteStable):
        l1, l2 = _intensities(p)
        lam = l1 + l2
        alpha, a = p.alpha, p.a

        def h(t):
            at = a * np.asarray(t, dtype=float)
            z = 2.0 * np.sin(0.5 * at) ** 2 - 1j * np.sin(at)
            return 1.0 - (l1 * _cpow(z, alpha) + l2 * _cpow(np.conj(z), alpha)) / lam

        return CompoundPoissonView(lam, h)

    if isinstance(p, TemperedDS):
        l1, l2 = _intensities(p)
        alpha, a, th1, th2 = p.alpha, p.a, p.theta1, p.theta2
        base1 = complex(_cpow(_one_minus_exp(th1, np.array(0.0)), alpha))
        base2 = complex(_cpow(np.conj(_one_minus_exp(th2, np.array(0.0))), alpha))
        lam = l1 * (1.0 - base1.real) + l2 * (1.0 - base2.real)

        def h(t):
            at = a * np.asarray(t, dtype=float)
            side1 = l1 * (1.0 - _cpow(_one_minus_exp(th1, at), alpha))
            side2 = l2 * (1.0 - _cpow(np.conj(_one_minus_exp(th2, at)), alpha))
            return (side1 + side2) / lam

        return CompoundPoissonView(lam, h)

    if isinstance(p, PolylogDS):
        l1, l2 = _intensities(p)
        lam = l1 + l2
        s, a = 1.0 + p.alpha, p.a
        z = riemann_zeta(s)
        pp, qq = p.p, p.q

        def h(t):
            li = polylog_unit(s, a * np.asarray(t, dtype=float))
            return (pp * li + qq * np.conj(li)) / ((pp + qq) * z)

        return CompoundPoissonView(lam, h)

    if isinstance(p, TruncatedPolylogDS):
        l1, l2 = _intensities(p)
        lam = l1 + l2
        s, a, m = 1.0 + p.alpha, p.a, p.m
        h_m = float(np.real(_finite_polylog(s, 0.0, m)[0]))
        pp, qq = p.p, p.q

        def h(t):
            fin = _finite_polylog(s, a * np.asarray(t, dtype=float), m)
            return (pp * fin + qq * np.conj(fin)) / ((pp + qq) * h_m)

        return CompoundPoissonView(lam, h)

    raise DomainError(f"not a family parameter object: {p!r}")


# ---------------------------------------------------------------------------
# Levy measure and targets
# ---------------------------------------------------------------------------


def levy_weight(p: FamilyParams, k) -> float:
    """Mass of the Levy measure at lattice point a*k, k a nonzero integer.

    Defined for the families whose jump law has closed-form weights; the
    symmetric families need a convolution series (see symmetric_levy_weights).
    """
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise DomainError(f"k must be an integer, got {k!r}")
    k = int(k)
    if k == 0:
        raise DomainError("the Levy measure has no mass at 0")
    if isinstance(p, (SymmetricDS, TruncatedSDS)):
        raise DomainError(
            "symmetric-walk families have no closed-form Levy weights; "
            "use symmetric_levy_weights"
        )
    if isinstance(p, DiscreteStable):
        l1, l2 = _intensities(p)
        return l1 * sibuya_pmf(p.alpha, k) if k > 0 else l2 * sibuya_pmf(p.alpha, -k)
    if isinstance(p, TemperedDS):
        l1, l2 = _intensities(p)
        if k > 0:
            return l1 * sibuya_pmf(p.alpha, k) * math.exp(-p.theta1 * k)
        return l2 * sibuya_pmf(p.alpha, -k) * math.exp(-p.theta2 * -k)
    if isinstance(p, PolylogDS):
        side = p.p if k > 0 else p.q
        return side * p.a**-p.alpha * float(abs(k)) ** -(1.0 + p.alpha)
    if isinstance(p, TruncatedPolylogDS):
        if abs(k) > p.m:
            return 0.0
        side = p.p if k > 0 else p.q
        return side * p.a**-p.alpha * float(abs(k)) ** -(1.0 + p.alpha)
    raise DomainError(f"not a family parameter object: {p!r}")


def symmetric_levy_weights(p: SymmetricDS, k_max: int, terms: int = 2048) -> np.ndarray:
    """Levy masses of SymmetricDS at lattice points a*1 .. a*k_max (symmetric in k).

    Sums lam * sum_K w_K P(S_K = k) over K <= terms, where S_K is a K-step
    +-1 walk; the dropped tail is bounded by lam * sibuya_survival(gamma, terms).
    """
    if not isinstance(p, SymmetricDS):
        raise DomainError("symmetric_levy_weights applies to SymmetricDS only")
    if k_max < 1 or terms < 1:
        raise DomainError("k_max and terms must be >= 1")
    from scipy.stats import binom as _binom

    lam = 2.0 * _intensities(p)[0]
    w = _sibuya_weights(p.gamma, terms)
    out = np.zeros(k_max)
    ks = np.arange(1, k_max + 1)
    for idx in range(terms):
        steps = idx + 1
        if w[idx] == 0.0:
            continue
        sel = ks <= steps
        if not sel.any():
            break
        up = (ks[sel] + steps) / 2.0
        mask = (ks[sel] + steps) % 2 == 0
        pmf = np.where(mask, _binom.pmf(np.floor(up), steps, 0.5), 0.0)
        out[sel] += lam * w[idx] * pmf
    return out


def target_stable(p: FamilyParams) -> AttractionTarget:
    """The stable law the family approaches as a -> 0, plus the Gaussian flag."""
    if isinstance(p, SymmetricDS):
        return AttractionTarget(
            StableParams(2.0 * p.gamma, 0.0, p.sigma), gaussian=p.gamma == 1.0
        )
    if isinstance(p, TruncatedSDS):
        return AttractionTarget(StableParams(2.0 * p.gamma, 0.0, p.sigma), gaussian=True)
    if isinstance(p, DiscreteStable):
        return AttractionTarget(StableParams(p.alpha, p.beta, p.sigma), gaussian=False)
    if isinstance(p, TemperedDS):
        return AttractionTarget(StableParams(p.alpha, p.beta, p.sigma), gaussian=True)
    if isinstance(p, (PolylogDS, TruncatedPolylogDS)):
        truncated = isinstance(p, TruncatedPolylogDS)
        if p.alpha >= 2.0:
            return AttractionTarget(None, gaussian=True)
        # scale from Levy-tail matching: sigma^alpha = (P+Q) pi / (2 alpha sin(pi alpha/2) Gamma(alpha))
        c = math.pi / (2.0 * p.alpha * math.sin(0.5 * math.pi * p.alpha) * math.gamma(p.alpha))
        sigma = ((p.p + p.q) * c) ** (1.0 / p.alpha)
        beta = (p.p - p.q) / (p.p + p.q)
        return AttractionTarget(StableParams(p.alpha, beta, sigma), gaussian=truncated)
    raise DomainError(f"not a family parameter object: {p!r}")
