"""Discrete Fourier inversion of lattice characteristic functions.

For a law on the lattice a*Z with CF g, the masses on the window
k in [-N/2, N/2) are p_k = (1/N) sum_j g(2 pi j / (N a)) e^{-2 pi i j k / N}.
The DFT returns the true PMF folded modulo N, so the window must be wide
enough that out-of-window mass is negligible; `alias_bound` carries a cheap
estimate of that mass and `pmf_auto` widens the window until it is small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InversionError, PrecisionError

__all__ = ["LatticePMF", "pmf_from_cf", "pmf_auto", "tail_prob", "cdf_from_pmf"]

_NEG_EPS = 1e-12      # masses below -_NEG_EPS mean the input was not a CF
_IMAG_TOL = 1e-10     # largest imaginary residual tolerated in the transform
_DIRECT_MAX = 1 << 10  # direct O(N^2) transform up to here, radix-2 FFT above


@dataclass(frozen=True)
class LatticePMF:
    """Masses on the lattice points a*k, k = k_min .. k_min + len(masses) - 1."""

    a: float
    k_min: int
    masses: np.ndarray = field(repr=False)
    alias_bound: float

    def __post_init__(self):
        if not (self.a > 0.0 and math.isfinite(self.a)):
            raise DomainError(f"lattice pitch a must be > 0, got {self.a!r}")
        if self.alias_bound < 0.0:
            raise DomainError("alias_bound must be >= 0")
        m = np.asarray(self.masses, dtype=float)
        object.__setattr__(self, "masses", m)
        if m.ndim != 1 or m.size == 0:
            raise DomainError("masses must be a nonempty 1-d array")
        if m.min() < -_NEG_EPS:
            raise InversionError(
                f"mass {m.min():.3e} below -{_NEG_EPS:g}: inversion failed "
                "(the characteristic function is not positive-definite?)"
            )
        total = float(m.sum())
        if not (1.0 - self.alias_bound - 1e-9 <= total <= 1.0 + 1e-9):
            raise InversionError(
                f"masses sum to {total!r}, outside [1 - alias_bound - 1e-9, 1 + 1e-9]"
            )

    def k_values(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_min + self.masses.size)

    def x_values(self) -> np.ndarray:
        return self.a * self.k_values()

    def clamped(self) -> np.ndarray:
        """Masses with the tiny negative rounding residues set to zero."""
        return np.maximum(self.masses, 0.0)

    def mass_at(self, k: int) -> float:
        idx = int(k) - self.k_min
        if 0 <= idx < self.masses.size:
            return max(float(self.masses[idx]), 0.0)
        return 0.0


def _fft_pow2(x: np.ndarray) -> np.ndarray:
    """Forward DFT (e^{-2 pi i j k / n} kernel) of a power-of-two-length array.

    Iterative radix-2 decimation in time with a fixed butterfly order, so the
    result is reproducible bit for bit across runs.
    """
    n = x.size
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    y = np.ascontiguousarray(x[rev], dtype=complex)
    size = 2
    while size <= n:
        half = size >> 1
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = y.reshape(n // size, size)
        spun = blocks[:, half:] * twiddle
        upper = blocks[:, :half]
        blocks[:, half:] = upper - spun
        upper += spun
        size <<= 1
    return y


def _dft_direct(x: np.ndarray) -> np.ndarray:
    """O(n^2) forward DFT, the correctness oracle for the fast path."""
    n = x.size
    j = np.arange(n)
    kernel = np.exp(-2j * np.pi / n * np.outer(j, j))
    return kernel @ x


def _geometric_tail(outer: np.ndarray) -> float:
    """Estimate of the mass beyond a window edge from its outermost decade.

    `outer` holds the clamped masses of one side ordered from the center
    outward; a geometric ratio is fitted across its last factor-of-ten span
    and summed past the edge. Power-law tails decay sub-geometrically, so
    this is an order-of-magnitude estimate, not a rigorous bound.
    """
    edge = outer.size - 1
    inner = max(0, edge // 10)
    p_in, p_edge = float(outer[inner]), float(outer[edge])
    if p_edge <= 0.0:
        return 0.0
    if p_in <= p_edge or edge == inner:
        return float(p_edge * outer.size)  # not decaying: flag loudly
    ratio = (p_edge / p_in) ** (1.0 / (edge - inner))
    return float(p_edge * ratio / (1.0 - ratio))


def pmf_from_cf(cf, a: float, n: int) -> LatticePMF:
    """Invert a 2 pi / a - periodic CF to masses on k in [-n/2, n/2).

    `cf` must accept a float ndarray and return the CF values; `n` must be a
    power of two >= 8. Raises InversionError if cf(0) is not 1 to 1e-12, if
    imaginary residuals exceed 1e-10, or if a mass falls below -1e-12.
    """
    if not (isinstance(n, (int, np.integer)) and not isinstance(n, bool)):
        raise DomainError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 8 or (n & (n - 1)) != 0:
        raise DomainError(f"n must be a power of two >= 8, got {n}")
    if not (a > 0.0 and math.isfinite(a)):
        raise DomainError(f"lattice pitch a must be > 0, got {a!r}")

    t = 2.0 * math.pi / (n * a) * np.arange(n, dtype=float)
    values = np.asarray(cf(t), dtype=complex)
    if values.shape != t.shape:
        raise DomainError("cf must return one value per grid point")
    origin = values[0]
    if abs(origin - 1.0) > 1e-12:
        raise InversionError(f"cf(0) = {origin!r}, not 1 to 1e-12: not a CF")

    spectrum = _dft_direct(values) if n <= _DIRECT_MAX else _fft_pow2(values)
    folded = spectrum / n
    imag = float(np.max(np.abs(folded.imag)))
    if imag > _IMAG_TOL:
        raise InversionError(
            f"imaginary residual {imag:.3e} exceeds {_IMAG_TOL:g}: "
            "cf is not Hermitian or not periodic on this lattice"
        )
    # reorder j = 0..n-1 (frequencies mod n) to k = -n/2 .. n/2 - 1
    masses = np.concatenate([folded.real[n // 2:], folded.real[: n // 2]])
    if masses.min() < -_NEG_EPS:
        raise InversionError(
            f"mass {masses.min():.3e} below -{_NEG_EPS:g}: inversion failed"
        )

    clamped = np.maximum(masses, 0.0)
    half = n // 2
    alias = max(0.0, 1.0 - float(clamped.sum()))
    alias += _geometric_tail(clamped[:half][::-1])  # k = -1 .. -n/2, outward
    alias += _geometric_tail(clamped[half + 1:])    # k = +1 .. n/2-1, outward
    return LatticePMF(a=a, k_min=-half, masses=masses, alias_bound=alias)


def pmf_auto(cf, a: float, tol: float = 1e-6, n_max: int = 1 << 24) -> LatticePMF:
    """Invert with the smallest power-of-two window whose alias_bound < tol.

    Doubles n from 256 upward; raises PrecisionError with a window-size hint
    if the bound is still above tol at n_max.
    """
    if not (0.0 < tol < 1.0):
        raise DomainError(f"tol must be in (0, 1), got {tol!r}")
    n = 256
    history = []
    pmf = None
    while n <= n_max:
        pmf = pmf_from_cf(cf, a, n)
        history.append((n, pmf.alias_bound))
        if pmf.alias_bound < tol:
            return pmf
        n *= 2
    hint = ""
    if len(history) >= 2 and history[-2][1] > 0 and history[-1][1] > 0:
        rate = math.log2(history[-2][1] / history[-1][1])
        if rate > 0.01:
            need = math.ceil(math.log2(history[-1][1] / tol) / rate)
            hint = f"; projected to need n = 2^{int(math.log2(history[-1][0])) + need}"
    raise PrecisionError(
        f"alias bound {history[-1][1]:.3e} still above {tol:g} at n = {history[-1][0]}"
        + hint
    )


def tail_prob(pmf: LatticePMF, x: float) -> float:
    """P(|X| > x) under the clamped masses: sum over lattice points |a k| > x."""
    if not (x >= 0.0):
        raise DomainError(f"x must be >= 0, got {x!r}")
    keep = np.abs(pmf.x_values()) > x
    return float(pmf.clamped()[keep].sum())


def cdf_from_pmf(pmf: LatticePMF, x: float) -> float:
    """P(X <= x) under the clamped masses; right-continuous in x."""
    keep = pmf.x_values() <= x
    return float(pmf.clamped()[keep].sum())
