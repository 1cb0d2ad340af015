"""Fourier-inversion correctness: exact finite cases, the Bessel-series
identity, DFT-path equivalence, and aliasing control."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dstable.errors import DomainError, InversionError, PrecisionError
from dstable.families import DiscreteStable, SymmetricDS, char_fn
from dstable.inversion import (
    LatticePMF,
    _dft_direct,
    _fft_pow2,
    cdf_from_pmf,
    pmf_auto,
    pmf_from_cf,
    tail_prob,
)

# e^{-2} I_k(2): masses of SymmetricDS(gamma=1, sigma=1, a=1), lambda = 2
BESSEL_MASSES = {
    0: 0.30850832255367103953,
    1: 0.21526928924893765916,
    2: 0.093239033304733380375,
    5: 0.0013297610941881578142,
    10: 4.0830166112655466968e-8,
    30: 5.2693058653954966758e-34,
}


def _cf_of(p):
    return lambda t: char_fn(p, t)


# ---------------------------------------------------------------------------
# exact finite-support cases
# ---------------------------------------------------------------------------

def test_point_mass():
    pmf = pmf_from_cf(lambda t: np.ones_like(t) + 0j, 0.7, 8)
    assert pmf.mass_at(0) == pytest.approx(1.0, abs=1e-14)
    assert tail_prob(pmf, 0.0) < 1e-14
    assert pmf.alias_bound < 1e-14


def test_fair_coin():
    pmf = pmf_from_cf(lambda t: np.cos(1.0 * t) + 0j, 1.0, 8)
    assert pmf.mass_at(1) == pytest.approx(0.5, abs=1e-14)
    assert pmf.mass_at(-1) == pytest.approx(0.5, abs=1e-14)
    assert pmf.mass_at(0) == pytest.approx(0.0, abs=1e-14)
    assert tail_prob(pmf, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert cdf_from_pmf(pmf, 0.0) == pytest.approx(0.5, abs=1e-12)
    assert cdf_from_pmf(pmf, -math.inf) == 0.0
    assert cdf_from_pmf(pmf, math.inf) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=6),
       st.floats(0.1, 2.0))
def test_cosine_mixture_recovered_exactly(raw, a):
    # cf = c_0 + sum_j c_j cos(j a t) is the CF of masses c_j / 2 at +-j
    c = np.array(raw)
    total = c.sum() + 1.0
    c /= total
    c0 = 1.0 - c.sum()

    def cf(t):
        out = np.full_like(t, c0, dtype=complex)
        for j, cj in enumerate(c, start=1):
            out += cj * np.cos(j * a * t)
        return out

    pmf = pmf_from_cf(cf, a, 32)
    assert abs(pmf.mass_at(0) - c0) < 1e-12
    for j, cj in enumerate(c, start=1):
        assert abs(pmf.mass_at(j) - cj / 2.0) < 1e-12
        assert abs(pmf.mass_at(-j) - cj / 2.0) < 1e-12


# ---------------------------------------------------------------------------
# Bessel-series oracle
# ---------------------------------------------------------------------------

def test_bessel_identity_gamma_one():
    pmf = pmf_from_cf(_cf_of(SymmetricDS(1.0, 1.0, 1.0)), 1.0, 256)
    for k, want in BESSEL_MASSES.items():
        assert abs(pmf.mass_at(k) - want) < 1e-9, k
        assert abs(pmf.mass_at(-k) - want) < 1e-9, k


# ---------------------------------------------------------------------------
# transform internals
# ---------------------------------------------------------------------------

def test_direct_and_fft_paths_agree():
    p = DiscreteStable(0.7, 0.4, 1.0, 0.5)
    n = 1 << 10
    t = 2.0 * math.pi / (n * 0.5) * np.arange(n)
    values = char_fn(p, t)
    direct = _dft_direct(values) / n
    fast = _fft_pow2(values) / n
    assert np.max(np.abs(direct - fast)) < 1e-12


def test_fft_matches_dft_on_random_input():
    rng = np.random.default_rng(5)
    x = rng.normal(size=64) + 1j * rng.normal(size=64)
    assert np.max(np.abs(_fft_pow2(x) - _dft_direct(x))) < 1e-11


def test_parseval():
    p = DiscreteStable(0.7, 0.4, 1.0, 0.5)
    n = 512
    pmf = pmf_from_cf(_cf_of(p), 0.5, n)
    t = 2.0 * math.pi / (n * 0.5) * np.arange(n)
    lhs = float(np.mean(np.abs(char_fn(p, t)) ** 2))
    rhs = float(np.sum(pmf.masses**2))
    assert abs(lhs - rhs) < 1e-10


def test_symmetric_cf_gives_symmetric_pmf():
    pmf = pmf_from_cf(_cf_of(SymmetricDS(0.6, 1.0, 0.5)), 0.5, 2048)
    m = pmf.masses
    # skip the unpaired Nyquist point k = -1024
    assert np.max(np.abs(m[1:] - m[1:][::-1])) < 1e-12


def test_median_of_symmetric_family():
    pmf = pmf_from_cf(_cf_of(SymmetricDS(0.9, 1.0, 0.5)), 0.5, 1 << 14)
    below = cdf_from_pmf(pmf, -0.25)  # strictly left of zero
    assert abs(below + pmf.mass_at(0) / 2.0 - 0.5) < 1e-9


def test_window_doubling_changes_masses_within_alias_bound():
    cf = _cf_of(SymmetricDS(0.4, 1.0, 1.0))
    small = pmf_from_cf(cf, 1.0, 4096)
    big = pmf_from_cf(cf, 1.0, 8192)
    worst = max(abs(small.mass_at(k) - big.mass_at(k)) for k in small.k_values()[::5])
    assert worst <= small.alias_bound


# ---------------------------------------------------------------------------
# tails and CDF
# ---------------------------------------------------------------------------

def test_tail_prob_monotone_and_window_exhaustion():
    pmf = pmf_from_cf(_cf_of(SymmetricDS(0.6, 1.0, 1.0)), 1.0, 1024)
    xs = np.linspace(0.0, 600.0, 101)
    tails = [tail_prob(pmf, x) for x in xs]
    assert all(a >= b for a, b in zip(tails, tails[1:]))
    assert tail_prob(pmf, 1.0 * 512) <= pmf.alias_bound
    with pytest.raises(DomainError):
        tail_prob(pmf, -1.0)


def test_cdf_right_continuous_step():
    pmf = pmf_from_cf(lambda t: np.cos(t) + 0j, 1.0, 8)
    at_atom = cdf_from_pmf(pmf, 1.0)
    just_below = cdf_from_pmf(pmf, 1.0 - 1e-9)
    assert at_atom == pytest.approx(1.0, abs=1e-12)
    assert just_below == pytest.approx(0.5, abs=1e-12)


# ---------------------------------------------------------------------------
# validation and failure modes
# ---------------------------------------------------------------------------

def test_cf_not_one_at_zero_rejected():
    with pytest.raises(InversionError):
        pmf_from_cf(lambda t: 0.5 * np.ones_like(t) + 0j, 1.0, 8)


def test_non_power_of_two_rejected():
    for bad in (12, 7, 0, -8):
        with pytest.raises(DomainError):
            pmf_from_cf(lambda t: np.ones_like(t) + 0j, 1.0, bad)
    with pytest.raises(DomainError):
        pmf_from_cf(lambda t: np.ones_like(t) + 0j, 1.0, 8.0)


def test_non_hermitian_cf_rejected():
    # a lattice shift by 0.37a is not on the lattice: imaginary residue
    with pytest.raises(InversionError):
        pmf_from_cf(lambda t: np.exp(1j * 0.37 * t), 1.0, 8)


def test_non_positive_definite_cf_rejected():
    # cf(0) = 1 but "masses" go negative: not a CF on this lattice
    with pytest.raises(InversionError):
        pmf_from_cf(lambda t: 1.5 * np.cos(t) - 0.5 + 0j, 1.0, 8)


def test_lattice_pmf_invariants_enforced():
    good = np.array([0.25, 0.5, 0.25])
    LatticePMF(1.0, -1, good, 0.0)
    with pytest.raises(DomainError):
        LatticePMF(0.0, -1, good, 0.0)
    with pytest.raises(DomainError):
        LatticePMF(1.0, -1, good, -0.1)
    with pytest.raises(InversionError):
        LatticePMF(1.0, -1, np.array([0.3, 0.8, -1e-6]), 0.0)
    with pytest.raises(InversionError):
        LatticePMF(1.0, -1, np.array([0.2, 0.2, 0.2]), 0.0)  # sums to 0.6
    # sub-unit sum is fine when alias_bound covers it
    LatticePMF(1.0, -1, np.array([0.2, 0.2, 0.2]), 0.5)


def test_mass_at_outside_window_is_zero():
    pmf = pmf_from_cf(lambda t: np.cos(t) + 0j, 1.0, 8)
    assert pmf.mass_at(17) == 0.0
    assert pmf.mass_at(-400) == 0.0


def test_pmf_auto_reaches_tolerance():
    cf = _cf_of(SymmetricDS(0.75, 1.0, 1.0))
    pmf = pmf_auto(cf, 1.0, tol=1e-6)
    assert pmf.alias_bound < 1e-6
    n = pmf.masses.size
    if n > 256:
        assert pmf_from_cf(cf, 1.0, n // 2).alias_bound >= 1e-6


def test_pmf_auto_cap_raises_with_hint():
    cf = _cf_of(SymmetricDS(0.4, 1.0, 1.0))
    with pytest.raises(PrecisionError, match="2\\^"):
        pmf_auto(cf, 1.0, tol=1e-9, n_max=1 << 14)
    with pytest.raises(DomainError):
        pmf_auto(cf, 1.0, tol=0.0)
