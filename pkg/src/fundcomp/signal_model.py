"""Trigonometric polynomials: evaluation, sampling, sup-norm and peak analysis.

A :class:`TrigPolynomial` stores positive integer frequencies with complex
amplitudes.  Two evaluation conventions coexist behind one type:

* complex form (default):  f(t) = sum_k a_k exp(i * 2*pi * m_k * t / period)
* real cosine form:        f(t) = sum_k Re(a_k exp(i * 2*pi * m_k * t / period))
                                 = sum_k A_k cos(2*pi*m_k*t/period + phi_k)
  with a_k = A_k * exp(i*phi_k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import (
    ConstantModulus,
    DegenerateMaximum,
    EmptySupport,
    NyquistViolation,
)

TWO_PI = 2.0 * math.pi

# Two Newton roots of p' closer than this fraction of the period are merged.
PEAK_DEDUPE_REL_TOL = 1e-6
# |g''| below this at a global maximum violates the non-degeneracy assumption.
DEGENERACY_CUTOFF = 1e-8
# Peaks must reach sup_norm * (1 - GLOBAL_PEAK_REL_TOL) to count as global.
GLOBAL_PEAK_REL_TOL = 1e-9


@dataclass(frozen=True)
class TrigPolynomial:
    terms: tuple[tuple[int, complex], ...]
    period: float = TWO_PI
    real_cosine_form: bool = False

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be positive")
        merged: dict[int, complex] = {}
        for freq, amp in self.terms:
            if freq != int(freq) or freq < 1:
                raise ValueError(f"frequency {freq!r} is not a positive integer")
            merged[int(freq)] = merged.get(int(freq), 0j) + complex(amp)
        cleaned = tuple(
            (m, merged[m]) for m in sorted(merged) if merged[m] != 0
        )
        if not cleaned:
            raise ValueError("polynomial must have at least one nonzero term")
        object.__setattr__(self, "terms", cleaned)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([m for m, _ in self.terms], dtype=np.int64)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([a for _, a in self.terms], dtype=np.complex128)

    @property
    def max_frequency(self) -> int:
        return int(self.terms[-1][0])

    def frequency_gcd(self) -> int:
        return reduce(math.gcd, (m for m, _ in self.terms))

    def scaled(self, c: complex) -> "TrigPolynomial":
        if c == 0:
            raise ValueError("scaling by zero annihilates the polynomial")
        return TrigPolynomial(
            tuple((m, c * a) for m, a in self.terms),
            period=self.period,
            real_cosine_form=self.real_cosine_form,
        )


@dataclass(frozen=True)
class SampledSignal:
    samples: np.ndarray
    sample_rate: float
    start_time: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("need at least 2 samples in a 1-D array")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class Peak:
    location: float
    value: float
    second_derivative: float


@dataclass(frozen=True)
class PeakSet:
    peaks: tuple[Peak, ...]
    sup_norm: float
    period: float = TWO_PI

    def __post_init__(self):
        if not self.peaks:
            raise ValueError("PeakSet must contain at least one peak")
        for p in self.peaks:
            if not 0 <= p.location < self.period:
                raise ValueError(f"peak location {p.location} outside [0, period)")
            if abs(p.value - self.sup_norm) > GLOBAL_PEAK_REL_TOL * self.sup_norm:
                raise ValueError("peak value deviates from sup_norm")
            if p.second_derivative >= 0:
                raise ValueError("peak second derivative must be negative")
        locs = sorted(p.location for p in self.peaks)
        min_sep = PEAK_DEDUPE_REL_TOL * self.period
        for a, b in zip(locs, locs[1:]):
            if b - a <= min_sep:
                raise ValueError("peak locations not pairwise distinct")


def evaluate(poly: TrigPolynomial, t):
    """Evaluate f at scalar or array t (complex for the complex form)."""
    t_arr = np.asarray(t, dtype=np.float64)
    omega = TWO_PI / poly.period
    phases = np.exp(1j * omega * np.multiply.outer(t_arr, poly.frequencies))
    vals = phases @ poly.amplitudes
    if poly.real_cosine_form:
        vals = vals.real
    if np.ndim(t) == 0:
        return complex(vals) if not poly.real_cosine_form else float(vals)
    return vals


def modulus(poly: TrigPolynomial, t):
    """|f(t)| for scalar or array t."""
    return np.abs(evaluate(poly, t))


def sample(poly: TrigPolynomial, sample_rate: float, duration: float) -> SampledSignal:
    """Uniformly sample f; real part is stored for real-valued use downstream."""
    if duration <= 0:
        raise ValueError("duration must be positive")
    max_hz = poly.max_frequency / poly.period
    if sample_rate <= 2.0 * max_hz:
        raise NyquistViolation(
            f"sample_rate {sample_rate} Hz <= 2 * max frequency {max_hz} Hz"
        )
    n = int(round(sample_rate * duration))
    if n < 2:
        raise ValueError("duration too short for this sample rate")
    t = np.arange(n) / sample_rate
    vals = evaluate(poly, t)
    return SampledSignal(np.real(vals), sample_rate, 0.0)


def _exp_coefficients(poly: TrigPolynomial) -> tuple[np.ndarray, np.ndarray]:
    """Signed exponential representation c_m with f(t) = sum_m c_m e^{i m w t}.

    Returns (offset, coeffs) where coeffs[j] multiplies frequency j - offset.
    """
    m_max = poly.max_frequency
    coeffs = np.zeros(2 * m_max + 1, dtype=np.complex128)
    for m, a in poly.terms:
        if poly.real_cosine_form:
            coeffs[m_max + m] += a / 2.0
            coeffs[m_max - m] += np.conj(a) / 2.0
        else:
            coeffs[m_max + m] += a
    return m_max, coeffs


def _modulus_squared_coefficients(poly: TrigPolynomial) -> tuple[np.ndarray, np.ndarray]:
    """Exponential coefficients of p = |f|^2 as (signed frequencies, coeffs)."""
    m_max, c = _exp_coefficients(poly)
    # p_d = sum_m c_m * conj(c_{m-d}); correlation of c with itself.
    p = np.correlate(c, c, mode="full")  # np.correlate conjugates its 2nd arg
    freqs = np.arange(-(len(c) - 1), len(c))
    keep = np.abs(p) > 0
    return freqs[keep], p[keep]


class _ModulusSquared:
    """p = |f|^2 with analytically exact derivatives."""

    def __init__(self, poly: TrigPolynomial):
        d, pd = _modulus_squared_coefficients(poly)
        self.omega = TWO_PI / poly.period
        self.d = d
        self.pd = pd
        self.is_constant = bool(np.all(d == 0))

    def _eval(self, t, order: int) -> np.ndarray:
        t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
        arg = np.multiply.outer(t_arr, self.d * self.omega)
        coeff = self.pd * (1j * self.d * self.omega) ** order
        return np.real(np.exp(1j * arg) @ coeff)

    def value(self, t):
        return self._eval(t, 0)

    def d1(self, t):
        return self._eval(t, 1)

    def d2(self, t):
        return self._eval(t, 2)


def _golden_max(fun, a: float, b: float, tol: float) -> float:
    """Golden-section search for the maximizer of fun on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1 = fun(x1)
    f2 = fun(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = fun(x1)
    return 0.5 * (a + b)


def _scan_grid_size(poly: TrigPolynomial) -> int:
    return max(4096, 64 * poly.max_frequency)


def sup_norm(poly: TrigPolynomial) -> float:
    """max_t |f(t)|: dense grid on p = |f|^2, then golden-section refinement."""
    p = _ModulusSquared(poly)
    n = _scan_grid_size(poly)
    ts = np.arange(n) * (poly.period / n)
    pv = p.value(ts)
    i = int(np.argmax(pv))
    h = poly.period / n
    t_best = _golden_max(lambda t: float(p.value(t)[0]), ts[i] - h, ts[i] + h,
                         tol=1e-12 * poly.period)
    return math.sqrt(max(float(p.value(t_best)[0]), 0.0))


def find_global_maxima(poly: TrigPolynomial) -> PeakSet:
    """Locate all global maxima of g = |f| over one period.

    Critical points are roots of p' (p = |f|^2), bracketed on a dense grid and
    polished by Newton iteration on p'.  At a maximum with g > 0,
    g'' = p''/(2g) because p' vanishes there.
    """
    p = _ModulusSquared(poly)
    if p.is_constant:
        raise ConstantModulus("|f| is constant; no isolated maxima exist")

    period = poly.period
    n = _scan_grid_size(poly)
    ts = np.arange(n) * (period / n)
    dp = p.d1(ts)

    # Sign changes of p' bracket its roots (grid is fine enough: p is
    # band-limited to 2*m_max and the grid has >= 32 points per top harmonic).
    roots = []
    for i in range(n):
        a, b = ts[i], ts[i] + period / n
        fa, fb = dp[i], dp[(i + 1) % n]
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb >= 0.0:
            continue
        t = 0.5 * (a + b)
        lo, hi = a, b
        for _ in range(100):
            d1 = float(p.d1(t)[0])
            d2 = float(p.d2(t)[0])
            step_ok = d2 != 0.0
            if step_ok:
                t_new = t - d1 / d2
                step_ok = lo <= t_new <= hi
            if not step_ok:
                # bisection fallback keeps the bracket
                if d1 * fa < 0:
                    hi = t
                else:
                    lo = t
                t_new = 0.5 * (lo + hi)
            if abs(t_new - t) < 1e-15 * period:
                t = t_new
                break
            t = t_new
        roots.append(t)

    sup = sup_norm(poly)
    candidates = []
    for t in roots:
        t = t % period
        if float(p.d2(t)[0]) >= 0.0:
            continue  # local minimum or saddle of p
        g = math.sqrt(max(float(p.value(t)[0]), 0.0))
        if g >= sup * (1.0 - GLOBAL_PEAK_REL_TOL):
            candidates.append((t, g))

    # deduplicate modulo the period
    candidates.sort()
    dedupe_tol = PEAK_DEDUPE_REL_TOL * period
    merged: list[tuple[float, float]] = []
    for t, g in candidates:
        if merged and t - merged[-1][0] <= dedupe_tol:
            continue
        merged.append((t, g))
    if len(merged) > 1 and (merged[0][0] + period) - merged[-1][0] <= dedupe_tol:
        merged.pop()
    if not merged:
        raise ConstantModulus("no non-degenerate maxima found")

    peaks = []
    for t, g in merged:
        g2 = float(p.d2(t)[0]) / (2.0 * g)
        if abs(g2) < DEGENERACY_CUTOFF:
            raise DegenerateMaximum(
                f"global maximum at t={t} has |g''|={abs(g2):.3e} < {DEGENERACY_CUTOFF}"
            )
        peaks.append(Peak(location=t, value=g, second_derivative=g2))
    return PeakSet(peaks=tuple(peaks), sup_norm=sup, period=period)


def support_gcd(coefficients, threshold: float) -> int:
    """gcd of {k >= 1 : |c_k| > threshold} for spectrum bins c_0..c_{N/2}."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    mags = np.abs(np.asarray(coefficients))
    support = [k for k in range(1, len(mags)) if mags[k] > threshold]
    if not support:
        raise EmptySupport("no bin k >= 1 exceeds the threshold")
    return reduce(math.gcd, support)


def support_gcd_relative(coefficients, rel_threshold: float = 1e-6) -> int:
    """support_gcd with the threshold a fraction of the largest bin (k >= 1)."""
    mags = np.abs(np.asarray(coefficients))
    if len(mags) < 2:
        raise EmptySupport("spectrum has no bins above DC")
    peak = float(np.max(mags[1:]))
    if peak == 0.0:
        raise EmptySupport("all bins above DC vanish")
    return support_gcd(coefficients, rel_threshold * peak)
