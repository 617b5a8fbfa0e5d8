"""DFT, energy ratios, Gaussian-window STFT and spectrogram utilities.

DFT normalization: c_0 is the mean and c_l = (2/N) sum_n x_n e^{-2pi i l n / N}
for l >= 1, so a unit cosine sampled over one period has |c_l| = 1.  The
fundamental-component energy ratio is therefore independent of N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyBand, SignalTooShort, ZeroDenominator
from .signal_model import SampledSignal


@dataclass(frozen=True)
class Spectrum:
    bins: np.ndarray
    bin_width: float

    def __post_init__(self):
        arr = np.asarray(self.bins, dtype=np.complex128).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "bins", arr)
        if self.bin_width <= 0:
            raise ValueError("bin_width must be positive")

    def magnitudes(self) -> np.ndarray:
        return np.abs(self.bins)


@dataclass(frozen=True)
class Spectrogram:
    matrix: np.ndarray          # frames x frequency bins, |V|^2
    time_step: float
    freq_step: float
    window_descriptor: str

    def __post_init__(self):
        arr = np.asarray(self.matrix, dtype=np.float64).copy()
        if arr.ndim != 2:
            raise ValueError("spectrogram matrix must be 2-D")
        if np.any(arr < 0):
            raise ValueError("spectrogram entries must be nonnegative")
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)

    @property
    def n_frames(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_bins(self) -> int:
        return self.matrix.shape[1]

    def frequencies(self) -> np.ndarray:
        return np.arange(self.n_bins) * self.freq_step


def dft(signal: SampledSignal) -> Spectrum:
    x = signal.samples
    n = x.size
    raw = np.fft.rfft(x)
    bins = raw * (2.0 / n)
    bins[0] = raw[0] / n
    return Spectrum(bins=bins, bin_width=signal.sample_rate / n)


def fundamental_energy_ratio(spectrum: Spectrum, fundamental_bin: int = 1,
                             max_bin: int = 256) -> float:
    """|c_fundamental|^2 / sum_{l=1..max_bin} |c_l|^2, DC excluded throughout."""
    if fundamental_bin < 1 or max_bin < fundamental_bin:
        raise ValueError("need 1 <= fundamental_bin <= max_bin")
    if max_bin >= len(spectrum.bins):
        raise ValueError("max_bin beyond the highest spectrum bin")
    mags2 = np.abs(spectrum.bins[1:max_bin + 1]) ** 2
    denom = float(np.sum(mags2))
    if denom == 0.0:
        raise ZeroDenominator("no energy in bins 1..max_bin")
    return float(mags2[fundamental_bin - 1]) / denom


def gaussian_window(length: int) -> np.ndarray:
    """Gaussian window truncated at +-4 sigma with sigma = length / 8."""
    sigma = length / 8.0
    n = np.arange(length) - (length - 1) / 2.0
    return np.exp(-0.5 * (n / sigma) ** 2)


def stft(signal: SampledSignal, window_length: int, hop: int,
         fft_length: int) -> Spectrogram:
    """Magnitude-squared STFT on a centered frame grid with edge zero-padding."""
    if window_length > fft_length:
        raise ValueError("window_length must not exceed fft_length")
    if hop < 1:
        raise ValueError("hop must be >= 1")
    x = signal.samples
    if x.size < window_length:
        raise SignalTooShort(
            f"{x.size} samples < window_length {window_length}")
    window = gaussian_window(window_length)
    half = window_length // 2
    padded = np.concatenate([np.zeros(half), x, np.zeros(window_length)])
    n_frames = (x.size - 1) // hop + 1
    frames = np.stack([padded[i * hop:i * hop + window_length]
                       for i in range(n_frames)])
    spec = np.fft.rfft(frames * window, n=fft_length, axis=1)
    return Spectrogram(
        matrix=np.abs(spec) ** 2,
        time_step=hop / signal.sample_rate,
        freq_step=signal.sample_rate / fft_length,
        window_descriptor=f"gaussian(length={window_length},sigma={window_length / 8:g})",
    )


def dynamic_range_clip(spectrogram: Spectrogram, lo_pct: float = 0.0,
                       hi_pct: float = 99.95) -> Spectrogram:
    """Clip entries to the [lo_pct, hi_pct] percentiles (linear interpolation)."""
    if not 0.0 <= lo_pct < hi_pct <= 100.0:
        raise ValueError("need 0 <= lo_pct < hi_pct <= 100")
    flat = spectrogram.matrix.ravel()
    lo = np.percentile(flat, lo_pct, method="linear")
    hi = np.percentile(flat, hi_pct, method="linear")
    return Spectrogram(
        matrix=np.clip(spectrogram.matrix, lo, hi),
        time_step=spectrogram.time_step,
        freq_step=spectrogram.freq_step,
        window_descriptor=spectrogram.window_descriptor,
    )


def band_energy_ratio(spectrogram: Spectrogram, if_curve, half_width: float = 0.2,
                      band_floor: float = 0.0,
                      band_ceiling: float | None = None) -> float:
    """Energy fraction in the band [if(t) - hw, if(t) + hw] per frame.

    The denominator integrates over [band_floor, band_ceiling]; defaults span
    the whole grid.  Riemann sums on the shared grid, so the bin width cancels.
    """
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    curve = np.asarray(if_curve, dtype=np.float64)
    if curve.size != spectrogram.n_frames:
        raise ValueError(
            f"if_curve has {curve.size} entries for {spectrogram.n_frames} frames")
    freqs = spectrogram.frequencies()
    if band_ceiling is None:
        band_ceiling = float(freqs[-1])
    denom_mask = (freqs >= band_floor) & (freqs <= band_ceiling)
    denom = float(np.sum(spectrogram.matrix[:, denom_mask]))
    if denom == 0.0:
        raise ZeroDenominator("no spectrogram energy in the reference band")
    num = 0.0
    for i in range(spectrogram.n_frames):
        mask = np.abs(freqs - curve[i]) <= half_width
        if not np.any(mask):
            raise EmptyBand(
                f"frame {i}: no frequency bin within {half_width} Hz of {curve[i]} Hz")
        num += float(np.sum(spectrogram.matrix[i, mask]))
    return num / denom


def spectrogram_to_csv(spectrogram: Spectrogram, path) -> None:
    """One CSV row per frame, entries printed with 17 significant digits."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in spectrogram.matrix:
            fh.write(",".join(f"{v:.17g}" for v in row))
            fh.write("\n")


def spectrogram_to_pgm(spectrogram: Spectrogram, path) -> None:
    """Binary 8-bit PGM (P5): row per frame, linear map of [min, max] to 0..255.

    Apply dynamic_range_clip first to follow the display convention.
    """
    m = spectrogram.matrix
    lo = float(np.min(m))
    hi = float(np.max(m))
    if hi > lo:
        scaled = np.round((m - lo) / (hi - lo) * 255.0)
    else:
        scaled = np.zeros_like(m)
    data = scaled.astype(np.uint8)
    header = f"P5\n{m.shape[1]} {m.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def spectrum_to_csv(spectrum: Spectrum, path) -> None:
    """Rows bin,frequency_hz,real,imag,magnitude with 17 significant digits."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("bin,frequency_hz,real,imag,magnitude\n")
        for k, c in enumerate(spectrum.bins):
            fh.write(f"{k},{k * spectrum.bin_width:.17g},"
                     f"{c.real:.17g},{c.imag:.17g},{abs(c):.17g}\n")
