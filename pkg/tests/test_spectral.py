import numpy as np
import pytest

from fundcomp.activations import ActivationSpec, apply
from fundcomp.errors import EmptyBand, SignalTooShort, ZeroDenominator
from fundcomp.signal_model import SampledSignal, TrigPolynomial, sample
from fundcomp.spectral import (
    Spectrogram,
    band_energy_ratio,
    dft,
    dynamic_range_clip,
    fundamental_energy_ratio,
    spectrogram_to_csv,
    spectrogram_to_pgm,
    stft,
)


def cosine_signal(freq_hz, rate, duration, amp=1.0):
    p = TrigPolynomial(((int(freq_hz), amp),), period=1.0, real_cosine_form=True)
    return sample(p, rate, duration)


def direct_dft(signal):
    """O(N^2) oracle with the package's normalization."""
    x = signal.samples
    n = x.size
    ks = np.arange(n // 2 + 1)
    kernel = np.exp(-2j * np.pi * np.outer(ks, np.arange(n)) / n)
    raw = kernel @ x
    bins = raw * 2.0 / n
    bins[0] = raw[0] / n
    return bins


class TestDft:
    def test_unit_cosine(self):
        spec = dft(cosine_signal(1, 512, 1.0))
        mags = spec.magnitudes()
        assert mags[1] == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.delete(mags, 1)) < 1e-12

    def test_gcd3_amplitudes(self):
        p = TrigPolynomial(((6, 0.8), (9, 1.4), (33, 0.9)),
                           period=1.0, real_cosine_form=True)
        mags = dft(sample(p, 512, 1.0)).magnitudes()
        assert mags[6] == pytest.approx(0.8, abs=1e-12)
        assert mags[9] == pytest.approx(1.4, abs=1e-12)
        assert mags[33] == pytest.approx(0.9, abs=1e-12)

    def test_constant_signal(self):
        spec = dft(SampledSignal(np.ones(64), 64.0))
        assert spec.bins[0] == pytest.approx(1.0)
        assert np.max(np.abs(spec.bins[1:])) < 1e-12

    @pytest.mark.parametrize("n", [16, 255, 1024, 2048])
    def test_fft_matches_direct_oracle(self, n):
        rng = np.random.default_rng(n)
        s = SampledSignal(rng.normal(size=n), float(n))
        assert np.allclose(dft(s).bins, direct_dft(s), atol=1e-9)

    def test_abs_activation_spectrum_vs_oracle(self):
        s = cosine_signal(3, 256, 1.0)
        rectified = apply(ActivationSpec.abs(), s)
        assert np.allclose(dft(rectified).bins, direct_dft(rectified), atol=1e-9)

    @pytest.mark.parametrize("seed", range(100))
    def test_parseval(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(8, 600))
        x = rng.normal(size=n)
        spec = dft(SampledSignal(x, float(n)))
        power = np.sum(x ** 2) / n
        c = np.abs(spec.bins)
        total = c[0] ** 2 + 0.5 * np.sum(c[1:] ** 2)
        if n % 2 == 0:
            total -= 0.25 * c[-1] ** 2  # Nyquist bin is not double-counted
        assert total == pytest.approx(power, rel=1e-10)


class TestEnergyRatio:
    def test_pure_fundamental(self):
        spec = dft(cosine_signal(1, 512, 1.0))
        assert fundamental_energy_ratio(spec) == pytest.approx(1.0)

    def test_no_fundamental(self):
        spec = dft(cosine_signal(2, 512, 1.0))
        assert fundamental_energy_ratio(spec) == pytest.approx(0.0, abs=1e-20)

    def test_abs_cosine_even_harmonics(self):
        # |cos| is half-period periodic: only even harmonics survive
        rectified = apply(ActivationSpec.abs(), cosine_signal(1, 512, 1.0))
        spec = dft(rectified)
        assert fundamental_energy_ratio(spec, 1, 256) < 1e-20
        assert fundamental_energy_ratio(spec, 2, 256) > 0.9

    def test_scale_invariance(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=256)
        r1 = fundamental_energy_ratio(dft(SampledSignal(x, 256.0)), 1, 100)
        r2 = fundamental_energy_ratio(dft(SampledSignal(-3.7 * x, 256.0)), 1, 100)
        assert r1 == pytest.approx(r2, rel=1e-12)

    def test_zero_denominator(self):
        with pytest.raises(ZeroDenominator):
            fundamental_energy_ratio(dft(SampledSignal(np.zeros(64), 64.0)), 1, 16)

    def test_max_bin_bounds(self):
        spec = dft(cosine_signal(1, 64, 1.0))
        with pytest.raises(ValueError):
            fundamental_energy_ratio(spec, 1, 33)  # only bins 0..32 exist


class TestStft:
    def test_tone_localization(self):
        sig = cosine_signal(50, 512, 10.0)
        spg = stft(sig, 1024, 51, 1024)
        target = int(round(50 / spg.freq_step))
        argmax = np.argmax(spg.matrix, axis=1)
        for a in argmax[3:-3]:
            assert a == target

    def test_zero_signal(self):
        spg = stft(SampledSignal(np.zeros(4096), 512.0), 1024, 51, 1024)
        assert np.all(spg.matrix == 0.0)

    def test_chirp_argmax_monotone(self):
        rate = 64.0
        t = np.arange(int(rate * 20)) / rate
        x = np.cos(2 * np.pi * (t + 0.05 * t ** 2))  # IF = 1 + 0.1 t
        spg = stft(SampledSignal(x, rate), 128, 16, 2048)
        argmax = np.argmax(spg.matrix, axis=1)[5:-5]
        assert np.all(np.diff(argmax) >= 0)
        assert argmax[-1] > argmax[0]

    def test_too_short(self):
        with pytest.raises(SignalTooShort):
            stft(SampledSignal(np.zeros(100), 512.0), 1024, 51, 1024)

    def test_time_shift_moves_frames(self):
        rng = np.random.default_rng(0)
        hop = 32
        core = rng.normal(size=2048)
        x1 = np.concatenate([core, np.zeros(4 * hop)])
        x2 = np.concatenate([np.zeros(4 * hop), core])
        s1 = stft(SampledSignal(x1, 512.0), 256, hop, 256)
        s2 = stft(SampledSignal(x2, 512.0), 256, hop, 256)
        a = s1.matrix[8:40]
        b = s2.matrix[12:44]
        assert np.max(np.abs(a - b)) < 1e-6 * max(np.max(a), 1.0)


class TestDynamicRangeClip:
    def test_median_cap(self):
        m = np.arange(10000, dtype=float).reshape(100, 100)
        spg = Spectrogram(m, 1.0, 1.0, "test")
        out = dynamic_range_clip(spg, 0, 50)
        assert np.max(out.matrix) == pytest.approx(4999.5)

    def test_all_equal_unchanged(self):
        spg = Spectrogram(np.full((4, 4), 2.5), 1.0, 1.0, "test")
        out = dynamic_range_clip(spg)
        assert np.array_equal(out.matrix, spg.matrix)

    def test_full_range_unchanged(self):
        rng = np.random.default_rng(1)
        spg = Spectrogram(rng.random((20, 20)), 1.0, 1.0, "test")
        out = dynamic_range_clip(spg, 0, 100)
        assert np.array_equal(out.matrix, spg.matrix)

    def test_matches_percentile_clip_oracle(self):
        rng = np.random.default_rng(2)
        m = rng.random((30, 30))
        spg = Spectrogram(m, 1.0, 1.0, "test")
        out = dynamic_range_clip(spg, 5.0, 95.0)
        lo, hi = np.percentile(m, [5.0, 95.0])
        assert np.array_equal(out.matrix, np.clip(m, lo, hi))


class TestBandEnergyRatio:
    def _tone_spectrogram(self, freq):
        sig = cosine_signal(freq, 64, 20.0)
        return stft(sig, 128, 6, 1024)

    def test_band_on_tone(self):
        # band half-width must cover the Gaussian window's spectral width
        spg = self._tone_spectrogram(2)
        curve = np.full(spg.n_frames, 2.0)
        assert band_energy_ratio(spg, curve, 1.0) > 0.95

    def test_band_misses_tone(self):
        spg = self._tone_spectrogram(2)
        curve = np.full(spg.n_frames, 6.0)
        assert band_energy_ratio(spg, curve, 1.0) < 0.05

    def test_zero_signal_denominator(self):
        spg = stft(SampledSignal(np.zeros(4096), 64.0), 128, 6, 1024)
        with pytest.raises(ZeroDenominator):
            band_energy_ratio(spg, np.full(spg.n_frames, 2.0))

    def test_empty_band(self):
        spg = self._tone_spectrogram(2)
        # 20.01 Hz falls between the 1/16 Hz grid points
        curve = np.full(spg.n_frames, 20.01)
        with pytest.raises(EmptyBand):
            band_energy_ratio(spg, curve, half_width=1e-6)


class TestExports:
    def test_csv_row_per_frame(self, tmp_path):
        spg = Spectrogram(np.array([[1.0, 2.0], [3.0, 4.0]]), 1.0, 1.0, "t")
        path = tmp_path / "s.csv"
        spectrogram_to_csv(spg, path)
        lines = path.read_text().splitlines()
        assert lines == ["1,2", "3,4"]

    def test_pgm_header_and_size(self, tmp_path):
        spg = Spectrogram(np.array([[0.0, 1.0], [2.0, 4.0]]), 1.0, 1.0, "t")
        path = tmp_path / "s.pgm"
        spectrogram_to_pgm(spg, path)
        data = path.read_bytes()
        assert data.startswith(b"P5\n2 2\n255\n")
        pixels = data[len(b"P5\n2 2\n255\n"):]
        assert list(pixels) == [0, 64, 128, 255]
