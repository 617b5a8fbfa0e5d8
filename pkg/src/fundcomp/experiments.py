"""Synthetic benchmark: random gcd-1 cosine signals, activation sweep, stats.

Reproducibility contract: trial i uses the child generator
PCG64(SeedSequence((master_seed, i))), so results are bit-identical regardless
of how trials are scheduled across workers.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import activations, spectral
from .activations import ActivationSpec
from .errors import RejectionOverflow, ZeroSignal
from .signal_model import SampledSignal, TrigPolynomial, evaluate

RNG_ID = "numpy-pcg64/seedseq((master_seed, trial_index))"
MAX_GCD_RESAMPLES = 10_000

# Fixed histogram grid: 200 bins on [0, 0.05]; ratios above the top edge are
# counted in the last bin so counts always sum to the number of trials.
HIST_EDGES = np.linspace(0.0, 0.05, 201)

DEFAULT_ACTIVATIONS = (
    ActivationSpec.abs(),
    ActivationSpec.relu(),
    ActivationSpec.adaptive(0.2),
    ActivationSpec.adaptive(0.1),
    ActivationSpec.adaptive(0.05),
)


@dataclass(frozen=True)
class SynthConfig:
    trials: int
    master_seed: int
    sample_rate: float = 512.0
    k_min: int = 5
    k_max: int = 100
    freq_min: int = 2
    freq_max: int = 250
    density_scale: float = 100.0
    activations: tuple[ActivationSpec, ...] = DEFAULT_ACTIVATIONS

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.k_min > self.k_max or self.k_min < 1:
            raise ValueError("need 1 <= k_min <= k_max")
        if self.freq_min < 2:
            raise ValueError("freq_min must be >= 2 so bin 1 stays empty")
        if self.freq_max <= self.freq_min:
            raise ValueError("freq_max must exceed freq_min")
        object.__setattr__(self, "activations", tuple(self.activations))

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "master_seed": self.master_seed,
            "sample_rate": self.sample_rate,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "freq_min": self.freq_min,
            "freq_max": self.freq_max,
            "density_scale": self.density_scale,
            "activations": [a.label for a in self.activations],
        }


@dataclass(frozen=True)
class TrialStats:
    activation: str
    median: float
    mad: float
    histogram_edges: tuple[float, ...]
    histogram_counts: tuple[int, ...]
    trials_run: int
    rng_id: str = RNG_ID


def child_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((master_seed, trial_index))))


def frequency_weights(freq_min: int, freq_max: int,
                      density_scale: float) -> tuple[np.ndarray, np.ndarray]:
    """Candidate frequencies and their normalized selection weights."""
    pool = np.arange(freq_min, freq_max + 1)
    w = np.exp(-((pool / density_scale) ** 2))
    return pool, w / w.sum()


def generate_synthetic(rng: np.random.Generator, *, k_min: int = 5,
                       k_max: int = 100, freq_min: int = 2, freq_max: int = 250,
                       density_scale: float = 100.0) -> TrigPolynomial:
    """One random 1-periodic cosine polynomial with gcd-1 frequency support.

    K ~ Uniform{k_min..k_max}; frequencies drawn without replacement with
    Gaussian-decaying weights and rejection-resampled until their gcd is 1;
    amplitudes in (0, 1], phases in (0, 2 pi].
    """
    k = int(rng.integers(k_min, k_max + 1))
    pool, probs = frequency_weights(freq_min, freq_max, density_scale)
    for _ in range(MAX_GCD_RESAMPLES):
        freqs = rng.choice(pool, size=k, replace=False, p=probs)
        if math.gcd(*freqs.tolist()) == 1:
            break
    else:
        raise RejectionOverflow("could not draw a gcd-1 frequency set")
    amps = 1.0 - rng.random(k)            # (0, 1]
    phases = 2.0 * math.pi * (1.0 - rng.random(k))  # (0, 2 pi]
    order = np.argsort(freqs)
    terms = tuple(
        (int(freqs[i]), amps[i] * np.exp(1j * phases[i])) for i in order)
    return TrigPolynomial(terms, period=1.0, real_cosine_form=True)


def trial_ratios(config: SynthConfig, trial_index: int) -> list[float]:
    """Energy ratios of one trial, one entry per configured activation."""
    rng = child_rng(config.master_seed, trial_index)
    poly = generate_synthetic(
        rng, k_min=config.k_min, k_max=config.k_max,
        freq_min=config.freq_min, freq_max=config.freq_max,
        density_scale=config.density_scale)
    n = int(round(config.sample_rate * poly.period))
    t = np.arange(n) / config.sample_rate
    samples = np.real(evaluate(poly, t))
    signal = SampledSignal(samples, config.sample_rate)
    max_bin = min(256, n // 2)
    out = []
    for spec in config.activations:
        activated = activations.apply(spec, signal)
        ratio = spectral.fundamental_energy_ratio(
            spectral.dft(activated), 1, max_bin)
        out.append(ratio)
    return out


def _ratio_block(args) -> list[list[float]]:
    config, indices = args
    return [trial_ratios(config, i) for i in indices]


def run_trials(config: SynthConfig, *, first_trial: int = 0,
               workers: int = 1) -> dict[str, TrialStats]:
    """Run the benchmark and aggregate per-activation statistics.

    Trials cover indices [first_trial, first_trial + config.trials); results
    do not depend on `workers`.
    """
    indices = list(range(first_trial, first_trial + config.trials))
    if workers <= 1 or len(indices) < 2 * workers:
        rows = [trial_ratios(config, i) for i in indices]
    else:
        chunks = [indices[j::workers] for j in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_ratio_block,
                                   [(config, c) for c in chunks]))
        by_index = {}
        for chunk, block in zip(chunks, blocks):
            by_index.update(zip(chunk, block))
        rows = [by_index[i] for i in indices]

    ratios = np.array(rows)  # trials x activations
    stats = {}
    for j, spec in enumerate(config.activations):
        col = ratios[:, j]
        med = float(np.median(col))
        mad = float(np.median(np.abs(col - med)))
        counts, _ = np.histogram(np.clip(col, 0.0, HIST_EDGES[-1]),
                                 bins=HIST_EDGES)
        stats[spec.label] = TrialStats(
            activation=spec.label, median=med, mad=mad,
            histogram_edges=tuple(HIST_EDGES.tolist()),
            histogram_counts=tuple(int(c) for c in counts),
            trials_run=len(indices))
    return stats


def remove_fundamental(poly: TrigPolynomial) -> TrigPolynomial:
    """Drop any term at frequency 1; polynomials without one pass through."""
    kept = tuple((m, a) for m, a in poly.terms if m != 1)
    if not kept:
        raise ValueError("removing the fundamental leaves an empty polynomial")
    if len(kept) == len(poly.terms):
        return poly
    return TrigPolynomial(kept, period=poly.period,
                          real_cosine_form=poly.real_cosine_form)


def remove_fundamental_sampled(signal: SampledSignal) -> SampledSignal:
    """Zero DFT bins +-1 of a sampled signal and transform back."""
    x = signal.samples
    spec = np.fft.rfft(x)
    spec[1] = 0.0
    return SampledSignal(np.fft.irfft(spec, n=x.size), signal.sample_rate,
                         signal.start_time)


@dataclass(frozen=True)
class EnhancementResult:
    r_before: float
    r_after: float
    from_zero: bool
    statistic: float | None  # log(r_after)/log(r_before); None when undefined

    @property
    def enhanced(self) -> bool:
        if self.from_zero:
            return self.r_after > 0.0
        # both ratios are in (0, 1): a larger r_after has a smaller -log,
        # so enhancement corresponds to a statistic below 1
        return self.statistic is not None and self.statistic < 1.0


def enhancement_ratio_pair(signal: SampledSignal, spec: ActivationSpec,
                           max_bin: int = 256) -> EnhancementResult:
    """Fundamental energy ratio before and after an activation."""
    if float(np.max(np.abs(signal.samples))) == 0.0:
        raise ZeroSignal("enhancement requires a nonzero input signal")
    max_bin = min(max_bin, len(signal) // 2)
    r_before = spectral.fundamental_energy_ratio(spectral.dft(signal), 1, max_bin)
    activated = activations.apply(spec, signal)
    r_after = spectral.fundamental_energy_ratio(spectral.dft(activated), 1, max_bin)
    if r_before == 0.0:
        return EnhancementResult(r_before, r_after, from_zero=True, statistic=None)
    if r_after == 0.0 or r_before == 1.0:
        return EnhancementResult(r_before, r_after, from_zero=False, statistic=None)
    return EnhancementResult(r_before, r_after, from_zero=False,
                             statistic=math.log(r_after) / math.log(r_before))


def write_summary_json(stats: dict[str, TrialStats], config: SynthConfig, fh) -> None:
    payload = {
        "config": config.as_dict(),
        "rng_id": RNG_ID,
        "results": {
            label: {"median": s.median, "mad": s.mad, "trials_run": s.trials_run}
            for label, s in stats.items()
        },
    }
    json.dump(payload, fh, sort_keys=True, indent=2)
    fh.write("\n")


def write_histogram_csv(s: TrialStats, fh) -> None:
    fh.write("bin_lo,bin_hi,count\n")
    for lo, hi, c in zip(s.histogram_edges, s.histogram_edges[1:],
                         s.histogram_counts):
        fh.write(f"{lo:.17g},{hi:.17g},{c}\n")
