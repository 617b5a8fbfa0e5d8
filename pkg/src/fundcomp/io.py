"""File ingestion and export: signal CSV, WAV (PCM), polynomial spec JSON."""

from __future__ import annotations

import hashlib
import json
import wave

import numpy as np

from .errors import InputFormatError
from .signal_model import SampledSignal, TrigPolynomial, TWO_PI


def read_signal_csv(path) -> SampledSignal:
    """CSV signal: first line 'sample_rate,<value>', then one sample per line."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise InputFormatError(f"{path}: empty file")
    head = lines[0].split(",")
    if len(head) != 2 or head[0] != "sample_rate":
        raise InputFormatError(
            f"{path}:1: expected header 'sample_rate,<value>'")
    try:
        rate = float(head[1])
    except ValueError:
        raise InputFormatError(f"{path}:1: bad sample rate {head[1]!r}") from None
    samples = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            samples.append(float(line))
        except ValueError:
            raise InputFormatError(
                f"{path}:{lineno}: malformed sample {line!r}") from None
    if len(samples) < 2:
        raise InputFormatError(f"{path}: need at least 2 samples")
    return SampledSignal(np.array(samples), rate)


def write_signal_csv(signal: SampledSignal, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"sample_rate,{signal.sample_rate:.17g}\n")
        for v in signal.samples:
            fh.write(f"{v:.17g}\n")


def read_wav(path) -> SampledSignal:
    """PCM WAV, 16/24/32-bit; first channel, normalized by integer full scale."""
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except (wave.Error, EOFError) as exc:
        raise InputFormatError(f"{path}: not a readable WAV file ({exc})") from None
    if width == 2:
        data = np.frombuffer(raw, dtype="<i2").astype(np.float64)
        scale = 2 ** 15
    elif width == 4:
        data = np.frombuffer(raw, dtype="<i4").astype(np.float64)
        scale = 2 ** 31
    elif width == 3:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3)
        data = (b[:, 0].astype(np.int64)
                | (b[:, 1].astype(np.int64) << 8)
                | (b[:, 2].astype(np.int64) << 16))
        data = np.where(data >= 2 ** 23, data - 2 ** 24, data).astype(np.float64)
        scale = 2 ** 23
    else:
        raise InputFormatError(f"{path}: unsupported PCM width {8 * width} bits")
    data = data.reshape(-1, n_channels)[:, 0] / scale
    if data.size < 2:
        raise InputFormatError(f"{path}: need at least 2 samples")
    return SampledSignal(data, float(rate))


def read_signal(path) -> SampledSignal:
    p = str(path)
    if p.lower().endswith(".wav"):
        return read_wav(path)
    if p.lower().endswith(".csv"):
        return read_signal_csv(path)
    raise InputFormatError(f"{path}: unsupported format (need .csv or .wav)")


def read_if_curve_csv(path) -> np.ndarray:
    """One instantaneous-frequency value (Hz) per line, one per STFT frame."""
    values = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise InputFormatError(
                    f"{path}:{lineno}: malformed frequency {line.strip()!r}") from None
    if not values:
        raise InputFormatError(f"{path}: empty IF curve")
    return np.array(values)


def read_poly_spec_json(path) -> TrigPolynomial:
    """Polynomial spec: JSON array [{"m": int, "re": float, "im": float}, ...]
    (complex form, period 2 pi), or an object
    {"period": float, "real_cosine_form": bool, "terms": [...]}.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: invalid JSON ({exc})") from None

    if isinstance(doc, list):
        terms_doc, period, real_form = doc, TWO_PI, False
    elif isinstance(doc, dict):
        terms_doc = doc.get("terms")
        period = float(doc.get("period", TWO_PI))
        real_form = bool(doc.get("real_cosine_form", False))
        if not isinstance(terms_doc, list):
            raise InputFormatError(f"{path}: object form needs a 'terms' array")
    else:
        raise InputFormatError(f"{path}: expected a JSON array or object")

    terms = []
    for i, item in enumerate(terms_doc):
        try:
            terms.append((int(item["m"]),
                          complex(float(item.get("re", 0.0)),
                                  float(item.get("im", 0.0)))))
        except (KeyError, TypeError, ValueError):
            raise InputFormatError(
                f"{path}: bad term #{i}: expected {{'m', 're', 'im'}}") from None
    try:
        return TrigPolynomial(tuple(terms), period=period,
                              real_cosine_form=real_form)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
