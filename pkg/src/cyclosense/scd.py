"""Spectral correlation estimation at single cycle frequencies.

The estimator measures correlation between spectral components spaced a
cycle frequency apart: a frequency-smoothed average of
X(f + alpha/2) * conj(X(f - alpha/2)).  A modulated carrier concentrates
this correlation at alpha = 2 * carrier_hz, while stationary noise has
none at any alpha != 0, which is what makes the cycle-frequency axis a
detection domain.

Frequency indexing is bounded to the sampled band: spectra live on signed
bins -N/2 .. N/2-1 and smoothing terms whose shifted index falls outside
contribute zero.  Wrapping mod N instead would alias every genuine
feature at alpha into a second, equal-magnitude feature at
alpha -/+ sample_rate (the wrapped pairing picks up the negative-frequency
image), leaving profile maxima ambiguous; bounded indexing keeps the
cycle-frequency axis unambiguous on (-fs, fs).  The cost is that slice
values within L/2 bins of the band edges are averaged over fewer terms.

Cycle frequencies are quantized to the representable grid: the bin shift
a = round(alpha / (2 Fs)) (ties to even), and the quantized value
2 * a * Fs is reported as alpha_effective_hz.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError
from .siggen import SampleBuffer

__all__ = [
    "WindowKind",
    "Spectrum",
    "SmoothingWindow",
    "ScdSlice",
    "CycleProfile",
    "dft",
    "dft_naive",
    "make_window",
    "scd_slice",
    "scd_slice_naive",
    "cycle_profile",
    "write_profile_csv",
]


class WindowKind(Enum):
    HAMMING = "hamming"
    RECTANGULAR = "rectangular"


@dataclass(frozen=True)
class Spectrum:
    """Complex DFT bins of a sample buffer, in standard DFT order."""

    bins: np.ndarray
    n: int
    freq_resolution_hz: float

    def __post_init__(self):
        arr = np.array(self.bins, dtype=np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise ConfigurationError("spectrum must be a nonempty 1-D sequence")
        if arr.size != self.n:
            raise ConfigurationError("spectrum length must equal n")
        if not self.freq_resolution_hz > 0.0:
            raise ConfigurationError("freq_resolution_hz must be positive")
        arr.flags.writeable = False
        object.__setattr__(self, "bins", arr)


@dataclass(frozen=True)
class SmoothingWindow:
    """Odd-length symmetric spectral smoothing window with unit mean."""

    weights: np.ndarray
    kind: WindowKind

    def __post_init__(self):
        arr = np.array(self.weights, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0 or arr.size % 2 == 0:
            raise ConfigurationError("window weights must have odd positive length")
        if not np.array_equal(arr, arr[::-1]):
            raise ConfigurationError("window weights must be symmetric")
        if abs(float(np.mean(arr)) - 1.0) > 1e-12:
            raise ConfigurationError("window weights must average to 1")
        arr.flags.writeable = False
        object.__setattr__(self, "weights", arr)

    @property
    def length(self) -> int:
        return self.weights.size

    @property
    def half(self) -> int:
        return (self.weights.size - 1) // 2


@dataclass(frozen=True)
class ScdSlice:
    """Smoothed spectral correlation over frequency at one cycle frequency.

    values[l] follows DFT bin order (l=0 is DC); scale is the fixed
    1 / ((N-1) Ts) factor already applied to the values.
    """

    values: np.ndarray
    alpha_requested_hz: float
    alpha_effective_hz: float
    scale: float

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise ConfigurationError("slice values must be a nonempty 1-D sequence")
        if not self.scale > 0.0:
            raise ConfigurationError("scale must be positive")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class CycleProfile:
    """Max slice magnitude over frequency, per cycle frequency."""

    alphas_hz: np.ndarray
    magnitudes: np.ndarray

    def __post_init__(self):
        alphas = np.array(self.alphas_hz, dtype=np.float64)
        mags = np.array(self.magnitudes, dtype=np.float64)
        if alphas.ndim != 1 or mags.ndim != 1 or alphas.size != mags.size:
            raise ConfigurationError("profile arrays must be 1-D and equally long")
        if alphas.size == 0:
            raise ConfigurationError("profile must contain at least one point")
        if np.any(mags < 0.0):
            raise ConfigurationError("profile magnitudes must be nonnegative")
        alphas.flags.writeable = False
        mags.flags.writeable = False
        object.__setattr__(self, "alphas_hz", alphas)
        object.__setattr__(self, "magnitudes", mags)


def dft(signal: SampleBuffer) -> Spectrum:
    """Unnormalized forward transform: bins[v] = sum_k x[k] e^{-i2pi vk/N}."""
    n = signal.samples.size
    return Spectrum(np.fft.fft(signal.samples), n, signal.sample_rate_hz / n)


def dft_naive(signal: SampleBuffer) -> Spectrum:
    """Direct per-bin summation of the transform; O(N^2) oracle for dft."""
    x = signal.samples
    n = x.size
    k = np.arange(n)
    bins = np.empty(n, dtype=np.complex128)
    for v in range(n):
        bins[v] = np.sum(x * np.exp((-2j * np.pi * v / n) * k))
    return Spectrum(bins, n, signal.sample_rate_hz / n)


def make_window(kind: WindowKind, length: int) -> SmoothingWindow:
    """Build a smoothing window normalized to unit mean.

    Hamming weights are mirrored about the center before normalization so
    the symmetry invariant holds exactly in floating point.
    """
    if not isinstance(length, (int, np.integer)) or length < 1:
        raise ConfigurationError("window length must be a positive integer")
    if length % 2 == 0:
        raise ConfigurationError(
            f"window length must be odd; use {length - 1} or {length + 1}"
        )
    if kind is WindowKind.RECTANGULAR or length == 1:
        weights = np.ones(length)
    elif kind is WindowKind.HAMMING:
        j = np.arange(length, dtype=np.float64)
        weights = 0.54 - 0.46 * np.cos(2.0 * np.pi * j / (length - 1))
        half = (length - 1) // 2
        weights[half + 1:] = weights[half - 1::-1]
        weights *= length / weights.sum()
    else:
        raise ConfigurationError(f"unknown window kind: {kind!r}")
    return SmoothingWindow(weights, kind)


def _next_pow2(m: int) -> int:
    return 1 << (m - 1).bit_length()


@lru_cache(maxsize=16)
def _window_transform(weights_bytes: bytes, nfft: int) -> np.ndarray:
    w = np.frombuffer(weights_bytes, dtype=np.float64)
    out = np.fft.fft(w, nfft)
    out.flags.writeable = False
    return out


def _smoothed_correlation(bins: np.ndarray, shift: int, weights: np.ndarray) -> np.ndarray:
    """Core kernel: (1/L) sum_v X<i+shift+v> conj(X<i-shift+v>) W(v).

    Works in signed-bin (fftshifted) order with zero padding outside the
    band, evaluates the smoothing sum as a linear convolution via FFT
    (valid because the window is symmetric), and returns values back in
    DFT bin order.
    """
    n = bins.shape[0]
    centered = np.fft.fftshift(bins)
    pad = abs(shift)
    padded = np.zeros(n + 2 * pad, dtype=np.complex128)
    padded[pad:pad + n] = centered
    products = (padded[pad + shift:pad + shift + n]
                * np.conj(padded[pad - shift:pad - shift + n]))
    length = weights.shape[0]
    if length == 1:
        smoothed = products * weights[0]
    else:
        half = (length - 1) // 2
        nfft = _next_pow2(n + length - 1)
        wf = _window_transform(weights.tobytes(), nfft)
        smoothed = np.fft.ifft(np.fft.fft(products, nfft) * wf)[half:half + n]
    return np.fft.ifftshift(smoothed) / length


def scd_slice(spectrum: Spectrum, alpha_hz: float, window: SmoothingWindow,
              sample_period_s: float) -> ScdSlice:
    """Frequency-smoothed spectral correlation at one cycle frequency.

    values[l] = scale * (1/L) * sum_v X<s(l)+a+v> * conj(X<s(l)-a+v>) * W(v)

    where a = round(alpha_hz / (2 Fs)), s(l) is the signed interpretation
    of bin l, X<i> is the spectrum on signed bins (zero outside the band),
    and scale = 1 / ((N-1) * Ts).  The quantized cycle frequency 2*a*Fs is
    reported as alpha_effective_hz.
    """
    n = spectrum.n
    if not window.length < n:
        raise ConfigurationError(
            f"window length {window.length} must be below the transform size {n}"
        )
    if not sample_period_s > 0.0:
        raise ConfigurationError("sample_period_s must be positive")
    fres = spectrum.freq_resolution_hz
    shift = int(round(alpha_hz / (2.0 * fres)))
    scale = 1.0 / ((n - 1) * sample_period_s)
    values = _smoothed_correlation(spectrum.bins, shift, window.weights) * scale
    return ScdSlice(
        values=values,
        alpha_requested_hz=float(alpha_hz),
        alpha_effective_hz=2.0 * shift * fres,
        scale=scale,
    )


def scd_slice_naive(signal: SampleBuffer, alpha_hz: float,
                    window: SmoothingWindow) -> ScdSlice:
    """Same mathematical definition as scd_slice, evaluated the slow way.

    Explicit per-term loops over the naive DFT; independent oracle with no
    shared code beyond the type definitions.  O(N^2) transform plus
    O(N*L) smoothing, so keep N small.
    """
    n = signal.samples.size
    length = window.length
    if not length < n:
        raise ConfigurationError(
            f"window length {length} must be below the transform size {n}"
        )
    spectrum = dft_naive(signal)
    bins = spectrum.bins
    fres = spectrum.freq_resolution_hz
    shift = int(round(alpha_hz / (2.0 * fres)))
    half = (length - 1) // 2
    weights = window.weights
    low = -(n // 2)
    high = n - 1 - (n // 2)

    def bin_at(i: int) -> complex:
        if low <= i <= high:
            return complex(bins[i % n])
        return 0j

    ts = 1.0 / signal.sample_rate_hz
    scale = 1.0 / ((n - 1) * ts)
    values = np.empty(n, dtype=np.complex128)
    for l in range(n):
        center = l if l <= high else l - n
        acc = 0j
        for v in range(-half, half + 1):
            acc += (bin_at(center + shift + v)
                    * bin_at(center - shift + v).conjugate()
                    * weights[v + half])
        values[l] = acc * (scale / length)
    return ScdSlice(
        values=values,
        alpha_requested_hz=float(alpha_hz),
        alpha_effective_hz=2.0 * shift * fres,
        scale=scale,
    )


def cycle_profile(signal: SampleBuffer, alphas_hz, window: SmoothingWindow) -> CycleProfile:
    """Max slice magnitude over frequency for each requested cycle frequency."""
    rate = signal.sample_rate_hz
    alphas = np.asarray(alphas_hz, dtype=np.float64)
    if alphas.ndim != 1 or alphas.size == 0:
        raise ConfigurationError("alphas_hz must be a nonempty 1-D sequence")
    if np.any(np.abs(alphas) >= rate):
        raise ConfigurationError(
            f"cycle frequencies must lie within (-{rate}, {rate}) Hz"
        )
    spectrum = dft(signal)
    ts = 1.0 / rate
    magnitudes = np.empty(alphas.size)
    for i, alpha in enumerate(alphas):
        piece = scd_slice(spectrum, float(alpha), window, ts)
        magnitudes[i] = np.abs(piece.values).max()
    return CycleProfile(alphas, magnitudes)


def write_profile_csv(profile: CycleProfile, stream) -> None:
    """Emit `alpha_hz,i_alpha` rows at full precision to a text stream."""
    stream.write("alpha_hz,i_alpha\n")
    for alpha, mag in zip(profile.alphas_hz, profile.magnitudes):
        stream.write(f"{float(alpha)!r},{float(mag)!r}\n")
