"""
Shared numerical substrate
==========================

Frequency/time grids, unitary spectral transforms, quadratic dispersion,
seeded random streams and weighted statistics.

Units are dimensionless with c = 1: angular frequencies are measured in
units of a reference bandwidth and times in its inverse.

Transform convention
--------------------
A field is stored either as a spectral amplitude ``F(eps)`` on a grid of
detunings ``eps = omega - center`` or as a slowly varying envelope ``f(t)``.
They are related by

.. math::
    f(t) = \\frac{1}{\\sqrt{2\\pi}} \\int F(\\epsilon) e^{-i \\epsilon t} d\\epsilon

so a spectral phase ``k(omega) L`` with ``dk/domega = alpha`` delays the
envelope by ``alpha L``.  With this normalisation Parseval holds without
extra factors: ``sum |f|^2 dt == sum |F|^2 d(eps)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

FREQUENCY = "frequency"
TIME = "time"

EDGE_TOLERANCE = 1e-6
MIN_POINTS = 64

T = TypeVar("T")


class DomainMismatchError(ValueError):
    """A field was passed to an operation expecting the other domain."""


class DegenerateWeightsError(ValueError):
    """Weights (or intensities) sum to zero."""


class UnsupportedConfigurationError(ValueError):
    """A closed form was asked for outside the configuration it covers."""


class AliasingError(RuntimeError):
    """A field does not fit its grid; increase span, duration or n_points."""


def next_power_of_two(n: float, minimum: int = MIN_POINTS) -> int:
    n = max(int(np.ceil(n)), minimum)
    return 1 << (n - 1).bit_length()


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform angular-frequency grid and its conjugate time grid.

    ``n_points`` bins of width ``span / n_points`` centred on ``center``.
    The conjugate time grid has spacing ``2 pi / span`` and covers
    ``2 pi / spacing``.
    """

    n_points: int
    center: float
    span: float

    def __post_init__(self):
        n = self.n_points
        if n < MIN_POINTS or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= {MIN_POINTS}, got {n}")
        if not self.span > 0:
            raise ValueError(f"span must be positive, got {self.span}")

    @classmethod
    def for_widths(cls, bandwidth: float, time_width: float, center: float = 0.0,
                   factor: float = 16.0) -> "FrequencyGrid":
        """Smallest grid with span and duration each ``factor`` times the widths."""
        span = factor * bandwidth
        duration = factor * time_width
        n = next_power_of_two(span * duration / (2 * np.pi))
        return cls(n, center, max(span, 2 * np.pi * n / duration))

    @property
    def spacing(self) -> float:
        return self.span / self.n_points

    @property
    def offsets(self) -> np.ndarray:
        """Detunings from ``center``; index ``n_points // 2`` is exactly zero."""
        return (np.arange(self.n_points) - self.n_points // 2) * self.spacing

    @property
    def frequencies(self) -> np.ndarray:
        return self.center + self.offsets

    @property
    def dt(self) -> float:
        return 2 * np.pi / self.span

    @property
    def duration(self) -> float:
        return 2 * np.pi / self.spacing

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.dt


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex amplitude sampled on a grid, in either domain.

    ``values`` may carry leading batch axes (records, pulses); the last axis
    always has length ``grid.n_points``.  ``time_origin`` shifts the time
    window, which lets a pulse be followed in its own moving frame.
    """

    grid: FrequencyGrid
    values: np.ndarray
    domain: str
    time_origin: float = 0.0

    def __post_init__(self):
        if self.domain not in (FREQUENCY, TIME):
            raise ValueError(f"domain must be {FREQUENCY!r} or {TIME!r}")
        values = np.asarray(self.values, dtype=complex)
        if values.shape[-1:] != (self.grid.n_points,):
            raise ValueError(
                f"values last axis {values.shape[-1:]} != n_points {self.grid.n_points}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def axis(self) -> np.ndarray:
        """Detunings (frequency domain) or absolute times (time domain)."""
        if self.domain == FREQUENCY:
            return self.grid.offsets
        return self.time_origin + self.grid.times

    @property
    def spacing(self) -> float:
        return self.grid.spacing if self.domain == FREQUENCY else self.grid.dt

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def power(self) -> np.ndarray:
        return np.sum(self.intensity, axis=-1) * self.spacing

    def with_values(self, values: np.ndarray) -> "ComplexField":
        return ComplexField(self.grid, values, self.domain, self.time_origin)


def _require(f: ComplexField, domain: str) -> None:
    if f.domain != domain:
        raise DomainMismatchError(f"expected a {domain}-domain field, got {f.domain}")


def spectrum_to_envelope(values: np.ndarray, grid: FrequencyGrid,
                         time_origin=0.0) -> np.ndarray:
    """Transform spectral samples (last axis) to envelope samples.

    ``time_origin`` may be an array broadcasting against the leading axes.
    """
    values = np.asarray(values, dtype=complex)
    origin = np.asarray(time_origin, dtype=float)
    if np.any(origin != 0):
        values = values * np.exp(-1j * origin[..., None] * grid.offsets)
    out = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(values, axes=-1), axis=-1), axes=-1)
    return out * (grid.spacing / np.sqrt(2 * np.pi))


def envelope_to_spectrum(values: np.ndarray, grid: FrequencyGrid,
                         time_origin=0.0) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    out = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(values, axes=-1), axis=-1), axes=-1)
    out = out * (np.sqrt(2 * np.pi) / grid.spacing)
    origin = np.asarray(time_origin, dtype=float)
    if np.any(origin != 0):
        out = out * np.exp(1j * origin[..., None] * grid.offsets)
    return out


def to_time_domain(f: ComplexField) -> ComplexField:
    _require(f, FREQUENCY)
    return ComplexField(f.grid, spectrum_to_envelope(f.values, f.grid, f.time_origin),
                        TIME, f.time_origin)


def to_freq_domain(f: ComplexField) -> ComplexField:
    _require(f, TIME)
    return ComplexField(f.grid, envelope_to_spectrum(f.values, f.grid, f.time_origin),
                        FREQUENCY, f.time_origin)


@dataclass(frozen=True)
class DispersiveMedium:
    """Quadratic dispersion ``k = k0 + alpha*eps + beta*eps**2`` over ``length``."""

    alpha: float = 0.0
    beta: float = 0.0
    length: float = 0.0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError(f"length must be >= 0, got {self.length}")

    def phase(self, eps, sign: int = 1):
        """Accumulated phase ``(sign*alpha*eps + beta*eps**2) * length``."""
        eps = np.asarray(eps, dtype=float)
        return (sign * self.alpha * eps + self.beta * eps ** 2) * self.length

    def group_delay(self, eps, sign: int = 1):
        return (sign * self.alpha + 2 * self.beta * np.asarray(eps, dtype=float)) * self.length


def apply_spectral_phase(f: ComplexField, m: DispersiveMedium, sign: int = 1,
                         reference: float | None = None) -> ComplexField:
    """Propagate a spectral field through ``m``.

    The expansion point defaults to the grid centre.  ``sign=-1`` selects the
    ``-alpha`` branch, used when detunings are measured in a mirrored
    coordinate (the partner photon of a pair).
    """
    _require(f, FREQUENCY)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if m.length == 0:
        return f
    eps = f.grid.frequencies - (f.grid.center if reference is None else reference)
    return f.with_values(f.values * np.exp(1j * m.phase(eps, sign)))


def check_edges(values: np.ndarray, what: str, tol: float = EDGE_TOLERANCE,
                axes: Sequence[int] = (-1,)) -> None:
    """Raise :class:`AliasingError` if edge amplitude exceeds ``tol`` of peak."""
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0:
        return
    for ax in axes:
        edge = max(np.take(mag, 0, axis=ax).max(), np.take(mag, -1, axis=ax).max())
        if edge > tol * peak:
            raise AliasingError(
                f"{what}: edge amplitude {edge / peak:.2e} of peak exceeds {tol:g}; "
                "increase the grid (span, duration or n_points)")


def gaussian_spectrum(grid: FrequencyGrid, std: float, detuning=0.0) -> np.ndarray:
    """Transform-limited Gaussian spectral amplitude, unit power.

    ``std`` is the standard deviation of the spectral *intensity*; the
    temporal intensity then has standard deviation ``1 / (2 std)``.
    ``detuning`` may be an array, giving one row per value.
    """
    d = np.asarray(detuning, dtype=float)[..., None]
    amp = np.exp(-((grid.offsets - d) ** 2) / (4 * std ** 2))
    return amp / np.sqrt((2 * np.pi * std ** 2) ** 0.5)


# -- statistics ---------------------------------------------------------------

@dataclass(frozen=True)
class SummaryStats:
    """Mean and spread of a sample.

    ``std_error`` is the standard error of the mean; ``std_std_error`` is the
    delta-method standard error of ``std`` itself (kurtosis-aware).  Results
    obtained by quadrature rather than sampling carry zero errors.
    """

    mean: float
    std: float
    n_samples: int
    std_error: float
    std_std_error: float = 0.0

    @classmethod
    def from_samples(cls, x) -> "SummaryStats":
        x = np.asarray(x, dtype=float).ravel()
        n = x.size
        if n == 0:
            raise ValueError("no samples")
        mean = float(x.mean())
        var = float(np.mean((x - mean) ** 2))
        std = var ** 0.5
        if n < 2 or std == 0:
            return cls(mean, std, n, float(std / np.sqrt(n)), 0.0)
        m4 = float(np.mean((x - mean) ** 4))
        std_std = np.sqrt(max(m4 - var ** 2, 0.0) / n) / (2 * std)
        return cls(mean, std, n, float(std / np.sqrt(n)), float(std_std))

    @classmethod
    def exact(cls, mean: float, std: float, n_bins: int) -> "SummaryStats":
        return cls(float(mean), float(std), int(n_bins), 0.0, 0.0)


def _check_weights(values, weights):
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.shape != weights.shape:
        raise ValueError(f"shape mismatch {values.shape} vs {weights.shape}")
    if np.any(weights < 0):
        raise ValueError("weights must be nonnegative")
    total = weights.sum()
    if not total > 0:
        raise DegenerateWeightsError("weights sum to zero")
    return values, weights, total


def weighted_mean(values, weights) -> float:
    values, weights, total = _check_weights(values, weights)
    return float(np.sum(weights * values) / total)


def weighted_std(values, weights) -> float:
    """``sqrt(sum w (v - vbar)^2 / sum w)``."""
    values, weights, total = _check_weights(values, weights)
    mean = np.sum(weights * values) / total
    return float(np.sqrt(np.sum(weights * (values - mean) ** 2) / total))


# -- randomness ---------------------------------------------------------------

@dataclass(frozen=True)
class RandomStream:
    """Counter-based random stream keyed by ``(seed, stream_id)``.

    Monte Carlo loops split their trials into fixed-size blocks and draw
    block ``b`` from ``block(b)``, so the result does not depend on how many
    threads execute the blocks or in which order.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(ss))

    def block(self, index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, index))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, stream_id: int) -> "RandomStream":
        return RandomStream(self.seed, self.stream_id * 1_000_003 + stream_id + 1)


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RandomStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RandomStream or numpy Generator, got {type(rng).__name__}")


def map_blocks(func: Callable[[int, int, int], T], n_items: int, block_size: int,
               threads: int = 1) -> list[T]:
    """Call ``func(block_index, start, count)`` over fixed blocks, in order."""
    if n_items < 0:
        raise ValueError("n_items must be >= 0")
    starts = range(0, n_items, block_size)
    jobs = [(i, s, min(block_size, n_items - s)) for i, s in enumerate(starts)]
    if threads <= 1 or len(jobs) <= 1:
        return [func(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: func(*job), jobs))


def sample_from_intensity(f: ComplexField, n: int, rng) -> np.ndarray:
    """Draw detection times with density proportional to ``|f(t)|^2``.

    Samples land on grid times.  A batched field (shape ``(rows, N)``)
    returns ``(rows, n)`` samples, row by row.
    """
    _require(f, TIME)
    gen = as_generator(rng)
    weights = f.intensity
    totals = weights.sum(axis=-1, keepdims=True)
    if np.any(totals == 0):
        raise DegenerateWeightsError("field has zero intensity")
    cdf = np.cumsum(weights, axis=-1) / totals
    cdf[..., -1] = 1.0
    times = f.axis
    if weights.ndim == 1:
        idx = np.searchsorted(cdf, gen.random(n), side="right")
        return times[np.minimum(idx, f.grid.n_points - 1)]
    u = gen.random(weights.shape[:-1] + (n,))
    idx = inverse_cdf_rows(cdf.reshape(-1, cdf.shape[-1]), u.reshape(-1, n))
    t = np.broadcast_to(times, cdf.shape).reshape(-1, cdf.shape[-1])
    rows = np.arange(idx.shape[0])[:, None]
    return t[rows, idx].reshape(u.shape)


def inverse_cdf_rows(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise ``searchsorted(cdf[r], u[r], side='right')``."""
    out = np.empty(u.shape, dtype=np.intp)
    for j in range(u.shape[1]):
        out[:, j] = np.count_nonzero(cdf <= u[:, j:j + 1], axis=1)
    return np.minimum(out, cdf.shape[1] - 1)
