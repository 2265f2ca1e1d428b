"""
Chaotic light through identical dispersive media
================================================

A stationary thermal field is split on a 50/50 beam splitter and both beams
pass through identical media.  Each realisation is visibly dispersed, yet the
intensity cross-correlation keeps its factor-of-two peak: the two beams are
dispersed identically, nothing is cancelled.

The source is a complex Ornstein-Uhlenbeck (first-order Markov) process with
field autocorrelation ``mean_power * exp(-coherence_rate * |tau|)``, so
``g2(tau) = 1 + exp(-2 coherence_rate |tau|)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .core import (
    TIME,
    AliasingError,
    ComplexField,
    DispersiveMedium,
    FrequencyGrid,
    RandomStream,
    apply_spectral_phase,
    map_blocks,
    to_freq_domain,
    to_time_domain,
)


@dataclass(frozen=True)
class ChaoticFieldParams:
    coherence_rate: float
    mean_power: float = 1.0
    duration: float = 512.0
    n_points: int = 4096
    n_records: int = 256
    carrier: float = 0.0

    def __post_init__(self):
        if not self.coherence_rate > 0 or not self.mean_power > 0:
            raise ValueError("coherence_rate and mean_power must be positive")
        if self.duration * self.coherence_rate < 100:
            raise ValueError("duration * coherence_rate must be >= 100 "
                             f"(got {self.duration * self.coherence_rate:g})")
        n = self.n_points
        if n < 64 or n & (n - 1):
            raise ValueError("n_points must be a power of two >= 64")
        if self.n_records < 1:
            raise ValueError("n_records must be >= 1")

    @property
    def dt(self) -> float:
        return self.duration / self.n_points

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(self.n_points, self.carrier, 2 * np.pi / self.dt)


@dataclass(frozen=True)
class IntensityCorrelation:
    tau: np.ndarray
    g2: np.ndarray
    std_error: np.ndarray

    def at(self, tau: float) -> tuple[float, float]:
        i = int(np.argmin(np.abs(self.tau - tau)))
        return float(self.g2[i]), float(self.std_error[i])


def _ou_records(p: ChaoticFieldParams, gen: np.random.Generator, count: int) -> np.ndarray:
    rho = np.exp(-p.coherence_rate * p.dt)
    noise = (gen.standard_normal((count, p.n_points))
             + 1j * gen.standard_normal((count, p.n_points))) / np.sqrt(2)
    start = np.sqrt(p.mean_power) * noise[:, :1]
    scale = np.sqrt(p.mean_power * (1 - rho ** 2))
    rest, _ = lfilter([scale], [1.0, -rho], noise[:, 1:], axis=1, zi=rho * start)
    return np.concatenate([start, rest], axis=1)


def generate_chaotic_field(p: ChaoticFieldParams, rng: RandomStream,
                           block_size: int = 64, threads: int = 1) -> ComplexField:
    """Ensemble of stationary thermal records, shape ``(n_records, n_points)``.

    Each record starts from the stationary distribution.  Records are drawn
    in fixed blocks of ``block_size`` so any thread count gives the same bits.
    """
    parts = map_blocks(lambda i, s, c: _ou_records(p, rng.block(i), c),
                       p.n_records, block_size, threads)
    return ComplexField(p.grid, np.concatenate(parts), TIME)


def beamsplit(f: ComplexField) -> tuple[ComplexField, ComplexField]:
    """Lossless 50/50 splitter: two identical copies at half the power."""
    out = f.values / np.sqrt(2)
    return f.with_values(out), f.with_values(out.copy())


def propagate_field(f: ComplexField, m: DispersiveMedium) -> ComplexField:
    """Pass a time-domain field through ``m`` about its carrier."""
    if m.length == 0:
        return f
    return to_time_domain(apply_spectral_phase(to_freq_domain(f), m))


def _lags_for(grid: FrequencyGrid, taus) -> np.ndarray:
    taus = np.asarray(taus, dtype=float)
    lags = np.rint(taus / grid.dt).astype(int)
    if np.any(np.abs(lags * grid.dt - taus) > 1e-9 * grid.dt + 1e-12):
        raise ValueError("delays must be integer multiples of the sample spacing")
    if np.any(np.abs(lags) >= grid.n_points):
        raise ValueError("delay exceeds the record length")
    return lags


def _pair_stats(ia: np.ndarray, ib: np.ndarray, lags: np.ndarray):
    """Per-record ``<Ia(t) Ib(t+k)>`` for each lag and per-record means."""
    ia = np.atleast_2d(ia)
    ib = np.atleast_2d(ib)
    n = ia.shape[-1]
    fa = np.fft.rfft(ia, 2 * n, axis=-1)
    fb = np.fft.rfft(ib, 2 * n, axis=-1)
    corr = np.fft.irfft(np.conj(fa) * fb, 2 * n, axis=-1)
    num = corr[:, lags % (2 * n)] / (n - np.abs(lags))
    return num, ia.mean(axis=-1), ib.mean(axis=-1)


def _combine(num, ma, mb, tau, n_boot: int, seed: int) -> IntensityCorrelation:
    g2 = num.mean(axis=0) / (ma.mean() * mb.mean())
    r = num.shape[0]
    if r < 2 or n_boot < 2:
        return IntensityCorrelation(tau, g2, np.full_like(g2, np.nan))
    gen = np.random.default_rng(seed)
    w = gen.multinomial(r, np.full(r, 1 / r), size=n_boot) / r
    boot = (w @ num) / ((w @ ma) * (w @ mb))[:, None]
    return IntensityCorrelation(tau, g2, boot.std(axis=0, ddof=1))


def g2_cross(a: ComplexField, b: ComplexField, taus=None, max_lag: int | None = None,
             n_boot: int = 200, seed: int = 0) -> IntensityCorrelation:
    """Normalised intensity cross-correlation ``<Ia(t) Ib(t+tau)> / (<Ia><Ib>)``.

    Averaged over time and over records; standard errors come from a
    bootstrap over records.  ``taus`` must sit on the sample grid; by default
    lags ``-max_lag..max_lag`` are used (``max_lag`` defaults to
    ``n_points // 16``).
    """
    if a.grid != b.grid or a.values.shape != b.values.shape:
        raise ValueError("fields must share grid and shape")
    if a.domain != TIME or b.domain != TIME:
        raise ValueError("g2_cross needs time-domain fields")
    if taus is None:
        max_lag = a.grid.n_points // 16 if max_lag is None else int(max_lag)
        lags = np.arange(-max_lag, max_lag + 1)
    else:
        lags = _lags_for(a.grid, taus)
    num, ma, mb = _pair_stats(a.intensity, b.intensity, lags)
    return _combine(num, ma, mb, lags * a.grid.dt, n_boot, seed)


def field_autocorrelation(f: ComplexField, taus) -> np.ndarray:
    """Normalised first-order coherence ``<E*(t) E(t+tau)> / <|E|^2>``."""
    lags = _lags_for(f.grid, taus)
    v = np.atleast_2d(f.values)
    n = v.shape[-1]
    fv = np.fft.fft(v, 2 * n, axis=-1)
    corr = np.fft.ifft(np.conj(fv) * fv, axis=-1)
    num = corr[:, lags % (2 * n)] / (n - np.abs(lags))
    return num.mean(axis=0) / np.mean(np.abs(v) ** 2)


def dispersion_guard(p: ChaoticFieldParams, m: DispersiveMedium) -> None:
    """Group-delay spread across +-10 linewidths must stay below a quarter record."""
    spread = 2 * abs(m.beta) * m.length * 20 * p.coherence_rate
    if spread > p.duration / 4:
        raise AliasingError(
            f"dispersive spread {spread:.3g} exceeds a quarter of the record "
            f"({p.duration / 4:.3g}); increase duration")


def normalized_l2(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.linalg.norm(x - y) / np.linalg.norm(y))


@dataclass(frozen=True)
class IdenticalDispersionReport:
    params: ChaoticFieldParams
    medium: DispersiveMedium
    without_medium: IntensityCorrelation
    with_medium: IntensityCorrelation
    max_abs_difference: float
    max_difference_sigma: float
    dissimilarity: float
    proportionality_error: float
    times: np.ndarray
    traces: dict

    @property
    def tau(self) -> np.ndarray:
        return self.without_medium.tau


def identical_dispersion_experiment(p: ChaoticFieldParams, m: DispersiveMedium,
                                    rng: RandomStream, max_lag: int | None = None,
                                    n_boot: int = 200, block_size: int = 64,
                                    threads: int = 1) -> IdenticalDispersionReport:
    """Split a chaotic beam and compare g2 with and without identical media.

    Records are processed block by block so large ensembles never sit in
    memory at once.  Record 0 is kept as a sample realisation.
    """
    dispersion_guard(p, m)
    grid = p.grid
    if max_lag is None:
        max_lag = int(np.ceil(5 / (p.coherence_rate * p.dt)))
    lags = np.arange(-max_lag, max_lag + 1)

    def block(index, start, count):
        src = ComplexField(grid, _ou_records(p, rng.block(index), count), TIME)
        a, b = beamsplit(src)
        ad, bd = propagate_field(a, m), propagate_field(b, m)
        out = {
            "plain": _pair_stats(a.intensity, b.intensity, lags),
            "dispersed": _pair_stats(ad.intensity, bd.intensity, lags),
        }
        na = ad.intensity / ad.intensity.sum(-1, keepdims=True)
        nb = bd.intensity / bd.intensity.sum(-1, keepdims=True)
        out["prop"] = float(np.max(np.abs(na - nb)) / na.max())
        if start == 0:
            out["traces"] = {"I_a": a.intensity[0], "I_b": b.intensity[0],
                             "I_a_dispersed": ad.intensity[0], "I_b_dispersed": bd.intensity[0]}
        return out

    parts = map_blocks(block, p.n_records, block_size, threads)
    curves = {}
    for key in ("plain", "dispersed"):
        num = np.concatenate([q[key][0] for q in parts])
        ma = np.concatenate([q[key][1] for q in parts])
        mb = np.concatenate([q[key][2] for q in parts])
        curves[key] = _combine(num, ma, mb, lags * grid.dt, n_boot, 0)
    g0, g1 = curves["plain"], curves["dispersed"]
    diff = np.abs(g1.g2 - g0.g2)
    sigma = np.hypot(g0.std_error, g1.std_error)
    traces = parts[0]["traces"]
    return IdenticalDispersionReport(
        params=p, medium=m, without_medium=g0, with_medium=g1,
        max_abs_difference=float(diff.max()),
        max_difference_sigma=float(np.max(diff / sigma)),
        dissimilarity=normalized_l2(traces["I_a_dispersed"], traces["I_a"]),
        proportionality_error=max(q["prop"] for q in parts),
        times=grid.times, traces=traces)
