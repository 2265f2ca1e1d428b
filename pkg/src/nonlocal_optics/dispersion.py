"""
Nonlocal dispersion cancellation
================================

Energy-time entangled photon pairs sent through two distant dispersive media,
next to a classical source of anti-correlated short pulses.

Bandwidth conventions
---------------------
``sigma_F`` is the 1/e half-width of the single-photon spectral *amplitude*:
the pair amplitude along the energy-conserving line is
``exp(-eps**2 / sigma_F**2)`` (the square of ``exp(-eps**2 / (2 sigma_F**2))``).
This is the convention in which the spread of detection-time differences is
exactly ``sqrt(1/sigma_F**2 + (beta1 + beta2)**2 L**2 sigma_F**2)``.  The
single-photon intensity spectrum then has standard deviation ``sigma_F / 2``.

For the classical pulse train, ``sigma_p`` is the standard deviation of each
pulse's intensity spectrum, so an undispersed pulse has temporal intensity
standard deviation ``1 / (2 sigma_p)`` and the undispersed detection-time
difference of two pulses has spread ``1 / (sqrt(2) sigma_p)``.

All timing spreads are computed from intensity-weighted detection-time
densities (ideal single-photon detectors), not from field amplitudes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    DispersiveMedium,
    FrequencyGrid,
    RandomStream,
    SummaryStats,
    UnsupportedConfigurationError,
    check_edges,
    gaussian_spectrum,
    inverse_cdf_rows,
    map_blocks,
    spectrum_to_envelope,
    weighted_mean,
    weighted_std,
)


def sigma_T_closed_form(s: "BiphotonState", m1: DispersiveMedium,
                        m2: DispersiveMedium) -> float:
    """Spread of detection-time differences for entangled photons (CW pump)."""
    L = _common_length(m1, m2)
    sf = s.sigma_F
    return float(np.sqrt(1 / sf ** 2 + (m1.beta + m2.beta) ** 2 * L ** 2 * sf ** 2))


def sigma_C_closed_form(sigma_F: float, m1: DispersiveMedium,
                        m2: DispersiveMedium) -> float:
    """Spread of detection-time differences quoted for two classical pulses.

    The dispersion coefficients enter squared and then summed.
    """
    L = _common_length(m1, m2)
    return float(np.sqrt(1 / (2 * sigma_F ** 2)
                         + (m1.beta ** 2 + m2.beta ** 2) * L ** 2 * sigma_F ** 2))


def chirped_pulse_width(sigma_p: float, m: DispersiveMedium) -> float:
    """Temporal intensity std of a transform-limited Gaussian after ``m``.

    Exact for the phase ``beta * eps**2 * L`` (group-delay dispersion
    ``2 beta L``) applied to a pulse whose intensity spectrum has std
    ``sigma_p``.
    """
    return float(np.sqrt(1 / (4 * sigma_p ** 2) + 4 * m.beta ** 2 * m.length ** 2 * sigma_p ** 2))


def _common_length(m1: DispersiveMedium, m2: DispersiveMedium) -> float:
    if m1.length != m2.length:
        raise UnsupportedConfigurationError(
            "closed forms assume equal medium lengths; use the numeric path "
            f"(got {m1.length} and {m2.length})")
    return m1.length


# -- entangled pairs ----------------------------------------------------------

@dataclass(frozen=True)
class BiphotonState:
    """Photon pair from down-conversion of a (near) CW pump.

    ``sigma_pump`` is the 1/e half-width of the pump amplitude in the sum
    frequency; 0 means an ideal CW pump, represented as support on the
    single anti-diagonal of the grid.
    """

    sigma_F: float
    sigma_pump: float = 0.0
    omega0: float = 0.0
    grid1: Optional[FrequencyGrid] = None
    grid2: Optional[FrequencyGrid] = None

    def __post_init__(self):
        if not self.sigma_F > 0:
            raise ValueError("sigma_F must be positive")
        if self.sigma_pump < 0:
            raise ValueError("sigma_pump must be >= 0")
        if self.sigma_pump > self.sigma_F / 10:
            warnings.warn("sigma_pump > sigma_F/10: outside the narrow-pump regime",
                          stacklevel=2)
        if (self.grid1 is None) != (self.grid2 is None):
            raise ValueError("give both grids or neither")
        if self.grid1 is not None:
            if (self.grid1.n_points, self.grid1.span) != (self.grid2.n_points, self.grid2.span):
                raise ValueError("both arms need the same grid size and span")

    def with_grid_for(self, m1: DispersiveMedium, m2: DispersiveMedium) -> "BiphotonState":
        """Copy of the state with grids sized for propagation through ``m1, m2``."""
        grid = biphoton_grid(self.sigma_F, m1, m2, self.omega0, cw=self.sigma_pump == 0)
        return BiphotonState(self.sigma_F, self.sigma_pump, self.omega0, grid, grid)

    @property
    def grids(self) -> tuple[FrequencyGrid, FrequencyGrid]:
        if self.grid1 is None:
            g = biphoton_grid(self.sigma_F, DispersiveMedium(), DispersiveMedium(), self.omega0)
            return g, g
        return self.grid1, self.grid2


def biphoton_grid(sigma_F: float, m1: DispersiveMedium, m2: DispersiveMedium,
                  omega0: float = 0.0, cw: bool = False) -> FrequencyGrid:
    """Grid with span 16 sigma_F and duration 16x the widest expected spread.

    With ``cw`` the amplitude lives on the anti-diagonal, its transform depends
    on ``t1 - t2`` only, and the window just has to hold the spread of the
    difference, set by the net dispersion.  Otherwise the window is sized for
    the individually chirped photons.
    """
    if cw:
        b = abs(m1.beta * m1.length + m2.beta * m2.length)
    else:
        b = abs(m1.beta) * m1.length + abs(m2.beta) * m2.length
    width = np.sqrt(1 / sigma_F ** 2 + b ** 2 * sigma_F ** 2)
    delay = abs(m1.alpha * m1.length - m2.alpha * m2.length)
    return FrequencyGrid.for_widths(sigma_F, width + delay / 8, center=omega0)


@dataclass(frozen=True, eq=False)
class JointSpectralAmplitude:
    """Pair amplitude ``psi[i, j]`` at detunings ``grid1.offsets[i], grid2.offsets[j]``."""

    values: np.ndarray
    grid1: FrequencyGrid
    grid2: FrequencyGrid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid1.n_points, self.grid2.n_points):
            raise ValueError("values shape does not match the grids")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        return float(self.intensity.sum() * self.grid1.spacing * self.grid2.spacing)

    def marginal(self, arm: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Single-photon spectral density of ``arm`` (detuning, density)."""
        if arm == 1:
            return self.grid1.offsets, self.intensity.sum(axis=1) * self.grid2.spacing
        return self.grid2.offsets, self.intensity.sum(axis=0) * self.grid1.spacing

    def frequency_covariance(self) -> float:
        e1, e2 = np.meshgrid(self.grid1.offsets, self.grid2.offsets, indexing="ij")
        w = self.intensity
        m1, m2 = weighted_mean(e1, w), weighted_mean(e2, w)
        return float(np.sum(w * (e1 - m1) * (e2 - m2)) / w.sum())


def make_biphoton(s: BiphotonState) -> JointSpectralAmplitude:
    """Energy-conserving pair amplitude, normalised to unit probability."""
    g1, g2 = s.grids
    e1 = g1.offsets
    n = g1.n_points
    amp1 = np.exp(-e1 ** 2 / s.sigma_F ** 2)
    psi = np.zeros((n, n), dtype=complex)
    if s.sigma_pump < g1.spacing / 4:
        # ideal CW pump: eps2 = -eps1 exactly on the anti-diagonal j = n - i
        i = np.arange(1, n)
        psi[i, n - i] = amp1[i]
    else:
        total = e1[:, None] + g2.offsets[None, :]
        psi = amp1[:, None] * np.exp(-total ** 2 / (2 * s.sigma_pump ** 2))
    check_edges(psi, "pair spectrum", axes=(0, 1))
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * g1.spacing * g2.spacing)
    return JointSpectralAmplitude(psi, g1, g2)


def propagate_biphoton(jsa: JointSpectralAmplitude, m1: DispersiveMedium,
                       m2: DispersiveMedium) -> JointSpectralAmplitude:
    """Apply ``exp(i k1 L1) exp(i k2 L2)``.

    Each photon's wave vector is expanded in its own detuning
    ``eps_j = omega_j - omega0``.  Written in terms of photon 1's detuning
    (``eps2 = -eps1``) this is the familiar ``k2 = k0 - alpha2 eps + beta2 eps^2``.
    """
    if m1.length == 0 and m2.length == 0:
        return jsa
    p1 = np.exp(1j * m1.phase(jsa.grid1.offsets))
    p2 = np.exp(1j * m2.phase(jsa.grid2.offsets))
    return JointSpectralAmplitude(jsa.values * p1[:, None] * p2[None, :], jsa.grid1, jsa.grid2)


def timing_difference_distribution(jsa: JointSpectralAmplitude) -> tuple[np.ndarray, np.ndarray]:
    """Probability density of ``t1 - t2`` from the joint temporal intensity.

    The 2-D transform lives on a periodic time grid, so differences are
    accumulated modulo the window and reported on ``[-T/2, T/2)``.
    """
    g1, g2 = jsa.grid1, jsa.grid2
    if g1.dt != g2.dt:
        raise ValueError("arms need equal time spacing")
    psi_t = spectrum_to_envelope(jsa.values, g2)            # transform along t2
    psi_t = spectrum_to_envelope(psi_t.T, g1).T              # then along t1
    inten = np.abs(psi_t) ** 2
    n = g1.n_points
    k = np.arange(n)
    diff = (k[:, None] - k[None, :]) % n
    dens = np.bincount(diff.ravel(), weights=inten.ravel(), minlength=n)
    dens = np.roll(dens, n // 2)                              # index n//2 is tau = 0
    tau = (np.arange(n) - n // 2) * g1.dt
    check_edges(np.sqrt(dens), "detection-time difference")
    dens = dens / (dens.sum() * g1.dt)
    return tau, dens


def timing_difference_quantum(jsa: JointSpectralAmplitude) -> SummaryStats:
    """Spread of ``t1 - t2`` for the pair, computed by quadrature."""
    tau, dens = timing_difference_distribution(jsa)
    return SummaryStats.exact(weighted_mean(tau, dens), weighted_std(tau, dens), tau.size)


def quantum_timing_spread(s: BiphotonState, m1: DispersiveMedium,
                          m2: DispersiveMedium) -> SummaryStats:
    """Build, propagate and measure a pair on a grid sized for the media."""
    state = s if s.grid1 is not None else s.with_grid_for(m1, m2)
    return timing_difference_quantum(propagate_biphoton(make_biphoton(state), m1, m2))


# -- classical pulse train ----------------------------------------------------

@dataclass(frozen=True)
class PulseTrainModel:
    """Two lasers emitting pulses at ``omega0 + d_i`` and ``omega0 - d_i``.

    ``d_i`` is Gaussian with std ``sigma_D`` and redrawn for every pulse.
    """

    sigma_p: float
    sigma_D: float = 0.0
    omega0: float = 0.0
    n_pulses: int = 100_000

    def __post_init__(self):
        if not self.sigma_p > 0:
            raise ValueError("sigma_p must be positive")
        if self.sigma_D < 0:
            raise ValueError("sigma_D must be >= 0")
        if self.n_pulses < 2:
            raise ValueError("n_pulses must be >= 2")

    @property
    def time_averaged_bandwidth(self) -> float:
        return float(np.hypot(self.sigma_p, self.sigma_D))


@dataclass(frozen=True)
class PulseTrainResult:
    stats: SummaryStats
    arm_widths: tuple[float, float]
    slope: float
    slope_error: float
    detunings: np.ndarray
    differences: np.ndarray


def pulse_grid(sigma_p: float, m1: DispersiveMedium, m2: DispersiveMedium) -> FrequencyGrid:
    """Per-pulse grid around the pulse carrier, wide enough for either arm."""
    width = max(chirped_pulse_width(sigma_p, m1), chirped_pulse_width(sigma_p, m2))
    return FrequencyGrid.for_widths(sigma_p, width)


def propagate_pulses(carriers: np.ndarray, sigma_p: float, m: DispersiveMedium,
                     grid: FrequencyGrid) -> tuple[np.ndarray, np.ndarray]:
    """Envelopes of Gaussian pulses at detunings ``carriers`` after ``m``.

    Each pulse is resolved on ``grid`` centred on its own carrier, while the
    medium stays expanded about ``omega0``.  The time window of each pulse is
    centred on the medium's group delay at that carrier (a moving frame).

    Returns ``(time_origins, envelopes)`` with one row per carrier.
    """
    carriers = np.asarray(carriers, dtype=float)
    amp = gaussian_spectrum(grid, sigma_p) * np.ones((carriers.size, 1))
    eps = carriers[:, None] + grid.offsets[None, :]
    amp = amp * np.exp(1j * m.phase(eps))
    origins = m.group_delay(carriers)
    env = spectrum_to_envelope(amp, grid, origins)
    check_edges(env, "dispersed pulse")
    return origins, env


def _detect(carriers, sigma_p, m, grid, gen, k):
    """Detection times for pulses at ``carriers``; ``k`` per pulse."""
    uniq, inv = np.unique(carriers, return_inverse=True)
    origins, env = propagate_pulses(uniq, sigma_p, m, grid)
    inten = np.abs(env) ** 2
    cdf = np.cumsum(inten, axis=1)
    cdf /= cdf[:, -1:]
    cdf[:, -1] = 1.0
    u = gen.random((carriers.size, k))
    idx = inverse_cdf_rows(cdf[inv], u)
    return origins[inv][:, None] + grid.times[idx]


def simulate_pulse_train(model: PulseTrainModel, m1: DispersiveMedium, m2: DispersiveMedium,
                         detections_per_pulse: int = 1, rng: RandomStream | None = None,
                         threads: int = 1, block_size: int = 4096,
                         grid: FrequencyGrid | None = None) -> PulseTrainResult:
    """Monte Carlo of detection-time differences for the classical pulse train.

    Per pulse: draw the detuning, propagate a transform-limited Gaussian pulse
    through each medium, then draw ``detections_per_pulse`` detection times per
    arm from the arm's intensity.  Returns the pooled spread of ``t1 - t2``, the
    numeric width of each dispersed pulse and the slope of ``t1 - t2`` against
    the detuning.
    """
    rng = rng if rng is not None else RandomStream(0)
    k = int(detections_per_pulse)
    if k < 1:
        raise ValueError("detections_per_pulse must be >= 1")
    grid = grid if grid is not None else pulse_grid(model.sigma_p, m1, m2)

    def block(index, start, count):
        gen = rng.block(index)
        d = gen.normal(0.0, model.sigma_D, count)
        t1 = _detect(d, model.sigma_p, m1, grid, gen, k)
        t2 = _detect(-d, model.sigma_p, m2, grid, gen, k)
        return d, t1 - t2

    parts = map_blocks(block, model.n_pulses, block_size, threads)
    d = np.concatenate([p[0] for p in parts])
    diff = np.concatenate([p[1] for p in parts])

    widths = []
    for m in (m1, m2):
        _, env = propagate_pulses(np.zeros(1), model.sigma_p, m, grid)
        widths.append(weighted_std(grid.times, np.abs(env[0]) ** 2))

    slope, slope_err = np.nan, np.nan
    if model.sigma_D > 0:
        x = np.repeat(d, k)
        y = diff.ravel()
        xc = x - x.mean()
        sxx = np.sum(xc ** 2)
        slope = float(np.sum(xc * (y - y.mean())) / sxx)
        resid = y - y.mean() - slope * xc
        slope_err = float(np.sqrt(np.sum(resid ** 2) / (y.size - 2) / sxx))
    return PulseTrainResult(SummaryStats.from_samples(diff), (widths[0], widths[1]),
                            slope, slope_err, d, diff)


# -- side-by-side comparison --------------------------------------------------

@dataclass(frozen=True)
class WidthComparison:
    quantum_width: float
    classical_width: float
    classical_error: float
    classical_bandwidth: float

    @property
    def ratio(self) -> float:
        """Classical over quantum correlation width."""
        return self.classical_width / self.quantum_width


def correlation_width_comparison(model: PulseTrainModel, s: BiphotonState,
                                 m1: DispersiveMedium, m2: DispersiveMedium,
                                 rng: RandomStream | None = None,
                                 threads: int = 1) -> WidthComparison:
    """Quantum versus classical spread of detection-time differences.

    The classical source should have the same time-averaged bandwidth as the
    photons; a warning is issued when they differ by more than 10%.
    """
    bw = model.time_averaged_bandwidth
    if abs(bw - s.sigma_F) > 0.1 * s.sigma_F:
        warnings.warn(f"classical bandwidth {bw:.3g} differs from sigma_F {s.sigma_F:.3g}",
                      stacklevel=2)
    q = quantum_timing_spread(s, m1, m2)
    c = simulate_pulse_train(model, m1, m2, rng=rng, threads=threads)
    return WidthComparison(q.std, c.stats.std, c.stats.std_std_error, bw)

