"""
Nonlocal phase modulation
=========================

Two beams pass through distant sinusoidal phase modulators and the spread
``Delta`` of the summed frequencies ``omega1 + omega2`` is measured.

* Classical anti-correlated narrow-line pulses: every line breaks into
  sidebands ``J_n(m)^2`` independently in each beam, so ``Delta^2`` is a sum of
  positive terms and never vanishes.
* Entangled photons: modulators with equal and opposite phase functions cancel,
  and ``Delta^2`` stays at its unmodulated value.
* A classical source with modulators built in (pre-compensated) can recover
  ``Delta^2 = 0`` with the external modulators on, but then loses the
  anti-correlation when they are off.

Spectra are normalised per beam (sideband weights sum to one), so ``Delta^2``
is a true variance in angular-frequency-squared units.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.special import jv

from .core import (
    FrequencyGrid,
    RandomStream,
    SummaryStats,
    check_edges,
    envelope_to_spectrum,
    map_blocks,
    next_power_of_two,
    spectrum_to_envelope,
    weighted_mean,
)
from .dispersion import BiphotonState

TRUNCATION_TOLERANCE = 1e-10


class TruncationError(ValueError):
    """Too few sidebands kept for the requested depth."""


@dataclass(frozen=True)
class PhaseModulator:
    """``phi(t) = sign * depth * sin(omega_mod * t + phase_offset)``."""

    omega_mod: float
    depth: float
    phase_offset: float = 0.0
    sign: int = 1

    def __post_init__(self):
        if not self.omega_mod > 0:
            raise ValueError("omega_mod must be positive")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def phase(self, t):
        return self.sign * self.depth * np.sin(self.omega_mod * np.asarray(t) + self.phase_offset)

    @property
    def phasor(self) -> complex:
        return self.sign * self.depth * np.exp(1j * self.phase_offset)

    def opposite(self) -> "PhaseModulator":
        """Equal and opposite phase function."""
        return replace(self, sign=-self.sign)

    def off(self) -> "PhaseModulator":
        return replace(self, depth=0.0)


def combine(first: PhaseModulator, second: PhaseModulator) -> PhaseModulator:
    """Single modulator equivalent to two in series at the same frequency."""
    if first.omega_mod != second.omega_mod:
        raise ValueError("can only combine modulators at the same frequency")
    if first.depth == 0:
        return second
    if second.depth == 0:
        return first
    z = first.phasor + second.phasor
    return PhaseModulator(first.omega_mod, float(abs(z)), float(np.angle(z)))


@dataclass(frozen=True)
class SidebandSpectrum:
    """Probability weights ``f[n]`` for lines at offsets ``n * omega_mod``."""

    orders: np.ndarray
    f: np.ndarray
    omega_mod: float

    def mean_square_order(self) -> float:
        return float(np.sum(self.orders ** 2 * self.f))


def default_n_max(depth: float) -> int:
    return int(np.ceil(depth)) + 20


def sideband_coefficients(depth: float, n_max: int | None = None,
                          omega_mod: float = 1.0) -> SidebandSpectrum:
    """Sideband weights ``J_n(depth)^2`` for ``n = -n_max..n_max``, normalised."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    n_max = default_n_max(depth) if n_max is None else int(n_max)
    orders = np.arange(-n_max, n_max + 1)
    f = jv(orders, depth) ** 2
    tail = 1.0 - f.sum()
    if tail > TRUNCATION_TOLERANCE:
        raise TruncationError(f"n_max={n_max} leaves {tail:.2e} of the power outside; "
                              f"use at least {default_n_max(depth)}")
    return SidebandSpectrum(orders, f / f.sum(), omega_mod)


# -- classical sources ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClassicalAnticorrelatedSource:
    """Narrow-line pulse pairs at ``omega_i`` and ``2*omega_bar - omega_i``.

    ``amplitudes`` holds ``(a_i, b_i)`` per pulse type (beam energies; they drop
    out once each beam's spectrum is normalised).  ``precompensation`` is an
    optional pair of modulators acting inside the source.  ``linewidth`` gives
    each line a Gaussian profile of that std, independently in each beam.
    """

    omega_bar: float
    omegas: np.ndarray
    probabilities: np.ndarray
    amplitudes: np.ndarray = None
    precompensation: Optional[tuple[PhaseModulator, PhaseModulator]] = None
    linewidth: float = 0.0

    def __post_init__(self):
        omegas = np.atleast_1d(np.asarray(self.omegas, dtype=float))
        probs = np.atleast_1d(np.asarray(self.probabilities, dtype=float))
        amps = (np.ones((omegas.size, 2)) if self.amplitudes is None
                else np.asarray(self.amplitudes, dtype=float).reshape(-1, 2))
        if not (omegas.size == probs.size == amps.shape[0]):
            raise ValueError("pulse table columns differ in length")
        if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        if np.any(amps <= 0):
            raise ValueError("a_i and b_i must be positive")
        if self.linewidth < 0:
            raise ValueError("linewidth must be >= 0")
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def single_line(cls, omega_bar: float = 0.0, offset: float = 0.0,
                    **kw) -> "ClassicalAnticorrelatedSource":
        return cls(omega_bar, [omega_bar + offset], [1.0], **kw)

    @property
    def detunings(self) -> np.ndarray:
        return self.omegas - self.omega_bar

    def with_precompensation(self, mod1: PhaseModulator,
                             mod2: PhaseModulator) -> "ClassicalAnticorrelatedSource":
        """Copy with internal modulators that undo ``mod1`` and ``mod2``."""
        return ClassicalAnticorrelatedSource(self.omega_bar, self.omegas, self.probabilities,
                                             self.amplitudes, (mod1.opposite(), mod2.opposite()),
                                             self.linewidth)


def net_modulators(mod1: PhaseModulator, mod2: PhaseModulator,
                   source: ClassicalAnticorrelatedSource,
                   modulators_on: bool = True) -> tuple[PhaseModulator, PhaseModulator]:
    """Total modulation seen by each beam, including any inside the source."""
    ext = (mod1, mod2) if modulators_on else (mod1.off(), mod2.off())
    if source.precompensation is None:
        return ext
    return (combine(source.precompensation[0], ext[0]),
            combine(source.precompensation[1], ext[1]))


def _overlap_check(source, omega):
    if source.linewidth >= omega / 4:
        warnings.warn("linewidth >= omega_mod/4: sidebands overlap", stacklevel=3)


def delta_squared_classical(mod1: PhaseModulator, mod2: PhaseModulator,
                            source: ClassicalAnticorrelatedSource,
                            modulators_on: bool = True) -> float:
    """Exact ``Delta^2`` for a classical anti-correlated source, by sideband sums.

    Pulse ``i`` puts beam 1 at ``omega_i + n*Omega`` and beam 2 at
    ``2*omega_bar - omega_i + n'*Omega``, so every pair of sidebands
    contributes ``((n + n') * Omega)^2``.  A finite linewidth adds its
    variance once per beam.
    """
    _overlap_check(source, mod1.omega_mod)
    n1, n2 = net_modulators(mod1, mod2, source, modulators_on)
    s1 = sideband_coefficients(n1.depth)
    s2 = sideband_coefficients(n2.depth)
    omega = mod1.omega_mod
    total = (s1.orders[:, None] + s2.orders[None, :]) * omega
    per_pulse = float(np.sum(s1.f[:, None] * s2.f[None, :] * total ** 2))
    per_pulse += 2 * source.linewidth ** 2
    return float(np.sum(source.probabilities * per_pulse))


def delta_squared_monte_carlo(mod1: PhaseModulator, mod2: PhaseModulator,
                              source: ClassicalAnticorrelatedSource, trials: int,
                              rng: RandomStream, modulators_on: bool = True,
                              threads: int = 1, block_size: int = 1 << 16) -> SummaryStats:
    """Sample measured frequency pairs; the mean of the squared deviations is ``Delta^2``."""
    n1, n2 = net_modulators(mod1, mod2, source, modulators_on)
    s1 = sideband_coefficients(n1.depth)
    s2 = sideband_coefficients(n2.depth)
    omega = mod1.omega_mod
    det = source.detunings
    lw = source.linewidth

    def block(index, start, count):
        gen = rng.block(index)
        i = gen.choice(det.size, size=count, p=source.probabilities)
        k1 = gen.choice(s1.orders, size=count, p=s1.f)
        k2 = gen.choice(s2.orders, size=count, p=s2.f)
        w1 = det[i] + k1 * omega
        w2 = -det[i] + k2 * omega
        if lw > 0:
            w1 = w1 + gen.normal(0.0, lw, count)
            w2 = w2 + gen.normal(0.0, lw, count)
        return (w1 + w2) ** 2

    sq = np.concatenate(map_blocks(block, int(trials), block_size, threads))
    return SummaryStats.from_samples(sq)


# -- entangled photons ----------------------------------------------------------

@dataclass(frozen=True)
class SumDifferenceGrid:
    """Pair amplitude coordinates: sum detuning ``S`` and half-difference ``d``.

    ``eps1 = d + S/2`` and ``eps2 = -d + S/2``; the conjugate times are
    ``T = (t1 + t2)/2`` and ``tau = t1 - t2``.  The ``S`` spacing is
    ``omega_mod / periods`` so the modulation is exactly periodic in ``T``.
    """

    total: FrequencyGrid
    half_difference: FrequencyGrid

    def frequencies(self, omega0: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        """``(omega1, omega2)`` at every grid point, shape ``(n_S, n_d)``."""
        S = self.total.offsets[:, None]
        d = self.half_difference.offsets[None, :]
        return omega0 + d + S / 2, omega0 - d + S / 2


def modulation_grid(s: BiphotonState, mod1: PhaseModulator, mod2: PhaseModulator,
                    periods: int = 32) -> SumDifferenceGrid:
    omega = mod1.omega_mod
    if mod2.omega_mod != omega:
        raise ValueError("modulators must share omega_mod")
    depth = mod1.depth + mod2.depth
    if s.sigma_pump > 0:
        # T window >= 16 envelope widths, envelope std 1/(sqrt(2) sigma_pump)
        periods = max(periods, int(np.ceil(16 / (np.sqrt(2) * s.sigma_pump) * omega / (2 * np.pi))))
    dS = omega / periods
    span_S = 2 * ((depth + 12) * omega + 8 * s.sigma_pump)
    n_S = next_power_of_two(span_S / dS)
    total = FrequencyGrid(n_S, 0.0, n_S * dS)
    half = FrequencyGrid.for_widths(s.sigma_F + total.span / 32, 1 / s.sigma_F)
    return SumDifferenceGrid(total, half)


@dataclass(frozen=True)
class QuantumModulationResult:
    delta_squared: float
    grid: SumDifferenceGrid
    joint_intensity: np.ndarray = field(repr=False)

    @property
    def sum_frequency_density(self) -> tuple[np.ndarray, np.ndarray]:
        g = self.grid
        return g.total.offsets, self.joint_intensity.sum(axis=1) * g.half_difference.spacing


def pair_amplitude(s: BiphotonState, grid: SumDifferenceGrid) -> np.ndarray:
    """Pair amplitude on the sum/difference grid, unit norm."""
    S = grid.total.offsets[:, None]
    d = grid.half_difference.offsets[None, :]
    eps1 = d + S / 2
    psi = np.exp(-eps1 ** 2 / s.sigma_F ** 2) * np.ones_like(S)
    if s.sigma_pump < grid.total.spacing / 4:
        psi = psi * (S == 0)
    else:
        psi = psi * np.exp(-S ** 2 / (2 * s.sigma_pump ** 2))
    check_edges(psi, "pair spectrum", axes=(0, 1))
    return psi / np.sqrt(np.sum(np.abs(psi) ** 2) * grid.total.spacing * grid.half_difference.spacing)


def quantum_modulation(s: BiphotonState, mod1: PhaseModulator, mod2: PhaseModulator,
                       periods: int = 32, grid: SumDifferenceGrid | None = None
                       ) -> QuantumModulationResult:
    """Modulate an entangled pair in the time domain and measure ``Delta^2``.

    The pair amplitude is taken to ``(T, tau)``, multiplied by
    ``exp(i phi1(t1) + i phi2(t2))`` and transformed back; ``Delta^2`` is the
    variance of ``S = eps1 + eps2`` under the joint spectral intensity.
    """
    if s.sigma_F < 10 * mod1.omega_mod or s.sigma_pump > mod1.omega_mod / 2:
        warnings.warn("outside the regime pump bandwidth << omega_mod << sigma_F",
                      stacklevel=2)
    grid = grid if grid is not None else modulation_grid(s, mod1, mod2, periods)
    gS, gd = grid.total, grid.half_difference
    psi = pair_amplitude(s, grid)
    amp_t = spectrum_to_envelope(spectrum_to_envelope(psi, gd).T, gS).T
    check_edges(amp_t, "pair envelope", axes=(1,))
    T = gS.times[:, None]
    tau = gd.times[None, :]
    phase = mod1.phase(T + tau / 2) + mod2.phase(T - tau / 2)
    amp_t = amp_t * np.exp(1j * phase)
    out = envelope_to_spectrum(envelope_to_spectrum(amp_t.T, gS).T, gd)
    inten = np.abs(out) ** 2
    check_edges(np.sqrt(inten), "modulated pair spectrum", axes=(0,))
    S = np.broadcast_to(gS.offsets[:, None], inten.shape)
    mean = weighted_mean(S, inten)
    var = float(np.sum(inten * (S - mean) ** 2) / inten.sum())
    return QuantumModulationResult(var, grid, inten)


def quantum_modulation_oracle(s: BiphotonState, mod1: PhaseModulator,
                              mod2: PhaseModulator) -> float:
    """Semi-analytic ``Delta^2`` for a CW-pumped pair plus the pump variance.

    At fixed ``tau`` the two modulations add to one tone of depth ``M(tau)``,
    whose sidebands carry ``sum n^2 J_n(M)^2 = M^2/2``; averaging over the
    detection-time difference density gives the modulation contribution.
    """
    tau = np.linspace(-12 / s.sigma_F, 12 / s.sigma_F, 4001)
    dens = np.exp(-s.sigma_F ** 2 * tau ** 2 / 2)
    w = mod1.omega_mod
    z = (mod1.phasor * np.exp(1j * w * tau / 2) + mod2.phasor * np.exp(-1j * w * tau / 2))
    mod_term = w ** 2 * np.sum(dens * np.abs(z) ** 2 / 2) / dens.sum()
    return float(mod_term + s.sigma_pump ** 2 / 2)


@dataclass(frozen=True)
class CompensatedSourceReport:
    classical_on: SummaryStats
    classical_off: SummaryStats
    classical_off_exact: float
    quantum_on: Optional[float] = None
    quantum_off: Optional[float] = None


def compensated_source_demo(mod1: PhaseModulator, mod2: PhaseModulator,
                            source: ClassicalAnticorrelatedSource, trials: int,
                            rng: RandomStream, quantum_state: BiphotonState | None = None,
                            threads: int = 1) -> CompensatedSourceReport:
    """Classical source with built-in modulators, external modulators on and off."""
    if source.precompensation is None:
        raise ValueError("source has no internal modulators")
    for inner, outer in zip(source.precompensation, (mod1, mod2)):
        if combine(inner, outer).depth > 1e-12:
            raise ValueError("internal modulators do not cancel the external ones")
    on = delta_squared_monte_carlo(mod1, mod2, source, trials, rng.child(0),
                                   modulators_on=True, threads=threads)
    off = delta_squared_monte_carlo(mod1, mod2, source, trials, rng.child(1),
                                    modulators_on=False, threads=threads)
    exact = delta_squared_classical(mod1, mod2, source, modulators_on=False)
    q_on = q_off = None
    if quantum_state is not None:
        grid = modulation_grid(quantum_state, mod1, mod2)
        q_on = quantum_modulation(quantum_state, mod1, mod2, grid=grid).delta_squared
        q_off = quantum_modulation(quantum_state, mod1.off(), mod2.off(), grid=grid).delta_squared
    return CompensatedSourceReport(on, off, exact, q_on, q_off)
