"""
Franson interferometry
======================

Each photon of a pair meets an unbalanced interferometer with a short path
``S`` and a long path ``L`` (extra delay ``delta_T``, phase ``phi``).  One
output port per side is monitored.

Amplitude model: each path carries amplitude 1/2 into the monitored port, so
per emitted pair

* ``LL`` and ``SS`` arrive together and interfere:
  ``|1 + exp(i(phi1 + phi2))|^2 / 16 = (1 + cos(phi1 + phi2)) / 8``;
* ``LS`` and ``SL`` arrive ``delta_T`` apart with ``1/16`` each.

Averaged over the phase sum the four path pairs give 1/4, the chance that both
photons leave through the monitored ports.

The Ou-Mandel classical model uses two waves with anti-correlated
frequencies ``omega0 +- d_omega`` and random phases.  With the coincidence
rate taken as the product of output intensities, the fringe in
``phi1 + phi2`` has visibility 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import truncnorm

from .core import DispersiveMedium, RandomStream, map_blocks
from .dispersion import BiphotonState, quantum_timing_spread

SHORT, LONG = "S", "L"


class EmptyInputError(ValueError):
    """Operation needs at least one event."""


@dataclass(frozen=True)
class FransonSetup:
    """Two unbalanced interferometers; times in units of the chosen clock."""

    delta_T: float
    phi1: float = 0.0
    phi2: float = 0.0
    tau_c: float = 1.0
    window: float = 1.0

    def __post_init__(self):
        if not self.tau_c > 0:
            raise ValueError("tau_c must be positive")
        if not self.delta_T > 3 * self.tau_c:
            raise ValueError("delta_T must exceed 3 tau_c so LS/SL events are resolvable")
        if not 0 < self.window < self.delta_T / 2:
            raise ValueError("window must lie in (0, delta_T/2)")

    @property
    def phase_sum(self) -> float:
        return self.phi1 + self.phi2

    def with_phases(self, phi1: float, phi2: float) -> "FransonSetup":
        return FransonSetup(self.delta_T, phi1, phi2, self.tau_c, self.window)


@dataclass(frozen=True)
class FransonRates:
    """Probabilities per emitted pair of a coincidence in each time bin."""

    coincident: float
    LS: float
    SL: float

    @property
    def total(self) -> float:
        return self.coincident + self.LS + self.SL

    @property
    def normalized_fringe(self) -> float:
        """Coincident rate relative to its maximum, 1/4."""
        return 4 * self.coincident


def coincident_rate(phi1, phi2):
    """``(1 + cos(phi1 + phi2)) / 8``; broadcasts over arrays."""
    return (1 + np.cos(np.add(phi1, phi2))) / 8


def quantum_coincidence_rate(setup: FransonSetup) -> FransonRates:
    return FransonRates(float(coincident_rate(setup.phi1, setup.phi2)), 1 / 16, 1 / 16)


def phase_scan(n_phases: int) -> np.ndarray:
    """``n_phases`` equally spaced phase sums over one period, starting at 0."""
    if n_phases < 2:
        raise ValueError("need at least two phases")
    return np.linspace(0, 2 * np.pi, n_phases, endpoint=False)


def quantum_fringe(n_phases: int = 32) -> tuple[np.ndarray, np.ndarray]:
    phis = phase_scan(n_phases)
    return phis, coincident_rate(phis, 0.0)


def visibility(rate: np.ndarray) -> float:
    """``(max - min) / (max + min)`` of a sampled fringe."""
    hi, lo = float(np.max(rate)), float(np.min(rate))
    return (hi - lo) / (hi + lo)


def quantum_visibility(n_phases: int = 32) -> float:
    return visibility(quantum_fringe(n_phases)[1])


# -- event records --------------------------------------------------------------

@dataclass(frozen=True)
class EventRecord:
    t1: np.ndarray
    t2: np.ndarray
    path1: np.ndarray
    path2: np.ndarray
    accepted: np.ndarray

    def __len__(self) -> int:
        return self.t1.size

    def subset(self, mask) -> "EventRecord":
        return EventRecord(self.t1[mask], self.t2[mask], self.path1[mask],
                           self.path2[mask], self.accepted[mask])

    @property
    def labels(self) -> np.ndarray:
        return np.char.add(self.path1.astype("U1"), self.path2.astype("U1"))


def make_events(t1, t2, path1, path2, window: float) -> EventRecord:
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    return EventRecord(t1, t2, np.asarray(path1, dtype="U1"), np.asarray(path2, dtype="U1"),
                       np.abs(t1 - t2) <= window)


def sample_quantum_events(setup: FransonSetup, n: int, rng: RandomStream,
                          emission_span: float = 1e6) -> EventRecord:
    """Coincidences drawn from the amplitude model.

    The LL+SS class is labelled LL or SS with equal odds (the labels are
    bookkeeping; the two are indistinguishable).  Each photon's detection
    time gets jitter of std ``tau_c/sqrt(2)``, truncated at
    ``+-(delta_T - window)/2`` so that no LS or SL pair can land inside the
    window.
    """
    if n < 1:
        raise EmptyInputError("n must be >= 1")
    gen = rng.generator()
    r = quantum_coincidence_rate(setup)
    p = np.array([r.coincident / 2, r.coincident / 2, r.LS, r.SL]) / r.total
    kind = gen.choice(4, size=n, p=p)
    path1 = np.where((kind == 0) | (kind == 2), LONG, SHORT)
    path2 = np.where((kind == 0) | (kind == 3), LONG, SHORT)
    t0 = gen.uniform(0, emission_span, n)
    scale = setup.tau_c / np.sqrt(2)
    cut = (setup.delta_T - setup.window) / 2 / scale
    jitter = truncnorm.rvs(-cut, cut, scale=scale, size=(2, n), random_state=gen)
    t1 = t0 + np.where(path1 == LONG, setup.delta_T, 0.0) + jitter[0]
    t2 = t0 + np.where(path2 == LONG, setup.delta_T, 0.0) + jitter[1]
    return make_events(t1, t2, path1, path2, setup.window)


def post_select(events: EventRecord, window: float | None = None) -> tuple[EventRecord, float]:
    """Keep events with ``|t1 - t2| <= window``; returns them and the accepted fraction."""
    if len(events) == 0:
        raise EmptyInputError("no events to post-select")
    keep = events.accepted if window is None else np.abs(events.t1 - events.t2) <= window
    return events.subset(keep), float(np.mean(keep))


# -- Ou-Mandel classical model -------------------------------------------------

def _interferometer_output(phase, omega, delta_T, theta):
    """Monitored-port field for a unit wave: half via S plus half via L."""
    e = np.exp(1j * theta)
    return (e + e * np.exp(1j * (phase - omega * delta_T))) / 2


def _ou_mandel_intensities(gen, count, setup, phi1, phi2):
    """Output intensities of both sides for ``count`` trials at each phase pair.

    The carrier phase ``2 omega0 delta_T`` is absorbed into the phase
    settings, so only the detuning ``d_omega`` enters.
    """
    d_omega = gen.normal(0.0, 1 / setup.tau_c, count)[:, None]
    theta = gen.uniform(0, 2 * np.pi, (2, count, 1))
    i1 = np.abs(_interferometer_output(phi1, d_omega, setup.delta_T, theta[0])) ** 2
    i2 = np.abs(_interferometer_output(phi2, -d_omega, setup.delta_T, theta[1])) ** 2
    return i1, i2


@dataclass(frozen=True)
class OuMandelResult:
    phi_sum: np.ndarray
    rate: np.ndarray
    rate_error: np.ndarray
    visibility: float
    visibility_error: float
    marginal: np.ndarray
    marginal_error: np.ndarray
    fit: np.ndarray
    trials: int

    @property
    def marginal_modulation(self) -> float:
        """Fitted relative cosine amplitude of the single-side intensity vs ``phi1``."""
        return _fringe_visibility(self.marginal, self.phi_sum)


def _design(phis):
    return np.column_stack([np.ones_like(phis), np.cos(phis), np.sin(phis)])


def _fringe_visibility(rate, phis):
    c = np.linalg.lstsq(_design(phis), rate, rcond=None)[0]
    return float(np.hypot(c[1], c[2]) / c[0])


def _delta_method(func, mean, cov, n, step=1e-7):
    """Standard error of ``func(mean)`` from the covariance of the per-trial vector."""
    grad = np.empty(mean.size)
    for k in range(mean.size):
        e = np.zeros(mean.size)
        e[k] = step
        grad[k] = (func(mean + e) - func(mean - e)) / (2 * step)
    return float(np.sqrt(max(grad @ cov @ grad, 0.0) / n))


def _accumulate(parts):
    """Ordered sums of per-block ``(n, sum, sum of outer products)``."""
    n = sum(q[0] for q in parts)
    s = sum(q[1] for q in parts)
    ss = sum(q[2] for q in parts)
    mean = s / n
    cov = (ss - n * np.outer(mean, mean)) / (n - 1)
    return n, mean, cov


def ou_mandel_simulate(setup: FransonSetup, trials: int, rng: RandomStream,
                       n_phases: int = 32, threads: int = 1,
                       block_size: int = 1 << 14) -> OuMandelResult:
    """Monte Carlo fringe of the Ou-Mandel model, scanned over ``phi1`` with ``phi2 = 0``.

    The same trials are used at every phase, so the fringe fit is linear in
    per-trial quantities; its errors come from their sample covariance.
    """
    if trials < 10_000:
        raise ValueError("ou_mandel_simulate needs at least 1e4 trials")
    phis = phase_scan(n_phases)
    proj = np.linalg.pinv(_design(phis))

    def block(index, start, count):
        i1, i2 = _ou_mandel_intensities(rng.block(index), count, setup, phis[None, :], 0.0)
        rate = i1 * i2
        v = np.hstack([rate @ proj.T, rate, i1])
        return count, v.sum(axis=0), v.T @ v

    n, mean, cov = _accumulate(map_blocks(block, trials, block_size, threads))
    c = mean[:3]
    rate = mean[3:3 + n_phases]
    marg = mean[3 + n_phases:]
    var = np.diag(cov)
    nu = float(np.hypot(c[1], c[2]) / c[0])
    nu_err = _delta_method(lambda x: np.hypot(x[1], x[2]) / x[0], c, cov[:3, :3], n)
    return OuMandelResult(phis, rate, np.sqrt(var[3:3 + n_phases] / n), nu, nu_err,
                          marg, np.sqrt(var[3 + n_phases:] / n), c, n)


def ou_mandel_rate(phi_sum):
    """Analytic Ou-Mandel coincidence rate per unit intensities, ``(1 + cos/2) / 4``."""
    return (1 + np.cos(phi_sum) / 2) / 4


# -- Bell correlator and CHSH ---------------------------------------------------

@dataclass(frozen=True)
class CorrelationFunction:
    """Bell correlator ``E(phi1, phi2)`` with a tag naming its origin."""

    evaluate: Callable[[float, float], float]
    tag: str

    def __post_init__(self):
        if self.tag not in ("quantum", "classical-model"):
            raise ValueError("tag must be 'quantum' or 'classical-model'")

    def __call__(self, phi1: float, phi2: float) -> float:
        e = float(self.evaluate(phi1, phi2))
        if abs(e) > 1 + 1e-12:
            raise ValueError(f"|E| = {abs(e):.6g} exceeds 1")
        return e

    @classmethod
    def from_rates(cls, rate: Callable, tag: str) -> "CorrelationFunction":
        """``(R(phi1, phi2) - R(phi1 + pi, phi2)) / (R(phi1, phi2) + R(phi1 + pi, phi2))``."""
        def e(p1, p2):
            a, b = rate(p1, p2), rate(p1 + np.pi, p2)
            return (a - b) / (a + b)
        return cls(e, tag)

    @classmethod
    def from_table(cls, table: dict, tag: str) -> "CorrelationFunction":
        return cls(lambda p1, p2: table[(p1, p2)], tag)


def quantum_correlation() -> CorrelationFunction:
    return CorrelationFunction.from_rates(coincident_rate, "quantum")


def ou_mandel_correlation() -> CorrelationFunction:
    return CorrelationFunction.from_rates(lambda p1, p2: ou_mandel_rate(p1 + p2),
                                          "classical-model")


CHSH_SETTINGS = (0.0, -np.pi / 2, np.pi / 4, -np.pi / 4)  # a, a', b, b'


def chsh(E: CorrelationFunction, a: float, a_prime: float, b: float, b_prime: float) -> float:
    """``|E(a,b) + E(a,b') + E(a',b) - E(a',b')|``."""
    return abs(E(a, b) + E(a, b_prime) + E(a_prime, b) - E(a_prime, b_prime))


def _setting_pairs(a, a_prime, b, b_prime):
    return [(a, b), (a, b_prime), (a_prime, b), (a_prime, b_prime)]


def _chsh_from_rates(x):
    r = x.reshape(4, 2)
    e = (r[:, 0] - r[:, 1]) / (r[:, 0] + r[:, 1])
    return abs(e[0] + e[1] + e[2] - e[3])


@dataclass(frozen=True)
class CHSHResult:
    settings: tuple
    E: dict
    S: float
    std_error: float = 0.0


def chsh_quantum(settings=CHSH_SETTINGS) -> CHSHResult:
    E = quantum_correlation()
    pairs = _setting_pairs(*settings)
    return CHSHResult(tuple(settings), {p: E(*p) for p in pairs}, chsh(E, *settings))


def ou_mandel_chsh(setup: FransonSetup, trials: int, rng: RandomStream,
                   settings=CHSH_SETTINGS, threads: int = 1,
                   block_size: int = 1 << 14) -> CHSHResult:
    """Monte Carlo CHSH value of the Ou-Mandel model with a delta-method error."""
    pairs = _setting_pairs(*settings)
    p1 = np.array([[p[0], p[0] + np.pi] for p in pairs]).ravel()
    p2 = np.array([[p[1], p[1]] for p in pairs]).ravel()

    def block(index, start, count):
        i1, i2 = _ou_mandel_intensities(rng.block(index), count, setup, p1[None, :], p2[None, :])
        v = i1 * i2
        return count, v.sum(axis=0), v.T @ v

    n, mean, cov = _accumulate(map_blocks(block, trials, block_size, threads))
    r = mean.reshape(4, 2)
    table = {p: float((x - y) / (x + y)) for p, (x, y) in zip(pairs, r)}
    E = CorrelationFunction.from_table(table, "classical-model")
    return CHSHResult(tuple(settings), table, chsh(E, *settings),
                      _delta_method(_chsh_from_rates, mean, cov, n))


# -- classical-field visibility bound -------------------------------------------

@dataclass(frozen=True)
class CoincidenceProfile:
    """Gaussian coincidence rate versus detection-time offset, peak 1."""

    tau_c: float
    width: float

    def __call__(self, dt):
        return np.exp(-np.asarray(dt) ** 2 / (2 * self.width ** 2))


def coincidence_profile_no_interferometers(tau_c: float) -> CoincidenceProfile:
    """Profile whose width is the numeric timing-difference spread of a pair with ``sigma_F = 1/tau_c``."""
    if not tau_c > 0:
        raise ValueError("tau_c must be positive")
    width = quantum_timing_spread(BiphotonState(1 / tau_c), DispersiveMedium(), DispersiveMedium()).std
    return CoincidenceProfile(tau_c, width)


def classical_visibility_bound(profile: CoincidenceProfile, delta_T: float) -> float:
    """``R(delta_T) / (R(0) + R(delta_T))``."""
    r0, r = profile(0.0), profile(delta_T)
    return float(r / (r0 + r))


@dataclass(frozen=True)
class InequalityReport:
    delta_t_over_tau: float
    bound: float
    nu: float
    std_error: float
    violated: bool


def violation_report(profile: CoincidenceProfile, delta_T: float, nu: float,
                     std_error: float = 0.0, k: float = 3.0) -> InequalityReport:
    """Flag ``nu`` as violating the classical-field bound when ``nu - k*se`` exceeds it."""
    bound = classical_visibility_bound(profile, delta_T)
    return InequalityReport(delta_T / profile.tau_c, bound, float(nu), float(std_error),
                            bool(nu - k * std_error > bound))
