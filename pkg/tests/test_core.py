import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocal_optics.core import (
    FREQUENCY,
    TIME,
    AliasingError,
    ComplexField,
    DegenerateWeightsError,
    DispersiveMedium,
    DomainMismatchError,
    FrequencyGrid,
    RandomStream,
    SummaryStats,
    apply_spectral_phase,
    check_edges,
    gaussian_spectrum,
    map_blocks,
    next_power_of_two,
    sample_from_intensity,
    to_freq_domain,
    to_time_domain,
    weighted_mean,
    weighted_std,
)


def gaussian_field(n=512, std=1.0, span=20.0, detuning=0.0):
    g = FrequencyGrid(n, 0.0, span)
    return ComplexField(g, gaussian_spectrum(g, std, detuning), FREQUENCY)


def time_std(f):
    t = to_time_domain(f)
    return weighted_std(t.axis, t.intensity)


def test_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        FrequencyGrid(100, 0.0, 1.0)
    with pytest.raises(ValueError):
        FrequencyGrid(32, 0.0, 1.0)
    with pytest.raises(ValueError):
        FrequencyGrid(64, 0.0, 0.0)


def test_grid_axes_are_conjugate():
    g = FrequencyGrid(256, 3.0, 16.0)
    assert g.offsets[128] == 0.0
    assert g.frequencies[128] == 3.0
    assert g.dt == pytest.approx(2 * np.pi / 16.0)
    assert g.duration == pytest.approx(g.n_points * g.dt)
    assert g.times[128] == 0.0


def test_next_power_of_two():
    assert next_power_of_two(1) == 64
    assert next_power_of_two(65) == 128
    assert next_power_of_two(1024) == 1024


def test_field_values_read_only():
    f = gaussian_field()
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_domain_mismatch():
    f = gaussian_field()
    with pytest.raises(DomainMismatchError):
        to_freq_domain(f)
    with pytest.raises(DomainMismatchError):
        apply_spectral_phase(to_time_domain(f), DispersiveMedium(beta=1, length=1))


@settings(max_examples=30, deadline=None)
@given(std=st.floats(0.3, 2.0), detuning=st.floats(-2, 2))
def test_transform_round_trip_and_parseval(std, detuning):
    f = gaussian_field(std=std, detuning=detuning)
    t = to_time_domain(f)
    assert t.power() == pytest.approx(f.power(), rel=1e-12)
    back = to_freq_domain(t)
    assert np.allclose(back.values, f.values, atol=1e-12)


def test_transform_limited_width():
    # intensity-spectrum std sigma -> temporal intensity std 1/(2 sigma)
    for s in (0.5, 1.0, 2.0):
        f = gaussian_field(n=1024, std=s, span=24 * s)
        assert time_std(f) == pytest.approx(1 / (2 * s), rel=1e-9)


def test_group_delay_moves_envelope():
    f = gaussian_field()
    t = to_time_domain(apply_spectral_phase(f, DispersiveMedium(alpha=2.0, length=1.5)))
    assert weighted_mean(t.axis, t.intensity) == pytest.approx(3.0, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(beta=st.floats(-1.5, 1.5), length=st.floats(0.0, 2.0), std=st.floats(0.5, 1.5))
def test_chirped_width_oracle(beta, length, std):
    f = gaussian_field(n=2048, std=std, span=24 * std)
    m = DispersiveMedium(beta=beta, length=length)
    expected = np.sqrt(1 / (4 * std ** 2) + 4 * beta ** 2 * length ** 2 * std ** 2)
    assert time_std(apply_spectral_phase(f, m)) == pytest.approx(expected, rel=1e-6)


def test_spectral_phase_preserves_intensity():
    f = gaussian_field()
    g = apply_spectral_phase(f, DispersiveMedium(1.0, 0.7, 2.0))
    assert np.allclose(np.abs(g.values), np.abs(f.values), rtol=1e-14, atol=0)
    assert apply_spectral_phase(f, DispersiveMedium()) is f


def test_time_origin_frame():
    f = gaussian_field()
    # the window moves; the pulse stays at absolute time 0
    moved = ComplexField(f.grid, f.values, FREQUENCY, time_origin=5.0)
    b = to_time_domain(moved)
    assert b.axis[256] == 5.0
    assert weighted_mean(b.axis, b.intensity) == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(to_freq_domain(b).values, f.values, atol=1e-12)


def test_check_edges_raises():
    x = np.ones(64)
    with pytest.raises(AliasingError):
        check_edges(x, "flat")
    check_edges(np.exp(-np.linspace(-10, 10, 64) ** 2), "narrow")


def test_weighted_stats():
    v = np.array([0.0, 1.0, 2.0])
    w = np.array([1.0, 2.0, 1.0])
    assert weighted_mean(v, w) == 1.0
    assert weighted_std(v, w) == pytest.approx(np.sqrt(0.5))
    with pytest.raises(DegenerateWeightsError):
        weighted_std(v, np.zeros(3))


def test_summary_stats_errors_are_floats():
    s = SummaryStats.from_samples(np.random.default_rng(0).normal(size=10_000))
    assert isinstance(s.std_error, float) and isinstance(s.std_std_error, float)
    # std of std for a normal sample is std/sqrt(2n)
    assert s.std_std_error == pytest.approx(1 / np.sqrt(2 * 10_000), rel=0.05)
    z = SummaryStats.from_samples(np.zeros(10))
    assert (z.mean, z.std, z.std_error) == (0.0, 0.0, 0.0)


def test_random_stream_reproducible_and_independent():
    a = RandomStream(5).block(3).random(4)
    b = RandomStream(5).block(3).random(4)
    c = RandomStream(5).block(4).random(4)
    d = RandomStream(5, 1).block(3).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
    with pytest.raises(ValueError):
        RandomStream(-1)


@pytest.mark.parametrize("threads", [1, 2, 5])
def test_map_blocks_order_independent_of_threads(threads):
    rs = RandomStream(11)
    ref = map_blocks(lambda i, s, c: rs.block(i).random(c), 1000, 64, 1)
    out = map_blocks(lambda i, s, c: rs.block(i).random(c), 1000, 64, threads)
    assert np.array_equal(np.concatenate(ref), np.concatenate(out))
    assert sum(len(x) for x in out) == 1000


def test_sample_from_intensity_matches_moments():
    f = to_time_domain(gaussian_field(n=1024, std=1.0, span=40.0))
    t = sample_from_intensity(f, 200_000, RandomStream(1))
    assert np.all(np.isin(t, f.axis))
    s = SummaryStats.from_samples(t)
    assert abs(s.mean) < 3 * s.std_error + f.grid.dt
    assert abs(s.std - 0.5) < 3 * s.std_std_error + f.grid.dt


def test_sample_from_intensity_batched_rows():
    g = FrequencyGrid(256, 0.0, 20.0)
    vals = np.stack([gaussian_spectrum(g, 1.0), gaussian_spectrum(g, 1.0)])
    f = to_time_domain(ComplexField(g, vals, FREQUENCY))
    f = ComplexField(g, f.values * np.array([[1.0], [1.0]]), TIME)
    out = sample_from_intensity(f, 10, RandomStream(2))
    assert out.shape == (2, 10)
    zero = ComplexField(g, np.zeros(256), TIME)
    with pytest.raises(DegenerateWeightsError):
        sample_from_intensity(zero, 3, RandomStream(2))
