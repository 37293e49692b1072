"""Click statistics: thermal field synthesis, Cox-process clicks, pair
histograms and coincidence selection.

The field has |g1(tau)| = (1 + pi*gamma*tau) exp(-pi*gamma*tau) and, by
the Siegert relation, g2 = 1 + |g1|**2.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from heraldsim.analytic import g2_closed_form
from heraldsim.clicks import (
    ClickStream,
    CoincidencePair,
    concatenate_streams,
    g2_histogram,
    sample_clicks,
    select_coincidences,
    synthesize_thermal_field,
    write_click_stream_csv,
    write_g2_csv,
)
from heraldsim.errors import (
    DurationTooShort,
    InsufficientStatistics,
    OutOfRange,
    RateTooHigh,
    ResolutionTooCoarse,
)
from heraldsim.modes import overlap_closed_form

from conftest import GAMMA

DT_FIELD = 0.5e-9


def poisson_stream(rate: float, duration: float, seed: int) -> ClickStream:
    """Homogeneous Poisson control stream."""
    rng = np.random.default_rng(seed)
    n = rng.poisson(rate * duration)
    times = np.sort(rng.uniform(0.0, duration, size=n))
    times = times[np.concatenate([[True], np.diff(times) > 0.0])]
    return ClickStream(times=times, duration=duration, mean_rate=rate)


@pytest.fixture(scope="module")
def field():
    return synthesize_thermal_field(GAMMA, 2e-4, DT_FIELD, rng_seed=101)


@pytest.fixture(scope="module")
def click_field():
    return synthesize_thermal_field(GAMMA, 2e-4, DT_FIELD, rng_seed=102)


class TestThermalField:
    def test_mean_intensity(self, field):
        # ~ 3e4 coherence cells: the realized mean fluctuates at the 0.6% level
        assert np.mean(field.intensity()) == pytest.approx(1.0, abs=0.03)

    def test_thermal_second_moment(self, field):
        # circular Gaussian field: <I**2> = 2 <I>**2
        assert np.mean(field.intensity() ** 2) == pytest.approx(2.0, abs=0.12)

    def test_intensity_exponential(self, field):
        # thin to ~1 sample per 60 ns so the draws are effectively independent
        step = int(round(60e-9 / DT_FIELD))
        sub = field.intensity()[::step]
        sub = sub / sub.mean()
        d = stats.kstest(sub, "expon").statistic
        assert d * math.sqrt(sub.size) < 1.628  # 1% critical value

    def test_first_order_coherence(self, field):
        # |<E(t) E*(t+tau)>| / <|E|**2> vs (1 + pi g tau) exp(-pi g tau)
        a = field.amplitude
        denom = float(np.mean(np.abs(a) ** 2))
        for lag_ns in (0.0, 2.0, 4.0, 6.0, 10.0, 14.0, 18.0):
            lag = int(round(lag_ns * 1e-9 / DT_FIELD))
            if lag == 0:
                est = 1.0
            else:
                est = abs(np.mean(a[:-lag] * np.conj(a[lag:]))) / denom
            assert est == pytest.approx(
                overlap_closed_form(lag_ns * 1e-9, GAMMA), abs=0.02
            )

    def test_deterministic(self):
        a = synthesize_thermal_field(GAMMA, 1e-5, DT_FIELD, rng_seed=7)
        b = synthesize_thermal_field(GAMMA, 1e-5, DT_FIELD, rng_seed=7)
        np.testing.assert_array_equal(a.amplitude, b.amplitude)

    def test_resolution_guard(self):
        with pytest.raises(ResolutionTooCoarse):
            synthesize_thermal_field(GAMMA, 1e-4, 1e-9, rng_seed=1)

    def test_duration_guard(self):
        with pytest.raises(DurationTooShort):
            synthesize_thermal_field(GAMMA, 1e-6, DT_FIELD, rng_seed=1)

    def test_bad_gamma(self):
        with pytest.raises(OutOfRange):
            synthesize_thermal_field(-1.0, 1e-4, DT_FIELD, rng_seed=1)


class TestSampleClicks:
    def test_count_near_expectation(self, click_field):
        stream = sample_clicks(click_field, 5e7, rng_seed=103)
        # bunching inflates the count variance by 1 + rate * 5/(2 pi gamma)
        expected = 5e7 * 2e-4
        excess = 1.0 + 5e7 * 5.0 / (2.0 * math.pi * GAMMA)
        assert abs(len(stream) - expected) < 5.0 * math.sqrt(expected * excess)

    def test_times_sorted_in_range(self, click_field):
        stream = sample_clicks(click_field, 5e7, rng_seed=104)
        assert np.all(np.diff(stream.times) > 0.0)
        assert stream.times[0] >= 0.0 and stream.times[-1] < stream.duration

    def test_deterministic(self, click_field):
        a = sample_clicks(click_field, 5e7, rng_seed=105)
        b = sample_clicks(click_field, 5e7, rng_seed=105)
        np.testing.assert_array_equal(a.times, b.times)

    def test_rate_guard(self, click_field):
        with pytest.raises(RateTooHigh):
            sample_clicks(click_field, 5e8, rng_seed=1)
        with pytest.raises(OutOfRange):
            sample_clicks(click_field, -1.0, rng_seed=1)

    def test_clicks_follow_intensity(self, click_field):
        # clicks should land preferentially where the intensity is high
        stream = sample_clicks(click_field, 5e7, rng_seed=106)
        idx = np.minimum(
            (stream.times / DT_FIELD).astype(int), click_field.grid.n_samples - 1
        )
        mean_at_clicks = float(np.mean(click_field.intensity()[idx]))
        # for a thermal beam the intensity at click times averages <I**2>/<I> ~ 2
        assert mean_at_clicks == pytest.approx(2.0, abs=0.15)


class TestG2Histogram:
    def test_thermal_bunching_curve(self):
        field = synthesize_thermal_field(GAMMA, 4e-3, DT_FIELD, rng_seed=107)
        stream = sample_clicks(field, 5e7, rng_seed=108)
        hist = g2_histogram(stream, bin_width=0.5e-9, max_delay=60e-9)
        theory = g2_closed_form(hist.bin_centers, GAMMA)
        assert hist.g2[0] == pytest.approx(2.0, abs=0.12)
        assert float(np.max(np.abs(hist.g2 - theory))) < 0.12
        # plateau normalization is consistent: far bins sit near 1
        assert float(np.mean(hist.g2[hist.bin_centers > 48e-9])) == pytest.approx(
            1.0, abs=0.02
        )

    def test_poisson_stream_is_flat(self):
        stream = poisson_stream(5e7, 4e-3, seed=109)
        hist = g2_histogram(stream, bin_width=0.5e-9, max_delay=60e-9)
        np.testing.assert_allclose(hist.g2, 1.0, atol=0.1)

    def test_insufficient_statistics(self):
        stream = poisson_stream(1e6, 1e-4, seed=110)
        with pytest.raises(InsufficientStatistics):
            g2_histogram(stream, bin_width=0.5e-9, max_delay=60e-9)

    def test_argument_guards(self):
        stream = poisson_stream(5e7, 1e-3, seed=111)
        with pytest.raises(OutOfRange):
            g2_histogram(stream, bin_width=0.0, max_delay=60e-9)
        with pytest.raises(OutOfRange):
            g2_histogram(stream, bin_width=1e-9, max_delay=0.5e-9)


class TestSelectCoincidences:
    def test_empty_stream(self):
        empty = ClickStream(times=np.array([]), duration=1e-3, mean_rate=0.0)
        assert select_coincidences(empty, window=65e-9) == []

    def test_window_guard(self):
        stream = poisson_stream(5e7, 1e-4, seed=112)
        with pytest.raises(OutOfRange):
            select_coincidences(stream, window=0.0)
        with pytest.raises(OutOfRange):
            select_coincidences(stream, window=65e-9, dead_time=-1e-9)

    def test_pair_invariants(self):
        stream = poisson_stream(5e7, 2e-3, seed=113)
        window, dead = 65e-9, 500e-9
        pairs = select_coincidences(stream, window=window, dead_time=dead)
        assert len(pairs) > 100
        for k, p in enumerate(pairs):
            assert 0.0 <= p.delta_t <= window
            if k:
                assert p.t1 >= pairs[k - 1].t2 + dead

    def test_deterministic(self):
        stream = poisson_stream(5e7, 5e-4, seed=114)
        a = select_coincidences(stream, window=65e-9, rng_seed=9)
        b = select_coincidences(stream, window=65e-9, rng_seed=9)
        assert a == b

    def test_bunching_shortens_delays(self):
        # thermal pairs crowd toward zero delay; Poisson pairs do not
        field = synthesize_thermal_field(GAMMA, 4e-3, DT_FIELD, rng_seed=115)
        thermal = sample_clicks(field, 1e7, rng_seed=116)
        control = poisson_stream(len(thermal) / thermal.duration, 4e-3, seed=117)
        window = 6e-9
        dt_th = [p.delta_t for p in select_coincidences(thermal, window, dead_time=0.0)]
        dt_po = [p.delta_t for p in select_coincidences(control, window, dead_time=0.0)]
        assert len(dt_th) > 300 and len(dt_po) > 300
        assert np.mean(dt_po) == pytest.approx(window / 2.0, abs=0.4e-9)
        assert np.mean(dt_th) < np.mean(dt_po) - 0.2e-9

    def test_half_window_ratio_tracks_g2(self):
        # counts in [0, w/2] vs [w/2, w] follow the g2 integral ratio
        field = synthesize_thermal_field(GAMMA, 4e-3, DT_FIELD, rng_seed=118)
        stream = sample_clicks(field, 1e7, rng_seed=119)
        window = 6e-9
        delays = np.array(
            [p.delta_t for p in select_coincidences(stream, window, dead_time=0.0)]
        )
        near = int(np.sum(delays <= window / 2))
        far = int(np.sum(delays > window / 2))
        taus = np.linspace(0.0, window, 1001)
        g2 = g2_closed_form(taus, GAMMA)
        half = taus.size // 2
        expected = np.trapezoid(g2[: half + 1], taus[: half + 1]) / np.trapezoid(
            g2[half:], taus[half:]
        )
        ratio = near / far
        sigma = ratio * math.sqrt(1.0 / near + 1.0 / far)
        assert abs(ratio - expected) < 4.0 * sigma + 0.05 * expected


class TestConcatenateStreams:
    def test_offsets_accumulate(self):
        a = ClickStream(times=np.array([1e-6, 2e-6]), duration=1e-5, mean_rate=2e5)
        b = ClickStream(times=np.array([3e-6]), duration=1e-5, mean_rate=1e5)
        joined = concatenate_streams([a, b])
        np.testing.assert_allclose(joined.times, [1e-6, 2e-6, 1.3e-5])
        assert joined.duration == pytest.approx(2e-5)
        assert len(joined) == 3

    def test_empty_list_rejected(self):
        with pytest.raises(OutOfRange):
            concatenate_streams([])


class TestStreamValidation:
    def test_rejects_unsorted(self):
        with pytest.raises(OutOfRange):
            ClickStream(times=np.array([2e-6, 1e-6]), duration=1e-5, mean_rate=1e5)

    def test_rejects_out_of_range(self):
        with pytest.raises(OutOfRange):
            ClickStream(times=np.array([2e-5]), duration=1e-5, mean_rate=1e5)

    def test_pair_delta(self):
        p = CoincidencePair(t1=1e-6, t2=1.5e-6)
        assert p.delta_t == pytest.approx(0.5e-6)


class TestCsvWriters:
    def test_click_stream_csv(self, tmp_path):
        stream = ClickStream(
            times=np.array([1e-6, 2e-6]), duration=1e-5, mean_rate=2e5
        )
        path = tmp_path / "clicks.csv"
        write_click_stream_csv(stream, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "time_seconds"
        assert float(lines[1]) == pytest.approx(1e-6)

    def test_g2_csv_with_theory(self, tmp_path):
        stream = poisson_stream(5e7, 1e-3, seed=120)
        hist = g2_histogram(stream, bin_width=1e-9, max_delay=60e-9)
        path = tmp_path / "g2.csv"
        write_g2_csv(hist, str(path), gamma=GAMMA)
        lines = path.read_text().splitlines()
        assert lines[0] == "delay_ns,g2_empirical,g2_theory"
        first = lines[1].split(",")
        assert float(first[0]) == pytest.approx(0.5)  # first bin center in ns
        assert float(first[2]) == pytest.approx(g2_closed_form(0.5e-9, GAMMA), rel=1e-9)

    def test_g2_csv_without_theory(self, tmp_path):
        stream = poisson_stream(5e7, 1e-3, seed=121)
        hist = g2_histogram(stream, bin_width=1e-9, max_delay=60e-9)
        path = tmp_path / "g2.csv"
        write_g2_csv(hist, str(path))
        assert path.read_text().splitlines()[0] == "delay_ns,g2"
