# -*- coding: utf-8 -*-
import numpy as np
import pytest
from scipy import fft as sp_fft
from scipy import stats

from functions.config import LinkConfig
from functions.errors import ConfigError, ContractError, DomainError
from functions.pulse_shapes import RectangularPulse, RootRaisedCosinePulse, get_pulse_shape
from functions.transmitter import (GaussianSymbols, apply_modulation_noise, draw_gaussian_symbols,
                                   pilot_amplitudes, synthesize_pilot, synthesize_quantum)


class TestGaussianSymbols:
    def test_quadrature_variance(self):
        symbols = draw_gaussian_symbols(200_000, 3.246, 1)
        # desvio padrão da variância amostral ~ V_A sqrt(2/n) = 0.0103
        assert np.var(symbols.x) == pytest.approx(3.246, abs=0.05)
        assert np.var(symbols.p) == pytest.approx(3.246, abs=0.05)

    def test_quadratures_are_gaussian(self):
        symbols = draw_gaussian_symbols(50_000, 2.0, 5)
        assert stats.kstest(symbols.x / np.sqrt(2.0), 'norm').pvalue > 1e-3

    def test_seed_reproducible(self):
        a = draw_gaussian_symbols(100, 1.0, 42)
        b = draw_gaussian_symbols(100, 1.0, 42)
        np.testing.assert_array_equal(a.amplitude, b.amplitude)
        np.testing.assert_array_equal(a.phase, b.phase)

    def test_invalid_variance(self):
        with pytest.raises(DomainError):
            draw_gaussian_symbols(10, 0.0, 1)

    def test_complex_round_trip(self):
        symbols = draw_gaussian_symbols(10, 1.0, 3)
        again = GaussianSymbols.from_complex(symbols.as_complex())
        np.testing.assert_allclose(again.x, symbols.x, atol=1e-12)
        np.testing.assert_allclose(again.p, symbols.p, atol=1e-12)

    def test_modulation_noise_adds_variance(self):
        symbols = draw_gaussian_symbols(100_000, 1.0, 8)
        noisy = apply_modulation_noise(symbols, 0.5, 9)
        assert np.var(noisy.x - symbols.x) == pytest.approx(0.5, abs=0.02)
        assert apply_modulation_noise(symbols, 0.0, 9) is symbols


class TestPulseShapes:
    def test_rect_window(self):
        pulse = RectangularPulse(0.5)
        wave = pulse.waveform(300, 100)
        np.testing.assert_allclose(wave[:50], 1.0, atol=1e-12)
        np.testing.assert_allclose(wave[50:], 0.0, atol=1e-12)

    def test_matched_filter_unit_gain(self):
        for pulse in (RectangularPulse(0.5), RootRaisedCosinePulse(0.5, 0.2)):
            cascade = sp_fft.ifft(pulse.response(4_000, 100) * pulse.matched_response(4_000, 100))
            assert cascade[0].real == pytest.approx(1.0, abs=1e-12)

    def test_rrc_is_band_limited(self):
        pulse = RootRaisedCosinePulse(0.5, 0.2)
        response = pulse.response(4_000, 100)
        freqs = np.abs(sp_fft.fftfreq(4_000, 1 / 10e9))
        assert pulse.band_edge(10e9, 100) == pytest.approx(120e6)
        assert np.all(response[freqs > 121e6] == 0)
        assert np.all(response[freqs < 79e6] > 0)
        assert pulse.waveform(4_000, 100)[0] == pytest.approx(1.0, abs=1e-12)

    def test_rrc_cascade_is_nyquist(self):
        # cosseno levantado (RRC * RRC) nulo em múltiplos do período do pulso
        pulse = RootRaisedCosinePulse(0.5, 0.2)
        cascade = sp_fft.ifft(pulse.response(4_000, 100) * pulse.matched_response(4_000, 100)).real
        assert np.max(np.abs(cascade[50::50])) < 1e-12

    def test_unknown_shape(self):
        with pytest.raises(ConfigError):
            get_pulse_shape('sinc')


class TestSynthesis:
    def test_single_symbol_rect_pulse(self):
        cfg = LinkConfig(pulse_shape='rect')
        symbols = GaussianSymbols(np.array([0.0, 2.0, 0.0]), np.array([0.0, np.pi / 2, 0.0]))
        wave = synthesize_quantum(symbols, cfg, np.zeros(300))
        samples = wave.samples
        np.testing.assert_allclose(samples[100:150], 2j, atol=1e-12)
        assert np.max(np.abs(samples[:100])) < 1e-12
        assert np.max(np.abs(samples[150:])) < 1e-12

    def test_laser_phase_applied(self):
        cfg = LinkConfig(pulse_shape='rect')
        symbols = GaussianSymbols(np.array([1.0]), np.array([0.0]))
        phase = np.full(100, 0.7)
        wave = synthesize_quantum(symbols, cfg, phase)
        assert np.angle(wave.samples[10]) == pytest.approx(0.7)

    def test_phase_length_mismatch(self):
        symbols = GaussianSymbols(np.ones(2), np.zeros(2))
        with pytest.raises(ContractError):
            synthesize_quantum(symbols, LinkConfig(), np.zeros(150))

    def test_pilot_sideband_amplitude(self):
        cfg = LinkConfig(carrier_suppression=np.inf)
        sideband, carrier = pilot_amplitudes(cfg)
        assert sideband == pytest.approx(1000 * 0.2422684577, rel=1e-9)
        assert carrier == 0.0
        wave = synthesize_pilot(cfg, np.zeros(1000))
        spectrum = np.abs(np.fft.fft(wave.samples)) / 1000
        freqs = np.fft.fftfreq(1000, cfg.dt)
        assert spectrum[np.argmin(np.abs(freqs - cfg.f_m))] == pytest.approx(sideband, rel=1e-9)
        assert spectrum[np.argmin(np.abs(freqs + cfg.f_m))] == pytest.approx(sideband, rel=1e-9)

    def test_carrier_suppression(self):
        sideband, carrier = pilot_amplitudes(LinkConfig(carrier_suppression=20.0))
        assert carrier / sideband == pytest.approx(0.1)

    def test_large_modulation_index(self):
        with pytest.raises(DomainError):
            pilot_amplitudes(LinkConfig(mod_index=1.5))
