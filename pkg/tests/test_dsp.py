# -*- coding: utf-8 -*-
import numpy as np
import pytest

from functions.config import LinkConfig
from functions.dsp import (MIN_TRAINING, BasebandIQ, ReceiveChain, bandpass, choose_timing, compensate_fast,
                           compensate_slow, down_convert, estimate_freq_offset, estimate_slow_phase, process_block,
                           stale_reference, symbol_sample, track_slow_phase, training_mask)
from functions.errors import (AliasingError, ContractError, DetectionError, DomainError, EstimationError,
                              PilotDropoutError)
from functions.model import QuadratureBlock
from functions.pulse_shapes import RootRaisedCosinePulse
from functions.transmitter import draw_gaussian_symbols, synthesize_quantum

FS = 10e9
F_REP = 100e6


def _block(values, role='bob', mask=None):
    values = np.atleast_1d(np.asarray(values, dtype=complex))
    return QuadratureBlock.from_complex(values, role, mask)


class TestFrequencyOffset:
    N = 1_000_000

    def _tone(self, freq, snr_db=None, seed=0):
        t = np.arange(self.N) / FS
        trace = np.cos(2 * np.pi * freq * t + 0.3)
        if snr_db is not None:
            noise_std = np.sqrt(0.5 / 10 ** (snr_db / 10))
            trace = trace + np.random.default_rng(seed).normal(0.0, noise_std, self.N)
        return trace

    def test_lower_sideband_at_1_31_ghz(self):
        assert estimate_freq_offset(self._tone(1.31e9), FS, 2e9) == pytest.approx(0.69e9, abs=1e3)

    def test_tone_at_f_m(self):
        assert estimate_freq_offset(self._tone(2e9), FS, 2e9) == pytest.approx(0.0, abs=1e3)

    @pytest.mark.parametrize("fraction", [0.13, 0.37, 0.5, 0.81])
    def test_off_grid_tone(self, fraction):
        bin_width = FS / self.N
        freq = 1.31e9 + fraction * bin_width
        estimate = estimate_freq_offset(self._tone(freq, snr_db=20), FS, 2e9)
        assert abs((2e9 - estimate) - freq) < 0.1 * bin_width

    def test_search_window(self):
        trace = self._tone(1.31e9) + 0.5 * self._tone(0.69e9)
        estimate = estimate_freq_offset(trace, FS, 2e9, search_window=(0.5e9, 1.0e9))
        assert estimate == pytest.approx(2e9 - 0.69e9, abs=1e3)

    def test_noise_only_fails(self):
        noise = np.random.default_rng(3).normal(size=self.N)
        with pytest.raises(DetectionError):
            estimate_freq_offset(noise, FS, 2e9, margin_db=30)

    def test_empty_window(self):
        with pytest.raises(DetectionError):
            estimate_freq_offset(self._tone(1.31e9), FS, 2e9, search_window=(3e9, 3e9))


class TestFilters:
    def test_bandpass_noise_reduction(self):
        noise = np.random.default_rng(1).normal(size=1_000_000)
        filtered = bandpass(noise, FS, 2e9, 1e9)
        # fator 2B/fs
        assert np.var(filtered) == pytest.approx(0.2, rel=0.01)
        assert filtered.size == noise.size

    def test_bandpass_outside_nyquist(self):
        with pytest.raises(DomainError):
            bandpass(np.zeros(100), FS, 4.9e9, 0.5e9)
        with pytest.raises(DomainError):
            bandpass(np.zeros(100), FS, 0.1e9, 0.5e9)

    def test_down_convert_in_phase_tone(self):
        t = np.arange(10_000) / FS
        bb = down_convert(2.0 * np.cos(2 * np.pi * 0.69e9 * t), FS, 0.69e9, 0.1e9)
        np.testing.assert_allclose(bb.i, 2.0, atol=1e-9)
        np.testing.assert_allclose(bb.q, 0.0, atol=1e-9)

    def test_down_convert_quadrature_tone(self):
        t = np.arange(10_000) / FS
        bb = down_convert(2.0 * np.cos(2 * np.pi * 0.69e9 * t + np.pi / 2), FS, 0.69e9, 0.1e9)
        np.testing.assert_allclose(bb.i, 0.0, atol=1e-9)
        np.testing.assert_allclose(np.abs(bb.q), 2.0, atol=1e-9)

    def test_down_convert_rejects_far_tone(self):
        t = np.arange(10_000) / FS
        trace = np.cos(2 * np.pi * 0.69e9 * t) + np.cos(2 * np.pi * 1.5e9 * t)
        bb = down_convert(trace, FS, 0.69e9, 0.1e9)
        assert np.max(np.abs(bb.as_complex() - 1.0)) < 1e-6

    def test_down_convert_aliasing(self):
        with pytest.raises(AliasingError):
            down_convert(np.zeros(100), FS, 0.1e9, 0.2e9)

    def test_negative_frequency_conjugates(self):
        t = np.arange(10_000) / FS
        trace = np.cos(2 * np.pi * 1.31e9 * t - 0.4)
        bb = down_convert(trace, FS, -1.31e9, 0.1e9)
        np.testing.assert_allclose(bb.as_complex(), np.exp(-0.4j), atol=1e-9)


class TestSymbolSampling:
    def test_constant_baseband(self):
        bb = BasebandIQ(np.full(10_000, 0.7), np.full(10_000, -0.2), FS)
        block = symbol_sample(bb, F_REP, 0)
        assert len(block) == 100
        np.testing.assert_allclose(block.x, 0.7, atol=1e-12)
        np.testing.assert_allclose(block.p, -0.2, atol=1e-12)

    def test_single_pulse(self):
        i = np.zeros(10_000)
        i[300:350] = 1.0
        block = symbol_sample(BasebandIQ(i, np.zeros(10_000), FS), F_REP, 0)
        nonzero = np.flatnonzero(np.abs(block.x) > 1e-9)
        np.testing.assert_array_equal(nonzero, [3])
        assert block.x[3] == pytest.approx(1.0)

    def test_non_integer_samples_per_symbol(self):
        with pytest.raises(ContractError):
            symbol_sample(BasebandIQ(np.zeros(1000), np.zeros(1000), FS), 3e9, 0)

    def test_auto_timing_matches_known(self):
        cfg = LinkConfig()
        symbols = draw_gaussian_symbols(500, 1.0, 9)
        shape = RootRaisedCosinePulse(0.5)
        for offset in (0, 37):
            wave = synthesize_quantum(symbols, cfg, np.zeros(50_000), offset=offset)
            bb = BasebandIQ(wave.samples.real, wave.samples.imag, FS)
            assert choose_timing(bb, F_REP, shape) == offset
            assert symbol_sample(bb, F_REP, 'auto', shape).x[5] == pytest.approx(symbols.x[5], abs=1e-9)


class TestFastCompensation:
    def test_aligned_pilot(self):
        out = compensate_fast(_block(1 + 0j), _block(1 + 0j), 1.0)
        assert (out.x[0], out.p[0]) == pytest.approx((1.0, 0.0))

    def test_quadrature_pilot(self):
        out = compensate_fast(_block(1 + 0j), _block(0 + 1j), 1.0)
        assert (out.x[0], out.p[0]) == pytest.approx((0.0, 1.0))

    def test_common_rotation_cancels(self):
        rng = np.random.default_rng(2)
        sig = rng.normal(size=1000) + 1j * rng.normal(size=1000)
        ref = 50 * np.exp(1j * rng.uniform(0, 2 * np.pi, 1000))
        theta = np.exp(1j * rng.uniform(0, 2 * np.pi, 1000))
        plain = compensate_fast(_block(sig), _block(ref), 2.0)
        rotated = compensate_fast(_block(sig * theta), _block(ref * theta), 2.0)
        np.testing.assert_allclose(rotated.as_complex(), plain.as_complex(), atol=1e-12)

    def test_magnitude_preserved(self):
        rng = np.random.default_rng(4)
        sig = rng.normal(size=100) + 1j * rng.normal(size=100)
        ref = rng.normal(size=100) + 1j * rng.normal(size=100)
        out = compensate_fast(_block(sig), _block(ref), 4.0)
        np.testing.assert_allclose(np.abs(out.as_complex()) ** 2, np.abs(sig) ** 2 / 4.0, rtol=1e-12)

    def test_pilot_dropout_names_symbol(self):
        ref = np.ones(10, dtype=complex)
        ref[6] = 0.0
        with pytest.raises(PilotDropoutError) as info:
            compensate_fast(_block(np.ones(10)), _block(ref), 1.0)
        assert info.value.symbol_index == 6

    def test_length_mismatch(self):
        with pytest.raises(ContractError):
            compensate_fast(_block(np.ones(3)), _block(np.ones(4)), 1.0)

    def test_stale_reference_uses_previous_symbol(self):
        ref = _block(np.array([1.0, 1j, -1.0]))
        np.testing.assert_allclose(stale_reference(ref).as_complex(), [1.0, 1.0, 1j])


class TestSlowCompensation:
    def _alice(self, n, seed=0):
        symbols = draw_gaussian_symbols(n, 3.246, seed)
        return _block(symbols.as_complex(), 'alice')

    def test_identical_blocks(self):
        alice = self._alice(200)
        assert estimate_slow_phase(alice.with_role('bob'), alice) == pytest.approx(0.0, abs=1e-12)

    def test_noiseless_rotation(self):
        alice = self._alice(200)
        bob = _block(alice.as_complex() * np.exp(-0.3j))
        assert estimate_slow_phase(bob, alice) == pytest.approx(0.3, abs=1e-12)

    def test_noisy_rotation(self):
        n = 10_000
        alice = self._alice(n, 1)
        rng = np.random.default_rng(8)
        noise = rng.normal(size=n) + 1j * rng.normal(size=n)
        bob = _block(alice.as_complex() * np.exp(-0.3j) + noise)
        # desvio do estimador ~ sqrt(Var(ruído por quadratura) / (sum |a|²))
        std = np.sqrt(1.0 / np.sum(np.abs(alice.as_complex()) ** 2))
        assert abs(estimate_slow_phase(bob, alice) - 0.3) < 3 * std

    def test_zero_training(self):
        zeros = _block(np.zeros(150))
        with pytest.raises(EstimationError):
            estimate_slow_phase(zeros, zeros)

    def test_minimum_training(self):
        alice = self._alice(50)
        with pytest.raises(EstimationError):
            estimate_slow_phase(alice.with_role('bob'), alice, min_symbols=100)

    def test_default_training_floor(self):
        alice = self._alice(MIN_TRAINING - 1)
        with pytest.raises(EstimationError, match="mínimo 100"):
            estimate_slow_phase(alice.with_role('bob'), alice)
        alice = self._alice(MIN_TRAINING)
        assert estimate_slow_phase(alice.with_role('bob'), alice) == pytest.approx(0.0, abs=1e-12)

    def test_rotation_is_exact(self):
        block = _block(np.array([1.0, 1j, 2 - 1j]))
        out = compensate_slow(block, 0.25)
        np.testing.assert_allclose(out.as_complex(), block.as_complex() * np.exp(0.25j), atol=1e-15)
        np.testing.assert_allclose(np.abs(out.as_complex()), np.abs(block.as_complex()), rtol=1e-15)

    def test_slow_then_undo(self):
        alice = self._alice(20)
        bob = compensate_slow(compensate_slow(alice, 0.4), -0.4)
        np.testing.assert_allclose(bob.as_complex(), alice.as_complex(), atol=1e-12)

    def test_track_piecewise_phase(self):
        n = 2_000
        alice = self._alice(n, 2)
        alice = QuadratureBlock(alice.x, alice.p, 'alice', training_mask(n, 0.1))
        phases = np.where(np.arange(n) < 1000, 0.2, -0.5)
        bob = _block(alice.as_complex() * np.exp(-1j * phases))
        tracked, estimates = track_slow_phase(bob, alice, 1000, min_training=50)
        np.testing.assert_allclose(estimates, [0.2, -0.5], atol=1e-12)
        np.testing.assert_allclose(tracked.as_complex(), alice.as_complex(), atol=1e-12)
        np.testing.assert_array_equal(tracked.training_mask, alice.training_mask)


class TestTrainingMask:
    def test_evenly_spaced(self):
        mask = training_mask(1000, 0.01)
        positions = np.flatnonzero(mask)
        assert positions.size == 10
        assert np.all(np.diff(positions) == 100)


class TestReceiveChain:
    def test_noise_gain_matches_brick_wall_factor(self):
        cfg = LinkConfig(pulse_shape='rect', duty_cycle=1.0)
        chain = ReceiveChain.quantum(cfg)
        # ruído branco unitário por amostra na entrada
        noise = np.random.default_rng(12).normal(size=2_000_000)
        measured = np.var(chain.quadratures(noise).pooled())
        assert chain.noise_gain() == pytest.approx(measured, rel=0.05)

    def test_pilot_chain_is_lower_sideband(self):
        cfg = LinkConfig()
        chain = ReceiveChain.pilot(cfg, 0.7e9)
        assert chain.center == pytest.approx(-1.3e9)
        assert chain.lp_bandwidth == pytest.approx(0.5 * cfg.pilot_bandwidth)


class TestProcessBlock:
    def test_alice_length_must_match_sampled_block(self):
        cfg = LinkConfig(symbols_per_block=200, guard_symbols=64)
        currents = np.zeros(200 * cfg.samples_per_symbol)
        alice = _block(np.ones(5), 'alice', training_mask(5, 0.4))
        with pytest.raises(ContractError, match="esperado 133"):
            process_block(currents, currents, cfg, 1.0, alice, delta_f=cfg.delta_f_AB)
