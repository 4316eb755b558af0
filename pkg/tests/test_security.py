# -*- coding: utf-8 -*-
import itertools

import numpy as np
import pytest

from functions.config import LinkConfig
from functions.errors import DomainError, EstimationError, NoThresholdError
from functions.model import QuadratureBlock
from functions.security import (ChannelEstimate, SecurityInputs, estimate_channel, finite_size_penalty,
                                holevo_bound, mutual_information, noise_threshold, phase_noise_prediction,
                                secret_key_rate, sufficient_statistics, worst_case_bounds)

LINK_T = 10 ** (-0.5)


class TestMutualInformation:
    def test_operating_point(self):
        assert mutual_information(3.246, LINK_T, 0.022, 0.56, 0.042) == pytest.approx(0.3508, abs=5e-4)

    def test_non_positive_transmittance(self):
        with pytest.raises(DomainError):
            mutual_information(3.246, 0.0, 0.0, 0.56, 0.042)

    def test_decreases_with_noise(self):
        values = [mutual_information(3.246, LINK_T, eps, 0.56, 0.042) for eps in (0.0, 0.02, 0.1)]
        assert values[0] > values[1] > values[2]


class TestHolevoBound:
    def test_operating_point(self):
        assert holevo_bound(3.246, LINK_T, 0.022, 0.56, 0.042).S == pytest.approx(0.2633, abs=1e-3)

    def test_lossless_noiseless_channel(self):
        result = holevo_bound(3.246, 1.0, 0.0, 0.56, 0.042)
        assert result.S == pytest.approx(0.0, abs=1e-9)
        np.testing.assert_allclose(result.eigenvalues, 1.0, atol=1e-9)

    def test_transmittance_above_one(self):
        with pytest.raises(DomainError):
            holevo_bound(3.246, 1.5, 0.0, 0.56, 0.042)

    def test_physical_grid(self):
        grid = itertools.product(
            np.append(np.linspace(0.01, 1.0, 10), [0.999999, 1.0 - 1e-12]),
            (0.0, 0.01, 0.05, 0.1, 0.2),
            (0.5, 1.0, 3.246, 10.0),
            (0.5, 0.8, 1.0),
            (0.0, 0.05),
        )
        count = 0
        for T, eps, V_A, eta, v_el in grid:
            result = holevo_bound(V_A, T, eps, eta, v_el)
            assert np.isfinite(result.S)
            # autovalores como calculados, sem arredondamento para 1
            assert min(result.eigenvalues) >= 1.0 - 1e-9
            count += 1
        assert count >= 1000


class TestFiniteSizePenalty:
    def test_five_million(self):
        assert finite_size_penalty(5_000_000, 1e-10, 1e-10) == pytest.approx(0.01833, abs=1e-5)

    def test_invalid_n(self):
        with pytest.raises(DomainError):
            finite_size_penalty(0, 1e-10, 1e-10)


class TestChannelEstimation:
    def _pair(self, n, T, eps, eta=0.56, v_el=0.042, seed=0):
        rng = np.random.default_rng(seed)
        V_A = 3.246
        x = rng.normal(0.0, np.sqrt(V_A), size=(2, n))
        noise_var = eta * T * eps + 1.0 + v_el
        y = np.sqrt(eta * T) * x + rng.normal(0.0, np.sqrt(noise_var), size=(2, n))
        return QuadratureBlock(x[0], x[1], 'alice'), QuadratureBlock(y[0], y[1], 'bob')

    def test_recovers_channel(self):
        alice, bob = self._pair(2_000_000, LINK_T, 0.022)
        est = estimate_channel(alice, bob, 0.56, 0.042)
        assert est.T_hat == pytest.approx(LINK_T, rel=0.01)
        # desvio de ε̂ ~ 0.004 com 4e6 amostras
        assert abs(est.eps_hat - 0.022) < 0.015
        assert est.m_used == 4_000_000
        assert not est.unphysical

    def test_independent_data(self):
        alice, _ = self._pair(100_000, LINK_T, 0.0, seed=1)
        _, bob = self._pair(100_000, LINK_T, 0.0, seed=2)
        assert abs(estimate_channel(alice, bob, 0.56, 0.042).t_hat) < 0.01

    def test_training_symbols_excluded(self):
        alice, bob = self._pair(1000, LINK_T, 0.0)
        mask = np.zeros(1000, dtype=bool)
        mask[::10] = True
        alice = QuadratureBlock(alice.x, alice.p, 'alice', mask)
        assert sufficient_statistics(alice, bob)[3] == 1800

    def test_pooled_sums_match_single_block(self):
        alice, bob = self._pair(10_000, LINK_T, 0.022, seed=3)
        halves = [np.arange(5_000), np.arange(5_000, 10_000)]
        sums = np.sum([sufficient_statistics(alice.select(h), bob.select(h)) for h in halves], axis=0)
        whole = estimate_channel(alice, bob, 0.56, 0.042)
        pooled = ChannelEstimate.from_sums(sums[0], sums[1], sums[2], int(sums[3]), 0.56, 0.042)
        assert pooled.eps_hat == pytest.approx(whole.eps_hat, rel=1e-9)

    def test_unphysical_flag(self):
        est = ChannelEstimate.from_sums(2.0, 1.0, 5.0, 10, 0.5, 0.0)
        assert est.unphysical

    def test_zero_alice_energy(self):
        with pytest.raises(EstimationError, match=r"sum\(x²\)"):
            ChannelEstimate.from_sums(0.0, 0.0, 5.0, 10, 0.5, 0.0)
        alice = QuadratureBlock(np.zeros(20), np.zeros(20), 'alice', np.zeros(20, dtype=bool))
        with pytest.raises(EstimationError):
            estimate_channel(alice, alice.with_role('bob'), 0.56, 0.042)

    def test_too_few_samples(self):
        with pytest.raises(DomainError):
            ChannelEstimate.from_sums(1.0, 1.0, 1.0, 1, 0.5, 0.0)


class TestWorstCaseBounds:
    def test_operating_point(self):
        est = ChannelEstimate.from_parameters(LINK_T, 0.022, 0.56, 0.042, 5_000_000)
        bounds = worst_case_bounds(est, 3.246, 1e-10, 0.56, 0.042)
        assert bounds.z == pytest.approx(6.467, abs=2e-3)
        assert 0.042 <= bounds.eps_max <= 0.052
        assert bounds.T_min == pytest.approx(0.31377, abs=2e-4)

    def test_zero_confidence_width(self):
        est = ChannelEstimate.from_parameters(LINK_T, 0.022, 0.56, 0.042, 1000)
        bounds = worst_case_bounds(est, 3.246, 1.0, 0.56, 0.042)
        assert bounds.T_min == pytest.approx(LINK_T, rel=1e-12)
        assert bounds.eps_max == pytest.approx(0.022, rel=1e-9)

    def test_large_sample_converges(self):
        est = ChannelEstimate.from_parameters(LINK_T, 0.022, 0.56, 0.042, 10 ** 14)
        bounds = worst_case_bounds(est, 3.246, 1e-10, 0.56, 0.042)
        assert bounds.T_min == pytest.approx(LINK_T, rel=1e-4)
        assert bounds.eps_max == pytest.approx(0.022, abs=1e-4)

    def test_not_certifiable(self):
        est = ChannelEstimate.from_parameters(1e-8, 0.0, 0.56, 0.042, 100)
        assert not worst_case_bounds(est, 3.246, 1e-10, 0.56, 0.042).certifiable


class TestSecretKeyRate:
    def test_asymptotic_operating_point(self, operating_point):
        report = secret_key_rate(operating_point)
        assert report.R == pytest.approx(7.04e6, rel=0.1)
        assert not report.null_rate

    def test_finite_operating_point(self, operating_point):
        report = secret_key_rate(operating_point.replace(mode='finite'))
        assert report.delta_n == pytest.approx(0.01833, abs=1e-5)
        assert report.R == pytest.approx(1.84e6, rel=0.1)
        assert report.R < secret_key_rate(operating_point).R

    def test_holevo_consistency(self, operating_point):
        report = secret_key_rate(operating_point)
        assert report.S_BE == pytest.approx(operating_point.beta * report.I_AB - report.raw_rate / operating_point.f_rep,
                                            abs=1e-12)

    def test_excess_noise_kills_key(self, operating_point):
        report = secret_key_rate(operating_point.replace(eps=0.5))
        assert report.raw_rate < 0
        assert report.R == 0.0
        assert report.null_rate

    def test_uncertifiable_estimate(self, operating_point):
        est = ChannelEstimate.from_parameters(1e-8, 0.0, 0.56, 0.042, 100)
        report = secret_key_rate(operating_point.replace(mode='finite'), est)
        assert report.R == 0.0
        assert report.raw_rate == float('-inf')

    def test_monotonic_in_noise_and_distance(self, operating_point):
        by_eps = [secret_key_rate(operating_point.replace(eps=eps)).raw_rate for eps in (0.0, 0.01, 0.022, 0.04)]
        assert by_eps == sorted(by_eps, reverse=True)
        by_length = [secret_key_rate(operating_point.replace(T=10 ** (-0.02 * L))).raw_rate for L in (5, 15, 25, 40)]
        assert by_length == sorted(by_length, reverse=True)

    def test_monotonic_in_efficiency(self, operating_point):
        by_beta = [secret_key_rate(operating_point.replace(beta=b)).raw_rate for b in (0.9, 0.95, 0.98)]
        assert by_beta == sorted(by_beta)
        by_eta = [secret_key_rate(operating_point.replace(eta=e)).raw_rate for e in (0.4, 0.56, 0.7)]
        assert by_eta == sorted(by_eta)

    def test_block_split_checked(self, operating_point):
        with pytest.raises(DomainError):
            operating_point.replace(mode='finite', n=4_000_000)

    def test_report_row(self, operating_point):
        row = secret_key_rate(operating_point).as_row()
        assert list(row) == ['mode', 'I_AB', 'S_BE', 'Delta_n', 'T_min', 'eps_max', 'R_bps', 'null_rate']


class TestNoiseThreshold:
    def test_bracket(self, operating_point):
        threshold = noise_threshold(25.0, operating_point)
        assert secret_key_rate(operating_point.replace(eps=threshold - 1e-4)).raw_rate > 0
        assert secret_key_rate(operating_point.replace(eps=threshold + 1e-4)).raw_rate < 0

    def test_decreases_with_distance(self, operating_point):
        assert noise_threshold(10.0, operating_point) > noise_threshold(30.0, operating_point)

    def test_no_threshold(self, operating_point):
        with pytest.raises(NoThresholdError):
            noise_threshold(150.0, operating_point.replace(mode='finite'))


class TestPhaseNoisePrediction:
    def test_ten_khz_lasers(self):
        assert phase_noise_prediction(3.246, 10e3, 10e3, 100e6) == pytest.approx(4.079e-3, rel=1e-3)

    def test_negative_linewidth(self):
        with pytest.raises(DomainError):
            phase_noise_prediction(3.246, -1.0, 0.0, 100e6)


def test_inputs_from_config():
    inp = SecurityInputs.from_config(LinkConfig(), eps=0.01)
    assert inp.T == pytest.approx(LINK_T)
    assert inp.mode == 'finite'
    assert inp.n + inp.m == inp.N
