# -*- coding: utf-8 -*-
"""
Detecção heteródina balanceada de Bob (sinal e piloto) e calibração do ruído de disparo
O detector é modelado pelo termo de batimento; R, eta e A_lo ficam agrupados em 'gain'
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from loguru import logger

from .channel import PhaseTrace
from .errors import ContractError, DomainError, PrecisionError
from .model import ComplexWaveform
from .seeding import child_seeds, make_rng

MIN_CALIBRATION_SYMBOLS = 1_000


@dataclass(frozen=True)
class DetectorParams:
    """Parâmetros de um detector heteródino balanceado"""

    eta: float = 0.56
    v_el: float = 0.042
    shot_sigma: float = 1.0
    gain: float = 1.0
    add_noise: bool = True
    adc_bits: int = 0
    adc_full_scale: float = 0.0

    def __post_init__(self):
        if not (0 < self.eta <= 1):
            raise DomainError(f"eta fora de (0, 1]: {self.eta}")
        if self.v_el < 0 or self.shot_sigma <= 0 or self.gain <= 0:
            raise DomainError("v_el >= 0, shot_sigma > 0 e gain > 0 são obrigatórios")

    @classmethod
    def from_config(cls, cfg) -> 'DetectorParams':
        return cls(cfg.eta, cfg.v_el, cfg.shot_sigma, cfg.gain, cfg.add_noise, cfg.adc_bits, cfg.adc_full_scale)

    def field_scale(self, n0: float) -> float:
        """Amplitude de campo que produz deslocamento de 1 SNU (X = sqrt(eta T) x após 1/sqrt(N0))"""
        return float(np.sqrt(n0) / (2.0 * self.gain))


def quantize(trace: np.ndarray, bits: int, full_scale: float) -> np.ndarray:
    """Quantizador uniforme mid-rise com saturação em +-full_scale"""
    levels = 2 ** bits
    step = 2.0 * full_scale / levels
    codes = np.clip(np.floor(trace / step), -levels // 2, levels // 2 - 1)
    return (codes + 0.5) * step


def heterodyne_detect(wave: ComplexWaveform, det: DetectorParams,
                      lo_phase: Union[PhaseTrace, np.ndarray], seed, lo_on: bool = True) -> np.ndarray:
    """
    Fotocorrente r(t) = 2 gain sqrt(eta) Re{E(t) e^{-j phi_B(t)}} + n_shot + n_el

    Args:
        lo_on: False desliga o oscilador local (sem batimento e sem ruído de disparo),
               restando só o ruído eletrônico
    """
    phase = lo_phase.values if isinstance(lo_phase, PhaseTrace) else np.asarray(lo_phase)
    if phase.size != len(wave):
        raise ContractError(f"lo_phase tem {phase.size} amostras, a forma de onda tem {len(wave)}")

    n = len(wave)
    current = np.zeros(n)
    if lo_on:
        current = 2.0 * det.gain * np.sqrt(det.eta) * np.real(wave.samples * np.exp(-1j * phase))

    if det.add_noise:
        shot_seed, el_seed = child_seeds(seed, 2)
        if lo_on:
            current += make_rng(shot_seed).normal(0.0, det.shot_sigma, size=n)
        if det.v_el > 0:
            current += make_rng(el_seed).normal(0.0, det.shot_sigma * np.sqrt(det.v_el), size=n)

    if det.adc_bits > 0:
        full_scale = det.adc_full_scale if det.adc_full_scale > 0 else 4.0 * float(np.std(current))
        current = quantize(current, det.adc_bits, full_scale)
    return current


@dataclass(frozen=True)
class ShotNoiseCalibration:
    """Resultado da calibração: variâncias por quadratura no nível de símbolo"""

    n0: float
    electronic_variance: float
    total_variance: float
    n_symbols: int

    @property
    def v_el(self) -> float:
        return self.electronic_variance / self.n0


def calibrate_shot_noise(det: DetectorParams, dsp_chain, n_symbols: int, seed) -> ShotNoiseCalibration:
    """
    Passa entrada óptica nula pela mesma cadeia DSP dos dados

    Args:
        dsp_chain: cadeia de recepção (dsp.ReceiveChain) com o método quadratures()
    Returns:
        N0 (só disparo) e a variância eletrônica (LO desligado)
    """
    if n_symbols < MIN_CALIBRATION_SYMBOLS:
        raise PrecisionError(
            f"Calibração exige >= {MIN_CALIBRATION_SYMBOLS} símbolos, recebeu {n_symbols}"
        )
    if not det.add_noise:
        raise PrecisionError("Calibração exige detector com ruído ativo")

    n_samples = n_symbols * dsp_chain.samples_per_symbol
    vacuum = ComplexWaveform(np.zeros(n_samples, dtype=np.complex128), dsp_chain.sample_rate)
    lo_phase = np.zeros(n_samples)
    total_seed, el_seed = child_seeds(seed, 2)

    total = dsp_chain.quadratures(heterodyne_detect(vacuum, det, lo_phase, total_seed)).pooled()
    electronic = dsp_chain.quadratures(heterodyne_detect(vacuum, det, lo_phase, el_seed, lo_on=False)).pooled()

    total_variance = float(np.var(total))
    electronic_variance = float(np.var(electronic))
    calibration = ShotNoiseCalibration(total_variance - electronic_variance, electronic_variance,
                                       total_variance, n_symbols)
    logger.debug(f"Calibração: N0={calibration.n0:.6g} v_el={calibration.v_el:.4f} ({n_symbols} símbolos)")
    return calibration


def analytic_n0(det: DetectorParams, dsp_chain) -> float:
    """N0 esperado exato da cadeia linear para ruído branco de desvio shot_sigma"""
    return det.shot_sigma ** 2 * dsp_chain.noise_gain()


def reference_n0(cfg, det: Optional[DetectorParams] = None, dsp_chain=None, seed=0) -> float:
    """N0 usado na normalização SNU, conforme receiver.n0_source"""
    det = det or DetectorParams.from_config(cfg)
    if cfg.n0_source == 'measured':
        return calibrate_shot_noise(det, dsp_chain, cfg.calibration_symbols, seed).n0
    return analytic_n0(det, dsp_chain)
