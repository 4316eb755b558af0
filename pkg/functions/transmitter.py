# -*- coding: utf-8 -*-
"""
Lado de Alice: sorteio gaussiano, sinal quântico pulsado e tom piloto CS-DSB
Formas de onda em envoltória complexa no referencial de Alice (frequência relativa 0)
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import fft as sp_fft

from .errors import ContractError, DomainError
from .model import ComplexWaveform, QuadratureBlock, bessel_j1, db_to_amplitude
from .pulse_shapes import pulse_for
from .seeding import make_rng

MAX_MOD_INDEX = 1.0


@dataclass(frozen=True)
class GaussianSymbols:
    """Amplitude Rayleigh e fase uniforme; x_A = A cos(fase), p_A = A sin(fase)"""

    amplitude: np.ndarray
    phase: np.ndarray

    def __len__(self) -> int:
        return self.amplitude.size

    @property
    def x(self) -> np.ndarray:
        return self.amplitude * np.cos(self.phase)

    @property
    def p(self) -> np.ndarray:
        return self.amplitude * np.sin(self.phase)

    def as_complex(self) -> np.ndarray:
        return self.amplitude * np.exp(1j * self.phase)

    def as_block(self, training_mask: Optional[np.ndarray] = None) -> QuadratureBlock:
        return QuadratureBlock(self.x, self.p, 'alice', training_mask)

    @classmethod
    def from_complex(cls, values: np.ndarray) -> 'GaussianSymbols':
        return cls(np.abs(values), np.mod(np.angle(values), 2 * np.pi))


def draw_gaussian_symbols(n: int, V_A: float, rng_seed) -> GaussianSymbols:
    """
    Sorteia n estados coerentes gaussianos com variância V_A por quadratura

    Args:
        n: número de símbolos
        V_A: variância de modulação (SNU)
        rng_seed: inteiro ou SeedSequence
    """
    if V_A <= 0:
        raise DomainError(f"V_A deve ser positivo, recebeu {V_A}")
    if n < 1:
        raise DomainError(f"n deve ser >= 1, recebeu {n}")
    rng = make_rng(rng_seed)
    amplitude = rng.rayleigh(scale=np.sqrt(V_A), size=n)
    phase = rng.uniform(0.0, 2 * np.pi, size=n)
    return GaussianSymbols(amplitude, phase)


def apply_modulation_noise(symbols: GaussianSymbols, variance: float, rng_seed) -> GaussianSymbols:
    """Símbolos efetivamente emitidos: dinâmica finita do modulador soma ruído não registrado por Alice"""
    if variance <= 0:
        return symbols
    rng = make_rng(rng_seed)
    noise = rng.normal(0.0, np.sqrt(variance), size=(2, len(symbols)))
    return GaussianSymbols.from_complex(symbols.as_complex() + noise[0] + 1j * noise[1])


def symbol_anchors(n_symbols: int, samples_per_symbol: int, offset: int = 0) -> np.ndarray:
    return np.arange(n_symbols) * samples_per_symbol + offset


def synthesize_quantum(symbols: GaussianSymbols, cfg, laser_phase: np.ndarray,
                       field_scale: float = 1.0, offset: int = 0) -> ComplexWaveform:
    """
    Envoltória do sinal quântico pulsado: A_sig e^{j(fase_A + phi_A(t))} por pulso

    Args:
        field_scale: amplitude de campo correspondente a 1 SNU de deslocamento
        offset: amostra âncora do símbolo 0
    """
    sps = cfg.samples_per_symbol
    n_samples = len(symbols) * sps
    laser_phase = np.asarray(laser_phase, dtype=np.float64)
    if laser_phase.size != n_samples:
        raise ContractError(f"laser_phase tem {laser_phase.size} amostras, a grade tem {n_samples}")

    impulses = np.zeros(n_samples, dtype=np.complex128)
    impulses[symbol_anchors(len(symbols), sps, offset)] = symbols.as_complex()
    # convolução circular no bloco
    shaped = sp_fft.ifft(sp_fft.fft(impulses) * pulse_for(cfg).response(n_samples, sps))

    return ComplexWaveform(field_scale * shaped * np.exp(1j * laser_phase), cfg.sample_rate)


def pilot_amplitudes(cfg) -> tuple:
    """(amplitude de cada banda lateral, amplitude da portadora residual)"""
    if not (0 <= cfg.mod_index <= MAX_MOD_INDEX):
        raise DomainError(
            f"Índice de modulação {cfg.mod_index} fora do regime de pequeno sinal (m <= {MAX_MOD_INDEX})"
        )
    sideband = cfg.A_ref * bessel_j1(cfg.mod_index)
    return sideband, sideband * db_to_amplitude(cfg.carrier_suppression)


def synthesize_pilot(cfg, laser_phase: np.ndarray, field_scale: float = 1.0) -> ComplexWaveform:
    """
    Tom piloto CS-DSB: raias em +-f_m de amplitude A_ref J1(m) e portadora residual
    carrier_suppression dB abaixo da banda lateral, ambos com a fase do laser de Alice
    """
    sideband, carrier = pilot_amplitudes(cfg)
    laser_phase = np.asarray(laser_phase, dtype=np.float64)
    t = np.arange(laser_phase.size) / cfg.sample_rate
    envelope = 2.0 * sideband * np.cos(2 * np.pi * cfg.f_m * t) + carrier
    return ComplexWaveform(field_scale * envelope * np.exp(1j * laser_phase), cfg.sample_rate)
