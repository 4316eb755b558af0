# -*- coding: utf-8 -*-
"""
Canal de fibra e imperfeições dos lasers
Atenuação, deslocamento de frequência Alice-Bob, passeios de fase rápidos (lasers)
e lentos (canal), e vazamento de polarização entre sinal e piloto
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ContractError, DomainError
from .model import ComplexWaveform, db_to_amplitude
from .seeding import child_seeds, make_rng

PHASE_KINDS = ('laser_A', 'laser_B', 'channel_sig', 'channel_ref')


@dataclass(frozen=True)
class PhaseTrace:
    """Fase (rad) por amostra"""

    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in PHASE_KINDS:
            raise ContractError(f"Tipo de traço de fase desconhecido: {self.kind}")

    def __len__(self) -> int:
        return self.values.size

    def increments(self) -> np.ndarray:
        return np.diff(self.values)


def _wiener(n_samples: int, increment_variance: float, seed) -> np.ndarray:
    values = np.zeros(n_samples)
    if increment_variance > 0 and n_samples > 1:
        steps = make_rng(seed).normal(0.0, np.sqrt(increment_variance), size=n_samples - 1)
        np.cumsum(steps, out=values[1:])
    return values


def laser_phase_walk(n_samples: int, linewidth: float, dt: float, seed, kind: str = 'laser_A') -> PhaseTrace:
    """
    Ruído de fase de laser (modelo de Wiener, largura de linha lorentziana)
    Var(incremento) = 2 pi linewidth dt; começa em 0
    """
    if linewidth < 0 or dt <= 0:
        raise DomainError(f"linewidth >= 0 e dt > 0 são obrigatórios ({linewidth}, {dt})")
    return PhaseTrace(_wiener(n_samples, 2 * np.pi * linewidth * dt, seed), kind)


def slow_phase_walk(n_samples: int, rate: float, dt: float, seed, kind: str = 'channel_sig') -> PhaseTrace:
    """Deriva lenta do canal: Var(incremento) = slow_phase_rate dt"""
    if rate < 0 or dt <= 0:
        raise DomainError(f"slow_phase_rate >= 0 e dt > 0 são obrigatórios ({rate}, {dt})")
    return PhaseTrace(_wiener(n_samples, rate * dt, seed), kind)


def frequency_offset_phase(n_samples: int, cfg) -> np.ndarray:
    """2 pi (Δf t + drift t²/2)"""
    t = np.arange(n_samples) * cfg.dt
    return 2 * np.pi * (cfg.delta_f_AB * t + 0.5 * cfg.delta_f_drift * t ** 2)


def apply_channel(sig: ComplexWaveform, pilot: ComplexWaveform, cfg, seed) -> Tuple[ComplexWaveform, ComplexWaveform]:
    """
    Propaga sinal e piloto pela fibra

    Returns:
        (caminho do sinal, caminho do piloto) no referencial do oscilador local de Bob
    """
    if sig.sample_rate != pilot.sample_rate:
        raise ContractError(f"Taxas de amostragem diferentes: {sig.sample_rate} vs {pilot.sample_rate}")
    if len(sig) != len(pilot):
        raise ContractError(f"Comprimentos diferentes: {len(sig)} vs {len(pilot)}")

    n = len(sig)
    seed_sig, seed_ref = child_seeds(seed, 2)
    phi_sig = slow_phase_walk(n, cfg.slow_phase_rate, cfg.dt, seed_sig, 'channel_sig').values
    phi_ref = slow_phase_walk(n, cfg.slow_phase_rate, cfg.dt, seed_ref, 'channel_ref').values

    amplitude = np.sqrt(cfg.transmittance)
    leakage = db_to_amplitude(cfg.pol_isolation)
    # deslocamento comum aos dois caminhos: um único laser transmissor
    rotation = amplitude * np.exp(1j * frequency_offset_phase(n, cfg))

    # phase_offset: diferença estática de caminho entre as polarizações
    sig_field = sig.samples * np.exp(1j * (phi_sig + cfg.phase_offset))
    ref_field = pilot.samples * np.exp(1j * phi_ref)

    sig_out = rotation * (sig_field + leakage * ref_field) if leakage else rotation * sig_field
    ref_out = rotation * (ref_field + leakage * sig_field) if leakage else rotation * ref_field
    return ComplexWaveform(sig_out, sig.sample_rate), ComplexWaveform(ref_out, pilot.sample_rate)
