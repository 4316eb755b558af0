# -*- coding: utf-8 -*-
"""
Processamento digital de Bob: estimativa de Δf, filtragem passa-faixa, conversão
para banda base, amostragem de símbolos e compensação de fase rápida e lenta

Convenção de quadraturas: X ∝ cos(fase total), P ∝ -sin(fase total)
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy import fft as sp_fft
from scipy import signal

from .errors import AliasingError, ContractError, DetectionError, DomainError, EstimationError, PilotDropoutError
from .model import QuadratureBlock
from .pulse_shapes import PulseShape, RectangularPulse, pulse_for

# menor treinamento aceito para a rotação lenta
MIN_TRAINING = 100


@dataclass(frozen=True)
class BasebandIQ:
    """Componentes i(t), q(t) após a conversão para banda base"""

    i: np.ndarray
    q: np.ndarray
    sample_rate: float

    def __len__(self) -> int:
        return self.i.size

    def as_complex(self) -> np.ndarray:
        return self.i + 1j * self.q


def _parabolic_peak(values: np.ndarray, k: int) -> float:
    """Vértice da parábola pelos bins k-1, k, k+1 (deslocamento em bins)"""
    a, b, c = values[k - 1], values[k], values[k + 1]
    denom = a - 2 * b + c
    if denom == 0:
        return 0.0
    return 0.5 * (a - c) / denom


def estimate_freq_offset(pilot_current: np.ndarray, sample_rate: float, f_m: float,
                         search_window: Optional[Tuple[float, float]] = None,
                         margin_db: float = 10.0) -> float:
    """
    Estima Δf_AB pela raia dominante do piloto: Δf = f_m - f_pico

    Janela de Hann e interpolação quadrática do log da magnitude em 3 bins
    """
    trace = np.asarray(pilot_current, dtype=np.float64)
    n = trace.size
    if n < 8:
        raise DetectionError(f"Traço do piloto curto demais ({n} amostras)")

    spectrum = np.abs(sp_fft.rfft(trace * signal.get_window('hann', n, fftbins=True)))
    freqs = sp_fft.rfftfreq(n, 1.0 / sample_rate)
    low, high = search_window if search_window is not None else (0.0, f_m)

    candidates = np.flatnonzero((freqs > low) & (freqs <= high))
    candidates = candidates[(candidates > 0) & (candidates < spectrum.size - 1)]
    if candidates.size == 0:
        raise DetectionError(f"Janela de busca vazia: [{low}, {high}] Hz")

    k = int(candidates[np.argmax(spectrum[candidates])])
    power = spectrum ** 2
    floor = float(np.median(power[candidates]))
    if floor > 0 and 10 * np.log10(power[k] / floor) < margin_db:
        raise DetectionError(
            f"Nenhuma raia {margin_db} dB acima do piso de ruído em [{low:.4g}, {high:.4g}] Hz"
        )

    log_mag = np.log(np.maximum(spectrum[k - 1:k + 2], np.finfo(float).tiny))
    f_peak = (k + _parabolic_peak(log_mag, 1)) * sample_rate / n
    logger.debug(f"Raia do piloto em {f_peak / 1e9:.6f} GHz, Δf = {(f_m - f_peak) / 1e9:.6f} GHz")
    return float(f_m - f_peak)


def bandpass(trace: np.ndarray, sample_rate: float, f_center: float, bandwidth: float) -> np.ndarray:
    """Máscara de fase zero no domínio da frequência: 1 em f_center +- bandwidth/2"""
    low, high = f_center - bandwidth / 2, f_center + bandwidth / 2
    if not (0 < low and high < sample_rate / 2):
        raise DomainError(f"Banda [{low:.4g}, {high:.4g}] Hz fora de (0, {sample_rate / 2:.4g})")

    trace = np.asarray(trace, dtype=np.float64)
    spectrum = sp_fft.rfft(trace)
    freqs = sp_fft.rfftfreq(trace.size, 1.0 / sample_rate)
    spectrum[(freqs < low) | (freqs > high)] = 0
    return sp_fft.irfft(spectrum, n=trace.size)


def down_convert(trace: np.ndarray, sample_rate: float, f: float, lp_bandwidth: float) -> BasebandIQ:
    """
    i = LP[2 r cos(2πft)], q = LP[-2 r sin(2πft)]

    f pode ser negativo (banda lateral inferior espelhada), o que conjuga a envoltória
    """
    if abs(f) >= sample_rate / 2:
        raise DomainError(f"Frequência {f:.4g} Hz acima de Nyquist")
    if lp_bandwidth >= abs(f):
        raise AliasingError(f"lp_bandwidth {lp_bandwidth:.4g} Hz >= |f| = {abs(f):.4g} Hz")

    trace = np.asarray(trace, dtype=np.float64)
    t = np.arange(trace.size) / sample_rate
    mixed = sp_fft.fft(2.0 * trace * np.exp(-2j * np.pi * f * t))
    mixed[np.abs(sp_fft.fftfreq(trace.size, 1.0 / sample_rate)) > lp_bandwidth] = 0
    z = sp_fft.ifft(mixed)
    return BasebandIQ(z.real, -z.imag, sample_rate)


def _samples_per_symbol(sample_rate: float, f_rep: float) -> int:
    ratio = sample_rate / f_rep
    sps = int(round(ratio))
    if sps < 2 or abs(ratio - sps) > 1e-9 * ratio:
        raise ContractError(f"sample_rate/f_rep = {ratio} precisa ser inteiro >= 2")
    return sps


def matched_output(bb: BasebandIQ, shape: PulseShape, samples_per_symbol: int) -> np.ndarray:
    """Correlação circular com o pulso: z[n] = sum_m p[m] x[n + m] / sum(p²)"""
    x = bb.as_complex()
    return sp_fft.ifft(sp_fft.fft(x) * shape.matched_response(x.size, samples_per_symbol))


def choose_timing(bb: BasebandIQ, f_rep: float, shape: PulseShape) -> int:
    """Atraso (0..sps-1) que maximiza a energia média por símbolo"""
    sps = _samples_per_symbol(bb.sample_rate, f_rep)
    z = matched_output(bb, shape, sps)
    n_symbols = len(bb) // sps
    energy = np.mean(np.abs(z[:n_symbols * sps].reshape(n_symbols, sps)) ** 2, axis=0)
    return int(np.argmax(energy))


def symbol_sample(bb: BasebandIQ, f_rep: float, timing_offset: Union[int, str] = 0,
                  shape: Optional[PulseShape] = None, duty_cycle: float = 0.5) -> QuadratureBlock:
    """
    Filtro casado amostrado uma vez por símbolo a partir de timing_offset

    Sem shape, usa a média retangular sobre a janela aberta do pulso (duty_cycle)
    """
    sps = _samples_per_symbol(bb.sample_rate, f_rep)
    if shape is None:
        shape = RectangularPulse(duty_cycle)
    if timing_offset == 'auto':
        timing_offset = choose_timing(bb, f_rep, shape)
    timing_offset = int(timing_offset)

    z = matched_output(bb, shape, sps)
    idx = np.arange(timing_offset, len(bb), sps)
    return QuadratureBlock.from_complex(z[idx], 'bob')


def compensate_fast(sig: QuadratureBlock, ref: QuadratureBlock, n0: float, floor: float = 1e-12) -> QuadratureBlock:
    """
    Remove a fase rápida comum usando o piloto do mesmo símbolo e normaliza para SNU:
    X' + jP' = conj(s) r / |r| / sqrt(N0)
    """
    if len(sig) != len(ref):
        raise ContractError(f"sig e ref com comprimentos diferentes: {len(sig)} vs {len(ref)}")
    if n0 <= 0:
        raise ContractError(f"N0 deve ser positivo, recebeu {n0}")

    r = ref.as_complex()
    power = np.abs(r) ** 2
    weak = np.flatnonzero(power < floor * float(np.mean(power)))
    if weak.size or not np.all(power > 0):
        k = int(weak[0]) if weak.size else int(np.flatnonzero(power <= 0)[0])
        raise PilotDropoutError(k, float(power[k]), floor)

    out = np.conj(sig.as_complex()) * r / np.sqrt(power) / np.sqrt(n0)
    return QuadratureBlock.from_complex(out, 'bob', sig.training_mask)


def stale_reference(ref: QuadratureBlock, delay: int = 1) -> QuadratureBlock:
    """Referência do piloto atrasada: modela compensação rápida desativada (fase do símbolo anterior)"""
    if delay <= 0:
        return ref
    idx = np.maximum(np.arange(len(ref)) - delay, 0)
    return ref.select(idx)


def estimate_slow_phase(bob_training: QuadratureBlock, alice_training: QuadratureBlock,
                        min_symbols: int = MIN_TRAINING) -> float:
    """
    Rotação de mínimos quadrados que alinha o treinamento de Bob ao de Alice

    Returns:
        Δφ tal que (X' + jP') e^{jΔφ} ≈ x_A + j p_A
    """
    if len(bob_training) != len(alice_training):
        raise ContractError("Treinamento de Bob e Alice com comprimentos diferentes")
    if len(bob_training) == 0:
        raise EstimationError("Conjunto de treinamento vazio")
    if len(bob_training) < min_symbols:
        raise EstimationError(f"Treinamento com {len(bob_training)} símbolos, mínimo {min_symbols}")

    correlation = np.sum(alice_training.as_complex() * np.conj(bob_training.as_complex()))
    if correlation == 0:
        raise EstimationError("Treinamento nulo: correlação zero")
    return float(np.angle(correlation))


def compensate_slow(block: QuadratureBlock, delta_slow: float) -> QuadratureBlock:
    """X_B = X' cos Δ - P' sin Δ, P_B = X' sin Δ + P' cos Δ"""
    c, s = np.cos(delta_slow), np.sin(delta_slow)
    return QuadratureBlock(block.x * c - block.p * s, block.x * s + block.p * c, block.role, block.training_mask)


def training_mask(n_symbols: int, fraction: float) -> np.ndarray:
    """Posições igualmente espaçadas divulgadas para treinamento"""
    n_train = min(n_symbols, max(1, int(round(fraction * n_symbols))))
    mask = np.zeros(n_symbols, dtype=bool)
    mask[(np.arange(n_train) * n_symbols) // n_train] = True
    return mask


def sub_block_bounds(n_symbols: int, slow_block: int) -> Sequence[np.ndarray]:
    """Índices de cada sub-bloco; o último absorve o resto"""
    return np.array_split(np.arange(n_symbols), max(1, n_symbols // slow_block))


def track_slow_phase(bob: QuadratureBlock, alice: QuadratureBlock, slow_block: int,
                     min_training: int = MIN_TRAINING) -> Tuple[QuadratureBlock, np.ndarray]:
    """Fase lenta constante por sub-bloco de slow_block símbolos"""
    if len(bob) != len(alice):
        raise ContractError("Blocos de Bob e Alice com comprimentos diferentes")
    if alice.training_mask is None:
        raise EstimationError("Bloco de Alice sem máscara de treinamento")

    bounds = sub_block_bounds(len(bob), slow_block)
    x, p = bob.x.copy(), bob.p.copy()
    estimates = np.empty(len(bounds))
    for j, idx in enumerate(bounds):
        train = idx[alice.training_mask[idx]]
        if train.size == 0:
            raise EstimationError(f"Sub-bloco {j} sem símbolos de treinamento")
        delta = estimate_slow_phase(bob.select(train), alice.select(train), min_training)
        rotated = compensate_slow(bob.select(idx), delta)
        x[idx], p[idx] = rotated.x, rotated.p
        estimates[j] = delta
    return QuadratureBlock(x, p, 'bob', alice.training_mask), estimates


@dataclass
class ReceiveChain:
    """Passa-faixa + conversão para banda base + filtro casado para uma das raias"""

    sample_rate: float
    f_rep: float
    center: float
    bandwidth: float
    lp_bandwidth: float
    shape: PulseShape
    timing_offset: Union[int, str] = 0

    @property
    def samples_per_symbol(self) -> int:
        return _samples_per_symbol(self.sample_rate, self.f_rep)

    @classmethod
    def quantum(cls, cfg, delta_f: Optional[float] = None) -> 'ReceiveChain':
        delta_f = cfg.delta_f_AB if delta_f is None else delta_f
        bw = cfg.quantum_bandwidth
        return cls(cfg.sample_rate, cfg.f_rep, delta_f, bw, cfg.lp_fraction * bw, pulse_for(cfg), cls._timing(cfg))

    @classmethod
    def pilot(cls, cfg, delta_f: Optional[float] = None) -> 'ReceiveChain':
        delta_f = cfg.delta_f_AB if delta_f is None else delta_f
        bw = cfg.pilot_bandwidth
        return cls(cfg.sample_rate, cfg.f_rep, delta_f - cfg.f_m, bw, cfg.lp_fraction * bw,
                   pulse_for(cfg), cls._timing(cfg))

    @staticmethod
    def _timing(cfg) -> Union[int, str]:
        return 'auto' if cfg.timing_mode == 'auto' else 0

    def baseband(self, trace: np.ndarray) -> BasebandIQ:
        filtered = bandpass(trace, self.sample_rate, abs(self.center), self.bandwidth)
        return down_convert(filtered, self.sample_rate, self.center, self.lp_bandwidth)

    def quadratures(self, trace: np.ndarray, timing_offset: Optional[Union[int, str]] = None) -> QuadratureBlock:
        offset = self.timing_offset if timing_offset is None else timing_offset
        return symbol_sample(self.baseband(trace), self.f_rep, offset, self.shape)

    def noise_gain(self, n_samples: Optional[int] = None) -> float:
        """Variância por quadratura na saída para ruído branco unitário por amostra"""
        sps = self.samples_per_symbol
        size = n_samples or int(2 ** np.ceil(np.log2(max(64 * sps, 2 ** 14))))
        response = np.abs(self.shape.matched_response(size, sps)) ** 2
        freqs = np.abs(sp_fft.fftfreq(size, 1.0 / self.sample_rate))
        cutoff = min(self.bandwidth / 2, self.lp_bandwidth)
        return float(2.0 / size * np.sum(response[freqs <= cutoff]))


@dataclass
class DSPResult:
    """Saída de um bloco: quadraturas finais de Bob e diagnósticos"""

    block: QuadratureBlock
    delta_f_hat: float
    timing_offset: int
    slow_phases: np.ndarray = field(default_factory=lambda: np.zeros(0))


def process_block(sig_current: np.ndarray, ref_current: np.ndarray, cfg, n0: float,
                  alice: QuadratureBlock, guard_symbols: Optional[int] = None,
                  delta_f: Optional[float] = None) -> DSPResult:
    """
    Cadeia completa de um bloco, do par de fotocorrentes até (X_B, P_B) em SNU

    Args:
        alice: símbolos de Alice mantidos (sem guarda) com a máscara de treinamento
        guard_symbols: símbolos descartados em cada borda
        delta_f: Δf de sessão; None estima a partir deste bloco
    """
    guard = cfg.guard_symbols if guard_symbols is None else guard_symbols
    if delta_f is None:
        delta_f = estimate_freq_offset(ref_current, cfg.sample_rate, cfg.f_m, margin_db=cfg.foe_margin_db)

    quantum = ReceiveChain.quantum(cfg, delta_f)
    pilot = ReceiveChain.pilot(cfg, delta_f)

    bb_sig = quantum.baseband(sig_current)
    timing = quantum.timing_offset
    if timing == 'auto':
        timing = choose_timing(bb_sig, cfg.f_rep, quantum.shape)
    raw_sig = symbol_sample(bb_sig, cfg.f_rep, timing, quantum.shape)
    raw_ref = pilot.quadratures(ref_current, timing)

    expected = len(alice) + 2 * guard
    if len(raw_sig) != expected:
        raise ContractError(f"{len(raw_sig)} símbolos amostrados, esperado {expected}")
    keep = np.arange(guard, guard + len(alice))
    raw_sig, raw_ref = raw_sig.select(keep), raw_ref.select(keep)

    if cfg.fast_compensation == 'disabled':
        raw_ref = stale_reference(raw_ref)
    bob = compensate_fast(raw_sig, raw_ref, n0, cfg.pilot_floor)

    slow_phases = np.zeros(0)
    if cfg.slow_compensation:
        bob, slow_phases = track_slow_phase(bob, alice, cfg.slow_block, cfg.min_training)
    else:
        bob = QuadratureBlock(bob.x, bob.p, 'bob', alice.training_mask)

    return DSPResult(bob, float(delta_f), int(timing), slow_phases)
