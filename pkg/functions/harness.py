# -*- coding: utf-8 -*-
"""
Orquestração dos experimentos: blocos simulados de ponta a ponta, varreduras de
distância e de limiar de ruído, e saída em CSV
"""

import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from loguru import logger

from .channel import apply_channel, laser_phase_walk
from .config import LinkConfig, config_hash, dump_config, transmittance
from .dsp import ReceiveChain, process_block, training_mask
from .errors import BlockFailure, ContractError, CVQKDError, NoThresholdError
from .model import ComplexWaveform, QuadratureBlock
from .receiver import DetectorParams, analytic_n0, calibrate_shot_noise, heterodyne_detect
from .security import (ChannelEstimate, KeyRateReport, SecurityInputs, WorstCaseBounds, noise_threshold,
                       secret_key_rate, sufficient_statistics, worst_case_bounds)
from .seeding import derive_seed
from .transmitter import apply_modulation_noise, draw_gaussian_symbols, synthesize_pilot, synthesize_quantum
from .waveform_io import persist_waveform

FLOAT_FORMAT = '%.9g'
MODES = ('asymptotic', 'finite')

ProgressCallback = Callable[[int, int], None]


@dataclass(frozen=True)
class BlockResult:
    block_index: int
    estimate: ChannelEstimate
    bounds: WorstCaseBounds
    delta_f_hat: float
    timing_offset: int
    sums: tuple
    alice: Optional[QuadratureBlock] = None
    bob: Optional[QuadratureBlock] = None

    def as_row(self) -> dict:
        return {
            'block_index': self.block_index,
            'eps_hat': self.estimate.eps_hat,
            'T_hat': self.estimate.T_hat,
            'eps_max': self.bounds.eps_max,
            'T_min': self.bounds.T_min,
            'delta_f_hat': self.delta_f_hat,
            'timing_offset': self.timing_offset,
            'm_used': self.estimate.m_used,
        }


@dataclass
class ExperimentReport:
    """Série por bloco, estimativa agregada e taxas de chave"""

    config: LinkConfig
    blocks: List[BlockResult]
    pooled: ChannelEstimate
    keyrate: Dict[str, KeyRateReport]
    n0: float
    eps_threshold: float = float('nan')
    wall_time: float = 0.0
    config_echo: str = field(default='')

    def per_block_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([b.as_row() for b in self.blocks])
        frame['eps_threshold'] = self.eps_threshold
        return frame

    def summary(self) -> Dict[str, float]:
        """Médias e desvios recalculáveis a partir da série por bloco"""
        frame = self.per_block_frame()
        stats = {}
        for column in ('eps_hat', 'T_hat', 'eps_max', 'T_min'):
            stats[f'{column}_mean'] = float(frame[column].mean())
            stats[f'{column}_std'] = float(frame[column].std(ddof=1)) if len(frame) > 1 else 0.0
        return stats

    def summary_frame(self) -> pd.DataFrame:
        rows = []
        for mode in MODES:
            row = self.keyrate[mode].as_row()
            row.update({'T_hat_pooled': self.pooled.T_hat, 'eps_hat_pooled': self.pooled.eps_hat,
                        'blocks': len(self.blocks), 'N0': self.n0})
            rows.append(row)
        return pd.DataFrame(rows)


def reference_noise(cfg: LinkConfig) -> tuple:
    """(N0 físico da cadeia, N0 usado na normalização)"""
    det = DetectorParams.from_config(cfg)
    chain = ReceiveChain.quantum(cfg)
    analytic = analytic_n0(det, chain)
    if cfg.n0_source == 'measured':
        measured = calibrate_shot_noise(det, chain, cfg.calibration_symbols,
                                        derive_seed(cfg.seed, 'calibration')).n0
        logger.info(f"N0 medido {measured:.6g} (analítico {analytic:.6g})")
        return analytic, measured
    return analytic, analytic


def off_grid_frequencies(cfg: LinkConfig) -> List[str]:
    """
    Frequências (Δf_AB, f_m) que não completam um número inteiro de ciclos no bloco
    simulado. Fora da grade da FFT do bloco a cadeia deixa de ser exata no caso sem ruído
    """
    duration = (cfg.symbols_per_block + 2 * cfg.guard_symbols) / cfg.f_rep
    names = []
    for name, freq in (('delta_f_AB', cfg.delta_f_AB), ('f_m', cfg.f_m)):
        cycles = freq * duration
        if abs(cycles - round(cycles)) > 1e-6:
            names.append(name)
    return names


def dump_currents(directory: Union[str, Path], block_index: int, sig_current: np.ndarray,
                  ref_current: np.ndarray, sample_rate: float) -> None:
    """Fotocorrentes do bloco em bloco_NNNN_sig.cvqw e bloco_NNNN_ref.cvqw"""
    for name, current in (('sig', sig_current), ('ref', ref_current)):
        path = Path(directory) / f'bloco_{block_index:04d}_{name}.cvqw'
        persist_waveform(ComplexWaveform(current, sample_rate), path)


def simulate_block(cfg: LinkConfig, block_index: int, n0_physical: float, n0_used: float,
                   waveform_dir: Optional[Union[str, Path]] = None, keep_quadratures: bool = False) -> BlockResult:
    """
    sintetiza -> canal -> detecção -> DSP -> estimação de um bloco

    Args:
        waveform_dir: quando informado, grava as fotocorrentes do bloco (sinal e piloto)
        keep_quadratures: anexa ao resultado as quadraturas de Alice e de Bob
    """
    sps = cfg.samples_per_symbol
    guard = cfg.guard_symbols
    n_keep = cfg.symbols_per_block
    n_total = n_keep + 2 * guard
    n_samples = n_total * sps

    def seed(tag: str):
        return derive_seed(cfg.seed, tag, block_index)

    det = DetectorParams.from_config(cfg)
    scale = det.field_scale(n0_physical)

    symbols = draw_gaussian_symbols(n_total, cfg.V_A, seed('symbols'))
    emitted = apply_modulation_noise(symbols, cfg.modulation_noise, seed('modulation_noise'))
    phi_a = laser_phase_walk(n_samples, cfg.linewidth_A, cfg.dt, seed('laser_a'), 'laser_A')
    phi_b = laser_phase_walk(n_samples, cfg.linewidth_B, cfg.dt, seed('laser_b'), 'laser_B')

    quantum = synthesize_quantum(emitted, cfg, phi_a.values, scale)
    pilot = synthesize_pilot(cfg, phi_a.values, scale)
    sig_path, ref_path = apply_channel(quantum, pilot, cfg, seed('channel_sig'))
    del quantum, pilot

    sig_current = heterodyne_detect(sig_path, det, phi_b, seed('detector_sig'))
    ref_current = heterodyne_detect(ref_path, det, phi_b, seed('detector_ref'))
    del sig_path, ref_path
    if waveform_dir is not None:
        dump_currents(waveform_dir, block_index, sig_current, ref_current, cfg.sample_rate)

    keep = np.arange(guard, guard + n_keep)
    alice = QuadratureBlock(symbols.x[keep], symbols.p[keep], 'alice',
                            training_mask(n_keep, cfg.training_fraction))

    delta_f = None if cfg.foe_per_block else cfg.delta_f_AB
    result = process_block(sig_current, ref_current, cfg, n0_used, alice, guard, delta_f)

    sums = sufficient_statistics(alice, result.block)
    estimate = ChannelEstimate.from_sums(*sums, eta=cfg.eta, v_el=cfg.v_el)
    # intervalo do próprio bloco: m = símbolos efetivamente usados na estimação
    bounds = worst_case_bounds(estimate, cfg.V_A, cfg.eps_PE, cfg.eta, cfg.v_el, estimate.m_used)
    logger.debug(f"Bloco {block_index}: ε̂={estimate.eps_hat:.5f} T̂={estimate.T_hat:.5f} "
                 f"Δf̂={result.delta_f_hat / 1e9:.6f} GHz")
    kept = (alice, result.block) if keep_quadratures else (None, None)
    return BlockResult(block_index, estimate, bounds, result.delta_f_hat, result.timing_offset, sums, *kept)


def _guarded_block(cfg, block_index, n0_physical, n0_used, waveform_dir) -> BlockResult:
    try:
        return simulate_block(cfg, block_index, n0_physical, n0_used, waveform_dir)
    except (CVQKDError, ValueError, FloatingPointError, OSError) as e:
        raise BlockFailure(block_index, e) from e


def run_experiment(cfg: LinkConfig, blocks: Optional[int] = None,
                   progress: Optional[ProgressCallback] = None,
                   waveform_dir: Optional[Union[str, Path]] = None) -> ExperimentReport:
    """
    Executa 'blocks' blocos independentes e agrega as estimativas

    Determinístico dado cfg.seed; a ordem de execução das threads não altera o resultado
    """
    blocks = cfg.blocks if blocks is None else blocks
    if blocks < 1:
        raise ContractError(f"blocks deve ser >= 1, recebeu {blocks}")

    started = time.perf_counter()
    if waveform_dir is not None:
        waveform_dir = Path(waveform_dir)
    n0_physical, n0_used = reference_noise(cfg)
    off_grid = off_grid_frequencies(cfg)
    if off_grid:
        logger.warning(f"{', '.join(off_grid)} fora da grade de frequência do bloco; "
                       "ajuste symbols_per_block ou guard_symbols")
    logger.info(f"Iniciando {blocks} bloco(s) de {cfg.symbols_per_block} símbolos, workers={cfg.workers}")

    results: List[Optional[BlockResult]] = [None] * blocks
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(_guarded_block, cfg, i, n0_physical, n0_used, waveform_dir) for i in range(blocks)]
        for done, future in enumerate(futures, start=1):
            try:
                result = future.result()
            except BlockFailure as failure:
                logger.error(str(failure))
                for pending in futures:
                    pending.cancel()
                raise
            results[result.block_index] = result
            if progress:
                progress(done, blocks)

    totals = np.sum([r.sums[:3] for r in results], axis=0)
    m_total = sum(r.sums[3] for r in results)
    pooled = ChannelEstimate.from_sums(totals[0], totals[1], totals[2], m_total, cfg.eta, cfg.v_el)

    keyrate = {}
    for mode in MODES:
        keyrate[mode] = secret_key_rate(SecurityInputs.from_config(cfg, mode=mode), estimate=pooled)

    try:
        threshold = noise_threshold(cfg.length_L, SecurityInputs.from_config(cfg), cfg.alpha)
    except NoThresholdError as e:
        logger.warning(str(e))
        threshold = float('nan')

    wall_time = time.perf_counter() - started
    logger.info(f"Concluído em {wall_time:.1f}s: ε̂={pooled.eps_hat:.5f}, T̂={pooled.T_hat:.5f}, "
                f"R_finito={keyrate['finite'].R / 1e6:.3f} Mbps")
    return ExperimentReport(cfg, results, pooled, keyrate, n0_used, threshold, wall_time, dump_config(cfg))


def _check_distances(distances: Sequence[float]) -> np.ndarray:
    values = np.asarray(distances, dtype=np.float64)
    if values.size == 0:
        raise ContractError("Lista de distâncias vazia")
    if np.any(np.diff(values) <= 0) or np.any(values < 0):
        raise ContractError("Distâncias devem ser não negativas e crescentes")
    return values


def sweep_distance(cfg: LinkConfig, distances: Sequence[float], eps_fixed: float,
                   mode: Optional[str] = None) -> pd.DataFrame:
    """Taxa de chave versus distância, só com o cálculo de segurança"""
    base = SecurityInputs.from_config(cfg, eps=eps_fixed, mode=mode)
    rows = []
    for length in _check_distances(distances):
        T = transmittance(cfg.alpha, length)
        report = secret_key_rate(base.replace(T=T))
        rows.append({'distance_km': length, 'T': T, 'I_AB': report.I_AB, 'S_BE': report.S_BE,
                     'Delta_n': report.delta_n, 'R_bps': report.R})
    return pd.DataFrame(rows, columns=['distance_km', 'T', 'I_AB', 'S_BE', 'Delta_n', 'R_bps'])


def compare_modes(cfg: LinkConfig, distances: Sequence[float], eps_fixed: float) -> pd.DataFrame:
    """Varredura assintótica e finita numa única tabela, com a coluna 'mode'"""
    frames = []
    for mode in MODES:
        frame = sweep_distance(cfg, distances, eps_fixed, mode)
        frame.insert(0, 'mode', mode)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def threshold_vs_distance(cfg: LinkConfig, distances: Sequence[float], mode: Optional[str] = None) -> pd.DataFrame:
    """Maior ε tolerável por distância; NaN onde não há taxa positiva"""
    base = SecurityInputs.from_config(cfg, mode=mode)
    rows = []
    for length in _check_distances(distances):
        try:
            threshold = noise_threshold(length, base, cfg.alpha)
        except NoThresholdError as e:
            logger.warning(str(e))
            threshold = float('nan')
        rows.append({'distance_km': length, 'T': transmittance(cfg.alpha, length), 'eps_threshold': threshold})
    return pd.DataFrame(rows, columns=['distance_km', 'T', 'eps_threshold'])


def render_csv(frame: pd.DataFrame, cfg: LinkConfig, comments: Sequence[str] = ()) -> str:
    """Cabeçalho, depois '#' com hash da configuração e semente; floats com 9 dígitos"""
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    lines = [f'# config_hash={config_hash(cfg)}', f'# seed={cfg.seed}']
    lines.extend(f'# {c}' for c in comments)
    header, _, body = buffer.getvalue().partition('\n')
    return header + '\n' + '\n'.join(lines) + '\n' + body


def write_csv(frame: pd.DataFrame, cfg: LinkConfig, path: Optional[Union[str, Path]] = None,
              comments: Sequence[str] = ()) -> str:
    """Grava o CSV em 'path' (ou só retorna o texto quando path é None)"""
    text = render_csv(frame, cfg, comments)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        logger.info(f"CSV gravado em {path}")
    return text


def calibration_report(cfg: LinkConfig, n_symbols: Optional[int] = None) -> pd.DataFrame:
    """Calibração de ruído de disparo comparada com o valor analítico"""
    det = DetectorParams.from_config(cfg)
    chain = ReceiveChain.quantum(cfg)
    calibration = calibrate_shot_noise(det, chain, n_symbols or cfg.calibration_symbols,
                                       derive_seed(cfg.seed, 'calibration'))
    return pd.DataFrame([{
        'N0_measured': calibration.n0,
        'N0_analytic': analytic_n0(det, chain),
        'electronic_variance': calibration.electronic_variance,
        'v_el_measured': calibration.v_el,
        'v_el_configured': cfg.v_el,
        'symbols': calibration.n_symbols,
    }])

