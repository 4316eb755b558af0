# -*- coding: utf-8 -*-
"""
Configuração do enlace (LinkConfig) e leitura do arquivo chave-valor
Formato: linhas "secao.chave = valor", comentários com '#', chaves desconhecidas são erro
"""

import dataclasses
import hashlib
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Optional

from .errors import ConfigError

# Mapeamento chave do arquivo -> campo do LinkConfig
CONFIG_KEYS = {
    'link.f_rep': 'f_rep',
    'link.sample_rate': 'sample_rate',
    'link.seed': 'seed',
    'link.symbols_per_block': 'symbols_per_block',
    'link.blocks': 'blocks',
    'link.workers': 'workers',
    'link.block_n': 'block_n',
    'link.key_n': 'key_n',
    'link.est_m': 'est_m',
    'transmitter.v_a': 'V_A',
    'transmitter.a_ref': 'A_ref',
    'transmitter.f_m': 'f_m',
    'transmitter.mod_index': 'mod_index',
    'transmitter.carrier_suppression_db': 'carrier_suppression',
    'transmitter.duty_cycle': 'duty_cycle',
    'transmitter.pulse_shape': 'pulse_shape',
    'transmitter.rolloff': 'rolloff',
    'transmitter.modulation_noise': 'modulation_noise',
    'channel.alpha_db_per_km': 'alpha',
    'channel.length_km': 'length_L',
    'channel.delta_f': 'delta_f_AB',
    'channel.delta_f_drift': 'delta_f_drift',
    'channel.linewidth_a': 'linewidth_A',
    'channel.linewidth_b': 'linewidth_B',
    'channel.slow_phase_rate': 'slow_phase_rate',
    'channel.phase_offset': 'phase_offset',
    'channel.pol_isolation_db': 'pol_isolation',
    'receiver.eta': 'eta',
    'receiver.v_el': 'v_el',
    'receiver.shot_sigma': 'shot_sigma',
    'receiver.gain': 'gain',
    'receiver.add_noise': 'add_noise',
    'receiver.adc_bits': 'adc_bits',
    'receiver.adc_full_scale': 'adc_full_scale',
    'receiver.n0_source': 'n0_source',
    'receiver.calibration_symbols': 'calibration_symbols',
    'dsp.quantum_bandwidth_frep': 'quantum_bandwidth_frep',
    'dsp.pilot_bandwidth_frep': 'pilot_bandwidth_frep',
    'dsp.lp_fraction': 'lp_fraction',
    'dsp.training_fraction': 'training_fraction',
    'dsp.slow_block': 'slow_block',
    'dsp.min_training': 'min_training',
    'dsp.fast_compensation': 'fast_compensation',
    'dsp.slow_compensation': 'slow_compensation',
    'dsp.timing_mode': 'timing_mode',
    'dsp.foe_margin_db': 'foe_margin_db',
    'dsp.foe_per_block': 'foe_per_block',
    'dsp.guard_symbols': 'guard_symbols',
    'dsp.pilot_floor': 'pilot_floor',
    'security.beta': 'beta',
    'security.eps_pe': 'eps_PE',
    'security.eps_pa': 'eps_PA',
    'security.eps_bar': 'eps_bar',
    'security.mode': 'mode',
}

FIELD_TO_KEY = {name: key for key, name in CONFIG_KEYS.items()}

CHOICES = {
    'pulse_shape': ('rrc', 'rect'),
    'n0_source': ('analytic', 'measured'),
    'fast_compensation': ('pilot', 'disabled'),
    'timing_mode': ('known', 'auto'),
    'mode': ('asymptotic', 'finite'),
}


@dataclass(frozen=True)
class LinkConfig:
    """Conjunto completo de parâmetros do experimento (unidades SI, SNU, dB)"""

    # enlace e blocos
    f_rep: float = 100e6
    sample_rate: float = 10e9
    seed: int = 20200917
    symbols_per_block: int = 100_000
    blocks: int = 1
    workers: int = 1
    block_n: int = 10_000_000
    key_n: int = 5_000_000
    est_m: int = 5_000_000
    # transmissor
    V_A: float = 3.246
    A_ref: float = 1000.0
    f_m: float = 2e9
    mod_index: float = 0.5
    carrier_suppression: float = 25.0
    duty_cycle: float = 0.5
    pulse_shape: str = 'rrc'
    rolloff: float = 0.2
    modulation_noise: float = 0.0
    # canal
    alpha: float = 0.2
    length_L: float = 25.0
    delta_f_AB: float = 0.69e9
    delta_f_drift: float = 0.0
    linewidth_A: float = 10e3
    linewidth_B: float = 10e3
    slow_phase_rate: float = 1e-2
    phase_offset: float = 0.0
    pol_isolation: float = 50.0
    # receptor
    eta: float = 0.56
    v_el: float = 0.042
    shot_sigma: float = 1.0
    gain: float = 1.0
    add_noise: bool = True
    adc_bits: int = 0
    adc_full_scale: float = 0.0
    n0_source: str = 'analytic'
    calibration_symbols: int = 100_000
    # DSP
    quantum_bandwidth_frep: float = 2.5
    pilot_bandwidth_frep: float = 2.5
    lp_fraction: float = 0.5
    training_fraction: float = 0.01
    slow_block: int = 100_000
    min_training: int = 100
    fast_compensation: str = 'pilot'
    slow_compensation: bool = True
    timing_mode: str = 'known'
    foe_margin_db: float = 10.0
    foe_per_block: bool = True
    guard_symbols: int = 60
    pilot_floor: float = 1e-12
    # segurança
    beta: float = 0.95
    eps_PE: float = 1e-10
    eps_PA: float = 1e-10
    eps_bar: float = 1e-10
    mode: str = 'finite'

    def __post_init__(self):
        self.validate()

    # --- grandezas derivadas ---

    @property
    def samples_per_symbol(self) -> int:
        return int(round(self.sample_rate / self.f_rep))

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def transmittance(self) -> float:
        return transmittance(self.alpha, self.length_L)

    @property
    def quantum_bandwidth(self) -> float:
        return self.quantum_bandwidth_frep * self.f_rep

    @property
    def pilot_bandwidth(self) -> float:
        return self.pilot_bandwidth_frep * self.f_rep

    @property
    def pilot_beat(self) -> float:
        """Frequência com sinal do batimento do piloto usado (banda lateral inferior)"""
        return self.delta_f_AB - self.f_m

    def replace(self, **changes) -> 'LinkConfig':
        return dataclasses.replace(self, **changes)

    def validate(self):
        sps = self.sample_rate / self.f_rep
        if self.f_rep <= 0 or self.sample_rate <= 0:
            raise ConfigError("f_rep e sample_rate devem ser positivos")
        if abs(sps - round(sps)) > 1e-9 * sps or round(sps) < 2:
            raise ConfigError(f"sample_rate/f_rep = {sps} deve ser inteiro >= 2")
        highest = abs(self.delta_f_AB) + self.f_m + self.quantum_bandwidth / 2
        if self.sample_rate < 2 * highest:
            raise ConfigError(
                f"sample_rate {self.sample_rate:.4g} abaixo de Nyquist para o batimento mais alto {highest:.4g}"
            )
        if self.key_n + self.est_m != self.block_n:
            raise ConfigError(f"key_n + est_m ({self.key_n} + {self.est_m}) != block_n ({self.block_n})")
        if not (0 < self.eta <= 1):
            raise ConfigError(f"eta fora de (0, 1]: {self.eta}")
        if self.v_el < 0 or self.V_A <= 0 or self.shot_sigma <= 0:
            raise ConfigError("v_el >= 0, V_A > 0 e shot_sigma > 0 são obrigatórios")
        if not (0 < self.duty_cycle <= 1) or not (0 < self.beta <= 1):
            raise ConfigError("duty_cycle e beta devem estar em (0, 1]")
        for name in ('eps_PE', 'eps_PA', 'eps_bar'):
            if not (0 < getattr(self, name) < 1):
                raise ConfigError(f"{name} deve estar em (0, 1)")
        if not (0 < self.training_fraction < 1):
            raise ConfigError("training_fraction deve estar em (0, 1)")
        if self.symbols_per_block < 1 or self.blocks < 1 or self.workers < 1:
            raise ConfigError("symbols_per_block, blocks e workers devem ser >= 1")
        for name, options in CHOICES.items():
            if getattr(self, name) not in options:
                raise ConfigError(f"{FIELD_TO_KEY[name]} deve ser um de {options}")


# Perfis prontos: plano de frequências do experimento (10 GSa/s, 100 amostras/símbolo)
PROFILES = {
    'desk': {},
    'field': {'symbols_per_block': 5_000_000, 'slow_block': 10_000},
    'ideal': {
        'linewidth_A': 0.0, 'linewidth_B': 0.0, 'slow_phase_rate': 0.0,
        'pol_isolation': math.inf, 'carrier_suppression': math.inf,
    },
}


def get_profile(name: str) -> LinkConfig:
    if name not in PROFILES:
        raise ConfigError(f"Perfil desconhecido: {name} (disponíveis: {', '.join(PROFILES)})")
    return LinkConfig(**PROFILES[name])


def transmittance(alpha_db_per_km: float, length_km: float) -> float:
    """T = 10^(-alpha L / 10)"""
    return float(10.0 ** (-alpha_db_per_km * length_km / 10.0))


def _parse_value(field_name: str, raw: str, line: Optional[int] = None):
    field_type = {f.name: f.type for f in dataclasses.fields(LinkConfig)}[field_name]
    text = raw.strip().strip('"').strip("'")
    try:
        if field_type is bool:
            lowered = text.lower()
            if lowered in ('true', 'yes', 'on', '1'):
                return True
            if lowered in ('false', 'no', 'off', '0'):
                return False
            raise ValueError(text)
        if field_type is int:
            value = float(text)
            if not value.is_integer():
                raise ValueError(text)
            return int(value)
        if field_type is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"valor inválido para {FIELD_TO_KEY[field_name]}: {raw!r}", line)


def _detect_encoding(path: Path) -> str:
    for encoding in ('utf-8', 'latin-1'):
        try:
            path.read_text(encoding=encoding)
            return encoding
        except UnicodeDecodeError:
            continue
    return 'utf-8'


def parse_config_text(text: str, base: Optional[LinkConfig] = None) -> LinkConfig:
    """Interpreta o texto chave-valor sobre uma configuração base"""
    changes: Dict[str, object] = {}
    seen = set()
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"linha sem '=': {raw_line.strip()!r}", number)
        key, value = (part.strip() for part in line.split('=', 1))
        key = key.lower()
        if key == 'profile':
            base = get_profile(value)
            continue
        if key not in CONFIG_KEYS:
            raise ConfigError(f"chave desconhecida: {key}", number)
        if key in seen:
            raise ConfigError(f"chave duplicada: {key}", number)
        seen.add(key)
        changes[CONFIG_KEYS[key]] = _parse_value(CONFIG_KEYS[key], value, number)
    return dataclasses.replace(base or LinkConfig(), **changes)


def load_config(path: Optional[str] = None, overrides: Iterable[str] = (),
                base: Optional[LinkConfig] = None) -> LinkConfig:
    """
    Carrega a configuração de um arquivo e aplica sobrescritas "secao.chave=valor"

    Returns:
        LinkConfig validado
    """
    cfg = base or LinkConfig()
    if path:
        config_path = Path(path)
        if not config_path.is_file():
            raise ConfigError(f"arquivo de configuração não encontrado: {path}")
        cfg = parse_config_text(config_path.read_text(encoding=_detect_encoding(config_path)), cfg)
    overrides = list(overrides)
    if overrides:
        cfg = parse_config_text('\n'.join(overrides), cfg)
    return cfg


def dump_config(cfg: LinkConfig) -> str:
    """Listagem canônica, uma chave por linha, na ordem de CONFIG_KEYS"""
    lines = []
    for key, name in CONFIG_KEYS.items():
        value = getattr(cfg, name)
        if isinstance(value, bool):
            value = 'true' if value else 'false'
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return '\n'.join(lines) + '\n'


def config_hash(cfg: LinkConfig) -> str:
    return hashlib.sha256(dump_config(cfg).encode('utf-8')).hexdigest()
