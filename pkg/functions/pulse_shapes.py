# -*- coding: utf-8 -*-
"""
Formatos de pulso do transmissor e filtros casados do receptor
Os pulsos são circulares no bloco: a resposta em frequência tem n_samples pontos
(ordem de fftfreq) e o pulso no tempo tem a âncora na amostra 0, com p[0] = 1
"""

from typing import Dict, Type

import numpy as np
from scipy import fft as sp_fft

from .errors import ConfigError, DomainError


class PulseShape:
    """Classe base para formatos de pulso"""

    name = 'base'

    def __init__(self, duty_cycle: float = 0.5):
        if not (0 < duty_cycle <= 1):
            raise DomainError(f"duty_cycle deve estar em (0, 1], recebeu {duty_cycle}")
        self.duty_cycle = duty_cycle

    def response(self, n_samples: int, samples_per_symbol: int) -> np.ndarray:
        """Método a ser implementado pelas subclasses"""
        raise NotImplementedError

    def pulse_samples(self, samples_per_symbol: int) -> float:
        return self.duty_cycle * samples_per_symbol

    def waveform(self, n_samples: int, samples_per_symbol: int) -> np.ndarray:
        """Pulso no tempo (circular, âncora na amostra 0)"""
        return sp_fft.ifft(self.response(n_samples, samples_per_symbol)).real

    def matched_response(self, n_samples: int, samples_per_symbol: int) -> np.ndarray:
        """Filtro casado de ganho unitário: sum(w p) = 1"""
        r = self.response(n_samples, samples_per_symbol)
        return np.conj(r) / np.mean(np.abs(r) ** 2)


class RectangularPulse(PulseShape):
    """Pulso retangular: janela aberta de duty_cycle/f_rep a partir da âncora"""

    name = 'rect'

    def width(self, samples_per_symbol: int) -> int:
        return max(1, int(round(self.pulse_samples(samples_per_symbol))))

    def response(self, n_samples: int, samples_per_symbol: int) -> np.ndarray:
        width = self.width(samples_per_symbol)
        if width > n_samples:
            raise DomainError(f"Pulso de {width} amostras não cabe em {n_samples}")
        window = np.zeros(n_samples)
        window[:width] = 1.0
        return sp_fft.fft(window)


class RootRaisedCosinePulse(PulseShape):
    """
    Raiz de cosseno levantado comprimida na largura do pulso (duty_cycle/f_rep),
    definida pelo espectro: banda limitada a (1 + rolloff)/(2 duty_cycle) f_rep

    Com período inteiro e n_samples múltiplo de 2 períodos, o cascata pulso + filtro
    casado é Nyquist exato na grade da FFT (ISI nula nos instantes de símbolo)
    """

    name = 'rrc'

    def __init__(self, duty_cycle: float = 0.5, rolloff: float = 0.2):
        super().__init__(duty_cycle)
        if not (0 < rolloff <= 1):
            raise DomainError(f"rolloff deve estar em (0, 1], recebeu {rolloff}")
        self.rolloff = rolloff

    def band_edge(self, sample_rate: float, samples_per_symbol: int) -> float:
        """Maior frequência ocupada pelo pulso, em Hz"""
        return (1 + self.rolloff) / (2 * self.pulse_samples(samples_per_symbol)) * sample_rate

    def response(self, n_samples: int, samples_per_symbol: int) -> np.ndarray:
        period = self.pulse_samples(samples_per_symbol)
        beta = self.rolloff
        f = np.abs(sp_fft.fftfreq(n_samples))
        inner = (1 - beta) / (2 * period)
        outer = (1 + beta) / (2 * period)

        amplitude = np.zeros(n_samples)
        amplitude[f <= inner] = 1.0
        edge = (f > inner) & (f <= outer)
        # raiz de 0.5 (1 + cos(.)) = cos(./2)
        amplitude[edge] = np.cos(np.pi * period / (2 * beta) * (f[edge] - inner))
        return amplitude / np.mean(amplitude)


PULSE_SHAPES: Dict[str, Type[PulseShape]] = {
    'rect': RectangularPulse,
    'rrc': RootRaisedCosinePulse,
}


def get_pulse_shape(name: str, duty_cycle: float = 0.5, rolloff: float = 0.2) -> PulseShape:
    """Retorna a instância do formato pedido"""
    shape_class = PULSE_SHAPES.get(name)
    if shape_class is None:
        raise ConfigError(f"Formato de pulso desconhecido: {name}")
    if shape_class is RootRaisedCosinePulse:
        return shape_class(duty_cycle, rolloff)
    return shape_class(duty_cycle)


def pulse_for(cfg) -> PulseShape:
    return get_pulse_shape(cfg.pulse_shape, cfg.duty_cycle, cfg.rolloff)
