# -*- coding: utf-8 -*-
"""
Persistência de formas de onda em arquivo binário little-endian

Cabeçalho: "CVQW", versão (u32), sample_rate (f64), número de amostras (u64),
layout (u8: 0 = real, 1 = complexo intercalado); corpo em float64
"""

from pathlib import Path
from typing import Union

import numpy as np
from loguru import logger

from .errors import WaveformFormatError
from .model import ComplexWaveform

MAGIC = b'CVQW'
FORMAT_VERSION = 1
LAYOUT_REAL = 0
LAYOUT_COMPLEX = 1

HEADER_DTYPE = np.dtype([
    ('magic', 'S4'),
    ('version', '<u4'),
    ('sample_rate', '<f8'),
    ('count', '<u8'),
    ('layout', 'u1'),
])
BODY_DTYPE = np.dtype('<f8')


def persist_waveform(wave: ComplexWaveform, path: Union[str, Path]) -> Path:
    """Grava a forma de onda; sinais reais usam layout 0"""
    path = Path(path)
    layout = LAYOUT_COMPLEX if wave.is_complex else LAYOUT_REAL
    header = np.array([(MAGIC, FORMAT_VERSION, wave.sample_rate, len(wave), layout)], dtype=HEADER_DTYPE)
    if layout == LAYOUT_COMPLEX:
        body = np.empty(2 * len(wave), dtype=BODY_DTYPE)
        body[0::2] = wave.samples.real
        body[1::2] = wave.samples.imag
    else:
        body = np.ascontiguousarray(wave.samples.real, dtype=BODY_DTYPE)

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as handle:
        handle.write(header.tobytes())
        handle.write(body.tobytes())
    logger.debug(f"Forma de onda gravada: {path} ({len(wave)} amostras, layout {layout})")
    return path


def load_waveform(path: Union[str, Path]) -> ComplexWaveform:
    """
    Lê um arquivo gravado por persist_waveform

    Raises:
        WaveformFormatError: magic, versão, layout ou tamanho do corpo inválidos
    """
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < HEADER_DTYPE.itemsize:
        raise WaveformFormatError(
            f"{path.name}: cabeçalho truncado ({len(raw)} bytes, esperado {HEADER_DTYPE.itemsize})"
        )

    header = np.frombuffer(raw, dtype=HEADER_DTYPE, count=1)[0]
    if bytes(header['magic']) != MAGIC:
        raise WaveformFormatError(f"{path.name}: magic inválido {bytes(header['magic'])!r}")
    if int(header['version']) != FORMAT_VERSION:
        raise WaveformFormatError(
            f"{path.name}: versão {int(header['version'])} não suportada (suportada: {FORMAT_VERSION})"
        )
    layout = int(header['layout'])
    if layout not in (LAYOUT_REAL, LAYOUT_COMPLEX):
        raise WaveformFormatError(f"{path.name}: layout desconhecido {layout}")

    count = int(header['count'])
    values_per_sample = 2 if layout == LAYOUT_COMPLEX else 1
    expected = count * values_per_sample * BODY_DTYPE.itemsize
    actual = len(raw) - HEADER_DTYPE.itemsize
    if actual != expected:
        raise WaveformFormatError(f"{path.name}: corpo com {actual} bytes, esperado {expected}")

    body = np.frombuffer(raw, dtype=BODY_DTYPE, offset=HEADER_DTYPE.itemsize)
    # pares (re, im) lidos diretamente como complexo: preserva o sinal de -0.0
    samples = body.view('<c16').copy() if layout == LAYOUT_COMPLEX else body.copy()
    return ComplexWaveform(samples, float(header['sample_rate']))
