# -*- coding: utf-8 -*-
"""
Derivação determinística de sementes: (semente raiz, módulo, bloco)
Nunca usar hash() do Python, que é aleatorizado por processo
"""

import zlib

import numpy as np

from .errors import ContractError

# Rótulos fixos de cada consumidor de aleatoriedade
TAGS = (
    'symbols', 'modulation_noise', 'laser_a', 'laser_b',
    'channel_sig', 'detector_sig', 'detector_ref', 'calibration',
)


def tag_id(tag: str) -> int:
    return zlib.crc32(tag.encode('utf-8')) & 0xFFFFFFFF


def derive_seed(root: int, tag: str, block_index: int = 0) -> np.random.SeedSequence:
    """Sub-fluxo independente para (root, tag, block_index)"""
    if tag not in TAGS:
        raise ContractError(f"rótulo de semente desconhecido: {tag}")
    return np.random.SeedSequence(entropy=int(root) & 0xFFFFFFFFFFFFFFFF,
                                  spawn_key=(tag_id(tag), int(block_index)))


def make_rng(seed) -> np.random.Generator:
    """Aceita inteiro ou SeedSequence"""
    return np.random.default_rng(seed)


def child_seeds(seed, count: int) -> list:
    """Filhos determinísticos sem alterar o estado de 'seed' (spawn() alteraria)"""
    parent = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    return [np.random.SeedSequence(entropy=parent.entropy, spawn_key=tuple(parent.spawn_key) + (i,))
            for i in range(count)]
