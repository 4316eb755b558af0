# -*- coding: utf-8 -*-
"""
Fixtures compartilhadas: ponto de operação do experimento e configurações pequenas
"""

import pytest

from functions.config import LinkConfig, get_profile
from functions.security import SecurityInputs

LINK_T = 10 ** (-0.5)


@pytest.fixture
def operating_point():
    """V_A = 3.246, 25 km a 0.2 dB/km, η = 0.56, v_el = 0.042, β = 0.95, ε = 0.022"""
    return SecurityInputs(
        V_A=3.246, T=LINK_T, eps=0.022, eta=0.56, v_el=0.042, beta=0.95, f_rep=100e6,
        mode='asymptotic', n=5_000_000, m=5_000_000, N=10_000_000,
        eps_PE=1e-10, eps_PA=1e-10, eps_bar=1e-10,
    )


@pytest.fixture
def small_cfg():
    """Plano de 10 GSa/s com blocos curtos para testes rápidos"""
    return LinkConfig(symbols_per_block=4_000, training_fraction=0.05, guard_symbols=60)


@pytest.fixture
def ideal_cfg():
    """Sem ruído de fase, sem deriva, sem vazamento e sem ruído de detecção"""
    return get_profile('ideal').replace(symbols_per_block=4_000, training_fraction=0.05, add_noise=False)
