# -*- coding: utf-8 -*-
"""
Painel de taxa de chave: assintótica e de tamanho finito no ponto de operação
"""

import pandas as pd
import streamlit as st

from functions.config import LinkConfig
from functions.errors import CVQKDError, NoThresholdError
from functions.harness import MODES
from functions.security import SecurityInputs, noise_threshold, phase_noise_prediction, secret_key_rate


def render_keyrate_panel(cfg: LinkConfig):
    """Renderiza métricas de taxa de chave para um ε informado"""

    eps = st.number_input("Ruído em excesso ε (SNU)", value=0.022, min_value=0.0, step=0.001, format="%.4f")

    try:
        reports = {mode: secret_key_rate(SecurityInputs.from_config(cfg, eps=eps, mode=mode)) for mode in MODES}
    except CVQKDError as e:
        st.error(f"❌ {e}")
        return

    col1, col2, col3, col4 = st.columns(4)
    with col1:
        st.metric("I_AB (bits/símbolo)", f"{reports['asymptotic'].I_AB:.4f}")
    with col2:
        st.metric("S_BE assintótico", f"{reports['asymptotic'].S_BE:.4f}")
    with col3:
        st.metric("R assintótico", f"{reports['asymptotic'].R / 1e6:.3f} Mbps")
    with col4:
        st.metric("R finito", f"{reports['finite'].R / 1e6:.3f} Mbps")

    if reports['finite'].null_rate:
        st.warning("⚠️ Taxa finita nula: o ruído de pior caso supera o limiar")

    st.dataframe(pd.DataFrame([r.as_row() for r in reports.values()]), use_container_width=True)

    col1, col2 = st.columns(2)
    with col1:
        try:
            threshold = noise_threshold(cfg.length_L, SecurityInputs.from_config(cfg), cfg.alpha)
            st.metric("Limiar de ε (modo da configuração)", f"{threshold:.4f}")
        except NoThresholdError:
            st.metric("Limiar de ε (modo da configuração)", "sem limiar")
    with col2:
        predicted = phase_noise_prediction(cfg.V_A, cfg.linewidth_A, cfg.linewidth_B, cfg.f_rep)
        st.metric("ε previsto sem compensação rápida", f"{predicted:.5f}")
