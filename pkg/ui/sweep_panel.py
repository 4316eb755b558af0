# -*- coding: utf-8 -*-
"""
Tabelas de varredura: taxa de chave e limiar de ruído versus distância
"""

import numpy as np
import streamlit as st

from functions.config import LinkConfig
from functions.errors import CVQKDError
from functions.harness import compare_modes, render_csv, threshold_vs_distance


def render_sweep_panel(cfg: LinkConfig):
    col1, col2, col3 = st.columns(3)
    with col1:
        max_distance = st.number_input("Distância máxima (km)", value=100.0, min_value=1.0, step=5.0)
    with col2:
        step = st.number_input("Passo (km)", value=5.0, min_value=0.5, step=0.5)
    with col3:
        eps = st.number_input("ε fixo (SNU)", value=0.022, min_value=0.0, step=0.001,
                              format="%.4f", key="sweep_eps")

    distances = np.arange(0.0, max_distance + step / 2, step)

    if st.button("📈 Calcular varredura", type="primary", use_container_width=True):
        try:
            with st.spinner(f"Calculando {len(distances)} distância(s)..."):
                st.session_state.sweep_frame = compare_modes(cfg, distances, eps)
                st.session_state.threshold_frame = threshold_vs_distance(cfg, distances)
        except CVQKDError as e:
            st.error(f"❌ {e}")
            return

    sweep = st.session_state.get('sweep_frame')
    if sweep is None:
        return

    st.subheader("🔑 Taxa de chave")
    st.dataframe(sweep, use_container_width=True)
    st.download_button("💾 Baixar CSV da varredura", render_csv(sweep, cfg, [f'eps={eps!r}']),
                       file_name="sweep.csv", mime="text/csv")

    thresholds = st.session_state.get('threshold_frame')
    st.subheader("🧱 Limiar de ruído em excesso")
    st.dataframe(thresholds, use_container_width=True)
    st.download_button("💾 Baixar CSV do limiar", render_csv(thresholds, cfg),
                       file_name="threshold.csv", mime="text/csv")
