# -*- coding: utf-8 -*-
"""
Formulário de parâmetros do enlace
"""

import streamlit as st

from functions.config import PROFILES, LinkConfig, dump_config, get_profile, parse_config_text
from functions.errors import ConfigError


def render_parameter_form() -> LinkConfig:
    """Renderiza os parâmetros principais e devolve o LinkConfig validado (ou None)"""

    col1, col2 = st.columns([1, 3])
    with col1:
        profile = st.selectbox("Perfil base", list(PROFILES), index=0,
                               help="desk: plano de 10 GSa/s com 10⁵ símbolos por bloco")
    base = get_profile(profile)

    st.subheader("📡 Transmissor e canal")
    col1, col2, col3 = st.columns(3)
    with col1:
        V_A = st.number_input("V_A (SNU)", value=base.V_A, min_value=0.01, step=0.1, format="%.3f")
        length = st.number_input("Distância (km)", value=base.length_L, min_value=0.0, step=5.0)
    with col2:
        alpha = st.number_input("Atenuação (dB/km)", value=base.alpha, min_value=0.0, step=0.01)
        beta = st.number_input("β (eficiência de reconciliação)", value=base.beta,
                               min_value=0.01, max_value=1.0, step=0.01)
    with col3:
        linewidth = st.number_input("Largura de linha de cada laser (kHz)",
                                    value=base.linewidth_A / 1e3, min_value=0.0, step=1.0)
        f_rep = st.number_input("Taxa de repetição (MHz)", value=base.f_rep / 1e6, min_value=1.0, step=10.0)

    st.subheader("🔬 Detector")
    col1, col2 = st.columns(2)
    with col1:
        eta = st.number_input("η (eficiência)", value=base.eta, min_value=0.01, max_value=1.0, step=0.01)
    with col2:
        v_el = st.number_input("v_el (SNU)", value=base.v_el, min_value=0.0, step=0.001, format="%.3f")

    with st.expander("⚙️ Chaves avançadas (secao.chave = valor)"):
        extra = st.text_area("Sobrescritas", value="", height=120,
                             placeholder="dsp.training_fraction = 0.01\nsecurity.eps_pe = 1e-10")

    try:
        cfg = base.replace(
            V_A=V_A, length_L=length, alpha=alpha, beta=beta, eta=eta, v_el=v_el,
            linewidth_A=linewidth * 1e3, linewidth_B=linewidth * 1e3,
            f_rep=f_rep * 1e6, sample_rate=base.samples_per_symbol * f_rep * 1e6,
        )
        if extra.strip():
            cfg = parse_config_text(extra, cfg)
    except ConfigError as e:
        st.error(f"❌ Configuração inválida: {e}")
        return None

    st.session_state.config_text = dump_config(cfg)
    st.caption(f"Transmitância T = {cfg.transmittance:.4f}")
    return cfg
