# -*- coding: utf-8 -*-
"""
Interface de progresso da simulação de ponta a ponta
"""

import streamlit as st

from functions.config import LinkConfig
from functions.errors import CVQKDError
from functions.harness import ExperimentReport, render_csv, run_experiment

MAX_UI_SYMBOLS = 200_000


def render_simulation_panel(cfg: LinkConfig):
    """
    Renderiza a execução por blocos com barra de progresso e a tabela de monitoramento
    """
    col1, col2 = st.columns(2)
    with col1:
        blocks = st.number_input("Blocos", value=2, min_value=1, max_value=50, step=1)
    with col2:
        symbols = st.number_input("Símbolos por bloco", value=20_000, min_value=2_000,
                                  max_value=MAX_UI_SYMBOLS, step=1_000)

    if st.button("▶️ Simular", type="primary", use_container_width=True):
        run_cfg = cfg.replace(symbols_per_block=int(symbols), blocks=int(blocks))
        progress_bar = st.progress(0)
        status_text = st.empty()

        def update(done: int, total: int):
            progress_bar.progress(done / total)
            status_text.text(f"Bloco {done} de {total}")

        try:
            with st.spinner("Simulando..."):
                st.session_state.report = run_experiment(run_cfg, progress=update)
        except CVQKDError as e:
            st.error(f"❌ {e}")
            return
        finally:
            status_text.empty()

    report = st.session_state.get('report')
    if report is not None:
        render_report(report)


def render_report(report: ExperimentReport):
    """Métricas agregadas e tabela por bloco"""

    st.divider()
    summary = report.summary()
    col1, col2, col3, col4 = st.columns(4)
    with col1:
        st.metric("ε̂ agregado", f"{report.pooled.eps_hat:.5f}")
    with col2:
        st.metric("T̂ agregado", f"{report.pooled.T_hat:.5f}")
    with col3:
        st.metric("R finito", f"{report.keyrate['finite'].R / 1e6:.3f} Mbps")
    with col4:
        st.metric("Tempo", f"{report.wall_time:.1f} s")

    if report.pooled.unphysical:
        st.warning("⚠️ Estimativa não física (T̂ > 1 ou ε̂ < 0)")
    st.caption(f"ε̂ médio por bloco: {summary['eps_hat_mean']:.5f} ± {summary['eps_hat_std']:.5f}")

    st.subheader("📋 Monitoramento por bloco")
    frame = report.per_block_frame()
    st.dataframe(frame, use_container_width=True)
    st.download_button("💾 Baixar CSV por bloco", render_csv(frame, report.config),
                       file_name="blocks.csv", mime="text/csv")
    st.dataframe(report.summary_frame(), use_container_width=True)
