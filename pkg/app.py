# -*- coding: utf-8 -*-
import streamlit as st

from ui.parameter_form import render_parameter_form
from ui.keyrate_panel import render_keyrate_panel
from ui.sweep_panel import render_sweep_panel
from ui.simulation_panel import render_simulation_panel
from functions.logging_setup import configure_logging, setup_encoding

# Configurar codificação e logging no início da aplicação
setup_encoding()
configure_logging("INFO")


def main():
    st.set_page_config(
        page_title="Simulador CV-QKD LLO",
        page_icon="🔐",
        layout="wide"
    )

    st.title("🔐 CV-QKD com oscilador local local")
    st.markdown("Tom piloto multiplexado em frequência e polarização, compensação de fase e taxa de chave")

    # Inicializar session state
    if 'report' not in st.session_state:
        st.session_state.report = None
    if 'sweep_frame' not in st.session_state:
        st.session_state.sweep_frame = None
    if 'threshold_frame' not in st.session_state:
        st.session_state.threshold_frame = None

    # Etapa 1: Parâmetros
    st.header("1. Parâmetros do Enlace")
    cfg = render_parameter_form()
    if cfg is None:
        return

    # Etapa 2: Taxa de chave no ponto de operação
    st.header("2. Taxa de Chave")
    render_keyrate_panel(cfg)

    # Etapa 3: Varreduras
    st.header("3. Varredura de Distância")
    render_sweep_panel(cfg)

    # Etapa 4: Simulação
    st.header("4. Simulação de Ponta a Ponta")
    render_simulation_panel(cfg)


if __name__ == "__main__":
    main()
