# -*- coding: utf-8 -*-
"""
Configuração do loguru e da codificação do console para CLI e interface
"""

import sys
from typing import Optional

from loguru import logger

LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {name}:{function} - {message}"


def setup_encoding() -> None:
    """
    Força UTF-8 em stdout/stderr (consoles Windows usam cp1252)
    O locale não é alterado: o CSV precisa do ponto decimal
    """
    for stream in (sys.stdout, sys.stderr):
        if getattr(stream, 'encoding', 'utf-8').lower() != 'utf-8' and hasattr(stream, 'reconfigure'):
            stream.reconfigure(encoding='utf-8')


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Substitui o sink padrão; arquivo opcional com rotação"""
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)
    if log_file:
        logger.add(log_file, level="DEBUG", rotation="10 MB", encoding="utf-8")
