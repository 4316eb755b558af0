# -*- coding: utf-8 -*-
"""
Hierarquia de exceções do simulador
Todas derivam de CVQKDError para que CLI e interface capturem um único tipo
"""

from typing import Optional


class CVQKDError(Exception):
    """Erro base do pacote"""


class DomainError(CVQKDError, ValueError):
    """Argumento fora do domínio matemático da operação"""


class ContractError(CVQKDError, ValueError):
    """Formas, comprimentos ou taxas de amostragem incompatíveis"""


class AliasingError(CVQKDError, ValueError):
    """Corte do passa-baixas maior ou igual à frequência de conversão"""


class DetectionError(CVQKDError):
    """Nenhuma raia espectral acima do piso de ruído"""


class PilotDropoutError(CVQKDError):
    """Potência do piloto abaixo do piso em algum símbolo"""

    def __init__(self, symbol_index: int, power: float, floor: float):
        self.symbol_index = symbol_index
        self.power = power
        self.floor = floor
        super().__init__(
            f"Queda do piloto no símbolo {symbol_index}: "
            f"potência {power:.3e} abaixo do piso {floor:.3e}"
        )


class EstimationError(CVQKDError):
    """Conjunto de estimação vazio ou degenerado"""


class PrecisionError(CVQKDError):
    """Amostra pequena demais para a precisão exigida"""


class PhysicalityError(CVQKDError):
    """Discriminante negativo além da tolerância numérica"""


class NoThresholdError(CVQKDError):
    """Taxa nula já com ruído em excesso zero"""


class ConfigError(CVQKDError):
    """Chave desconhecida, valor inválido ou invariante violada"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"linha {line}: {message}"
        super().__init__(message)


class WaveformFormatError(CVQKDError):
    """Arquivo de forma de onda corrompido ou de versão não suportada"""


class BlockFailure(CVQKDError):
    """Falha de um bloco do experimento, com o índice do bloco"""

    def __init__(self, block_index: int, cause: BaseException):
        self.block_index = block_index
        self.cause = cause
        super().__init__(f"Bloco {block_index} falhou: {type(cause).__name__}: {cause}")
