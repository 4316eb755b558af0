# -*- coding: utf-8 -*-
"""
Tipos compartilhados e funções especiais
Convenção global: quadraturas em unidades de ruído de disparo (SNU),
variância do vácuo = 1 por quadratura, Var(x_A) = Var(p_A) = V_A
"""

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import special

from .errors import ContractError, DomainError

ArrayLike = Union[float, np.ndarray]

ROLES = ('alice', 'bob')


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class ComplexWaveform:
    """Traço uniformemente amostrado (complexo ou real) com sua taxa de amostragem"""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 1 or samples.size == 0:
            raise ContractError("Forma de onda deve ser um vetor 1-D não vazio")
        if not (self.sample_rate > 0 and np.isfinite(self.sample_rate)):
            raise DomainError(f"Taxa de amostragem inválida: {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise ContractError("Forma de onda contém NaN ou Inf")
        if not np.iscomplexobj(samples):
            samples = samples.astype(np.float64)
        else:
            samples = samples.astype(np.complex128)
        object.__setattr__(self, 'samples', _frozen(samples))
        object.__setattr__(self, 'sample_rate', float(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.samples)

    def power(self) -> float:
        """Potência média |s|²"""
        return float(np.mean(np.abs(self.samples) ** 2))


@dataclass(frozen=True)
class QuadratureBlock:
    """Pares (X, P) por símbolo, com papel (alice/bob) e máscara de treinamento"""

    x: np.ndarray
    p: np.ndarray
    role: str = 'bob'
    training_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        p = np.asarray(self.p, dtype=np.float64)
        if x.ndim != 1 or x.shape != p.shape or x.size == 0:
            raise ContractError(f"x e p devem ter o mesmo comprimento n > 0 ({x.shape} vs {p.shape})")
        if self.role not in ROLES:
            raise ContractError(f"Papel desconhecido: {self.role}")
        mask = self.training_mask
        if mask is None:
            mask = np.zeros(x.size, dtype=bool)
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != x.shape:
            raise ContractError("training_mask deve ter o mesmo comprimento de x")
        object.__setattr__(self, 'x', _frozen(x))
        object.__setattr__(self, 'p', _frozen(p))
        object.__setattr__(self, 'training_mask', _frozen(mask))

    def __len__(self) -> int:
        return self.x.size

    @classmethod
    def from_complex(cls, values: np.ndarray, role: str = 'bob', training_mask=None) -> 'QuadratureBlock':
        values = np.asarray(values)
        return cls(values.real, values.imag, role, training_mask)

    def as_complex(self) -> np.ndarray:
        return self.x + 1j * self.p

    def select(self, index: np.ndarray) -> 'QuadratureBlock':
        """Subconjunto por máscara booleana ou por índices inteiros"""
        index = np.asarray(index)
        if index.dtype != bool:
            index = index.astype(np.intp)
        return QuadratureBlock(self.x[index], self.p[index], self.role, self.training_mask[index])

    def training(self) -> 'QuadratureBlock':
        return self.select(self.training_mask)

    def key_material(self) -> 'QuadratureBlock':
        return self.select(~self.training_mask)

    def with_role(self, role: str) -> 'QuadratureBlock':
        return QuadratureBlock(self.x, self.p, role, self.training_mask)

    def pooled(self) -> np.ndarray:
        """As duas quadraturas como uma única amostra de regressão"""
        return np.concatenate([self.x, self.p])


def g_func(x: ArrayLike) -> ArrayLike:
    """
    G(x) = (x+1)log2(x+1) - x log2 x, com x log2 x -> 0 em x = 0
    """
    values = np.asarray(x, dtype=np.float64)
    if np.any(values < 0) or np.any(np.isnan(values)):
        raise DomainError(f"g_func exige x >= 0, recebeu {x}")
    result = (special.xlogy(values + 1.0, values + 1.0) - special.xlogy(values, values)) / np.log(2.0)
    return float(result) if np.ndim(result) == 0 else result


def confidence_coefficient(eps_pe: float) -> float:
    """
    z tal que 1 - erf(z/sqrt(2)) = eps_PE
    Usa erfcinv diretamente para não perder precisão com eps pequeno
    """
    if not (0.0 < eps_pe <= 1.0):
        raise DomainError(f"eps_PE deve estar em (0, 1], recebeu {eps_pe}")
    return float(np.sqrt(2.0) * special.erfcinv(eps_pe))


def bessel_j1(m: ArrayLike) -> ArrayLike:
    """Função de Bessel de primeira espécie, ordem 1"""
    result = special.j1(np.asarray(m, dtype=np.float64))
    return float(result) if np.ndim(result) == 0 else result


def db_to_amplitude(db: float) -> float:
    """Atenuação em dB -> fator de amplitude (inf -> 0)"""
    if np.isinf(db) and db > 0:
        return 0.0
    return float(10.0 ** (-db / 20.0))
