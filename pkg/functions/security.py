# -*- coding: utf-8 -*-
"""
Cálculo de segurança: estimação de parâmetros, limites de pior caso, informação mútua,
limite de Holevo (heteródino, detector confiável) e taxa de chave assintótica/finita
"""

import dataclasses
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from .config import transmittance
from .errors import DomainError, EstimationError, NoThresholdError, PhysicalityError
from .model import QuadratureBlock, confidence_coefficient, g_func

PHYSICAL_TOLERANCE = 1e-9
THRESHOLD_TOLERANCE = 1e-5


@dataclass(frozen=True)
class ChannelEstimate:
    """Estimativas de t, T, sigma², ε a partir dos pares (x_A, X_B)"""

    t_hat: float
    T_hat: float
    sigma2_hat: float
    eps_hat: float
    m_used: int
    unphysical: bool = False

    @classmethod
    def from_parameters(cls, T: float, eps: float, eta: float, v_el: float, m: int) -> 'ChannelEstimate':
        """Estimativa 'perfeita' com os valores verdadeiros (para análise sem simulação)"""
        return cls(float(np.sqrt(eta * T)), T, eta * T * eps + 1.0 + v_el, eps, int(m))

    @classmethod
    def from_sums(cls, sxy: float, sxx: float, syy: float, m: int, eta: float, v_el: float,
                  tolerance: float = 1e-3) -> 'ChannelEstimate':
        """Estimativa a partir de estatísticas suficientes (somas acumuláveis entre blocos)"""
        if m < 2:
            raise DomainError(f"Estimação exige m >= 2 (m={m})")
        if sxx <= 0:
            raise EstimationError(f"sum(x²) = {sxx:.3g}: símbolos de Alice sem energia")
        t_hat = sxy / sxx
        sigma2 = (syy - 2 * t_hat * sxy + t_hat ** 2 * sxx) / m
        T_hat = t_hat ** 2 / eta
        eps_hat = (sigma2 - 1.0 - v_el) / (eta * T_hat) if T_hat > 0 else float('inf')
        unphysical = T_hat > 1 + tolerance or eps_hat < -tolerance
        if unphysical:
            logger.warning(f"Estimativa não física: T̂={T_hat:.6g}, ε̂={eps_hat:.6g}")
        return cls(float(t_hat), float(T_hat), float(sigma2), float(eps_hat), int(m), bool(unphysical))


def sufficient_statistics(alice: QuadratureBlock, bob: QuadratureBlock) -> Tuple[float, float, float, int]:
    """(Σxy, Σx², Σy², m) sobre as duas quadraturas, excluindo o treinamento"""
    if len(alice) != len(bob):
        raise DomainError(f"Blocos de tamanhos diferentes: {len(alice)} vs {len(bob)}")
    keep = ~(alice.training_mask | bob.training_mask)
    x = np.concatenate([alice.x[keep], alice.p[keep]])
    y = np.concatenate([bob.x[keep], bob.p[keep]])
    return float(np.dot(x, y)), float(np.dot(x, x)), float(np.dot(y, y)), int(x.size)


def estimate_channel(alice: QuadratureBlock, bob: QuadratureBlock, eta: float, v_el: float) -> ChannelEstimate:
    """
    Regressão y = t x + z nas duas quadraturas

    t̂ = Σxy/Σx², σ̂² = média (y - t̂x)², T̂ = t̂²/η, ε̂ = (σ̂² - 1 - v_el)/(η T̂)
    """
    sxy, sxx, syy, m = sufficient_statistics(alice, bob)
    return ChannelEstimate.from_sums(sxy, sxx, syy, m, eta, v_el)


@dataclass(frozen=True)
class WorstCaseBounds:
    T_min: float
    eps_max: float
    delta_T: float
    delta_sigma2: float
    z: float
    certifiable: bool = True


def worst_case_bounds(est: ChannelEstimate, V_A: float, eps_PE: float, eta: float, v_el: float,
                      m: Optional[int] = None) -> WorstCaseBounds:
    """
    Limites de confiança de parâmetros com z = sqrt(2) erfcinv(eps_PE)

    Args:
        m: número de amostras de estimação (padrão: est.m_used)
    """
    m = est.m_used if m is None else m
    if m < 1 or V_A <= 0:
        raise DomainError(f"m >= 1 e V_A > 0 são obrigatórios (m={m}, V_A={V_A})")
    z = confidence_coefficient(eps_PE)
    sigma2 = est.sigma2_hat
    delta_T = z * np.sqrt(sigma2 / (m * V_A))
    delta_sigma2 = z * sigma2 * np.sqrt(2.0) / np.sqrt(m)

    t_low = est.t_hat - delta_T
    certifiable = t_low > 0
    T_min = t_low ** 2 / eta if certifiable else 0.0
    eps_max = (sigma2 + delta_sigma2 - 1.0 - v_el) / (eta * est.T_hat)
    if not certifiable:
        logger.warning(f"t̂ - ΔT = {t_low:.4g} <= 0: nada certificável")
    return WorstCaseBounds(float(T_min), float(eps_max), float(delta_T), float(delta_sigma2), z, bool(certifiable))


def chi_het(eta: float, v_el: float) -> float:
    """Ruído do detector heteródino referido à entrada"""
    return ((2.0 - eta) + 2.0 * v_el) / eta


def mutual_information(V_A: float, T: float, eps: float, eta: float, v_el: float) -> float:
    """I_AB = log2[(V + χ_tot)/(1 + χ_tot)] com V = V_A + 1 (heteródino, duas quadraturas)"""
    if T <= 0:
        raise DomainError(f"T deve ser positivo, recebeu {T}")
    if V_A <= 0:
        raise DomainError(f"V_A deve ser positivo, recebeu {V_A}")
    eps = max(eps, 0.0)
    V = V_A + 1.0
    chi_tot = (1.0 / T - 1.0 + eps) + chi_het(eta, v_el) / T
    return float(np.log2((V + chi_tot) / (1.0 + chi_tot)))


@dataclass(frozen=True)
class HolevoResult:
    S: float
    eigenvalues: Tuple[float, ...]


def _sqrt_discriminant(value: float, scale: float, label: str) -> float:
    if value < 0:
        if value < -PHYSICAL_TOLERANCE * max(1.0, scale):
            raise PhysicalityError(f"Discriminante {label} negativo: {value:.3e}")
        value = 0.0
    return float(np.sqrt(value))


def _symplectic_pair(trace: float, root: float, product_root: float) -> Tuple[float, float]:
    """Par (λ+, λ-) com λ+ λ- = sqrt(det); o menor vem do produto, sem cancelamento"""
    upper = float(np.sqrt(max((trace + root) / 2, 0.0)))
    if upper <= 0:
        raise PhysicalityError(f"Autovalor simplético nulo (traço {trace:.3e})")
    return upper, float(product_root / upper)


def holevo_bound(V_A: float, T: float, eps: float, eta: float, v_el: float) -> HolevoResult:
    """
    S_BE = G((λ1-1)/2) + G((λ2-1)/2) - G((λ3-1)/2) - G((λ4-1)/2)

    λ5 = 1 contribui G(0) = 0
    """
    if not (0 < T <= 1 + PHYSICAL_TOLERANCE):
        raise DomainError(f"T fora de (0, 1]: {T}")
    if V_A <= 0:
        raise DomainError(f"V_A deve ser positivo, recebeu {V_A}")
    eps = max(eps, 0.0)
    V = V_A + 1.0
    chi_line = 1.0 / T - 1.0 + eps
    chi = chi_het(eta, v_el)

    A = V ** 2 * (1 - 2 * T) + 2 * T + T ** 2 * (V + chi_line) ** 2
    B = T ** 2 * (V * chi_line + 1) ** 2
    C = (A * chi ** 2 + B + 1 + 2 * chi * (V * np.sqrt(B) + T * (V + chi_line))
         + 2 * T * (V ** 2 - 1)) / (T * (V + chi_line) + chi) ** 2
    D = ((V + np.sqrt(B) * chi) / (T * (V + chi_line) + chi)) ** 2

    root_ab = _sqrt_discriminant(A ** 2 - 4 * B, A ** 2, 'A² - 4B')
    root_cd = _sqrt_discriminant(C ** 2 - 4 * D, C ** 2, 'C² - 4D')
    # sqrt(B) e sqrt(D) em forma fechada
    lam1, lam2 = _symplectic_pair(A, root_ab, T * (V * chi_line + 1))
    lam3, lam4 = _symplectic_pair(C, root_cd, (V + T * (V * chi_line + 1) * chi) / (T * (V + chi_line) + chi))
    lambdas = (lam1, lam2, lam3, lam4, 1.0)
    low = min(lambdas)
    if low < 1.0 - PHYSICAL_TOLERANCE:
        raise PhysicalityError(f"Autovalor simplético {low:.12g} < 1 (T={T}, ε={eps})")
    G = [g_func(max((lam - 1.0) / 2.0, 0.0)) for lam in lambdas]
    S = G[0] + G[1] - G[2] - G[3]
    return HolevoResult(float(S), tuple(float(lam) for lam in lambdas))


def finite_size_penalty(n: int, eps_bar: float, eps_PA: float) -> float:
    """Δ(n) = 7 sqrt(log2(2/ε̄)/n) + (2/n) log2(1/ε_PA)"""
    if n < 1:
        raise DomainError(f"n deve ser >= 1, recebeu {n}")
    if not (0 < eps_bar < 1 and 0 < eps_PA < 1):
        raise DomainError(f"ε̄ e ε_PA devem estar em (0, 1): {eps_bar}, {eps_PA}")
    return float(7.0 * np.sqrt(np.log2(2.0 / eps_bar) / n) + 2.0 / n * np.log2(1.0 / eps_PA))


@dataclass(frozen=True)
class SecurityInputs:
    """Entradas do cálculo de taxa de chave"""

    V_A: float
    T: float
    eps: float
    eta: float
    v_el: float
    beta: float
    f_rep: float
    mode: str = 'finite'
    n: int = 5_000_000
    m: int = 5_000_000
    N: int = 10_000_000
    eps_PE: float = 1e-10
    eps_PA: float = 1e-10
    eps_bar: float = 1e-10

    def __post_init__(self):
        if self.mode not in ('asymptotic', 'finite'):
            raise DomainError(f"Modo desconhecido: {self.mode}")
        if not (0 < self.beta <= 1):
            raise DomainError(f"β fora de (0, 1]: {self.beta}")
        if self.f_rep <= 0:
            raise DomainError(f"f_rep deve ser positivo, recebeu {self.f_rep}")
        if self.mode == 'finite' and self.n + self.m != self.N:
            raise DomainError(f"n + m deve ser N ({self.n} + {self.m} != {self.N})")

    @classmethod
    def from_config(cls, cfg, T: Optional[float] = None, eps: float = 0.0, mode: Optional[str] = None):
        return cls(
            V_A=cfg.V_A, T=cfg.transmittance if T is None else T, eps=eps,
            eta=cfg.eta, v_el=cfg.v_el, beta=cfg.beta, f_rep=cfg.f_rep,
            mode=mode or cfg.mode, n=cfg.key_n, m=cfg.est_m, N=cfg.block_n,
            eps_PE=cfg.eps_PE, eps_PA=cfg.eps_PA, eps_bar=cfg.eps_bar,
        )

    def replace(self, **changes) -> 'SecurityInputs':
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class KeyRateReport:
    mode: str
    I_AB: float
    S_BE: float
    delta_n: float
    T_min: float
    eps_max: float
    R: float
    raw_rate: float
    null_rate: bool
    eigenvalues: Tuple[float, ...] = ()

    def as_row(self) -> dict:
        return {
            'mode': self.mode, 'I_AB': self.I_AB, 'S_BE': self.S_BE, 'Delta_n': self.delta_n,
            'T_min': self.T_min, 'eps_max': self.eps_max, 'R_bps': self.R, 'null_rate': self.null_rate,
        }


def secret_key_rate(inp: SecurityInputs, estimate: Optional[ChannelEstimate] = None) -> KeyRateReport:
    """
    Assintótico: R = f_rep (β I_AB - S_BE) em (T, ε)
    Finito: R = f_rep (n/N) (β I_AB - S_BE - Δ(n)), com S_BE em (T_min, ε_max)

    Args:
        estimate: estimativa medida; padrão é a estimativa perfeita de (inp.T, inp.eps)
    """
    if estimate is None:
        estimate = ChannelEstimate.from_parameters(inp.T, inp.eps, inp.eta, inp.v_el, inp.m)
    T, eps = estimate.T_hat, estimate.eps_hat
    I_AB = mutual_information(inp.V_A, T, eps, inp.eta, inp.v_el)

    if inp.mode == 'asymptotic':
        holevo = holevo_bound(inp.V_A, min(T, 1.0), eps, inp.eta, inp.v_el)
        raw = inp.f_rep * (inp.beta * I_AB - holevo.S)
        return KeyRateReport('asymptotic', I_AB, holevo.S, 0.0, T, eps, max(raw, 0.0), raw,
                             raw <= 0, holevo.eigenvalues)

    bounds = worst_case_bounds(estimate, inp.V_A, inp.eps_PE, inp.eta, inp.v_el, inp.m)
    delta_n = finite_size_penalty(inp.n, inp.eps_bar, inp.eps_PA)
    if not bounds.certifiable:
        return KeyRateReport('finite', I_AB, float('nan'), delta_n, 0.0, bounds.eps_max, 0.0,
                             float('-inf'), True)

    holevo = holevo_bound(inp.V_A, min(bounds.T_min, 1.0), bounds.eps_max, inp.eta, inp.v_el)
    raw = inp.f_rep * (inp.n / inp.N) * (inp.beta * I_AB - holevo.S - delta_n)
    return KeyRateReport('finite', I_AB, holevo.S, delta_n, bounds.T_min, bounds.eps_max,
                         max(raw, 0.0), raw, raw <= 0, holevo.eigenvalues)


def noise_threshold(length_km: float, inp: SecurityInputs, alpha: float = 0.2,
                    tolerance: float = THRESHOLD_TOLERANCE) -> float:
    """
    Maior ε com R > 0 na distância dada (bissecção)

    Raises:
        NoThresholdError: R <= 0 já em ε = 0
    """
    base = inp.replace(T=transmittance(alpha, length_km))

    def rate(eps: float) -> float:
        return secret_key_rate(base.replace(eps=eps)).raw_rate

    if rate(0.0) <= 0:
        raise NoThresholdError(f"Sem taxa positiva em {length_km} km mesmo com ε = 0")

    low, high = 0.0, 0.1
    while rate(high) > 0:
        low, high = high, 2 * high
        if high > 1e3:
            raise NoThresholdError(f"Taxa positiva até ε = {low}: limiar não encontrado")
    while high - low > tolerance:
        mid = 0.5 * (low + high)
        if rate(mid) > 0:
            low = mid
        else:
            high = mid
    return 0.5 * (low + high)


def phase_noise_prediction(V_A: float, linewidth_A: float, linewidth_B: float, f_rep: float) -> float:
    """Excesso de ruído previsto pela fase residual: 2π V_A (Δν_A + Δν_B)/f_rep"""
    if f_rep <= 0:
        raise DomainError(f"f_rep deve ser positivo, recebeu {f_rep}")
    if V_A < 0 or linewidth_A < 0 or linewidth_B < 0:
        raise DomainError("V_A e larguras de linha devem ser não negativos")
    return float(2 * np.pi * V_A * (linewidth_A + linewidth_B) / f_rep)
