"""Scalar decoherence models: cavity decay, spontaneous emission, atom loss.

Squeezing strength and duration only ever enter through mu = chi t; the
squeeze plus unsqueeze pair amounts to chi t_total = 2 mu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dicke import SpinMagnitude, apply_operator, css_amplitudes

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class DecoherenceParams:
    """Cavity and atom parameters; all rates in the same angular-frequency unit.

    ``alpha`` (1 <= alpha <= N) scales the spontaneous-emission penalty; left
    as None it defaults to the plateau phase magnification sqrt(2) S sin(mu),
    clamped into [1, N].  ``chi`` only enters the reported rates.
    """

    kappa: float
    delta_abs: float
    gamma_sp: float
    g: float
    n_atoms: int
    alpha: Optional[float] = None
    chi: float = 1.0

    def __post_init__(self):
        for name in ("kappa", "gamma_sp", "g", "chi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not self.delta_abs > 0:
            raise ValueError("delta_abs must be positive")
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be positive")
        if self.alpha is not None and not 1 <= self.alpha <= self.n_atoms:
            raise ValueError("alpha must lie in [1, N]")

    @property
    def cooperativity(self) -> float:
        """C = (2g)^2 / (kappa Gamma)."""
        denom = self.kappa * self.gamma_sp
        return math.inf if denom == 0 else (2 * self.g) ** 2 / denom

    @property
    def gamma_coll(self) -> float:
        """Collective dephasing rate chi kappa / |delta|."""
        return self.chi * self.kappa / self.delta_abs

    def alpha_at(self, mu: float) -> float:
        if self.alpha is not None:
            return self.alpha
        pmf = math.sqrt(2) * (self.n_atoms / 2) * math.sin(mu)
        return min(max(pmf, 1.0), float(self.n_atoms))


def cavity_signal_factor(mu: float, params: DecoherenceParams, delta_abs: Optional[float] = None) -> float:
    """exp(-mu kappa/|delta|): cavity-decay reduction of <S_x>, <S_y>."""
    delta = params.delta_abs if delta_abs is None else delta_abs
    return math.exp(-mu * params.kappa / delta)


def spontaneous_signal_factor(mu: float, params: DecoherenceParams, delta_abs: Optional[float] = None) -> float:
    """exp(-2 alpha mu Gamma |delta| / (2g)^2): spontaneous-emission reduction."""
    delta = params.delta_abs if delta_abs is None else delta_abs
    return math.exp(-2 * params.alpha_at(mu) * mu * params.gamma_sp * delta / (2 * params.g) ** 2)


@dataclass(frozen=True)
class VarianceMix:
    var_x: float
    var_y: float


def cavity_variance_mix(gamma_t: float, var_x_ideal: float, var_y_ideal: float) -> VarianceMix:
    """Second moments after dephasing exp(-2 gamma t) mixes S_x^2 and S_y^2."""
    if gamma_t < 0:
        raise ValueError("gamma_t must be non-negative")
    keep = 0.5 * (1 + math.exp(-2 * gamma_t))
    swap = 0.5 * (1 - math.exp(-2 * gamma_t))
    return VarianceMix(keep * var_x_ideal + swap * var_y_ideal, keep * var_y_ideal + swap * var_x_ideal)


@dataclass(frozen=True)
class SpontaneousBudget:
    gamma_eff: float
    delta_opt: float
    net_factor: float
    mu_bound: float
    alpha: float


def spontaneous_budget(mu: float, params: DecoherenceParams) -> SpontaneousBudget:
    """Cavity-decay versus spontaneous-emission trade-off at squeezing mu.

    gamma_eff = chi Gamma |delta| / (2g)^2, the optimal detuning kappa sqrt(C/2 alpha),
    the best combined signal factor exp(-2 mu sqrt(2 alpha / C)), and the largest
    plateau mu that keeps that factor above e^-2 with alpha ~ N / sqrt(2).
    """
    C = params.cooperativity
    if C == 0:
        raise ValueError("cooperativity is zero")
    alpha = params.alpha_at(mu)
    gamma_eff = params.chi * params.gamma_sp * params.delta_abs / (2 * params.g) ** 2
    delta_opt = params.kappa * math.sqrt(C / (2 * alpha))
    net = math.exp(-2 * mu * math.sqrt(2 * alpha / C))
    mu_bound = math.sqrt(C / (math.sqrt(2) * params.n_atoms))
    return SpontaneousBudget(gamma_eff, delta_opt, net, mu_bound, alpha)


# --- collisions -----------------------------------------------------------

@dataclass(frozen=True)
class CollisionScenario:
    n_atoms: int
    n_collided: int
    mu: float

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be positive")
        if not 0 <= self.n_collided <= self.n_atoms:
            raise ValueError("n_collided must lie in [0, N]")


def collision_signal(scn: CollisionScenario) -> float:
    """<S_x> of the surviving atoms, (S - S~) cos^(2 S~)(mu), when N~ atoms skip the unsqueeze."""
    survivors = (scn.n_atoms - scn.n_collided) / 2
    return survivors * math.cos(scn.mu) ** scn.n_collided


def collision_contrast(scn: CollisionScenario) -> float:
    """Surviving-atom signal relative to the mu = 0 case."""
    survivors = (scn.n_atoms - scn.n_collided) / 2
    if survivors == 0:
        return 0.0
    return collision_signal(scn) / survivors


def collision_oracle(scn: CollisionScenario) -> float:
    """Same signal from a two-ensemble state-vector calculation (N <= 16).

    The CSS |x> factorises into |x> on the N - N~ survivors times |x> on the
    collided atoms.  The full squeeze exp(-i mu (Sz_hat + Sz_tilde)^2) is
    diagonal in the joint (m_hat, m_tilde) basis; only the survivors receive
    the unsqueeze exp(+i mu Sz_hat^2), and only they are measured.
    """
    if scn.n_atoms > 16:
        raise ValueError("collision oracle is limited to N <= 16")
    n_hat = scn.n_atoms - scn.n_collided
    n_til = scn.n_collided
    if n_hat == 0:
        return 0.0
    hat = css_amplitudes(n_hat, HALF_PI, 0.0)
    hat = hat / np.linalg.norm(hat)
    til = css_amplitudes(n_til, HALF_PI, 0.0)
    til = til / np.linalg.norm(til)
    joint = np.outer(hat, til)                                   # (m_hat, m_tilde)
    m_hat = (2 * np.arange(n_hat + 1) - n_hat) / 2.0
    m_til = (2 * np.arange(n_til + 1) - n_til) / 2.0
    total = m_hat[:, None] + m_til[None, :]
    joint = np.exp(-1j * scn.mu * total**2) * joint
    joint = np.exp(1j * scn.mu * m_hat**2)[:, None] * joint
    spin = SpinMagnitude(n_hat)
    sx_joint = np.column_stack([apply_operator(spin, joint[:, j], "Sx") for j in range(n_til + 1)])
    return float(np.vdot(joint, sx_joint).real)


def max_tolerable_collisions(mu: float) -> float:
    """-1 / ln cos(mu): collided atoms that cut the contrast by a factor e.

    Infinite at mu = 0 and zero at mu = pi/2.  Not rounded; callers round down.
    """
    if mu <= 0:
        return math.inf
    if mu >= HALF_PI:
        return 0.0
    return -1.0 / math.log(math.cos(mu))


def max_tolerable_asymptote(mu: float) -> float:
    """Small-mu form 2 / mu^2."""
    return math.inf if mu == 0 else 2.0 / mu**2
