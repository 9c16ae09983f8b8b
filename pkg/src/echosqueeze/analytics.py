"""Closed-form sensitivity, bound, and fringe results for the echo protocols.

Conventions fixed against direct simulation:

* the "+" branch of the signal/variance expansions belongs to GESP-e (phase
  rotation about x) and the "-" branch to GESP-o (rotation about y);
* the phi^2 coefficient of the variance is a30.b0 +/- a31.b1 on its own; the
  coefficient vectors already carry the full polynomial in S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

HALF_PI = math.pi / 2
_GESP_VERSIONS = {"GESP_E": +1, "GESP_O": -1, "SCSP_E": +1, "SCSP_O": -1}


def signed_pow(base: float, exponent: int) -> float:
    """base**exponent for an integer exponent, safe for exponents in the thousands.

    Computed as sign * exp(exponent * ln|base|); returns an exact 0 once the
    magnitude underflows instead of a denormal.
    """
    exponent = int(exponent)
    if exponent == 0:
        return 1.0
    if base == 0.0:
        return 0.0 if exponent > 0 else math.inf
    sign = -1.0 if (base < 0 and exponent % 2) else 1.0
    log_mag = exponent * math.log(abs(base))
    if log_mag < -745.0:
        return 0.0
    return sign * math.exp(log_mag)


def _branch(version) -> int:
    key = getattr(version, "value", version)
    try:
        return _GESP_VERSIONS[str(key).upper().replace("-", "_")]
    except KeyError:
        raise ValueError(f"expected a GESP version, got {version!r}") from None


@dataclass(frozen=True)
class CoefficientSet:
    two_s: int
    mu: float
    a10: np.ndarray
    a11: np.ndarray
    a20: np.ndarray
    a21: np.ndarray
    a30: np.ndarray
    a31: np.ndarray
    b0: np.ndarray
    b1: np.ndarray

    def _dot1(self, a: np.ndarray) -> float:
        # term-wise powers cos^(2S-4+j) 2mu; zero coefficients never touch negative powers
        c = math.cos(2 * self.mu)
        return sum(float(aj) * signed_pow(c, self.two_s - 4 + j) for j, aj in enumerate(a) if aj != 0.0)

    def signal_coefficient(self, branch: int) -> float:
        """phi^2 coefficient of <S_x>: a10.b0 +/- a11.b1."""
        return float(self.a10 @ self.b0) + branch * self._dot1(self.a11)

    def second_moment_coefficient(self, branch: int) -> float:
        """phi^2 coefficient of <S_x^2>: a20.b0 +/- a21.b1."""
        return float(self.a20 @ self.b0) + branch * self._dot1(self.a21)

    def variance_coefficient(self, branch: int) -> float:
        """phi^2 coefficient of the S_x variance: a30.b0 +/- a31.b1."""
        return float(self.a30 @ self.b0) + branch * self._dot1(self.a31)

    def _scale(self, a0, a1) -> float:
        c = abs(math.cos(2 * self.mu))
        return float(np.abs(a0) @ np.abs(self.b0)) + sum(
            abs(float(aj)) * signed_pow(c, self.two_s - 4 + j) for j, aj in enumerate(a1) if aj != 0.0
        )


def coefficient_set(two_s: int, mu: float) -> CoefficientSet:
    if two_s < 2:
        raise ValueError("coefficient vectors need two_s >= 2")
    S = two_s / 2
    c = math.cos(2 * mu)
    a10 = 0.5 * S * np.array([-S * (S + 0.5), (S - 0.5) * (S + 1), 0.0])
    a11 = 0.5 * S * np.array([0.0, (S - 0.5) * (S - 1), -S * (S - 0.5), S])
    a20 = 0.5 * S * (S - 0.5) * np.array([-(S - 0.5) * (S + 1), 0.0, (S - 1) * (S + 1.5)])
    a21 = 0.5 * S * (S - 0.5) * np.array([(S - 1) * (S - 1.5), 0.0, -(S * S - 2.5 * S + 0.5), 0.0])
    a30 = 0.5 * S * np.array([
        S**3 + S**2 + 0.75 * S - 0.25,
        -2 * S * (S + 1) * (S - 0.5),
        (S - 0.5) * (S - 1) * (S + 1.5),
    ])
    a31 = 0.5 * S * np.array([
        (S - 0.5) * (S - 1) * (S - 1.5),
        -2 * S * (S - 0.5) * (S - 1),
        (S - 0.5) * (S * S + 2.5 * S - 0.5),
        -2 * S * S,
    ])
    b0 = np.array([1.0, c, c * c])
    with np.errstate(divide="ignore"):
        b1 = signed_pow(c, two_s - 4) * np.array([1.0, c, c * c, c**3])
    return CoefficientSet(two_s, mu, a10, a11, a20, a21, a30, a31, b0, b1)


def _check_n(n_atoms: int, minimum: int = 2):
    if int(n_atoms) != n_atoms or n_atoms < minimum:
        raise ValueError(f"n_atoms must be an integer >= {minimum}, got {n_atoms!r}")


def gesp_sensitivity(n_atoms: int, mu: float, version="GESP_E") -> Optional[float]:
    """2|a10.b0 +/- a11.b1| / sqrt(a30.b0 +/- a31.b1), or None when undefined.

    The value is undefined when the variance coefficient cancels to rounding
    level (GESP-e without squeezing has a perfectly flat signal).
    """
    _check_n(n_atoms)
    branch = _branch(version)
    cs = coefficient_set(int(n_atoms), mu)
    num = cs.signal_coefficient(branch)
    den = cs.variance_coefficient(branch)
    if den <= 1e-12 * cs._scale(cs.a30, cs.a31):
        return None
    return 2 * abs(num) / math.sqrt(den)


@dataclass(frozen=True)
class Expansion:
    signal: float
    variance: float


def gesp_expansion(n_atoms: int, mu: float, phi: float, version="GESP_E") -> Expansion:
    """Quadratic-order signal S + phi^2 (a10.b0 +/- a11.b1) and variance."""
    _check_n(n_atoms)
    branch = _branch(version)
    cs = coefficient_set(int(n_atoms), mu)
    S = n_atoms / 2
    return Expansion(
        signal=S + phi**2 * cs.signal_coefficient(branch),
        variance=phi**2 * cs.variance_coefficient(branch),
    )


def gesp_pmf_naf(n_atoms: int, mu: float, version="GESP_E") -> tuple[float, float]:
    """PMF and NAF read off the exact small-phase expansion.

    Matching S cos(M phi) and A sqrt(S/2)|sin(M phi)| to second order gives
    M^2 = 2|signal coefficient|/S and A = sqrt(variance coefficient)/(M sqrt(S/2)).
    On the plateau these approach sqrt(2) S sin(mu) and sqrt(2S) sin(mu).
    """
    _check_n(n_atoms)
    branch = _branch(version)
    cs = coefficient_set(int(n_atoms), mu)
    S = n_atoms / 2
    m = math.sqrt(2 * abs(cs.signal_coefficient(branch)) / S)
    var = max(cs.variance_coefficient(branch), 0.0)
    if m == 0.0:
        return 0.0, math.nan
    return m, math.sqrt(var) / (m * math.sqrt(S / 2))


def cesp_sensitivity(n_atoms: int, mu: float) -> float:
    """sqrt(2S) (2S-1) cos^(2S-2)(mu) sin(mu)."""
    _check_n(n_atoms)
    S = n_atoms / 2
    return math.sqrt(2 * S) * (2 * S - 1) * signed_pow(math.cos(mu), n_atoms - 2) * math.sin(mu)


def cesp_pmf(n_atoms: int, mu: float) -> float:
    """Small-phase magnification of the CESP fringe, (2S-1) cos^(2S-2)(mu) sin(mu)."""
    _check_n(n_atoms)
    return (n_atoms - 1) * signed_pow(math.cos(mu), n_atoms - 2) * math.sin(mu)


def qcr_bound(n_atoms: int, mu: float, version="GESP_E") -> float:
    """Quantum Cramer-Rao bound 2 dS_n of the squeezed state along the phase axis.

    GESP-e (x rotation) uses 2 dS_x; GESP-o and CESP (y rotation) use 2 dS_y.
    """
    _check_n(n_atoms)
    key = str(getattr(version, "value", version)).upper().replace("-", "_")
    S = n_atoms / 2
    c2 = signed_pow(math.cos(2 * mu), n_atoms - 2)
    if key in ("GESP_E", "SCSP_E"):
        sx = 2 * S * signed_pow(math.cos(mu), n_atoms - 1)
        val = 2 * S * (S + 0.5) + 2 * S * (S - 0.5) * c2 - sx * sx
    elif key in ("GESP_O", "SCSP_O", "CESP"):
        val = 2 * S * (S + 0.5) - 2 * S * (S - 0.5) * c2
    else:
        raise ValueError(f"unknown protocol {version!r}")
    return math.sqrt(max(val, 0.0))


@dataclass(frozen=True)
class Plateau:
    mu_lo: float
    mu_hi: float
    value: float

    def contains(self, mu: float) -> bool:
        return self.mu_lo <= mu <= self.mu_hi


def plateau_bounds(n_atoms: int) -> Plateau:
    """Plateau interval and level with no range check on N."""
    S = n_atoms / 2
    return Plateau(4 / math.sqrt(S), HALF_PI - 1 / math.sqrt(S), n_atoms / math.sqrt(2))


def plateau(n_atoms: int) -> Plateau:
    """mu in [4 S^-1/2, pi/2 - S^-1/2], where the GESP sits near N/sqrt(2)."""
    if n_atoms < 32:
        raise ValueError("plateau boundaries are only meaningful for N >= 32")
    return plateau_bounds(n_atoms)


@dataclass(frozen=True)
class PmfNaf:
    M: float
    A: float
    in_plateau: bool = True


def pmf_naf(n_atoms: int, mu: float, protocol: str) -> PmfNaf:
    """Phase magnification and noise amplification factors.

    ``protocol`` is one of GESP (plateau forms), CESP (at its optimum),
    SCSP_MATCHED or SCSP_CROSSED.
    """
    _check_n(n_atoms)
    S = n_atoms / 2
    key = protocol.upper().replace("-", "_")
    if key in ("GESP", "GESP_E", "GESP_O"):
        inside = plateau_bounds(n_atoms).contains(mu)
        return PmfNaf(math.sqrt(2) * S * math.sin(mu), math.sqrt(2 * S) * math.sin(mu), inside)
    if key == "CESP":
        return PmfNaf(math.sqrt(n_atoms / math.e), 1.0)
    if key == "SCSP_MATCHED":
        return PmfNaf(float(n_atoms), math.sqrt(n_atoms))
    if key == "SCSP_CROSSED":
        r = math.sqrt(2 * S - 1)
        return PmfNaf(r, r)
    raise ValueError(f"unknown protocol {protocol!r}")


def sensitivity_with_detection_noise(n_atoms: int, mu: float, dn: float) -> float:
    """Plateau sensitivity at the hopping point with detection noise dn added in quadrature."""
    if dn < 0:
        raise ValueError("detection noise must be non-negative")
    S = n_atoms / 2
    qpn = S * math.sin(mu)
    return math.sqrt(2) * S**2 * math.sin(mu) / math.hypot(qpn, dn)


def hopping_operating_point(n_atoms: int, mu: float) -> float:
    """pi / (2M) with M = sqrt(2) S sin(mu): steepest point of the central fringe."""
    m = math.sqrt(2) * (n_atoms / 2) * math.sin(mu)
    if m == 0.0:
        raise ValueError("no phase magnification at mu = 0")
    return math.pi / (2 * m)


@dataclass(frozen=True)
class Fringe:
    signal: float
    noise: float
    simulated_noise: bool = False


def scsp_fringe(n_atoms: int, matched: bool, phi: float) -> Fringe:
    """Cat-state protocol fringe for a parity-matched or parity-crossed run.

    The crossed-noise formula only holds while |phi| sqrt(2S-1) < pi/4; beyond
    that window the noise is taken from direct simulation.
    """
    _check_n(n_atoms)
    S = n_atoms / 2
    if matched:
        return Fringe(S * math.cos(2 * S * phi), S * abs(math.sin(2 * S * phi)))
    r = math.sqrt(2 * S - 1)
    sig = S * signed_pow(math.cos(phi), n_atoms - 1)
    if abs(phi) * r < math.pi / 4:
        return Fringe(sig, math.sqrt((2 * S - 1) * S / 2) * abs(math.sin(phi * r)))
    from .protocols import Kind, build_protocol, noise

    kind = Kind.SCSP_O if n_atoms % 2 == 0 else Kind.SCSP_E
    return Fringe(sig, noise(build_protocol(kind), n_atoms, phi), simulated_noise=True)


def gesp_fringe_model(n_atoms: int, mu: float, phi: float) -> Fringe:
    """Plateau fringe S cos(M phi) with noise A sqrt(S/2) |sin(M phi)|."""
    S = n_atoms / 2
    f = pmf_naf(n_atoms, mu, "GESP")
    return Fringe(S * math.cos(f.M * phi), f.A * math.sqrt(S / 2) * abs(math.sin(f.M * phi)))


def cesp_fringe_model(n_atoms: int, phi: float) -> Fringe:
    """Small-phase CESP fringe at the optimum: S sin(M phi), noise sqrt(S/2) cos(M phi)."""
    S = n_atoms / 2
    m = math.sqrt(n_atoms / math.e)
    return Fringe(S * math.sin(m * phi), math.sqrt(S / 2) * math.cos(m * phi))
