"""Permutation-symmetric N-atom states in the Dicke basis.

Amplitudes are stored over |S, m> with index k = m + S ascending, so k = 0 is
m = -S and k = N is m = +S.  hbar = 1 throughout.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, xlogy

AXES = ("x", "y", "z")
HERMITIAN_KINDS = ("Sx", "Sy", "Sz")
_KIND_ALIASES = {
    "Sx": "Sx", "x": "Sx",
    "Sy": "Sy", "y": "Sy",
    "Sz": "Sz", "z": "Sz",
    "S+": "S+", "Splus": "S+", "+": "S+",
    "S-": "S-", "Sminus": "S-", "-": "S-",
}


@dataclass(frozen=True)
class SpinMagnitude:
    """Total spin S = two_s / 2 of an ensemble of two_s atoms."""

    two_s: int

    def __post_init__(self):
        if int(self.two_s) != self.two_s or self.two_s < 1:
            raise ValueError(f"two_s must be a positive integer, got {self.two_s!r}")
        object.__setattr__(self, "two_s", int(self.two_s))

    @property
    def s(self) -> float:
        return self.two_s / 2

    @property
    def n_atoms(self) -> int:
        return self.two_s

    @property
    def dim(self) -> int:
        return self.two_s + 1

    def twice_m(self) -> np.ndarray:
        """Integer array 2m = 2k - 2S; exact for either parity of N."""
        return 2 * np.arange(self.dim, dtype=np.int64) - self.two_s

    def m_values(self) -> np.ndarray:
        return self.twice_m() / 2.0

    def ladder_coefficients(self) -> np.ndarray:
        """sqrt(S(S+1) - m(m+1)) for m = -S .. S-1, i.e. <m+1|S+|m>."""
        n = self.twice_m()[:-1]
        # 4[S(S+1) - m(m+1)] = (2S - 2m)(2S + 2m + 2), all integers
        return 0.5 * np.sqrt(((self.two_s - n) * (self.two_s + n + 2)).astype(float))


@dataclass(frozen=True)
class DickeState:
    spin: SpinMagnitude
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.spin.dim,):
            raise ValueError(f"expected {self.spin.dim} amplitudes, got shape {amps.shape}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_atoms(self) -> int:
        return self.spin.two_s

    @property
    def s(self) -> float:
        return self.spin.s

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_amplitudes(self, amps: np.ndarray) -> "DickeState":
        return DickeState(self.spin, amps)


def as_spin(n_atoms: int | SpinMagnitude) -> SpinMagnitude:
    if isinstance(n_atoms, SpinMagnitude):
        return n_atoms
    if int(n_atoms) != n_atoms or n_atoms < 1:
        raise ValueError(f"n_atoms must be a positive integer, got {n_atoms!r}")
    return SpinMagnitude(int(n_atoms))


def from_amplitudes(amps: Sequence[complex], normalize: bool = True) -> DickeState:
    amps = np.asarray(amps, dtype=complex)
    if normalize:
        amps = amps / np.linalg.norm(amps)
    return DickeState(SpinMagnitude(len(amps) - 1), amps)


def css_amplitudes(two_s: int, theta, phi) -> np.ndarray:
    """Coherent spin state amplitudes, broadcast over theta/phi.

    |theta, phi> = sum_k sqrt(C(N,k)) cos^k(theta/2) sin^(N-k)(theta/2) e^{i(N-k)phi} |k>,
    which equals R_z(phi) R_y(theta)|z> up to a global phase.  Returns an array
    of shape broadcast(theta, phi).shape + (N + 1,).
    """
    theta = np.asarray(theta, dtype=float)[..., None]
    phi = np.asarray(phi, dtype=float)[..., None]
    k = np.arange(two_s + 1)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    log_binom = 0.5 * (gammaln(two_s + 1) - gammaln(k + 1) - gammaln(two_s - k + 1))
    with np.errstate(divide="ignore"):
        log_mag = log_binom + xlogy(k, np.abs(c)) + xlogy(two_s - k, np.abs(s))
    sign = np.where(c < 0, (-1.0) ** k, 1.0) * np.where(s < 0, (-1.0) ** (two_s - k), 1.0)
    return sign * np.exp(log_mag) * np.exp(1j * (two_s - k) * phi)


def make_css(n_atoms: int, theta: float, phi: float) -> DickeState:
    spin = as_spin(n_atoms)
    amps = css_amplitudes(spin.two_s, theta, phi)
    return DickeState(spin, amps / np.linalg.norm(amps))


def overlap(a: DickeState, b: DickeState) -> complex:
    """<a|b>."""
    if a.spin != b.spin:
        raise ValueError("states live in different Dicke spaces")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: DickeState, b: DickeState) -> float:
    """Phase-insensitive |<a|b>|."""
    return abs(overlap(a, b))


# --- rotations -------------------------------------------------------------

_eig_cache: dict[int, np.ndarray] = {}
_eig_lock = threading.Lock()


def sx_eigenvectors(two_s: int) -> np.ndarray:
    """Real orthogonal V with Sx = V diag(m) V^T, columns ordered by m ascending.

    Computed once per N from the symmetric tridiagonal Sx and cached.
    """
    vecs = _eig_cache.get(two_s)
    if vecs is not None:
        return vecs
    off = 0.5 * SpinMagnitude(two_s).ladder_coefficients()
    _, vecs = eigh_tridiagonal(np.zeros(two_s + 1), off)
    # fix column signs so that the m = +S column (|x>) is positive, others deterministic
    signs = np.sign(vecs[np.argmax(np.abs(vecs), axis=0), np.arange(two_s + 1)])
    vecs = vecs * signs
    vecs.flags.writeable = False
    with _eig_lock:
        vecs = _eig_cache.setdefault(two_s, vecs)
    return vecs


def _z_phase(spin: SpinMagnitude, angle: float) -> np.ndarray:
    return np.exp(-1j * angle * spin.m_values())


def _rotate_vec(spin: SpinMagnitude, vec: np.ndarray, axis: str, angle: float) -> np.ndarray:
    if axis == "z":
        return _z_phase(spin, angle) * vec
    if axis == "x":
        v = sx_eigenvectors(spin.two_s)
        return v @ (_z_phase(spin, angle) * (v.T @ vec))
    if axis == "y":
        # Sy = R_z(pi/2) Sx R_z(-pi/2)
        quarter = _z_phase(spin, np.pi / 2)
        out = _rotate_vec(spin, np.conj(quarter) * vec, "x", angle)
        return quarter * out
    raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")


def apply_rotation(state: DickeState, axis: str, angle: float) -> DickeState:
    """exp(-i angle S_axis)|psi>."""
    return state.with_amplitudes(_rotate_vec(state.spin, state.amplitudes, axis, angle))


def apply_oats(state: DickeState, mu: float) -> DickeState:
    """One-axis twist exp(-i mu Sz^2)|psi>; use -mu for unsqueezing."""
    n = state.spin.twice_m()
    phase = np.exp(-1j * mu * (n * n / 4.0))
    return state.with_amplitudes(phase * state.amplitudes)


# --- operators -------------------------------------------------------------

def _canonical_kind(kind: str) -> str:
    try:
        return _KIND_ALIASES[kind]
    except KeyError:
        raise ValueError(f"unknown operator kind {kind!r}") from None


def apply_operator(spin: SpinMagnitude, vec: np.ndarray, kind: str) -> np.ndarray:
    """O|vec> for a collective operator, using its tridiagonal/diagonal structure."""
    kind = _canonical_kind(kind)
    if kind == "Sz":
        return spin.m_values() * vec
    lad = spin.ladder_coefficients()
    up = np.zeros_like(vec, dtype=complex)
    down = np.zeros_like(vec, dtype=complex)
    up[1:] = lad * vec[:-1]     # S+ : k -> k+1
    down[:-1] = lad * vec[1:]   # S- : k+1 -> k
    if kind == "S+":
        return up
    if kind == "S-":
        return down
    if kind == "Sx":
        return 0.5 * (up + down)
    return -0.5j * (up - down)  # Sy


def operator_matrix(n_atoms: int | SpinMagnitude, kind: str) -> np.ndarray:
    """Dense (N+1)x(N+1) matrix of a collective operator; meant for checks at small N."""
    spin = as_spin(n_atoms)
    eye = np.eye(spin.dim, dtype=complex)
    return np.column_stack([apply_operator(spin, eye[:, j], kind) for j in range(spin.dim)])


def expectation(state: DickeState, word: Sequence[str] | str) -> complex:
    """<psi| O_1 ... O_n |psi> for a word of one or two operator kinds."""
    if isinstance(word, str):
        word = [word]
    if not 1 <= len(word) <= 2:
        raise ValueError("operator word must contain one or two kinds")
    vec = state.amplitudes
    for kind in reversed(list(word)):
        vec = apply_operator(state.spin, vec, kind)
    return complex(np.vdot(state.amplitudes, vec))


def variance(state: DickeState, kind: str) -> float:
    """<O^2> - <O>^2 for a Hermitian collective operator, clamped at zero.

    Evaluated as ||(O - <O>)psi||^2, which is the same quantity without the
    cancellation between two large second moments.
    """
    kind = _canonical_kind(kind)
    if kind not in HERMITIAN_KINDS:
        raise ValueError(f"variance needs a Hermitian kind, got {kind!r}")
    o_psi = apply_operator(state.spin, state.amplitudes, kind)
    mean = np.vdot(state.amplitudes, o_psi).real
    resid = o_psi - mean * state.amplitudes
    return max(float(np.vdot(resid, resid).real), 0.0)


def measurement_probabilities(state: DickeState, axis: str) -> np.ndarray:
    """Outcome distribution of S_axis, indexed by eigenvalue m ascending."""
    spin = state.spin
    vec = state.amplitudes
    if axis == "z":
        return np.abs(vec) ** 2
    if axis == "y":
        vec = np.conj(_z_phase(spin, np.pi / 2)) * vec
    elif axis != "x":
        raise ValueError(f"unknown axis {axis!r}")
    return np.abs(sx_eigenvectors(spin.two_s).T @ vec) ** 2


# --- Husimi Q --------------------------------------------------------------

@dataclass(frozen=True)
class HusimiGrid:
    theta: np.ndarray   # midpoints in (0, pi)
    phi: np.ndarray     # [0, 2 pi)
    values: np.ndarray  # shape (n_theta, n_phi)
    two_s: int

    @property
    def n_theta(self) -> int:
        return len(self.theta)

    @property
    def n_phi(self) -> int:
        return len(self.phi)

    def normalization(self) -> float:
        """(2S+1)/(4 pi) times the midpoint-rule integral of Q over the sphere."""
        dtheta = np.pi / self.n_theta
        dphi = 2 * np.pi / self.n_phi
        integral = np.sum(self.values * np.sin(self.theta)[:, None]) * dtheta * dphi
        return float(integral * (self.two_s + 1) / (4 * np.pi))

    def argmax(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.theta[i]), float(self.phi[j])


def husimi_q(state: DickeState, theta, phi) -> np.ndarray:
    """Q(theta, phi) = |<theta, phi|psi>|^2, broadcast over theta and phi."""
    css = css_amplitudes(state.spin.two_s, theta, phi)
    return np.abs(np.conj(css) @ state.amplitudes) ** 2


def husimi_grid(state: DickeState, n_theta: int, n_phi: int) -> HusimiGrid:
    if n_theta < 2 or n_phi < 2:
        raise ValueError("grid sizes must be at least 2")
    two_s = state.spin.two_s
    theta = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    phi = np.arange(n_phi) * 2 * np.pi / n_phi
    # <theta,phi|psi> = sum_k a_k(theta) e^{-i(N-k)phi} psi_k
    real_part = np.real(css_amplitudes(two_s, theta, 0.0))          # (n_theta, N+1)
    phases = np.exp(-1j * np.outer(two_s - np.arange(two_s + 1), phi))  # (N+1, n_phi)
    amp = (real_part * state.amplitudes) @ phases
    values = np.clip(np.abs(amp) ** 2, 0.0, 1.0)
    return HusimiGrid(theta, phi, values, two_s)
