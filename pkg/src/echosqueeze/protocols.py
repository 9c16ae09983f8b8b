"""Echo-squeezing protocol sequences and the brute-force sensitivity oracle.

Every protocol starts from the coherent state |x> (the first pi/2 pulse of the
clock is folded into the initial state).  The simplified form is
squeeze -> effective phase rotation -> unsqueeze -> measure; the CLOCK and LPAI
forms spell out the auxiliary pulses, dark-period z rotations, the LPAI pi
pulse, and the read-out pulse followed by an S_z measurement.

Pulse signs in the full forms are chosen so that the full-form state equals
the simplified state exactly (up to a global phase) rather than up to the sign
gauge of the pi/2 pulses; see ``flip_pulse`` for that gauge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Union

import numpy as np

from .dicke import (
    DickeState,
    apply_oats,
    apply_rotation,
    as_spin,
    expectation,
    fidelity,
    make_css,
    measurement_probabilities,
)

HALF_PI = math.pi / 2
_MU_TOL = 1e-12


class Kind(str, Enum):
    GESP_E = "GESP_E"
    GESP_O = "GESP_O"
    CESP = "CESP"
    SCSP_E = "SCSP_E"
    SCSP_O = "SCSP_O"

    @property
    def symmetric(self) -> bool:
        """True when the signal is even in phi (everything but the CESP)."""
        return self is not Kind.CESP

    @property
    def even_branch(self) -> bool:
        """Uses the x-axis phase rotation (GESP-e family)."""
        return self in (Kind.GESP_E, Kind.SCSP_E)


class Form(str, Enum):
    SIMPLIFIED = "SIMPLIFIED"
    CLOCK = "CLOCK"
    LPAI = "LPAI"


@dataclass(frozen=True)
class Pulse:
    axis: str
    angle: float


@dataclass(frozen=True)
class Squeeze:
    mu: float
    sign: int  # applies exp(i * sign * mu * Sz^2)


@dataclass(frozen=True)
class PhaseRotation:
    axis: str
    scale: float = 1.0  # applies R_axis(scale * phi)


@dataclass(frozen=True)
class Measure:
    axis: str


Step = Union[Pulse, Squeeze, PhaseRotation, Measure]


@dataclass(frozen=True)
class ProtocolSpec:
    kind: Kind
    form: Form
    mu: float
    steps: tuple

    def __post_init__(self):
        measures = [i for i, s in enumerate(self.steps) if isinstance(s, Measure)]
        if measures != [len(self.steps) - 1]:
            raise ValueError("a protocol needs exactly one Measure step, placed last")

    @property
    def measure_axis(self) -> str:
        return self.steps[-1].axis

    @property
    def evolution(self) -> tuple:
        return self.steps[:-1]


def as_kind(kind) -> Kind:
    if isinstance(kind, Kind):
        return kind
    return Kind(str(kind).upper().replace("-", "_"))


def as_form(form) -> Form:
    if isinstance(form, Form):
        return form
    return Form(str(form).upper())


# axis layout per kind: (phase axis, auxiliary/pi-pulse axis, read-out axis, measured axis)
_AXES = {
    Kind.GESP_E: ("x", "y", "y", "x"),
    Kind.GESP_O: ("y", "x", "y", "x"),
    Kind.CESP: ("y", "x", "x", "y"),
}
_AXES[Kind.SCSP_E] = _AXES[Kind.GESP_E]
_AXES[Kind.SCSP_O] = _AXES[Kind.GESP_O]

# First auxiliary pulse angle that maps R_z(phi) exactly onto R_phase(+phi).
_CLOCK_AUX = {"y": -HALF_PI, "x": HALF_PI}
# Read-out pulse that maps S_z onto +S_measured.
_READOUT = {"x": -HALF_PI, "y": HALF_PI}   # keyed by the measured axis


def build_protocol(kind, form=Form.SIMPLIFIED, mu: float = 0.0) -> ProtocolSpec:
    kind = as_kind(kind)
    form = as_form(form)
    if kind in (Kind.SCSP_E, Kind.SCSP_O):
        mu = HALF_PI
    if not (-_MU_TOL <= mu <= HALF_PI + _MU_TOL):
        raise ValueError(f"mu must lie in [0, pi/2], got {mu}")
    mu = min(max(float(mu), 0.0), HALF_PI)

    phase_axis, aux_axis, readout_axis, meas_axis = _AXES[kind]
    squeeze, unsqueeze = Squeeze(mu, -1), Squeeze(mu, +1)

    if form is Form.SIMPLIFIED:
        steps = (squeeze, PhaseRotation(phase_axis, 1.0), unsqueeze, Measure(meas_axis))
    elif form is Form.CLOCK:
        aux = _CLOCK_AUX[aux_axis]
        steps = (
            squeeze,
            Pulse(aux_axis, aux),
            PhaseRotation("z", 1.0),
            Pulse(aux_axis, -aux),
            unsqueeze,
            Pulse(readout_axis, _READOUT[meas_axis]),
            Measure("z"),
        )
    else:
        # R_aux(a) R_z(-phi/2) R_aux(pi) R_z(phi/2) R_aux(a), with the same a on both sides
        aux = -HALF_PI if aux_axis == "y" else HALF_PI
        steps = (
            squeeze,
            Pulse(aux_axis, aux),
            PhaseRotation("z", 0.5),
            Pulse(aux_axis, math.pi),
            PhaseRotation("z", -0.5),
            Pulse(aux_axis, aux),
            unsqueeze,
            Pulse(readout_axis, _READOUT[meas_axis]),
            Measure("z"),
        )
    return ProtocolSpec(kind, form, mu, steps)


def flip_pulse(spec: ProtocolSpec, index: int) -> ProtocolSpec:
    """Copy of ``spec`` with the angle of the pulse at ``steps[index]`` negated."""
    step = spec.steps[index]
    if not isinstance(step, Pulse):
        raise ValueError(f"step {index} is not a pulse: {step!r}")
    steps = list(spec.steps)
    steps[index] = replace(step, angle=-step.angle)
    return replace(spec, steps=tuple(steps))


def apply_step(state: DickeState, step: Step, phi: float) -> DickeState:
    if isinstance(step, Squeeze):
        return apply_oats(state, -step.sign * step.mu)
    if isinstance(step, Pulse):
        return apply_rotation(state, step.axis, step.angle)
    if isinstance(step, PhaseRotation):
        return apply_rotation(state, step.axis, step.scale * phi)
    if isinstance(step, Measure):
        return state
    raise TypeError(f"unknown step {step!r}")


def initial_state(n_atoms: int) -> DickeState:
    return make_css(n_atoms, HALF_PI, 0.0)


def run(spec: ProtocolSpec, n_atoms: int, phi: float) -> DickeState:
    """Final state of ``spec`` for N atoms and accumulated phase ``phi``."""
    state = initial_state(n_atoms)
    for step in spec.evolution:
        state = apply_step(state, step, phi)
    return state


def stages(spec: ProtocolSpec, n_atoms: int, phi: float) -> dict[str, DickeState]:
    """Named intermediate states of a SIMPLIFIED protocol (for Husimi plots)."""
    if spec.form is not Form.SIMPLIFIED:
        raise ValueError("stages are defined for the SIMPLIFIED form")
    state = initial_state(n_atoms)
    out = {"initial": state}
    for name, step in zip(("post-squeeze", "post-phase", "final"), spec.evolution):
        state = apply_step(state, step, phi)
        out[name] = state
    return out


# --- signal, noise, and the numeric oracle --------------------------------

def _moments(state: DickeState, axis: str) -> tuple[float, float, float]:
    """(mean, variance, deficit) of S_axis, where deficit = S - mean.

    The deficit is summed directly from the outcome distribution so that a
    signal sitting a hair below S keeps its relative precision.
    """
    p = measurement_probabilities(state, axis)
    m = state.spin.m_values()
    deficit = float(np.dot(state.s - m, p))
    mean = state.s - deficit
    var = float(np.dot((m - mean) ** 2, p))
    return mean, max(var, 0.0), deficit


def signal(spec: ProtocolSpec, n_atoms: int, phi: float) -> float:
    return _moments(run(spec, n_atoms, phi), spec.measure_axis)[0]


def noise(spec: ProtocolSpec, n_atoms: int, phi: float) -> float:
    return math.sqrt(_moments(run(spec, n_atoms, phi), spec.measure_axis)[1])


def signal_and_noise(spec: ProtocolSpec, n_atoms: int, phi: float) -> tuple[float, float]:
    mean, var, _ = _moments(run(spec, n_atoms, phi), spec.measure_axis)
    return mean, math.sqrt(var)


def probe_phase(n_atoms: int, mu: float) -> float:
    """Probe phase for finite differences, kept well inside the central fringe."""
    pmf_estimate = math.sqrt(2) * (n_atoms / 2) * math.sin(mu)
    return 1e-4 / max(1.0, pmf_estimate)


def phase_gradient(spec: ProtocolSpec, n_atoms: int, phi: float, h: Optional[float] = None) -> float:
    """d<S_meas>/dphi by a five-point central stencil."""
    if h is None:
        h = probe_phase(n_atoms, spec.mu)
    s = [signal(spec, n_atoms, phi + k * h) for k in (-2, -1, 1, 2)]
    return (s[0] - 8 * s[1] + 8 * s[2] - s[3]) / (12 * h)


def numeric_sensitivity(spec: ProtocolSpec, n_atoms: int) -> Optional[float]:
    """Inverse phase uncertainty at phi = 0 from direct simulation.

    Anti-symmetric signals (CESP): |d signal/dphi| / noise at phi = 0.
    Symmetric signals: signal and noise both vanish linearly at phi = 0, so the
    ratio of their slopes is taken instead, i.e. |second difference of the
    signal| over (noise(phi0) / phi0) at the probe phase phi0.

    Returns None when the noise slope is numerically zero (flat signal, e.g.
    GESP-e with no squeezing), where the sensitivity is undefined.
    """
    if n_atoms < 2:
        raise ValueError("numeric sensitivity needs at least two atoms")
    h = probe_phase(n_atoms, spec.mu)
    axis = spec.measure_axis
    s = n_atoms / 2

    if not spec.kind.symmetric:
        grad = phase_gradient(spec, n_atoms, 0.0, h)
        sigma = math.sqrt(_moments(run(spec, n_atoms, 0.0), axis)[1])
        if sigma < 1e-300:
            return None
        return abs(grad) / sigma

    _, var_p, def_p = _moments(run(spec, n_atoms, h), axis)
    _, var_m, def_m = _moments(run(spec, n_atoms, -h), axis)
    # signal(h) - 2 S + signal(-h) = -(deficit(h) + deficit(-h))
    curvature = abs(def_p + def_m) / h**2
    noise_slope = 0.5 * (math.sqrt(var_p) + math.sqrt(var_m)) / h
    # rounding floor: amplitudes carry ~1e-16 absolute error
    if noise_slope <= 1e-9 * max(1.0, s):
        return None
    return curvature / noise_slope


# --- reductions -----------------------------------------------------------

def _reduction_residual(full: ProtocolSpec, simple: ProtocolSpec, n_atoms: int, phi: float) -> float:
    psi_full = run(full, n_atoms, phi)
    # undo the read-out pulse to compare states before detection
    readout = full.steps[-2]
    psi_full_pre = apply_rotation(psi_full, readout.axis, -readout.angle)
    psi_simple = run(simple, n_atoms, phi)
    state_res = max(0.0, 1.0 - fidelity(psi_full_pre, psi_simple))

    sig_full = _moments(psi_full, full.measure_axis)[0]
    sig_simple = _moments(psi_simple, simple.measure_axis)[0]
    signal_res = abs(sig_full - sig_simple) / (n_atoms / 2)
    return max(state_res, signal_res)


def verify_reduction(kind, n_atoms: int, mu: float, phi: float, forms=(Form.CLOCK, Form.LPAI)) -> float:
    """Largest discrepancy between the full forms and the simplified form.

    For each full form: 1 - |<psi_full|psi_simplified>| (read-out pulse undone),
    and the difference of the measured signals normalised by S.
    """
    kind = as_kind(kind)
    simple = build_protocol(kind, Form.SIMPLIFIED, mu)
    return max(
        _reduction_residual(build_protocol(kind, form, mu), simple, n_atoms, phi)
        for form in map(as_form, forms)
    )


def lpai_core_residual(kind, n_atoms: int, mu: float, phi: float, pi_axis: Optional[str] = None) -> float:
    """Check the five middle LPAI steps against a single rotation, in context.

    The auxiliary pulse, R_z(phi/2), a pi pulse about ``pi_axis``, R_z(-phi/2)
    and the second auxiliary pulse are applied to the squeezed state and
    compared with the effective phase rotation of the simplified protocol.
    A pi pulse about x only reproduces the rotation up to a phase on the
    squeezed state (it maps Sz -> -Sz, leaving exp(-i mu Sz^2)|x> invariant).
    """
    kind = as_kind(kind)
    phase_axis, aux_axis, _, _ = _AXES[kind]
    pi_axis = pi_axis or aux_axis
    aux = -HALF_PI if aux_axis == "y" else HALF_PI
    squeezed = apply_oats(initial_state(n_atoms), mu)

    psi = apply_rotation(squeezed, aux_axis, aux)
    psi = apply_rotation(psi, "z", phi / 2)
    psi = apply_rotation(psi, pi_axis, math.pi)
    psi = apply_rotation(psi, "z", -phi / 2)
    psi = apply_rotation(psi, aux_axis, aux)
    ref = apply_rotation(squeezed, phase_axis, phi)
    return max(0.0, 1.0 - fidelity(psi, ref))


def cat_orientation(n_atoms: int) -> str:
    """Axis ('x' or 'y') of the cat state made by OATS(pi/2) on |x>."""
    if n_atoms < 2:
        raise ValueError("cat orientation needs at least two atoms")
    cat = apply_oats(initial_state(n_atoms), HALF_PI)
    sx2 = expectation(cat, ["Sx", "Sx"]).real
    sy2 = expectation(cat, ["Sy", "Sy"]).real
    return "x" if sx2 > sy2 else "y"


def optimal_cesp_mu(n_atoms: int) -> float:
    """arccot sqrt(2S - 2), the squeezing strength that maximises the CESP."""
    two_s = as_spin(n_atoms).two_s
    if two_s <= 2:
        return HALF_PI
    return math.atan(1.0 / math.sqrt(two_s - 2))
