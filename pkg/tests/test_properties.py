import math

import numpy as np
from hypothesis import given, settings, strategies as st

from echosqueeze import analytics as an
from echosqueeze import protocols as pr
from echosqueeze.cli import fmt
from echosqueeze.decoherence import CollisionScenario, collision_contrast
from echosqueeze.dicke import apply_oats, apply_rotation, from_amplitudes, make_css

atoms = st.integers(min_value=1, max_value=80)
angles = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
mus = st.floats(min_value=0.0, max_value=math.pi / 2)
axes = st.sampled_from("xyz")


@st.composite
def states(draw, max_atoms=40):
    n = draw(st.integers(min_value=1, max_value=max_atoms))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    return from_amplitudes(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))


@given(states(), axes, angles)
def test_rotation_unitary(psi, axis, angle):
    assert abs(apply_rotation(psi, axis, angle).norm() - 1) < 1e-12


@given(states(), axes, angles, angles)
def test_rotation_composition(psi, axis, a, b):
    two = apply_rotation(apply_rotation(psi, axis, a), axis, b)
    one = apply_rotation(psi, axis, a + b)
    np.testing.assert_allclose(two.amplitudes, one.amplitudes, atol=1e-10)


@given(states(), angles)
def test_oats_unitary(psi, mu):
    assert abs(apply_oats(psi, mu).norm() - 1) < 1e-12


@given(states(), st.floats(min_value=-3, max_value=3))
def test_oats_period(psi, mu):
    # exp(-2 pi i m^2) is 1 for integer m and exp(-i pi/2) for half-integer m
    shifted = apply_oats(psi, mu + 2 * math.pi).amplitudes
    base = apply_oats(psi, mu).amplitudes
    factor = 1.0 if psi.n_atoms % 2 == 0 else np.exp(-0.5j * math.pi)
    np.testing.assert_allclose(shifted, factor * base, atol=1e-9)


@given(atoms, st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_css_normalized(n, theta, phi):
    assert abs(make_css(n, theta, phi).norm() - 1) < 1e-12


@given(st.integers(min_value=2, max_value=3000), mus)
def test_sensitivities_respect_bound(n, mu):
    for version in ("GESP_E", "GESP_O"):
        s = an.gesp_sensitivity(n, mu, version)
        if s is not None:
            assert s <= an.qcr_bound(n, mu, version) * (1 + 1e-9) + 1e-9
    assert an.cesp_sensitivity(n, mu) <= an.qcr_bound(n, mu, "CESP") * (1 + 1e-9) + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=40), st.floats(min_value=0.05, max_value=1.5), st.sampled_from(["GESP_E", "GESP_O"]))
def test_analytic_matches_simulation(n, mu, version):
    numeric = pr.numeric_sensitivity(pr.build_protocol(version, "SIMPLIFIED", mu), n)
    analytic = an.gesp_sensitivity(n, mu, version)
    assert (numeric is None) == (analytic is None)
    if analytic is not None:
        assert abs(analytic - numeric) <= 1e-6 * numeric


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(list(pr.Kind)), st.integers(min_value=1, max_value=30), mus, st.floats(-0.5, 0.5))
def test_full_forms_reduce(kind, n, mu, phi):
    assert pr.verify_reduction(kind, n, mu, phi) < 1e-9


@given(st.integers(min_value=1, max_value=500), st.data(), st.floats(0.0, math.pi / 2 - 1e-6))
def test_contrast_falls_with_collisions(n, data, mu):
    k = data.draw(st.integers(min_value=0, max_value=n - 1))
    a = collision_contrast(CollisionScenario(n, k, mu))
    b = collision_contrast(CollisionScenario(n, k + 1, mu)) if k + 1 < n else 0.0
    assert 0.0 <= b <= a <= 1.0


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_csv_floats_round_trip(x):
    assert float(fmt(x)) == x
