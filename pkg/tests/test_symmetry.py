"""The two-parameter scaling-boost group: argument maps, phase factors,
transformed solutions, closed forms, and the bridge to the moduli
transform."""

import math

import numpy as np
import pytest

from rakns.evolve import FlowSpec, Linear
from rakns.solutions import plane_wave, random_riemann_data, soliton
from rakns.spectral import Grid, residual, sample_onto_grid
from rakns.symmetry import (
    SymmetryParams,
    deformed_arguments,
    hirota_closed_form,
    identity_errors,
    mixed_arguments,
    phase_factor,
    scaling,
    transform_arguments,
    transform_solution,
)


def test_params_reject_zero_a():
    with pytest.raises(ValueError):
        SymmetryParams(0.0, 1.0)


def test_composition_law():
    p1 = SymmetryParams(1.5, 0.3)
    p2 = SymmetryParams(0.8, -0.2)
    combo = p1.compose(p2)
    assert combo.a == pytest.approx(1.5 * 0.8)
    assert combo.b == pytest.approx(0.8 * 0.3 - 0.2)


def test_composition_matches_argument_maps():
    """Applying the argument maps one after the other equals the composite."""
    p1 = SymmetryParams(1.5, 0.3)
    p2 = SymmetryParams(0.8, -0.2)
    x, times = 0.7, (0.2, -0.1, 0.05, 0.0, 0.3)
    X1, T1 = transform_arguments(p2, x, times)
    X12, T12 = transform_arguments(p1, X1, T1)
    Xc, Tc = transform_arguments(p1.compose(p2), x, times)
    assert X12 == pytest.approx(Xc)
    assert np.allclose(T12, Tc)


def test_identity_transform_is_trivial():
    p = SymmetryParams(1.0, 0.0)
    x, times = 1.2, (0.3, 0.4)
    X, T = transform_arguments(p, x, times)
    assert X == x and T == times
    assert complex(phase_factor(p, x, times)) == 1.0


def test_argument_map_zero_boost_is_pure_scaling():
    p = SymmetryParams(2.0, 0.0)
    X, T = transform_arguments(p, 1.0, (1.0, 1.0, 1.0))
    assert X == pytest.approx(2.0)
    assert np.allclose(T, [4.0, 8.0, 16.0])  # a^{j+1}


def test_phase_factor_unit_modulus():
    p = SymmetryParams(1.3, 0.4)
    ph = phase_factor(p, np.linspace(-5, 5, 11), (0.2, -0.1))
    assert np.allclose(np.abs(ph), 1.0)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_transformed_soliton_solves_flows(k):
    """Covariance check: the transformed sampler passes the single-flow
    residual test (boost chosen commensurate with the period)."""
    g = Grid(512, 40.0)
    b = 2 * math.pi / g.length  # e^{-2ibx} periodic on the grid
    p = SymmetryParams(1.2, b)
    s = transform_solution(soliton(1.0), p)
    spec = FlowSpec([(k, Linear(1.0))])
    d = 1e-5
    fields = []
    for sgn in (-1, 0, 1):
        times = [0.0] * 5
        times[k - 1] = sgn * d
        fields.append(sample_onto_grid(s, g, tuple(times), t=sgn * d, images=2))
    assert residual(*fields, spec) < 1e-5


def test_transformed_plane_wave_solves_nls():
    g = Grid(256, 40.0)
    b = -3 * math.pi / g.length
    p = SymmetryParams(0.9, b)
    s = transform_solution(plane_wave(1.0), p)
    spec = FlowSpec([(1, Linear(1.0))])
    d = 1e-5
    fields = [sample_onto_grid(s, g, (sgn * d,), t=sgn * d) for sgn in (-1, 0, 1)]
    assert residual(*fields, spec) < 1e-8


def test_galilean_boost_velocity():
    """Pure boost on the first flow shifts the soliton peak with velocity
    -4b (binomial C(2,1)(2b) in the argument map)."""
    b = 0.25
    p = SymmetryParams(1.0, b)
    s = transform_solution(soliton(1.0), p)
    t = 0.8
    xs = np.linspace(-6, 6, 4001)
    profile = np.abs(s(xs, (t,)))
    peak = xs[np.argmax(profile)]
    assert peak == pytest.approx(-4 * b * t, abs=xs[1] - xs[0] + 1e-9)


def test_scaling_equals_transform_on_flow_ray():
    """scaling(n, q) must agree with transform_solution((q, 0)) when only
    t_n runs."""
    base = soliton(1.0)
    for n in (1, 2, 3, 4, 5):
        for q in (0.5, 2.0):
            sc = scaling(n, q, base)
            tr = transform_solution(base, SymmetryParams(q, 0.0))
            xs = np.linspace(-2, 2, 9)
            t = 0.11
            times = [0.0] * 5
            times[n - 1] = t
            assert np.allclose(sc(xs, tuple(times)), tr(xs, tuple(times)), atol=1e-12)


def test_scaling_requires_positive_q():
    with pytest.raises(ValueError):
        scaling(1, -1.0, soliton(1.0))


def test_mixed_arguments_delegation():
    """The mixed-equation arguments are the hierarchy map on the ray
    t_m = b_m t."""
    p = SymmetryParams(1.4, 0.2)
    coeffs = (0.7, -0.3, 0.1)
    t = 0.6
    X, T = mixed_arguments(p, coeffs, t, x=0.5)
    X2, T2 = transform_arguments(p, 0.5, tuple(c * t for c in coeffs))
    assert X == pytest.approx(X2)
    assert np.allclose(T, T2)


def test_deformed_arguments_delegation():
    from rakns.evolve import Sinusoid

    p = SymmetryParams(1.1, -0.15)
    schedules = (Sinusoid(1.0, 1.0), Linear(0.5))
    t = 0.9
    X, T, ph = deformed_arguments(p, schedules, t, x=0.3)
    vals = tuple(s.value(t) for s in schedules)
    X2, T2 = transform_arguments(p, 0.3, vals)
    assert X == pytest.approx(X2)
    assert np.allclose(T, T2)
    assert complex(ph) == pytest.approx(complex(phase_factor(p, 0.3, vals)))


def test_hirota_closed_form_matches_generic():
    """The explicit Hirota-ray formula equals transform + mixed delegation."""
    rng = np.random.default_rng(9)
    base = soliton(1.0)
    for _ in range(10):
        a = rng.uniform(0.5, 2.0)
        b = rng.uniform(-0.5, 0.5)
        alpha = rng.uniform(-1.0, 1.0)
        beta = rng.uniform(-1.0, 1.0)
        closed = hirota_closed_form(a, b, alpha, beta, base)
        p = SymmetryParams(a, b)
        generic = transform_solution(base, p)
        xs = rng.uniform(-3, 3, size=32)
        t = rng.uniform(-0.5, 0.5)
        want = generic(xs, (alpha * t, -beta * t))
        got = closed(xs, (t,))
        assert np.max(np.abs(got - want)) < 1e-12


def test_identity_errors_random_data():
    data = random_riemann_data(2, 5, rng=41)
    p = SymmetryParams(1.8, -0.35)
    errs = identity_errors(data, p, 5)
    assert errs["argument"] < 1e-12
    assert errs["phase"] < 1e-12
