import math

import numpy as np
import pytest

from chordgeo.geometry import Ball, Ellipsoid, HPolytope, unit_ball_volume
from chordgeo.chord_integral import ball_chord_integral
from chordgeo.chord_measure import DiscreteSphericalMeasure
from chordgeo.concentration import (
    NotSymmetric,
    SubspaceSpec,
    concentration_bound,
    ellipsoid_bound_constant,
    ellipsoid_chord_bound_check,
    ellipsoid_entropy_bound_check,
    sharpness_sequence,
    subspace_mass_ratio,
)


def test_subspace_spec_validation():
    with pytest.raises(ValueError):
        SubspaceSpec(np.array([[1.0, 1.0, 0.0]]))  # not unit
    with pytest.raises(ValueError):
        SubspaceSpec(np.eye(3))  # k must stay below n
    s = SubspaceSpec.coordinate(3, [0, 2])
    assert s.k == 2


def test_concentration_bound_values():
    assert concentration_bound(1, 1.0, 3) == pytest.approx(1.0 / 3.0)
    assert concentration_bound(1, 3.0, 3) == pytest.approx(2.0 / 5.0)
    assert concentration_bound(2, 2.0, 3) == pytest.approx(1.0)


def test_cube_coordinate_ratios(cube3):
    # each axis pair of the cube carries a third of the cone-chord measure
    xi = SubspaceSpec.coordinate(3, [0])
    for q in (1.0, 2.0, 3.0, 4.0):
        ratio, bound = subspace_mass_ratio(cube3, xi, q)
        assert ratio == pytest.approx(1.0 / 3.0, abs=5e-3)
        assert ratio < bound or bound == pytest.approx(1.0 / 3.0)


def test_cube_q1_hits_bound_exactly(cube3):
    ratio, bound = subspace_mass_ratio(cube3, SubspaceSpec.coordinate(3, [0]), 1.0)
    assert bound == pytest.approx(1.0 / 3.0)
    assert ratio == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_asymmetric_polytope_rejected():
    P = HPolytope(np.vstack([np.eye(3), -np.eye(3)]), np.array([1.0, 1.0, 1.0, 2.0, 1.0, 1.0]))
    with pytest.raises(NotSymmetric):
        subspace_mass_ratio(P, SubspaceSpec.coordinate(3, [0]), 2.0)


def test_noninteger_q_rejected(cube3):
    with pytest.raises(ValueError):
        subspace_mass_ratio(cube3, SubspaceSpec.coordinate(3, [0]), 1.5)


def test_sharpness_requires_k_below_q_minus_1():
    with pytest.raises(ValueError):
        sharpness_sequence(1, 2.0, 3, [2, 4])


def test_sharpness_sequence_approaches_limit():
    rows = sharpness_sequence(1, 3.0, 3, [2, 4, 8, 16])
    ratios = [r["ratio"] for r in rows]
    assert all(b["ratio"] > a["ratio"] for a, b in zip(rows, rows[1:]))
    assert rows[-1]["limit"] == pytest.approx(0.4)
    assert ratios[-1] >= 0.95 * 0.4
    assert all(r["ratio"] < r["bound"] + 1e-9 for r in rows)


def test_ellipsoid_constant_blows_up_near_integers():
    mid = ellipsoid_bound_constant(2.5, 3)
    assert math.isfinite(mid) and mid > 0
    assert ellipsoid_bound_constant(2.001, 3) > 100 * mid
    assert ellipsoid_bound_constant(2.999, 3) > 100 * mid
    with pytest.raises(ValueError):
        ellipsoid_bound_constant(2.0, 3)


def test_ellipsoid_chord_bound_ball():
    B = Ellipsoid(np.zeros(3), np.array([0.8, 0.8, 0.8]), np.eye(3))
    out = ellipsoid_chord_bound_check(B, 2.5)
    assert out["std_error"] == 0.0
    assert out["lhs"] == pytest.approx(ball_chord_integral(3, 2.5, 0.8), rel=1e-12)
    assert out["ok"]


def test_ellipsoid_chord_bound_generic():
    E = Ellipsoid(np.zeros(3), np.array([0.3, 0.6, 0.9]), np.eye(3))
    out = ellipsoid_chord_bound_check(E, 1.5, N=200_000, seed=7)
    assert out["ok"]


def test_ellipsoid_chord_bound_requires_unit_axes():
    E = Ellipsoid(np.zeros(3), np.array([0.5, 1.0, 2.0]), np.eye(3))
    with pytest.raises(ValueError):
        ellipsoid_chord_bound_check(E, 1.5)


def test_entropy_bound_table():
    dirs = np.vstack([np.eye(3), -np.eye(3)])
    mu = DiscreteSphericalMeasure(dirs, np.ones(6))
    E_seq = [
        Ellipsoid(np.zeros(3), np.array([1.0 / j, 1.0, 1.0]), np.eye(3)) for j in (1, 2, 4, 8)
    ]
    rows = ellipsoid_entropy_bound_check(E_seq, mu, 2.5, t0=0.2, c0=1.0)
    assert len(rows) == 4
    # entropy of the shrinking family grows like -(1/3) log a_1 while the
    # bound keeps the t0 log a_1 slack: diff stays bounded above
    assert all(math.isfinite(r["diff"]) for r in rows)
    assert rows[0]["entropy"] == pytest.approx(0.0, abs=1e-12)
