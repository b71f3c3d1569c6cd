import numpy as np
import pytest

from chordgeo.chord_measure import chord_measure_polytope, cone_chord_measure
from chordgeo.estimators import ChordLogMinkowskiSolver, ChordMinkowskiSolver


def test_get_set_params():
    est = ChordMinkowskiSolver(q=1.0, max_iters=50)
    params = est.get_params()
    assert params["q"] == 1.0 and params["max_iters"] == 50
    est.set_params(seed=7)
    assert est.seed == 7


def test_predict_before_fit_raises():
    with pytest.raises(AttributeError):
        ChordMinkowskiSolver().predict(np.eye(3))


def test_chord_solver_fit_predict(cube3):
    mu = chord_measure_polytope(cube3, 1.0)
    est = ChordMinkowskiSolver(q=1.0).fit(mu)
    assert est.residual_ <= 1e-2
    h = est.predict(np.eye(3))
    assert h == pytest.approx(np.ones(3), rel=5e-3)


def test_chord_solver_accepts_arrays(cube3):
    mu = chord_measure_polytope(cube3, 1.0)
    est = ChordMinkowskiSolver(q=1.0).fit(mu.directions, mu.masses)
    assert est.residual_ <= 1e-2


def test_log_solver_fit(cube3):
    mu = cone_chord_measure(cube3, 2.0)
    est = ChordLogMinkowskiSolver(q=2.0).fit(mu)
    assert est.residual_ <= 1e-2
    h = est.predict(np.vstack([np.eye(3), -np.eye(3)]))
    assert np.ptp(h) <= 5e-3 * h.mean()
