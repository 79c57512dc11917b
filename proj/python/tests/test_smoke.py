import json
import math

import pytest

import shiftpert as sp


def test_measure_roundtrip():
    mu = sp.CircleMeasure([(1.0, 1.0), (0.5, 0.25)])
    assert len(mu) == 2
    assert mu.total_mass() == pytest.approx(1.25)
    nu = sp.cayley_measure(mu)
    back = sp.inverse_cayley_measure(nu)
    assert back.total_mass() == pytest.approx(1.25, rel=1e-12)


def test_single_atom_cayley_values():
    # atom at -1 with weight 1 lands at 0 with mass pi
    nu = sp.cayley_measure(sp.CircleMeasure([(1.0, 1.0)]))
    [(point, mass)] = nu.atoms()
    assert point == pytest.approx(0.0, abs=1e-15)
    assert mass == pytest.approx(math.pi, rel=1e-15)


def test_theta_single_atom_is_rotated_shift():
    # mu = delta_{-1} with unit weight gives theta(z) = -z
    f = sp.InnerFunctionModel(sp.CircleMeasure([(1.0, 1.0)]))
    for z in (0.3 + 0.1j, -0.5j, 0.0):
        assert f.theta(z) == pytest.approx(-z, abs=1e-14)


def test_hilbert_schmidt_identity():
    nu = sp.LineMeasure([(0.0, math.pi), (1.0, math.pi)])
    t = 1.0
    law = t * nu.total_mass() / (2 * math.pi)
    assert sp.gram_K_trace(nu, t) == pytest.approx(law, rel=1e-12)
    assert sp.hs_norm_sq_K(nu, t) == pytest.approx(law, rel=1e-6)


def test_model_norms_fixture():
    # single atom at -1: S~ - S has rank one and norm sqrt(2)
    model = sp.PerturbedShiftModel([sp.CircleMeasure([(1.0, 1.0)])])
    norms = model.stilde_minus_s_norms()
    assert norms["rank"] == 1
    assert norms["op_norm"] == pytest.approx(math.sqrt(2.0), rel=1e-9)
    assert norms["op_norm"] < norms["bound_47"]


def test_phi_diff_bounded_by_2K():
    mu = sp.CircleMeasure([(1.0, 1.0)])
    model = sp.PerturbedShiftModel([mu])
    spec = sp.phi_diff_spectrum(model, 1.0)
    s2 = sp.schatten_norm(spec, 2.0)
    k2 = sp.gram_K_trace(sp.cayley_measure(mu), 1.0)
    assert s2 <= 2.0 * math.sqrt(k2) * (1 + 1e-9)


def test_run_scenario_sharp3():
    out = sp.run_scenario(json.dumps({"kind": "counterexample-sharp3"}))
    assert out["ok"]
    report = json.loads(out["report_json"])
    assert report["divergence_certificate_ok"]
    assert report["tail_certificate_ok"]
