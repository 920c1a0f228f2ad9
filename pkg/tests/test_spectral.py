import numpy as np
import pytest

from localnonlocal import (EP, PE, DegenerateFit, assemble_system, decay_certificate, dissipation, fit_decay_rate,
                           integrate, lambda1, normalize, schur_generator)

from conftest import UNIT, mixed_system

SYS4 = mixed_system(4, 4)


@pytest.mark.parametrize("model", [PE, EP])
def test_gap_positive_constant_mode_zero(sys64, model):
    res = lambda1(sys64, model)
    assert res.lambda1 > 0
    assert abs(res.constant_mode_eigenvalue) <= 1e-10
    w = sys64.gridA.weights if model is PE else sys64.gridB.weights
    assert abs(w @ res.eigvec) <= 1e-10
    assert w @ res.eigvec**2 == pytest.approx(1.0, rel=1e-12)
    assert res.residual <= 1e-9
    assert (res.eigvec_u is None) is (model is EP)


@pytest.mark.parametrize("model", [PE, EP])
def test_rayleigh_sampling_4_cells(model):
    rng = np.random.default_rng(3)
    res = lambda1(SYS4, model)
    w = SYS4.gridA.weights
    X = rng.normal(size=(100_000, 4))
    X -= np.outer(X @ w / w.sum(), np.ones(4))
    X = np.vstack([X, res.eigvec])
    S_quot = np.array([dissipation(SYS4, x, model).total for x in X[-2000:]])
    # the bulk of the sample goes through the generator; a tail is cross-checked against D
    S = schur_generator(SYS4, model)
    q = np.einsum("ij,ij->i", X * w, X @ S.T) / ((X**2) @ w)
    np.testing.assert_allclose(q[-2000:], S_quot / ((X[-2000:] ** 2) @ w), rtol=1e-10)
    assert res.lambda1 <= q[:-1].min() + 1e-12
    assert q[-1] == pytest.approx(res.lambda1, rel=1e-10)


def test_fit_decay_rate_trivial():
    t = np.linspace(0, 3, 31)
    assert fit_decay_rate(t, np.exp(-2 * t)) == pytest.approx(2.0, abs=1e-12)
    assert fit_decay_rate(t, np.full(31, 4.0)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DegenerateFit):
        fit_decay_rate(t, np.where(t > 2, 0.0, 1.0))
    with pytest.raises(DegenerateFit):
        fit_decay_rate(t[:2], [1.0, 0.5])


@pytest.mark.parametrize("model", [PE, EP])
def test_eigenmode_decays_at_gap(model):
    s = mixed_system(32, 32)
    res = lambda1(s, model)
    T = 2.0 / res.lambda1
    rep = decay_certificate(s, model, res.eigvec, T, T / 400, spectral=res)
    assert rep.bound_holds
    assert rep.fitted_rate == pytest.approx(res.lambda1, rel=1e-8)
    ie = decay_certificate(s, model, res.eigvec, T, T / 4000, scheme="implicit_euler", spectral=res)
    assert ie.bound_holds
    assert ie.fitted_rate == pytest.approx(res.lambda1, rel=0.02)


@pytest.mark.parametrize("model", [PE, EP])
@pytest.mark.parametrize("scheme", ["exact", "implicit_euler", "crank_nicolson"])
def test_random_data_bound(rng, model, scheme):
    s = mixed_system(16, 16)
    res = lambda1(s, model)
    T = 3.0 / res.lambda1
    rep = decay_certificate(s, model, rng.normal(size=16), T, T / 300, scheme=scheme, spectral=res)
    assert rep.bound_holds
    assert rep.fitted_rate >= 0.98 * res.lambda1


def test_constant_data_trivial_bound():
    rep = decay_certificate(SYS4, PE, np.full(4, 3.0), 1.0, 0.1)
    assert rep.bound_holds
    assert np.max(rep.deviations) <= 1e-12


def test_implicit_euler_per_step_contraction(rng):
    s = mixed_system(16, 16)
    lam = lambda1(s, PE).lambda1
    w = s.gridA.weights
    x0 = rng.normal(size=16)
    x0 -= (w @ x0) / w.sum()
    dt = 0.01
    norms = np.sqrt((integrate(s, PE, x0, 1.0, dt, diagnostics=False).u ** 2) @ w)
    assert np.all(norms[1:] <= norms[:-1] / (1 + dt * lam) * (1 + 1e-12))


@pytest.mark.parametrize("model", [PE, EP])
def test_gap_monotone_in_G_amplitude(model):
    J, G = normalize("box", 1.0), normalize("tent", 0.5)
    gaps = [lambda1(assemble_system(UNIT, J, G.scaled(f), 24, 24), model).lambda1 for f in (1.0, 2.0, 4.0)]
    assert gaps[0] <= gaps[1] * (1 + 1e-12) and gaps[1] <= gaps[2] * (1 + 1e-12)
