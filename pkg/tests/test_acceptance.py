"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The lines are printed as the tests run (visible with ``-s``) and repeated in
the terminal summary. ``python3 tests/test_acceptance.py`` runs the suite
standalone.
"""
import time

import numpy as np
import pytest

from localnonlocal import (EP, PE, Partition1D, assemble_system, coercivity_constant, convergence_study,
                           decay_certificate, dissipation, expm_reference, integrate, interface_jump_demo,
                           lambda1, normalize, picard_solve, schur_generator, solve_u_given_v, solve_v_given_u)
from localnonlocal.config import PRESETS, initial_values, preset
from localnonlocal.evolution import Stepper, evolving_grid

from conftest import ACCEPTANCE_LINES
from oracles import projected_gradient_min

MODELS = (PE, EP)


def sci(a):
    return "[" + " ".join(f"{x:.2e}" for x in a) + "]"


def report(number, title, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}]"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


@pytest.fixture(scope="module")
def ref_sys():
    return preset("reference").system()


def test_criterion_01_mass_conservation(ref_sys):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    drifts = {}
    for model in MODELS:
        w = evolving_grid(ref_sys, model).weights
        x = rng.uniform(0.5, 1.5, len(w))
        m0 = w @ x
        stepper = Stepper(ref_sys, model, 1e-3)
        worst = 0.0
        for _ in range(10_000):
            x = stepper.advance(x)
            worst = max(worst, abs(w @ x - m0))
        drifts[model.value] = worst / abs(m0)
    elapsed = time.perf_counter() - start
    ok = max(drifts.values()) <= 1e-11 and elapsed < 10.0
    report(1, "mass conservation, 1e4 implicit-Euler steps", ok,
           ", ".join(f"{k} drift {v:.1e}" for k, v in drifts.items()) + f", {elapsed:.1f} s")


def test_criterion_02_stationary_constants(ref_sys):
    c = 2.5
    worst = 0.0
    for model in MODELS:
        n = evolving_grid(ref_sys, model).n
        traj = integrate(ref_sys, model, np.full(n, c), 1.0, 1e-3, diagnostics=False)
        assert traj.info["steps"] == 1000
        worst = max(worst, np.max(np.abs(traj.u - c)), np.max(np.abs(traj.v - c)))
    report(2, "constants reproduce themselves over 1e3 steps", worst <= 1e-12, f"max deviation {worst:.1e}")


def test_criterion_03_comparison_principle(ref_sys):
    rng = np.random.default_rng(3)
    worst = np.inf
    for model in MODELS:
        n = evolving_grid(ref_sys, model).n
        for _ in range(50):
            hi = rng.normal(size=n)
            lo = hi - rng.uniform(0.0, 1.0, n) * (rng.uniform(size=n) < 0.5)
            a = integrate(ref_sys, model, hi, 0.2, 1e-2, diagnostics=False)
            b = integrate(ref_sys, model, lo, 0.2, 1e-2, diagnostics=False)
            worst = min(worst, np.min(a.u - b.u), np.min(a.v - b.v))
    report(3, "ordering preserved, 50 ordered pairs per model", worst >= -1e-12,
           f"min(u - u~, v - v~) = {worst:.2e}")


def _identity_residual(sys, model, x0, T, dt):
    traj = integrate(sys, model, x0, T, dt, diagnostics=False)
    w = evolving_grid(sys, model).weights
    xs = traj.evolving
    sq = (xs**2) @ w
    D = np.array([dissipation(sys, x, model).total for x in xs[1:]])
    h = traj.info["dt"]
    return float(np.max(np.abs((sq[1:] - sq[:-1]) / (2 * h) + D)))


def test_criterion_04_dissipation_identity(ref_sys):
    orders = {}
    for model in MODELS:
        g = evolving_grid(ref_sys, model)
        x0 = np.cos(np.pi * g.centers) + 0.5 * g.centers
        dts = [4e-3, 2e-3, 1e-3, 5e-4]
        res = [_identity_residual(ref_sys, model, x0, 0.2, dt) for dt in dts]
        orders[model.value] = float(np.polyfit(np.log(dts), np.log(res), 1)[0])
    ok = all(abs(p - 1.0) <= 0.2 for p in orders.values())
    report(4, "dissipation identity residual is O(dt)", ok,
           ", ".join(f"{k} order {v:.3f}" for k, v in orders.items()))


def test_criterion_05_spectral_decay(ref_sys):
    rng = np.random.default_rng(5)
    parts, ok = [], True
    for model in MODELS:
        spec = lambda1(ref_sys, model)
        T = 3.0 / spec.lambda1
        eig = decay_certificate(ref_sys, model, spec.eigvec, T, T / 600, spectral=spec)
        eig_ie = decay_certificate(ref_sys, model, spec.eigvec, T, T / 3000, scheme="implicit_euler",
                                   spectral=spec)
        rel = abs(eig.fitted_rate - spec.lambda1) / spec.lambda1
        rel_ie = abs(eig_ie.fitted_rate - spec.lambda1) / spec.lambda1
        g = evolving_grid(ref_sys, model)
        bound_ok = True
        for _ in range(10):
            x0 = rng.normal(size=g.n)
            x0 -= g.mean(x0)
            bound_ok &= decay_certificate(ref_sys, model, x0, T, T / 600, spectral=spec).bound_holds
        ok &= rel <= 0.02 and rel_ie <= 0.02 and eig.bound_holds and bound_ok
        parts.append(f"{model.value} lambda1 {spec.lambda1:.5g}, eigvec rate err {rel:.1e} "
                     f"(implicit Euler {rel_ie:.1e}), random bound {'held' if bound_ok else 'broken'}")
    report(5, "exponential decay at rate lambda1", ok, "; ".join(parts))


def test_criterion_06_elliptic_oracle():
    rng = np.random.default_rng(6)
    part = Partition1D((-1.0, 0.0), (0.0, 1.0))
    worst = 0.0
    for _ in range(20):
        J = normalize("box", rng.uniform(0.5, 1.5))
        G = normalize("tent", rng.uniform(0.3, 1.0))
        s = assemble_system(part, J, G, 6, 6)
        u = rng.normal(size=6)
        worst = max(worst, np.max(np.abs(solve_v_given_u(s, u) - projected_gradient_min(s, u))))
    report(6, "direct solve equals projected-gradient minimizer of F", worst <= 1e-8,
           f"20 instances, max difference {worst:.1e}")


def test_criterion_07_cross_solver(ref_sys):
    tol = 1e-11
    s = preset("demo-jump").system()
    u0 = np.random.default_rng(7).normal(size=s.nA)
    pic = picard_solve(s, u0, 0.1, 1e-3, tol=tol)
    dae = integrate(s, PE, u0, 0.1, 1e-3, diagnostics=False)
    picard_err = float(np.max(np.sqrt(((pic.u - dae.u) ** 2) @ s.gridA.weights)))

    small = assemble_system(Partition1D((-1.0, 0.0), (0.0, 1.0)), normalize("box", 1.0),
                            normalize("tent", 0.5), 16, 16)
    orders = {}
    dts = [0.02, 0.01, 0.005, 0.0025]
    for model in MODELS:
        g = evolving_grid(small, model)
        x0 = np.cos(np.pi * g.centers) + 0.5 * g.centers**2
        ref = expm_reference(schur_generator(small, model), 0.5, x0, g.weights)
        for scheme in ("implicit_euler", "crank_nicolson"):
            errs = [g.norm(integrate(small, model, x0, 0.5, dt, scheme, diagnostics=False).evolving[-1] - ref)
                    for dt in dts]
            orders[(model.value, scheme)] = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    ok = picard_err <= 10 * tol and all(
        abs(p - (1.0 if sch == "implicit_euler" else 2.0)) <= 0.2 for (_, sch), p in orders.items())
    report(7, "Picard and expm cross-checks", ok,
           f"Picard diff {picard_err:.1e} (q={pic.info['contraction_factor']:.2f}, "
           f"{pic.info['iterations']} it); "
           + ", ".join(f"{m} {sch} order {p:.3f}" for (m, sch), p in orders.items()))


def test_criterion_08_epsilon_limit():
    # the reference scenario at 32 + 32 cells keeps the study well under the time budget
    s = assemble_system(Partition1D((-1.0, 0.0), (0.0, 1.0)), normalize("box", 1.0), normalize("box", 1.0), 32, 32)
    ladder = [1e-1, 1e-2, 1e-3]
    start = time.perf_counter()
    xA, xB = s.gridA.centers, s.gridB.centers
    u0 = np.cos(np.pi * xA) + 0.5 * xA
    v0 = np.sin(np.pi * xB)
    ok, parts = True, []
    for model, slow0, fast_bad, fast_of in (
            (PE, u0, v0, lambda x: solve_v_given_u(s, x)),
            (EP, v0 + (xB > 0.5), u0, lambda x: solve_u_given_v(s, x))):
        fast_ok = fast_of(slow0)
        free = (convergence_study(s, model, ladder, slow0, fast_ok, 0.5, 1e-4) if model is PE
                else convergence_study(s, model, ladder, fast_ok, slow0, 0.5, 1e-4))
        bad = (convergence_study(s, model, ladder, slow0, fast_bad, 0.5, 1e-4) if model is PE
               else convergence_study(s, model, ladder, fast_bad, slow0, 0.5, 1e-4))
        gap = (s.gridB if model is PE else s.gridA).norm(fast_bad - fast_ok)
        dec = bool(np.all(np.diff(free.errors_u) < 0) and np.all(np.diff(bad.errors_u) < 0))
        layer_stays = bool(np.all(bad.errors_v_layer >= 0.5 * gap))
        tail_vanishes = bool(np.all(np.diff(bad.errors_v_tail) < 0) and
                             bad.errors_v_tail[-1] <= 0.05 * bad.errors_v_tail[0])
        ok &= dec and layer_stays and tail_vanishes
        parts.append(f"{model.value}: slow errors {sci(free.errors_u)}, "
                     f"layer {sci(bad.errors_v_layer)}, "
                     f"tail {sci(bad.errors_v_tail)}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    report(8, "eps -> 0 limit with initial layer", ok, "; ".join(parts) + f"; {elapsed:.1f} s")


def test_criterion_09_interface_jump():
    cfg = preset("demo-jump")
    J, G = cfg.kernels()
    s = cfg.system()
    ones_solve_is_one = bool(np.allclose(solve_v_given_u(s, np.ones(s.nA)), 1.0, atol=1e-12))
    rep = interface_jump_demo(cfg.nA, cfg.dt, cfg.T, lambda x: initial_values(cfg.u0, x), J=J, G=G,
                              partition=cfg.partition)
    const = interface_jump_demo(cfg.nA, cfg.dt, cfg.T, lambda x: np.ones_like(x), J=J, G=G,
                                partition=cfg.partition)
    first = rep.jump[:6]
    ok = bool(np.all(first > 0)) and float(np.max(np.abs(const.jump))) <= 1e-12
    report(9, "interface jump", ok,
           f"demo-jump first jumps {sci(first)}; constant case max |jump| "
           f"{np.max(np.abs(const.jump)):.1e}; solve of u0=1 is 1: {ones_solve_is_one}")


def test_criterion_10_coercivity(blind_system):
    values = {name: coercivity_constant(preset(name).system()) for name in sorted(PRESETS)}
    cc, vec = coercivity_constant(blind_system, return_vector=True)
    const_vec = bool(np.max(np.abs(vec - vec[0])) <= 1e-12)
    ok = all(v > 1e-12 for v in values.values()) and abs(cc) <= 1e-12 and const_vec
    report(10, "coercivity constant", ok,
           ", ".join(f"{k} C_c={v:.4g}" for k, v in values.items())
           + f"; J missing B: C_c={cc:.1e}, constant eigenvector {const_vec}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
