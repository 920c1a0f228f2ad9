"""Command-line entry point: ``localnonlocal <subcommand> --config run.json``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 violated runtime invariant.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, initial_values, parse_config, preset
from .elliptic import coercivity_constant, solve_u_given_v, solve_v_given_u
from .epsilon import convergence_study
from .errors import ConfigError, InvariantViolation, LocalNonlocalError, NumericalError, ParseError
from .evolution import integrate, interface_jump_demo, schur_generator
from .kernels import validate_hypothesis
from .models import PE
from .spectral import lambda1

log = logging.getLogger("localnonlocal")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INVARIANT = 0, 1, 2, 3
MASS_RTOL = 1e-10


def _fmt(x):
    return f"{float(x):.17g}"


def _write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([r if isinstance(r, (str, int)) else _fmt(r) for r in row])


def _out(out_dir, name):
    p = Path(name)
    return p if p.is_absolute() else Path(out_dir) / p


def _initial(cfg: RunConfig, sys_):
    u0 = None if cfg.u0 is None else initial_values(cfg.u0, sys_.gridA.centers)
    v0 = None if cfg.v0 is None else initial_values(cfg.v0, sys_.gridB.centers)
    return u0, v0


def trajectory_rows(sys_, traj):
    for t, u, v in zip(traj.times, traj.u, traj.v):
        for i, (x, val) in enumerate(zip(sys_.gridA.centers, u)):
            yield (t, i, "A", x, val)
        for i, (x, val) in enumerate(zip(sys_.gridB.centers, v)):
            yield (t, i, "B", x, val)


def cmd_simulate(cfg: RunConfig, out_dir):
    sys_ = cfg.system()
    u0, v0 = _initial(cfg, sys_)
    init = u0 if cfg.model is PE else v0
    traj = integrate(sys_, cfg.model, init, cfg.T, cfg.dt, cfg.scheme, stride=cfg.snapshot_stride)
    _write_csv(_out(out_dir, cfg.trajectory_path), ["t", "cell_index", "domain", "x", "value"],
               trajectory_rows(sys_, traj))
    diag = traj.diagnostics
    cols = ["massA", "massB", "L2u", "L2v", "dissipation", "Ev", "F"]
    _write_csv(_out(out_dir, cfg.diagnostics_path), ["t"] + cols,
               zip(traj.times, *(diag[c] for c in cols)))
    key, grid = ("massA", sys_.gridA) if cfg.model is PE else ("massB", sys_.gridB)
    mass = diag[key]
    scale = grid.integrate(np.abs(init))
    drift = float(np.max(np.abs(mass - mass[0])))
    print(f"simulated {cfg.model.value}: {traj.info['steps']} steps to T={cfg.T:g}, "
          f"{len(traj)} snapshots; {key} drift {drift:.3e}")
    if drift > MASS_RTOL * max(scale, 1e-300):
        raise InvariantViolation(f"{key} drifted by {drift:.3e} (scale {scale:.3e})")


def cmd_eigen(cfg: RunConfig, out_dir):
    sys_ = cfg.system()
    res = lambda1(sys_, cfg.model)
    grid = sys_.gridA if cfg.model is PE else sys_.gridB
    domain = "A" if cfg.model is PE else "B"
    print(f"model: {cfg.model.value}")
    print(f"lambda1: {_fmt(res.lambda1)}")
    print(f"constant_mode_eigenvalue: {res.constant_mode_eigenvalue:.3e}")
    print(f"residual: {res.residual:.3e}")
    _write_csv(_out(out_dir, "eigenvector.csv"), ["cell_index", "domain", "x", "value"],
               ((i, domain, x, val) for i, (x, val) in enumerate(zip(grid.centers, res.eigvec))))


def cmd_epsilon_study(cfg: RunConfig, out_dir):
    sys_ = cfg.system()
    u0, v0 = _initial(cfg, sys_)
    # a missing fast datum defaults to the layer-free choice
    if cfg.model is PE and v0 is None:
        v0 = solve_v_given_u(sys_, u0)
    if cfg.model is not PE and u0 is None:
        u0 = solve_u_given_v(sys_, v0)
    if u0 is None:
        raise ConfigError("initial.u0", "required for the epsilon study")
    if v0 is None:
        raise ConfigError("initial.v0", "required for the epsilon study")
    study = convergence_study(sys_, cfg.model, cfg.eps_ladder, u0, v0, cfg.T, cfg.dt, cfg.t_layer)
    _write_csv(_out(out_dir, "epsilon_study.csv"), study.column_names, study.rows())
    summary = {
        "model": cfg.model.value,
        "eps": study.eps_ladder.tolist(),
        "errors_slow": study.errors_u.tolist(),
        "errors_fast_tail": study.errors_v_tail.tolist(),
        "errors_fast_layer": study.errors_v_layer.tolist(),
        "t_layer": study.t_layer,
        "observed_order": study.observed_order,
    }
    path = _out(out_dir, "epsilon_summary.json")
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    for row in study.rows():
        print("  ".join(_fmt(x) for x in row))
    print(f"observed_order: {study.observed_order:.4f}")


def cmd_demo_jump(cfg: RunConfig, out_dir):
    J, G = cfg.kernels()
    if cfg.nA != cfg.nB:
        log.warning("demo-jump uses nA for both subdomains")
    if cfg.u0 is None:
        raise ConfigError("initial.u0", "required for demo-jump")
    try:
        rep = interface_jump_demo(cfg.nA, cfg.dt, cfg.T, lambda x: initial_values(cfg.u0, x),
                                  J=J, G=G, scheme=cfg.scheme, partition=cfg.partition)
    except ValueError as exc:
        raise ConfigError("A", str(exc)) from None
    _write_csv(_out(out_dir, "jump.csv"), ["t", "u_interface", "v_interface", "jump"],
               zip(rep.times, rep.u_interface, rep.v_interface, rep.jump))
    print(f"jump at t=0: {rep.jump[0]:.6g}, at t={rep.times[-1]:g}: {rep.jump[-1]:.6g}")


def validation_checks(cfg: RunConfig):
    """(name, passed, detail) triples for the hypothesis and structural invariants."""
    J, _ = cfg.kernels()
    hyp = validate_hypothesis(J, cfg.partition)
    checks = [("kernel hypothesis", hyp.passed,
               f"dist(A,B)={hyp.distance:g}, J radius={hyp.radius:g}")]
    if not hyp.passed:
        return checks
    sys_ = cfg.system()
    ones_A, ones_B = np.ones(sys_.nA), np.ones(sys_.nB)
    wA, wB = sys_.gridA.weights, sys_.gridB.weights
    L = sys_.L
    checks.append(("laplacian zero row sums", np.max(np.abs(L @ ones_A)) == 0.0, ""))
    checks.append(("laplacian symmetric", np.array_equal(L, L.T), ""))
    Gw = sys_.Gbb / wB[None, :]
    checks.append(("G weighted symmetry", np.allclose(Gw, Gw.T, rtol=0, atol=1e-13), ""))
    checks.append(("J cross symmetry",
                   np.allclose(sys_.Jab / wB[None, :], (sys_.Jba / wA[None, :]).T, rtol=0, atol=1e-13), ""))
    checks.append(("degree identities",
                   np.array_equal(sys_.a_vec, sys_.Jba @ ones_A) and np.array_equal(sys_.b_vec, sys_.Jab @ ones_B)
                   and np.array_equal(sys_.g_vec, sys_.Gbb @ ones_B), ""))
    cc = coercivity_constant(sys_)
    checks.append(("coercivity", cc > 1e-12, f"C_c={cc:.6g}"))
    S = schur_generator(sys_, cfg.model)
    w = wA if cfg.model is PE else wB
    checks.append(("constants stationary", np.max(np.abs(S @ np.ones(len(w)))) <= 1e-10 * np.max(np.abs(S)), ""))
    lam = lambda1(sys_, cfg.model)
    checks.append(("spectral gap", lam.lambda1 > 0, f"lambda1={lam.lambda1:.6g}"))
    rng = np.random.default_rng(0)
    x0 = rng.uniform(0.5, 1.5, len(w))
    traj = integrate(sys_, cfg.model, x0, 100 * cfg.dt, cfg.dt, diagnostics=False)
    mass = traj.evolving @ w
    drift = float(np.max(np.abs(mass - mass[0])) / abs(mass[0]))
    checks.append(("mass conservation", drift <= MASS_RTOL, f"relative drift {drift:.2e}"))
    return checks


def cmd_validate(cfg: RunConfig, out_dir):
    checks = validation_checks(cfg)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
    failed = [name for name, ok, _ in checks if not ok]
    if failed:
        raise InvariantViolation("failed checks: " + ", ".join(failed))


COMMANDS = {
    "simulate": cmd_simulate,
    "eigen": cmd_eigen,
    "epsilon-study": cmd_epsilon_study,
    "demo-jump": cmd_demo_jump,
    "validate": cmd_validate,
}


def build_parser():
    p = argparse.ArgumentParser(prog="localnonlocal", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=sorted(COMMANDS))
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="JSON run configuration")
    src.add_argument("--preset", help="built-in scenario (reference, reference-model2, demo-jump, gap)")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="directory for CSV/JSON outputs")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config(args) -> RunConfig:
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from None
        return parse_config(text)
    name = args.preset or ("demo-jump" if args.subcommand == "demo-jump" else None)
    if name is None:
        raise ConfigError("--config", "either --config or --preset is required")
    return preset(name)


def run(subcommand, config: RunConfig, out_dir=".") -> int:
    try:
        COMMANDS[subcommand](config, Path(out_dir))
    except (ConfigError, ParseError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
    except (ConfigError, ParseError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LocalNonlocalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(args.subcommand, cfg, args.out_dir)


if __name__ == "__main__":
    sys.exit(main())
