"""Command-line front end.

    randnet check CONFIG [--force]
    randnet simulate CONFIG [--n N] [--seed S] [--out DIR]
    randnet solve CONFIG [--paths M] [--tol TOL] [--max-iter K] [--out DIR]
    randnet chaos CONFIG [--n-list 32,64,...] [--replicates R] [--quenched] [--out DIR]
    randnet identities CONFIG [--covariance FILE.npy] [--out DIR]
    randnet rate CONFIG [--run SOLVE_DIR] [--out DIR]

Exit codes: 0 success, 1 usage/configuration or failed identity check,
2 horizon condition refused, 3 numerical degeneracy or divergence,
4 fixed point not reached.
"""
import argparse
import logging
import os
import sys

import numpy as np
from scipy import integrate

from . import io, rng
from .config import load_config
from .errors import InadmissibleHorizon, NumericalDegeneracy, SimulationDiverged
from .meanfield import picard_iterate, solve_fixed_point
from .measures import chaos_diagnostics
from .model import TimeGrid, check_time_horizon, sample_disorder
from .network import averaged_sweep, quenched_sweep, simulate_network, simulate_uncoupled
from .rate import entropy_girsanov, gamma_estimate, h_at_fixed_point
from .tilt import (TiltedState, covariance_row, gaussian_quadratic_moment,
                   ktilde_trace_identity, tilted_covariance)

log = logging.getLogger("randnet")

EXIT_OK, EXIT_FAIL, EXIT_REFUSED, EXIT_DEGENERATE, EXIT_NOT_CONVERGED = 0, 1, 2, 3, 4
THREADS_ENV = "RANDNET_THREADS"

IDENTITY_TOL = 1e-10
MOMENT_TOL = 1e-8


def _prepare(args, command):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.run.seed = args.seed
    if getattr(args, "force", False):
        cfg.run.force = True
    out = args.out or os.path.join("out", command)
    os.makedirs(out, exist_ok=True)
    return cfg, out


def _gate(cfg):
    report = check_time_horizon(cfg.params, cfg.kernel)
    if not report.admissible:
        if not cfg.run.force:
            raise InadmissibleHorizon(
                f"horizon condition value {report.value:.6g} >= 1; use --force to override")
        log.warning("horizon condition value %.6g >= 1; results carry no guarantee",
                    report.value)
    return report


def cmd_check(args):
    cfg = load_config(args.config)
    report = check_time_horizon(cfg.params, cfg.kernel)
    print(f'{{"value": {report.value!r}, "admissible": {str(report.admissible).lower()}}}')
    if report.admissible:
        return EXIT_OK
    if args.force:
        print(f"warning: horizon condition value {report.value:.6g} >= 1 (forced)",
              file=sys.stderr)
        return EXIT_OK
    return EXIT_REFUSED


def cmd_simulate(args):
    cfg, out = _prepare(args, "simulate")
    n = _flag(args, "n", cfg.run.n)
    grid = TimeGrid.from_params(cfg.params)
    dseed = rng.derive_seed(cfg.run.seed, 0, n)
    nseed = rng.derive_seed(cfg.run.seed, 1, n, 0)
    disorder = sample_disorder(n, cfg.params, dseed)
    run = simulate_network(cfg.params, cfg.kernel, cfg.drift, disorder, grid, nseed)
    io.write_ensemble_csv(os.path.join(out, "network.csv"), run.ensemble, grid)
    io.write_json(os.path.join(out, "run.json"), {
        "config": cfg.to_dict(), "n": n,
        "seeds": {"master": cfg.run.seed, "disorder": dseed, "noise": nseed},
        "grid": {"horizon": grid.horizon, "n_steps": grid.n_steps, "dt": grid.dt}})
    io.write_manifest(out, io.RunManifest(cfg.digest(), "simulate", [cfg.run.seed, dseed, nseed],
                                          outputs=["network.csv", "run.json"]))
    return EXIT_OK


def _flag(args, name, default):
    value = getattr(args, name, None)
    return default if value is None else value


def _solve(cfg, args):
    _gate(cfg)
    grid = TimeGrid.from_params(cfg.params)
    return solve_fixed_point(cfg.params, cfg.kernel, cfg.drift, grid,
                             m_paths=_flag(args, "paths", cfg.run.paths),
                             max_iter=_flag(args, "max_iter", cfg.run.max_iter),
                             tol=_flag(args, "tol", cfg.run.tol),
                             seed=cfg.run.seed, force=cfg.run.force, threads=args.threads)


def cmd_solve(args):
    cfg, out = _prepare(args, "solve")
    report = _solve(cfg, args)
    grid = TimeGrid.from_params(cfg.params)
    outputs = ["report.json", "q.csv"]
    io.write_json(os.path.join(out, "report.json"), report.summary())
    io.write_ensemble_csv(os.path.join(out, "q.csv"), report.final_ensemble, grid)
    outputs += io.save_ensemble(out, "q", report.final_ensemble)
    outputs += io.save_ensemble(out, "driver", report.driving_ensemble)
    io.write_json(os.path.join(out, "solve_meta.json"), {"config": cfg.to_dict()})
    outputs.append("solve_meta.json")
    io.write_manifest(out, io.RunManifest(cfg.digest(), "solve", [cfg.run.seed], outputs=outputs))
    if not report.converged:
        log.error("no convergence after %d iterations (last gap %.3e)",
                  report.iterations, report.gaps[-1])
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_chaos(args):
    cfg, out = _prepare(args, "chaos")
    n_list = [int(v) for v in args.n_list.split(",")] if args.n_list else cfg.run.n_list
    replicates = _flag(args, "replicates", cfg.run.replicates)
    report = _solve(cfg, args)
    grid = TimeGrid.from_params(cfg.params)
    size = 2 * min(max(n_list), 256)
    q_seed = rng.derive_seed(cfg.run.seed, 10)
    Q = picard_iterate(report.final_ensemble, size, cfg.params, cfg.kernel, cfg.drift,
                       grid, q_seed, args.threads)
    sweep = quenched_sweep if args.quenched else averaged_sweep
    sweep_seed = rng.derive_seed(cfg.run.seed, 11)
    runs = sweep(cfg.params, cfg.kernel, cfg.drift, n_list, sweep_seed, replicates, args.threads)
    rows = chaos_diagnostics(runs, Q, seed=rng.derive_seed(cfg.run.seed, 12) & 0xFFFFFFFF)
    cols = ["N", "distance", "baseline", "cross_cov", "se", "distance_se", "replicates"]
    io.write_rows_csv(os.path.join(out, "chaos.csv"), rows, cols)
    io.write_json(os.path.join(out, "chaos.json"), {
        "mode": "quenched" if args.quenched else "averaged", "rows": rows,
        "fixed_point": report.summary(), "seeds": [cfg.run.seed, q_seed, sweep_seed]})
    io.write_manifest(out, io.RunManifest(cfg.digest(), "chaos", [cfg.run.seed, q_seed, sweep_seed],
                                          outputs=["chaos.csv", "chaos.json"]))
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _matrix_checks(K, dt, bound=None):
    state = TiltedState.from_matrix(K, dt)
    Kp = state.prefix()
    Kt = tilted_covariance(state)
    Kt_sym = 0.5 * (Kt + Kt.T)
    diff = Kp - Kt_sym
    min_eig = float(np.min(np.linalg.eigvalsh(diff))) if np.any(diff) else 0.0
    dk, dkt = np.diag(Kp), np.diag(Kt)
    checks = {
        "trace_identity": ktilde_trace_identity(state),
        "loewner_violation": max(0.0, -min_eig),
        "diag_violation": float(max(0.0, np.max(-dkt), np.max(dkt - dk))),
        "symmetry": float(np.max(np.abs(Kt - Kt.T))) if Kt.size else 0.0,
    }
    if bound is not None:
        checks["bound_violation"] = float(max(0.0, np.max(np.abs(Kp)) - bound))
    return checks


def _moment_residual(alpha, beta):
    closed = gaussian_quadratic_moment(alpha, beta)
    if beta == 0:
        direct = np.exp(alpha ** 2 / 2)
    else:
        dens = lambda z: np.exp(z * z / 2 - (z - alpha) ** 2 / (2 * beta)) / np.sqrt(2 * np.pi * beta)
        direct, _ = integrate.quad(dens, -np.inf, np.inf, epsabs=0, epsrel=1e-12, limit=200)
    return float(abs(closed - direct) / closed)


def cmd_identities(args):
    cfg, out = _prepare(args, "identities")
    p, kernel = cfg.params, cfg.kernel
    p.require_noise()
    grid = TimeGrid.from_params(p)
    dt = grid.dt
    scale = p.sigma ** 2 / p.lam ** 2
    bound = scale * kernel.sup_bound ** 2
    results = {}
    # model covariance seen by one path of the uncoupled ensemble
    mu = simulate_uncoupled(p, cfg.drift, min(cfg.run.paths, 64), grid, cfg.run.seed)
    x = mu.states[0]
    K = np.zeros((grid.n_steps + 1, grid.n_steps + 1))
    for t in range(grid.n_steps + 1):
        row = covariance_row(x, t, mu, p, kernel)
        K[t, :t + 1] = row
        K[:t + 1, t] = row
    results["model"] = _matrix_checks(K, dt, bound)
    g = rng.stream(cfg.run.seed, 99)
    for i in range(5):
        n = int(g.integers(2, 33))
        A = g.uniform(-1, 1, (n, int(g.integers(1, n + 1))))
        G = A @ A.T
        G = bound * G / np.max(np.abs(G))
        results[f"gram_{i}"] = _matrix_checks(G, dt, bound)
    if args.covariance:
        C = np.load(args.covariance)
        results["supplied"] = _matrix_checks(C, dt)
    alpha = p.horizon * abs(p.j_bar) * kernel.sup_bound / p.lam
    beta = p.horizon * bound
    moments = {f"{a!r},{b!r}": _moment_residual(a, b)
               for a, b in [(alpha, beta), (0.0, beta), (alpha, beta / 2)]}
    results["quadratic_moment"] = moments
    ok = all(v <= IDENTITY_TOL for name, chk in results.items() if name != "quadratic_moment"
             for v in chk.values()) and all(v <= MOMENT_TOL for v in moments.values())
    io.write_json(os.path.join(out, "identities.json"), {"passed": ok, "results": results})
    io.write_manifest(out, io.RunManifest(cfg.digest(), "identities", [cfg.run.seed],
                                          outputs=["identities.json"]))
    print(f"identities: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


class _LoadedReport:
    def __init__(self, final_ensemble):
        self.final_ensemble = final_ensemble


def cmd_rate(args):
    cfg, out = _prepare(args, "rate")
    if args.run:
        Q = io.load_ensemble(args.run, "q")
        report, converged = _LoadedReport(Q), True
        m_paths = Q.m_paths
        iter_info = None
    else:
        full = _solve(cfg, args)
        report, converged, m_paths = full, full.converged, full.m_paths
        iter_info = full.summary()
    Q = report.final_ensemble
    g, g_se = gamma_estimate(Q, Q, cfg.params, cfg.kernel)
    e, e_se = entropy_girsanov(report, cfg.params)
    h, h_se = h_at_fixed_point(report, cfg.params, cfg.kernel)
    meta = {"m_paths": m_paths, "n_steps": cfg.params.n_steps, "seeds": [cfg.run.seed]}
    io.write_json(os.path.join(out, "rate.json"), {
        "gamma": {"value": g, "se": g_se, **meta},
        "entropy": {"value": e, "se": e_se, **meta},
        "h_at_fixed_point": {"value": h, "se": h_se, **meta},
        "fixed_point": iter_info})
    io.write_manifest(out, io.RunManifest(cfg.digest(), "rate", [cfg.run.seed],
                                          outputs=["rate.json"]))
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def build_parser():
    parser = argparse.ArgumentParser(prog="randnet", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, force=True):
        p.add_argument("config")
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--threads", type=int, default=int(os.environ.get(THREADS_ENV, "1")))
        if force:
            p.add_argument("--force", action="store_true",
                           help="run even if the horizon condition fails")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("check", help="report the horizon admissibility condition")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="simulate one network")
    common(p, force=False)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("solve", help="solve the mean-field fixed point")
    common(p)
    p.add_argument("--paths", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("chaos", help="propagation-of-chaos diagnostics")
    common(p)
    p.add_argument("--n-list")
    p.add_argument("--replicates", type=int)
    p.add_argument("--quenched", action="store_true")
    p.add_argument("--paths", type=int)
    p.set_defaults(func=cmd_chaos)

    p = sub.add_parser("identities", help="check the tilting identities")
    common(p, force=False)
    p.add_argument("--covariance", help="extra covariance matrix (.npy) to check")
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("rate", help="Gamma, entropy and H at the fixed point")
    common(p)
    p.add_argument("--run", help="output directory of a previous `solve`")
    p.set_defaults(func=cmd_rate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InadmissibleHorizon as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (NumericalDegeneracy, SimulationDiverged) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
