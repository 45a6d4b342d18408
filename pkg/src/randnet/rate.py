"""Closed-form path log-densities, Gamma estimates and the rate function at its minimum.

For a path x with reference increments dW (increments of the Brownian motion
of the uncoupled law), the density of Q_nu with respect to that law is the
Gaussian integral

    E_gamma[ exp{ sum_j (G_j + m_j) dW_j - 1/2 sum_j (G_j + m_j)^2 dt } ],

G ~ N(0, K) on indices 0..n-1.  With u = dW - m dt and C = I + dt K,

    log density = sum m dW - 1/2 sum m^2 dt  -  1/2 log det C + 1/2 u' K C^{-1} u.
"""
from dataclasses import dataclass

import numpy as np

CHUNK = 64


@dataclass(frozen=True)
class DensityEvaluation:
    log_density: float
    deterministic_part: float
    gaussian_part: float


def _density_parts(paths, increments, nu, params, kernel, dt):
    params.require_noise()
    paths = np.atleast_2d(paths)
    increments = np.atleast_2d(increments)
    n = increments.shape[-1]
    Y = nu.states[:, :n].T
    det_parts, gauss_parts = [], []
    for s in range(0, paths.shape[0], CHUNK):
        x, dw = paths[s:s + CHUNK, :n], increments[s:s + CHUNK]
        b = kernel(x[:, :, None], Y[None, :, :])
        m = params.j_bar / params.lam * np.mean(b, axis=-1)
        det_parts.append(np.sum(m * dw, axis=-1) - 0.5 * dt * np.sum(m * m, axis=-1))
        if params.sigma == 0:
            gauss_parts.append(np.zeros(x.shape[0]))
            continue
        K = params.sigma ** 2 / params.lam ** 2 * (b @ b.transpose(0, 2, 1)) / b.shape[-1]
        C = np.eye(n) + dt * K
        L = np.linalg.cholesky(C)
        logdet = 2.0 * np.sum(np.log(np.diagonal(L, axis1=-2, axis2=-1)), axis=-1)
        u = dw - m * dt
        s_ = np.linalg.solve(C, u[..., None])
        quad = np.sum(u * (K @ s_)[..., 0], axis=-1)
        gauss_parts.append(-0.5 * logdet + 0.5 * quad)
    return np.concatenate(det_parts), np.concatenate(gauss_parts)


def path_log_densities(paths, increments, nu, params, kernel, dt):
    """Vector of log dQ_nu/dP over many paths."""
    det, gauss = _density_parts(paths, increments, nu, params, kernel, dt)
    return det + gauss


def log_density(x, dW, nu, params, kernel):
    dt = params.horizon / params.n_steps
    det, gauss = _density_parts(np.asarray(x, float)[None], np.asarray(dW, float)[None],
                                nu, params, kernel, dt)
    return DensityEvaluation(float(det[0] + gauss[0]), float(det[0]), float(gauss[0]))


def _mean_se(values):
    values = np.asarray(values, float)
    se = np.std(values, ddof=1) / np.sqrt(len(values)) if len(values) > 1 else 0.0
    return float(np.mean(values)), float(se)


def _ref(ensemble):
    if ensemble.ref_increments is None:
        raise ValueError("ensemble carries no reference increments")
    return ensemble.ref_increments


def gamma_estimate(mu, nu, params, kernel):
    """Gamma_nu(mu) as the mu-average of log dQ_nu/dP, with its standard error."""
    dt = params.horizon / params.n_steps
    return _mean_se(path_log_densities(mu.states, _ref(mu), nu, params, kernel, dt))


def _girsanov_terms(report, params):
    record = report.final_ensemble.drift_record
    if record is None:
        raise ValueError("fixed-point report has no drift record")
    dt = params.horizon / params.n_steps
    return 0.5 * dt * np.sum(record * record, axis=-1)


def entropy_girsanov(report, params):
    """I(Q|P) = E_Q[1/2 sum O_k^2 dt] for the solver's own drift."""
    return _mean_se(_girsanov_terms(report, params))


def finite_n_log_rn(run, params, kernel):
    """log dQ^N/dP^N on the run: sum_i log dQ_{mu_N}/dP(x^i) with mu_N the run itself."""
    ens = run.ensemble
    vals = path_log_densities(ens.states, _ref(ens), ens, params, kernel, run.grid.dt)
    return float(np.sum(np.sort(vals)))


def h_at_fixed_point(report, params, kernel):
    """H(Q) = I(Q|P) - Gamma(Q) on the converged ensemble.

    Both terms are evaluated on the same paths, so the standard error is
    that of the per-path difference.
    """
    Q = report.final_ensemble
    dt = params.horizon / params.n_steps
    ent = _girsanov_terms(report, params)
    dens = path_log_densities(Q.states, _ref(Q), Q, params, kernel, dt)
    return _mean_se(ent - dens)
