"""Self-consistent limit: non-Markovian SDE with tilted Gaussian drift and Picard solver.

A tagged path solves

    dx = ( f(r, t, x) + lam * O_mu(t, x) ) dt + lam dW~,
    O_mu(t_k, x) = m_k + sum_{j<k} K~^{(k)}(t_k, t_j) (dW_j - m_j dt),

where dW_j = dW~_j + O_j dt are the increments of the reference Brownian
motion of the path, so that the law of x has density
exp{sum O dW - 1/2 sum O^2 dt} with respect to the uncoupled law.  The limit
law is the fixed point of mu -> law(x^mu), iterated on an ensemble of M paths
with common random numbers.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .errors import InadmissibleHorizon, SimulationDiverged
from .measures import vaserstein2
from .model import (AdmissibilityReport, PathEnsemble, check_time_horizon,
                    sample_initial, sample_noise)
from .network import simulate_uncoupled
from .tilt import TiltedState, extend_tilt, tilt_and_shift

log = logging.getLogger(__name__)

CHUNK = 32


@dataclass
class FixedPointReport:
    iterations: int
    gaps: List[float]
    converged: bool
    admissibility: AdmissibilityReport
    final_ensemble: PathEnsemble
    driving_ensemble: PathEnsemble
    m_paths: int
    n_steps: int
    seed: int
    tol: float
    history: List[PathEnsemble] = field(default_factory=list, repr=False)

    def summary(self):
        return {
            "iterations": self.iterations,
            "gaps": [float(g) for g in self.gaps],
            "converged": self.converged,
            "admissibility": {"value": self.admissibility.value,
                              "admissible": self.admissibility.admissible},
            "m_paths": self.m_paths,
            "n_steps": self.n_steps,
            "seed": self.seed,
            "tol": self.tol,
        }


def _gate(params, kernel, force):
    report = check_time_horizon(params, kernel)
    if not report.admissible:
        if not force:
            raise InadmissibleHorizon(
                f"2 sigma^2 |b|^2 T / lambda^2 = {report.value:.4g} >= 1")
        log.warning("horizon condition violated (value %.4g); continuing", report.value)
    return report


def _integrate_chunk(mu, x0, positions, dW, params, kernel, drift, grid):
    n_paths = x0.shape[0]
    n, dt, lam = grid.n_steps, grid.dt, params.lam
    Y = mu.states
    c_mean = params.j_bar / lam
    c_cov = params.sigma ** 2 / lam ** 2
    tilted = params.sigma > 0

    states = np.empty((n_paths, n + 1))
    states[:, 0] = x0
    record = np.empty((n_paths, n))
    ref = np.empty((n_paths, n))
    u = np.empty((n_paths, n))
    if tilted:
        tilt = TiltedState(n + 1, dt, (n_paths,))
        b_hist = np.empty((n_paths, n + 1, mu.m_paths))

    for k in range(n):
        x = states[:, k]
        b = kernel(x[:, None], Y[None, :, k])
        m_k = c_mean * np.mean(b, axis=-1)
        if tilted:
            b_hist[:, k] = b
            row = c_cov * np.mean(b_hist[:, :k + 1] * b[:, None, :], axis=-1)
            extend_tilt(tilt, row)
            corr, _ = tilt_and_shift(tilt, u[:, :k])
            o = m_k + corr
        else:
            o = m_k
        new = x + (drift(positions, k * dt, x) + lam * o) * dt + lam * dW[:, k]
        bad = ~np.isfinite(new)
        if bad.any():
            raise SimulationDiverged(int(np.flatnonzero(bad)[0]), k + 1)
        states[:, k + 1] = new
        record[:, k] = o
        ref[:, k] = dW[:, k] + o * dt
        u[:, k] = ref[:, k] - m_k * dt
    return states, record, ref


def simulate_meanfield(mu, x0, positions, dW, params, kernel, drift, grid, threads=1):
    """Integrate paths driven by the frozen ensemble ``mu`` from explicit noise.

    Returns ``(states, drift_record, ref_increments)``.  Paths are processed in
    fixed chunks so output does not depend on ``threads``.
    """
    params.require_noise()
    if mu.m_paths == 0:
        raise ValueError("empty ensemble")
    bounds = [(s, min(s + CHUNK, len(x0))) for s in range(0, len(x0), CHUNK)]

    def run(bound):
        s, e = bound
        return _integrate_chunk(mu, x0[s:e], positions[s:e], dW[s:e],
                                params, kernel, drift, grid)

    if threads <= 1:
        parts = [run(b) for b in bounds]
    else:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run, bounds))
    return tuple(np.concatenate(p) for p in zip(*parts))


def simulate_meanfield_path(mu, params, kernel, drift, grid, path_seed, force=False):
    """One path of the limit SDE driven by ``mu``; returns (path, dW)."""
    _gate(params, kernel, force)
    x0, positions = sample_initial(params, 1, path_seed)
    dW = sample_noise(1, grid.n_steps, grid.dt, path_seed)
    states, _, _ = simulate_meanfield(mu, x0, positions, dW, params, kernel, drift, grid)
    return states[0], dW[0]


def picard_iterate(mu_n, m_paths, params, kernel, drift, grid, iter_seed, threads=1):
    """One Picard step: M fresh paths of the SDE driven by ``mu_n``.

    Initial data and noise come from ``iter_seed`` only, so repeated calls
    share random numbers.
    """
    x0, positions = sample_initial(params, m_paths, iter_seed)
    dW = sample_noise(m_paths, grid.n_steps, grid.dt, iter_seed)
    states, record, ref = simulate_meanfield(mu_n, x0, positions, dW, params,
                                             kernel, drift, grid, threads)
    return PathEnsemble(states, positions, dW, int(iter_seed),
                        ref_increments=ref, drift_record=record)


def solve_fixed_point(params, kernel, drift, grid, m_paths=256, max_iter=10, tol=1e-2,
                      seed=0, force=False, threads=1, keep_history=False):
    """Picard iteration from the uncoupled law until the Vaserstein gap < tol."""
    admissibility = _gate(params, kernel, force)
    params.require_noise()
    mu = simulate_uncoupled(params, drift, m_paths, grid, seed)
    gaps, history = [], []
    converged = False
    driving = mu
    for it in range(1, max_iter + 1):
        nxt = picard_iterate(mu, m_paths, params, kernel, drift, grid, seed, threads)
        gap = vaserstein2(mu, nxt).distance
        gaps.append(gap)
        log.info("picard iteration %d: gap %.4e", it, gap)
        if keep_history:
            history.append(nxt)
        driving, mu = mu, nxt
        if gap < tol:
            converged = True
            break
    return FixedPointReport(len(gaps), gaps, converged, admissibility, mu, driving,
                            m_paths, grid.n_steps, int(seed), float(tol), history)
