"""Euler-Maruyama simulation of the finite-N disordered network."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import SimulationDiverged
from .model import (DisorderMatrix, ModelParams, PathEnsemble, TimeGrid,
                    sample_disorder, sample_initial, sample_noise)


@dataclass
class NetworkRun:
    ensemble: PathEnsemble
    disorder: DisorderMatrix
    params: ModelParams
    grid: TimeGrid

    def __post_init__(self):
        if self.ensemble.m_paths != self.disorder.n:
            raise ValueError("ensemble size and disorder size differ")


def interaction_field(x, coupling, kernel):
    """sum_j J_ij b(x_i, x_j) for every i.

    Each row is summed in sorted order so the result is exactly equivariant
    under relabelling of particles.
    """
    terms = coupling * kernel(x[:, None], x[None, :])
    return np.sort(terms, axis=1).sum(axis=1)


def integrate_network(states0, positions, increments, coupling, params, kernel, drift, grid):
    """Integrate the network from explicit initial data and noise.

    Returns ``(states, ref_increments)``; ``ref_increments`` is None when
    lambda = 0.
    """
    n, n_steps = increments.shape
    dt = grid.dt
    states = np.empty((n, n_steps + 1))
    states[:, 0] = states0
    ref = None if params.lam == 0 else np.empty((n, n_steps))
    for k in range(n_steps):
        x = states[:, k]
        inter = interaction_field(x, coupling, kernel)
        new = x + (drift(positions, k * dt, x) + inter) * dt + params.lam * increments[:, k]
        bad = ~np.isfinite(new)
        if bad.any():
            raise SimulationDiverged(int(np.flatnonzero(bad)[0]), k + 1)
        states[:, k + 1] = new
        if ref is not None:
            ref[:, k] = increments[:, k] + inter * dt / params.lam
    return states, ref


def simulate_network(params, kernel, drift, disorder, grid, rng_seed):
    n = disorder.n
    states0, positions = sample_initial(params, n, rng_seed)
    dW = sample_noise(n, grid.n_steps, grid.dt, rng_seed)
    states, ref = integrate_network(states0, positions, dW, disorder.entries,
                                    params, kernel, drift, grid)
    ens = PathEnsemble(states, positions, dW, int(rng_seed), ref_increments=ref)
    return NetworkRun(ens, disorder, params, grid)


def simulate_uncoupled(params, drift, m_paths, grid, rng_seed):
    """M independent copies of dX = f dt + lam dW (the reference law P)."""
    states0, positions = sample_initial(params, m_paths, rng_seed)
    dW = sample_noise(m_paths, grid.n_steps, grid.dt, rng_seed)
    states = np.empty((m_paths, grid.n_steps + 1))
    states[:, 0] = states0
    for k in range(grid.n_steps):
        x = states[:, k]
        states[:, k + 1] = x + drift(positions, k * grid.dt, x) * grid.dt + params.lam * dW[:, k]
    ref = None if params.lam == 0 else dW.copy()
    return PathEnsemble(states, positions, dW, int(rng_seed), ref_increments=ref)


def sweep_seeds(master_seed, n, replicate):
    """(disorder_seed, noise_seed) for network size n and replicate index."""
    return rng.derive_seed(master_seed, 0, n), rng.derive_seed(master_seed, 1, n, replicate)


def averaged_sweep(params, kernel, drift, n_list, master_seed, replicates=1, threads=1):
    """Runs with a fresh disorder draw for every replicate (averaged regime)."""
    jobs = []
    for n in n_list:
        for rep in range(replicates):
            dseed = rng.derive_seed(master_seed, 2, n, rep)
            nseed = rng.derive_seed(master_seed, 1, n, rep)
            jobs.append((n, dseed, nseed))
    return _run_jobs(params, kernel, drift, jobs, threads)


def quenched_sweep(params, kernel, drift, n_list, master_seed, replicates=1, threads=1):
    """One fixed disorder realization per N; replicates share it and differ in noise."""
    if list(n_list) != sorted(n_list):
        raise ValueError("n_list must be increasing")
    jobs = []
    for n in n_list:
        for rep in range(replicates):
            dseed, nseed = sweep_seeds(master_seed, n, rep)
            jobs.append((n, dseed, nseed))
    return _run_jobs(params, kernel, drift, jobs, threads)


def _run_jobs(params, kernel, drift, jobs, threads):
    grid = TimeGrid.from_params(params)

    def one(job):
        n, dseed, nseed = job
        disorder = sample_disorder(n, params, dseed)
        return simulate_network(params, kernel, drift, disorder, grid, nseed)

    if threads <= 1:
        return [one(j) for j in jobs]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(one, jobs))


def empirical_measure(run):
    return run.ensemble
