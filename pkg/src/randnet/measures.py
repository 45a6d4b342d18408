"""Path-space transport distances, order parameters and chaos diagnostics."""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import logsumexp

EXACT_MAX = 512


@dataclass(frozen=True)
class TransportPlanResult:
    distance: float
    method: str
    plan_cost: float
    epsilon: float


def path_distance(x, r, y, s, t_index=None):
    """sqrt(max_{k <= t_index} |x_k - y_k|^2 + |r - s|^2)."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    if x.shape != y.shape:
        raise ValueError("paths are on different grids")
    t_index = x.shape[-1] - 1 if t_index is None else t_index
    sup = np.max((x[:t_index + 1] - y[:t_index + 1]) ** 2)
    return float(np.sqrt(sup + np.sum((np.asarray(r, float) - np.asarray(s, float)) ** 2)))


def cost_matrix(A, B, t_index=None):
    """Squared path distances between every member of A and of B."""
    if A.n_steps != B.n_steps:
        raise ValueError("ensembles are on different grids")
    t = A.n_steps if t_index is None else t_index
    xa, xb = A.states[:, :t + 1], B.states[:, :t + 1]
    sup = np.zeros((A.m_paths, B.m_paths))
    for k in range(t + 1):
        np.maximum(sup, (xa[:, k, None] - xb[None, :, k]) ** 2, out=sup)
    if A.positions.shape[1]:
        diff = A.positions[:, None, :] - B.positions[None, :, :]
        sup = sup + np.sum(diff ** 2, axis=-1)
    return sup


def sinkhorn(cost, epsilon, max_iter=500):
    """Entropic plan between uniform marginals, rounded to be exactly feasible."""
    na, nb = cost.shape
    loga, logb = np.full(na, -np.log(na)), np.full(nb, -np.log(nb))
    f, g = np.zeros(na), np.zeros(nb)
    for _ in range(max_iter):
        f = epsilon * (loga - logsumexp((g[None, :] - cost) / epsilon, axis=1))
        g = epsilon * (logb - logsumexp((f[:, None] - cost) / epsilon, axis=0))
    plan = np.exp((f[:, None] + g[None, :] - cost) / epsilon)
    # Altschuler-Weed-Rigollet rounding onto the transport polytope
    a, b = np.exp(loga), np.exp(logb)
    plan *= np.minimum(a / plan.sum(axis=1), 1.0)[:, None]
    plan *= np.minimum(b / plan.sum(axis=0), 1.0)[None, :]
    err_a, err_b = a - plan.sum(axis=1), b - plan.sum(axis=0)
    if err_a.sum() > 0:
        plan += np.outer(err_a, err_b) / err_a.sum()
    return plan


def vaserstein2(A, B, t_index=None, method="exact", epsilon=None, max_iter=500):
    cost = cost_matrix(A, B, t_index)
    if method == "exact":
        if A.m_paths != B.m_paths:
            raise ValueError("exact transport needs equal ensemble sizes")
        if A.m_paths > EXACT_MAX:
            raise ValueError(f"exact transport limited to {EXACT_MAX} paths")
        rows, cols = linear_sum_assignment(cost)
        total = float(np.mean(cost[rows, cols]))
        return TransportPlanResult(float(np.sqrt(max(total, 0.0))), "exact", total, 0.0)
    if method == "entropic":
        if epsilon is None:
            med = float(np.median(cost))
            epsilon = 0.01 * med if med > 0 else 1e-12
        plan = sinkhorn(cost, epsilon, max_iter)
        total = float(np.sum(plan * cost))
        return TransportPlanResult(float(np.sqrt(max(total, 0.0))), "entropic", total,
                                   float(epsilon))
    raise ValueError(f"unknown method {method!r}")


def order_parameter(ensemble, t_index):
    return float(np.abs(np.mean(np.exp(1j * ensemble.states[:, t_index]))))


def _pair_covariance(values, center, pairs):
    i, j = pairs
    return float(np.mean((values[i] - center) * (values[j] - center)))


def chaos_diagnostics(runs, Q, observable=np.cos, t_index=None, n_pairs=1000,
                      max_size=256, seed=0):
    """Propagation-of-chaos table, one row per network size.

    Runs sharing the same N are treated as replicates.  ``Q`` must hold at
    least ``2 * min(N, max_size)`` paths: the first block is compared with
    the network, the second provides the same-law baseline.  The
    cross-particle covariance of ``observable(x_T)`` is centred at its
    Q-mean, so it tends to zero exactly when particles decorrelate and their
    marginal converges to Q.
    """
    rng = np.random.default_rng(seed)
    t = Q.n_steps if t_index is None else t_index
    center = float(np.mean(observable(Q.states[:, t])))
    by_n = {}
    for run in runs:
        by_n.setdefault(run.disorder.n, []).append(run)
    rows = []
    for n in sorted(by_n):
        reps = by_n[n]
        size = min(n, max_size)
        if Q.m_paths < 2 * size:
            raise ValueError(f"Q needs at least {2 * size} paths for N={n}")
        q_a, q_b = Q.subset(np.arange(size)), Q.subset(np.arange(size, 2 * size))
        baseline = vaserstein2(q_a, q_b, t).distance
        dists, covs = [], []
        for run in reps:
            idx = np.sort(rng.choice(n, size, replace=False))
            dists.append(vaserstein2(run.ensemble.subset(idx), q_a, t).distance)
            if n >= 2:
                i = rng.integers(0, n, n_pairs)
                j = (i + rng.integers(1, n, n_pairs)) % n
                vals = observable(run.ensemble.states[:, t])
                covs.append(_pair_covariance(vals, center, (i, j)))
        r = len(reps)
        rows.append({
            "N": n,
            "replicates": r,
            "distance": float(np.mean(dists)),
            "distance_se": float(np.std(dists, ddof=1) / np.sqrt(r)) if r > 1 else float("nan"),
            "baseline": baseline,
            "cross_cov": float(np.mean(covs)) if covs else float("nan"),
            "se": float(np.std(covs, ddof=1) / np.sqrt(len(covs))) if len(covs) > 1 else float("nan"),
        })
    return rows
