"""Independent reference computations used by the tests.

Nothing here calls into the incremental factorization or the solver; every
oracle works from definitions (Monte Carlo, enumeration, dense algebra or a
separately written integrator).
"""
import itertools

import numpy as np
from scipy.special import gammaln


def gaussian_samples(rng, K, size):
    w, V = np.linalg.eigh(K)
    root = V * np.sqrt(np.clip(w, 0, None))
    return rng.standard_normal((size, K.shape[0])) @ root.T


def mc_tilted(K, dt, n_tilted, functional, n_samples=10 ** 7, seed=0, chunk=10 ** 6):
    """E[Lambda f(G)] / E[Lambda] with Lambda = exp(-dt/2 sum_{j<n_tilted} G_j^2).

    ``functional`` maps samples (n, d) to (n,) or (n, k).  Returns the ratio
    estimate and its delta-method standard error, componentwise.
    """
    rng = np.random.default_rng(seed)
    sw = sww = 0.0
    sf = sff = sfw = 0.0
    for start in range(0, n_samples, chunk):
        G = gaussian_samples(rng, K, min(chunk, n_samples - start))
        w = np.exp(-0.5 * dt * np.sum(G[:, :n_tilted] ** 2, axis=1))
        F = np.asarray(functional(G))
        wb = w.reshape((-1,) + (1,) * (F.ndim - 1))
        f = wb * F
        sw += w.sum(); sww += (w * w).sum()
        sf = sf + f.sum(axis=0); sff = sff + (f * f).sum(axis=0)
        sfw = sfw + (f * wb).sum(axis=0)
    r = sf / sw
    var = (sff - 2 * r * sfw + r * r * sww) / n_samples
    return r, np.sqrt(var / n_samples) / (sw / n_samples)


def mc_quadratic_moment(alpha, beta, n_samples=10 ** 7, seed=0, chunk=10 ** 6):
    """E[exp(zeta^2/2)], zeta ~ N(alpha, beta), by importance sampling.

    Proposal: Student-t with 3 degrees of freedom, whose tails dominate the
    integrand for every beta < 1 so the weights have finite variance.
    """
    if beta == 0:
        raise ValueError("beta = 0 has no density")
    rng = np.random.default_rng(seed)
    tilt = beta / (1 - beta)
    loc = alpha * (1 + tilt)
    scale = np.sqrt(tilt) + 0.3
    df = 3.0
    log_c = (gammaln((df + 1) / 2) - gammaln(df / 2) - 0.5 * np.log(df * np.pi)
             - np.log(scale))
    s = ss = 0.0
    for start in range(0, n_samples, chunk):
        t = rng.standard_t(df, size=min(chunk, n_samples - start))
        z = loc + scale * t
        log_prop = log_c - (df + 1) / 2 * np.log1p(t * t / df)
        log_target = (z * z / 2 - (z - alpha) ** 2 / (2 * beta)
                      - 0.5 * np.log(2 * np.pi * beta))
        w = np.exp(log_target - log_prop)
        s += w.sum(); ss += (w * w).sum()
    mean = s / n_samples
    return mean, np.sqrt((ss / n_samples - mean ** 2) / n_samples)


def mc_log_density(K, m, dW, dt, n_samples=10 ** 7, seed=0, chunk=10 ** 6):
    """log E[exp{sum (G+m) dW - 1/2 sum (G+m)^2 dt}] with its delta-method SE."""
    rng = np.random.default_rng(seed)
    s = ss = 0.0
    for start in range(0, n_samples, chunk):
        G = gaussian_samples(rng, K, min(chunk, n_samples - start)) + m
        y = np.exp(G @ dW - 0.5 * dt * np.sum(G * G, axis=1))
        s += y.sum(); ss += (y * y).sum()
    mean = s / n_samples
    se = np.sqrt((ss / n_samples - mean ** 2) / n_samples)
    return np.log(mean), se / mean


def dense_tilt(K, dt):
    """K (I + D K)^{-1} with D = dt on all but the last index, and -1/2 logdet."""
    n = K.shape[0]
    D = np.diag(np.r_[np.full(n - 1, dt), 0.0])
    Kt = K @ np.linalg.inv(np.eye(n) + D @ K)
    A = K[:n - 1, :n - 1]
    _, logdet = np.linalg.slogdet(np.eye(n - 1) + dt * A)
    return Kt, -0.5 * logdet


def brute_force_w2(cost):
    """min over all bijections of the mean cost, by enumeration."""
    n = cost.shape[0]
    best = min(sum(cost[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))
    return np.sqrt(best / n)


def plain_mckean_vlasov(x0, dW, j_bar, lam, dt, n_iter, interaction, intrinsic):
    """Picard iteration for dx = (f(x) + j_bar mean_y S(y)) dt + lam dW, b(x,y) = S(y)."""
    n = dW.shape[1]
    paths = np.empty((len(x0), n + 1))
    paths[:, 0] = x0
    for k in range(n):
        x = paths[:, k]
        paths[:, k + 1] = x + intrinsic(x) * dt + lam * dW[:, k]
    for _ in range(n_iter):
        new = np.empty_like(paths)
        new[:, 0] = x0
        for k in range(n):
            x = new[:, k]
            field = j_bar * np.mean(interaction(paths[:, k]))
            new[:, k + 1] = x + (intrinsic(x) + field) * dt + lam * dW[:, k]
        paths = new
    return paths
