"""Gaussian tilting on a uniform time grid.

For a path x and a measure mu (an ensemble of paths Y^m) the interaction seen
by x is a Gaussian process with mean and covariance

    m(t_j)        = (j_bar / lam)     * mean_m b(x_j, Y^m_j)
    K(t_i, t_j)   = (sigma^2 / lam^2) * mean_m b(x_i, Y^m_i) b(x_j, Y^m_j).

Reweighting its law by exp(-1/2 sum_{j<k} G_j^2 dt) (left-endpoint rule)
gives another centred Gaussian law with covariance K (I + D K)^{-1}, where
D = dt on the tilted indices and 0 on the newest one.  ``TiltedState``
maintains the Cholesky factor of C = I + dt K_AA over the tilted indices A,
one row per time step, together with its inverse and the running
log-normalizer -1/2 log det C.

All arrays may carry leading batch dimensions (one state per path); reductions
are done with elementwise products and ``sum`` over the last axis so results
do not depend on the batch size.
"""
import numpy as np

from .errors import DivergentMoment, NumericalDegeneracy

PSD_TOL = 1e-8


def _check_ensemble(mu):
    if mu.m_paths == 0:
        raise ValueError("empty ensemble")


def mean_field(x_prefix, t_index, mu, params, kernel):
    """m_mu(t, x) at grid index ``t_index``."""
    _check_ensemble(mu)
    params.require_noise()
    b = kernel(x_prefix[t_index], mu.states[:, t_index])
    return params.j_bar / params.lam * np.mean(b)


def covariance_row(x_prefix, t_index, mu, params, kernel):
    """K_mu(t_i, t_{t_index}, x) for i = 0..t_index."""
    _check_ensemble(mu)
    params.require_noise()
    idx = np.arange(t_index + 1)
    b_past = kernel(np.asarray(x_prefix)[idx, None], mu.states[:, idx].T)
    return params.sigma ** 2 / params.lam ** 2 * np.mean(b_past * b_past[t_index], axis=-1)


class TiltedState:
    """Incrementally factorized tilt of a growing covariance prefix.

    ``k`` rows of K are stored (indices 0..k-1); indices 0..k-2 are tilted
    with weight ``dt`` and the newest index is not.
    """

    def __init__(self, capacity, dt, batch_shape=()):
        self.capacity = capacity
        self.dt = float(dt)
        self.batch_shape = tuple(batch_shape)
        shape = self.batch_shape + (capacity, capacity)
        self.K = np.zeros(shape)
        self.chol = np.zeros(shape)
        self.chol_inv = np.zeros(shape)
        self.log_norm = np.zeros(self.batch_shape)
        self.k = 0

    @classmethod
    def from_matrix(cls, K, dt):
        K = np.asarray(K, dtype=float)
        n = K.shape[-1]
        state = cls(n, dt, K.shape[:-2])
        for j in range(n):
            extend_tilt(state, K[..., j, :j + 1])
        return state

    @property
    def n_tilted(self):
        return max(self.k - 1, 0)

    def prefix(self):
        return self.K[..., :self.k, :self.k]


def _absorb_pending(state):
    """Move the newest index into the tilted block: one Cholesky row, O(k^2)."""
    j = state.k - 1
    dt = state.dt
    L, Linv = state.chol, state.chol_inv
    k_row = state.K[..., j, :j]
    # z = L^{-1} K_{A,j}; new factor row is dt * z
    z = np.sum(Linv[..., :j, :j] * k_row[..., None, :], axis=-1)
    # tilted variance of the new index given the tilt on 0..j-1
    v = state.K[..., j, j] - dt * np.sum(z * z, axis=-1)
    if np.any(v < -PSD_TOL):
        raise NumericalDegeneracy(
            f"negative tilted variance {np.min(v):.3e} at index {j}")
    v = np.maximum(v, 0.0)
    d = np.sqrt(1.0 + dt * v)
    L[..., j, :j] = dt * z
    L[..., j, j] = d
    # inverse of the extended lower-triangular factor
    Linv[..., j, :j] = -np.sum((dt * z / d[..., None])[..., :, None] * Linv[..., :j, :j], axis=-2)
    Linv[..., j, j] = 1.0 / d
    state.log_norm = state.log_norm - 0.5 * np.log1p(dt * v)


def extend_tilt(state, new_row, dt=None):
    """Append row k of K (entries K(t_i, t_k), i <= k) and tilt index k-1."""
    if dt is not None and float(dt) != state.dt:
        raise ValueError("dt differs from the state's dt")
    new_row = np.asarray(new_row, dtype=float)
    k = state.k
    if new_row.shape[-1] != k + 1:
        raise ValueError(f"expected a row of length {k + 1}, got {new_row.shape[-1]}")
    if k >= state.capacity:
        raise ValueError("TiltedState capacity exceeded")
    if k >= 1:
        _absorb_pending(state)
    state.K[..., k, :k + 1] = new_row
    state.K[..., :k + 1, k] = new_row
    state.k = k + 1
    return state


def _cinv_apply(state, vec):
    """C^{-1} vec over the tilted block, vec has length n_tilted."""
    a = state.n_tilted
    Linv = state.chol_inv[..., :a, :a]
    y = np.sum(Linv * vec[..., None, :], axis=-1)
    return np.sum(Linv * y[..., :, None], axis=-2)


def tilted_covariance_row(state, t_index):
    """Row ``t_index`` of K (I + D K)^{-1} over the current prefix."""
    if not 0 <= t_index < state.k:
        raise IndexError(f"t_index {t_index} outside prefix of length {state.k}")
    a = state.n_tilted
    K = state.K
    row = K[..., t_index, :a]
    w = _cinv_apply(state, row)
    out = np.empty(state.batch_shape + (state.k,))
    out[..., :a] = w
    last = state.k - 1
    out[..., last] = K[..., t_index, last] - state.dt * np.sum(w * K[..., :a, last], axis=-1)
    return out


def tilted_covariance(state):
    return np.stack([tilted_covariance_row(state, i) for i in range(state.k)], axis=-2)


def tilt_and_shift(state, u):
    """(K~(t_k, t_j))_{j<k} . u and K~(t_k, t_k) for the newest index k.

    Equivalent to ``tilted_covariance_row(state, k)`` contracted with u but
    only needs L^{-1} K_{A,k} and L^{-1} u.
    """
    a = state.n_tilted
    Linv = state.chol_inv[..., :a, :a]
    kcol = state.K[..., a, :a]
    z = np.sum(Linv * kcol[..., None, :], axis=-1)
    y = np.sum(Linv * u[..., None, :a], axis=-1)
    var = state.K[..., a, a] - state.dt * np.sum(z * z, axis=-1)
    return np.sum(z * y, axis=-1), var


def ktilde_trace_identity(state):
    """|log_norm - sum_k -1/2 log(1 + dt K~^{(k)}(t_k, t_k))|.

    The tilted variances are recomputed densely, independently of the
    incremental factor.  Single (unbatched) states only.
    """
    if state.batch_shape:
        raise ValueError("identity check takes an unbatched state")
    K = state.prefix()
    dt = state.dt
    total = 0.0
    for k in range(state.n_tilted):
        v = K[k, k]
        if k > 0:
            C = np.eye(k) + dt * K[:k, :k]
            v = v - dt * K[k, :k] @ np.linalg.solve(C, K[:k, k])
        total += -0.5 * np.log1p(dt * v)
    return float(abs(state.log_norm - total))


def gaussian_quadratic_moment(alpha, beta):
    """E[exp(zeta^2 / 2)] for zeta ~ N(alpha, beta)."""
    if beta >= 1:
        raise DivergentMoment(f"E[exp(zeta^2/2)] is infinite for variance {beta} >= 1")
    if beta < 0:
        raise ValueError(f"variance must be nonnegative, got {beta}")
    return (1.0 - beta) ** -0.5 * np.exp(alpha ** 2 / (2.0 * (1.0 - beta)))


def drift_O(dW, tilt, m):
    """Interaction drift O_k = m_k + sum_{j<k} K~(t_k, t_j) (dW_j - m_j dt).

    ``tilt`` holds rows 0..k, ``m`` the mean field at 0..k and ``dW`` the
    reference increments 0..k-1.
    """
    k = tilt.k - 1
    m = np.asarray(m, dtype=float)
    u = np.asarray(dW, dtype=float)[..., :k] - m[..., :k] * tilt.dt
    row = tilted_covariance_row(tilt, k)
    return m[..., k] + np.sum(row[..., :k] * u, axis=-1)
