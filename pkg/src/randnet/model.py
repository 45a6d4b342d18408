"""Model specification, admissibility and sampling of initial data and disorder.

The network is

    dX^i = ( f(r_i, t, X^i) + sum_j J_ij b(X^i, X^j) ) dt + lam dW^i,

with J_ij i.i.d. N(j_bar / N, sigma^2 / N) and positions r_i uniform on
[0, 1]^d.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import rng
from .errors import ConfigurationError


@dataclass(frozen=True)
class ModelParams:
    j_bar: float
    sigma: float
    lam: float
    horizon: float
    n_steps: int
    position_dim: int = 0
    init_spread: float = 0.0
    init_center: float = 0.0
    init_slope: float = 0.0

    def __post_init__(self):
        if not self.lam >= 0:
            raise ConfigurationError(f"lambda must be >= 0, got {self.lam}")
        if not self.horizon > 0:
            raise ConfigurationError(f"horizon must be > 0, got {self.horizon}")
        if not self.sigma >= 0:
            raise ConfigurationError(f"sigma must be >= 0, got {self.sigma}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ConfigurationError(f"n_steps must be a positive integer, got {self.n_steps}")
        if int(self.position_dim) != self.position_dim or self.position_dim < 0:
            raise ConfigurationError(f"position_dim must be >= 0, got {self.position_dim}")
        if not self.init_spread >= 0:
            raise ConfigurationError(f"init_spread must be >= 0, got {self.init_spread}")

    def require_noise(self):
        # every density / tilting quantity is scaled by 1/lambda
        if self.lam == 0:
            raise ConfigurationError("this operation needs lambda > 0")

    def init_profile(self, positions):
        """Mean initial condition x0_bar(r) = center + slope * sum(r)."""
        positions = np.asarray(positions, dtype=float)
        base = np.full(positions.shape[0], float(self.init_center))
        if self.init_slope != 0 and positions.shape[1] > 0:
            base = base + self.init_slope * positions.sum(axis=1)
        return base

    def replace(self, **changes):
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return ModelParams(**values)


@dataclass(frozen=True)
class InteractionKernel:
    """Interaction b(x, y): impact of a particle at y on a particle at x.

    ``eval`` must broadcast over numpy arrays.  The bounds are declared, not
    computed; the test-suite spot-checks them.
    """
    name: str
    eval: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    sup_bound: float
    lip_x: float
    lip_y: float
    gain: float = 1.0

    def __call__(self, x, y):
        return self.eval(x, y)


@dataclass(frozen=True)
class IntrinsicDrift:
    """Intrinsic dynamics f(r, t, x); ``eval(r, t, x)`` takes r of shape (M, d)."""
    name: str
    eval: Callable[[np.ndarray, float, np.ndarray], np.ndarray] = field(repr=False)
    lip: float
    rate: float = 1.0

    def __call__(self, r, t, x):
        return self.eval(r, t, x)


KERNELS = ("kuramoto", "sigmoid_gain", "bump")
DRIFTS = ("zero", "decay", "frequency")


def builtin_kernel(name, gain=1.0):
    if name == "kuramoto":
        return InteractionKernel(name, lambda x, y: np.sin(y - x), 1.0, 1.0, 1.0, gain)
    if name == "sigmoid_gain":
        g = float(gain)
        # b(x, y) = S(y): independent of the receiving state
        return InteractionKernel(
            name, lambda x, y: np.broadcast_to(np.tanh(g * y), np.broadcast(x, y).shape),
            1.0, 0.0, abs(g), g)
    if name == "bump":
        lip = float(np.sqrt(2.0 / np.e))
        return InteractionKernel(name, lambda x, y: np.exp(-(y - x) ** 2), 1.0, lip, lip, gain)
    raise ConfigurationError(f"unknown kernel {name!r}; choose from {KERNELS}")


def builtin_drift(name, rate=1.0):
    a = float(rate)
    if name == "zero":
        return IntrinsicDrift(name, lambda r, t, x: np.zeros_like(x), 0.0, a)
    if name == "decay":
        return IntrinsicDrift(name, lambda r, t, x: -a * x, abs(a), a)
    if name == "frequency":
        # natural frequency read off the first position coordinate
        def f(r, t, x):
            if r.shape[1] == 0:
                return np.zeros_like(x)
            return np.broadcast_to(a * (r[:, 0] - 0.5), x.shape).astype(float)
        return IntrinsicDrift(name, f, 0.0, a)
    raise ConfigurationError(f"unknown drift {name!r}; choose from {DRIFTS}")


@dataclass(frozen=True)
class TimeGrid:
    horizon: float
    n_steps: int

    @classmethod
    def from_params(cls, params):
        return cls(params.horizon, params.n_steps)

    @property
    def dt(self):
        return self.horizon / self.n_steps

    @property
    def nodes(self):
        return np.arange(self.n_steps + 1) * self.dt


@dataclass
class PathEnsemble:
    """M discretized trajectories with their positions and noise.

    ``brownian_increments`` is the driving noise.  ``ref_increments``, when
    recorded by a simulator, holds the increments of the reference Brownian
    motion W(x, r) = (x_t - x_0 - int f) / lam seen by each path, which is
    what path densities with respect to the uncoupled law are written in.
    ``drift_record`` holds the interaction drift O_k used by the mean-field
    solver.
    """
    states: np.ndarray
    positions: np.ndarray
    brownian_increments: np.ndarray
    seed: int
    ref_increments: Optional[np.ndarray] = None
    drift_record: Optional[np.ndarray] = None

    @property
    def m_paths(self):
        return self.states.shape[0]

    @property
    def n_steps(self):
        return self.states.shape[1] - 1

    def subset(self, index):
        index = np.asarray(index)
        pick = lambda a: None if a is None else a[index]
        return PathEnsemble(self.states[index], self.positions[index],
                            self.brownian_increments[index], self.seed,
                            pick(self.ref_increments), pick(self.drift_record))


@dataclass(frozen=True)
class DisorderMatrix:
    n: int
    entries: np.ndarray
    seed: int


@dataclass(frozen=True)
class AdmissibilityReport:
    value: float
    admissible: bool


def check_time_horizon(params, kernel):
    value = 2.0 * params.sigma ** 2 * kernel.sup_bound ** 2 * params.horizon
    if params.lam == 0:
        value = 0.0 if value == 0 else float("inf")
    else:
        value /= params.lam ** 2
    return AdmissibilityReport(float(value), bool(value < 1.0))


def sample_initial(params, count, rng_seed):
    """Initial states x0_bar(r_i) + init_spread * xi_i and positions r_i ~ U[0,1]^d."""
    if count < 1:
        raise ConfigurationError("count must be >= 1")
    d = params.position_dim
    positions = rng.stream(rng_seed, rng.POSITION).random((count, d))
    jitter = rng.stream(rng_seed, rng.INIT).standard_normal(count)
    states0 = params.init_profile(positions) + params.init_spread * jitter
    return states0, positions


def sample_noise(m_paths, n_steps, dt, rng_seed):
    """Brownian increments, i.i.d. N(0, dt), row i for path i."""
    z = rng.stream(rng_seed, rng.NOISE).standard_normal((m_paths, n_steps))
    return np.sqrt(dt) * z


def sample_disorder(n, params, rng_seed):
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    z = rng.stream(rng_seed, rng.DISORDER).standard_normal((n, n))
    entries = params.j_bar / n + params.sigma / np.sqrt(n) * z
    return DisorderMatrix(n, entries, int(rng_seed))
