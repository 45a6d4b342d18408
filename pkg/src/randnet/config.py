"""Experiment configuration files (TOML).

Schema::

    [model]
    j_bar = 1.0          # mean coupling
    sigma = 0.5          # coupling standard-deviation scale
    lambda = 1.0         # noise amplitude
    horizon = 0.5        # T
    n_steps = 64
    position_dim = 0
    init_spread = 1.0    # std of the Gaussian jitter around x0_bar(r)
    init_center = 0.0    # x0_bar(r) = init_center + init_slope * sum(r)
    init_slope = 0.0

    [kernel]
    name = "kuramoto"    # kuramoto | sigmoid_gain | bump
    gain = 1.0

    [drift]
    name = "zero"        # zero | decay | frequency
    rate = 1.0

    [run]
    seed = 1             # master seed, unsigned 64-bit
    n = 256              # network size for `simulate`
    paths = 256          # ensemble size for `solve`
    tol = 0.01
    max_iter = 10
    n_list = [32, 64, 128, 256]
    replicates = 8
    force = false

Unknown keys are rejected.
"""
import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import List

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .errors import ConfigurationError
from .model import ModelParams, builtin_drift, builtin_kernel

_MODEL_KEYS = {"j_bar", "sigma", "lambda", "horizon", "n_steps", "position_dim",
               "init_spread", "init_center", "init_slope"}


@dataclass
class RunSettings:
    seed: int = 1
    n: int = 256
    paths: int = 256
    tol: float = 1e-2
    max_iter: int = 10
    n_list: List[int] = field(default_factory=lambda: [32, 64, 128, 256])
    replicates: int = 8
    force: bool = False


@dataclass
class ExperimentConfig:
    params: ModelParams
    kernel_name: str = "kuramoto"
    gain: float = 1.0
    drift_name: str = "zero"
    rate: float = 1.0
    run: RunSettings = field(default_factory=RunSettings)

    @property
    def kernel(self):
        return builtin_kernel(self.kernel_name, self.gain)

    @property
    def drift(self):
        return builtin_drift(self.drift_name, self.rate)

    def to_dict(self):
        model = asdict(self.params)
        model["lambda"] = model.pop("lam")
        return {"model": model,
                "kernel": {"name": self.kernel_name, "gain": self.gain},
                "drift": {"name": self.drift_name, "rate": self.rate},
                "run": asdict(self.run)}

    def digest(self):
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _check_keys(section, allowed, name):
    extra = set(section) - set(allowed)
    if extra:
        raise ConfigurationError(f"unknown keys in [{name}]: {sorted(extra)}")


def from_dict(data):
    _check_keys(data, {"model", "kernel", "drift", "run"}, "top level")
    model = dict(data.get("model", {}))
    _check_keys(model, _MODEL_KEYS, "model")
    if "lambda" in model:
        model["lam"] = model.pop("lambda")
    try:
        params = ModelParams(**model)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from None
    kernel = data.get("kernel", {})
    _check_keys(kernel, {"name", "gain"}, "kernel")
    drift = data.get("drift", {})
    _check_keys(drift, {"name", "rate"}, "drift")
    run = data.get("run", {})
    _check_keys(run, RunSettings.__dataclass_fields__, "run")
    settings = RunSettings(**run)
    if not 0 <= int(settings.seed) < 2 ** 64:
        raise ConfigurationError("seed must be an unsigned 64-bit integer")
    cfg = ExperimentConfig(params, kernel.get("name", "kuramoto"), float(kernel.get("gain", 1.0)),
                           drift.get("name", "zero"), float(drift.get("rate", 1.0)), settings)
    # fail early on bad names
    cfg.kernel, cfg.drift
    return cfg


def load_config(path):
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigurationError(f"{path}: {exc}") from None
    return from_dict(data)
