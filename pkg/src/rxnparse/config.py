"""Reasoning-layer configuration, one place for every tunable."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .chem import FingerprintConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ReasoningConfig:
    """Knobs of the graph construction / fusion / inference stack.

    The fusion weights must be non-negative and sum to one; thresholds
    live in [0, 1].
    """

    k_nn: int = 4
    radius: float = 0.25
    layers: int = 2
    dim: int = 32
    beta: float = 0.7
    tau_chem: float = 0.3
    tau_cluster: float = 0.35
    tau_fuse: float = 0.45
    alpha_space: float = 0.3
    alpha_chem: float = 0.2
    alpha_init: float = 0.5
    exact_search_limit: int = 12
    conservation_penalty: float = 0.9
    weights_seed: int = 7
    fingerprint: FingerprintConfig = field(default_factory=FingerprintConfig)

    def __post_init__(self):
        for name in ("tau_chem", "tau_cluster", "tau_fuse", "radius"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"beta must lie in [0, 1], got {self.beta}")
        alphas = (self.alpha_space, self.alpha_chem, self.alpha_init)
        if any(a < 0 for a in alphas):
            raise ConfigError(f"fusion weights must be non-negative: {alphas}")
        if abs(sum(alphas) - 1.0) > 1e-9:
            raise ConfigError(f"fusion weights must sum to 1, got {sum(alphas)}")
        if self.k_nn < 0 or self.layers < 1 or self.exact_search_limit < 1:
            raise ConfigError("k_nn >= 0, layers >= 1, exact_search_limit >= 1 required")
        if not 0.0 < self.conservation_penalty <= 1.0:
            raise ConfigError("conservation_penalty must lie in (0, 1]")

    @property
    def alphas(self) -> tuple[float, float, float]:
        return (self.alpha_space, self.alpha_chem, self.alpha_init)

    def to_dict(self) -> dict:
        return {
            "k_nn": self.k_nn,
            "radius": self.radius,
            "layers": self.layers,
            "dim": self.dim,
            "beta": self.beta,
            "tau_chem": self.tau_chem,
            "tau_cluster": self.tau_cluster,
            "tau_fuse": self.tau_fuse,
            "alpha_space": self.alpha_space,
            "alpha_chem": self.alpha_chem,
            "alpha_init": self.alpha_init,
            "exact_search_limit": self.exact_search_limit,
            "conservation_penalty": self.conservation_penalty,
            "weights_seed": self.weights_seed,
            "fingerprint": self.fingerprint.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReasoningConfig":
        kwargs = dict(data)
        if "fingerprint" in kwargs and isinstance(kwargs["fingerprint"], dict):
            kwargs["fingerprint"] = FingerprintConfig.from_dict(kwargs["fingerprint"])
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(kwargs) - known
        if unknown:
            raise ConfigError(f"unknown reasoning config keys: {sorted(unknown)}")
        return cls(**kwargs)

    def updated(self, **changes) -> "ReasoningConfig":
        return replace(self, **changes)
