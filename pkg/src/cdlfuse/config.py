"""Tunable scalars of the fusion method, with defaults and validation."""

import math
from dataclasses import dataclass, fields


@dataclass(frozen=True)
class FusionConfig:
    """Parameter set shared by the whole pipeline.

    patch_dim is the number of pixels per (square) patch, so the patch side
    is sqrt(patch_dim).  Defaults are the standard operating point: 8x8
    fully overlapping patches, a 2x overcomplete dictionary, five outer
    iterations with the sparsity warm start ending at T=5.
    """

    patch_dim: int = 64
    dict_atoms: int = 128
    outer_iters: int = 5
    sparsity_T: int = 5
    rho: float = 10.0
    epsilon: float = 1e-4
    delta: float = 1e-7
    stride: int = 1

    def validate(self):
        if self.patch_dim < 1:
            raise ValueError("patch_dim must be >= 1")
        if math.isqrt(self.patch_dim) ** 2 != self.patch_dim:
            raise ValueError("patch_dim must be a perfect square")
        if self.dict_atoms < 1:
            raise ValueError("dict_atoms must be >= 1")
        if self.outer_iters < 1:
            raise ValueError("outer_iters must be >= 1")
        if self.sparsity_T < 1:
            raise ValueError("sparsity_T must be >= 1")
        if self.sparsity_T > self.dict_atoms:
            raise ValueError("sparsity_T must be <= dict_atoms")
        if self.sparsity_T > self.patch_dim:
            raise ValueError("sparsity_T must be <= patch_dim")
        if not self.rho > 0:
            raise ValueError("rho must be > 0")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if not self.delta > 0:
            raise ValueError("delta must be > 0")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        return self

    @property
    def patch_side(self) -> int:
        return math.isqrt(self.patch_dim)


_INT_FIELDS = {"patch_dim", "dict_atoms", "outer_iters", "sparsity_T", "stride"}
_FLOAT_FIELDS = {"rho", "epsilon", "delta"}


def load_config(source: str) -> FusionConfig:
    """Parse a flat key=value config.

    Lines starting with '#' are comments; blank lines are ignored; keys are
    exactly the FusionConfig field names.  Unknown keys and malformed values
    are rejected with the offending key named.  Absent keys take defaults.
    """
    values = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key in _INT_FIELDS:
            try:
                values[key] = int(val)
            except ValueError:
                raise ValueError(f"{key} must be an integer, got {val!r}") from None
        elif key in _FLOAT_FIELDS:
            try:
                values[key] = float(val)
            except ValueError:
                raise ValueError(f"{key} must be a number, got {val!r}") from None
        else:
            raise ValueError(f"unknown config key {key!r}")
        if key in values and not math.isfinite(values[key]):
            raise ValueError(f"{key} must be finite, got {val!r}")
    return FusionConfig(**values).validate()


def format_config(cfg: FusionConfig) -> str:
    """Serialize a config so that load_config(format_config(cfg)) == cfg."""
    lines = [f"{f.name}={getattr(cfg, f.name)!r}" for f in fields(cfg)]
    return "\n".join(lines) + "\n"
