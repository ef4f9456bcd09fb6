"""Budgets and knobs for typechecking, evaluation and the property harness."""

import os
from dataclasses import dataclass, fields
from typing import Any, Dict, Mapping, Optional

FUEL_ENV_VAR = "GDTL_FUEL"


@dataclass
class GdtlConfig:
    """
    Configuration shared by the CLI, the tool server and the harness.

    Design principles:
    - Runtime fuel and normalization fuel are separate budgets
    - Normalization fuel only pays for eliminator unfolding inside types
    - Harness settings never change what a single program means

    Example:
        config = GdtlConfig(fuel=5000, stutter=3)
        outcome = run(term, config.fuel)
    """

    # === EVALUATION BUDGETS ===
    fuel: int = 100_000               # Runtime steps for `run`
    norm_fuel: int = 10_000           # Eliminator unfoldings during normalization

    # === PROPERTY HARNESS ===
    property_fuel: int = 1000         # Runtime steps per generated program
    stutter: int = 3                  # Administrative steps tolerated in lock-step runs
    unknown_rate: float = 0.3         # Chance of `?` or an ascription at each generated node
    gen_size: int = 4                 # Depth budget for generated terms
    max_retries: int = 20             # Attempts before the generator shrinks its goal

    # === PRINTING ===
    verbose_levels: bool = False      # Show `->{i}` level annotations on arrows
    unicode_evidence: bool = True     # `⟨U⟩` brackets, `<U>` when False

    def __post_init__(self):
        for name in ("fuel", "norm_fuel", "property_fuel", "stutter"):
            value = getattr(self, name)
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")
        for name in ("gen_size", "max_retries"):
            value = getattr(self, name)
            if value < 1:
                raise ValueError(f"{name} must be at least 1, got {value}")
        if not 0.0 <= self.unknown_rate <= 1.0:
            raise ValueError(f"unknown_rate must be in [0.0, 1.0], got {self.unknown_rate}")

    @classmethod
    def default(cls) -> "GdtlConfig":
        """Return the default budgets."""
        return cls()

    @classmethod
    def quick(cls) -> "GdtlConfig":
        """Small budgets for smoke runs."""
        return cls(fuel=10_000, norm_fuel=2000, property_fuel=300, gen_size=3, max_retries=10)

    @classmethod
    def thorough(cls) -> "GdtlConfig":
        """Larger budgets for the full property suite."""
        return cls(fuel=1_000_000, norm_fuel=50_000, property_fuel=1000, gen_size=5, max_retries=50)

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None,
                 base: Optional["GdtlConfig"] = None) -> "GdtlConfig":
        """Apply the ``GDTL_FUEL`` override on top of ``base``.

        Args:
            environ: Mapping to read from (defaults to ``os.environ``)
            base: Starting configuration (defaults to ``default()``)

        Returns:
            A new config; ``base`` is not modified
        """
        environ = os.environ if environ is None else environ
        data = (base or cls.default()).to_dict()
        raw = environ.get(FUEL_ENV_VAR)
        if raw:
            try:
                data["fuel"] = int(raw)
            except ValueError:
                raise ValueError(f"{FUEL_ENV_VAR} must be an integer, got {raw!r}")
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary for serialization."""
        return {key: value for key, value in self.__dict__.items() if not key.startswith("_")}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GdtlConfig":
        """Create config from dictionary, ignoring unknown keys."""
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in data.items() if key in known})
