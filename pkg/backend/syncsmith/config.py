"""
Centralized Configuration Management.

All simulation settings, constants, and environment variables are managed here.
"""

import os
from dataclasses import dataclass, field
from enum import Enum


# =============================================================================
# ENVIRONMENT DETECTION
# =============================================================================

def is_debug_mode() -> bool:
    """Check if debug mode is enabled."""
    raw = os.environ.get("SYNCSMITH_DEBUG", os.environ.get("DEBUG", ""))
    return raw.lower() in ("true", "1", "yes")


def _env_int(name: str, default: int) -> int:
    """Read a positive integer from the environment, falling back to default."""
    raw = os.environ.get(name, "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return value if value > 0 else default


def node_budget_from_env() -> int:
    """Cap on the size of forged networks (SYNCSMITH_NODE_BUDGET)."""
    return _env_int("SYNCSMITH_NODE_BUDGET", 2000)


def workers_from_env() -> int:
    """Fan-out width for seed-grid forging (SYNCSMITH_WORKERS)."""
    return _env_int("SYNCSMITH_WORKERS", 4)


# =============================================================================
# ENUMS FOR TYPE SAFETY
# =============================================================================

class Theorem(str, Enum):
    """Counterexample constructions the adversary can forge."""
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"
    T4 = "T4"


class SyncOutcome(str, Enum):
    """Outcome of the mod-P synchronization check."""
    SYNCHRONIZED = "SYNCHRONIZED"
    NOT_SYNCHRONIZED = "NOT_SYNCHRONIZED"


class MultisetMode(str, Enum):
    """How an FSM table abstracts received multisets."""
    SET = "set"
    SATURATING = "saturating"


class ExitCode(int, Enum):
    """Stable CLI exit codes."""
    OK = 0
    NEGATIVE = 1
    THEOREM_VIOLATION = 2
    USAGE = 64
    IO = 66


# =============================================================================
# DEFAULT VALUES (Magic Numbers centralized)
# =============================================================================

@dataclass(frozen=True)
class SimulationDefaults:
    """Execution and sync-check defaults."""

    # min_suffix = SYNC_SUFFIX_FACTOR * P * n
    SYNC_SUFFIX_FACTOR: int = 2

    # Largest received multiset enumerated by the closure walk
    CLOSURE_MULTISET_SIZE: int = 3

    # d_max = DIAMETER_SEARCH_FACTOR * n when not given
    DIAMETER_SEARCH_FACTOR: int = 8


@dataclass(frozen=True)
class ForgeDefaults:
    """Horizon defaults for the counterexample constructions."""

    ROUNDS_PER_PERIOD: int = 20
    THM3_EXTRA_ROUNDS: int = 4
    THM4_K_MAX: int = 8

    # Smallest ring the directed / bidirectional constructions will build
    MIN_DIRECTED_RING: int = 2
    MIN_HALF_BIDIRECTIONAL_RING: int = 2


@dataclass(frozen=True)
class BoundsDefaults:
    """Number-theory constants."""

    CHEBYSHEV_CONSTANT: float = 1.11
    # Classical sharp constant for pi(x) <= c * x / ln x, valid for all x > 1
    ROSSER_SCHOENFELD_CONSTANT: float = 1.25506

    MIN_NETWORK_SIZE: int = 4


@dataclass(frozen=True)
class ZooDefaults:
    """Reference algorithm defaults."""

    FLOOD_MAX_PERIOD: int = 4


# =============================================================================
# RUNTIME CONFIGURATION
# =============================================================================

@dataclass
class RuntimeConfig:
    """Environment-driven limits."""

    NODE_BUDGET: int = field(default_factory=node_budget_from_env)
    WORKERS: int = field(default_factory=workers_from_env)


# =============================================================================
# SINGLETON CONFIG INSTANCE
# =============================================================================

@dataclass
class AppConfig:
    """Main application configuration container."""

    DEBUG: bool = field(default_factory=is_debug_mode)

    # Sub-configurations
    simulation: SimulationDefaults = field(default_factory=SimulationDefaults)
    forge: ForgeDefaults = field(default_factory=ForgeDefaults)
    bounds: BoundsDefaults = field(default_factory=BoundsDefaults)
    zoo: ZooDefaults = field(default_factory=ZooDefaults)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)

    # Application info
    APP_NAME: str = "syncsmith"
    APP_VERSION: str = "1.0.0"


# Global config instance
config = AppConfig()
