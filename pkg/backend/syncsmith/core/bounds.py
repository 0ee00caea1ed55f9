"""
Bounds
State and time lower bounds with the supporting number theory: prime
counting, lcm(1..k) via prime powers and the Chebyshev-type estimates.
"""

import math
from functools import lru_cache
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from loguru import logger

from ..config import config
from ..exceptions import InvalidParameterError
from ..models.schemas import BoundReport, BoundSupport
from .sequences import lcm_upto


# =============================================================================
# SIEVE
# =============================================================================

@lru_cache(maxsize=None)
def _sieve_block(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    is_prime.flags.writeable = False
    return is_prime


def _sieve(k: int) -> np.ndarray:
    # Blocks grow by powers of two so nearby queries share one table
    limit = 1 << max(4, int(k).bit_length())
    return _sieve_block(limit)[: k + 1]


def primes_upto(k: int) -> np.ndarray:
    if k < 2:
        return np.array([], dtype=np.int64)
    return np.flatnonzero(_sieve(k)).astype(np.int64)


def prime_count(k: int) -> int:
    """pi(k)."""
    if k < 0:
        raise InvalidParameterError(f"prime_count needs k >= 0, got {k}")
    if k < 2:
        return 0
    return int(np.count_nonzero(_sieve(k)))


def _max_power(p: int, k: int) -> int:
    """Largest p^e <= k, by repeated multiplication."""
    pe = p
    while pe * p <= k:
        pe *= p
    return pe


def _exponent(p: int, k: int) -> int:
    e, pe = 1, p
    while pe * p <= k:
        pe *= p
        e += 1
    return e


# =============================================================================
# LCM(1..k)
# =============================================================================

def lcm_upto_factored(k: int) -> int:
    """k^! as the product of the largest prime powers not exceeding k."""
    if k < 1:
        raise InvalidParameterError(f"lcm_upto_factored needs k >= 1, got {k}")
    return math.prod(_max_power(int(p), k) for p in primes_upto(k))


def log_lcm_upto(k: int) -> float:
    """ln k^! = sum over primes p <= k of e_p(k) * ln p."""
    if k < 1:
        raise InvalidParameterError(f"log_lcm_upto needs k >= 1, got {k}")
    return float(sum(_exponent(int(p), k) * math.log(p) for p in primes_upto(k)))


def _psi_table(limit: int) -> np.ndarray:
    """psi[k] = ln k^! for every k <= limit."""
    increments = np.zeros(limit + 1, dtype=np.float64)
    for p in primes_upto(limit).tolist():
        log_p = math.log(p)
        pe = p
        while pe <= limit:
            increments[pe] += log_p
            pe *= p
    return np.cumsum(increments)


# =============================================================================
# CHEBYSHEV ESTIMATES
# =============================================================================

def chebyshev_detail(k: int, pi_constant: Optional[float] = None) -> Dict[str, Any]:
    """Both sides of pi(k) <= c k / ln k and ln k^! <= 1.11 k."""
    if k < 2:
        raise InvalidParameterError(f"Chebyshev estimates need k >= 2, got {k}")
    c = pi_constant if pi_constant is not None else config.bounds.CHEBYSHEV_CONSTANT
    pi_k = prime_count(k)
    pi_bound = c * k / math.log(k)
    log_lcm = log_lcm_upto(k)
    lcm_bound = config.bounds.CHEBYSHEV_CONSTANT * k
    return {
        "k": k,
        "pi": pi_k,
        "pi_bound": pi_bound,
        "pi_ok": pi_k <= pi_bound,
        "log_lcm": log_lcm,
        "lcm_bound": lcm_bound,
        "lcm_ok": log_lcm <= lcm_bound,
    }


def chebyshev_check(k: int, pi_constant: Optional[float] = None) -> bool:
    detail = chebyshev_detail(k, pi_constant)
    return detail["pi_ok"] and detail["lcm_ok"]


def chebyshev_scan(limit: int, pi_constant: Optional[float] = None) -> pd.DataFrame:
    """
    Vectorized check of both estimates for every 2 <= k <= limit.

    Returns a frame with columns k, pi, log_lcm, pi_ok, lcm_ok.
    """
    if limit < 2:
        raise InvalidParameterError(f"Scan limit must be >= 2, got {limit}")
    c = pi_constant if pi_constant is not None else config.bounds.CHEBYSHEV_CONSTANT
    ks = np.arange(2, limit + 1)
    pi = np.cumsum(_sieve(limit))[2:]
    psi = _psi_table(limit)[2:]
    frame = pd.DataFrame({
        "k": ks,
        "pi": pi,
        "log_lcm": psi,
        "pi_ok": pi <= c * ks / np.log(ks),
        "lcm_ok": psi <= config.bounds.CHEBYSHEV_CONSTANT * ks,
    })
    logger.debug(
        f"Chebyshev scan to {limit}: {int((~frame['pi_ok']).sum())} pi failures, "
        f"{int((~frame['lcm_ok']).sum())} lcm failures (c={c})"
    )
    return frame


# =============================================================================
# LOWER BOUNDS
# =============================================================================

def dynamic_state_lower_bound(n: int) -> int:
    """1 + floor(ln(n/2) / 1.11) states on dynamic graphs of at most n nodes."""
    if n < 2:
        raise InvalidParameterError(f"Need n >= 2, got {n}")
    return 1 + math.floor(math.log(n / 2) / config.bounds.CHEBYSHEV_CONSTANT)


def thm5_consistent(state_count: int) -> bool:
    """
    An algorithm with `state_count` states is defeated on 2 * lcm(1..|Q|)
    nodes; the state bound for that size must not exceed |Q|.
    """
    if state_count < 1:
        raise InvalidParameterError(f"Need at least one state, got {state_count}")
    size = 2 * lcm_upto(state_count)
    bound = dynamic_state_lower_bound(size)
    logger.debug(f"|Q|={state_count}: network of {size} nodes needs >= {bound} states")
    return state_count >= bound


def lower_bounds(n: int) -> BoundReport:
    if n < config.bounds.MIN_NETWORK_SIZE:
        raise InvalidParameterError(
            f"Bounds need n >= {config.bounds.MIN_NETWORK_SIZE}, got {n}", {"n": n}
        )
    return BoundReport(
        n=n,
        self_stab_state_lb=n + 1,
        self_stab_time_lb=n - 2,
        dynamic_state_lb=dynamic_state_lower_bound(n),
        supporting=BoundSupport(pi_n=prime_count(n), log_lcm=log_lcm_upto(n)),
    )
