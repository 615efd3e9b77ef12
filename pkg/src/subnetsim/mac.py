"""Listen-before-talk deferral and adaptive power reduction (APR).

Interference is sensed per AP as the per-antenna average of the current
channel energy, ||h||^2 / M_ab, summed over every sensor outside the AP's
own sub-network.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import kernels as _default_kernels
from .channel import ChannelState
from .config import SimConfig
from .metrics import dbm_to_watt, watt_to_dbm

__all__ = [
    "FloorReachedError",
    "PowerAllocation",
    "DeferralDecision",
    "ap_uncontrolled_interference",
    "all_ap_interference",
    "lbt_deferral_set",
    "apr_steps_needed",
    "apr_power",
    "resolve_power_mode",
]


class FloorReachedError(RuntimeError):
    """APR would need to go below the configured power floor."""


@dataclass(frozen=True)
class PowerAllocation:
    tx_power_dbm: np.ndarray  # (O,)
    common_power_dbm: float | None = None
    apr_steps_applied: int = 0

    @property
    def mu(self) -> np.ndarray:
        """Linear transmit powers in W."""
        return dbm_to_watt(self.tx_power_dbm)

    @classmethod
    def uniform(cls, num_sensors: int, power_dbm: float, apr_steps: int | None = None):
        tx = np.full(num_sensors, float(power_dbm))
        if apr_steps is None:
            return cls(tx)
        return cls(tx, float(power_dbm), apr_steps)


@dataclass(frozen=True)
class DeferralDecision:
    deferred: frozenset
    ap_interference_w: np.ndarray = field(repr=False)  # (A,) W per antenna

    @property
    def max_interference_dbm(self) -> float:
        if self.ap_interference_w.size == 0:
            return -math.inf
        return float(watt_to_dbm(self.ap_interference_w.max()))


def all_ap_interference(state: ChannelState, mu, kernels=None) -> np.ndarray:
    """Per-antenna uncontrolled interference at every AP [W], shape (A,)."""
    kernels = kernels or _default_kernels
    return kernels.ap_interference(np.ascontiguousarray(state.gain),
                                   np.ascontiguousarray(mu, dtype=float),
                                   state.num_subnetworks, float(state.antennas_per_ap))


def ap_uncontrolled_interference(state: ChannelState, mu, a: int) -> float:
    """(1/M_ab) * sum over sensors l outside AP a's sub-network of mu_l ||h_{l,a}||^2."""
    mu = np.asarray(mu, dtype=float)
    b = a // state.aps_per_subnetwork
    O_b = state.sensors_per_subnetwork
    external = np.ones(state.num_sensors, dtype=bool)
    external[b * O_b:(b + 1) * O_b] = False
    h = state.h[:, a, :]
    energy = (h.real ** 2 + h.imag ** 2).sum(axis=1)
    return float(np.sum(mu[external] * energy[external]) / state.antennas_per_ap)


def lbt_deferral_set(state: ChannelState, mu, threshold_dbm: float,
                     kernels=None) -> DeferralDecision:
    """One-shot LBT: sub-network b defers iff any of its APs senses more than the threshold."""
    interference = all_ap_interference(state, mu, kernels)
    per_sub = interference.reshape(state.num_subnetworks, -1).max(axis=1)
    threshold_w = float(dbm_to_watt(threshold_dbm))
    deferred = frozenset(int(b) for b in np.flatnonzero(per_sub > threshold_w))
    return DeferralDecision(deferred, interference)


def apr_steps_needed(max_interference_dbm: float, threshold_dbm: float, step_db: float,
                     start_dbm: float, floor_dbm: float) -> int:
    """Number of ``step_db`` reductions until interference drops strictly below threshold.

    Interference scales linearly with the common sensor power, so each step
    lowers it by exactly ``step_db``.
    """
    k = 0
    while max_interference_dbm - k * step_db >= threshold_dbm:
        k += 1
        if start_dbm - k * step_db < floor_dbm:
            raise FloorReachedError(
                f"APR needs more than {k - 1} steps of {step_db} dB from {start_dbm} dBm "
                f"(floor {floor_dbm} dBm, max interference {max_interference_dbm:.2f} dBm)")
    return k


def apr_power(state: ChannelState, cfg: SimConfig, kernels=None):
    """Largest common power start - k*step under which no AP senses above the threshold.

    Returns ``(PowerAllocation, DeferralDecision)``; the decision holds the
    AP interference at the returned power and an empty deferred set.
    """
    O = state.num_sensors
    mu0 = np.full(O, float(dbm_to_watt(cfg.apr_start_dbm)))
    interference0 = all_ap_interference(state, mu0, kernels)
    peak = interference0.max() if interference0.size else 0.0
    if peak > 0:
        k = apr_steps_needed(float(watt_to_dbm(peak)), cfg.lbt_threshold_dbm, cfg.apr_step_db,
                             cfg.apr_start_dbm, cfg.apr_floor_dbm)
    else:
        k = 0
    power = cfg.apr_start_dbm - k * cfg.apr_step_db
    scale = 10.0 ** (-k * cfg.apr_step_db / 10.0)
    alloc = PowerAllocation.uniform(O, power, apr_steps=k)
    return alloc, DeferralDecision(frozenset(), interference0 * scale)


def resolve_power_mode(cfg: SimConfig, state: ChannelState, kernels=None):
    """Powers and deferred set for the configured mode (fixed+LBT or APR)."""
    if cfg.power_mode == "apr":
        return apr_power(state, cfg, kernels)
    alloc = PowerAllocation.uniform(state.num_sensors, cfg.tx_power_dbm)
    return alloc, lbt_deferral_set(state, alloc.mu, cfg.lbt_threshold_dbm, kernels)
