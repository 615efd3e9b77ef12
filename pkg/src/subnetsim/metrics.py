"""Per-sensor link metrics: ZF output powers, SINR and finite-blocklength rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ._kernels import kernels as _default_kernels
from .beamforming import stack_subnetwork_channel, zf_batch
from .channel import ChannelState
from .config import SimConfig

__all__ = [
    "SensorMetrics",
    "noise_power",
    "sensor_powers",
    "sinr",
    "q_inv",
    "fbl_rate",
    "evaluate_all_sensors",
]

LOG2_E = math.log2(math.e)


@dataclass(frozen=True)
class SensorMetrics:
    """Metrics for all O sensors of one realization (struct of arrays, length O)."""

    p_signal: np.ndarray
    p_ci: np.ndarray
    p_ui: np.ndarray
    sinr: np.ndarray
    rate_bps: np.ndarray
    deferred: np.ndarray
    f_norm_sq: np.ndarray

    def __len__(self) -> int:
        return len(self.rate_bps)


def dbm_to_watt(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watt_to_dbm(watt):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(watt, dtype=float)) + 30.0


def noise_power(cfg: SimConfig) -> float:
    """Thermal noise power in W over the channel bandwidth, noise figure included."""
    if cfg.bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    dbm = cfg.noise_psd_dbm_hz + 10.0 * math.log10(cfg.bandwidth_hz) + cfg.noise_figure_db
    return 10.0 ** ((dbm - 30.0) / 10.0)


def sensor_powers(F: np.ndarray, state: ChannelState, mu: np.ndarray, b: int, o_b: int,
                  radiating: np.ndarray | None = None):
    """(p_signal, p_ci, p_ui) for sensor ``o_b`` of sub-network ``b``.

    ``F`` is the (M, O_b) combiner of sub-network b, ``mu`` the (O,) linear
    transmit powers. Sensors with ``radiating[i] == False`` contribute no
    interference.
    """
    O_b = state.sensors_per_subnetwork
    o = b * O_b + o_b
    mu = np.asarray(mu, dtype=float)
    if radiating is not None:
        mu_int = np.where(radiating, mu, 0.0)
    else:
        mu_int = mu
    f = F[:, o_b]
    H_all = state.stacked()[:, b, :]  # (O, M)
    proj = np.abs(H_all @ f.conj()) ** 2
    own = np.zeros(state.num_sensors, dtype=bool)
    own[b * O_b:(b + 1) * O_b] = True
    p_signal = mu[o] * proj[o]
    others = own.copy()
    others[o] = False
    p_ci = float(np.sum(mu_int[others] * proj[others]))
    p_ui = float(np.sum(mu_int[~own] * proj[~own]))
    return float(p_signal), p_ci, p_ui


def sinr(p_signal, p_ci, p_ui, f_norm_sq, noise: float):
    """Gamma = P_s / (P_CI + P_UI + sigma^2 ||f||^2)."""
    return np.asarray(p_signal) / (np.asarray(p_ci) + np.asarray(p_ui)
                                   + noise * np.asarray(f_norm_sq))


def q_inv(p):
    """Inverse Gaussian tail function: x with Q(x) = p."""
    arr = np.asarray(p, dtype=float)
    if np.any((arr <= 0) | (arr >= 1)) or np.any(np.isnan(arr)):
        raise ValueError("q_inv is defined on the open interval (0, 1)")
    out = -ndtri(arr)
    return float(out) if out.ndim == 0 else out


def fbl_rate(gamma, cfg: SimConfig):
    """Normal-approximation finite-blocklength rate in bit/s, clamped at 0."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError("SINR must be >= 0")
    dispersion = np.sqrt(1.0 - 1.0 / (1.0 + g) ** 2)
    penalty = dispersion * q_inv(cfg.packet_error_rate) / math.sqrt(
        cfg.packet_duration_s * cfg.bandwidth_hz) * LOG2_E
    rate = cfg.uplink_fraction * cfg.bandwidth_hz * (np.log2(1.0 + g) - penalty)
    rate = np.maximum(rate, 0.0)
    return float(rate) if rate.ndim == 0 else rate


def evaluate_all_sensors(state: ChannelState, mu: np.ndarray, noise: float, cfg: SimConfig,
                         deferred_subnetworks=(), kernels=None) -> SensorMetrics:
    """Metrics for every sensor given transmit powers and the deferred set.

    Deferred sub-networks get no beamformer and zero rate. Unless
    ``cfg.include_deferred_interference`` is set, their sensors are silent
    and do not interfere with the survivors.

    Raises :class:`~subnetsim.beamforming.RankDeficientError` if any
    surviving sub-network's channel is degenerate.
    """
    kernels = kernels or _default_kernels
    B = state.num_subnetworks
    O_b = state.sensors_per_subnetwork
    O = state.num_sensors
    mu = np.ascontiguousarray(mu, dtype=float)

    evaluate = np.ones(B, dtype=np.uint8)
    evaluate[list(deferred_subnetworks)] = 0
    sensor_deferred = np.repeat(evaluate == 0, O_b)
    radiating = np.ones(O, dtype=np.uint8)
    if not cfg.include_deferred_interference:
        radiating[sensor_deferred] = 0

    hstack = np.ascontiguousarray(state.stacked())
    M = hstack.shape[2]
    fh = np.zeros((B, O_b, M), dtype=complex)
    f_norm_sq = np.zeros(O)
    live = np.flatnonzero(evaluate)
    if live.size:
        H = np.stack([hstack[b * O_b:(b + 1) * O_b, b, :].T for b in live])
        try:
            F = zf_batch(H, cfg.zf_max_condition)
        except Exception as exc:
            if hasattr(exc, "subnetworks"):
                exc.subnetworks = tuple(int(live[i]) for i in exc.subnetworks)
            raise
        fh[live] = np.conj(np.swapaxes(F, -1, -2))
        norms = (np.abs(F) ** 2).sum(axis=1)  # (len(live), O_b)
        for i, b in enumerate(live):
            f_norm_sq[b * O_b:(b + 1) * O_b] = norms[i]

    p_s, p_ci, p_ui = kernels.zf_powers(fh, hstack, mu, radiating, evaluate)
    gamma = np.zeros(O)
    ok = ~sensor_deferred
    gamma[ok] = sinr(p_s[ok], p_ci[ok], p_ui[ok], f_norm_sq[ok], noise)
    rate = np.zeros(O)
    rate[ok] = fbl_rate(gamma[ok], cfg)
    return SensorMetrics(p_s, p_ci, p_ui, gamma, rate, sensor_deferred, f_norm_sq)
