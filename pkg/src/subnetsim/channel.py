"""InF-DL large-scale gains and Rayleigh small-scale fading.

Path loss and LOS probability follow 3GPP TR 38.901 (Table 7.4.1-1 and
Table 7.4.2-1) for the indoor-factory dense-clutter, low-AP sub-scenario:

    PL_LOS  = 31.84 + 21.5 log10(d3d) + 19 log10(fc)
    PL_NLOS = max(PL_LOS, 33 + 25.5 log10(d3d) + 20 log10(fc),
                  18.6 + 35.7 log10(d3d) + 20 log10(fc))
    P_LOS   = exp(-d2d / k),   k = -d_clutter / ln(1 - r)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import kernels as _default_kernels
from .config import SimConfig
from .topology import Topology

__all__ = [
    "LargeScaleGain",
    "ChannelState",
    "los_decay_distance",
    "los_probability",
    "pathloss_db",
    "shadowing_db",
    "large_scale_beta",
    "small_scale_vector",
    "small_scale_field",
    "build_channel_state",
]


@dataclass(frozen=True)
class LargeScaleGain:
    beta: float
    los: bool
    pathloss_db: float
    shadow_db: float


def los_decay_distance(clutter_size_m: float, clutter_density: float) -> float:
    if not 0.0 < clutter_density < 1.0:
        raise ValueError(f"clutter density must lie in (0, 1), got {clutter_density}")
    return -clutter_size_m / math.log1p(-clutter_density)


def los_probability(d_2d, cfg: SimConfig):
    d_2d = np.asarray(d_2d, dtype=float)
    if np.any(d_2d < 0):
        raise ValueError("horizontal distance must be >= 0")
    k = los_decay_distance(cfg.clutter_size_m, cfg.clutter_density)
    p = np.exp(-d_2d / k)
    return float(p) if p.ndim == 0 else p


def pathloss_db(d_3d, f_c_ghz: float, los, min_distance_m: float = 1.0):
    """InF-DL path loss in dB; ``d_3d`` is clamped below at ``min_distance_m``."""
    d = np.asarray(d_3d, dtype=float)
    if np.any(d <= 0) or f_c_ghz <= 0:
        raise ValueError("distance and carrier frequency must be positive")
    logd = np.log10(np.maximum(d, min_distance_m))
    logf = math.log10(f_c_ghz)
    pl_los = 31.84 + 21.5 * logd + 19.0 * logf
    pl_nlos = np.maximum.reduce([18.6 + 35.7 * logd + 20.0 * logf, pl_los,
                                 33.0 + 25.5 * logd + 20.0 * logf])
    out = np.where(los, pl_los, pl_nlos)
    return float(out) if out.ndim == 0 else out


def shadowing_db(los, cfg: SimConfig, rng: np.random.Generator, size=None):
    sigma = np.where(los, cfg.shadow_sigma_los_db, cfg.shadow_sigma_nlos_db)
    out = sigma * rng.standard_normal(size if size is not None else np.shape(sigma))
    return float(out) if np.ndim(out) == 0 else out


def large_scale_beta(sensor_pos, ap_pos, cfg: SimConfig, rng: np.random.Generator,
                     force_los: bool | None = None) -> LargeScaleGain:
    """Draw LOS state and shadowing for one link and compose the linear gain."""
    sensor_pos = np.asarray(sensor_pos, dtype=float)
    ap_pos = np.asarray(ap_pos, dtype=float)
    d_2d = float(np.hypot(*(sensor_pos[:2] - ap_pos[:2])))
    d_3d = float(np.linalg.norm(sensor_pos - ap_pos))
    u = rng.random()
    los = bool(u < los_probability(d_2d, cfg)) if force_los is None else bool(force_los)
    pl = pathloss_db(max(d_3d, cfg.min_link_distance_m), cfg.carrier_freq_ghz, los,
                     cfg.min_link_distance_m)
    sf = shadowing_db(los, cfg, rng)
    return LargeScaleGain(10.0 ** (-(pl + sf) / 10.0), los, pl, sf)


def small_scale_vector(m: int, rng: np.random.Generator) -> np.ndarray:
    """CN(0, I_m) vector: independent real/imag parts with variance 1/2."""
    return small_scale_field((m,), rng)


def small_scale_field(shape, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * math.sqrt(0.5)


@dataclass
class ChannelState:
    """Every sensor-AP link of one drop.

    Large-scale arrays are (O, A); ``g`` is the current small-scale
    realization, (O, A, M_ab). Sub-network ``b`` owns sensor rows
    ``b*O_b:(b+1)*O_b`` and AP columns ``b*A_b:(b+1)*A_b``.
    """

    num_subnetworks: int
    beta: np.ndarray
    los: np.ndarray
    pathloss_db: np.ndarray
    shadow_db: np.ndarray
    g: np.ndarray
    _h: np.ndarray | None = field(default=None, repr=False)
    _gain: np.ndarray | None = field(default=None, repr=False)

    @property
    def num_sensors(self) -> int:
        return self.beta.shape[0]

    @property
    def num_aps(self) -> int:
        return self.beta.shape[1]

    @property
    def antennas_per_ap(self) -> int:
        return self.g.shape[2]

    @property
    def sensors_per_subnetwork(self) -> int:
        return self.num_sensors // self.num_subnetworks

    @property
    def aps_per_subnetwork(self) -> int:
        return self.num_aps // self.num_subnetworks

    @property
    def h(self) -> np.ndarray:
        """Channel vectors h_{o,a} = sqrt(beta_{o,a}) g_{o,a}, shape (O, A, M_ab)."""
        if self._h is None:
            self._h = np.sqrt(self.beta)[..., None] * self.g
        return self._h

    @property
    def gain(self) -> np.ndarray:
        """||h_{o,a}||^2, shape (O, A)."""
        if self._gain is None:
            g2 = self.g.real ** 2 + self.g.imag ** 2
            self._gain = self.beta * g2.sum(axis=-1)
        return self._gain

    def vector(self, o: int, a: int) -> np.ndarray:
        return self.h[o, a]

    def stacked(self) -> np.ndarray:
        """h_i^b for every sensor i and sub-network b, shape (O, B, M).

        Row block b of the last axis concatenates the AP channels of
        sub-network b in AP-index order.
        """
        O, A, m = self.h.shape
        return self.h.reshape(O, self.num_subnetworks, (A // self.num_subnetworks) * m)

    def with_fading(self, g: np.ndarray) -> "ChannelState":
        """Same large-scale draw, new small-scale realization."""
        if g.shape != self.g.shape:
            raise ValueError(f"fading shape {g.shape} != {self.g.shape}")
        return ChannelState(self.num_subnetworks, self.beta, self.los, self.pathloss_db,
                            self.shadow_db, g)


def draw_large_scale(topology: Topology, cfg: SimConfig, rng: np.random.Generator,
                     kernels=None):
    """LOS, path loss, shadowing and beta for every link, each (O, A)."""
    kernels = kernels or _default_kernels
    O, A = topology.num_sensors, topology.num_aps
    u_los = rng.random((O, A))
    z = rng.standard_normal((O, A))
    los, pl, sf, beta = kernels.large_scale_gains(
        np.ascontiguousarray(topology.sensors), np.ascontiguousarray(topology.aps), u_los, z,
        cfg.carrier_freq_ghz, los_decay_distance(cfg.clutter_size_m, cfg.clutter_density),
        cfg.shadow_sigma_los_db, cfg.shadow_sigma_nlos_db, cfg.min_link_distance_m)
    return los.astype(bool), pl, sf, beta


def build_channel_state(topology: Topology, cfg: SimConfig, rng: np.random.Generator,
                        fading_rng: np.random.Generator | None = None,
                        kernels=None) -> ChannelState:
    """Large-scale gains from ``rng``; the first fading draw from ``fading_rng``
    (defaults to ``rng``)."""
    los, pl, sf, beta = draw_large_scale(topology, cfg, rng, kernels)
    g = small_scale_field((topology.num_sensors, topology.num_aps, cfg.antennas_per_ap),
                          fading_rng if fading_rng is not None else rng)
    return ChannelState(topology.num_subnetworks, beta, los, pl, sf, g)
