"""Factory-hall deployments: sub-network centers, AP and sensor placement.

Indices are 0-based throughout. Sub-network ``b`` owns the contiguous
global sensor block ``b*O_b .. (b+1)*O_b - 1`` and AP block
``b*A_b .. (b+1)*A_b - 1``; AP ``b*A_b`` sits at the sub-network center.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .config import SimConfig

__all__ = [
    "PlacementInfeasibleError",
    "SubnetworkLayout",
    "Topology",
    "sample_disk",
    "sample_subnetwork_centers",
    "place_aps",
    "place_sensors",
    "build_topology",
]


class PlacementInfeasibleError(RuntimeError):
    pass


@dataclass(frozen=True)
class SubnetworkLayout:
    center: np.ndarray  # (3,)
    ap_positions: np.ndarray  # (A_b, 3)
    sensor_positions: np.ndarray  # (O_b, 3)


@dataclass(frozen=True)
class Topology:
    hall_side_m: float
    hall_height_m: float
    centers: np.ndarray  # (B, 3)
    ap_positions: np.ndarray  # (B, A_b, 3)
    sensor_positions: np.ndarray  # (B, O_b, 3)

    @property
    def num_subnetworks(self) -> int:
        return self.centers.shape[0]

    @property
    def aps_per_subnetwork(self) -> int:
        return self.ap_positions.shape[1]

    @property
    def sensors_per_subnetwork(self) -> int:
        return self.sensor_positions.shape[1]

    @property
    def num_sensors(self) -> int:
        return self.num_subnetworks * self.sensors_per_subnetwork

    @property
    def num_aps(self) -> int:
        return self.num_subnetworks * self.aps_per_subnetwork

    @property
    def sensors(self) -> np.ndarray:
        """All sensor positions in global index order, shape (O, 3)."""
        return self.sensor_positions.reshape(-1, 3)

    @property
    def aps(self) -> np.ndarray:
        """All AP positions in global index order, shape (A, 3)."""
        return self.ap_positions.reshape(-1, 3)

    @property
    def sensor_subnetwork(self) -> np.ndarray:
        return np.repeat(np.arange(self.num_subnetworks), self.sensors_per_subnetwork)

    @property
    def ap_subnetwork(self) -> np.ndarray:
        return np.repeat(np.arange(self.num_subnetworks), self.aps_per_subnetwork)

    def subnetwork(self, b: int) -> SubnetworkLayout:
        return SubnetworkLayout(self.centers[b], self.ap_positions[b], self.sensor_positions[b])

    def sensor_index(self, b: int, o_b: int) -> int:
        return b * self.sensors_per_subnetwork + o_b

    def ap_index(self, b: int, a_b: int) -> int:
        return b * self.aps_per_subnetwork + a_b

    def sensor_location(self, o: int) -> tuple[int, int]:
        """Inverse of :meth:`sensor_index`: global index -> (b, o_b)."""
        return divmod(o, self.sensors_per_subnetwork)

    def ap_location(self, a: int) -> tuple[int, int]:
        return divmod(a, self.aps_per_subnetwork)

    def digest(self) -> str:
        h = hashlib.sha256()
        for arr in (self.centers, self.ap_positions, self.sensor_positions):
            h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
        return h.hexdigest()[:16]

    def rows(self):
        """Yield (entity, global index, sub-network, x, y, z) for a topology dump."""
        for kind, pos, owner in (("ap", self.aps, self.ap_subnetwork),
                                 ("sensor", self.sensors, self.sensor_subnetwork)):
            for i, (p, b) in enumerate(zip(pos, owner)):
                yield kind, i, int(b), float(p[0]), float(p[1]), float(p[2])


def sample_disk(n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """``n`` area-uniform points in a disk around the origin, shape (n, 2)."""
    u = rng.random(n)
    v = rng.random(n)
    rho = radius * np.sqrt(u)
    theta = 2.0 * np.pi * v
    return np.column_stack((rho * np.cos(theta), rho * np.sin(theta)))


def grid_capacity(cfg: SimConfig) -> int:
    """Number of cells of the square fallback grid."""
    span = cfg.hall_side_m - 2.0 * cfg.subnetwork_radius_m
    n = int(np.floor(span / cfg.min_center_separation_m + 1e-9)) + 1
    return n * n


def _grid_centers(B: int, cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    lo = cfg.subnetwork_radius_m
    span = cfg.hall_side_m - 2.0 * lo
    sep = cfg.min_center_separation_m
    n = int(round(grid_capacity(cfg) ** 0.5))
    if n * n < B:
        raise PlacementInfeasibleError(
            f"cannot place {B} sub-networks with separation {sep} m in a "
            f"{cfg.hall_side_m} m hall (grid holds {n * n})")
    pitch = span / (n - 1) if n > 1 else 0.0
    jitter = max(0.0, (pitch - sep) / 2.0)
    axis = lo + pitch * np.arange(n)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    cells = np.column_stack((gx.ravel(), gy.ravel()))
    chosen = cells[np.sort(rng.choice(n * n, size=B, replace=False))]
    if jitter > 0:
        chosen = chosen + rng.uniform(-jitter, jitter, size=chosen.shape)
        chosen = np.clip(chosen, lo, cfg.hall_side_m - lo)
    return chosen


def _rejection_centers(B: int, cfg: SimConfig, rng: np.random.Generator):
    lo = cfg.subnetwork_radius_m
    hi = cfg.hall_side_m - lo
    sep_sq = cfg.min_center_separation_m ** 2
    placed = np.empty((B, 2))
    count = 0
    attempts = 0
    stall = 0
    batch = 256
    while count < B:
        if attempts >= cfg.placement_max_attempts or stall >= cfg.placement_stall_attempts:
            return None
        cand = rng.uniform(lo, hi, size=(batch, 2))
        if count:
            d2 = ((cand[:, None, :] - placed[None, :count, :]) ** 2).sum(axis=-1)
            ok = np.flatnonzero((d2 >= sep_sq).all(axis=1))
        else:
            ok = np.arange(batch)
        used = batch
        before = count
        for i in ok:
            c = cand[i]
            if count and (((placed[:count] - c) ** 2).sum(axis=1) < sep_sq).any():
                continue
            placed[count] = c
            count += 1
            if count == B:
                used = i + 1
                break
        attempts += used
        stall = 0 if count > before else stall + used
    return placed


def sample_subnetwork_centers(cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    """Sample B centers, shape (B, 3), pairwise >= min separation apart.

    Rejection sampling first; when that jams (dense deployments) a jittered
    square grid is used instead. A deployment that fills every grid cell
    goes to the grid directly, since sequential random placement jams long
    before a full packing.
    """
    B = cfg.num_subnetworks
    xy = None if B >= grid_capacity(cfg) else _rejection_centers(B, cfg, rng)
    if xy is None:
        xy = _grid_centers(B, cfg, rng)
    return np.column_stack((xy, np.full(B, cfg.ap_height_m)))


def place_aps(center: np.ndarray, cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    A_b = cfg.aps_per_subnetwork
    out = np.empty((A_b, 3))
    out[0] = (center[0], center[1], cfg.ap_height_m)
    out[1:, :2] = center[:2] + sample_disk(A_b - 1, cfg.subnetwork_radius_m, rng)
    out[1:, 2] = cfg.ap_height_m
    return out


def place_sensors(center: np.ndarray, cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    O_b = cfg.sensors_per_subnetwork
    out = np.empty((O_b, 3))
    out[:, :2] = center[:2] + sample_disk(O_b, cfg.subnetwork_radius_m, rng)
    out[:, 2] = cfg.sensor_height_m
    return out


def build_topology(cfg: SimConfig, rng: np.random.Generator) -> Topology:
    centers = sample_subnetwork_centers(cfg, rng)
    aps = np.stack([place_aps(c, cfg, rng) for c in centers])
    sensors = np.stack([place_sensors(c, cfg, rng) for c in centers])
    return Topology(cfg.hall_side_m, cfg.hall_height_m, centers, aps, sensors)
