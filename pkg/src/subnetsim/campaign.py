"""Monte-Carlo campaign: drops x fading realizations, pooling and ECDFs.

Each drop gets its own random stream derived from ``(master_seed,
drop_index)`` through :class:`numpy.random.SeedSequence`, so results do not
depend on how drops are spread over worker processes.
"""

from __future__ import annotations

import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .beamforming import RankDeficientError
from .channel import ChannelState, draw_large_scale, small_scale_field
from .config import SimConfig
from .mac import FloorReachedError, resolve_power_mode
from .metrics import evaluate_all_sensors, noise_power
from .topology import build_topology

__all__ = [
    "CampaignError",
    "DropFailedError",
    "Ecdf",
    "RealizationDiagnostics",
    "DropResult",
    "CampaignResult",
    "drop_streams",
    "run_drop",
    "run_campaign",
    "ecdf",
    "quantile",
    "worker_count",
    "QUANTILE_LEVELS",
]

log = logging.getLogger(__name__)

QUANTILE_LEVELS = (0.001, 0.01)


class CampaignError(RuntimeError):
    pass


class DropFailedError(CampaignError):
    """Every fading realization of a drop was aborted."""


@dataclass(frozen=True)
class Ecdf:
    values: np.ndarray  # sorted, length n
    probabilities: np.ndarray  # i/n, i = 1..n

    def __len__(self) -> int:
        return len(self.values)

    def __call__(self, x):
        """F(x) = fraction of samples <= x."""
        return np.searchsorted(self.values, x, side="right") / len(self.values)

    def steps(self):
        """Distinct sample values with the cumulative probability reached at each."""
        last = np.r_[self.values[1:] != self.values[:-1], True]
        return self.values[last], self.probabilities[last]


def ecdf(samples) -> Ecdf:
    values = np.sort(np.asarray(samples, dtype=float).ravel())
    n = len(values)
    if n == 0:
        raise ValueError("cannot build an ECDF from an empty sample")
    return Ecdf(values, np.arange(1, n + 1) / n)


def quantile(e: Ecdf, p: float) -> float:
    """Lower empirical quantile: smallest v_(k) with k/n >= p."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"probability level must lie in (0, 1], got {p}")
    n = len(e)
    if n * p < 1.0 - 1e-9:
        warnings.warn(f"{n} samples are too few to resolve the {p} quantile", stacklevel=2)
    k = max(1, math.ceil(round(n * p, 9)))
    return float(e.values[k - 1])


@dataclass(frozen=True)
class RealizationDiagnostics:
    aborted: bool
    reason: str = ""
    deferred_subnetworks: int = 0
    apr_steps: int = 0
    max_ap_interference_dbm: float = -math.inf


@dataclass(frozen=True)
class DropResult:
    """Per-realization arrays have shape (R, O); aborted rows are NaN / False."""

    drop_index: int
    topology_digest: str
    tx_power_dbm: np.ndarray
    deferred: np.ndarray
    sinr: np.ndarray
    rate_bps: np.ndarray
    valid: np.ndarray  # (R,)
    diagnostics: tuple

    @property
    def deferral_count(self) -> int:
        return int(sum(d.deferred_subnetworks for d in self.diagnostics if not d.aborted))

    @property
    def aborted_realizations(self) -> int:
        return int((~self.valid).sum())

    def same_as(self, other: "DropResult") -> bool:
        arrays = ("tx_power_dbm", "deferred", "sinr", "rate_bps", "valid")
        return (self.drop_index == other.drop_index
                and self.topology_digest == other.topology_digest
                and self.diagnostics == other.diagnostics
                and all(np.array_equal(getattr(self, a), getattr(other, a), equal_nan=True)
                        if getattr(self, a).dtype.kind == "f"
                        else np.array_equal(getattr(self, a), getattr(other, a))
                        for a in arrays))


def drop_streams(master_seed: int, drop_index: int, realizations: int):
    """Independent generators: topology, large-scale, then one per fading realization."""
    root = np.random.SeedSequence(master_seed, spawn_key=(drop_index,))
    return [np.random.Generator(np.random.PCG64(s)) for s in root.spawn(2 + realizations)]


def run_drop(cfg: SimConfig, drop_index: int, master_seed: int | None = None,
             kernels=None) -> DropResult:
    """Simulate one drop: topology, large-scale gains, then each fading realization."""
    if master_seed is None:
        master_seed = cfg.master_seed
    kernels = kernels or _kernels.kernels
    R = cfg.fading_realizations_per_drop
    O = cfg.num_sensors
    rng_topo, rng_large, *rng_fading = drop_streams(master_seed, drop_index, R)

    topology = build_topology(cfg, rng_topo)
    los, pl, sf, beta = draw_large_scale(topology, cfg, rng_large, kernels)
    noise = noise_power(cfg)

    tx = np.full((R, O), np.nan)
    deferred = np.zeros((R, O), dtype=bool)
    gamma = np.full((R, O), np.nan)
    rate = np.full((R, O), np.nan)
    valid = np.zeros(R, dtype=bool)
    diags = []
    shape = (topology.num_sensors, topology.num_aps, cfg.antennas_per_ap)
    for r in range(R):
        state = ChannelState(cfg.num_subnetworks, beta, los, pl, sf,
                             small_scale_field(shape, rng_fading[r]))
        try:
            alloc, decision = resolve_power_mode(cfg, state, kernels)
            metrics = evaluate_all_sensors(state, alloc.mu, noise, cfg, decision.deferred, kernels)
        except (RankDeficientError, FloorReachedError) as exc:
            log.debug("drop %d realization %d aborted: %s", drop_index, r, exc)
            diags.append(RealizationDiagnostics(True, f"{type(exc).__name__}: {exc}"))
            continue
        valid[r] = True
        tx[r] = alloc.tx_power_dbm
        deferred[r] = metrics.deferred
        gamma[r] = metrics.sinr
        rate[r] = metrics.rate_bps
        diags.append(RealizationDiagnostics(False, "", len(decision.deferred),
                                            alloc.apr_steps_applied,
                                            decision.max_interference_dbm))
    result = DropResult(drop_index, topology.digest(), tx, deferred, gamma, rate, valid,
                        tuple(diags))
    if not valid.any():
        raise DropFailedError(f"drop {drop_index}: all {R} realizations aborted "
                              f"({diags[0].reason})")
    return result


@dataclass
class CampaignResult:
    config: SimConfig
    master_seed: int
    drop: np.ndarray
    realization: np.ndarray
    subnetwork: np.ndarray
    sensor: np.ndarray
    tx_power_dbm: np.ndarray
    deferred: np.ndarray
    sinr: np.ndarray
    rate_bps: np.ndarray
    rate_ecdf: Ecdf
    power_ecdf: Ecdf
    quantiles: dict
    zero_rate_fraction: float
    deferral_fraction: float
    aborted_realizations: int
    failed_drops: tuple
    diagnostics: list = field(repr=False)
    backend: str = "python"

    @property
    def num_samples(self) -> int:
        return len(self.rate_bps)

    @property
    def sinr_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.sinr)

    def apr_powers_per_drop(self) -> np.ndarray:
        """Common APR power of each valid realization (one sample per realization)."""
        return np.array([self.config.apr_start_dbm - d.apr_steps * self.config.apr_step_db
                         for d in self.diagnostics if not d.aborted])


def worker_count(requested: int | None = None) -> int:
    if requested is None:
        env = os.environ.get("SUBNETSIM_THREADS", "").strip()
        requested = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(requested))


def _drop_task(args):
    cfg, index, seed, backend = args
    try:
        return run_drop(cfg, index, seed, _kernels.get_backend(backend))
    except DropFailedError as exc:
        return exc


def _pool(results, cfg: SimConfig, seed: int, backend: str) -> CampaignResult:
    good = [r for r in results if isinstance(r, DropResult)]
    failed = tuple(i for i, r in enumerate(results) if not isinstance(r, DropResult))
    if not good:
        raise CampaignError(f"all {len(results)} drops failed")
    B, O_b = cfg.num_subnetworks, cfg.sensors_per_subnetwork
    cols = {k: [] for k in ("drop", "realization", "tx", "deferred", "sinr", "rate")}
    diagnostics = []
    aborted = 0
    for res in good:
        rows = np.flatnonzero(res.valid)
        aborted += res.aborted_realizations
        diagnostics.extend(res.diagnostics)
        n = len(rows)
        cols["drop"].append(np.full(n * B * O_b, res.drop_index))
        cols["realization"].append(np.repeat(rows, B * O_b))
        cols["tx"].append(res.tx_power_dbm[rows].ravel())
        cols["deferred"].append(res.deferred[rows].ravel())
        cols["sinr"].append(res.sinr[rows].ravel())
        cols["rate"].append(res.rate_bps[rows].ravel())
    cat = {k: np.concatenate(v) for k, v in cols.items()}
    total = len(cat["rate"])
    reps = total // (B * O_b)
    subnetwork = np.tile(np.repeat(np.arange(B), O_b), reps)
    sensor = np.tile(np.arange(O_b), B * reps)
    rate_e = ecdf(cat["rate"])
    return CampaignResult(
        config=cfg,
        master_seed=seed,
        drop=cat["drop"],
        realization=cat["realization"],
        subnetwork=subnetwork,
        sensor=sensor,
        tx_power_dbm=cat["tx"],
        deferred=cat["deferred"],
        sinr=cat["sinr"],
        rate_bps=cat["rate"],
        rate_ecdf=rate_e,
        power_ecdf=ecdf(cat["tx"]),
        quantiles={p: quantile(rate_e, p) for p in QUANTILE_LEVELS},
        zero_rate_fraction=float(np.mean(cat["rate"] == 0.0)),
        deferral_fraction=float(np.mean(cat["deferred"])),
        aborted_realizations=aborted,
        failed_drops=failed,
        diagnostics=diagnostics,
        backend=backend,
    )


def run_campaign(cfg: SimConfig, workers: int | None = None, backend: str | None = None,
                 progress=None) -> CampaignResult:
    """Run ``cfg.num_drops`` drops and pool them in drop-index order.

    ``workers`` defaults to ``SUBNETSIM_THREADS`` (else the CPU count);
    output does not depend on it. ``progress``, if given, is called with the
    number of finished drops.
    """
    kernels = _kernels.get_backend(backend)
    backend = _kernels.backend_name(kernels)
    workers = min(worker_count(workers), cfg.num_drops)
    tasks = [(cfg, i, cfg.master_seed, backend) for i in range(cfg.num_drops)]
    results = []
    if workers <= 1:
        for t in tasks:
            results.append(_drop_task(t))
            if progress:
                progress(len(results))
    else:
        chunk = max(1, cfg.num_drops // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_drop_task, tasks, chunksize=chunk):
                results.append(res)
                if progress:
                    progress(len(results))
    for i, r in enumerate(results):
        if not isinstance(r, DropResult):
            log.warning("drop %d failed: %s", i, r)
    return _pool(results, cfg, cfg.master_seed, backend)
