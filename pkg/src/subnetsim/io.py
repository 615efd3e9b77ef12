"""Result files: per-sensor samples, ECDFs, summary, optional chart and topology dump."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .campaign import CampaignResult, Ecdf
from .config import dump_config
from .topology import Topology

__all__ = [
    "OutputError",
    "SAMPLE_COLUMNS",
    "write_campaign_outputs",
    "write_samples",
    "write_ecdf",
    "write_summary",
    "write_topology",
    "plot_cdfs",
]

SAMPLE_COLUMNS = ("drop", "subnetwork", "sensor", "tx_power_dbm", "deferred", "sinr_db",
                  "rate_bps")


class OutputError(OSError):
    pass


def _num(x) -> str:
    """Locale-free, round-trippable number text."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _open(path: Path):
    try:
        return path.open("w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from exc


def write_samples(result: CampaignResult, path: Path) -> Path:
    with_realization = result.config.fading_realizations_per_drop > 1
    header = list(SAMPLE_COLUMNS)
    if with_realization:
        header.insert(1, "realization")
    sinr_db = result.sinr_db
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(result.num_samples):
            row = [int(result.drop[i]), int(result.subnetwork[i]), int(result.sensor[i]),
                   _num(result.tx_power_dbm[i]), int(bool(result.deferred[i])),
                   _num(sinr_db[i]), _num(result.rate_bps[i])]
            if with_realization:
                row.insert(1, int(result.realization[i]))
            w.writerow(row)
    return path


def write_ecdf(e: Ecdf, path: Path) -> Path:
    values, probs = e.steps()
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["value", "cumulative_probability"])
        for v, p in zip(values, probs):
            w.writerow([_num(v), _num(p)])
    return path


def summary_lines(result: CampaignResult) -> list[str]:
    cfg = result.config
    lines = [
        f"num_subnetworks: {cfg.num_subnetworks}",
        f"aps_per_subnetwork: {cfg.aps_per_subnetwork}",
        f"antennas_per_ap: {cfg.antennas_per_ap}",
        f"power_mode: {cfg.power_mode}",
    ]
    if cfg.power_mode == "fixed":
        lines.append(f"tx_power_dbm: {_num(cfg.tx_power_dbm)}")
    else:
        lines.append(f"apr_start_dbm: {_num(cfg.apr_start_dbm)}")
        lines.append(f"apr_step_db: {_num(cfg.apr_step_db)}")
        lines.append(f"apr_floor_dbm: {_num(cfg.apr_floor_dbm)}")
    lines += [
        f"num_drops: {cfg.num_drops}",
        f"fading_realizations_per_drop: {cfg.fading_realizations_per_drop}",
        f"master_seed: {result.master_seed}",
        f"num_samples: {result.num_samples}",
    ]
    for p, v in sorted(result.quantiles.items()):
        lines.append(f"rate_cdf_{p:g}_bps: {_num(v)}")
    lines += [
        f"deferral_fraction: {_num(result.deferral_fraction)}",
        f"zero_rate_fraction: {_num(result.zero_rate_fraction)}",
        f"mean_rate_bps: {_num(np.mean(result.rate_bps))}",
        f"median_tx_power_dbm: {_num(np.median(result.tx_power_dbm))}",
        f"aborted_realizations: {result.aborted_realizations}",
        f"failed_drops: {len(result.failed_drops)}",
        f"clutter_density: {_num(cfg.clutter_density)}",
        f"shadow_sigma_los_db: {_num(cfg.shadow_sigma_los_db)}",
        f"shadow_sigma_nlos_db: {_num(cfg.shadow_sigma_nlos_db)}",
        f"kernel_backend: {result.backend}",
    ]
    return lines


def write_summary(result: CampaignResult, path: Path) -> Path:
    with _open(path) as fh:
        fh.write("\n".join(summary_lines(result)) + "\n")
    return path


def write_topology(topology: Topology, path: Path) -> Path:
    with _open(Path(path)) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["entity", "index", "subnetwork", "x", "y", "z"])
        for kind, i, b, x, y, z in topology.rows():
            w.writerow([kind, i, b, _num(x), _num(y), _num(z)])
    return Path(path)


def plot_cdfs(result: CampaignResult, path: Path) -> Path:
    """Static SVG with the rate and transmit-power ECDFs (needs matplotlib)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax_r, ax_p) = plt.subplots(1, 2, figsize=(9, 3.5))
    v, p = result.rate_ecdf.steps()
    ax_r.step(v / 1e6, p, where="post")
    ax_r.set_xlabel("uplink rate [Mbit/s]")
    ax_r.set_ylabel("CDF")
    v, p = result.power_ecdf.steps()
    ax_p.step(v, p, where="post")
    ax_p.set_xlabel("sensor transmit power [dBm]")
    for ax in (ax_r, ax_p):
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from exc
    finally:
        plt.close(fig)
    return path


def write_campaign_outputs(result: CampaignResult, directory, plot: bool = False) -> dict:
    """Write rates.csv, cdf.csv, power_cdf.csv, summary.txt and config.toml.

    Returns a manifest mapping file role to path.
    """
    out = Path(directory)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out}: {exc.strerror}") from exc
    manifest = {
        "samples": write_samples(result, out / "rates.csv"),
        "rate_cdf": write_ecdf(result.rate_ecdf, out / "cdf.csv"),
        "power_cdf": write_ecdf(result.power_ecdf, out / "power_cdf.csv"),
        "summary": write_summary(result, out / "summary.txt"),
    }
    cfg_path = out / "config.toml"
    with _open(cfg_path) as fh:
        fh.write(dump_config(result.config))
    manifest["config"] = cfg_path
    if plot:
        manifest["plot"] = plot_cdfs(result, out / "cdf.svg")
    return manifest
